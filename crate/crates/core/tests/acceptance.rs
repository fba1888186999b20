//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use loopspace_core::diffeology::{
    d_topology_separation_witness, endpoint_lower_bound_check, hausdorff_volume, hausdorff_volume_over,
    FlatChart, GluedLinesPoint, GluedLinesSpace, MobiusPlot, OptimizerBudget, Plot, PseudoDistance,
    SphereExpChart,
};
use loopspace_core::homotopy::{
    bridge_concatenation, continuity_modulus, delta_p, fit_line, gamma_h, gamma_h_bound, geometric_grid,
    retraction_homotopy, truncation_homotopy, HomotopyFamily,
};
use loopspace_core::spectral::{
    dft_synthesize, interval_indicator, partial_norm_sums, random_rough_loop, random_smooth_loop,
    sampled_derivative, sampled_sobolev_norm, sobolev_norm, spectral_product,
};
use loopspace_core::symplectic::{omega_flat, pairing_bound_check, single_mode_ratio};
use loopspace_core::{Ambient, FourierLoop, ManifoldSpec, ReparamPhi, SampledLoop, SobolevOrder, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn run<T>(r: loopspace_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Based loop in `ℝ^d` built from a random smooth loop.
fn based_loop(amb: Ambient, m: usize, seed: u64) -> SampledLoop {
    let f = dft_synthesize(&random_smooth_loop(amb, 8, 1.0, seed), m).unwrap();
    let start = f.get(0).to_vec();
    f.map(|_, v| v.iter().zip(&start).map(|(a, b)| a - b).collect())
}

fn norms() -> Outcome {
    let mut worst: f64 = 0.0;
    let e1 = FourierLoop::single_mode(Ambient::Complex(1), 1, 1, &[C64::new(1.0, 0.0)]);
    for s in [-0.5, 0.0, 0.5, 1.0] {
        worst = worst.max((sobolev_norm(&e1, SobolevOrder(s)) - 2f64.powf(s)).abs());
    }
    let mut parseval: f64 = 0.0;
    for seed in 0..100 {
        let f = random_smooth_loop(Ambient::Complex(2), 16, 1.0, seed);
        let sampled = run(dft_synthesize(&f, 64))?;
        parseval = parseval.max((sampled.l2_norm() - sobolev_norm(&f, SobolevOrder::L2)).abs());
    }
    check(
        worst < 1e-12 && parseval < 1e-10,
        format!("mode error {worst:.1e}, Parseval error {parseval:.1e}"),
    )
}

fn threshold() -> Outcome {
    let ind = interval_indicator(0.0, 0.5, 1 << 14);
    let cutoffs: Vec<usize> = (10..=14).map(|k| 1 << k).collect();
    let growth = |s: f64| {
        let sums = partial_norm_sums(&ind, SobolevOrder(s), &cutoffs);
        sums.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect::<Vec<_>>()
    };
    let low = growth(0.25);
    let high = growth(0.75);
    let low_max = low.iter().cloned().fold(0.0, f64::max);
    let high_min = high.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        low_max < 0.01 && high_min >= 0.2,
        format!("s=0.25 max tail {low_max:.4}, s=0.75 min growth {high_min:.3}"),
    )
}

fn mollifier() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for l in [0.1, 0.25, 0.5, 1.0] {
        let phi = run(ReparamPhi::new(l))?;
        let rep = phi.verify_boundary_conditions(3, 1e-4);
        let slope_ok = rep.slope_max <= 3.0 / l + 1e-6;
        ok &= rep.all_pass() && slope_ok;
        lines.push(format!("l={l}: slope {:.4}", rep.slope_max));
    }
    let id = run(ReparamPhi::new(1.0))?;
    let mut ident: f64 = 0.0;
    for k in 0..=1000 {
        let s = k as f64 / 1000.0;
        ident = ident.max((run(id.phi_eval(s))? - s).abs());
    }
    ok &= ident < 1e-10;
    check(ok, format!("{}; |φ(1,s)-s| {ident:.1e}", lines.join(", ")))
}

fn basepoint_family() -> Outcome {
    let m = 1 << 14;
    let (theta0, a) = (0.3, 0.02);
    let circle = ManifoldSpec::circle();
    let x = C64::from_polar(1.0, theta0);
    let g = SampledLoop::from_fn(Ambient::Complex(1), m, |t| {
        vec![C64::from_polar(1.0, theta0 + a * (2.0 * PI * t).sin())]
    });
    let v = sampled_derivative(&g).get(0).to_vec();
    let tau = run(circle.bridge_loop(&[x], &v, m))?;
    let mut dists = Vec::new();
    let mut bounded = true;
    for k in 1..=8 {
        let h = 0.5f64.powi(k);
        let d = run(run(gamma_h(&g, &tau, h))?.l2_distance(&g))?;
        bounded &= d <= run(gamma_h_bound(&g, &tau, h))?;
        dists.push(d);
    }
    let decreasing = dists.windows(2).all(|w| w[1] < w[0]);
    let last = *dists.last().unwrap();
    let near_one = run(gamma_h(&g, &tau, 1.0 - 0.5f64.powi(10)))?;
    let limit = run(near_one.l2_distance(&run(bridge_concatenation(&tau, m))?))?;
    let g8 = run(gamma_h(&g, &tau, 0.5f64.powi(8)))?;
    let rough = sampled_sobolev_norm(&run(g8.sub(&g))?, SobolevOrder(0.75));
    check(
        decreasing && bounded && last < 0.05 && limit < 1e-3 && rough > 0.1,
        format!(
            "L² {:.4} → {last:.4} (decreasing {decreasing}, bounded {bounded}), limit {limit:.1e}, H^0.75 {rough:.3}",
            dists[0]
        ),
    )
}

fn retraction() -> Outcome {
    let m = 4096;
    let amb = Ambient::Real(2);
    let mut worst: f64 = 0.0;
    for s in [0.1, 0.3, 0.7] {
        for k in 0..100u64 {
            let g = based_loop(amb, m, 2 * k);
            let t = based_loop(amb, m, 2 * k + 1);
            let before = run(g.l2_distance(&t))?;
            let after = run(run(retraction_homotopy(&g, s))?.l2_distance(&run(retraction_homotopy(&t, s))?))?;
            worst = worst.max(after / before);
        }
    }
    let g = based_loop(amb, m, 7);
    let same = run(retraction_homotopy(&g, 0.0))? == g;
    let constant = run(retraction_homotopy(&g, 1.0))?.iter().all(|v| v == g.get(0));
    check(
        worst <= 1.0 + 1e-8 && same && constant,
        format!("max Lipschitz ratio {worst:.6}, H(0)=γ {same}, H(1) constant {constant}"),
    )
}

fn truncation() -> Outcome {
    let sphere = ManifoldSpec::sphere2().translated();
    let amb = Ambient::Real(3);
    let m = 1024;
    let mut contraction = true;
    for seed in 0..50 {
        let w = based_loop(amb, m, 100 + seed);
        let g = w.map(|_, v| sphere.project(v).unwrap());
        let norm = g.l2_norm();
        for k in 0..64 {
            let t = k as f64 / 63.0;
            contraction &= run(truncation_homotopy(&g, t, &sphere))?.l2_norm() <= norm;
        }
    }

    let big = 1 << 16;
    let flat = ManifoldSpec::full_linear(Ambient::Real(1));
    let g = SampledLoop::from_real_fn(Ambient::Real(1), big, |t| vec![2.0 + (2.0 * PI * t).sin()]);
    let family = HomotopyFamily::truncation(g.clone(), flat.clone(), geometric_grid(0.3, 0.05, 10));
    let modulus = run(continuity_modulus(&family, SobolevOrder::L2))?;

    let t = 0.3;
    let cut = run(truncation_homotopy(&g, t, &flat))?;
    let ps: Vec<u32> = (2..=10).map(|k| 1 << k).collect();
    let mut logs = (Vec::new(), Vec::new());
    for &p in &ps {
        let d = run(run(delta_p(&g, t, p, &flat))?.l2_distance(&cut))?;
        logs.0.push((p as f64).ln());
        logs.1.push(d.ln());
    }
    let (rate, _, _) = fit_line(&logs.0, &logs.1);
    check(
        contraction && (0.45..=0.55).contains(&modulus.exponent) && (rate + 0.5).abs() <= 0.05,
        format!(
            "contraction {contraction}, modulus exponent {:.4}, δ_p rate {rate:.4}",
            modulus.exponent
        ),
    )
}

fn glued_lines() -> Outcome {
    let space = run(GluedLinesSpace::new(1_000_000))?;
    let zero = GluedLinesPoint::zero_bar();
    let one = GluedLinesPoint::one_bar();
    let est = run(space.pseudo_distance(&zero, &one, &OptimizerBudget::default()))?;
    let certified = run(space.certificate_length(&est.certificate))?;
    let w = d_topology_separation_witness();
    let probes: Vec<GluedLinesPoint> = (1..=1000u64)
        .flat_map(|i| (0..=10).map(move |k| GluedLinesPoint::new(i, k as f64 / (10.0 * i as f64)).unwrap()))
        .collect();
    let separated = w.in_u0(&zero) && w.in_u1(&one) && w.disjoint_on(&probes);
    check(
        est.upper_bound <= 1e-6 && (certified - est.upper_bound).abs() < 1e-15 && separated,
        format!("d(0̄,1̄) ≤ {:.1e}, neighbourhoods disjoint {separated}", est.upper_bound),
    )
}

fn volumes() -> Outcome {
    let (sphere, overlap) = run(SphereExpChart::polar(1.5 * PI).restricted_volume(256))?;
    let mobius = run(hausdorff_volume_over(&MobiusPlot::new(), &MobiusPlot::fundamental_domain(), &[64, 64]))?;
    let square = run(hausdorff_volume(&FlatChart::unit_square(), &[16, 16]))?;
    let chart = SphereExpChart::polar(3.0);
    let whole = run(hausdorff_volume(&chart, &[512, 16]))?;
    let (left, right) = run(chart.domain().split(0, 1.3))?;
    let parts = run(hausdorff_volume_over(&chart, &left, &[512, 16]))?.value
        + run(hausdorff_volume_over(&chart, &right, &[512, 16]))?.value;
    let errs = [
        (sphere.value - 4.0 * PI).abs(),
        (mobius.value - 1.0).abs(),
        (square.value - 1.0).abs(),
        (parts - whole.value).abs(),
    ];
    check(
        errs[0] < 1e-3 && errs[1] < 1e-6 && errs[2] < 1e-12 && errs[3] < 1e-9,
        format!(
            "sphere {:.6} (overlap {:.4}), Möbius {:.2e}, square {:.1e}, additivity {:.1e}",
            sphere.value, overlap.value, errs[1], errs[2], errs[3]
        ),
    )
}

fn symplectic() -> Outcome {
    let mut anti: f64 = 0.0;
    for (k, cutoff) in [4usize, 32, 256, 2048].into_iter().enumerate() {
        for seed in 0..10u64 {
            let s = 1000 * k as u64 + 2 * seed;
            let x = run(random_rough_loop(Ambient::Real(3), SobolevOrder(0.55), cutoff, s))?;
            let y = run(random_rough_loop(Ambient::Real(3), SobolevOrder(0.55), cutoff, s + 1))?;
            anti = anti.max((run(omega_flat(&x, &y))? + run(omega_flat(&y, &x))?).abs());
        }
    }
    let report = run(pairing_bound_check(1000, 1 << 12, 0))?;
    let mut mode: f64 = 0.0;
    for n in 1..=64i64 {
        let exact = 2.0 * PI * n as f64 / (1.0 + n as f64);
        mode = mode.max((run(single_mode_ratio(n))? - exact).abs());
        mode = mode.max((run(single_mode_ratio(-n))? - exact).abs());
    }
    check(
        anti < 1e-12 && report.pass() && mode < 1e-12,
        format!(
            "antisymmetry {anti:.1e}, max ratio {:.4} ≤ 2π, mode error {mode:.1e}",
            report.max_ratio
        ),
    )
}

fn multiplication() -> Outcome {
    let amb = Ambient::Matrix(2);
    let (k, s) = (SobolevOrder(0.75), SobolevOrder(0.25));
    let cutoffs: Vec<usize> = (8..=12).map(|e| 1 << e).collect();
    let mut spread: f64 = 1.0;
    for pair in 0..20u64 {
        let f = run(random_rough_loop(amb, SobolevOrder(0.8), 1 << 12, 2 * pair))?;
        let g = run(random_rough_loop(amb, SobolevOrder(0.3), 1 << 12, 2 * pair + 1))?;
        let mut ratios = Vec::new();
        for &c in &cutoffs {
            let (fc, gc) = (f.with_cutoff(c), g.with_cutoff(c));
            let prod = run(spectral_product(&fc, &gc))?;
            ratios.push(sobolev_norm(&prod, s) / (sobolev_norm(&fc, k) * sobolev_norm(&gc, s)));
        }
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        spread = spread.max(hi / lo);
    }
    check(spread < 2.0, format!("max spread across cutoffs {spread:.4}"))
}

fn endpoint() -> Outcome {
    let amb = Ambient::Real(3);
    let mut worst = f64::INFINITY;
    for s in [0.0, 0.5] {
        for k in 0..100u64 {
            let nodes: Vec<FourierLoop> = (0..2 + k % 5)
                .map(|j| random_smooth_loop(amb, 16, 1.0, 10_000 * k + j))
                .collect();
            let rep = run(endpoint_lower_bound_check(&nodes, SobolevOrder(s)))?;
            worst = worst.min(rep.length - rep.endpoint_distance);
        }
    }
    check(worst >= -1e-8, format!("min L - ‖Δ‖ {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("norm formula", 5, norms),
        ("threshold dichotomy", 10, threshold),
        ("mollified reparametrization", 10, mollifier),
        ("basepoint homotopy family", 30, basepoint_family),
        ("retraction homotopy", 20, retraction),
        ("truncation homotopy", 60, truncation),
        ("glued lines", 5, glued_lines),
        ("volumes", 30, volumes),
        ("symplectic extension", 30, symplectic),
        ("multiplication action", 30, multiplication),
        ("endpoint lower bound", 10, endpoint),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.2}s / {limit}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
