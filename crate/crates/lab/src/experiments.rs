use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use loopspace_core::diffeology::{
    d_topology_separation_witness, hausdorff_volume, hausdorff_volume_over, FlatChart, GluedLinesPoint,
    GluedLinesSpace, MobiusPlot, OptimizerBudget, Plot, PseudoDistance, SphereExpChart,
};
use loopspace_core::homotopy::{
    bridge_concatenation, continuity_modulus, delta_p, fit_line, gamma_h, gamma_h_bound, geometric_grid,
    retraction_homotopy, truncation_homotopy, HomotopyFamily,
};
use loopspace_core::spectral::{
    dft_synthesize, interval_indicator, partial_norm_sums, random_rough_loop, random_smooth_loop,
    sampled_derivative, sampled_sobolev_norm, sobolev_norm, spectral_product,
};
use loopspace_core::symplectic::{omega_cutoff_sweep, omega_flat, pairing_bound_check, single_mode_ratio};
use loopspace_core::{Ambient, FourierLoop, ManifoldSpec, ReparamPhi, SampledLoop, SobolevOrder, C64};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{LabError, Result};
use crate::plot::plot_script;
use crate::table::{format_float, Assertion, Metadata, Relation, ResultTable};

/// Rough pairs drawn per cutoff when bounding the symplectic pairing.
pub const PAIRING_TRIALS: usize = 1000;
const RETRACTION_PAIRS: u64 = 100;
const TRUNCATION_LOOPS: u64 = 50;
const PRODUCT_PAIRS: u64 = 20;
const PARSEVAL_LOOPS: u64 = 100;

struct Built {
    table: ResultTable,
    plot_x: String,
    plot_y: Vec<String>,
}

fn order_label(s: f64) -> String {
    format!("s{}", format_float(s))
}

fn seed(cfg: &ExperimentConfig, k: u64) -> u64 {
    cfg.seed.wrapping_add(k)
}

/// Moves a row-wise assertion built on rows `offset..` back to table rows.
fn shifted(mut a: Assertion, offset: usize) -> Assertion {
    for r in &mut a.failing_rows {
        *r += offset;
    }
    a
}

fn at_row(mut a: Assertion, row: usize) -> Assertion {
    if !a.pass {
        a.failing_rows = vec![row];
    }
    a
}

fn relative_changes(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// A loop through the ambient zero, from a random band-limited loop.
fn based_loop(amb: Ambient, m: usize, cutoff: usize, seed: u64) -> Result<SampledLoop> {
    let f = dft_synthesize(&random_smooth_loop(amb, cutoff, 1.0, seed), m)?;
    let start = f.get(0).to_vec();
    Ok(f.map(|_, v| v.iter().zip(&start).map(|(a, b)| a - b).collect()))
}

fn project_loop(spec: &ManifoldSpec, raw: &SampledLoop) -> Result<SampledLoop> {
    let mut samples = Vec::with_capacity(raw.raw().len());
    for v in raw.iter() {
        samples.extend(spec.project(v)?);
    }
    Ok(SampledLoop::new(raw.ambient(), samples)?)
}

fn unit_tangent(spec: &ManifoldSpec, p: &[C64], seed: u64) -> Result<Vec<C64>> {
    let raw = random_smooth_loop(spec.ambient(), 0, 1.0, seed).coeff(0).to_vec();
    let t = spec.tangent_projection(p, &raw);
    let n = spec.ambient().norm(&t);
    if n < 1e-8 {
        return Err(LabError::config("seed", "random direction is normal to the manifold"));
    }
    Ok(t.iter().map(|z| z / n).collect())
}

fn norms(cfg: &ExperimentConfig) -> Result<Built> {
    let e1 = FourierLoop::single_mode(Ambient::Complex(1), 1, 1, &[C64::new(1.0, 0.0)]);
    let mode = max_of(
        cfg.s_values
            .iter()
            .map(|&s| (sobolev_norm(&e1, SobolevOrder(s)) - 2f64.powf(s)).abs()),
    );
    let parseval = (0..PARSEVAL_LOOPS)
        .into_par_iter()
        .map(|k| {
            let f = random_smooth_loop(Ambient::Complex(2), cfg.mode_cutoff, 1.0, seed(cfg, k));
            let s = dft_synthesize(&f, cfg.resolution)?;
            Ok((s.l2_norm() - sobolev_norm(&f, SobolevOrder::L2)).abs())
        })
        .collect::<Result<Vec<f64>>>()?;

    let cutoffs = cfg.integer_grid();
    let indicator = interval_indicator(0.0, 0.5, *cutoffs.last().unwrap());
    let sums: Vec<Vec<f64>> = cfg
        .s_values
        .par_iter()
        .map(|&s| partial_norm_sums(&indicator, SobolevOrder(s), &cutoffs))
        .collect();
    let names: Vec<String> = cfg.s_values.iter().map(|&s| format!("norm_sq_{}", order_label(s))).collect();
    let mut table = ResultTable::new(std::iter::once("cutoff".to_string()).chain(names.iter().cloned()))?;
    for (i, &c) in cutoffs.iter().enumerate() {
        table.push_row(std::iter::once(c as f64).chain(sums.iter().map(|col| col[i])).collect())?;
    }

    table.assertions.push(Assertion::new(
        "mode norm",
        "the mode e^{2πit} has ‖·‖_s = 2^s",
        mode,
        Relation::AtMost,
        cfg.tolerance("mode"),
    ));
    table.assertions.push(Assertion::new(
        "parseval",
        "at s = 0 the weighted norm is the L² norm of the samples",
        max_of(parseval),
        Relation::AtMost,
        cfg.tolerance("parseval"),
    ));
    if cutoffs.len() >= 2 {
        for (&s, col) in cfg.s_values.iter().zip(&sums) {
            let changes = relative_changes(col);
            if s < 0.5 {
                table.assertions.push(shifted(
                    Assertion::per_row(
                        &format!("cauchy tail s={}", format_float(s)),
                        "the half-period indicator lies in H^s for s < 1/2, so its partial sums settle",
                        &changes,
                        Relation::Below,
                        cfg.tolerance("cauchy_tail"),
                    ),
                    1,
                ));
            } else if s > 0.5 {
                table.assertions.push(shifted(
                    Assertion::per_row(
                        &format!("growth s={}", format_float(s)),
                        "the half-period indicator is not in H^s for s > 1/2, so its partial sums keep growing",
                        &changes,
                        Relation::AtLeast,
                        cfg.tolerance("growth"),
                    ),
                    1,
                ));
            }
        }
    }
    Ok(Built {
        table,
        plot_x: "cutoff".into(),
        plot_y: names,
    })
}

fn mollifier(cfg: &ExperimentConfig) -> Result<Built> {
    let tol = cfg.tolerance("boundary");
    let reports = cfg
        .parameter_grid
        .par_iter()
        .map(|&l| Ok(ReparamPhi::new(l)?.verify_boundary_conditions(3, tol)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(["l", "slope_max", "slope_bound", "boundary_error", "mass", "monotone"])?;
    let mut errors = Vec::new();
    for r in &reports {
        let err = max_of(
            r.rows
                .iter()
                .map(|b| (b.at_zero - b.expected_zero).abs().max((b.at_l - b.expected_l).abs())),
        );
        errors.push(err);
        table.push_row(vec![r.l, r.slope_max, r.slope_bound, err, r.mass, f64::from(u8::from(r.monotone))])?;
    }
    let identity = ReparamPhi::new(1.0)?;
    let mut ident: f64 = 0.0;
    for k in 0..=cfg.resolution {
        let s = k as f64 / cfg.resolution as f64;
        ident = ident.max((identity.phi_eval(s)? - s).abs());
    }

    table.assertions.push(Assertion::per_row(
        "boundary conditions",
        "φ(l,·) has φ = 0, ∂φ = 1 and vanishing higher derivatives at s = 0, and φ = 1, ∂φ = 1 at s = l",
        &errors,
        Relation::AtMost,
        tol,
    ));
    let excess: Vec<f64> = reports.iter().map(|r| r.slope_max - 3.0 / r.l).collect();
    table.assertions.push(Assertion::per_row(
        "slope bound",
        "∂φ/∂s ≤ 3/l",
        &excess,
        Relation::AtMost,
        cfg.tolerance("slope"),
    ));
    let monotone: Vec<f64> = reports.iter().map(|r| f64::from(u8::from(r.monotone))).collect();
    table.assertions.push(Assertion::per_row(
        "monotone",
        "φ(l,·) is nondecreasing",
        &monotone,
        Relation::AtLeast,
        1.0,
    ));
    table.assertions.push(Assertion::new(
        "identity at l = 1",
        "φ(1,s) = s",
        ident,
        Relation::AtMost,
        cfg.tolerance("identity"),
    ));
    Ok(Built {
        table,
        plot_x: "l".into(),
        plot_y: vec!["slope_max".into(), "slope_bound".into()],
    })
}

/// Offset of the loop's base point from the manifold basepoint, and the
/// wobble amplitude around it.
const PC_OFFSET: f64 = 0.3;
const PC_AMPLITUDE: f64 = 0.02;

/// A small loop wobbling around a point off the basepoint, and the bridge
/// from the basepoint to its start.
fn off_basepoint_loop(cfg: &ExperimentConfig) -> Result<(SampledLoop, SampledLoop)> {
    let spec = &cfg.manifold;
    let amb = spec.ambient();
    let m = cfg.resolution;
    let bp = spec.basepoint().to_vec();
    let u = unit_tangent(spec, &bp, seed(cfg, 0))?;
    let x = spec.project(&bp.iter().zip(&u).map(|(b, d)| b + d * PC_OFFSET).collect::<Vec<_>>())?;
    let w = unit_tangent(spec, &x, seed(cfg, 1))?;
    let mut samples = Vec::with_capacity(m * amb.dim());
    for j in 0..m {
        let a = PC_AMPLITUDE * (2.0 * PI * j as f64 / m as f64).sin();
        let raw: Vec<C64> = x.iter().zip(&w).map(|(p, d)| p + d * a).collect();
        samples.extend(spec.project(&raw)?);
    }
    let g = SampledLoop::new(amb, samples)?;
    let v = sampled_derivative(&g).get(0).to_vec();
    let tau = spec.bridge_loop(&x, &v, m)?;
    Ok((g, tau))
}

fn homotopy_pc(cfg: &ExperimentConfig) -> Result<Built> {
    let (g, tau) = off_basepoint_loop(cfg)?;
    let rows = cfg
        .parameter_grid
        .par_iter()
        .map(|&h| {
            let gh = gamma_h(&g, &tau, h)?;
            let diff = gh.sub(&g)?;
            let mut row = vec![h, diff.l2_norm(), gamma_h_bound(&g, &tau, h)?];
            row.extend(cfg.s_values.iter().map(|&s| sampled_sobolev_norm(&diff, SobolevOrder(s))));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let rough: Vec<String> = cfg.s_values.iter().map(|&s| format!("distance_{}", order_label(s))).collect();
    let mut table = ResultTable::new(["h", "l2_distance", "bound"].into_iter().map(String::from).chain(rough.iter().cloned()))?;
    for row in rows {
        table.push_row(row)?;
    }
    let d = table.column("l2_distance")?;
    let b = table.column("bound")?;
    let last = d.len() - 1;

    if d.len() >= 2 {
        let ratios: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
        table.assertions.push(shifted(
            Assertion::per_row(
                "distance decreases",
                "‖γ_h − γ‖_{L²} decreases as h shrinks",
                &ratios,
                Relation::Below,
                1.0,
            ),
            1,
        ));
    }
    let ratio: Vec<f64> = d.iter().zip(&b).map(|(x, y)| x / y).collect();
    table.assertions.push(Assertion::per_row(
        "three-term bound",
        "‖γ_h − γ‖_{L²} is at most the three-term estimate built from sup-norms of γ, τ and their derivatives",
        &ratio,
        Relation::AtMost,
        1.0,
    ));
    table.assertions.push(at_row(
        Assertion::new(
            "final distance",
            "γ_h → γ in L² as h → 0",
            d[last],
            Relation::Below,
            cfg.tolerance("final_distance"),
        ),
        last,
    ));
    let near_one = gamma_h(&g, &tau, 1.0 - 0.5f64.powi(10))?;
    let limit = near_one.l2_distance(&bridge_concatenation(&tau, cfg.resolution)?)?;
    table.assertions.push(Assertion::new(
        "limit at h = 1",
        "γ_h tends to τ followed by its reverse as h → 1",
        limit,
        Relation::Below,
        cfg.tolerance("limit"),
    ));
    for (&s, name) in cfg.s_values.iter().zip(&rough) {
        if s > 0.5 {
            table.assertions.push(at_row(
                Assertion::new(
                    &format!("rough distance s={}", format_float(s)),
                    "γ_h does not converge to γ in H^s for s > 1/2",
                    table.column(name)?[last],
                    Relation::Above,
                    cfg.tolerance("rough_floor"),
                ),
                last,
            ));
        }
    }
    Ok(Built {
        table,
        plot_x: "h".into(),
        plot_y: vec!["l2_distance".into(), "bound".into()],
    })
}

fn homotopy_retraction(cfg: &ExperimentConfig) -> Result<Built> {
    let amb = cfg.manifold.ambient();
    let loops = (0..2 * RETRACTION_PAIRS)
        .into_par_iter()
        .map(|k| based_loop(amb, cfg.resolution, cfg.mode_cutoff, seed(cfg, k)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(["s_prime", "max_ratio", "mean_ratio"])?;
    for &sp in &cfg.parameter_grid {
        let ratios = loops
            .par_chunks(2)
            .map(|pair| {
                let before = pair[0].l2_distance(&pair[1])?;
                let after = retraction_homotopy(&pair[0], sp)?.l2_distance(&retraction_homotopy(&pair[1], sp)?)?;
                Ok(if before == 0.0 { 0.0 } else { after / before })
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        table.push_row(vec![sp, max_of(ratios), mean])?;
    }
    let mut start: f64 = 0.0;
    let mut end: f64 = 0.0;
    for g in &loops {
        start = start.max(retraction_homotopy(g, 0.0)?.l2_distance(g)?);
        let h1 = retraction_homotopy(g, 1.0)?;
        let first = h1.get(0).to_vec();
        end = end.max(max_of(h1.iter().map(|v| amb.norm(&v.iter().zip(&first).map(|(a, b)| a - b).collect::<Vec<_>>()))));
    }
    table.assertions.push(Assertion::per_row(
        "1-Lipschitz",
        "each H(s',·) is 1-Lipschitz in L²",
        &table.column("max_ratio")?,
        Relation::AtMost,
        1.0 + cfg.tolerance("lipschitz"),
    ));
    table.assertions.push(Assertion::new(
        "starts at the identity",
        "H(0,γ) = γ",
        start,
        Relation::AtMost,
        0.0,
    ));
    table.assertions.push(Assertion::new(
        "ends at a constant",
        "H(1,γ) is a constant loop",
        end,
        Relation::AtMost,
        0.0,
    ));
    Ok(Built {
        table,
        plot_x: "s_prime".into(),
        plot_y: vec!["max_ratio".into(), "mean_ratio".into()],
    })
}

/// Parameter where the truncation modulus and the δ_p rate are measured.
const TRUNCATION_ANCHOR: f64 = 0.3;

fn homotopy_truncation(cfg: &ExperimentConfig) -> Result<Built> {
    let spec = &cfg.manifold;
    let loops = (0..TRUNCATION_LOOPS)
        .into_par_iter()
        .map(|k| project_loop(spec, &based_loop(spec.ambient(), cfg.resolution, cfg.mode_cutoff, seed(cfg, k))?))
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = loops.iter().map(SampledLoop::l2_norm).collect();
    let mut table = ResultTable::new(["t", "max_norm_ratio", "mean_norm_ratio"])?;
    for &t in &cfg.parameter_grid {
        let ratios = loops
            .par_iter()
            .zip(&norms)
            .map(|(g, n)| Ok(truncation_homotopy(g, t, spec)?.l2_norm() / n))
            .collect::<Result<Vec<f64>>>()?;
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        table.push_row(vec![t, max_of(ratios), mean])?;
    }

    let g = &loops[0];
    let family = HomotopyFamily::truncation(g.clone(), spec.clone(), geometric_grid(TRUNCATION_ANCHOR, 0.05, 10));
    let modulus = continuity_modulus(&family, SobolevOrder::L2)?;
    let cut = truncation_homotopy(g, TRUNCATION_ANCHOR, spec)?;
    let (mut lp, mut ld) = (Vec::new(), Vec::new());
    for k in 2..=10 {
        let p = 1u32 << k;
        lp.push(f64::from(p).ln());
        ld.push(delta_p(g, TRUNCATION_ANCHOR, p, spec)?.l2_distance(&cut)?.ln());
    }
    let (rate, _, _) = fit_line(&lp, &ld);

    table.assertions.push(Assertion::per_row(
        "norm contraction",
        "‖H(t,γ)‖_{L²} ≤ ‖γ‖_{L²} for every t",
        &table.column("max_norm_ratio")?,
        Relation::AtMost,
        1.0,
    ));
    table.assertions.push(Assertion::new(
        "t-modulus exponent",
        "t ↦ H(t,γ) is 1/2-Hölder in L², and no better; the entry is |fitted exponent − 1/2|",
        (modulus.exponent - 0.5).abs(),
        Relation::AtMost,
        cfg.tolerance("exponent"),
    ));
    table.assertions.push(Assertion::new(
        "δ_p rate",
        "the smooth approximants δ_p reach H(t,γ) at rate p^{-1/2}; the entry is |fitted rate + 1/2|",
        (rate + 0.5).abs(),
        Relation::AtMost,
        cfg.tolerance("rate"),
    ));
    Ok(Built {
        table,
        plot_x: "t".into(),
        plot_y: vec!["max_norm_ratio".into(), "mean_norm_ratio".into()],
    })
}

fn distance_glued(cfg: &ExperimentConfig) -> Result<Built> {
    let zero = GluedLinesPoint::zero_bar();
    let one = GluedLinesPoint::one_bar();
    let mut table = ResultTable::new(["i_max", "upper_bound", "exact", "certificate_length"])?;
    let mut gaps = Vec::new();
    for &i in &cfg.parameter_grid {
        let space = GluedLinesSpace::new(i as u64)?;
        let est = space.pseudo_distance(&zero, &one, &OptimizerBudget::default())?;
        let cert = space.certificate_length(&est.certificate)?;
        gaps.push((cert - est.upper_bound).abs());
        table.push_row(vec![i, est.upper_bound, 1.0 / i, cert])?;
    }
    let (top, _) = cfg
        .parameter_grid
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (k, &i)| if i > best.1 { (k, i) } else { best });
    let w = d_topology_separation_witness();
    let probes: Vec<GluedLinesPoint> = (1..=1000u64)
        .flat_map(|i| (0..=10).map(move |k| GluedLinesPoint::new(i, k as f64 / (10.0 * i as f64))))
        .collect::<loopspace_core::Result<_>>()?;
    let separated = w.in_u0(&zero) && w.in_u1(&one) && w.disjoint_on(&probes);

    table.assertions.push(Assertion::per_row(
        "certificate",
        "the returned path has exactly the reported length",
        &gaps,
        Relation::AtMost,
        cfg.tolerance("certificate"),
    ));
    table.assertions.push(at_row(
        Assertion::new(
            "distance vanishes",
            "d(0̄, 1̄) ≤ 1/i for every i, so the pseudo-distance is 0",
            table.rows()[top][1],
            Relation::AtMost,
            cfg.tolerance("distance"),
        ),
        top,
    ));
    table.assertions.push(Assertion::new(
        "D-topology separates",
        "0̄ and 1̄ have disjoint open neighbourhoods in the D-topology",
        f64::from(u8::from(separated)),
        Relation::AtLeast,
        1.0,
    ));
    Ok(Built {
        table,
        plot_x: "i_max".into(),
        plot_y: vec!["upper_bound".into(), "exact".into()],
    })
}

/// Where the additivity check cuts the polar chart.
const VOLUME_SPLIT: f64 = 1.3;

fn volumes(cfg: &ExperimentConfig) -> Result<Built> {
    let rows = cfg
        .integer_grid()
        .into_par_iter()
        .map(|res| {
            let (sphere, overlap) = SphereExpChart::polar(1.5 * PI).restricted_volume(res)?;
            let mobius = hausdorff_volume_over(&MobiusPlot::new(), &MobiusPlot::fundamental_domain(), &[res, res])?;
            let square = hausdorff_volume(&FlatChart::unit_square(), &[res, res])?;
            let chart = SphereExpChart::polar(3.0);
            let whole = hausdorff_volume(&chart, &[res, 16])?;
            let (left, right) = chart.domain().split(0, VOLUME_SPLIT)?;
            let parts = hausdorff_volume_over(&chart, &left, &[res, 16])?.value
                + hausdorff_volume_over(&chart, &right, &[res, 16])?.value;
            Ok(vec![
                res as f64,
                sphere.value,
                (sphere.value - 4.0 * PI).abs(),
                overlap.value,
                mobius.value,
                (mobius.value - 1.0).abs(),
                square.value,
                (square.value - 1.0).abs(),
                (parts - whole.value).abs(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new([
        "resolution",
        "sphere_area",
        "sphere_error",
        "overlap_area",
        "mobius_area",
        "mobius_error",
        "square_area",
        "square_error",
        "additivity_defect",
    ])?;
    for row in rows {
        table.push_row(row)?;
    }
    let finest = (0..table.rows().len())
        .max_by(|&a, &b| table.rows()[a][0].total_cmp(&table.rows()[b][0]))
        .unwrap();
    let row = table.rows()[finest].clone();
    let checks = [
        ("sphere area", "the radius-restricted exponential chart gives the sphere area 4π", row[2], "sphere"),
        ("Möbius area", "the fundamental domain of the Möbius plot has area 1", row[5], "mobius"),
        ("flat square", "the unit square has area 1", row[7], "square"),
        ("additivity", "volumes add over a partition of the plot domain", row[8], "additivity"),
    ];
    for (name, anchor, measured, tol) in checks {
        table.assertions.push(at_row(
            Assertion::new(name, anchor, measured, Relation::AtMost, cfg.tolerance(tol)),
            finest,
        ));
    }
    Ok(Built {
        table,
        plot_x: "resolution".into(),
        plot_y: vec!["sphere_error".into(), "mobius_error".into(), "additivity_defect".into()],
    })
}

fn symplectic(cfg: &ExperimentConfig) -> Result<Built> {
    let cutoffs = cfg.integer_grid();
    let top = *cutoffs.last().unwrap();
    let rows = cutoffs
        .par_iter()
        .enumerate()
        .map(|(k, &c)| {
            let mut anti: f64 = 0.0;
            for p in 0..10u64 {
                let s = seed(cfg, 1000 * k as u64 + 2 * p);
                let x = random_rough_loop(Ambient::Real(3), SobolevOrder(0.55), c, s)?;
                let y = random_rough_loop(Ambient::Real(3), SobolevOrder(0.55), c, s.wrapping_add(1))?;
                anti = anti.max((omega_flat(&x, &y)? + omega_flat(&y, &x)?).abs());
            }
            let report = pairing_bound_check(PAIRING_TRIALS, c, seed(cfg, 1_000_000 * k as u64))?;
            Ok((anti, report.max_ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let sweeps = cfg
        .s_values
        .par_iter()
        .enumerate()
        .map(|(k, &s)| {
            let base = seed(cfg, 7_000_000 + 2 * k as u64);
            let x = random_rough_loop(Ambient::Real(3), SobolevOrder(s), top, base)?;
            let y = random_rough_loop(Ambient::Real(3), SobolevOrder(s), top, base.wrapping_add(1))?;
            Ok(omega_cutoff_sweep(&x, &y, &cutoffs)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let omegas: Vec<String> = cfg.s_values.iter().map(|&s| format!("omega_{}", order_label(s))).collect();
    let mut table = ResultTable::new(
        ["cutoff", "antisymmetry", "max_pairing_ratio"]
            .into_iter()
            .map(String::from)
            .chain(omegas.iter().cloned()),
    )?;
    for (i, (&c, &(anti, ratio))) in cutoffs.iter().zip(&rows).enumerate() {
        table.push_row([c as f64, anti, ratio].into_iter().chain(sweeps.iter().map(|s| s[i])).collect())?;
    }
    let mut mode: f64 = 0.0;
    for n in 1..=cfg.mode_cutoff.max(1) as i64 {
        let exact = 2.0 * PI * n as f64 / (1.0 + n as f64);
        mode = mode.max((single_mode_ratio(n)? - exact).abs());
        mode = mode.max((single_mode_ratio(-n)? - exact).abs());
    }

    table.assertions.push(Assertion::per_row(
        "antisymmetry",
        "ω(X,Y) = −ω(Y,X)",
        &table.column("antisymmetry")?,
        Relation::AtMost,
        cfg.tolerance("antisymmetry"),
    ));
    table.assertions.push(Assertion::per_row(
        "pairing bound",
        "|ω(X,Y)| ≤ 2π ‖X‖_{1/2} ‖Y‖_{1/2}, so ω extends to H^{1/2}",
        &table.column("max_pairing_ratio")?,
        Relation::AtMost,
        2.0 * PI,
    ));
    table.assertions.push(Assertion::new(
        "single-mode ratio",
        "on e_n and i·e_n the ratio is 2π|n|/(1+|n|)",
        mode,
        Relation::AtMost,
        cfg.tolerance("mode"),
    ));
    Ok(Built {
        table,
        plot_x: "cutoff".into(),
        plot_y: omegas,
    })
}

fn multiplication(cfg: &ExperimentConfig) -> Result<Built> {
    let amb = cfg.manifold.ambient();
    let (k, s) = (SobolevOrder(cfg.s_values[0]), SobolevOrder(cfg.s_values[1]));
    let cutoffs = cfg.integer_grid();
    let top = *cutoffs.last().unwrap();
    let cols = (0..PRODUCT_PAIRS)
        .into_par_iter()
        .map(|p| {
            let f = random_rough_loop(amb, SobolevOrder(k.0 + 0.05), top, seed(cfg, 2 * p))?;
            let g = random_rough_loop(amb, SobolevOrder(s.0 + 0.05), top, seed(cfg, 2 * p + 1))?;
            cutoffs
                .iter()
                .map(|&c| {
                    let (fc, gc) = (f.with_cutoff(c), g.with_cutoff(c));
                    let prod = spectral_product(&fc, &gc)?;
                    Ok(sobolev_norm(&prod, s) / (sobolev_norm(&fc, k) * sobolev_norm(&gc, s)))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = (0..PRODUCT_PAIRS).map(|p| format!("ratio_pair_{p}")).collect();
    let mut table = ResultTable::new(std::iter::once("cutoff".to_string()).chain(names.iter().cloned()))?;
    for (i, &c) in cutoffs.iter().enumerate() {
        table.push_row(std::iter::once(c as f64).chain(cols.iter().map(|col| col[i])).collect())?;
    }
    let spread = max_of(cols.iter().map(|col| {
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo
    }));
    table.assertions.push(Assertion::new(
        "cutoff-stable ratio",
        "‖fg‖_s ≤ C ‖f‖_k ‖g‖_s for k > 1/2, so the ratio stays bounded as the cutoff grows; the entry is max/min over cutoffs",
        spread,
        Relation::Below,
        cfg.tolerance("spread"),
    ));
    Ok(Built {
        table,
        plot_x: "cutoff".into(),
        plot_y: names,
    })
}

/// Runs the experiment; deterministic in `(config, seed)` apart from the
/// wall time in the metadata.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let start = Instant::now();
    let built = match cfg.experiment {
        Experiment::Norms => norms(cfg),
        Experiment::Mollifier => mollifier(cfg),
        Experiment::HomotopyPc => homotopy_pc(cfg),
        Experiment::HomotopyRetraction => homotopy_retraction(cfg),
        Experiment::HomotopyTruncation => homotopy_truncation(cfg),
        Experiment::DistanceGlued => distance_glued(cfg),
        Experiment::Volumes => volumes(cfg),
        Experiment::Symplectic => symplectic(cfg),
        Experiment::Multiplication => multiplication(cfg),
    }?;
    let mut table = built.table;
    table.metadata = Some(Metadata {
        experiment: cfg.experiment.name().to_string(),
        config: cfg.to_json(),
        config_sha256: cfg.sha256(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        plot_x: built.plot_x,
        plot_y: built.plot_y,
    });
    Ok(table)
}

/// Where [`write_outputs`] put things.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub csv: PathBuf,
    pub report: PathBuf,
    pub plot: PathBuf,
}

/// Writes `results.csv`, `report.json` and `plot.gp` into `dir`.
pub fn write_outputs(table: &ResultTable, dir: &Path) -> Result<OutputFiles> {
    let meta = table
        .metadata
        .as_ref()
        .ok_or_else(|| LabError::Usage("table has no run metadata".into()))?;
    let script = plot_script(table, "results.csv", &meta.plot_x, &meta.plot_y)?;
    let report = serde_json::to_string_pretty(&table.report_json()).expect("report serializes");
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let files = OutputFiles {
        csv: dir.join("results.csv"),
        report: dir.join("report.json"),
        plot: dir.join("plot.gp"),
    };
    for (path, text) in [(&files.csv, table.to_csv()), (&files.report, report + "\n"), (&files.plot, script)] {
        std::fs::write(path, text).map_err(|e| LabError::io(path, e))?;
    }
    Ok(files)
}

/// Built-in configurations. The quick ones keep `check-all --quick` to a
/// few seconds; the full ones are the reference settings.
pub fn preset(experiment: Experiment, quick: bool) -> ExperimentConfig {
    let pick = |q: f64, full: f64| if quick { q } else { full };
    let pow2 = |lo: i32, hi: i32| (lo..=hi).map(|k| 2f64.powi(k)).collect::<Vec<f64>>();
    let (resolution, mode_cutoff, s_values, parameter_grid, manifold) = match experiment {
        Experiment::Norms => (64, 16, vec![-0.5, 0.0, 0.25, 0.5, 0.75, 1.0], pow2(10, 14), ManifoldSpec::full_linear(Ambient::Complex(1))),
        Experiment::Mollifier => (1000, 0, vec![0.0], vec![0.1, 0.25, 0.5, 1.0], ManifoldSpec::full_linear(Ambient::Real(1))),
        Experiment::HomotopyPc => (
            pick(4096.0, 16384.0) as usize,
            0,
            vec![0.75],
            pow2(-8, -1).into_iter().rev().collect(),
            ManifoldSpec::circle(),
        ),
        Experiment::HomotopyRetraction => (
            pick(1024.0, 4096.0) as usize,
            8,
            vec![0.0],
            vec![0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0],
            ManifoldSpec::full_linear(Ambient::Real(2)),
        ),
        Experiment::HomotopyTruncation => (
            16384,
            8,
            vec![0.0],
            (0..64).map(|k| k as f64 / 63.0).collect(),
            ManifoldSpec::sphere2().translated(),
        ),
        Experiment::DistanceGlued => (16, 0, vec![0.0], vec![1.0, 10.0, 1e3, 1e6], ManifoldSpec::full_linear(Ambient::Real(1))),
        Experiment::Volumes => (16, 0, vec![0.0], pow2(6, 9), ManifoldSpec::full_linear(Ambient::Real(2))),
        Experiment::Symplectic => (
            256,
            64,
            vec![0.25, 0.75],
            if quick { pow2(2, 10) } else { pow2(2, 12) },
            ManifoldSpec::full_linear(Ambient::Real(3)),
        ),
        Experiment::Multiplication => (
            16,
            0,
            vec![0.75, 0.25],
            if quick { pow2(8, 10) } else { pow2(8, 12) },
            ManifoldSpec::su2(),
        ),
    };
    ExperimentConfig {
        experiment,
        resolution,
        mode_cutoff,
        s_values,
        parameter_grid,
        manifold,
        seed: 0,
        output_dir: PathBuf::from("lab-output").join(experiment.name()),
        tolerances: Default::default(),
    }
}
