use std::f64::consts::PI;

use loopspace_core::spectral::{dft_synthesize, loop_derivative, random_rough_loop, random_smooth_loop};
use loopspace_core::symplectic::*;
use loopspace_core::{Ambient, Error, FourierLoop, ManifoldSpec, SampledLoop, SobolevOrder, C64};
use proptest::prelude::*;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Keeps the modes `n ≥ 0`, so `ω(X, iX) = Σ 2πn |X_n|²` has no cancellation.
fn analytic_part(x: &FourierLoop) -> FourierLoop {
    x.map_modes(|n, c| if n < 0 { C64::new(0.0, 0.0) } else { c })
}

fn relative_changes(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| ((w[1] - w[0]) / w[0]).abs()).collect()
}

#[test]
fn d_theta_is_twice_omega() {
    // θ_γ(Y) is linear in γ, so the difference quotient is exact up to rounding
    let amb = Ambient::Complex(2);
    let eps = 1e-3;
    for seed in 0..20u64 {
        let g = random_smooth_loop(amb, 12, 1.0, 3 * seed);
        let x = random_smooth_loop(amb, 12, 1.0, 3 * seed + 1);
        let y = random_smooth_loop(amb, 12, 1.0, 3 * seed + 2);
        let along = |v: &FourierLoop, w: &FourierLoop| {
            (theta(&g.axpy(real(eps), v), w).unwrap() - theta(&g, w).unwrap()) / eps
        };
        let d_theta = along(&x, &y) - along(&y, &x);
        let omega = omega_flat(&x, &y).unwrap();
        assert!((d_theta - 2.0 * omega).abs() < 1e-6 * omega.abs().max(1.0), "{d_theta} vs {omega}");
    }
}

#[test]
fn theta_reports_both_weighted_norms() {
    let g = random_rough_loop(Ambient::Real(2), SobolevOrder(0.55), 256, 1).unwrap();
    let x = random_rough_loop(Ambient::Real(2), SobolevOrder(0.55), 256, 2).unwrap();
    let p = theta_pairing(&g, &x).unwrap();
    assert_eq!(p.value.re, theta(&g, &x).unwrap());
    assert!(p.u_norm > 0.0 && p.v_norm > 0.0);
    assert!(p.value.norm() <= p.u_norm * p.v_norm * (1.0 + 1e-12));
    let a = random_smooth_loop(Ambient::Real(2), 256, 1.0, 3);
    let lin = theta(&g, &x.scale(real(2.0)).axpy(real(-3.0), &a)).unwrap();
    assert!((lin - (2.0 * theta(&g, &x).unwrap() - 3.0 * theta(&g, &a).unwrap())).abs() < 1e-12 * lin.abs().max(1.0));
}

#[test]
fn omega_scales_bilinearly() {
    let x = random_smooth_loop(Ambient::Real(3), 16, 1.0, 8);
    let y = random_smooth_loop(Ambient::Real(3), 16, 1.0, 9);
    let w = omega_flat(&x, &y).unwrap();
    assert!((omega_flat(&x.scale(real(3.0)), &y).unwrap() - 3.0 * w).abs() < 1e-12 * w.abs().max(1.0));
    assert!(omega_flat(&x, &FourierLoop::zero(Ambient::Real(3), 8)).is_err());
}

fn great_circle(m: usize) -> SampledLoop {
    SampledLoop::from_real_fn(Ambient::Real(3), m, |t| vec![(2.0 * PI * t).cos(), (2.0 * PI * t).sin(), 0.0])
}

#[test]
fn great_circle_is_a_geodesic() {
    let sphere = ManifoldSpec::sphere2();
    let m = 512;
    let g = great_circle(m);
    let v = loopspace_core::spectral::sampled_derivative(&g);
    let e3 = SampledLoop::constant(Ambient::Real(3), m, &[real(0.0), real(0.0), real(1.0)]);
    let x = TangentField::new(&sphere, g.clone(), v).unwrap();
    let y = TangentField::new(&sphere, g, e3).unwrap();
    assert!(omega_manifold(&sphere, &x, &y).unwrap().abs() < 1e-4);
    assert!(x.tangency_defect() < 1e-9);
}

#[test]
fn sphere_form_is_antisymmetric_on_tangent_pairs() {
    let sphere = ManifoldSpec::sphere2();
    let m = 512;
    let g = great_circle(m);
    // tangent fields a(s) e3 + b(s) γ̇/2π
    let field = |a: fn(f64) -> f64, b: fn(f64) -> f64| {
        SampledLoop::from_real_fn(Ambient::Real(3), m, |t| {
            let (c, s) = ((2.0 * PI * t).cos(), (2.0 * PI * t).sin());
            vec![-s * b(t), c * b(t), a(t)]
        })
    };
    let x = TangentField::new(&sphere, g.clone(), field(|t| (2.0 * PI * t).sin(), |t| 0.5 + (4.0 * PI * t).cos())).unwrap();
    let y = TangentField::new(&sphere, g, field(|t| (2.0 * PI * t).cos(), |t| (4.0 * PI * t).sin())).unwrap();
    let (xy, yx) = (omega_manifold(&sphere, &x, &y).unwrap(), omega_manifold(&sphere, &y, &x).unwrap());
    assert!((xy + yx).abs() < 1e-6, "{xy} {yx}");
    // ∫ a_x' a_y + b_x' b_y = π - 2π
    assert!((xy + PI).abs() < 1e-6, "{xy}");
    assert!(omega_manifold(&sphere, &x, &x).unwrap().abs() < 1e-6);
}

#[test]
fn flat_manifold_form_matches_the_spectral_form() {
    let amb = Ambient::Real(2);
    let flat = ManifoldSpec::full_linear(amb);
    let m = 128;
    let (xf, yf) = (random_smooth_loop(amb, 20, 1.0, 1), random_smooth_loop(amb, 20, 1.0, 2));
    let g = dft_synthesize(&random_smooth_loop(amb, 4, 1.0, 3), m).unwrap();
    let x = TangentField::new(&flat, g.clone(), dft_synthesize(&xf, m).unwrap()).unwrap();
    let y = TangentField::new(&flat, g, dft_synthesize(&yf, m).unwrap()).unwrap();
    let sampled = omega_manifold(&flat, &x, &y).unwrap();
    assert!((sampled - omega_flat(&xf, &yf).unwrap()).abs() < 1e-8);
}

#[test]
fn normal_fields_are_rejected() {
    let sphere = ManifoldSpec::sphere2();
    let g = great_circle(64);
    assert!(matches!(TangentField::new(&sphere, g.clone(), g), Err(Error::NotTangent { .. })));
}

#[test]
fn fields_along_different_loops_do_not_pair() {
    let flat = ManifoldSpec::full_linear(Ambient::Real(3));
    let g = great_circle(64);
    let h = g.map(|_, v| v.iter().map(|z| z * 2.0).collect());
    let x = TangentField::new(&flat, g.clone(), g.clone()).unwrap();
    let y = TangentField::new(&flat, h.clone(), h).unwrap();
    assert!(matches!(omega_manifold(&flat, &x, &y), Err(Error::Precondition(_))));
}

#[test]
fn pairing_bound_over_many_rough_trials() {
    let report = pairing_bound_check(1000, 1 << 12, 7).unwrap();
    assert!(report.pass());
    assert!(report.max_ratio <= 2.0 * PI);
    let (a, b) = report.argmax_seeds;
    assert_eq!(b, a + 1);
    let json = report.to_json();
    for key in ["trials", "cutoff", "max_ratio", "bound", "argmax_seeds"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn mode_ratio_approaches_two_pi() {
    let ratios: Vec<f64> = (1..=1 << 10).map(|n| single_mode_ratio(n).unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
    assert!(ratios.iter().all(|&r| r < 2.0 * PI));
    assert!(2.0 * PI - ratios.last().unwrap() < 0.01);
}

#[test]
fn form_is_cutoff_stable_above_one_half() {
    let cutoffs: Vec<usize> = (10..=13).map(|k| 1 << k).collect();
    for seed in 0..10u64 {
        let x = random_rough_loop(Ambient::Real(3), SobolevOrder(0.75), 1 << 13, 2 * seed).unwrap();
        let y = random_rough_loop(Ambient::Real(3), SobolevOrder(0.75), 1 << 13, 2 * seed + 1).unwrap();
        let changes = relative_changes(&omega_cutoff_sweep(&x, &y, &cutoffs).unwrap());
        assert!(changes.iter().all(|&c| c < 0.01), "seed {seed}: {changes:?}");
    }
}

#[test]
fn form_is_cutoff_unstable_below_one_half() {
    let cutoffs: Vec<usize> = (8..=13).map(|k| 1 << k).collect();
    let x = analytic_part(&random_rough_loop(Ambient::Complex(1), SobolevOrder(0.4), 1 << 13, 5).unwrap());
    let y = x.scale(C64::new(0.0, 1.0));
    let values = omega_cutoff_sweep(&x, &y, &cutoffs).unwrap();
    let changes = relative_changes(&values);
    assert!(changes.iter().all(|&c| c > 0.15), "{changes:?}");
    // while each truncation still satisfies the bound
    assert!(pairing_ratio(&x, &y).unwrap() <= 2.0 * PI);
}

#[test]
fn group_form_on_smooth_u1_loops() {
    // u(1) = iℝ: ξ = i sin 2πs, η = i cos 2πs gives ∫ 2π cos² = π
    let u1 = ManifoldSpec::unitary_u1();
    let m = 128;
    let xi = SampledLoop::from_fn(Ambient::Matrix(1), m, |t| vec![C64::new(0.0, (2.0 * PI * t).sin())]);
    let eta = SampledLoop::from_fn(Ambient::Matrix(1), m, |t| vec![C64::new(0.0, (2.0 * PI * t).cos())]);
    assert!((omega_group(&u1, &xi, &eta).unwrap() - PI).abs() < 1e-12);
    assert!((omega_group(&u1, &eta, &xi).unwrap() + PI).abs() < 1e-12);
}

proptest! {
    #[test]
    fn omega_flat_is_exactly_antisymmetric(seed: u64, cutoff in 1usize..200, order in 0.3f64..1.5) {
        let x = random_rough_loop(Ambient::Complex(2), SobolevOrder(order), cutoff, seed).unwrap();
        let y = random_rough_loop(Ambient::Complex(2), SobolevOrder(order), cutoff, seed ^ 0x5555).unwrap();
        prop_assert!((omega_flat(&x, &y).unwrap() + omega_flat(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(omega_flat(&x, &x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pairing_ratio_never_exceeds_two_pi(seed: u64, cutoff in 1usize..300, a in -0.5f64..1.5, b in -0.5f64..1.5) {
        let x = random_rough_loop(Ambient::Real(2), SobolevOrder(a), cutoff, seed).unwrap();
        let y = random_rough_loop(Ambient::Real(2), SobolevOrder(b), cutoff, seed.wrapping_add(1)).unwrap();
        prop_assert!(pairing_ratio(&x, &y).unwrap() <= 2.0 * PI);
    }

    #[test]
    fn theta_of_a_constant_vanishes(seed: u64, c0 in -3.0f64..3.0) {
        let g = random_smooth_loop(Ambient::Real(2), 8, 1.0, seed);
        let x = FourierLoop::single_mode(Ambient::Real(2), 8, 0, &[real(c0), real(-c0)]);
        prop_assert!(theta(&g, &x).unwrap().abs() < 1e-15);
        prop_assert!(loop_derivative(&x).coeff(0).iter().all(|z| z.norm() == 0.0));
    }
}
