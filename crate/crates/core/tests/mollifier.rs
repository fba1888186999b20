use loopspace_core::mollifier::{mollifier_cdf, mollifier_eval};
use loopspace_core::{Error, Mollifier, ReparamPhi};
use proptest::prelude::*;

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (l + r - whole).abs() < 15.0 * tol {
            return l + r + (l + r - whole) / 15.0;
        }
        go(f, a, m, l, tol / 2.0, depth - 1) + go(f, m, b, r, tol / 2.0, depth - 1)
    }
    go(f, a, b, simpson(f, a, b), tol, 50)
}

fn raw(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

#[test]
fn bump_mass_matches_adaptive_simpson() {
    let oracle = adaptive_simpson(&raw, -1.0, 1.0, 1e-15);
    assert!((Mollifier::raw_mass() - oracle).abs() < 1e-13);
    assert!((Mollifier::raw_mass() - 0.443_993_816_168_079_4).abs() < 1e-13);
}

#[test]
fn cdf_matches_adaptive_simpson() {
    let mass = Mollifier::raw_mass();
    for k in 0..=40 {
        let x = -1.0 + k as f64 * 0.05;
        let oracle = adaptive_simpson(&raw, -1.0, x, 1e-15) / mass;
        assert!((mollifier_cdf(x) - oracle).abs() < 1e-10, "x = {x}");
    }
    assert_eq!(mollifier_cdf(-3.0), 0.0);
    assert_eq!(mollifier_cdf(3.0), 1.0);
    assert!((mollifier_cdf(0.0) - 0.5).abs() < 1e-13);
}

#[test]
fn scaled_mollifier_has_unit_mass_and_support() {
    let m = Mollifier::with_width(0.25).unwrap();
    let mass = adaptive_simpson(&|t| m.eval(t), -0.25, 0.25, 1e-13);
    assert!((mass - 1.0).abs() < 1e-10);
    assert_eq!(m.eval(0.26), 0.0);
    assert!((m.eval(0.0) - 4.0 * mollifier_eval(0.0)).abs() < 1e-14);
    assert!(Mollifier::with_width(0.0).is_err());
    assert!(Mollifier::with_width(f64::NAN).is_err());
}

#[test]
fn phi_integrates_its_density() {
    for l in [0.1, 0.4, 0.75] {
        let phi = ReparamPhi::new(l).unwrap();
        for k in 1..=20 {
            let s = l * k as f64 / 20.0;
            let oracle = adaptive_simpson(&|u| phi.phi_partial_s(u).unwrap(), 0.0, s, 1e-13);
            assert!((phi.phi_eval(s).unwrap() - oracle).abs() < 1e-8, "l = {l}, s = {s}");
        }
    }
}

#[test]
fn boundary_conditions_hold_for_the_reference_lengths() {
    for l in [0.1, 0.25, 0.5, 1.0] {
        let report = ReparamPhi::new(l).unwrap().verify_boundary_conditions(3, 1e-4);
        assert!(report.all_pass(), "l = {l}: {}", report.to_json());
        assert!(report.slope_max <= 3.0 / l + 1e-6);
        assert_eq!(report.rows.len(), 4);
    }
}

#[test]
fn identity_at_full_length() {
    let phi = ReparamPhi::new(1.0).unwrap();
    assert!(phi.displacement() < 1e-12);
    for k in 0..=100 {
        let s = k as f64 / 100.0;
        assert!((phi.phi_eval(s).unwrap() - s).abs() < 1e-10);
    }
}

#[test]
fn invalid_lengths_and_arguments() {
    assert!(matches!(ReparamPhi::new(0.0), Err(Error::Domain { .. })));
    assert!(matches!(ReparamPhi::new(1.5), Err(Error::Domain { .. })));
    assert!(ReparamPhi::new(f64::NAN).is_err());
    let phi = ReparamPhi::new(0.5).unwrap();
    assert!(matches!(phi.phi_eval(0.6), Err(Error::Domain { .. })));
    assert!(phi.phi_eval(-0.1).is_err());
}

#[test]
fn csv_has_a_row_per_node() {
    let phi = ReparamPhi::new(0.3).unwrap();
    let csv = phi.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,density,phi"));
    assert_eq!(lines.count(), phi.density_table().len());
}

proptest! {
    #[test]
    fn phi_is_monotone_from_zero_to_one(l in 0.01f64..=1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let phi = ReparamPhi::new(l).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(phi.phi_eval(lo * l).unwrap() <= phi.phi_eval(hi * l).unwrap());
        prop_assert_eq!(phi.phi_eval(0.0).unwrap(), 0.0);
        prop_assert!((phi.phi_eval(l).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn density_respects_the_slope_bound(l in 0.01f64..=1.0, u in 0.0f64..=1.0) {
        let phi = ReparamPhi::new(l).unwrap();
        let d = phi.phi_partial_s(u * l).unwrap();
        prop_assert!(d >= 1.0 - 1e-12 && d <= 3.0 / l + 1e-6);
    }

    #[test]
    fn cdf_is_monotone(a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(mollifier_cdf(lo) <= mollifier_cdf(hi) + 1e-15);
    }
}
