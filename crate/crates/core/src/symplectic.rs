//! The canonical 1-form `θ(X) = ∫ (γ̇, X)` and the 2-form
//! `ω(X, Y) = ∫ (∇X/ds, Y)` on based loops.
//!
//! Both return the real part of the Hermitian pairing. With this
//! convention `dθ = 2ω` on the flat space.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ambient::{Ambient, C64};
use crate::error::{Error, Result};
use crate::loops::{FourierLoop, SampledLoop};
use crate::manifold::{ManifoldKind, ManifoldSpec, DEFAULT_TANGENCY_TOLERANCE};
use crate::spectral::{
    dual_pairing, loop_derivative, random_rough_loop, sampled_derivative, sobolev_norm, DualPairing,
    SobolevOrder,
};

/// How far above `1/2` the random fields of [`pairing_bound_check`] sit.
pub const PAIRING_MARGIN: f64 = 0.05;

/// `θ_γ(X)`, the real part of `⟨γ̇, X⟩` in `H^{-1/2} × H^{1/2}`.
pub fn theta(gamma: &FourierLoop, x: &FourierLoop) -> Result<f64> {
    Ok(theta_pairing(gamma, x)?.value.re)
}

/// The full pairing behind [`theta`], with `‖γ̇‖_{-1/2}` and `‖X‖_{1/2}`.
pub fn theta_pairing(gamma: &FourierLoop, x: &FourierLoop) -> Result<DualPairing> {
    dual_pairing(&loop_derivative(gamma), x)
}

/// `ω(X, Y) = Re Σ_n (2πin X_n, Y_n)`.
pub fn omega_flat(x: &FourierLoop, y: &FourierLoop) -> Result<f64> {
    Ok(dual_pairing(&loop_derivative(x), y)?.value.re)
}

/// A vector field along a sampled loop on `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    base: SampledLoop,
    field: SampledLoop,
    tangency_defect: f64,
}

impl TangentField {
    /// Fails with [`Error::NotTangent`] when the field leaves the tangent
    /// bundle by more than the default tolerance (relative to its size).
    pub fn new(manifold: &ManifoldSpec, base: SampledLoop, field: SampledLoop) -> Result<Self> {
        manifold.ambient().ensure_same(&base.ambient())?;
        let tangency_defect = manifold.field_tangency_defect(&base, &field)?;
        let budget = DEFAULT_TANGENCY_TOLERANCE * field.sup_norm().max(1.0);
        if tangency_defect > budget {
            return Err(Error::NotTangent {
                defect: tangency_defect,
                tolerance: budget,
            });
        }
        Ok(Self {
            base,
            field,
            tangency_defect,
        })
    }

    pub fn base(&self) -> &SampledLoop {
        &self.base
    }

    pub fn field(&self) -> &SampledLoop {
        &self.field
    }

    pub fn tangency_defect(&self) -> f64 {
        self.tangency_defect
    }
}

/// Mean over the grid of `Re(a_j, b_j)`.
fn mean_pairing(a: &SampledLoop, b: &SampledLoop) -> f64 {
    let amb = a.ambient();
    let total: f64 = (0..a.len()).map(|j| amb.inner(a.get(j), b.get(j)).re).sum();
    total / a.len() as f64
}

/// `ω_N(X, Y) = ∫ (∇X/ds, Y) ds` by the periodic trapezoid rule.
pub fn omega_manifold(manifold: &ManifoldSpec, x: &TangentField, y: &TangentField) -> Result<f64> {
    x.field.ensure_compatible(&y.field)?;
    if x.base != y.base {
        return Err(Error::Precondition("fields live along different loops".into()));
    }
    let nabla = manifold.covariant_derivative(&x.base, &x.field)?;
    Ok(mean_pairing(&nabla, &y.field))
}

/// `ω_G(ξ, η) = ∫ (ξ', η)` on left-invariant fields of the based loop group,
/// given by loops `ξ, η` in the Lie algebra. Only meaningful for smooth,
/// well-resolved samples.
pub fn omega_group(manifold: &ManifoldSpec, xi: &SampledLoop, eta: &SampledLoop) -> Result<f64> {
    if !matches!(
        manifold.kind(),
        ManifoldKind::UnitaryU1 | ManifoldKind::SpecialUnitarySU2
    ) {
        return Err(Error::Precondition(format!("{:?} is not a group", manifold.kind())));
    }
    xi.ensure_compatible(eta)?;
    manifold.ambient().ensure_same(&xi.ambient())?;
    let id = manifold.ambient().identity().expect("group ambients have a unit");
    for field in [xi, eta] {
        let defect = (0..field.len())
            .map(|j| manifold.tangency_defect(&id, field.get(j)))
            .fold(0.0, f64::max);
        let budget = DEFAULT_TANGENCY_TOLERANCE * field.sup_norm().max(1.0);
        if defect > budget {
            return Err(Error::NotTangent {
                defect,
                tolerance: budget,
            });
        }
    }
    Ok(mean_pairing(&sampled_derivative(xi), eta))
}

/// `ω(X, Y)` on the truncations of `X` and `Y` to each cutoff.
pub fn omega_cutoff_sweep(x: &FourierLoop, y: &FourierLoop, cutoffs: &[usize]) -> Result<Vec<f64>> {
    x.ensure_compatible(y)?;
    cutoffs
        .iter()
        .map(|&c| {
            let c = c.min(x.cutoff());
            omega_flat(&x.with_cutoff(c), &y.with_cutoff(c))
        })
        .collect()
}

/// `|ω(X, Y)| / (‖X‖_{1/2} ‖Y‖_{1/2})`, or 0 if either field vanishes.
pub fn pairing_ratio(x: &FourierLoop, y: &FourierLoop) -> Result<f64> {
    let w = omega_flat(x, y)?;
    let denom = sobolev_norm(x, SobolevOrder(0.5)) * sobolev_norm(y, SobolevOrder(0.5));
    Ok(if denom == 0.0 { 0.0 } else { w.abs() / denom })
}

/// Ratio for `X = e^{2πins}`, `Y = i e^{2πins}`, computed through
/// [`pairing_ratio`]. Equals `2π|n| / (1 + |n|)`.
pub fn single_mode_ratio(n: i64) -> Result<f64> {
    let amb = Ambient::Complex(1);
    let cutoff = n.unsigned_abs() as usize;
    let x = FourierLoop::single_mode(amb, cutoff, n, &[C64::new(1.0, 0.0)]);
    let y = x.scale(C64::new(0.0, 1.0));
    pairing_ratio(&x, &y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    pub trials: usize,
    pub cutoff: usize,
    pub order: f64,
    pub max_ratio: f64,
    pub bound: f64,
    /// Seeds of the `(X, Y)` pair attaining `max_ratio`.
    pub argmax_seeds: (u64, u64),
}

impl PairingReport {
    pub fn pass(&self) -> bool {
        self.max_ratio <= self.bound
    }

    pub fn to_json(&self) -> Value {
        json!({
            "trials": self.trials,
            "cutoff": self.cutoff,
            "order": self.order,
            "max_ratio": self.max_ratio,
            "bound": self.bound,
            "argmax_seeds": [self.argmax_seeds.0, self.argmax_seeds.1],
            "pass": self.pass(),
        })
    }
}

/// Largest `|ω(X, Y)| / (‖X‖_{1/2} ‖Y‖_{1/2})` over random rough pairs in
/// `ℝ³`. Trial `k` uses seeds `seed + 2k` and `seed + 2k + 1`.
pub fn pairing_bound_check(trials: usize, cutoff: usize, seed: u64) -> Result<PairingReport> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is needed".into()));
    }
    let amb = Ambient::Real(3);
    let order = SobolevOrder(0.5 + PAIRING_MARGIN);
    let ratios: Vec<(f64, (u64, u64))> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let seeds = (seed.wrapping_add(2 * k), seed.wrapping_add(2 * k + 1));
            let x = random_rough_loop(amb, order, cutoff, seeds.0)?;
            let y = random_rough_loop(amb, order, cutoff, seeds.1)?;
            Ok((pairing_ratio(&x, &y)?, seeds))
        })
        .collect::<Result<_>>()?;
    // first maximum in trial order, independent of scheduling
    let (max_ratio, argmax_seeds) = ratios
        .into_iter()
        .fold((f64::NEG_INFINITY, (0, 0)), |best, r| if r.0 > best.0 { r } else { best });
    Ok(PairingReport {
        trials,
        cutoff,
        order: order.0,
        max_ratio,
        bound: 2.0 * PI,
        argmax_seeds,
    })
}
