//! Explicit homotopies of based loops and their measured continuity.
//!
//! * `gamma_h` slides the base of a loop along a bridge `τ`;
//! * `retraction_homotopy` runs a loop faster and freezes it at its end;
//! * `truncation_homotopy` cuts a loop off at time `t`, with `delta_p` as
//!   continuous approximants of the cut.
//!
//! Compositions `γ∘φ` use monotone cubic interpolation of the samples.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ambient::C64;
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::loops::SampledLoop;
use crate::manifold::ManifoldSpec;
use crate::mollifier::ReparamPhi;
use crate::spectral::{sampled_derivative, sampled_sobolev_norm, SobolevOrder};

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} = {x} must lie in [0, 1]")))
    }
}

/// Max distance between `τ(1/2)` and `γ(0)`.
pub fn bridge_defect(gamma: &SampledLoop, tau: &SampledLoop) -> Result<f64> {
    gamma.ambient().ensure_same(&tau.ambient())?;
    let mid = MonotoneCubic::new(tau).eval(0.5);
    Ok(gamma.ambient().norm(
        &mid.iter().zip(gamma.get(0)).map(|(a, b)| a - b).collect::<Vec<_>>(),
    ))
}

/// `σ ∨ σ⁻¹` where `σ(u) = τ(u/2)` is the outbound half of the bridge,
/// each half run through `φ(1/2, ·)`. This is the `h = 1` member of
/// [`gamma_h`].
pub fn bridge_concatenation(tau: &SampledLoop, sample_count: usize) -> Result<SampledLoop> {
    if sample_count < 2 {
        return Err(Error::Resolution("need at least 2 samples".into()));
    }
    let phi = ReparamPhi::new(0.5)?;
    let it = MonotoneCubic::new(tau);
    let d = tau.ambient().dim();
    let mut samples = vec![C64::new(0.0, 0.0); sample_count * d];
    for (j, out) in samples.chunks_mut(d).enumerate() {
        let s = j as f64 / sample_count as f64;
        let u = if s <= 0.5 { s } else { 1.0 - s };
        it.eval_into(phi.phi_clamped(u) / 2.0, out);
    }
    SampledLoop::new(tau.ambient(), samples)
}

/// The basepoint family: `τ∘φ(h/2, ·)/2` on `[0, h/2]`, then
/// `γ∘φ(1-h, · - h/2)`, then the outbound bridge in reverse on
/// `[1 - h/2, 1]`. `h = 0` gives `γ` and `h = 1` the concatenation
/// `σ ∨ σ⁻¹`.
pub fn gamma_h(gamma: &SampledLoop, tau: &SampledLoop, h: f64) -> Result<SampledLoop> {
    check_unit("h", h)?;
    let defect = bridge_defect(gamma, tau)?;
    let scale = gamma.ambient().norm(gamma.get(0)).max(1.0);
    if defect > 1e-6 * scale {
        return Err(Error::Precondition(format!(
            "bridge misses the loop's base point by {defect:e}"
        )));
    }
    if h == 0.0 {
        return Ok(gamma.clone());
    }
    let m = gamma.len();
    if h == 1.0 {
        return bridge_concatenation(tau, m);
    }
    let outer = ReparamPhi::new(h / 2.0)?;
    let inner = ReparamPhi::new(1.0 - h)?;
    let g = MonotoneCubic::new(gamma);
    let t = MonotoneCubic::new(tau);
    let d = gamma.ambient().dim();
    let mut samples = vec![C64::new(0.0, 0.0); m * d];
    for (j, out) in samples.chunks_mut(d).enumerate() {
        let s = j as f64 / m as f64;
        if s <= h / 2.0 {
            t.eval_into(outer.phi_clamped(s) / 2.0, out);
        } else if s < 1.0 - h / 2.0 {
            g.eval_into(inner.phi_clamped(s - h / 2.0), out);
        } else {
            t.eval_into(outer.phi_clamped(1.0 - s) / 2.0, out);
        }
    }
    SampledLoop::new(gamma.ambient(), samples)
}

/// Upper bound for `‖γ_h - γ‖_{L²}`: the two bridge branches have total
/// length `h` and sit within `sup|τ| + sup|γ|` of `γ`; on the middle branch
/// the time shift is at most `sup_u |φ(1-h, u) - u| + h/2`.
pub fn gamma_h_bound(gamma: &SampledLoop, tau: &SampledLoop, h: f64) -> Result<f64> {
    check_unit("h", h)?;
    if h == 0.0 {
        return Ok(0.0);
    }
    let sup_sum = tau.sup_norm() + gamma.sup_norm();
    let branch = h * sup_sum * sup_sum;
    if h == 1.0 {
        return Ok(branch.sqrt());
    }
    let speed = sampled_derivative(gamma).sup_norm();
    let shift = ReparamPhi::new(1.0 - h)?.displacement();
    let middle = (shift + 1.5 * h / (1.0 - h)) * speed;
    Ok((branch + (1.0 - h) * middle * middle).sqrt())
}

/// `H(s', γ)(l) = γ(φ(1 - s', l))` for `l ≤ 1 - s'`, then the constant
/// `γ(0)`.
pub fn retraction_homotopy(gamma: &SampledLoop, s_prime: f64) -> Result<SampledLoop> {
    check_unit("s'", s_prime)?;
    let base = gamma.get(0).to_vec();
    if s_prime == 0.0 {
        return Ok(gamma.clone());
    }
    if s_prime == 1.0 {
        return Ok(SampledLoop::constant(gamma.ambient(), gamma.len(), &base));
    }
    let l = 1.0 - s_prime;
    let phi = ReparamPhi::new(l)?;
    let it = MonotoneCubic::new(gamma);
    let m = gamma.len();
    let d = gamma.ambient().dim();
    let mut samples = vec![C64::new(0.0, 0.0); m * d];
    for (j, out) in samples.chunks_mut(d).enumerate() {
        let s = j as f64 / m as f64;
        if s <= l {
            it.eval_into(phi.phi_clamped(s), out);
        } else {
            out.copy_from_slice(&base);
        }
    }
    SampledLoop::new(gamma.ambient(), samples)
}

/// `H(t, γ) = 1_{s < t} γ`, with the cut part sent to the manifold's
/// basepoint. Use a translated manifold to make the basepoint zero.
pub fn truncation_homotopy(gamma: &SampledLoop, t: f64, manifold: &ManifoldSpec) -> Result<SampledLoop> {
    check_unit("t", t)?;
    manifold.ambient().ensure_same(&gamma.ambient())?;
    let base = manifold.basepoint();
    Ok(gamma.map(|j, v| {
        if gamma.time(j) < t {
            v.to_vec()
        } else {
            base.to_vec()
        }
    }))
}

/// Continuous approximant of the cut: `γ` before `t`, then the rest of `γ`
/// run `p` times faster, `γ(min(t + p(s - t), 1))`, then the basepoint.
pub fn delta_p(gamma: &SampledLoop, t: f64, p: u32, manifold: &ManifoldSpec) -> Result<SampledLoop> {
    check_unit("t", t)?;
    manifold.ambient().ensure_same(&gamma.ambient())?;
    if p == 0 {
        return Err(Error::Precondition("p must be positive".into()));
    }
    let pf = p as f64;
    if t + 1.0 / pf >= 1.0 {
        return Err(Error::Precondition(format!("t + 1/p = {} must be < 1", t + 1.0 / pf)));
    }
    if gamma.len() < 8 * p as usize {
        return Err(Error::Resolution(format!(
            "{} samples cannot resolve a ramp of length 1/{p}",
            gamma.len()
        )));
    }
    let it = MonotoneCubic::new(gamma);
    let base = manifold.basepoint();
    Ok(gamma.map(|j, v| {
        let s = gamma.time(j);
        if s < t {
            v.to_vec()
        } else if s < t + 1.0 / pf {
            it.eval((t + pf * (s - t)).min(1.0))
        } else {
            base.to_vec()
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    BasepointFamily,
    Retraction,
    Truncation,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::BasepointFamily => "basepoint-family",
            FamilyKind::Retraction => "retraction",
            FamilyKind::Truncation => "truncation",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HomotopyFamily {
    kind: FamilyKind,
    base: SampledLoop,
    tau: Option<SampledLoop>,
    manifold: Option<ManifoldSpec>,
    grid: Vec<f64>,
}

impl HomotopyFamily {
    pub fn basepoint(gamma: SampledLoop, tau: SampledLoop, grid: Vec<f64>) -> Self {
        Self {
            kind: FamilyKind::BasepointFamily,
            base: gamma,
            tau: Some(tau),
            manifold: None,
            grid,
        }
    }

    pub fn retraction(gamma: SampledLoop, grid: Vec<f64>) -> Self {
        Self {
            kind: FamilyKind::Retraction,
            base: gamma,
            tau: None,
            manifold: None,
            grid,
        }
    }

    pub fn truncation(gamma: SampledLoop, manifold: ManifoldSpec, grid: Vec<f64>) -> Self {
        Self {
            kind: FamilyKind::Truncation,
            base: gamma,
            tau: None,
            manifold: Some(manifold),
            grid,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn base(&self) -> &SampledLoop {
        &self.base
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn member(&self, param: f64) -> Result<SampledLoop> {
        match self.kind {
            FamilyKind::BasepointFamily => gamma_h(&self.base, self.tau.as_ref().unwrap(), param),
            FamilyKind::Retraction => retraction_homotopy(&self.base, param),
            FamilyKind::Truncation => {
                truncation_homotopy(&self.base, param, self.manifold.as_ref().unwrap())
            }
        }
    }

    /// All members on the grid, computed in parallel.
    pub fn members(&self) -> Result<Vec<SampledLoop>> {
        self.grid.par_iter().map(|&p| self.member(p)).collect()
    }

    /// Rigorous bound on the distance between adjacent members at `s = 0`,
    /// where one is available.
    fn pair_bound(&self, a: f64, b: f64) -> Option<f64> {
        let gap = b - a;
        match self.kind {
            FamilyKind::Truncation => {
                let base = self.manifold.as_ref()?.basepoint();
                let k = self
                    .base
                    .iter()
                    .map(|v| {
                        self.base
                            .ambient()
                            .norm(&v.iter().zip(base).map(|(x, y)| x - y).collect::<Vec<_>>())
                    })
                    .fold(0.0, f64::max);
                // a grid window of width `gap` holds at most `gap·M + 1` samples
                Some(k * (gap + 1.0 / self.base.len() as f64).sqrt())
            }
            FamilyKind::Retraction => {
                if b >= 1.0 {
                    return None;
                }
                let speed = sampled_derivative(&self.base).sup_norm();
                let k = retraction_lipschitz(a, b).ok()?;
                let slope = 3.0 / (1.0 - a);
                let sq = gap * gap * (k * k * (1.0 - b) + slope * slope * gap);
                Some(speed * sq.sqrt() * (1.0 + 1e-6))
            }
            FamilyKind::BasepointFamily => None,
        }
    }
}

/// `k_{s,t} = sup_u |φ(1-s, u) - φ(1-t, u)| / (t - s)` over `u ≤ 1 - t`.
pub fn retraction_lipschitz(s: f64, t: f64) -> Result<f64> {
    if !(0.0 <= s && s < t && t < 1.0) {
        return Err(Error::Precondition(format!("need 0 ≤ s < t < 1, got s = {s}, t = {t}")));
    }
    let a = ReparamPhi::new(1.0 - s)?;
    let b = ReparamPhi::new(1.0 - t)?;
    let n = 4096;
    let sup = (0..=n)
        .map(|i| {
            let u = (1.0 - t) * i as f64 / n as f64;
            (a.phi_clamped(u) - b.phi_clamped(u)).abs()
        })
        .fold(0.0, f64::max);
    Ok(sup / (t - s))
}

/// `anchor + span·2^{-k}` for `k = 0..count`, ascending.
pub fn geometric_grid(anchor: f64, span: f64, count: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..count).map(|k| anchor + span * 0.5f64.powi(k as i32)).collect();
    g.sort_by(f64::total_cmp);
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusRow {
    pub gap: f64,
    pub distance: f64,
    pub bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusReport {
    pub kind: FamilyKind,
    pub order: f64,
    pub rows: Vec<ModulusRow>,
    /// Least-squares slope of `log distance` against `log gap`.
    pub exponent: f64,
    pub exponent_se: f64,
    pub interval: (f64, f64),
    /// No decay of the distance with the gap.
    pub diverges: bool,
}

impl ModulusReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("gap,distance,bound,pass\n");
        for r in &self.rows {
            let bound = r.bound.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.gap, r.distance, bound, r.pass));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "order": self.order,
            "exponent": self.exponent,
            "exponent_se": self.exponent_se,
            "interval": [self.interval.0, self.interval.1],
            "diverges": self.diverges,
            "rows": self.rows.iter().map(|r| json!({
                "gap": r.gap, "distance": r.distance, "bound": r.bound, "pass": r.pass,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, slope_se)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if x.len() > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, intercept, se)
}

/// Distances `‖H(t_{i+1}) - H(t_i)‖_s` over adjacent grid pairs, with the
/// fitted power law in the gap.
pub fn continuity_modulus(family: &HomotopyFamily, order: SobolevOrder) -> Result<ModulusReport> {
    let grid = family.grid();
    if grid.len() < 8 {
        return Err(Error::Precondition("continuity needs at least 8 grid points".into()));
    }
    if grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::Precondition("grid must be strictly increasing".into()));
    }
    let members = family.members()?;
    let rows: Vec<ModulusRow> = (0..grid.len() - 1)
        .into_par_iter()
        .map(|i| {
            let gap = grid[i + 1] - grid[i];
            let diff = members[i + 1].sub(&members[i])?;
            let distance = sampled_sobolev_norm(&diff, order);
            let bound = if order.0 == 0.0 {
                family.pair_bound(grid[i], grid[i + 1])
            } else {
                None
            };
            let pass = bound.is_none_or(|b| distance <= b);
            Ok(ModulusRow {
                gap,
                distance,
                bound,
                pass,
            })
        })
        .collect::<Result<_>>()?;
    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.distance > 1e-300)
        .map(|r| (r.gap.ln(), r.distance.ln()))
        .unzip();
    let (exponent, exponent_se) = if lx.len() >= 2 {
        let (s, _, se) = fit_line(&lx, &ly);
        (s, se)
    } else {
        (f64::NAN, f64::NAN)
    };
    let half = 1.96 * exponent_se;
    let smallest = rows.iter().min_by(|a, b| a.gap.total_cmp(&b.gap)).unwrap();
    let largest = rows.iter().max_by(|a, b| a.gap.total_cmp(&b.gap)).unwrap();
    let diverges = smallest.distance >= 0.5 * largest.distance || exponent.is_nan() || exponent < 0.1;
    Ok(ModulusReport {
        kind: family.kind(),
        order: order.0,
        rows,
        exponent,
        exponent_se,
        interval: (exponent - half, exponent + half),
        diverges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Ambient;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn circle_loop(m: usize) -> SampledLoop {
        SampledLoop::from_fn(Ambient::Complex(1), m, |t| {
            vec![C64::from_polar(1.0, 0.2 + 0.3 * (2.0 * PI * t).sin())]
        })
    }

    #[test]
    fn retraction_endpoints() {
        let g = circle_loop(256);
        assert_eq!(retraction_homotopy(&g, 0.0).unwrap(), g);
        let one = retraction_homotopy(&g, 1.0).unwrap();
        assert!(one.iter().all(|v| v == g.get(0)));
        assert!(retraction_homotopy(&g, 1.5).is_err());
    }

    #[test]
    fn retraction_freezes_after_one_minus_s() {
        let g = circle_loop(256);
        let h = retraction_homotopy(&g, 0.5).unwrap();
        for j in 129..256 {
            assert_eq!(h.get(j), g.get(0));
        }
        assert!((h.get(128)[0] - g.get(0)[0]).norm() < 1e-9);
    }

    #[test]
    fn truncation_cuts_to_basepoint() {
        let amb = Ambient::Real(1);
        let flat = ManifoldSpec::full_linear(amb);
        let g = SampledLoop::from_real_fn(amb, 16, |t| vec![1.0 + t]);
        let h = truncation_homotopy(&g, 0.5, &flat).unwrap();
        for j in 0..16 {
            let want = if j < 8 { g.get(j)[0] } else { c(0.0) };
            assert_eq!(h.get(j)[0], want);
        }
        let zero = truncation_homotopy(&g, 0.0, &flat).unwrap();
        assert!(zero.iter().all(|v| v[0] == c(0.0)));
        assert_eq!(truncation_homotopy(&g, 1.0, &flat).unwrap(), g);
    }

    #[test]
    fn delta_p_preconditions_and_continuity() {
        let amb = Ambient::Real(1);
        let flat = ManifoldSpec::full_linear(amb);
        let g = SampledLoop::from_real_fn(amb, 1024, |t| vec![(PI * t).sin()]);
        assert!(matches!(delta_p(&g, 0.9, 10, &flat), Err(Error::Precondition(_))));
        assert!(matches!(delta_p(&g, 0.1, 200, &flat), Err(Error::Resolution(_))));
        let d = delta_p(&g, 0.25, 8, &flat).unwrap();
        let jumps = (1..1024)
            .map(|j| (d.get(j)[0] - d.get(j - 1)[0]).norm())
            .fold(0.0, f64::max);
        // the ramp runs 8 times faster than γ: steps stay below 8π/M
        assert!(jumps < 8.0 * PI / 1024.0 * 1.01, "{jumps}");
    }

    #[test]
    fn gamma_h_endpoints_and_bridge_check() {
        let circ = ManifoldSpec::circle();
        let m = 512;
        let x = C64::from_polar(1.0, 0.2);
        let g = SampledLoop::from_fn(Ambient::Complex(1), m, |t| {
            vec![x * C64::from_polar(1.0, 0.1 * (2.0 * PI * t).sin())]
        });
        let v = sampled_derivative(&g).get(0).to_vec();
        let tau = circ.bridge_loop(&[x], &v, m).unwrap();
        assert_eq!(gamma_h(&g, &tau, 0.0).unwrap(), g);
        let one = gamma_h(&g, &tau, 1.0).unwrap();
        assert_eq!(one, bridge_concatenation(&tau, m).unwrap());
        let half = gamma_h(&g, &tau, 0.5).unwrap();
        assert!((half.get(0)[0] - c(1.0)).norm() < 1e-12);
        assert!(circ.membership_defect(&half) < 1e-6);
        let wrong = circ.bridge_loop(&[C64::from_polar(1.0, 1.0)], &[c(0.0)], m).unwrap();
        assert!(matches!(gamma_h(&g, &wrong, 0.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn fit_line_recovers_slope() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 2.0).collect();
        let (s, i, se) = fit_line(&x, &y);
        assert!((s - 0.5).abs() < 1e-14 && (i + 2.0).abs() < 1e-13 && se < 1e-12);
    }

    #[test]
    fn geometric_grid_is_sorted_with_halving_gaps() {
        let g = geometric_grid(0.5, 0.4, 9);
        assert_eq!(g.len(), 9);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g[8] - 0.9).abs() < 1e-15);
        assert!(((g[8] - g[7]) / (g[7] - g[6]) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn modulus_rejects_short_grids() {
        let fam = HomotopyFamily::retraction(circle_loop(64), vec![0.1, 0.2]);
        assert!(continuity_modulus(&fam, SobolevOrder::L2).is_err());
    }
}
