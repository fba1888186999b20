//! The smooth reparametrization `φ(l, ·) : [0, l] → [0, 1]`.
//!
//! `∂φ/∂s` is a step density (1 outside the middle third of `[0, l]`,
//! `(3 - 2l)/l` inside) smoothed by a bump of width `l/6`, so it equals 1
//! identically near both ends. That gives `φ(l,0) = 0`, `φ(l,l) = 1`, unit
//! slope and vanishing higher derivatives at both ends, and `∂φ/∂s ≤ 3/l`.

use std::sync::OnceLock;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Intervals in the tabulated CDF of the standard bump on `[-1, 1]`.
const CDF_INTERVALS: usize = 4096;
/// Grid cells per unit `l` in the φ tables.
const PHI_CELLS: usize = 4096;

/// Standard bump `m(t) = c·exp(-1/(1-t²))` on `(-1, 1)`, scaled to
/// `m_ε(t) = m(t/ε)/ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    width: f64,
}

struct BumpTable {
    norm: f64,
    cdf: Vec<f64>,
}

fn raw_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn bump_table() -> &'static BumpTable {
    static TABLE: OnceLock<BumpTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let gl = GaussLegendre::new(10);
        let h = 2.0 / CDF_INTERVALS as f64;
        let mut cdf = Vec::with_capacity(CDF_INTERVALS + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 0..CDF_INTERVALS {
            let a = -1.0 + i as f64 * h;
            acc += gl.integrate(a, a + h, raw_bump);
            cdf.push(acc);
        }
        let norm = acc;
        for v in &mut cdf {
            *v /= norm;
        }
        BumpTable { norm, cdf }
    })
}

/// `m(t)` for the unit-mass standard bump.
pub fn mollifier_eval(t: f64) -> f64 {
    raw_bump(t) / bump_table().norm
}

/// `∫_{-1}^x m`, by Hermite interpolation of the tabulated integral.
pub fn mollifier_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let table = bump_table();
    let h = 2.0 / CDF_INTERVALS as f64;
    let pos = (x + 1.0) / h;
    let i = (pos.floor() as usize).min(CDF_INTERVALS - 1);
    let u = pos - i as f64;
    let a = -1.0 + i as f64 * h;
    hermite(
        table.cdf[i],
        table.cdf[i + 1],
        h * mollifier_eval(a),
        h * mollifier_eval(a + h),
        u,
    )
}

fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, u: f64) -> f64 {
    let (u2, u3) = (u * u, u * u * u);
    (2.0 * u3 - 3.0 * u2 + 1.0) * y0
        + (u3 - 2.0 * u2 + u) * d0
        + (-2.0 * u3 + 3.0 * u2) * y1
        + (u3 - u2) * d1
}

impl Mollifier {
    pub fn standard() -> Self {
        Self { width: 1.0 }
    }

    pub fn with_width(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Precondition(format!("mollifier width {width} must be positive")));
        }
        Ok(Self { width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn eval(&self, t: f64) -> f64 {
        mollifier_eval(t / self.width) / self.width
    }

    pub fn cdf(&self, t: f64) -> f64 {
        mollifier_cdf(t / self.width)
    }

    /// Normalization of the unscaled bump, `∫ exp(-1/(1-t²)) dt`.
    pub fn raw_mass() -> f64 {
        bump_table().norm
    }
}

/// Precomputed `φ(l, ·)` for one `l ∈ (0, 1]`.
#[derive(Debug, Clone)]
pub struct ReparamPhi {
    l: f64,
    quadrature_step: f64,
    density_table: Vec<f64>,
    cumulative_table: Vec<f64>,
}

impl ReparamPhi {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0 && l <= 1.0) {
            return Err(Error::Domain {
                value: l,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let h = l / PHI_CELLS as f64;
        let density_table: Vec<f64> = (0..=PHI_CELLS)
            .map(|i| density(l, i as f64 * h))
            .collect();
        let mut cumulative_table = Vec::with_capacity(PHI_CELLS + 1);
        let mut acc = 0.0;
        cumulative_table.push(0.0);
        for i in 0..PHI_CELLS {
            let mid = density(l, (i as f64 + 0.5) * h);
            acc += h / 6.0 * (density_table[i] + 4.0 * mid + density_table[i + 1]);
            cumulative_table.push(acc);
        }
        Ok(Self {
            l,
            quadrature_step: h,
            density_table,
            cumulative_table,
        })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn quadrature_step(&self) -> f64 {
        self.quadrature_step
    }

    pub fn density_table(&self) -> &[f64] {
        &self.density_table
    }

    pub fn cumulative_table(&self) -> &[f64] {
        &self.cumulative_table
    }

    /// Height of the middle plateau, `(3 - 2l)/l`.
    pub fn plateau(&self) -> f64 {
        (3.0 - 2.0 * self.l) / self.l
    }

    fn check(&self, s: f64) -> Result<()> {
        if (0.0..=self.l).contains(&s) {
            Ok(())
        } else {
            Err(Error::Domain {
                value: s,
                lo: 0.0,
                hi: self.l,
            })
        }
    }

    pub fn phi_eval(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(self.phi_clamped(s))
    }

    /// `φ(l, s)` with `s` clamped into `[0, l]`.
    pub fn phi_clamped(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let h = self.quadrature_step;
        let pos = (s.min(self.l)) / h;
        let i = (pos.floor() as usize).min(PHI_CELLS - 1);
        let u = pos - i as f64;
        let v = hermite(
            self.cumulative_table[i],
            self.cumulative_table[i + 1],
            h * self.density_table[i],
            h * self.density_table[i + 1],
            u,
        );
        v.clamp(0.0, 1.0)
    }

    pub fn phi_partial_s(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(density(self.l, s))
    }

    /// `sup_s |φ(l, s) - s|` over the table grid.
    pub fn displacement(&self) -> f64 {
        self.cumulative_table
            .iter()
            .enumerate()
            .map(|(i, c)| (c - i as f64 * self.quadrature_step).abs())
            .fold(0.0, f64::max)
    }

    /// Checks `φ, ∂φ/∂s, ∂²φ/∂s², …` at both ends against `(0, 1, 0, …)`
    /// and `(1, 1, 0, …)`, plus the mass and the `3/l` slope bound.
    /// Derivatives of order ≥ 2 are one-sided finite differences of the
    /// density table.
    pub fn verify_boundary_conditions(&self, max_derivative_order: usize, tol: f64) -> BoundaryReport {
        let order = max_derivative_order.max(2);
        let h = self.quadrature_step;
        let n = self.density_table.len() - 1;
        let mut rows = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let (at_zero, at_l) = match k {
                0 => (self.cumulative_table[0], self.cumulative_table[n]),
                1 => (self.density_table[0], self.density_table[n]),
                _ => {
                    let d = k - 1;
                    let fwd = finite_difference(d, h, |i| self.density_table[i]);
                    let bwd = finite_difference(d, -h, |i| self.density_table[n - i]);
                    (fwd, bwd)
                }
            };
            let expected_zero = if k == 1 { 1.0 } else { 0.0 };
            let expected_l = if k <= 1 { 1.0 } else { 0.0 };
            let pass = (at_zero - expected_zero).abs() <= tol && (at_l - expected_l).abs() <= tol;
            rows.push(BoundaryRow {
                order: k,
                at_zero,
                expected_zero,
                at_l,
                expected_l,
                pass,
            });
        }
        let slope_max = self.density_table.iter().copied().fold(0.0, f64::max);
        let slope_bound = 3.0 / self.l;
        let mass = self.cumulative_table[n];
        BoundaryReport {
            l: self.l,
            tol,
            rows,
            slope_max,
            slope_bound,
            slope_pass: slope_max <= slope_bound + tol,
            mass,
            monotone: self.cumulative_table.windows(2).all(|w| w[1] >= w[0]),
        }
    }

    /// Table as CSV with header `s,density,phi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,density,phi\n");
        for (i, (d, c)) in self.density_table.iter().zip(&self.cumulative_table).enumerate() {
            out.push_str(&format!("{},{},{}\n", i as f64 * self.quadrature_step, d, c));
        }
        out
    }
}

/// `(φ_l * m_{l/6})(t)` with the step density extended by 1 outside
/// `[0, l]`.
fn density(l: f64, t: f64) -> f64 {
    let plateau = (3.0 - 2.0 * l) / l;
    let x = 6.0 * t / l;
    1.0 + (plateau - 1.0) * (mollifier_cdf(x - 2.0) - mollifier_cdf(x - 4.0))
}

/// `d`-th one-sided difference quotient with signed step `h`.
fn finite_difference(d: usize, h: f64, f: impl Fn(usize) -> f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for i in 0..=d {
        let sign = if (d - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * binom * f(i);
        binom = binom * (d - i) as f64 / (i + 1) as f64;
    }
    acc / h.powi(d as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRow {
    pub order: usize,
    pub at_zero: f64,
    pub expected_zero: f64,
    pub at_l: f64,
    pub expected_l: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub l: f64,
    pub tol: f64,
    pub rows: Vec<BoundaryRow>,
    pub slope_max: f64,
    pub slope_bound: f64,
    pub slope_pass: bool,
    pub mass: f64,
    pub monotone: bool,
}

impl BoundaryReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.slope_pass && self.monotone
    }

    pub fn to_json(&self) -> Value {
        json!({
            "l": self.l,
            "tol": self.tol,
            "rows": self.rows.iter().map(|r| json!({
                "order": r.order,
                "at_zero": r.at_zero,
                "expected_zero": r.expected_zero,
                "at_l": r.at_l,
                "expected_l": r.expected_l,
                "pass": r.pass,
            })).collect::<Vec<_>>(),
            "slope_max": self.slope_max,
            "slope_bound": self.slope_bound,
            "slope_pass": self.slope_pass,
            "mass": self.mass,
            "monotone": self.monotone,
            "pass": self.all_pass(),
        })
    }
}
