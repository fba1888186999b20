//! Embedded target manifolds `N ⊂ M`.
//!
//! Every kind supplies a nearest-point retraction, the exact distance to `N`,
//! the orthogonal projection onto tangent spaces, and a canonical path from
//! the basepoint to any reachable point. A translated variant moves the
//! basepoint to the ambient zero, which the truncation homotopy needs.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde_json::{json, Value};

use crate::ambient::{Ambient, C64};
use crate::error::{Error, Result};
use crate::loops::SampledLoop;
use crate::spectral::sampled_derivative;

/// Relative tangency budget used when no explicit tolerance is given.
pub const DEFAULT_TANGENCY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    FullLinear,
    /// Unit circle in `ℂ`.
    Circle,
    /// Unit sphere in `ℝ³`.
    Sphere2,
    /// `U(1)` as `1 × 1` unitary matrices.
    UnitaryU1,
    /// `SU(2)` inside `2 × 2` complex matrices.
    SpecialUnitarySU2,
}

impl ManifoldKind {
    fn name(&self) -> &'static str {
        match self {
            ManifoldKind::FullLinear => "full-linear-space",
            ManifoldKind::Circle => "circle",
            ManifoldKind::Sphere2 => "sphere2",
            ManifoldKind::UnitaryU1 => "unitary-u1",
            ManifoldKind::SpecialUnitarySU2 => "special-unitary-su2",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        [
            ManifoldKind::FullLinear,
            ManifoldKind::Circle,
            ManifoldKind::Sphere2,
            ManifoldKind::UnitaryU1,
            ManifoldKind::SpecialUnitarySU2,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

type PathFn = Box<dyn Fn(f64) -> Vec<C64> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    kind: ManifoldKind,
    ambient: Ambient,
    basepoint: Vec<C64>,
    /// Translation `N' = N - offset`; `None` for untranslated kinds.
    offset: Option<Vec<C64>>,
    tolerance: f64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl ManifoldSpec {
    const DEFAULT_TOLERANCE: f64 = 1e-10;

    fn plain(kind: ManifoldKind, ambient: Ambient, basepoint: Vec<C64>) -> Self {
        Self {
            kind,
            ambient,
            basepoint,
            offset: None,
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    /// The whole ambient, based at zero.
    pub fn full_linear(ambient: Ambient) -> Self {
        Self::plain(ManifoldKind::FullLinear, ambient, ambient.zero())
    }

    /// Unit circle in `ℂ`, based at 1.
    pub fn circle() -> Self {
        Self::plain(ManifoldKind::Circle, Ambient::Complex(1), vec![c(1.0, 0.0)])
    }

    /// Unit sphere, based at the north pole `(0, 0, 1)`.
    pub fn sphere2() -> Self {
        let b = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        Self::plain(ManifoldKind::Sphere2, Ambient::Real(3), b)
    }

    pub fn unitary_u1() -> Self {
        Self::plain(ManifoldKind::UnitaryU1, Ambient::Matrix(1), vec![c(1.0, 0.0)])
    }

    pub fn su2() -> Self {
        let id = Ambient::Matrix(2).identity().unwrap();
        Self::plain(ManifoldKind::SpecialUnitarySU2, Ambient::Matrix(2), id)
    }

    /// `N - b` where `b` is the current basepoint, so the new basepoint is
    /// the ambient zero.
    pub fn translated(&self) -> Self {
        let offset = self.inner(&self.basepoint);
        Self {
            kind: self.kind,
            ambient: self.ambient,
            basepoint: self.ambient.zero(),
            offset: Some(offset),
            tolerance: self.tolerance,
        }
    }

    /// Moves the basepoint to another point of `N`.
    pub fn with_basepoint(mut self, basepoint: Vec<C64>) -> Result<Self> {
        if basepoint.len() != self.ambient.dim() {
            return Err(Error::Shape("basepoint has the wrong dimension".into()));
        }
        let d = self.distance_to(&basepoint);
        if d > self.tolerance {
            return Err(Error::Construction(format!(
                "basepoint lies {d:e} away from the manifold"
            )));
        }
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn is_translated(&self) -> bool {
        self.offset.is_some()
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn basepoint(&self) -> &[C64] {
        &self.basepoint
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn inner(&self, x: &[C64]) -> Vec<C64> {
        match &self.offset {
            Some(o) => x.iter().zip(o).map(|(a, b)| a + b).collect(),
            None => x.to_vec(),
        }
    }

    fn outer(&self, y: Vec<C64>) -> Vec<C64> {
        match &self.offset {
            Some(o) => y.iter().zip(o).map(|(a, b)| a - b).collect(),
            None => y,
        }
    }

    /// Nearest-point retraction onto `N`. SU(2) uses the unitary polar
    /// factor normalized to determinant one.
    pub fn project(&self, x: &[C64]) -> Result<Vec<C64>> {
        let y = self.inner(x);
        let p = match self.kind {
            ManifoldKind::FullLinear => y,
            ManifoldKind::Circle | ManifoldKind::UnitaryU1 => {
                let r = y[0].norm();
                if r < 1e-300 {
                    return Err(Error::SingularProjection { norm: r });
                }
                vec![y[0] / r]
            }
            ManifoldKind::Sphere2 => {
                let r = real_norm(&y);
                if r < 1e-300 {
                    return Err(Error::SingularProjection { norm: r });
                }
                y.iter().map(|z| c(z.re / r, 0.0)).collect()
            }
            ManifoldKind::SpecialUnitarySU2 => from_m2(&su2_polar(&to_m2(&y))?),
        };
        Ok(self.outer(p))
    }

    /// Exact ambient distance from `x` to `N`.
    pub fn distance_to(&self, x: &[C64]) -> f64 {
        let y = self.inner(x);
        match self.kind {
            ManifoldKind::FullLinear => 0.0,
            ManifoldKind::Circle | ManifoldKind::UnitaryU1 => (y[0].norm() - 1.0).abs(),
            ManifoldKind::Sphere2 => {
                let im: f64 = y.iter().map(|z| z.im * z.im).sum();
                ((real_norm(&y) - 1.0).powi(2) + im).sqrt()
            }
            ManifoldKind::SpecialUnitarySU2 => su2_distance(&to_m2(&y)),
        }
    }

    /// Max distance to `N` over the samples.
    pub fn membership_defect(&self, sampled: &SampledLoop) -> f64 {
        sampled.iter().map(|v| self.distance_to(v)).fold(0.0, f64::max)
    }

    /// Orthogonal projection of `v` onto `T_p N`, for `p ∈ N`.
    pub fn tangent_projection(&self, p: &[C64], v: &[C64]) -> Vec<C64> {
        let q = self.inner(p);
        match self.kind {
            ManifoldKind::FullLinear => v.to_vec(),
            ManifoldKind::Circle | ManifoldKind::UnitaryU1 => {
                let u = q[0] / q[0].norm();
                vec![u * c(0.0, (u.conj() * v[0]).im)]
            }
            ManifoldKind::Sphere2 => {
                let r = real_norm(&q);
                let dot: f64 = q.iter().zip(v).map(|(a, b)| a.re * b.re).sum::<f64>() / (r * r);
                q.iter().zip(v).map(|(a, b)| c(b.re - dot * a.re, 0.0)).collect()
            }
            ManifoldKind::SpecialUnitarySU2 => {
                let u = to_m2(&q);
                let a = u.adjoint() * to_m2(v);
                let mut s = (a - a.adjoint()) * c(0.5, 0.0);
                let tr = s.trace() * c(0.5, 0.0);
                s -= Matrix2::identity() * tr;
                from_m2(&(u * s))
            }
        }
    }

    pub fn tangency_defect(&self, p: &[C64], v: &[C64]) -> f64 {
        let t = self.tangent_projection(p, v);
        v.iter().zip(&t).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max tangency defect of a field along a loop.
    pub fn field_tangency_defect(&self, gamma: &SampledLoop, field: &SampledLoop) -> Result<f64> {
        gamma.ensure_compatible(field)?;
        Ok((0..gamma.len())
            .map(|j| self.tangency_defect(gamma.get(j), field.get(j)))
            .fold(0.0, f64::max))
    }

    fn check_field(&self, gamma: &SampledLoop, field: &SampledLoop, tol: f64) -> Result<()> {
        let on_n = self.membership_defect(gamma);
        if on_n > tol {
            return Err(Error::Precondition(format!(
                "loop is {on_n:e} away from the manifold"
            )));
        }
        let defect = self.field_tangency_defect(gamma, field)?;
        let budget = tol * field.sup_norm().max(1.0);
        if defect > budget {
            return Err(Error::NotTangent {
                defect,
                tolerance: budget,
            });
        }
        Ok(())
    }

    /// `∇^N X / ds`: the tangential part of the spectral derivative of `X`.
    pub fn covariant_derivative(&self, gamma: &SampledLoop, field: &SampledLoop) -> Result<SampledLoop> {
        self.covariant_derivative_with_tolerance(gamma, field, DEFAULT_TANGENCY_TOLERANCE)
    }

    pub fn covariant_derivative_with_tolerance(
        &self,
        gamma: &SampledLoop,
        field: &SampledLoop,
        tol: f64,
    ) -> Result<SampledLoop> {
        self.ambient.ensure_same(&gamma.ambient())?;
        self.check_field(gamma, field, tol)?;
        let d = sampled_derivative(field);
        Ok(d.map(|j, v| self.tangent_projection(gamma.get(j), v)))
    }

    /// Canonical path `w ∈ [0, 1] ↦ N` from the basepoint to `x`.
    pub fn canonical_path(&self, x: &[C64]) -> Result<PathFn> {
        let b = self.inner(&self.basepoint);
        let y = self.inner(x);
        let offset = self.offset.clone();
        let raw = raw_path(self.kind, b, y)?;
        Ok(match offset {
            None => raw,
            Some(o) => Box::new(move |w| raw(w).iter().zip(&o).map(|(a, b)| a - b).collect()),
        })
    }

    /// A null-homotopic smooth loop `τ` with `τ(0) = τ(1) = basepoint`,
    /// `τ(1/2) = x` and `τ̇(1/2) = v`.
    ///
    /// Built as the canonical path eased by `sin²(πu)`, plus `v` times a
    /// bump with unit slope at `u = 1/2`, then retracted onto `N`.
    pub fn bridge_loop(&self, x: &[C64], v: &[C64], sample_count: usize) -> Result<SampledLoop> {
        let d = self.ambient.dim();
        if x.len() != d || v.len() != d {
            return Err(Error::Shape("bridge data has the wrong dimension".into()));
        }
        if sample_count < 4 {
            return Err(Error::Resolution("a bridge needs at least 4 samples".into()));
        }
        let off = self.distance_to(x);
        if off > self.tolerance.max(1e-9) {
            return Err(Error::Construction(format!(
                "target point is {off:e} away from the manifold"
            )));
        }
        let defect = self.tangency_defect(x, v);
        let budget = DEFAULT_TANGENCY_TOLERANCE * self.ambient.norm(v).max(1.0);
        if defect > budget {
            return Err(Error::NotTangent {
                defect,
                tolerance: budget,
            });
        }
        let path = self.canonical_path(x)?;
        let mut samples = Vec::with_capacity(sample_count * d);
        for j in 0..sample_count {
            let u = j as f64 / sample_count as f64;
            let ease = (PI * u).sin().powi(2);
            let bump = -(2.0 * PI * u).sin() / (2.0 * PI);
            let raw: Vec<C64> = path(ease).iter().zip(v).map(|(p, t)| p + t * bump).collect();
            samples.extend(self.project(&raw)?);
        }
        SampledLoop::new(self.ambient, samples)
    }

    pub fn to_json(&self) -> Value {
        let kind = match self.offset {
            Some(_) => format!("translated-{}", self.kind.name()),
            None => self.kind.name().to_string(),
        };
        let point = self.offset.as_deref().unwrap_or(&self.basepoint);
        let mut coords: Vec<f64> = point.iter().map(|z| z.re).collect();
        if !self.ambient.is_real() {
            coords.extend(point.iter().map(|z| z.im));
        }
        json!({
            "kind": kind,
            "ambient_dim": self.ambient.dim(),
            "basepoint": coords,
            "tolerance": self.tolerance,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    /// Parses `{"kind", "ambient_dim", "basepoint", "tolerance"}`. For a
    /// translated kind the basepoint is the point of the untranslated
    /// manifold that moves to zero.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("manifold must be a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "kind" | "ambient_dim" | "basepoint" | "tolerance") {
                return Err(Error::Parse(format!("unknown manifold key {key:?}")));
            }
        }
        let kind_name = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("\"kind\" must be a string".into()))?;
        let (translated, base_name) = match kind_name.strip_prefix("translated-") {
            Some(rest) => (true, rest),
            None => (false, kind_name),
        };
        let kind = ManifoldKind::from_name(base_name)
            .ok_or_else(|| Error::Parse(format!("unknown manifold kind {kind_name:?}")))?;
        let dim = obj
            .get("ambient_dim")
            .and_then(Value::as_u64)
            .filter(|&d| (1..=1 << 16).contains(&d))
            .ok_or_else(|| Error::Parse("\"ambient_dim\" must be a positive integer".into()))?
            as usize;
        let coords = obj
            .get("basepoint")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("\"basepoint\" must be an array".into()))?
            .iter()
            .map(|x| {
                x.as_f64()
                    .filter(|f| f.is_finite())
                    .ok_or_else(|| Error::Parse("basepoint entries must be finite numbers".into()))
            })
            .collect::<Result<Vec<f64>>>()?;
        let tolerance = obj
            .get("tolerance")
            .and_then(Value::as_f64)
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| Error::Parse("\"tolerance\" must be a positive number".into()))?;

        let mut spec = match kind {
            ManifoldKind::FullLinear => {
                if coords.len() == dim {
                    Self::full_linear(Ambient::Real(dim))
                } else if coords.len() == 2 * dim {
                    Self::full_linear(Ambient::Complex(dim))
                } else {
                    return Err(Error::Parse("basepoint length matches neither R^d nor C^d".into()));
                }
            }
            ManifoldKind::Circle => Self::circle(),
            ManifoldKind::Sphere2 => Self::sphere2(),
            ManifoldKind::UnitaryU1 => Self::unitary_u1(),
            ManifoldKind::SpecialUnitarySU2 => Self::su2(),
        };
        if spec.ambient.dim() != dim {
            return Err(Error::Parse(format!(
                "{kind_name} lives in dimension {}, not {dim}",
                spec.ambient.dim()
            )));
        }
        let point: Vec<C64> = if spec.ambient.is_real() {
            if coords.len() != dim {
                return Err(Error::Parse("basepoint has the wrong length".into()));
            }
            coords.iter().map(|&x| c(x, 0.0)).collect()
        } else {
            if coords.len() != 2 * dim {
                return Err(Error::Parse("basepoint has the wrong length".into()));
            }
            (0..dim).map(|k| c(coords[k], coords[dim + k])).collect()
        };
        spec.tolerance = tolerance;
        spec = spec
            .with_basepoint(point)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok(if translated { spec.translated() } else { spec })
    }
}

fn real_norm(y: &[C64]) -> f64 {
    y.iter().map(|z| z.re * z.re).sum::<f64>().sqrt()
}

fn raw_path(kind: ManifoldKind, b: Vec<C64>, x: Vec<C64>) -> Result<PathFn> {
    const EDGE: f64 = 1e-9;
    let unreachable =
        || Error::Construction("point is antipodal to the basepoint, outside the chart".into());
    Ok(match kind {
        ManifoldKind::FullLinear => Box::new(move |w| {
            b.iter().zip(&x).map(|(p, q)| p + (q - p) * w).collect()
        }),
        ManifoldKind::Circle | ManifoldKind::UnitaryU1 => {
            let theta = (x[0] / b[0]).arg();
            if theta.abs() > PI - EDGE {
                return Err(unreachable());
            }
            Box::new(move |w| vec![b[0] * C64::from_polar(1.0, w * theta)])
        }
        ManifoldKind::Sphere2 => {
            let dot: f64 = b.iter().zip(&x).map(|(p, q)| p.re * q.re).sum();
            let theta = dot.clamp(-1.0, 1.0).acos();
            if theta > PI - EDGE {
                return Err(unreachable());
            }
            let axis: Vec<f64> = if theta < 1e-15 {
                vec![0.0; 3]
            } else {
                b.iter()
                    .zip(&x)
                    .map(|(p, q)| (q.re - dot * p.re) / theta.sin())
                    .collect()
            };
            Box::new(move |w| {
                let (s, co) = (w * theta).sin_cos();
                b.iter().zip(&axis).map(|(p, a)| c(co * p.re + s * a, 0.0)).collect()
            })
        }
        ManifoldKind::SpecialUnitarySU2 => {
            let bm = to_m2(&b);
            let delta = bm.adjoint() * to_m2(&x);
            let cos_t = (delta.trace().re * 0.5).clamp(-1.0, 1.0);
            let theta = cos_t.acos();
            if theta > PI - EDGE {
                return Err(unreachable());
            }
            let k = if theta < 1e-15 {
                Matrix2::zeros()
            } else {
                (delta - Matrix2::identity() * c(cos_t, 0.0)) / c(theta.sin(), 0.0)
            };
            Box::new(move |w| {
                let (s, co) = (w * theta).sin_cos();
                from_m2(&(bm * (Matrix2::identity() * c(co, 0.0) + k * c(s, 0.0))))
            })
        }
    })
}

fn to_m2(x: &[C64]) -> Matrix2<C64> {
    Matrix2::new(x[0], x[1], x[2], x[3])
}

fn from_m2(m: &Matrix2<C64>) -> Vec<C64> {
    vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// Unitary polar factor by Newton's iteration `X ← (X + X^{-*}) / 2`,
/// divided by the principal square root of its determinant.
fn su2_polar(a: &Matrix2<C64>) -> Result<Matrix2<C64>> {
    let scale = a.norm();
    let det = a.determinant().norm();
    if scale < 1e-300 || det < 1e-12 * scale * scale {
        return Err(Error::SingularProjection { norm: scale });
    }
    let mut x = *a;
    for _ in 0..100 {
        let inv = x
            .try_inverse()
            .ok_or(Error::SingularProjection { norm: scale })?;
        let next = (x + inv.adjoint()) * c(0.5, 0.0);
        let step = (next - x).norm();
        x = next;
        if step < 1e-15 {
            break;
        }
    }
    let root = x.determinant().sqrt();
    Ok(x / root)
}

/// SU(2) is the sphere of Frobenius radius √2 in the quaternion subspace
/// `{[[a, -b̄], [b, ā]]}`, which gives the distance in closed form.
fn su2_distance(m: &Matrix2<C64>) -> f64 {
    let a = (m[(0, 0)] + m[(1, 1)].conj()) * 0.5;
    let b = (m[(1, 0)] - m[(0, 1)].conj()) * 0.5;
    let q = Matrix2::new(a, -b.conj(), b, a.conj());
    let q_norm = q.norm();
    ((m - q).norm_squared() + (q_norm - 2f64.sqrt()).powi(2)).sqrt()
}
