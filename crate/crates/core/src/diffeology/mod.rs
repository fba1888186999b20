//! Riemannian diffeological toolkit: plots carrying pulled-back metrics,
//! arc lengths and pseudo-distances, Hausdorff volumes, and forms.

pub mod distance;
pub mod endpoint;
pub mod forms;
pub mod glued;
pub mod path;
pub mod plots;
pub mod volume;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use distance::{ChartSpace, DistanceEstimate, OptimizerBudget, PseudoDistance};
pub use endpoint::{endpoint_lower_bound_check, EndpointReport};
pub use forms::{wedge_defect, Form};
pub use glued::{d_topology_separation_witness, glued_lines_distance, GluedLinesPoint, GluedLinesSpace};
pub use path::{arc_length, DiscretePath};
pub use plots::{FlatChart, MobiusPlot, SphereExpChart};
pub use volume::{hausdorff_volume, hausdorff_volume_over, VolumeReport};

/// Axis-aligned closed box in `ℝ^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Shape("box corners must have the same positive length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a.partial_cmp(b) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::Shape("box must have positive extent on every axis".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn contains_box(&self, other: &DomainBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (a, b)) in x.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*a, *b);
        }
    }

    /// Splits at `at` along `axis`.
    pub fn split(&self, axis: usize, at: f64) -> Result<(DomainBox, DomainBox)> {
        if axis >= self.dim() || !(self.lo[axis] < at && at < self.hi[axis]) {
            return Err(Error::Precondition("split point must be interior".into()));
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[axis] = at;
        right.lo[axis] = at;
        Ok((left, right))
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// A plot `p : O_p → X` with the pulled-back metric `g_p`.
pub trait Plot: Sync {
    fn domain(&self) -> &DomainBox;

    fn dim(&self) -> usize {
        self.domain().dim()
    }

    /// `g_p(x)` as a symmetric matrix; `x` is assumed inside the domain.
    fn metric(&self, x: &[f64]) -> DMatrix<f64>;

    /// Coordinates of `p(x)` when the target has them.
    fn evaluate(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Jacobian of [`Plot::evaluate`], by central differences unless
    /// overridden.
    fn jacobian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        fd_jacobian(|y| self.evaluate(y), x, 1e-6)
    }
}

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Option<Vec<f64>>, x: &[f64], h: f64) -> Option<DMatrix<f64>> {
    let m = f(x)?.len();
    let mut jac = DMatrix::zeros(m, x.len());
    let mut y = x.to_vec();
    for k in 0..x.len() {
        y[k] = x[k] + h;
        let plus = f(&y)?;
        y[k] = x[k] - h;
        let minus = f(&y)?;
        y[k] = x[k];
        for i in 0..m {
            jac[(i, k)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Some(jac)
}

fn check_point(plot: &dyn Plot, x: &[f64]) -> Result<()> {
    if plot.domain().contains(x) {
        Ok(())
    } else {
        Err(Error::OutsidePlot(x.to_vec()))
    }
}

/// `g_p(x)(u, v)`.
pub fn pullback_metric(plot: &dyn Plot, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    check_point(plot, x)?;
    let n = plot.dim();
    if u.len() != n || v.len() != n {
        return Err(Error::Shape(format!("tangent vectors must have length {n}")));
    }
    let g = plot.metric(x);
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += u[i] * g[(i, j)] * v[j];
        }
    }
    Ok(acc)
}
