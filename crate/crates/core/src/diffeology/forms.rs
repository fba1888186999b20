//! Constant-coefficient exterior forms at a point, and the check
//! `α_p ∧ p*β = ω_p` for `(∞ - q)`-forms.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::Plot;
use crate::error::{Error, Result};

/// `Σ_I c_I dx^I` on `ℝ^dim`, keyed by strictly increasing index lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

/// Sorts `idx` in place; returns the permutation sign, or 0 on a repeat.
fn sort_sign(idx: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0.0
    } else {
        sign
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut f = Self::zero(dim, 0);
        f.coeffs.insert(Vec::new(), c);
        f
    }

    /// `c · dx^{i_1} ∧ … ∧ dx^{i_k}` in any index order.
    pub fn basis(dim: usize, indices: &[usize], c: f64) -> Result<Self> {
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::Shape(format!("form index out of range for dimension {dim}")));
        }
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        let mut f = Self::zero(dim, indices.len());
        if sign != 0.0 && c != 0.0 {
            f.coeffs.insert(idx, sign * c);
        }
        Ok(f)
    }

    /// `c · dx^0 ∧ … ∧ dx^{dim-1}`
    pub fn volume(dim: usize, c: f64) -> Self {
        Self::basis(dim, &(0..dim).collect::<Vec<_>>(), c).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, indices: &[usize]) -> f64 {
        self.coeffs.get(indices).copied().unwrap_or(0.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= a;
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::Shape("forms must share dimension and degree".into()));
        }
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            *out.coeffs.entry(k.clone()).or_insert(0.0) -= v;
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        if self.dim != other.dim {
            return Err(Error::Shape("forms live on different spaces".into()));
        }
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                let mut idx: Vec<usize> = a.iter().chain(b).copied().collect();
                let sign = sort_sign(&mut idx);
                if sign != 0.0 {
                    *out.coeffs.entry(idx).or_insert(0.0) += sign * x * y;
                }
            }
        }
        Ok(out)
    }

    /// Coefficient of `dx^0 ∧ … ∧ dx^{n-1}` for a top-degree form.
    pub fn top_coefficient(&self) -> Result<f64> {
        if self.degree != self.dim {
            return Err(Error::Shape("not a top-degree form".into()));
        }
        Ok(self.coeff(&(0..self.dim).collect::<Vec<_>>()))
    }

    /// `F*β` for the linear map with Jacobian `jac` (`self.dim × n`):
    /// the coefficient on `dx^K` is `Σ_I β_I det J[I, K]`.
    pub fn pullback(&self, jac: &DMatrix<f64>) -> Result<Form> {
        if jac.nrows() != self.dim {
            return Err(Error::Shape("Jacobian rows must match the form's dimension".into()));
        }
        let n = jac.ncols();
        let k = self.degree;
        let mut out = Self::zero(n, k);
        for cols in subsets(n, k) {
            let mut acc = 0.0;
            for (rows, c) in &self.coeffs {
                let minor = DMatrix::from_fn(k, k, |i, j| jac[(rows[i], cols[j])]);
                let det = if k == 0 { 1.0 } else { minor.determinant() };
                acc += c * det;
            }
            if acc != 0.0 {
                out.coeffs.insert(cols, acc);
            }
        }
        Ok(out)
    }
}

/// Max over a grid of `|(α ∧ p*β - ω)(e_1, …, e_n)|`. `beta` is evaluated
/// at `p(x)` and pulled back through the plot's Jacobian.
pub fn wedge_defect(
    plot: &dyn Plot,
    alpha: impl Fn(&[f64]) -> Form,
    beta: impl Fn(&[f64]) -> Form,
    omega: impl Fn(&[f64]) -> Form,
    resolution: usize,
) -> Result<f64> {
    let domain = plot.domain();
    let n = domain.dim();
    let per_axis = resolution.max(1) + 1;
    let total = per_axis.pow(n as u32);
    let mut worst: f64 = 0.0;
    let mut x = vec![0.0; n];
    for flat in 0..total {
        let mut rest = flat;
        for (k, slot) in x.iter_mut().enumerate() {
            let i = rest % per_axis;
            rest /= per_axis;
            let t = i as f64 / (per_axis - 1) as f64;
            *slot = domain.lo[k] + t * (domain.hi[k] - domain.lo[k]);
        }
        let image = plot
            .evaluate(&x)
            .ok_or_else(|| Error::Precondition("plot cannot be evaluated".into()))?;
        let jac = plot
            .jacobian(&x)
            .ok_or_else(|| Error::Precondition("plot has no Jacobian".into()))?;
        let a = alpha(&x);
        let b = beta(&image).pullback(&jac)?;
        let w = omega(&x);
        if a.degree() + b.degree() != n || w.degree() != n {
            return Err(Error::DegreeMismatch {
                alpha: a.degree(),
                beta: b.degree(),
                omega: w.degree(),
                dim: n,
            });
        }
        let defect = a.wedge(&b)?.sub(&w)?.top_coefficient()?.abs();
        worst = worst.max(defect);
    }
    Ok(worst)
}
