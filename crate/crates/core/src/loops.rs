//! Loop representations: truncated Fourier series and uniform samples.
//!
//! A [`FourierLoop`] stores the coefficients `f_n` for `n ∈ [-N, N]`, mode
//! major; a [`SampledLoop`] stores values at `t_j = j / M`, `j = 0..M`, with
//! the periodic endpoint implicit.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::ambient::{Ambient, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop {
    ambient: Ambient,
    cutoff: usize,
    coeffs: Vec<C64>,
}

impl FourierLoop {
    pub fn zero(ambient: Ambient, cutoff: usize) -> Self {
        let len = (2 * cutoff + 1) * ambient.dim();
        Self {
            ambient,
            cutoff,
            coeffs: vec![C64::new(0.0, 0.0); len],
        }
    }

    /// Builds a loop mode by mode; `f(n)` must return `ambient.dim()` values.
    pub fn from_fn(ambient: Ambient, cutoff: usize, mut f: impl FnMut(i64) -> Vec<C64>) -> Self {
        let mut out = Self::zero(ambient, cutoff);
        for n in out.modes() {
            let v = f(n);
            assert_eq!(v.len(), ambient.dim(), "coefficient has wrong dimension");
            out.coeff_mut(n).copy_from_slice(&v);
        }
        out
    }

    /// A loop with a single nonzero mode.
    pub fn single_mode(ambient: Ambient, cutoff: usize, n: i64, value: &[C64]) -> Self {
        let mut out = Self::zero(ambient, cutoff);
        out.coeff_mut(n).copy_from_slice(value);
        out
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let n = self.cutoff as i64;
        -n..=n
    }

    fn offset(&self, n: i64) -> usize {
        let n_max = self.cutoff as i64;
        assert!(n.abs() <= n_max, "mode {n} outside [-{n_max}, {n_max}]");
        (n + n_max) as usize * self.ambient.dim()
    }

    pub fn coeff(&self, n: i64) -> &[C64] {
        let o = self.offset(n);
        &self.coeffs[o..o + self.ambient.dim()]
    }

    pub fn coeff_mut(&mut self, n: i64) -> &mut [C64] {
        let o = self.offset(n);
        let d = self.ambient.dim();
        &mut self.coeffs[o..o + d]
    }

    /// Zero outside the band, so any mode may be queried.
    pub fn coeff_or_zero(&self, n: i64) -> Vec<C64> {
        if n.unsigned_abs() as usize <= self.cutoff {
            self.coeff(n).to_vec()
        } else {
            self.ambient.zero()
        }
    }

    /// Re-bands the loop, dropping or zero-padding modes.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut out = Self::zero(self.ambient, cutoff);
        let common = cutoff.min(self.cutoff) as i64;
        for n in -common..=common {
            out.coeff_mut(n).copy_from_slice(self.coeff(n));
        }
        out
    }

    pub fn ensure_compatible(&self, other: &FourierLoop) -> Result<()> {
        self.ambient.ensure_same(&other.ambient)?;
        if self.cutoff != other.cutoff {
            return Err(Error::Shape(format!(
                "cutoffs differ: {} vs {}",
                self.cutoff, other.cutoff
            )));
        }
        Ok(())
    }

    pub fn map_modes(&self, mut f: impl FnMut(i64, C64) -> C64) -> Self {
        let mut out = self.clone();
        for n in self.modes() {
            for c in out.coeff_mut(n) {
                *c = f(n, *c);
            }
        }
        out
    }

    pub fn scale(&self, a: C64) -> Self {
        self.map_modes(|_, c| c * a)
    }

    /// `self + a·other`; panics on incompatible loops.
    pub fn axpy(&self, a: C64, other: &FourierLoop) -> Self {
        self.ensure_compatible(other).expect("axpy on incompatible loops");
        let mut out = self.clone();
        for (x, y) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
        out
    }

    pub fn sub(&self, other: &FourierLoop) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// Largest violation of `f_{-n} = conj(f_n)`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        self.modes()
            .filter(|&n| n >= 0)
            .flat_map(|n| {
                self.coeff(n)
                    .iter()
                    .zip(self.coeff(-n))
                    .map(|(a, b)| (a - b.conj()).norm())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    /// `{"cutoff": N, "ambient_dim": d, "coeffs": [[n, re..., im...], ...]}`,
    /// all modes written in ascending order.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .modes()
            .map(|n| {
                let c = self.coeff(n);
                let mut row = Vec::with_capacity(1 + 2 * c.len());
                row.push(json!(n));
                row.extend(c.iter().map(|z| json!(z.re)));
                row.extend(c.iter().map(|z| json!(z.im)));
                Value::Array(row)
            })
            .collect();
        json!({
            "cutoff": self.cutoff,
            "ambient_dim": self.ambient.dim(),
            "coeffs": rows,
        })
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    /// Parses the JSON form. The file only records the coordinate count, so
    /// the result lives in `C^d`; see [`FourierLoop::reinterpret`]. Missing
    /// modes are zero.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "cutoff" | "ambient_dim" | "coeffs") {
                return Err(Error::Parse(format!("unknown key {key:?}")));
            }
        }
        let get_usize = |key: &str| -> Result<usize> {
            obj.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("{key:?} must be a nonnegative integer")))
        };
        let cutoff = get_usize("cutoff")?;
        let dim = get_usize("ambient_dim")?;
        if dim == 0 {
            return Err(Error::Parse("ambient_dim must be positive".into()));
        }
        // Guard the allocation against absurd headers.
        if cutoff > 1 << 24 || dim > 1 << 12 || (2 * cutoff + 1).saturating_mul(dim) > 1 << 26 {
            return Err(Error::Parse("loop too large".into()));
        }
        let rows = obj
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("\"coeffs\" must be an array".into()))?;
        let mut out = Self::zero(Ambient::Complex(dim), cutoff);
        let mut last: Option<i64> = None;
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse("coefficient row must be an array".into()))?;
            if row.len() != 1 + 2 * dim {
                return Err(Error::Parse(format!(
                    "coefficient row has {} entries, expected {}",
                    row.len(),
                    1 + 2 * dim
                )));
            }
            let n = row[0]
                .as_i64()
                .ok_or_else(|| Error::Parse("mode index must be an integer".into()))?;
            if n.unsigned_abs() as usize > cutoff {
                return Err(Error::Parse(format!("mode {n} outside the cutoff {cutoff}")));
            }
            if last.is_some_and(|m| m >= n) {
                return Err(Error::Parse("modes must be strictly ascending".into()));
            }
            last = Some(n);
            let num = |x: &Value| -> Result<f64> {
                x.as_f64()
                    .filter(|f| f.is_finite())
                    .ok_or_else(|| Error::Parse("coefficient must be a finite number".into()))
            };
            let c = out.coeff_mut(n);
            for k in 0..dim {
                c[k] = C64::new(num(&row[1 + k])?, num(&row[1 + dim + k])?);
            }
        }
        Ok(out)
    }

    /// Reads the same coefficients in another ambient with the same
    /// coordinate count.
    pub fn reinterpret(mut self, ambient: Ambient) -> Result<Self> {
        if ambient.dim() != self.ambient.dim() {
            return Err(Error::AmbientMismatch {
                left: self.ambient.to_string(),
                right: ambient.to_string(),
            });
        }
        self.ambient = ambient;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledLoop {
    ambient: Ambient,
    samples: Vec<C64>,
}

impl SampledLoop {
    pub fn new(ambient: Ambient, samples: Vec<C64>) -> Result<Self> {
        ambient.check()?;
        let d = ambient.dim();
        if !samples.len().is_multiple_of(d) {
            return Err(Error::Shape(format!(
                "{} values is not a multiple of the dimension {d}",
                samples.len()
            )));
        }
        if samples.len() / d < 2 {
            return Err(Error::Shape("a sampled loop needs at least 2 samples".into()));
        }
        Ok(Self { ambient, samples })
    }

    /// Samples `f(t_j)` at `t_j = j / count`.
    pub fn from_fn(ambient: Ambient, count: usize, mut f: impl FnMut(f64) -> Vec<C64>) -> Self {
        let mut samples = Vec::with_capacity(count * ambient.dim());
        for j in 0..count {
            let v = f(j as f64 / count as f64);
            assert_eq!(v.len(), ambient.dim(), "sample has wrong dimension");
            samples.extend(v);
        }
        Self::new(ambient, samples).expect("valid sampled loop")
    }

    /// Real-valued convenience constructor.
    pub fn from_real_fn(ambient: Ambient, count: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Self {
        Self::from_fn(ambient, count, |t| {
            f(t).into_iter().map(|x| C64::new(x, 0.0)).collect()
        })
    }

    pub fn constant(ambient: Ambient, count: usize, value: &[C64]) -> Self {
        Self::from_fn(ambient, count, |_| value.to_vec())
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.samples.len() / self.ambient.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 / self.len() as f64
    }

    pub fn get(&self, j: usize) -> &[C64] {
        let d = self.ambient.dim();
        &self.samples[j * d..(j + 1) * d]
    }

    pub fn get_mut(&mut self, j: usize) -> &mut [C64] {
        let d = self.ambient.dim();
        &mut self.samples[j * d..(j + 1) * d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[C64]> {
        self.samples.chunks(self.ambient.dim())
    }

    pub fn raw(&self) -> &[C64] {
        &self.samples
    }

    pub fn ensure_compatible(&self, other: &SampledLoop) -> Result<()> {
        self.ambient.ensure_same(&other.ambient)?;
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "sample counts differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &SampledLoop) -> Result<SampledLoop> {
        self.ensure_compatible(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        SampledLoop::new(self.ambient, samples)
    }

    pub fn map(&self, mut f: impl FnMut(usize, &[C64]) -> Vec<C64>) -> SampledLoop {
        let samples = self.iter().enumerate().flat_map(|(j, v)| f(j, v)).collect();
        SampledLoop::new(self.ambient, samples).expect("map preserves shape")
    }

    /// Rectangle-rule L² norm, exact for band-limited loops.
    pub fn l2_norm(&self) -> f64 {
        let total: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        (total / self.len() as f64).sqrt()
    }

    pub fn l2_distance(&self, other: &SampledLoop) -> Result<f64> {
        Ok(self.sub(other)?.l2_norm())
    }

    pub fn sup_norm(&self) -> f64 {
        self.iter().map(|v| self.ambient.norm(v)).fold(0.0, f64::max)
    }

    /// CSV with header `t,comp_0,...`. Real ambients write one column per
    /// coordinate; complex and matrix ambients write the real parts of all
    /// coordinates followed by the imaginary parts.
    pub fn to_csv(&self) -> String {
        let d = self.ambient.dim();
        let cols = if self.ambient.is_real() { d } else { 2 * d };
        let mut out = String::from("t");
        for k in 0..cols {
            write!(out, ",comp_{k}").unwrap();
        }
        out.push('\n');
        for (j, v) in self.iter().enumerate() {
            write!(out, "{}", self.time(j)).unwrap();
            for z in v {
                write!(out, ",{}", z.re).unwrap();
            }
            if !self.ambient.is_real() {
                for z in v {
                    write!(out, ",{}", z.im).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`SampledLoop::to_csv`]. The `t` column must be the uniform
    /// grid `j / M`.
    pub fn from_csv(text: &str, ambient: Ambient) -> Result<Self> {
        ambient.check()?;
        let d = ambient.dim();
        let cols = if ambient.is_real() { d } else { 2 * d };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let expected: Vec<String> = std::iter::once("t".to_string())
            .chain((0..cols).map(|k| format!("comp_{k}")))
            .collect();
        let got: Vec<&str> = header.split(',').map(str::trim).collect();
        if got != expected {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != cols + 1 {
                return Err(Error::Parse(format!(
                    "row {row} has {} fields, expected {}",
                    fields.len(),
                    cols + 1
                )));
            }
            let vals = fields
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::Parse(format!("row {row}: bad number {f:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            times.push(vals[0]);
            if ambient.is_real() {
                samples.extend(vals[1..].iter().map(|&x| C64::new(x, 0.0)));
            } else {
                samples.extend((0..d).map(|k| C64::new(vals[1 + k], vals[1 + d + k])));
            }
        }
        let m = times.len();
        for (j, &t) in times.iter().enumerate() {
            let expected = j as f64 / m as f64;
            if (t - expected).abs() > 1e-9 {
                return Err(Error::Parse(format!(
                    "row {j}: time {t} is not on the uniform grid (expected {expected})"
                )));
            }
        }
        SampledLoop::new(ambient, samples).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn json_layout_is_mode_sorted() {
        let mut f = FourierLoop::zero(Ambient::Complex(2), 1);
        f.coeff_mut(-1).copy_from_slice(&[c(1.0, 2.0), c(3.0, 4.0)]);
        let v = f.to_json();
        assert_eq!(v["cutoff"], 1);
        assert_eq!(v["ambient_dim"], 2);
        assert_eq!(v["coeffs"][0], json!([-1, 1.0, 3.0, 2.0, 4.0]));
        assert_eq!(v["coeffs"][2][0], 1);
    }

    #[test]
    fn json_rejects_unsorted_and_out_of_band() {
        let unsorted = r#"{"cutoff":2,"ambient_dim":1,"coeffs":[[1,0,0],[0,1,0]]}"#;
        assert!(FourierLoop::from_json_str(unsorted).is_err());
        let outside = r#"{"cutoff":1,"ambient_dim":1,"coeffs":[[2,0,0]]}"#;
        assert!(FourierLoop::from_json_str(outside).is_err());
        let short = r#"{"cutoff":1,"ambient_dim":2,"coeffs":[[0,1,0]]}"#;
        assert!(FourierLoop::from_json_str(short).is_err());
        let extra = r#"{"cutoff":1,"ambient_dim":1,"coeffs":[],"x":1}"#;
        assert!(FourierLoop::from_json_str(extra).is_err());
    }

    #[test]
    fn sparse_json_fills_zeros() {
        let text = r#"{"cutoff":3,"ambient_dim":1,"coeffs":[[2,0.5,-1]]}"#;
        let f = FourierLoop::from_json_str(text).unwrap();
        assert_eq!(f.coeff(2), &[c(0.5, -1.0)]);
        assert_eq!(f.coeff(0), &[c(0.0, 0.0)]);
    }

    #[test]
    fn csv_header_and_grid_check() {
        let g = SampledLoop::from_real_fn(Ambient::Real(2), 4, |t| vec![t, 1.0 - t]);
        let text = g.to_csv();
        assert!(text.starts_with("t,comp_0,comp_1\n0,0,1\n0.25,0.25,0.75\n"));
        assert_eq!(SampledLoop::from_csv(&text, Ambient::Real(2)).unwrap(), g);
        let shifted = text.replace("0.25,0.25", "0.3,0.25");
        assert!(SampledLoop::from_csv(&shifted, Ambient::Real(2)).is_err());
    }

    #[test]
    fn complex_csv_splits_real_and_imaginary_parts() {
        let g = SampledLoop::from_fn(Ambient::Complex(1), 2, |t| vec![c(t, -t)]);
        let text = g.to_csv();
        assert_eq!(text, "t,comp_0,comp_1\n0,0,-0\n0.5,0.5,-0.5\n");
        assert_eq!(SampledLoop::from_csv(&text, Ambient::Complex(1)).unwrap(), g);
    }

    #[test]
    fn sampled_loop_shape_errors() {
        assert!(SampledLoop::new(Ambient::Real(2), vec![c(0.0, 0.0); 3]).is_err());
        assert!(SampledLoop::new(Ambient::Real(1), vec![c(0.0, 0.0)]).is_err());
        let a = SampledLoop::constant(Ambient::Real(1), 4, &[c(1.0, 0.0)]);
        let b = SampledLoop::constant(Ambient::Real(1), 5, &[c(1.0, 0.0)]);
        assert!(matches!(a.sub(&b), Err(Error::Shape(_))));
    }
}
