//! Periodic monotone cubic interpolation of sampled loops.
//!
//! Each real coordinate is interpolated separately with Fritsch–Butland
//! slopes, so the interpolant never overshoots the samples.

use crate::ambient::C64;
use crate::loops::SampledLoop;

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    count: usize,
    width: usize,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(sampled: &SampledLoop) -> Self {
        let count = sampled.len();
        let width = 2 * sampled.ambient().dim();
        let values: Vec<f64> = sampled.raw().iter().flat_map(|z| [z.re, z.im]).collect();
        let h = 1.0 / count as f64;
        let mut slopes = vec![0.0; values.len()];
        for j in 0..count {
            let prev = (j + count - 1) % count;
            let next = (j + 1) % count;
            for k in 0..width {
                let y = values[j * width + k];
                let left = (y - values[prev * width + k]) / h;
                let right = (values[next * width + k] - y) / h;
                slopes[j * width + k] = if left * right <= 0.0 {
                    0.0
                } else {
                    2.0 / (1.0 / left + 1.0 / right)
                };
            }
        }
        Self {
            count,
            width,
            values,
            slopes,
        }
    }

    /// Value at loop time `t` (taken modulo 1).
    pub fn eval_into(&self, t: f64, out: &mut [C64]) {
        let m = self.count as f64;
        let x = t.rem_euclid(1.0) * m;
        let mut j = x.floor() as usize;
        let mut u = x - j as f64;
        if j >= self.count {
            j = self.count - 1;
            u = 1.0;
        }
        let next = (j + 1) % self.count;
        let h = 1.0 / m;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let w = self.width;
        for (k, slot) in out.iter_mut().enumerate() {
            let v = |idx: usize, c: usize| {
                let i = idx * w + c;
                (self.values[i], self.slopes[i])
            };
            let mut part = [0.0; 2];
            for (c, p) in part.iter_mut().enumerate() {
                let (y0, m0) = v(j, 2 * k + c);
                let (y1, m1) = v(next, 2 * k + c);
                *p = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
            }
            *slot = C64::new(part[0], part[1]);
        }
    }

    pub fn eval(&self, t: f64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.width / 2];
        self.eval_into(t, &mut out);
        out
    }
}
