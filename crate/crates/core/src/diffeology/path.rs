//! Piecewise-linear paths in plot domains and their arc length.

use std::sync::OnceLock;

use super::Plot;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

const GL_POINTS: usize = 16;

fn rule() -> &'static GaussLegendre {
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(GL_POINTS))
}

/// Nodes joined by straight segments; segment `k` is traversed in time
/// proportional to `1 / speeds[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    pub nodes: Vec<Vec<f64>>,
    pub speeds: Vec<f64>,
}

impl DiscretePath {
    pub fn new(nodes: Vec<Vec<f64>>) -> Result<Self> {
        let speeds = vec![1.0; nodes.len().saturating_sub(1)];
        Self::with_speeds(nodes, speeds)
    }

    pub fn with_speeds(nodes: Vec<Vec<f64>>, speeds: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Shape("a path needs at least one node".into()));
        }
        let dim = nodes[0].len();
        if nodes.iter().any(|n| n.len() != dim || n.iter().any(|v| !v.is_finite())) {
            return Err(Error::Shape("path nodes must be finite and of equal length".into()));
        }
        if speeds.len() + 1 != nodes.len() || speeds.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Shape("need one positive speed per segment".into()));
        }
        Ok(Self { nodes, speeds })
    }

    /// Straight path with `segments` equal segments.
    pub fn straight(a: &[f64], b: &[f64], segments: usize) -> Result<Self> {
        let segments = segments.max(1);
        let nodes = (0..=segments)
            .map(|k| {
                let t = k as f64 / segments as f64;
                a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
            })
            .collect();
        Self::new(nodes)
    }

    /// Splits every segment in two.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len());
        let mut speeds = Vec::with_capacity(2 * self.speeds.len());
        for (k, w) in self.nodes.windows(2).enumerate() {
            nodes.push(w[0].clone());
            nodes.push(w[0].iter().zip(&w[1]).map(|(a, b)| 0.5 * (a + b)).collect());
            speeds.extend([self.speeds[k]; 2]);
        }
        nodes.push(self.nodes.last().unwrap().clone());
        Self { nodes, speeds }
    }

    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        let mut speeds = self.speeds.clone();
        speeds.reverse();
        Self { nodes, speeds }
    }

    pub fn start(&self) -> &[f64] {
        &self.nodes[0]
    }

    pub fn end(&self) -> &[f64] {
        self.nodes.last().unwrap()
    }

    /// Certificate CSV `node_index,x_0,...`.
    pub fn to_csv(&self) -> String {
        let dim = self.nodes[0].len();
        let mut out = String::from("node_index");
        for k in 0..dim {
            out.push_str(&format!(",x_{k}"));
        }
        out.push('\n');
        for (i, n) in self.nodes.iter().enumerate() {
            out.push_str(&i.to_string());
            for v in n {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// `∫ ‖γ̇‖_g dt` over the straight segment `a → b` traversed in time
/// `duration`.
pub(crate) fn segment_length(plot: &dyn Plot, a: &[f64], b: &[f64], duration: f64) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (y - x) / duration).collect();
    if d.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let mut x = vec![0.0; a.len()];
    rule().integrate(0.0, duration, |t| {
        let u = t / duration;
        for (k, slot) in x.iter_mut().enumerate() {
            *slot = a[k] + u * (b[k] - a[k]);
        }
        let g = plot.metric(&x);
        let mut q = 0.0;
        for i in 0..d.len() {
            for j in 0..d.len() {
                q += d[i] * g[(i, j)] * d[j];
            }
        }
        q.max(0.0).sqrt()
    })
}

/// `L(γ) = ∫₀¹ ‖γ̇‖ dt`, Gauss–Legendre on each segment.
pub fn arc_length(path: &DiscretePath, plot: &dyn Plot) -> Result<f64> {
    let domain = plot.domain();
    if path.nodes[0].len() != domain.dim() {
        return Err(Error::Shape("path and plot dimensions differ".into()));
    }
    if let Some(bad) = path.nodes.iter().find(|n| !domain.contains(n)) {
        return Err(Error::OutsidePlot(bad.clone()));
    }
    let total_time: f64 = path.speeds.iter().map(|s| 1.0 / s).sum();
    Ok(path
        .nodes
        .windows(2)
        .zip(&path.speeds)
        .map(|(w, s)| segment_length(plot, &w[0], &w[1], 1.0 / s / total_time))
        .sum())
}
