//! Upper bounds for the pseudo-distance `d_g(x, y) = inf L(γ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::path::{arc_length, segment_length, DiscretePath};
use super::Plot;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerBudget {
    /// Segments per path.
    pub segments: usize,
    pub restarts: usize,
    pub sweeps: usize,
    /// First coordinate step, relative to the box diagonal.
    pub initial_step: f64,
    /// Descent stops once the step falls below this (absolute).
    pub min_step: f64,
    pub seed: u64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self {
            segments: 32,
            restarts: 4,
            sweeps: 2000,
            initial_step: 0.05,
            min_step: 1e-5,
            seed: 0,
        }
    }
}

/// An upper bound on `d_g(x, y)` and a path realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate<C> {
    pub upper_bound: f64,
    pub certificate: C,
    /// Bound reached by each restart, in restart order.
    pub restart_bounds: Vec<f64>,
}

pub trait PseudoDistance {
    type Point;
    type Certificate;

    fn pseudo_distance(
        &self,
        x: &Self::Point,
        y: &Self::Point,
        budget: &OptimizerBudget,
    ) -> Result<DistanceEstimate<Self::Certificate>>;
}

/// A space covered by a single plot; paths live in the plot's domain.
#[derive(Debug, Clone)]
pub struct ChartSpace<P> {
    pub plot: P,
}

impl<P: Plot> ChartSpace<P> {
    pub fn new(plot: P) -> Self {
        Self { plot }
    }

    fn descend(&self, mut path: DiscretePath, mut step: f64, budget: &OptimizerBudget) -> DiscretePath {
        let domain = self.plot.domain();
        let n = path.nodes.len();
        let len = |a: &[f64], b: &[f64]| segment_length(&self.plot, a, b, 1.0);
        for _ in 0..budget.sweeps {
            let mut gain = 0.0;
            for i in 1..n.saturating_sub(1) {
                for k in 0..domain.dim() {
                    let (prev, next) = (path.nodes[i - 1].clone(), path.nodes[i + 1].clone());
                    let mut old = len(&prev, &path.nodes[i]) + len(&path.nodes[i], &next);
                    for sign in [1.0, -1.0] {
                        // keep walking while the move pays off
                        for _ in 0..64 {
                            let mut trial = path.nodes[i].clone();
                            trial[k] += sign * step;
                            domain.clamp(&mut trial);
                            let new = len(&prev, &trial) + len(&trial, &next);
                            if new < old - 1e-15 {
                                path.nodes[i] = trial;
                                gain += old - new;
                                old = new;
                            } else {
                                break;
                            }
                        }
                    }
                }
            }
            // sliding nodes along a converged path gains almost nothing
            if gain < 1e-12 {
                step *= 0.5;
                if step < budget.min_step {
                    break;
                }
            }
        }
        path
    }

    /// Descends on a 4-segment path, then refines and descends again until
    /// the budgeted segment count is reached.
    fn multilevel(&self, mut path: DiscretePath, budget: &OptimizerBudget) -> DiscretePath {
        let domain = self.plot.domain();
        let diag = domain
            .lo
            .iter()
            .zip(&domain.hi)
            .map(|(a, b)| (b - a).powi(2))
            .sum::<f64>()
            .sqrt();
        let mut step = budget.initial_step * diag;
        loop {
            path = self.descend(path, step, budget);
            if path.speeds.len() * 2 > budget.segments.max(4) {
                return path;
            }
            path = path.refined();
            let longest = path
                .nodes
                .windows(2)
                .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            step = 0.25 * longest;
        }
    }
}

impl<P: Plot> PseudoDistance for ChartSpace<P> {
    type Point = Vec<f64>;
    type Certificate = DiscretePath;

    /// Coordinate descent on the interior nodes of discrete paths, coarse
    /// to fine, from a straight start and randomly perturbed starts run in
    /// parallel.
    fn pseudo_distance(
        &self,
        x: &Vec<f64>,
        y: &Vec<f64>,
        budget: &OptimizerBudget,
    ) -> Result<DistanceEstimate<DiscretePath>> {
        let domain = self.plot.domain();
        for p in [x, y] {
            if !domain.contains(p) {
                return Err(Error::OutsidePlot(p.clone()));
            }
        }
        if budget.restarts == 0 {
            return Err(Error::Connectivity("no initial path in the budget".into()));
        }
        let straight = DiscretePath::straight(x, y, budget.segments.min(4))?;
        let spread = x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let results: Vec<(f64, DiscretePath)> = (0..budget.restarts)
            .into_par_iter()
            .map(|r| {
                let mut start = straight.clone();
                if r > 0 {
                    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(r as u64));
                    let n = start.nodes.len();
                    for node in &mut start.nodes[1..n - 1] {
                        for v in node.iter_mut() {
                            *v += 0.25 * spread * rng.gen_range(-1.0..1.0);
                        }
                        domain.clamp(node);
                    }
                }
                let best = self.multilevel(start, budget);
                let length = arc_length(&best, &self.plot)?;
                Ok((length, best))
            })
            .collect::<Result<_>>()?;
        let restart_bounds: Vec<f64> = results.iter().map(|(l, _)| *l).collect();
        let (upper_bound, certificate) = results
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        Ok(DistanceEstimate {
            upper_bound,
            certificate,
            restart_bounds,
        })
    }
}
