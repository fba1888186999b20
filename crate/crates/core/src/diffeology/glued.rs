//! Countably many real lines glued along `(-∞, 0]` and, with a shift,
//! along `[1/i, ∞)`. Copy `i` contributes a private arc of length `1/i`
//! between `0̄` and `1̄`, so `d_g(0̄, 1̄) = 0` although the two points have
//! disjoint D-open neighbourhoods.

use super::distance::{DistanceEstimate, OptimizerBudget, PseudoDistance};
use crate::error::{Error, Result};

/// A representative `x_i` in copy `i ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluedLinesPoint {
    pub copy: u64,
    pub x: f64,
}

/// Where a class sits in the quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Locus {
    /// Shared left ray, coordinate `x ≤ 0`.
    Left(f64),
    /// Shared right ray, at distance `e ≥ 0` beyond `1̄`.
    Right(f64),
    /// Private arc of copy `i`, `0 < x < 1/i`.
    Arc(u64, f64),
}

impl GluedLinesPoint {
    pub fn new(copy: u64, x: f64) -> Result<Self> {
        if copy == 0 || !x.is_finite() {
            return Err(Error::Precondition("copies start at 1 and x must be finite".into()));
        }
        Ok(Self { copy, x })
    }

    /// `0̄`, the class of `0 ∈ ℝ_1`.
    pub fn zero_bar() -> Self {
        Self { copy: 1, x: 0.0 }
    }

    /// `1̄`, the class of `1 ∈ ℝ_1`.
    pub fn one_bar() -> Self {
        Self { copy: 1, x: 1.0 }
    }

    fn inv(&self) -> f64 {
        1.0 / self.copy as f64
    }

    fn locus(&self) -> Locus {
        if self.x <= 0.0 {
            Locus::Left(self.x)
        } else if self.x >= self.inv() {
            Locus::Right(self.x - self.inv())
        } else {
            Locus::Arc(self.copy, self.x)
        }
    }

    /// Canonical representative: shared points move to copy 1.
    pub fn canonical(&self) -> Self {
        match self.locus() {
            Locus::Left(x) => Self { copy: 1, x },
            Locus::Right(e) => Self { copy: 1, x: 1.0 + e },
            Locus::Arc(..) => *self,
        }
    }

    pub fn is_private(&self) -> bool {
        matches!(self.locus(), Locus::Arc(..))
    }

    /// Equality in the quotient, up to rounding in the shifted coordinates.
    pub fn same_class(&self, other: &Self) -> bool {
        let (a, b) = (self.locus(), other.locus());
        let near = |u: f64, v: f64| (u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(1.0);
        match (a, b) {
            (Locus::Left(u), Locus::Left(v)) | (Locus::Right(u), Locus::Right(v)) => near(u, v),
            (Locus::Arc(i, u), Locus::Arc(j, v)) => i == j && near(u, v),
            _ => false,
        }
    }

    /// The representative of this class in copy `i`, if there is one.
    pub fn in_copy(&self, i: u64) -> Option<Self> {
        let inv = 1.0 / i as f64;
        match self.locus() {
            Locus::Left(x) => Some(Self { copy: i, x }),
            Locus::Right(e) => Some(Self { copy: i, x: inv + e }),
            Locus::Arc(c, x) => (c == i).then_some(Self { copy: i, x }),
        }
    }
}

/// `1/i`: the length of the straight path from `0̄` to `1̄` in copy `i`.
pub fn glued_lines_distance(i: u64) -> Result<f64> {
    if i == 0 {
        return Err(Error::Precondition("copies start at 1".into()));
    }
    Ok(1.0 / i as f64)
}

/// The space with copies `1..=i_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluedLinesSpace {
    pub i_max: u64,
}

impl GluedLinesSpace {
    pub fn new(i_max: u64) -> Result<Self> {
        if i_max == 0 {
            return Err(Error::Precondition("need at least one copy".into()));
        }
        Ok(Self { i_max })
    }

    /// Shortest private arc between `0̄` and `1̄` avoiding copy `skip`.
    fn bridge(&self, skip: Option<u64>) -> (u64, f64) {
        let i = if skip == Some(self.i_max) && self.i_max > 1 {
            self.i_max - 1
        } else {
            self.i_max
        };
        (i, 1.0 / i as f64)
    }

    /// Length of a certificate: sum of coordinate jumps between consecutive
    /// nodes, which must share a copy unless they are the same class.
    pub fn certificate_length(&self, nodes: &[GluedLinesPoint]) -> Result<f64> {
        nodes
            .windows(2)
            .map(|w| {
                if w[0].same_class(&w[1]) {
                    return Ok(0.0);
                }
                if w[0].copy != w[1].copy {
                    return Err(Error::Connectivity("consecutive nodes in different copies".into()));
                }
                Ok((w[1].x - w[0].x).abs())
            })
            .sum()
    }
}

impl PseudoDistance for GluedLinesSpace {
    type Point = GluedLinesPoint;
    type Certificate = Vec<GluedLinesPoint>;

    /// Exact shortest path in the theta graph formed by the two rays and
    /// the private arcs of copies up to `i_max`. The budget is unused.
    fn pseudo_distance(
        &self,
        x: &GluedLinesPoint,
        y: &GluedLinesPoint,
        _budget: &OptimizerBudget,
    ) -> Result<DistanceEstimate<Vec<GluedLinesPoint>>> {
        for p in [x, y] {
            if let Locus::Arc(c, _) = p.locus() {
                if c > self.i_max {
                    return Err(Error::Connectivity(format!(
                        "copy {c} is beyond the {} copies kept",
                        self.i_max
                    )));
                }
            }
        }
        let (a, b) = (x.locus(), y.locus());
        let zero = GluedLinesPoint::zero_bar();
        let one = GluedLinesPoint::one_bar();
        // distances to 0̄ and 1̄ through the point's own edge
        let ends = |l: Locus| -> (Option<f64>, Option<f64>) {
            match l {
                Locus::Left(v) => (Some(-v), None),
                Locus::Right(e) => (None, Some(e)),
                Locus::Arc(i, v) => (Some(v), Some(1.0 / i as f64 - v)),
            }
        };
        let own = |l: Locus| match l {
            Locus::Arc(i, _) => Some(i),
            _ => None,
        };
        let (xa, xb) = ends(a);
        let (ya, yb) = ends(b);
        let mut best: Option<(f64, Vec<GluedLinesPoint>)> = None;
        let mut offer = |len: f64, nodes: Vec<GluedLinesPoint>| {
            if best.as_ref().is_none_or(|(l, _)| len < *l) {
                best = Some((len, nodes));
            }
        };
        // same edge
        match (a, b) {
            (Locus::Left(u), Locus::Left(v)) | (Locus::Right(u), Locus::Right(v)) => {
                offer((u - v).abs(), vec![x.canonical(), y.canonical()])
            }
            (Locus::Arc(i, u), Locus::Arc(j, v)) if i == j => offer((u - v).abs(), vec![*x, *y]),
            _ => {}
        }
        let via = |p: &GluedLinesPoint, hub: &GluedLinesPoint, copy: u64| {
            vec![p.in_copy(copy).unwrap(), hub.in_copy(copy).unwrap()]
        };
        let home = |p: &GluedLinesPoint| match p.locus() {
            Locus::Arc(i, _) => i,
            _ => 1,
        };
        if let (Some(u), Some(v)) = (xa, ya) {
            let mut nodes = via(x, &zero, home(x));
            nodes.extend(via(&zero, y, home(y)));
            offer(u + v, nodes);
        }
        if let (Some(u), Some(v)) = (xb, yb) {
            let mut nodes = via(x, &one, home(x));
            nodes.extend(via(&one, y, home(y)));
            offer(u + v, nodes);
        }
        for ((u, hub_x), (v, hub_y)) in [((xa, zero), (yb, one)), ((xb, one), (ya, zero))] {
            if let (Some(u), Some(v)) = (u, v) {
                let (k, arc) = self.bridge(own(a).or(own(b)));
                let mut nodes = via(x, &hub_x, home(x));
                nodes.extend(via(&hub_x, &hub_y, k));
                nodes.extend(via(&hub_y, y, home(y)));
                offer(u + arc + v, nodes);
            }
        }
        let (upper_bound, mut certificate) =
            best.ok_or_else(|| Error::Connectivity("no path between the points".into()))?;
        certificate.dedup_by(|p, q| p == q);
        Ok(DistanceEstimate {
            upper_bound,
            certificate,
            restart_bounds: vec![upper_bound],
        })
    }
}

/// Membership tests for the D-open neighbourhoods
/// `U_0̄ = {x̄_i | x_i < 1/(2i)}` and `U_1̄ = {x̄_i | x_i > 1/(2i)}`.
/// A class belongs to a set when one of its representatives does.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeparationWitness;

impl SeparationWitness {
    pub fn in_u0(&self, p: &GluedLinesPoint) -> bool {
        match p.locus() {
            Locus::Left(_) => true,
            Locus::Right(_) => false,
            Locus::Arc(i, x) => x < 0.5 / i as f64,
        }
    }

    pub fn in_u1(&self, p: &GluedLinesPoint) -> bool {
        match p.locus() {
            Locus::Left(_) => false,
            Locus::Right(_) => true,
            Locus::Arc(i, x) => x > 0.5 / i as f64,
        }
    }

    pub fn disjoint_on(&self, points: &[GluedLinesPoint]) -> bool {
        points.iter().all(|p| !(self.in_u0(p) && self.in_u1(p)))
    }
}

pub fn d_topology_separation_witness() -> SeparationWitness {
    SeparationWitness
}
