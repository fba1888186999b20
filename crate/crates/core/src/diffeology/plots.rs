//! Example plots: a flat chart, the exponential chart of the round
//! sphere, and a Möbius band plot.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::volume::{hausdorff_volume_over, VolumeReport};
use super::{DomainBox, Plot};
use crate::error::Result;

/// Identity chart of a box in `ℝ^p` with the Euclidean metric.
#[derive(Debug, Clone)]
pub struct FlatChart {
    domain: DomainBox,
}

impl FlatChart {
    pub fn new(domain: DomainBox) -> Self {
        Self { domain }
    }

    pub fn unit_square() -> Self {
        Self::new(DomainBox::unit(2))
    }
}

impl Plot for FlatChart {
    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn metric(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    fn evaluate(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.to_vec())
    }

    fn jacobian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::identity(self.dim(), self.dim()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereCoordinates {
    /// `(r, θ) ∈ [0, R] × [0, 2π]`
    Polar,
    /// `v ∈ [-R, R]²`, the tangent plane at the pole.
    Cartesian,
}

/// `exp_P` of the unit sphere at the north pole `P`, up to radius `R`.
/// The cut locus is the south pole at `r = π`, where the pulled-back
/// metric degenerates.
#[derive(Debug, Clone)]
pub struct SphereExpChart {
    radius: f64,
    coords: SphereCoordinates,
    domain: DomainBox,
}

impl SphereExpChart {
    pub fn polar(radius: f64) -> Self {
        let domain = DomainBox::new(vec![0.0, 0.0], vec![radius, 2.0 * PI]).unwrap();
        Self {
            radius,
            coords: SphereCoordinates::Polar,
            domain,
        }
    }

    pub fn cartesian(radius: f64) -> Self {
        let domain = DomainBox::new(vec![-radius; 2], vec![radius; 2]).unwrap();
        Self {
            radius,
            coords: SphereCoordinates::Cartesian,
            domain,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coordinates(&self) -> SphereCoordinates {
        self.coords
    }

    /// Area of the polar plot restricted to `r ≤ π` (one copy of the
    /// sphere), and separately the mass of the part beyond the cut locus.
    pub fn restricted_volume(&self, resolution: usize) -> Result<(VolumeReport, VolumeReport)> {
        let polar = SphereExpChart::polar(self.radius);
        let cut = self.radius.min(PI);
        let inner = DomainBox::new(vec![0.0, 0.0], vec![cut, 2.0 * PI])?;
        let main = hausdorff_volume_over(&polar, &inner, &[resolution, 8])?;
        let overlap = if self.radius > PI {
            let outer = DomainBox::new(vec![PI, 0.0], vec![self.radius, 2.0 * PI])?;
            hausdorff_volume_over(&polar, &outer, &[resolution, 8])?
        } else {
            VolumeReport::empty(vec![resolution, 8])
        };
        Ok((main, overlap))
    }
}

impl Plot for SphereExpChart {
    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        match self.coords {
            SphereCoordinates::Polar => {
                let s = x[0].sin();
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s * s])
            }
            SphereCoordinates::Cartesian => {
                let r = x[0].hypot(x[1]);
                if r < 1e-12 {
                    return DMatrix::identity(2, 2);
                }
                let (ux, uy) = (x[0] / r, x[1] / r);
                let q = (r.sin() / r).powi(2);
                let radial = DMatrix::from_row_slice(2, 2, &[ux * ux, ux * uy, uy * ux, uy * uy]);
                &radial + (DMatrix::identity(2, 2) - &radial) * q
            }
        }
    }

    fn evaluate(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (r, c, s) = match self.coords {
            SphereCoordinates::Polar => (x[0], x[1].cos(), x[1].sin()),
            SphereCoordinates::Cartesian => {
                let r = x[0].hypot(x[1]);
                if r == 0.0 {
                    (0.0, 1.0, 0.0)
                } else {
                    (r, x[0] / r, x[1] / r)
                }
            }
        };
        Some(vec![r.sin() * c, r.sin() * s, r.cos()])
    }
}

/// `p : [0,1] × [-1/2, 3/2] → [0,1] × [0,1] / (t,0) ~ (1-t,1)`, wrapping
/// the overhanging strips across the twisted gluing.
#[derive(Debug, Clone)]
pub struct MobiusPlot {
    domain: DomainBox,
}

impl MobiusPlot {
    pub fn new() -> Self {
        Self {
            domain: DomainBox::new(vec![0.0, -0.5], vec![1.0, 1.5]).unwrap(),
        }
    }

    /// One fundamental domain `[0,1] × [0,1]`.
    pub fn fundamental_domain() -> DomainBox {
        DomainBox::unit(2)
    }
}

impl Default for MobiusPlot {
    fn default() -> Self {
        Self::new()
    }
}

impl Plot for MobiusPlot {
    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn metric(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(2, 2)
    }

    fn evaluate(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (a, b) = (x[0], x[1]);
        Some(if b < 0.0 {
            vec![1.0 - a, b + 1.0]
        } else if b > 1.0 {
            vec![1.0 - a, b - 1.0]
        } else {
            vec![a, b]
        })
    }
}
