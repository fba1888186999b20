//! Hausdorff volume `∫ √det g_p dλ` of a plot by tensor Simpson rules.

use serde_json::{json, Value};

use super::{DomainBox, Plot};
use crate::error::{Error, Result};
use crate::quadrature::simpson_weights;

/// Determinants below this count as degenerate and contribute nothing.
pub const DEGENERATE_DET: f64 = 1e-20;
/// Determinants below minus this are rejected.
pub const NEGATIVE_DET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeReport {
    pub value: f64,
    pub degenerate_points: usize,
    pub resolution: Vec<usize>,
}

impl VolumeReport {
    pub fn empty(resolution: Vec<usize>) -> Self {
        Self {
            value: 0.0,
            degenerate_points: 0,
            resolution,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "degenerate_points": self.degenerate_points,
            "resolution": self.resolution,
        })
    }
}

pub fn hausdorff_volume(plot: &dyn Plot, resolution: &[usize]) -> Result<VolumeReport> {
    hausdorff_volume_over(plot, plot.domain(), resolution)
}

/// Volume of the sub-box `region` of the plot's domain. `resolution`
/// gives the Simpson interval count per axis (rounded up to even).
pub fn hausdorff_volume_over(plot: &dyn Plot, region: &DomainBox, resolution: &[usize]) -> Result<VolumeReport> {
    let dim = plot.dim();
    if region.dim() != dim || resolution.len() != dim {
        return Err(Error::Shape(format!("volume needs a {dim}-dimensional region and resolution")));
    }
    if !plot.domain().contains_box(region) {
        return Err(Error::OutsidePlot(region.hi.clone()));
    }
    if resolution.contains(&0) {
        return Err(Error::Resolution("resolution must be positive".into()));
    }
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..dim)
        .map(|k| {
            let n = resolution[k] + resolution[k] % 2;
            let h = (region.hi[k] - region.lo[k]) / n as f64;
            let nodes = (0..=n).map(|i| region.lo[k] + i as f64 * h).collect();
            (nodes, simpson_weights(n, h))
        })
        .collect();
    let total: usize = axes.iter().map(|(n, _)| n.len()).product();
    // Neumaier summation: fine grids add up ~10⁶ terms
    let (mut value, mut carry) = (0.0f64, 0.0f64);
    let mut degenerate = 0;
    let mut x = vec![0.0; dim];
    for flat in 0..total {
        let mut rest = flat;
        let mut w = 1.0;
        for (k, (nodes, weights)) in axes.iter().enumerate() {
            let i = rest % nodes.len();
            rest /= nodes.len();
            x[k] = nodes[i];
            w *= weights[i];
        }
        let det = plot.metric(&x).determinant();
        if det < -NEGATIVE_DET {
            return Err(Error::InvalidMetric { det });
        }
        if det < DEGENERATE_DET {
            degenerate += 1;
        } else {
            let term = w * det.sqrt();
            let sum = value + term;
            carry += if value.abs() >= term.abs() {
                (value - sum) + term
            } else {
                (term - sum) + value
            };
            value = sum;
        }
    }
    Ok(VolumeReport {
        value: value + carry,
        degenerate_points: degenerate,
        resolution: axes.iter().map(|(n, _)| n.len() - 1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeology::plots::{FlatChart, MobiusPlot, SphereExpChart};
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    #[test]
    fn flat_square_and_mobius_domain() {
        let v = hausdorff_volume(&FlatChart::unit_square(), &[4, 4]).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        assert_eq!(v.degenerate_points, 0);
        let m = MobiusPlot::new();
        let fd = hausdorff_volume_over(&m, &MobiusPlot::fundamental_domain(), &[8, 8]).unwrap();
        assert!((fd.value - 1.0).abs() < 1e-12);
        assert!((hausdorff_volume(&m, &[8, 8]).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_area_and_overlap() {
        let chart = SphereExpChart::polar(1.5 * PI);
        let (main, overlap) = chart.restricted_volume(256).unwrap();
        assert!((main.value - 4.0 * PI).abs() < 1e-6);
        assert!((overlap.value - 2.0 * PI).abs() < 1e-6);
        // the pole r = 0 and the cut locus r = π
        assert!(main.degenerate_points > 0 && overlap.degenerate_points > 0);
    }

    struct Indefinite(DomainBox);

    impl Plot for Indefinite {
        fn domain(&self) -> &DomainBox {
            &self.0
        }
        fn metric(&self, _x: &[f64]) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
        }
    }

    #[test]
    fn negative_determinant_is_rejected() {
        let p = Indefinite(DomainBox::unit(2));
        assert!(matches!(hausdorff_volume(&p, &[2, 2]), Err(Error::InvalidMetric { .. })));
    }

    #[test]
    fn region_must_lie_in_domain() {
        let flat = FlatChart::unit_square();
        let big = DomainBox::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
        assert!(hausdorff_volume_over(&flat, &big, &[2, 2]).is_err());
    }
}
