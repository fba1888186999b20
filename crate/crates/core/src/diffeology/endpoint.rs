//! Lower bound `L(path) ≥ ‖end - start‖_s` for polygonal paths in the flat
//! loop space `H^s(S¹, M)`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::loops::FourierLoop;
use crate::spectral::{sobolev_norm, SobolevOrder};

pub const ENDPOINT_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointReport {
    pub order: f64,
    pub length: f64,
    pub endpoint_distance: f64,
    pub pass: bool,
}

impl EndpointReport {
    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "length": self.length,
            "endpoint_distance": self.endpoint_distance,
            "pass": self.pass,
        })
    }
}

/// Straight segments are geodesics of the flat metric, so the length of
/// the polygon is the sum of the `H^s` norms of its edges.
pub fn endpoint_lower_bound_check(path: &[FourierLoop], order: SobolevOrder) -> Result<EndpointReport> {
    let first = path
        .first()
        .ok_or_else(|| Error::Shape("path has no nodes".into()))?;
    for node in path {
        first.ensure_compatible(node)?;
    }
    let length: f64 = path
        .windows(2)
        .map(|w| sobolev_norm(&w[1].sub(&w[0]), order))
        .sum();
    let endpoint_distance = sobolev_norm(&path.last().unwrap().sub(first), order);
    Ok(EndpointReport {
        order: order.0,
        length,
        endpoint_distance,
        pass: length >= endpoint_distance - ENDPOINT_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Ambient;
    use crate::spectral::random_smooth_loop;

    #[test]
    fn straight_detour_and_constant() {
        let amb = Ambient::Real(2);
        let a = random_smooth_loop(amb, 8, 1.0, 1);
        let b = random_smooth_loop(amb, 8, 1.0, 2);
        let c = random_smooth_loop(amb, 8, 1.0, 3);
        let s = SobolevOrder(0.5);
        let straight = endpoint_lower_bound_check(&[a.clone(), b.clone()], s).unwrap();
        assert!((straight.length - straight.endpoint_distance).abs() < 1e-10);
        let detour = endpoint_lower_bound_check(&[a.clone(), c, b], s).unwrap();
        assert!(detour.pass && detour.length > detour.endpoint_distance);
        let constant = endpoint_lower_bound_check(&[a.clone(), a], s).unwrap();
        assert_eq!((constant.length, constant.endpoint_distance), (0.0, 0.0));
        assert!(endpoint_lower_bound_check(&[], s).is_err());
    }
}
