//! Numerical laboratory for Sobolev loop spaces `L_s N`.
//!
//! Loops are stored either by Fourier coefficients ([`FourierLoop`]) or by
//! uniform samples ([`SampledLoop`]) in a flat ambient space ([`Ambient`]).
//! On top of that sit the target manifolds, the mollified
//! reparametrizations and homotopies used to probe contractibility, a
//! small diffeology toolkit, and the canonical symplectic structure on the
//! flat loop space.

pub mod ambient;
pub mod diffeology;
pub mod error;
pub mod homotopy;
pub mod interp;
pub mod loops;
pub mod manifold;
pub mod mollifier;
pub mod quadrature;
pub mod spectral;
pub mod symplectic;

pub use ambient::{Ambient, C64};
pub use error::{Error, Result};
pub use loops::{FourierLoop, SampledLoop};
pub use manifold::{ManifoldKind, ManifoldSpec};
pub use mollifier::{Mollifier, ReparamPhi};
pub use spectral::SobolevOrder;
