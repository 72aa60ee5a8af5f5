//! Finite-temperature transverse-magnetic Casimir free energy and entropy of
//! a delta-function plasma-shell sphere.
//!
//! All quantities are dimensionless in units of the sphere radius `a`:
//! the temperature enters as `t = aT`, results are `a F` and `a S`.

pub mod dd;
pub mod freeenergy;
pub mod phase;
pub mod quadrature;
pub mod real;
pub mod specfun;

pub use dd::DoubleDouble;
pub use real::{Evaluated, Precision, PrecisionPolicy, PRECISION_ENV};
