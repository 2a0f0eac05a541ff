//! Mean curvature flow of closed submanifolds in the unit sphere.
//!
//! The crate collects the pieces needed to study the flow numerically:
//!
//! * [`sff`]: pointwise algebra of second fundamental forms and the
//!   quartic inequalities behind the evolution estimates;
//! * [`constants`]: the explicit constant chain ending in the pinching
//!   constant `C_{n,p}`, evaluated in log form;
//! * [`exact`]: shrinking geodesic spheres and Clifford products;
//! * [`simulator`]: the equivariant flow of rotationally symmetric
//!   hypersurfaces of `S^(n+1)`, reduced to a curve on `S²`;
//! * [`norms`]: quadrature of curvature norms;
//! * [`lab`]: inequality slacks, comparison ODEs and run monitors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod lab;
pub mod logscalar;
pub mod norms;
pub mod ode;
pub mod profile;
pub mod sff;
pub mod simulator;
pub mod special;

pub use error::{Error, Result};
pub use logscalar::LogScalar;
