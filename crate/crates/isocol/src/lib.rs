//! C^s-smooth mixed-degree isogeometric spline spaces on planar multi-patch
//! domains, and strong-form collocation for the Poisson (s = 2) and
//! biharmonic (s = 4) equations.

pub mod collocation;
pub mod geometry;
pub mod jet;
pub mod mixed_space;
pub mod scalar;
pub mod smooth_space;
pub mod solver;
pub mod spline_kernel;

pub use scalar::{Field, Real};
