//! Geometry kernel: vectors, isometries, convex hulls, volumes and signed
//! separation between convex polytopes.
//!
//! Everything here is generic over [`Scalar`] so the same code runs in `f32`
//! and `f64`. Tolerances scale with the precision of the scalar type.

mod hull;
mod plane;
mod separation;
mod solid_angle;
mod vector;

pub use hull::{body_volume, convex_hull, ConvexBody};
pub use plane::Plane;
pub use separation::{
    minkowski_facets, signed_separation, support_set, MinkowskiFacet, Separation,
};
pub use solid_angle::{ring_solid_angle, RingKind, RingSolidAngle};
pub use vector::{rotate_about_line, Mat3, Vector3};

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};
use thiserror::Error;

/// Floating point scalar usable by the geometry kernel.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Incidence / touching tolerance.
    fn geom_tol() -> Self;
    /// Tolerance for closed-form algebraic identities.
    fn exact_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f64 {
    fn geom_tol() -> Self {
        1e-9
    }
    fn exact_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn geom_tol() -> Self {
        1e-4
    }
    fn exact_tol() -> Self {
        1e-5
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("rotation axis must be a unit vector (|axis| = {norm})")]
    NonUnitAxis { norm: f64 },
    #[error("need at least 4 points for a 3d hull, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate point set: {0}")]
    Degenerate(&'static str),
    #[error("non-finite coordinate in input")]
    NonFinite,
}
