//! Dense lattice packings of regular tetrahedra built from nine-tetrahedron
//! clusters.
//!
//! The pipeline runs bottom-up: [`geom`] supplies vectors, hulls and
//! separation tests; [`cluster`] builds the swiveled cluster family;
//! [`packing`] places clusters on a two-coset lattice; [`contacts`] finds and
//! labels touching feature pairs; [`optimizer`] minimizes the cell volume;
//! [`verify`] issues separating-plane certificates and carries the reference
//! constants.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod contacts;
pub mod geom;
pub mod optimizer;
pub mod packing;
pub mod verify;

pub use geom::Scalar;

/// Double-precision aliases for the generic geometry types.
pub type Vec3 = geom::Vector3<f64>;
pub type Mat3 = geom::Mat3<f64>;
pub type Plane = geom::Plane<f64>;
pub type ConvexBody = geom::ConvexBody<f64>;
