//! Computational inversive geometry for Schottky sets.
//!
//! The crate is organised bottom-up:
//!
//! - [`moebius`]: points of `R^n ∪ {∞}`, spheres, reflections, the chordal
//!   metric and the dilatation of linear maps.
//! - [`schottky`]: Schottky sets, reduced reflection words, orbit packings,
//!   doubling and unfolding of points.
//! - [`equivariant`]: the equivariant extension of a boundary
//!   correspondence between two Schottky sets.
//! - [`qc`]: numerical quasiconformality diagnostics.
//! - [`denjoy`]: Denjoy circle homeomorphisms, round wandering-domain scenes
//!   on the torus and the isometry/volume obstruction checks.

// `!(x > 0.0)` style checks are meant to catch NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod denjoy;
pub mod equivariant;
pub mod moebius;
pub mod qc;
pub mod sampling;
pub mod schottky;
pub mod tolerance;

pub use moebius::{
    apply_word, chordal_distance, image_of_sphere, invert, linear_dilatation, Ball,
    ExtendedPoint, GeometryError, LinearMapSummary, Side, Sphere, Vector,
};
pub use schottky::{ReflectionWord, SchottkyError, SchottkySet};
