//! Polyhedral fundamental domains for discrete finite-level subgroups acting
//! by left translations on the universal cover of SU(1,1).
//!
//! The pipeline: build a hyperbolic triangle group, lift it to the universal
//! cover with chosen deck offsets, enumerate the orbit of a fixed point,
//! intersect tangent half-spaces into prisms, and carve the fundamental
//! polyhedron in the flat chart of the identity tangent face. The carved
//! complex comes with face identifications, tiling verification, volume, and
//! a Euclidean mesh for export.

pub mod analogue;
pub mod carve;
pub mod cell;
pub mod cover;
pub mod error;
pub mod halfspace;
pub mod mesh;
pub mod num;
pub mod orbit;
pub mod triangle;

pub use cover::{bilinear_form, CoverPoint, GroupElement, PseudoVector};
pub use error::{Error, Result};
