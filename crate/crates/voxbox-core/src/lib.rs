//! Lossy compression of voxelized vector fields by box covers with box
//! summaries, under a per-voxel energy-gap distortion bound.
//!
//! The pipeline reads a field `X` and an energy polynomial `f`, picks a
//! working tolerance `eps_star` below the user bound `eps`, covers the grid
//! with boxes whose energies span at most `2 eps_star`, stores each box as two
//! corners plus a mid-range summary, and serializes the result into a
//! self-delimiting bit string. Decompression searches for one representative
//! vector per box whose energy lies within `eps - eps_star` of the summary.
//!
//! Modules:
//! - [`poly`]: piecewise polynomial language, exact evaluation.
//! - [`field`]: the voxel field data model and `.vvf` format.
//! - [`cluster`]: energy gaps, feasibility, `eps_star`, mid-range summaries.
//! - [`boxgeom`]: grid boxes, corners, interval and box embeddings.
//! - [`sweepline`]: interval tree and complement covering sweep.
//! - [`codec`]: codeword serialization and size accounting.
//! - [`engine`]: greedy and exact compression, decompression, verification.
//! - [`reductions`]: hardness-reduction instance builders and checkers.

pub mod boxgeom;
pub mod cluster;
pub mod codec;
pub mod engine;
pub mod error;
pub mod field;
pub mod poly;
pub mod rational;
pub mod reductions;
pub mod setcover;
pub mod sweepline;

pub use error::{Error, Result};

extern crate self as voxbox_core;

#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod test_support;

#[cfg(test)]
mod properties;
pub use rational::Q;
