//! Trace formula for Hecke operators on cocompact Kleinian groups: exact and
//! floating-point isometries of hyperbolic 3-space, Selberg/Harish-Chandra
//! transforms, double coset decompositions, conjugacy classes and both sides
//! of the trace identity.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod conjugacy;
pub mod correspondence;
pub mod error;
pub mod groupdata;
pub mod huber;
pub mod isometry;
pub mod lattice;
pub mod linalg;
pub mod quadrature;
pub mod scalars;
pub mod trace;
pub mod transforms;

pub use error::{Error, Result};
