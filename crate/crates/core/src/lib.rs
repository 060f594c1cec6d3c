//! Wave-trace spectral invariants of magnetic Schrödinger operators on flat
//! 2-D tori, and the inverse algorithms that recover the magnetic field, the
//! electric potential and the extended gauge class from them.
//!
//! Physical conventions (the `2 pi` in Fourier exponents, one flux quantum per
//! cell) are collected in `CONVENTIONS.md` at the repository root.

pub mod error;
pub mod fields;
pub mod hypotheses;
pub mod invariants;
pub mod lattice;
pub mod quad;
pub mod reconstruct;
pub mod roots;
pub mod spectral;

pub use error::{Error, Result};
pub use fields::{DirectionalData, MagneticPotential, ScalarField};
pub use lattice::{Lattice, PrimitiveDirection, Vec2};
