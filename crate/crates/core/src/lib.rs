//! Exact computations behind the function-level shadows of ℓ-adic Fourier
//! theory on the affine line, Witt vector and Heisenberg duality, isocrystal
//! slopes and an equal-characteristic model of the curve rings.

pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod ffcurve;
pub mod finite_field;
pub mod fourier;
pub mod heisenberg;
pub mod local_ft;
pub mod selftest;
pub mod slopes;
pub mod trace_datum;
pub mod witt;

pub use cyclotomic::CycNum;
pub use error::{Error, Result};
