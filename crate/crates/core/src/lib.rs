//! Wave dispersion relations with Bohm-potential corrections.
//!
//! The crate samples exact solutions of the scalar wave, Maxwell and
//! linearized-gravity equations on uniform spacetime lattices, splits them
//! into amplitude and phase, and checks that the wavevector norm `k·k`
//! equals the Bohm potential computed from the amplitude.

// Tensor code indexes components by name (g[mu][nu]); iterator chains would
// obscure the index notation.
#![allow(clippy::needless_range_loop)]

pub mod bohm;
pub mod catalog;
pub mod error;
pub mod evolve;
pub mod geometry;
pub mod lattice;
pub mod madelung;
pub mod verify;

pub use error::{Error, Result};
