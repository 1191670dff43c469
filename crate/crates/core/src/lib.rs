//! Simulation core for single-qudit permutation-parity determination.
//!
//! The crate covers the abstract algorithm on a `d`-level system (Fourier
//! transform, cyclic permutation oracles, deterministic parity readout), the
//! classical query lower bound it beats, and a desk-scale model of the
//! four-level two-photon polarization realization: Jones-calculus optics,
//! partially distinguishable two-photon statistics, a post-selected gate
//! model with calibrated noise, and maximum-likelihood state tomography.
//!
//! Everything here is `no_std` + `alloc`. File formats, the command line and
//! any other IO live in the companion `qudit-parity` crate.

#![no_std]
#![deny(missing_docs)]
// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod gedik;
pub mod linalg;
pub mod photonic;
pub mod qudit;
pub mod rng;
pub mod tomography;
pub mod two_photon;

pub use error::{Error, Result};
pub use linalg::{c64, CMatrix};

/// Entrywise tolerance used for every matrix identity in the crate.
pub const TOLERANCE: f64 = 1e-9;
