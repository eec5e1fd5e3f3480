//! Grouped permutation importance for random forests, with a wavelet-based
//! pipeline for selecting functional variables.
//!
//! The crate provides:
//!
//! - regression CART trees and bagged forests with out-of-bag bookkeeping
//!   ([`forest`]);
//! - out-of-bag permutation importance for single columns and for groups of
//!   columns permuted jointly, plus the size-rescaled variant
//!   ([`importance`]);
//! - an orthonormal Daubechies wavelet transform on dyadic grids and the
//!   support geometry of the periodized basis ([`wavelets`]);
//! - group constructors over the wavelet coefficient design matrix
//!   ([`groups`]);
//! - simultaneous hard-thresholding shrinkage across curves ([`shrinkage`]);
//! - recursive grouped elimination and its non-recursive baseline
//!   ([`selection`]);
//! - seeded generators reproducing the reference simulation designs
//!   ([`simulation`]).
//!
//! With the `parallel` feature (default) per-tree and per-replicate work
//! runs on rayon; disabling it yields a sequential build with identical
//! numerical results.

pub mod data;
pub mod error;
pub mod forest;
pub mod groups;
pub mod importance;
pub mod panel;
pub mod rng;
pub mod selection;
pub mod shrinkage;
pub mod simulation;
pub mod wavelets;

mod parallel;

pub use data::Dataset;
pub use error::{Error, Result};
