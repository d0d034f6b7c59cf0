//! Entanglement between an inertial observer and a uniformly accelerated
//! observer for bosonic and Grassman scalar fields, computed with the full
//! Unruh-mode structure (both L and R kinds) instead of the single-mode
//! approximation.
//!
//! The pipeline is:
//!
//! 1. [`fock`]: sparse occupation-number states, ladder operators with
//!    Jordan–Wigner signs, density matrices and partial traces.
//! 2. [`rindler`]: the Minkowski vacuum and Unruh excitations written in
//!    the Rindler (region I / region IV) basis.
//! 3. [`family`]: the two-parameter family of Alice–field states and the
//!    reduced states seen by Rob (region I) and AntiRob (region IV).
//! 4. [`negativity`]: partial transpose, a Hermitian eigensolver and the
//!    negativity with bosonic cutoff control.
//! 5. [`experiments`]: sweeps, peak search, relative-creation analysis and
//!    unit conversion; [`cli`] exposes all of it on the command line.

// `!(x > 0.0)` is used on purpose so that NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod family;
pub mod fock;
pub mod negativity;
pub mod rindler;
pub mod selfcheck;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use experiments::{CreationReport, SweepRow, SweepSpec};
pub use family::StateParams;
pub use fock::{DensityMatrix, ModeDescriptor, ModeRegistry, Region, Role, StateVector, Statistics};
pub use negativity::NegativityResult;
pub use rindler::{RindlerConfig, UnruhKind};
