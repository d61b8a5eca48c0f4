//! Construction and numerical verification of χ(2) bosonic quantum
//! error-correcting codes.
//!
//! The crate builds the parity-check code (PCC), the embedded error-correcting
//! code (EECC) and the binomial code (BC) on multi-mode Fock spaces, checks the
//! Knill–Laflamme conditions against loss, gain, dephasing and
//! amplitude-damping errors, reproduces the photon-number parity syndrome
//! tables and recovery pipelines, verifies the χ(2) gate library, and evaluates
//! the generalized quantum Hamming bounds.
//!
//! Modules are layered bottom-up:
//!
//! * [`fock`]: bases, states, sparse operators, ladder and number operators.
//! * [`symmetry`]: symmetry operators and joint unity-eigenspace synthesis.
//! * [`codes`]: closed-form codewords and code metadata.
//! * [`errors`]: error-operator families, Knill–Laflamme checks, recovery.
//! * [`syndromes`]: parity schemes, syndrome tables, recovery pipelines.
//! * [`gates`]: χ(2) generators, matrix exponentials, gate library.
//! * [`bounds`]: quantum Hamming bounds, rates and capacity.
//! * [`cli`]: report assembly shared by the `chi2qec` binary.

pub mod bounds;
pub mod cli;
pub mod codes;
pub mod error;
pub mod errors;
pub mod fock;
pub mod gates;
pub mod linalg;
pub mod symmetry;
pub mod syndromes;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Default absolute tolerance for floating-point comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;
