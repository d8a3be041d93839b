//! Spectral data of G2 polynomial Killing fields.
//!
//! The crate builds the octonionic `G2` structure on `C^7`, samples elements
//! of the twisted loop algebra `Λ^{ρ,τ}_d g2^C` (polynomial Killing fields),
//! extracts their spectral curves and checks the integer invariants
//! (ramification degrees, genera, dimensions) by counting branch data. It
//! also integrates the Lax flow at coefficient level and verifies the
//! fiberwise symplectic and 3-form structure of the eigenlines.
//!
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in the
//! `g2spectral-cli` crate.

#![no_std]

extern crate alloc;

pub mod checks;
pub mod eigenline;
pub mod exterior;
pub mod forms;
pub mod lax;
pub mod laurent;
pub mod linalg;
pub mod loop_algebra;
pub mod octonion;
pub mod ode;
pub mod spectral;

mod error;

pub use error::Error;
pub use num_complex::Complex64 as C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Absolute tolerance for membership checks on unit-scaled inputs.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
