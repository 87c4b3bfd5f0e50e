//! Relaxed energies of a layered material with two slip systems.
//!
//! The crate evaluates the condensed single/two-slip energy `W`, its
//! homogenized relaxation `W_hom`, constructs optimal simple laminates,
//! certifies the closed forms against a brute-force lamination oracle, and
//! simulates the layered microstructure whose energy converges to
//! `λ|Ω|W_hom`.
//!
//! ```
//! use lamlab::{algebra::Matrix2, energy::{w_hom_orthogonal, SlipSystem}};
//!
//! let slips = SlipSystem::from_theta(std::f64::consts::FRAC_PI_4, 0.5).unwrap();
//! let w = w_hom_orthogonal(Matrix2::IDENTITY, &slips, 1e-9);
//! assert_eq!(w.finite(), Some(0.0));
//! ```

// Negated comparisons double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod energy;
pub mod error;
pub mod homogenize;
pub mod laminate;
pub mod oracle;
pub mod regions;
pub mod report;
pub mod tolerances;

pub use error::{Error, Result};
