//! Desk-scale stability analysis for parameterized generalized equations.
//!
//! A generalized equation asks for `x` with `f(p,x) ∈ F(p,x)`, where the
//! single-valued *base* `f` and the set-valued *field* `F` both depend on a
//! parameter `p`. This crate represents such problems in finite-dimensional
//! metric spaces and provides:
//!
//! * exact distance/projection evaluators for a catalog of closed sets
//!   ([`metric`]),
//! * the displacement functions of the solution mapping and brute-force grid
//!   enumeration of its values ([`geneq`]),
//! * sampling estimators for strong and strict outer slopes together with
//!   exact subdifferentials, normal cones and coderivatives on an analytic
//!   catalog ([`slopes`], [`dual`]),
//! * executable checkers for Lipschitz lower semicontinuity and calmness
//!   criteria, with quantitative modulus bounds and an Ekeland-style descent
//!   tracker ([`stability`]),
//! * brute-force empirical moduli that serve as ground truth for every bound
//!   ([`oracle`]),
//! * a parametric constrained-optimization layer: value functions, Argmin
//!   mappings and their stability checkers ([`optstab`]).
//!
//! Everything is deterministic given a seed: sampling uses a seeded
//! low-discrepancy sequence, never an OS RNG. The crate is `no_std`
//! (`alloc` required); IO, configuration and reporting live in the
//! companion CLI crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dual;
pub mod geneq;
pub mod metric;
pub mod optstab;
pub mod oracle;
pub mod sample;
pub mod slopes;
pub mod stability;

mod error;
#[cfg(feature = "serde")]
pub mod serde_ext;

pub use error::{Error, Result};

/// Extended real line `ℝ ∪ {±∞}`, realized directly by `f64`.
///
/// Conventions used throughout the crate, stated once here:
/// `r + ∞ = ∞`, `min(r, ∞) = r`; an infimum over an empty set is `+∞`;
/// the excess of an empty set over anything is `0`; the supremum over an
/// empty set of dual-element norms is `0`. NaN never escapes a public API.
pub type ExtReal = f64;

/// Positive infinity of the extended real line.
pub const INF: ExtReal = f64::INFINITY;
/// Negative infinity of the extended real line.
pub const NEG_INF: ExtReal = f64::NEG_INFINITY;

/// Default feasibility/membership tolerance.
pub const TOL_FEAS: f64 = 1e-9;
/// Default projection tolerance: projections land in the set and achieve
/// the exact distance within this bound.
pub const TOL_PROJ: f64 = 1e-9;
