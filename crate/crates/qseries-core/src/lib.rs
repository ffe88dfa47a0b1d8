//! Truncated q-series arithmetic and a verification engine for
//! eta-quotient identities, series dissections, and Ramanujan-type
//! partition congruences.
//!
//! The crate is organised in layers:
//!
//! - [`series`]: arithmetic on truncated formal power series in `q` over
//!   exact big integers or integers modulo `m`.
//! - [`special`]: the classical building blocks — Euler products `f_k`,
//!   q-Pochhammer symbols, Ramanujan theta functions, and eta quotients.
//! - [`families`]: generating functions for overpartition counting
//!   functions together with independent brute-force enumeration oracles.
//! - [`expr`]: a small expression language (`f2^3*f9^2/(f1^2*f4)`, theta
//!   atoms, bounded sums) with a parser, printer and evaluator.
//! - [`claims`]: the claim manifest format — identities, dissections,
//!   congruences and prime-indexed congruence families as data.
//! - [`verify`]: the checking engine producing [`report::VerificationReport`]s.
//!
//! The core is `no_std` (alloc only); IO, CLI and JSON reporting live in
//! the companion binary crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod claims;
pub mod expr;
pub mod families;
pub mod report;
pub mod ring;
pub mod series;
pub mod special;
pub mod verify;

pub use families::FamilySpec;
pub use report::{VerificationReport, VerifyStatus};
pub use ring::CoefficientRing;
pub use series::TruncatedSeries;
