//! Coefficient domains: exact big integers or integers modulo `m`.

use alloc::format;
use alloc::string::String;
use core::fmt;

/// Largest modulus accepted for the modular ring. Residues are stored as
/// `u64`; keeping the modulus below 2^32 lets products of two residues be
/// formed in `u64` without overflow.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

/// The coefficient domain of a [`crate::series::TruncatedSeries`].
///
/// Identity checks run over exact integers; congruence checks run over
/// `Modular(m)`, which is both sufficient and far cheaper since eta-quotient
/// coefficients grow exponentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
    /// Arbitrary-precision integers.
    Exact,
    /// Integers modulo `m`, `2 <= m <= MAX_MODULUS`.
    Modular(u64),
}

impl CoefficientRing {
    /// Construct the modular ring, rejecting moduli below 2.
    pub fn modular(m: u64) -> Result<Self, RingError> {
        if !(2..=MAX_MODULUS).contains(&m) {
            return Err(RingError::InvalidModulus(m));
        }
        Ok(CoefficientRing::Modular(m))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CoefficientRing::Exact)
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            CoefficientRing::Exact => None,
            CoefficientRing::Modular(m) => Some(*m),
        }
    }

    /// Human-readable ring description used in reports.
    pub fn describe(&self) -> String {
        match self {
            CoefficientRing::Exact => String::from("exact integers"),
            CoefficientRing::Modular(m) => format!("integers mod {}", m),
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Exact => write!(f, "exact"),
            CoefficientRing::Modular(m) => write!(f, "mod:{}", m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    InvalidModulus(u64),
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::InvalidModulus(m) => write!(f, "invalid modulus {} (need 2 <= m <= 2^32-1)", m),
        }
    }
}
