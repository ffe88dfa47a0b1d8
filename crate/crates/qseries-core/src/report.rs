//! Per-claim verification outcomes, machine-readable.

use alloc::string::String;
use core::fmt;

/// Outcome of checking one claim.
///
/// Counterexamples are reproducible: re-running a claim yields the
/// identical index and coefficient values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyStatus {
    /// Every compared index up to the recorded order/prefix agreed.
    Verified { order: usize },
    /// First disagreeing index with both values rendered.
    Counterexample {
        index: usize,
        lhs: String,
        rhs: String,
    },
    /// The claim could not be checked as registered (bad expression,
    /// violated side condition, non-unit inversion, ...). Never a pass.
    ConfigError { message: String },
    /// A requested cap left too few coefficients to decide the claim.
    OrderTooSmall { needed: usize, had: usize },
}

impl VerifyStatus {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyStatus::Verified { .. })
    }
}

impl fmt::Display for VerifyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyStatus::Verified { order } => write!(f, "verified to order {}", order),
            VerifyStatus::Counterexample { index, lhs, rhs } => {
                write!(f, "counterexample at index {}: {} vs {}", index, lhs, rhs)
            }
            VerifyStatus::ConfigError { message } => write!(f, "config error: {}", message),
            VerifyStatus::OrderTooSmall { needed, had } => {
                write!(f, "order too small: needed {}, had {}", needed, had)
            }
        }
    }
}

/// Result of verifying a single claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub claim_id: String,
    pub status: VerifyStatus,
    /// Ring the check ran in, e.g. "exact integers" or "integers mod 32".
    pub ring: String,
    /// Extra context: per-prime notes, checked ranges, recorded anomalies.
    pub detail: String,
    /// Filled by the caller that owns a clock; 0 inside the core library.
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status.is_verified()
    }
}
