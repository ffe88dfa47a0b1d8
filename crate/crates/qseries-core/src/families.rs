//! Counting-function families — overpartitions, t-Schur partitions and
//! their overpartition analogues — both as eta-quotient generating
//! functions and as independent brute-force enumeration oracles.
//!
//! The oracles deliberately share no code with the series layer: they
//! recurse over explicit part multisets so that agreement between the two
//! paths is evidence, not tautology.

use alloc::vec::Vec;
use core::fmt;

use crate::ring::CoefficientRing;
use crate::series::TruncatedSeries;
use crate::special::{eta_quotient, EtaQuotientSpec, SpecialError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyError {
    /// t must be odd and at least 3.
    InvalidT(u64),
    /// r must be at least 1.
    InvalidR(u64),
    Special(SpecialError),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::InvalidT(t) => write!(f, "t must be odd and >= 3, got {}", t),
            FamilyError::InvalidR(r) => write!(f, "r must be >= 1, got {}", r),
            FamilyError::Special(e) => write!(f, "{}", e),
        }
    }
}

impl From<SpecialError> for FamilyError {
    fn from(e: SpecialError) -> Self {
        FamilyError::Special(e)
    }
}

/// A counting-function family with an eta-quotient generating function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    /// Overpartitions of n.
    Overpartition,
    /// t-Schur partitions: distinct parts not divisible by t.
    TSchur { t: u64 },
    /// t-Schur overpartitions.
    TSchurOver { t: u64 },
    /// t-Schur overpartitions with r-tuples.
    TSchurOverTuple { t: u64, r: u64 },
}

fn check_t(t: u64) -> Result<(), FamilyError> {
    if t < 3 || t.is_multiple_of(2) {
        return Err(FamilyError::InvalidT(t));
    }
    Ok(())
}

impl FamilySpec {
    pub fn overpartition() -> Self {
        FamilySpec::Overpartition
    }

    pub fn t_schur(t: u64) -> Result<Self, FamilyError> {
        check_t(t)?;
        Ok(FamilySpec::TSchur { t })
    }

    pub fn t_schur_over(t: u64) -> Result<Self, FamilyError> {
        check_t(t)?;
        Ok(FamilySpec::TSchurOver { t })
    }

    pub fn t_schur_over_tuple(t: u64, r: u64) -> Result<Self, FamilyError> {
        check_t(t)?;
        if r < 1 {
            return Err(FamilyError::InvalidR(r));
        }
        Ok(FamilySpec::TSchurOverTuple { t, r })
    }

    /// The eta-quotient form of the family's generating function.
    pub fn eta_spec(&self) -> EtaQuotientSpec {
        match *self {
            // (-q;q)_inf / (q;q)_inf = f_2 / f_1^2
            FamilySpec::Overpartition => EtaQuotientSpec::from_factors(&[(2, 1), (1, -2)]),
            // f_2 f_t / (f_1 f_2t)
            FamilySpec::TSchur { t } => {
                EtaQuotientSpec::from_factors(&[(2, 1), (t, 1), (1, -1), (2 * t, -1)])
            }
            // f_2^3 f_t^2 f_4t / (f_1^2 f_4 f_2t^3)
            FamilySpec::TSchurOver { t } => EtaQuotientSpec::from_factors(&[
                (2, 3),
                (t, 2),
                (4 * t, 1),
                (1, -2),
                (4, -1),
                (2 * t, -3),
            ]),
            FamilySpec::TSchurOverTuple { t, r } => {
                let r = r as i64;
                EtaQuotientSpec::from_factors(&[
                    (2, 3 * r),
                    (t, 2 * r),
                    (4 * t, r),
                    (1, -2 * r),
                    (4, -r),
                    (2 * t, -3 * r),
                ])
            }
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Overpartition => write!(f, "overpartition"),
            FamilySpec::TSchur { t } => write!(f, "tschur {}", t),
            FamilySpec::TSchurOver { t } => write!(f, "tschur-over {}", t),
            FamilySpec::TSchurOverTuple { t, r } => write!(f, "tschur-over-tuple {} {}", t, r),
        }
    }
}

/// Expand the family's generating function to the given order.
pub fn family_gf(
    spec: FamilySpec,
    order: usize,
    ring: CoefficientRing,
) -> Result<TruncatedSeries, FamilyError> {
    Ok(eta_quotient(&spec.eta_spec(), order, ring)?)
}

/// Count overpartitions of `n` whose parts satisfy `allowed_part`.
///
/// The overlining rule contributes a factor 2 per distinct part used, so
/// the count is `sum over part-multisets of 2^{#distinct parts}`.
pub fn enumerate_overpartitions(n: u64, allowed_part: impl Fn(u64) -> bool) -> u64 {
    let parts: Vec<u64> = (1..=n).filter(|&p| allowed_part(p)).collect();
    // memo[idx][rem]: count using parts[idx..] summing to rem
    let mut memo = alloc::vec![alloc::vec![u64::MAX; n as usize + 1]; parts.len() + 1];
    fn rec(parts: &[u64], memo: &mut [Vec<u64>], idx: usize, rem: u64) -> u64 {
        if rem == 0 {
            return 1;
        }
        if idx == parts.len() {
            return 0;
        }
        if memo[idx][rem as usize] != u64::MAX {
            return memo[idx][rem as usize];
        }
        // skip this part, or use it with multiplicity >= 1 (2 ways to
        // decorate the first occurrence)
        let mut total = rec(parts, memo, idx + 1, rem);
        let mut used = parts[idx];
        while used <= rem {
            total += 2 * rec(parts, memo, idx + 1, rem - used);
            used += parts[idx];
        }
        memo[idx][rem as usize] = total;
        total
    }
    rec(&parts, &mut memo, 0, n)
}

/// Count partitions of `n` into distinct parts not divisible by `t`.
pub fn oracle_t_schur(t: u64, n: u64) -> Result<u64, FamilyError> {
    check_t(t)?;
    let parts: Vec<u64> = (1..=n).filter(|&p| p % t != 0).collect();
    Ok(count_distinct(&parts, n))
}

fn count_distinct(parts: &[u64], n: u64) -> u64 {
    let mut memo = alloc::vec![alloc::vec![u64::MAX; n as usize + 1]; parts.len() + 1];
    fn rec(parts: &[u64], memo: &mut [Vec<u64>], idx: usize, rem: u64) -> u64 {
        if rem == 0 {
            return 1;
        }
        if idx == parts.len() {
            return 0;
        }
        if memo[idx][rem as usize] != u64::MAX {
            return memo[idx][rem as usize];
        }
        let mut total = rec(parts, memo, idx + 1, rem);
        if parts[idx] <= rem {
            total += rec(parts, memo, idx + 1, rem - parts[idx]);
        }
        memo[idx][rem as usize] = total;
        total
    }
    rec(parts, &mut memo, 0, n)
}

/// Count t-Schur overpartitions of `n` through the equivalent class of
/// partitions of `2n` into parts not divisible by `t` in which each odd
/// part present occurs exactly twice and even parts are distinct.
pub fn oracle_t_schur_over(t: u64, n: u64) -> Result<u64, FamilyError> {
    check_t(t)?;
    let target = 2 * n;
    // For odd parts the usable unit is a pair (weight 2p); even parts are
    // used at most once.
    let units: Vec<u64> = (1..=target)
        .filter(|&p| p % t != 0)
        .map(|p| if p % 2 == 1 { 2 * p } else { p })
        .filter(|&w| w <= target)
        .collect();
    Ok(count_distinct(&units, target))
}

/// Count t-Schur overpartitions of `n` read directly off the generating
/// product: overpartitions of `n` into odd parts not divisible by `t`.
pub fn oracle_t_schur_over_direct(t: u64, n: u64) -> Result<u64, FamilyError> {
    check_t(t)?;
    Ok(enumerate_overpartitions(n, |p| p % 2 == 1 && p % t != 0))
}

/// Count partitions of `n` into odd parts (2-regular) where no part occurs
/// `t` or more times — the second equivalent characterization of `S_t(n)`.
pub fn oracle_t_schur_regular(t: u64, n: u64) -> Result<u64, FamilyError> {
    check_t(t)?;
    let parts: Vec<u64> = (1..=n).filter(|&p| p % 2 == 1).collect();
    let mut memo = alloc::vec![alloc::vec![u64::MAX; n as usize + 1]; parts.len() + 1];
    fn rec(parts: &[u64], memo: &mut [Vec<u64>], max_mult: u64, idx: usize, rem: u64) -> u64 {
        if rem == 0 {
            return 1;
        }
        if idx == parts.len() {
            return 0;
        }
        if memo[idx][rem as usize] != u64::MAX {
            return memo[idx][rem as usize];
        }
        let mut total = 0;
        let mut used = 0u64;
        let mut mult = 0u64;
        while used <= rem && mult < max_mult {
            total += rec(parts, memo, max_mult, idx + 1, rem - used);
            used += parts[idx];
            mult += 1;
        }
        memo[idx][rem as usize] = total;
        total
    }
    Ok(rec(&parts, &mut memo, t, 0, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    const EXACT: CoefficientRing = CoefficientRing::Exact;

    #[test]
    fn overpartition_gf_prefix() {
        let s = family_gf(FamilySpec::Overpartition, 6, EXACT).unwrap();
        let expected = TruncatedSeries::from_integers(EXACT, &[1, 2, 4, 8, 14, 24]).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn s5_of_6_is_8_three_ways() {
        let spec = FamilySpec::t_schur_over(5).unwrap();
        let s = family_gf(spec, 7, EXACT).unwrap();
        assert_eq!(s.coeff_bigint(6), BigInt::from(8));
        assert_eq!(oracle_t_schur_over(5, 6).unwrap(), 8);
        assert_eq!(oracle_t_schur_over_direct(5, 6).unwrap(), 8);
    }

    #[test]
    fn tuple_r1_equals_base_family() {
        let a = family_gf(FamilySpec::t_schur_over_tuple(3, 1).unwrap(), 40, EXACT).unwrap();
        let b = family_gf(FamilySpec::t_schur_over(3).unwrap(), 40, EXACT).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(matches!(FamilySpec::t_schur_over(4), Err(FamilyError::InvalidT(4))));
        assert!(matches!(FamilySpec::t_schur_over(1), Err(FamilyError::InvalidT(1))));
        assert!(matches!(
            FamilySpec::t_schur_over_tuple(3, 0),
            Err(FamilyError::InvalidR(0))
        ));
    }

    #[test]
    fn overpartition_count_small() {
        assert_eq!(enumerate_overpartitions(0, |_| true), 1);
        assert_eq!(enumerate_overpartitions(1, |_| true), 2);
        // p-bar(5) = 24 from the generating function prefix
        assert_eq!(enumerate_overpartitions(5, |_| true), 24);
    }

    #[test]
    fn direct_oracle_small_cases() {
        // overpartitions of 2 into parts {1, 5, 7, ...}: (1,1), (overlined 1, 1)
        assert_eq!(oracle_t_schur_over_direct(3, 2).unwrap(), 2);
        assert_eq!(oracle_t_schur_over_direct(3, 0).unwrap(), 1);
    }

    #[test]
    fn t_schur_oracle_hand_cases() {
        assert_eq!(oracle_t_schur(3, 0).unwrap(), 1);
        // distinct parts of 5 avoiding multiples of 5: 4+1, 3+2
        assert_eq!(oracle_t_schur(5, 5).unwrap(), 2);
    }

    #[test]
    fn t_schur_matches_series() {
        let spec = FamilySpec::t_schur(3).unwrap();
        let s = family_gf(spec, 31, EXACT).unwrap();
        for n in 0..=30u64 {
            assert_eq!(
                s.coeff_bigint(n as usize),
                BigInt::from(oracle_t_schur(3, n).unwrap()),
                "n={}",
                n
            );
        }
    }

    #[test]
    fn triple_agreement_over_families() {
        for t in [3u64, 5, 9] {
            let spec = FamilySpec::t_schur_over(t).unwrap();
            let s = family_gf(spec, 26, EXACT).unwrap();
            for n in 0..=25u64 {
                let series = s.coeff_bigint(n as usize);
                let by_2n = oracle_t_schur_over(t, n).unwrap();
                let direct = oracle_t_schur_over_direct(t, n).unwrap();
                assert_eq!(series, BigInt::from(by_2n), "t={} n={} (2n-class)", t, n);
                assert_eq!(by_2n, direct, "t={} n={} (oracle pair)", t, n);
            }
        }
    }

    #[test]
    fn s_t_three_characterizations_agree() {
        for t in [3u64, 5] {
            let spec = FamilySpec::t_schur(t).unwrap();
            let s = family_gf(spec, 26, EXACT).unwrap();
            for n in 0..=25u64 {
                let product = s.coeff_bigint(n as usize);
                let distinct = oracle_t_schur(t, n).unwrap();
                let regular = oracle_t_schur_regular(t, n).unwrap();
                assert_eq!(product, BigInt::from(distinct), "t={} n={}", t, n);
                assert_eq!(distinct, regular, "t={} n={}", t, n);
            }
        }
    }
}
