//! The checking engine: expand, compare, report.
//!
//! Checks never silently pass: an expression that fails to expand, a prime
//! that violates its side condition, or a depth cap that starves a check
//! each produce a non-verified status.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::claims::{
    Claim, CongruenceClaim, CongruenceKind, DissectionClaim, IdentityClaim, PrimeCondition,
    PrimeFamilyClaim, PrimeSelection,
};
use crate::expr::EtaExpression;
use crate::families::{family_gf, FamilyError, FamilySpec};
use crate::report::{VerificationReport, VerifyStatus};
use crate::ring::CoefficientRing;

/// Knobs shared by all checks.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Order used by identity/dissection claims that do not pin one.
    pub default_order: usize,
    /// Overrides the verify order of identity and dissection claims, and
    /// caps the expansion depth of congruence and prime-family claims
    /// (reporting `OrderTooSmall` when the cap starves a check).
    pub order_override: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            default_order: 400,
            order_override: None,
        }
    }
}

pub(crate) fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LegendreError {
    NotAnOddPrime(u64),
}

impl core::fmt::Display for LegendreError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LegendreError::NotAnOddPrime(p) => write!(f, "{} is not an odd prime", p),
        }
    }
}

/// Legendre symbol (a/p) by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8, LegendreError> {
    if !is_odd_prime(p) {
        return Err(LegendreError::NotAnOddPrime(p));
    }
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(0);
    }
    // a^((p-1)/2) mod p
    let mut base = a % p;
    let mut exp = (p - 1) / 2;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if acc == 1 {
        Ok(1)
    } else if acc == p - 1 {
        Ok(-1)
    } else {
        // cannot happen for prime p
        Ok(0)
    }
}

fn report(id: &str, status: VerifyStatus, ring: String, detail: String) -> VerificationReport {
    VerificationReport {
        claim_id: id.to_string(),
        status,
        ring,
        detail,
        runtime_ms: 0,
    }
}

fn config_error(id: &str, ring: String, message: String) -> VerificationReport {
    report(id, VerifyStatus::ConfigError { message }, ring, String::new())
}

/// Check `lhs == rhs` coefficientwise to the claim's order.
pub fn verify_identity(claim: &IdentityClaim, opts: &VerifyOptions) -> VerificationReport {
    let order = opts
        .order_override
        .or(claim.verify_order)
        .unwrap_or(opts.default_order);
    let ring_desc = claim.ring.describe();
    let lhs = match claim.lhs.expand(order, claim.ring) {
        Ok(s) => s,
        Err(e) => return config_error(&claim.id, ring_desc, format!("ill-formed lhs: {}", e)),
    };
    let rhs = match claim.rhs.expand(order, claim.ring) {
        Ok(s) => s,
        Err(e) => return config_error(&claim.id, ring_desc, format!("ill-formed rhs: {}", e)),
    };
    let upto = order.min(lhs.order()).min(rhs.order());
    match lhs.first_mismatch(&rhs, upto) {
        Ok(None) => report(
            &claim.id,
            VerifyStatus::Verified { order: upto },
            ring_desc,
            String::new(),
        ),
        Ok(Some((index, l, r))) => report(
            &claim.id,
            VerifyStatus::Counterexample { index, lhs: l, rhs: r },
            ring_desc,
            String::new(),
        ),
        Err(e) => config_error(&claim.id, claim.ring.describe(), e.to_string()),
    }
}

/// Check that extracting class (m, r) of the source equals the result.
pub fn verify_dissection(claim: &DissectionClaim, opts: &VerifyOptions) -> VerificationReport {
    let order = opts
        .order_override
        .or(claim.verify_order)
        .unwrap_or(opts.default_order);
    let ring = CoefficientRing::Exact;
    let ring_desc = ring.describe();
    let extracted = EtaExpression::Dissect {
        inner: alloc::boxed::Box::new(claim.source.clone()),
        m: crate::expr::IntExpr::Lit(claim.modulus as i64),
        r: crate::expr::IntExpr::Lit(claim.residue as i64),
    };
    let lhs = match extracted.expand(order, ring) {
        Ok(s) => s,
        Err(e) => return config_error(&claim.id, ring_desc, format!("ill-formed source: {}", e)),
    };
    let rhs = match claim.result.expand(order, ring) {
        Ok(s) => s,
        Err(e) => return config_error(&claim.id, ring_desc, format!("ill-formed result: {}", e)),
    };
    let upto = order.min(lhs.order()).min(rhs.order());
    match lhs.first_mismatch(&rhs, upto) {
        Ok(None) => report(
            &claim.id,
            VerifyStatus::Verified { order: upto },
            ring_desc,
            format!("class {} mod {}", claim.residue, claim.modulus),
        ),
        Ok(Some((index, l, r))) => report(
            &claim.id,
            VerifyStatus::Counterexample { index, lhs: l, rhs: r },
            ring_desc,
            format!("class {} mod {}", claim.residue, claim.modulus),
        ),
        Err(e) => config_error(&claim.id, ring.describe(), e.to_string()),
    }
}

fn expand_family(
    family: FamilySpec,
    depth: usize,
    ring: CoefficientRing,
) -> Result<crate::series::TruncatedSeries, FamilyError> {
    family_gf(family, depth, ring)
}

/// Deepest coefficient index (+1) a progression check touches, with
/// overflow detection for hostile manifest values.
fn progression_depth(a: u64, b: u64, n_max: u64, scale: u64, alpha_max: u32) -> Option<usize> {
    let top = a
        .checked_mul(n_max)
        .and_then(|v| v.checked_add(b))?
        .checked_mul(scale.checked_pow(alpha_max)?)?;
    usize::try_from(top.checked_add(1)?).ok()
}

/// Check a registered congruence claim on its full prefix.
pub fn check_progression(claim: &CongruenceClaim, opts: &VerifyOptions) -> VerificationReport {
    let (a, b) = claim.progression;
    let n_max = claim.n_max;
    let overflow = |ring: &CoefficientRing| {
        config_error(
            &claim.id,
            ring.describe(),
            String::from("progression index range overflows"),
        )
    };
    match &claim.kind {
        CongruenceKind::Vanishing => {
            let m = claim.modulus.expect("vanishing claims carry a modulus");
            let ring = CoefficientRing::Modular(m);
            let needed = match progression_depth(a, b, n_max, 1, 0) {
                Some(d) => d,
                None => return overflow(&ring),
            };
            if let Some(cap) = opts.order_override {
                if needed > cap {
                    return report(
                        &claim.id,
                        VerifyStatus::OrderTooSmall { needed, had: cap },
                        ring.describe(),
                        String::new(),
                    );
                }
            }
            let gf = match expand_family(claim.family, needed, ring) {
                Ok(s) => s,
                Err(e) => return config_error(&claim.id, ring.describe(), e.to_string()),
            };
            for n in 0..=n_max {
                let idx = (a * n + b) as usize;
                let res = gf.residue(idx).unwrap_or(0);
                if res != 0 {
                    return report(
                        &claim.id,
                        VerifyStatus::Counterexample {
                            index: idx,
                            lhs: res.to_string(),
                            rhs: String::from("0"),
                        },
                        ring.describe(),
                        format!("at n = {}", n),
                    );
                }
            }
            report(
                &claim.id,
                VerifyStatus::Verified { order: needed },
                ring.describe(),
                format!("{}n+{} vanishes mod {} for n <= {}", a, b, m, n_max),
            )
        }
        CongruenceKind::ScaledRelation {
            scale,
            alpha_max,
            alternating,
        } => {
            let m = claim.modulus.expect("relation claims carry a modulus");
            let ring = CoefficientRing::Modular(m);
            let needed = match progression_depth(a, b, n_max, *scale, *alpha_max) {
                Some(d) => d,
                None => return overflow(&ring),
            };
            if let Some(cap) = opts.order_override {
                if needed > cap {
                    return report(
                        &claim.id,
                        VerifyStatus::OrderTooSmall { needed, had: cap },
                        ring.describe(),
                        String::new(),
                    );
                }
            }
            let gf = match expand_family(claim.family, needed, ring) {
                Ok(s) => s,
                Err(e) => return config_error(&claim.id, ring.describe(), e.to_string()),
            };
            for alpha in 1..=*alpha_max {
                let s_pow = scale.pow(alpha);
                let negate = *alternating && alpha % 2 == 1;
                for n in 0..=n_max {
                    let base_idx = (a * n + b) as usize;
                    let scaled_idx = s_pow as usize * base_idx;
                    let lhs = gf.residue(scaled_idx).unwrap_or(0);
                    let base = gf.residue(base_idx).unwrap_or(0);
                    let rhs = if negate { (m - base) % m } else { base };
                    if lhs != rhs {
                        return report(
                            &claim.id,
                            VerifyStatus::Counterexample {
                                index: scaled_idx,
                                lhs: lhs.to_string(),
                                rhs: rhs.to_string(),
                            },
                            ring.describe(),
                            format!("alpha = {}, n = {}", alpha, n),
                        );
                    }
                }
            }
            report(
                &claim.id,
                VerifyStatus::Verified { order: needed },
                ring.describe(),
                format!(
                    "{}^a({}n+{}) relation mod {} for a <= {}, n <= {}",
                    scale, a, b, m, alpha_max, n_max
                ),
            )
        }
        CongruenceKind::FamilyRelation { other } => {
            let m = claim.modulus.expect("relation claims carry a modulus");
            let ring = CoefficientRing::Modular(m);
            let needed = match progression_depth(a, b, n_max, 1, 0) {
                Some(d) => d,
                None => return overflow(&ring),
            };
            if let Some(cap) = opts.order_override {
                if needed > cap {
                    return report(
                        &claim.id,
                        VerifyStatus::OrderTooSmall { needed, had: cap },
                        ring.describe(),
                        String::new(),
                    );
                }
            }
            let lhs_gf = match expand_family(claim.family, needed, ring) {
                Ok(s) => s,
                Err(e) => return config_error(&claim.id, ring.describe(), e.to_string()),
            };
            let rhs_gf = match expand_family(*other, needed, ring) {
                Ok(s) => s,
                Err(e) => return config_error(&claim.id, ring.describe(), e.to_string()),
            };
            for n in 0..=n_max {
                let idx = (a * n + b) as usize;
                let l = lhs_gf.residue(idx).unwrap_or(0);
                let r = rhs_gf.residue(idx).unwrap_or(0);
                if l != r {
                    return report(
                        &claim.id,
                        VerifyStatus::Counterexample {
                            index: idx,
                            lhs: l.to_string(),
                            rhs: r.to_string(),
                        },
                        ring.describe(),
                        format!("at n = {}", n),
                    );
                }
            }
            report(
                &claim.id,
                VerifyStatus::Verified { order: needed },
                ring.describe(),
                format!("families agree at {}n+{} mod {} for n <= {}", a, b, m, n_max),
            )
        }
        CongruenceKind::ExactEquality {
            rhs_family,
            rhs_progression,
            rhs_scalar,
        } => {
            let ring = CoefficientRing::Exact;
            let (ra, rb) = *rhs_progression;
            let (lhs_needed, rhs_needed) = match (
                progression_depth(a, b, n_max, 1, 0),
                progression_depth(ra, rb, n_max, 1, 0),
            ) {
                (Some(l), Some(r)) => (l, r),
                _ => return overflow(&ring),
            };
            let needed = lhs_needed.max(rhs_needed);
            if let Some(cap) = opts.order_override {
                if needed > cap {
                    return report(
                        &claim.id,
                        VerifyStatus::OrderTooSmall { needed, had: cap },
                        ring.describe(),
                        String::new(),
                    );
                }
            }
            let lhs_gf = match expand_family(claim.family, lhs_needed, ring) {
                Ok(s) => s,
                Err(e) => return config_error(&claim.id, ring.describe(), e.to_string()),
            };
            let rhs_gf = match expand_family(*rhs_family, rhs_needed, ring) {
                Ok(s) => s,
                Err(e) => return config_error(&claim.id, ring.describe(), e.to_string()),
            };
            let scalar = BigInt::from(*rhs_scalar);
            for n in 0..=n_max {
                let l = lhs_gf.coeff_bigint((a * n + b) as usize);
                let r = &scalar * rhs_gf.coeff_bigint((ra * n + rb) as usize);
                if l != r {
                    return report(
                        &claim.id,
                        VerifyStatus::Counterexample {
                            index: n as usize,
                            lhs: l.to_string(),
                            rhs: r.to_string(),
                        },
                        ring.describe(),
                        format!("lhs({}n+{}) vs {}*rhs({}n+{}) at n", a, b, rhs_scalar, ra, rb),
                    );
                }
            }
            report(
                &claim.id,
                VerifyStatus::Verified { order: needed },
                ring.describe(),
                format!("exact equality for n <= {}", n_max),
            )
        }
    }
}

fn condition_holds(cond: &PrimeCondition, p: u64) -> bool {
    match cond {
        PrimeCondition::LegendreIs { a, value } => legendre(*a, p) == Ok(*value),
        PrimeCondition::ResidueClass { c, modulus } => p % modulus == *c,
    }
}

fn resolve_primes(claim: &PrimeFamilyClaim) -> Result<Vec<u64>, String> {
    match &claim.primes {
        PrimeSelection::Auto(k) => {
            let mut out = Vec::new();
            let mut p = 5u64;
            while out.len() < *k {
                if p > 10_000 {
                    return Err(format!(
                        "no {} primes below 10000 satisfy {}",
                        k, claim.condition
                    ));
                }
                if is_odd_prime(p) && condition_holds(&claim.condition, p) {
                    out.push(p);
                }
                p += 2;
            }
            Ok(out)
        }
        PrimeSelection::List(list) => {
            for &p in list {
                if p < 5 || !is_odd_prime(p) {
                    return Err(format!("{} is not a prime >= 5", p));
                }
                if !condition_holds(&claim.condition, p) {
                    return Err(format!(
                        "prime {} violates the side condition {}",
                        p, claim.condition
                    ));
                }
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            Ok(sorted)
        }
    }
}

/// Check a prime-indexed family for every registered prime.
pub fn check_prime_family(claim: &PrimeFamilyClaim, opts: &VerifyOptions) -> VerificationReport {
    let ring = CoefficientRing::Modular(claim.modulus);
    let primes = match resolve_primes(claim) {
        Ok(ps) => ps,
        Err(msg) => return config_error(&claim.id, ring.describe(), msg),
    };
    let smallest = primes[0];
    let mut detail = String::new();
    let mut max_depth_checked = 0usize;
    for &p in &primes {
        // alpha levels for this prime
        let mut levels = alloc::vec![(0u32, claim.n_max)];
        if p == smallest {
            if let Some(n1) = claim.alpha1_n_max {
                levels.push((1, n1));
            }
        }
        let index_of = |alpha: u32, i: u64, n: u64| -> u128 {
            let p = p as u128;
            let pow_even = p.pow(2 * alpha + 2);
            let pow_odd = p.pow(2 * alpha + 1);
            claim.coef_n as u128 * pow_even * n as u128
                + (claim.coef_i as u128 * i as u128 + claim.coef_p as u128 * p) * pow_odd
                + claim.offset as u128
        };
        let mut needed: u128 = 0;
        for &(alpha, nmax) in &levels {
            needed = needed.max(index_of(alpha, p - 1, nmax) + 1);
        }
        let needed = needed as usize;
        if let Some(cap) = opts.order_override {
            if needed > cap {
                return report(
                    &claim.id,
                    VerifyStatus::OrderTooSmall { needed, had: cap },
                    ring.describe(),
                    format!("prime {} needs {} coefficients", p, needed),
                );
            }
        }
        let gf = match expand_family(claim.family, needed, ring) {
            Ok(s) => s,
            Err(e) => return config_error(&claim.id, ring.describe(), e.to_string()),
        };
        max_depth_checked = max_depth_checked.max(needed);
        for &(alpha, nmax) in &levels {
            for i in 1..p {
                for n in 0..=nmax {
                    let idx = index_of(alpha, i, n) as usize;
                    let res = gf.residue(idx).unwrap_or(0);
                    if res != 0 {
                        return report(
                            &claim.id,
                            VerifyStatus::Counterexample {
                                index: idx,
                                lhs: res.to_string(),
                                rhs: String::from("0"),
                            },
                            ring.describe(),
                            format!("p = {}, alpha = {}, i = {}, n = {}", p, alpha, i, n),
                        );
                    }
                }
            }
        }
        if !detail.is_empty() {
            detail.push_str("; ");
        }
        detail.push_str(&format!("p={} ok (alpha<={})", p, levels.len() - 1));
        if let Some(a) = claim.note_legendre {
            if let Ok(sym) = legendre(a, p) {
                detail.push_str(&format!(" [legendre({}|{}) = {}]", a, p, sym));
            }
        }
    }
    report(
        &claim.id,
        VerifyStatus::Verified {
            order: max_depth_checked,
        },
        ring.describe(),
        detail,
    )
}

/// Dispatch on the claim kind.
pub fn verify_claim(claim: &Claim, opts: &VerifyOptions) -> VerificationReport {
    match claim {
        Claim::Identity(c) => verify_identity(c, opts),
        Claim::Dissection(c) => verify_dissection(c, opts),
        Claim::Congruence(c) => check_progression(c, opts),
        Claim::PrimeFamily(c) => check_prime_family(c, opts),
    }
}

/// All residues B < A whose progression An+B vanishes mod `modulus` for
/// every n <= n_max. The output is conjectural: a candidate only means no
/// counterexample below the bound.
pub fn scan_progressions(
    family: FamilySpec,
    a: u64,
    modulus: u64,
    n_max: u64,
) -> Result<Vec<u64>, FamilyError> {
    if modulus == 1 {
        // everything is 0 mod 1
        return Ok((0..a).collect());
    }
    let ring = CoefficientRing::Modular(modulus);
    let depth = a
        .checked_mul(n_max)
        .and_then(|v| v.checked_add(a))
        .and_then(|v| usize::try_from(v).ok())
        .expect("scan range overflows the addressable order");
    let gf = family_gf(family, depth, ring)?;
    let mut out = Vec::new();
    for b in 0..a {
        let mut all_zero = true;
        for n in 0..=n_max {
            let idx = (a * n + b) as usize;
            if idx >= gf.order() {
                break;
            }
            if gf.residue(idx).unwrap_or(0) != 0 {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            out.push(b);
        }
    }
    Ok(out)
}

/// Deterministically corrupt an expression: the first subtraction becomes
/// an addition (or vice versa); failing that, the first scalar is bumped.
/// Used by mutation-soundness checks to show the harness cannot pass
/// vacuously.
pub fn mutate_expression(expr: &EtaExpression) -> EtaExpression {
    fn flip(e: &EtaExpression, done: &mut bool) -> EtaExpression {
        if *done {
            return e.clone();
        }
        match e {
            EtaExpression::Sub(a, b) => {
                *done = true;
                EtaExpression::Add(a.clone(), b.clone())
            }
            EtaExpression::Add(a, b) => {
                *done = true;
                EtaExpression::Sub(a.clone(), b.clone())
            }
            EtaExpression::Mul(a, b) => {
                let new_a = flip(a, done);
                let new_b = flip(b, done);
                EtaExpression::Mul(alloc::boxed::Box::new(new_a), alloc::boxed::Box::new(new_b))
            }
            EtaExpression::Div(a, b) => {
                let new_a = flip(a, done);
                let new_b = flip(b, done);
                EtaExpression::Div(alloc::boxed::Box::new(new_a), alloc::boxed::Box::new(new_b))
            }
            EtaExpression::Neg(a) => EtaExpression::Neg(alloc::boxed::Box::new(flip(a, done))),
            EtaExpression::Pow(a, e2) => {
                EtaExpression::Pow(alloc::boxed::Box::new(flip(a, done)), e2.clone())
            }
            EtaExpression::Scalar(c) => {
                *done = true;
                EtaExpression::Scalar(c + 1)
            }
            other => other.clone(),
        }
    }
    let mut done = false;
    let mutated = flip(expr, &mut done);
    if done {
        mutated
    } else {
        // last resort: negate the whole expression
        EtaExpression::Neg(alloc::boxed::Box::new(expr.clone()))
    }
}

/// Corrupt one claim's right-hand side (identity and dissection claims).
/// Returns None for claim kinds without an expression side.
pub fn mutate_claim(claim: &Claim) -> Option<Claim> {
    match claim {
        Claim::Identity(c) => {
            let mut c = c.clone();
            c.rhs = mutate_expression(&c.rhs);
            Some(Claim::Identity(c))
        }
        Claim::Dissection(c) => {
            let mut c = c.clone();
            c.result = mutate_expression(&c.result);
            Some(Claim::Dissection(c))
        }
        _ => None,
    }
}

/// Exact-ring spot check of a modular claim: recompute the first few
/// indices over Z, reduce, and compare with the modular-ring run.
pub fn exact_spot_check(claim: &CongruenceClaim, indices: u64) -> Result<bool, String> {
    let m = match claim.modulus {
        Some(m) => m,
        None => return Err(String::from("exact-equality claims have no modulus")),
    };
    let (a, b) = claim.progression;
    let depth = (a * indices + b + 1) as usize;
    let exact = family_gf(claim.family, depth, CoefficientRing::Exact).map_err(|e| e.to_string())?;
    let modular =
        family_gf(claim.family, depth, CoefficientRing::Modular(m)).map_err(|e| e.to_string())?;
    let reduced = exact.reduce_mod(m).map_err(|e| e.to_string())?;
    for n in 0..=indices {
        let idx = (a * n + b) as usize;
        if reduced.residue(idx) != modular.residue(idx) {
            return Ok(false);
        }
        if claim.kind == CongruenceKind::Vanishing {
            let c = exact.coeff_bigint(idx);
            let is_divisible = (&c % BigInt::from(m)).is_zero();
            if is_divisible != (modular.residue(idx) == Some(0)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
