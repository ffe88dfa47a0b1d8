//! The named series of classical q-series theory: Euler products `f_k`,
//! q-Pochhammer symbols, Ramanujan theta functions, the weighted theta
//! series entering the p-dissection of `f_1^3`, and eta quotients.
//!
//! Everything here is generated from bilateral sums or products — never
//! from hard-coded coefficient tables — so the test oracles (direct
//! product expansion, direct summation) exercise an independent path.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::ring::CoefficientRing;
use crate::series::{SeriesError, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecialError {
    Series(SeriesError),
    /// Subscript of an Euler product must be >= 1.
    ZeroSubscript,
    /// `(+q^0; q)_inf` has a vanishing factor infinitely often.
    VanishingInfiniteProduct,
    /// Theta arguments must have nonnegative exponents with positive sum.
    InvalidThetaExponents { a_exp: i64, b_exp: i64 },
    InvalidSign(i64),
    /// B_k requires an odd prime p.
    NotAnOddPrime(u64),
    /// The half-integral B_k did not resolve to integers (it never does in
    /// isolation; pairs k and -1-k must be combined first).
    HalfIntegerCoefficient { p: u64, k: i64, index: usize },
    /// B_k halving is only defined over the exact ring.
    ExactRingRequired(&'static str),
}

impl fmt::Display for SpecialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialError::Series(e) => write!(f, "{}", e),
            SpecialError::ZeroSubscript => write!(f, "Euler product subscript must be >= 1"),
            SpecialError::VanishingInfiniteProduct => {
                write!(f, "infinite Pochhammer product with constant vanishing factor")
            }
            SpecialError::InvalidThetaExponents { a_exp, b_exp } => {
                write!(f, "theta exponents ({}, {}) invalid: need both >= 0, sum >= 1", a_exp, b_exp)
            }
            SpecialError::InvalidSign(s) => write!(f, "sign must be +1 or -1, got {}", s),
            SpecialError::NotAnOddPrime(p) => write!(f, "{} is not an odd prime", p),
            SpecialError::HalfIntegerCoefficient { p, k, index } => write!(
                f,
                "B_{}(q) for p={} has a half-integer coefficient at q^{}; only the paired sum over k and -1-k is integral",
                k, p, index
            ),
            SpecialError::ExactRingRequired(what) => {
                write!(f, "{} requires the exact integer ring", what)
            }
        }
    }
}

impl From<SeriesError> for SpecialError {
    fn from(e: SeriesError) -> Self {
        SpecialError::Series(e)
    }
}

/// Expansion of `f_k = (q^k; q^k)_inf` to the given order, via the
/// pentagonal-number bilateral sum.
pub fn euler_f(k: u64, order: usize, ring: CoefficientRing) -> Result<TruncatedSeries, SpecialError> {
    if k == 0 {
        return Err(SpecialError::ZeroSubscript);
    }
    Ok(TruncatedSeries::one(ring, order).mul_euler_factor(k))
}

/// The q-shifted factorial `(a; q^step)_n` with `a = a_sign * q^{a_exp}`.
/// `n = None` means the infinite product, truncated once every further
/// factor is 1 up to the requested order.
pub fn pochhammer(
    a_sign: i64,
    a_exp: u64,
    q_step: u64,
    n: Option<u64>,
    order: usize,
    ring: CoefficientRing,
) -> Result<TruncatedSeries, SpecialError> {
    if a_sign != 1 && a_sign != -1 {
        return Err(SpecialError::InvalidSign(a_sign));
    }
    if q_step == 0 {
        return Err(SpecialError::ZeroSubscript);
    }
    if a_sign == 1 && a_exp == 0 && n.is_none() {
        return Err(SpecialError::VanishingInfiniteProduct);
    }
    let mut acc = TruncatedSeries::one(ring, order);
    let mut i: u64 = 0;
    loop {
        if let Some(n) = n {
            if i >= n {
                break;
            }
        }
        let exp = a_exp as u128 + q_step as u128 * i as u128;
        if exp >= order as u128 {
            // every further factor is 1 up to this order
            break;
        }
        if exp == 0 && a_sign == 1 {
            // finite product with a vanishing factor: the whole product is 0
            return Ok(TruncatedSeries::zero(ring, order));
        }
        acc = acc.mul_binomial(exp as usize, -a_sign);
        i += 1;
    }
    Ok(acc)
}

/// A theta-function argument pair `(a, b) = (a_sign q^{a_exp}, b_sign q^{b_exp})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaMonomialPair {
    a_sign: i8,
    a_exp: u64,
    b_sign: i8,
    b_exp: u64,
}

impl ThetaMonomialPair {
    /// Formal convergence needs `a_exp + b_exp >= 1` (the exponent grows
    /// along the bilateral sum).
    pub fn new(a_sign: i64, a_exp: i64, b_sign: i64, b_exp: i64) -> Result<Self, SpecialError> {
        if a_sign.abs() != 1 {
            return Err(SpecialError::InvalidSign(a_sign));
        }
        if b_sign.abs() != 1 {
            return Err(SpecialError::InvalidSign(b_sign));
        }
        if a_exp < 0 || b_exp < 0 || a_exp + b_exp < 1 {
            return Err(SpecialError::InvalidThetaExponents { a_exp, b_exp });
        }
        Ok(ThetaMonomialPair {
            a_sign: a_sign as i8,
            a_exp: a_exp as u64,
            b_sign: b_sign as i8,
            b_exp: b_exp as u64,
        })
    }
}

fn triangular(n: i64) -> i64 {
    n * (n + 1) / 2
}

/// Ramanujan's general theta function
/// `f(a, b) = sum_n a^{n(n+1)/2} b^{n(n-1)/2}` as a bilateral sum. Both
/// tails are scanned until their exponents exceed the order, so no
/// in-range exponent is missed.
pub fn theta_f(
    pair: ThetaMonomialPair,
    order: usize,
    ring: CoefficientRing,
) -> Result<TruncatedSeries, SpecialError> {
    let mut coeffs = alloc::vec![BigInt::zero(); order];
    let a_exp = pair.a_exp as i64;
    let b_exp = pair.b_exp as i64;
    let mut apply = |n: i64| -> bool {
        let ta = triangular(n); // n(n+1)/2, always >= 0
        let tb = triangular(n - 1); // n(n-1)/2, always >= 0
        let e = a_exp * ta + b_exp * tb;
        if e as u128 >= order as u128 {
            return false;
        }
        let mut sign = 1i64;
        if pair.a_sign < 0 && ta % 2 == 1 {
            sign = -sign;
        }
        if pair.b_sign < 0 && tb % 2 == 1 {
            sign = -sign;
        }
        coeffs[e as usize] += sign;
        true
    };
    // Upward tail: exponent is nondecreasing for n >= 0.
    let mut n = 0i64;
    loop {
        let in_range = apply(n);
        if !in_range && n >= 1 {
            break;
        }
        n += 1;
    }
    // Downward tail: exponent is nondecreasing for n <= -1 as n decreases.
    let mut n = -1i64;
    loop {
        let in_range = apply(n);
        if !in_range {
            break;
        }
        n -= 1;
    }
    Ok(TruncatedSeries::from_bigints(CoefficientRing::Exact, coeffs)?.into_ring(ring))
}

impl TruncatedSeries {
    /// Move an exact series into the requested ring (no-op when exact).
    pub(crate) fn into_ring(self, ring: CoefficientRing) -> TruncatedSeries {
        match ring {
            CoefficientRing::Exact => self,
            CoefficientRing::Modular(m) => self.reduce_mod(m).expect("modulus validated"),
        }
    }
}

/// `phi(q) = f(q, q)`, expanded through its eta-quotient form
/// `f_2^5 / (f_1^2 f_4^2)`.
pub fn phi(order: usize, ring: CoefficientRing) -> Result<TruncatedSeries, SpecialError> {
    eta_quotient(
        &EtaQuotientSpec::from_factors(&[(2, 5), (1, -2), (4, -2)]),
        order,
        ring,
    )
}

/// `psi(q) = f(q, q^3)`, expanded through `f_2^2 / f_1`.
pub fn psi(order: usize, ring: CoefficientRing) -> Result<TruncatedSeries, SpecialError> {
    eta_quotient(&EtaQuotientSpec::from_factors(&[(2, 2), (1, -1)]), order, ring)
}

fn is_odd_prime(p: u64) -> bool {
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

/// The integral (doubled) form of the weighted theta series from the
/// p-dissection of `f_1^3`:
///
/// `2 B_k(q) = sum_n (-1)^n (2pn + 2k + 1) q^{(p n^2 + (2k+1) n)/2}`.
///
/// The classical `B_k` carries a 1/2 that only resolves when the k-th and
/// (-1-k)-th dissection summands are paired; the doubled series keeps every
/// intermediate value in the integer ring.
pub fn b_k_doubled(
    p: u64,
    k: i64,
    order: usize,
    ring: CoefficientRing,
) -> Result<TruncatedSeries, SpecialError> {
    if !is_odd_prime(p) {
        return Err(SpecialError::NotAnOddPrime(p));
    }
    let pi = p as i64;
    let mut coeffs = alloc::vec![BigInt::zero(); order];
    let mut apply = |n: i64| -> bool {
        let num = pi * n * n + (2 * k + 1) * n;
        debug_assert!(num % 2 == 0, "p n^2 + (2k+1) n is always even");
        let e = num / 2;
        if e < 0 || e as u128 >= order as u128 {
            return e < 0; // negative exponents can precede the in-range window
        }
        let w = 2 * pi * n + 2 * k + 1;
        if n % 2 == 0 {
            coeffs[e as usize] += w;
        } else {
            coeffs[e as usize] -= w;
        }
        true
    };
    // |2k+1| < p never holds for arbitrary manifest input, so scan both
    // tails conservatively: exponents are monotone once |n| >= |2k+1|/p + 1.
    let guard = (2 * k + 1).unsigned_abs() as i64 / pi + 2;
    let mut n = 0i64;
    loop {
        let in_range = apply(n);
        if !in_range && n >= guard {
            break;
        }
        n += 1;
    }
    let mut n = -1i64;
    loop {
        let in_range = apply(n);
        if !in_range && -n >= guard {
            break;
        }
        n -= 1;
    }
    Ok(TruncatedSeries::from_bigints(CoefficientRing::Exact, coeffs)?.into_ring(ring))
}

/// The classical `B_k(q)` with its 1/2 factor. Halving is checked: if any
/// doubled coefficient is odd the function reports it instead of rounding.
/// In isolation the weights `2pn + 2k + 1` are odd, so this errors for
/// every genuine `(p, k)`; it exists to document that only paired
/// combinations of `B_k` and `B_{-1-k}` live in the integer ring.
pub fn b_k_series(
    p: u64,
    k: i64,
    order: usize,
    ring: CoefficientRing,
) -> Result<TruncatedSeries, SpecialError> {
    if !ring.is_exact() {
        return Err(SpecialError::ExactRingRequired("b_k_series"));
    }
    let doubled = b_k_doubled(p, k, order, ring)?;
    let mut coeffs = Vec::with_capacity(order);
    let two = BigInt::from(2);
    for i in 0..order {
        let c = doubled.coeff_bigint(i);
        if (&c % &two).is_zero() {
            coeffs.push(c / &two);
        } else {
            return Err(SpecialError::HalfIntegerCoefficient { p, k, index: i });
        }
    }
    Ok(TruncatedSeries::from_bigints(CoefficientRing::Exact, coeffs)?)
}

/// A product of Euler factors `f_k^e` with a scalar and q-power prefactor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotientSpec {
    /// (subscript, exponent), distinct subscripts, no zero exponents.
    pub factors: Vec<(u64, i64)>,
    pub prefactor_qpower: u64,
    pub prefactor_scalar: i64,
}

impl EtaQuotientSpec {
    pub fn new(factors: &[(u64, i64)], prefactor_qpower: u64, prefactor_scalar: i64) -> Self {
        let mut merged: Vec<(u64, i64)> = Vec::new();
        for &(k, e) in factors {
            match merged.iter_mut().find(|(k2, _)| *k2 == k) {
                Some((_, e2)) => *e2 += e,
                None => merged.push((k, e)),
            }
        }
        merged.retain(|&(_, e)| e != 0);
        merged.sort_unstable();
        EtaQuotientSpec {
            factors: merged,
            prefactor_qpower,
            prefactor_scalar,
        }
    }

    pub fn from_factors(factors: &[(u64, i64)]) -> Self {
        Self::new(factors, 0, 1)
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{}", self.prefactor_scalar);
        if self.prefactor_qpower > 0 {
            s += &format!("*q^{}", self.prefactor_qpower);
        }
        for &(k, e) in &self.factors {
            s += &format!("*f{}^{}", k, e);
        }
        s
    }
}

/// Expand `prefactor_scalar * q^{prefactor_qpower} * prod f_k^{e_k}` to the
/// given order. Each factor is applied as a pentagonal-expansion pass, so
/// the cost is O(sum |e_k| * order^1.5) — no dense multiplications.
pub fn eta_quotient(
    spec: &EtaQuotientSpec,
    order: usize,
    ring: CoefficientRing,
) -> Result<TruncatedSeries, SpecialError> {
    for &(k, _) in &spec.factors {
        if k == 0 {
            return Err(SpecialError::ZeroSubscript);
        }
    }
    let mut acc = TruncatedSeries::constant(ring, spec.prefactor_scalar, order);
    for &(k, e) in &spec.factors {
        if e > 0 {
            for _ in 0..e {
                acc = acc.mul_euler_factor(k);
            }
        } else {
            for _ in 0..(-e) {
                acc = acc.div_euler_factor(k);
            }
        }
    }
    if spec.prefactor_qpower > 0 {
        acc = acc.mul_qpower(spec.prefactor_qpower as usize).truncate(order);
    }
    Ok(acc)
}
