//! Arithmetic on truncated formal power series in one variable `q`.
//!
//! A [`TruncatedSeries`] stores the first `order` coefficients of a formal
//! power series; index `j` holds the coefficient of `q^j`. Truncation is
//! tracked, never silently extended: every binary operation propagates the
//! minimum valid order of its inputs, so a "verified to order N" statement
//! never rests on coefficients that were unknown.
//!
//! All operations are pure; series are immutable after construction and
//! safe to share across threads.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ring::{CoefficientRing, MAX_MODULUS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    EmptyCoefficients,
    RingMismatch {
        left: CoefficientRing,
        right: CoefficientRing,
    },
    /// Inversion (or a negative power) of a series whose constant term is
    /// not a unit in the ring.
    NonUnitConstantTerm(String),
    InvalidModulus(u64),
    /// `extract_dissection` residue not below the modulus.
    ResidueOutOfRange { residue: u64, modulus: u64 },
    /// An operation would produce a series with no known coefficients.
    EmptyResult(String),
    /// `substitute_power` with k = 0.
    ZeroPowerSubstitution,
    /// Reducing Modular(m0) into Modular(m) is only a ring map when m | m0.
    InvalidReduction { from: u64, to: u64 },
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::EmptyCoefficients => write!(f, "series needs at least one coefficient"),
            SeriesError::RingMismatch { left, right } => {
                write!(f, "coefficient ring mismatch: {} vs {}", left, right)
            }
            SeriesError::NonUnitConstantTerm(c) => {
                write!(f, "constant term {} is not a unit in the ring", c)
            }
            SeriesError::InvalidModulus(m) => write!(f, "invalid modulus {}", m),
            SeriesError::ResidueOutOfRange { residue, modulus } => {
                write!(f, "residue {} out of range for modulus {}", residue, modulus)
            }
            SeriesError::EmptyResult(what) => write!(f, "{} leaves no known coefficients", what),
            SeriesError::ZeroPowerSubstitution => write!(f, "substitute_power requires k >= 1"),
            SeriesError::InvalidReduction { from, to } => {
                write!(f, "cannot reduce mod {} into mod {}: not a divisor", from, to)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum CoeffData {
    Exact(Vec<BigInt>),
    Modular(Vec<u64>),
}

/// Coefficients of a formal power series in `q` up to a tracked order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: CoefficientRing,
    data: CoeffData,
}

fn mod_reduce_i64(v: i64, m: u64) -> u64 {
    v.rem_euclid(m as i64) as u64
}

fn mod_reduce_big(v: &BigInt, m: u64) -> u64 {
    let mb = BigInt::from(m);
    let mut r = v % &mb;
    if r.is_negative() {
        r += &mb;
    }
    r.to_u64().expect("reduced residue fits u64")
}

/// Modular inverse by extended Euclid; `None` when gcd(a, m) != 1.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Exponent/sign pairs of the pentagonal-number expansion of `f_k`
/// below `order`, leading `(0, +1)` term included.
pub(crate) fn pentagonal_terms(k: u64, order: usize) -> Vec<(usize, bool)> {
    let mut terms = vec![(0usize, false)];
    let mut j: u64 = 1;
    loop {
        let mut grew = false;
        // generalized pentagonal exponents j(3j-1)/2 and j(3j+1)/2
        for g in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
            if let Some(e) = g.checked_mul(k) {
                if (e as u128) < order as u128 {
                    terms.push((e as usize, j % 2 == 1));
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
        j += 1;
    }
    terms.sort_unstable();
    terms
}

impl TruncatedSeries {
    fn new(ring: CoefficientRing, data: CoeffData) -> Self {
        TruncatedSeries { ring, data }
    }

    /// The all-zero series of the given order.
    pub fn zero(ring: CoefficientRing, order: usize) -> Self {
        assert!(order >= 1, "order must be positive");
        match ring {
            CoefficientRing::Exact => {
                Self::new(ring, CoeffData::Exact(vec![BigInt::zero(); order]))
            }
            CoefficientRing::Modular(_) => Self::new(ring, CoeffData::Modular(vec![0; order])),
        }
    }

    /// The constant series 1.
    pub fn one(ring: CoefficientRing, order: usize) -> Self {
        Self::constant(ring, 1, order)
    }

    /// The constant series `c`.
    pub fn constant(ring: CoefficientRing, c: i64, order: usize) -> Self {
        let mut s = Self::zero(ring, order);
        match &mut s.data {
            CoeffData::Exact(v) => v[0] = BigInt::from(c),
            CoeffData::Modular(v) => {
                let m = ring.modulus().unwrap();
                v[0] = mod_reduce_i64(c, m);
            }
        }
        s
    }

    /// Build a series from raw integer coefficients, reducing them into the
    /// ring. The order is the number of coefficients supplied.
    pub fn from_integers(ring: CoefficientRing, coeffs: &[i64]) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::EmptyCoefficients);
        }
        if let CoefficientRing::Modular(m) = ring {
            if !(2..=MAX_MODULUS).contains(&m) {
                return Err(SeriesError::InvalidModulus(m));
            }
            return Ok(Self::new(
                ring,
                CoeffData::Modular(coeffs.iter().map(|&c| mod_reduce_i64(c, m)).collect()),
            ));
        }
        Ok(Self::new(
            ring,
            CoeffData::Exact(coeffs.iter().map(|&c| BigInt::from(c)).collect()),
        ))
    }

    /// As [`Self::from_integers`] but from big integers.
    pub fn from_bigints(ring: CoefficientRing, coeffs: Vec<BigInt>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::EmptyCoefficients);
        }
        match ring {
            CoefficientRing::Exact => Ok(Self::new(ring, CoeffData::Exact(coeffs))),
            CoefficientRing::Modular(m) => {
                if !(2..=MAX_MODULUS).contains(&m) {
                    return Err(SeriesError::InvalidModulus(m));
                }
                Ok(Self::new(
                    ring,
                    CoeffData::Modular(coeffs.iter().map(|c| mod_reduce_big(c, m)).collect()),
                ))
            }
        }
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    /// Number of known coefficients (indices `0..order`).
    pub fn order(&self) -> usize {
        match &self.data {
            CoeffData::Exact(v) => v.len(),
            CoeffData::Modular(v) => v.len(),
        }
    }

    /// Coefficient of `q^i`, lifted to a `BigInt` (residues lift to their
    /// canonical representative). Panics if `i >= order`.
    pub fn coeff_bigint(&self, i: usize) -> BigInt {
        match &self.data {
            CoeffData::Exact(v) => v[i].clone(),
            CoeffData::Modular(v) => BigInt::from(v[i]),
        }
    }

    /// Residue at `q^i` when the ring is modular.
    pub fn residue(&self, i: usize) -> Option<u64> {
        match &self.data {
            CoeffData::Exact(_) => None,
            CoeffData::Modular(v) => Some(v[i]),
        }
    }

    pub fn is_zero_at(&self, i: usize) -> bool {
        match &self.data {
            CoeffData::Exact(v) => v[i].is_zero(),
            CoeffData::Modular(v) => v[i] == 0,
        }
    }

    pub fn coeff_string(&self, i: usize) -> String {
        match &self.data {
            CoeffData::Exact(v) => v[i].to_string(),
            CoeffData::Modular(v) => format!("{}", v[i]),
        }
    }

    fn check_same_ring(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring != other.ring {
            return Err(SeriesError::RingMismatch {
                left: self.ring,
                right: other.ring,
            });
        }
        Ok(())
    }

    /// First index below `upto` where the two series differ, with both
    /// coefficient values rendered. Requires identical rings and orders of
    /// at least `upto`.
    pub fn first_mismatch(
        &self,
        other: &Self,
        upto: usize,
    ) -> Result<Option<(usize, String, String)>, SeriesError> {
        self.check_same_ring(other)?;
        debug_assert!(self.order() >= upto && other.order() >= upto);
        match (&self.data, &other.data) {
            (CoeffData::Exact(a), CoeffData::Exact(b)) => {
                for i in 0..upto {
                    if a[i] != b[i] {
                        return Ok(Some((i, a[i].to_string(), b[i].to_string())));
                    }
                }
            }
            (CoeffData::Modular(a), CoeffData::Modular(b)) => {
                for i in 0..upto {
                    if a[i] != b[i] {
                        return Ok(Some((i, a[i].to_string(), b[i].to_string())));
                    }
                }
            }
            _ => unreachable!("ring checked"),
        }
        Ok(None)
    }

    /// Shorten to the first `order` coefficients.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order >= 1 && order <= self.order());
        match &self.data {
            CoeffData::Exact(v) => Self::new(self.ring, CoeffData::Exact(v[..order].to_vec())),
            CoeffData::Modular(v) => Self::new(self.ring, CoeffData::Modular(v[..order].to_vec())),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_same_ring(other)?;
        let n = self.order().min(other.order());
        match (&self.data, &other.data) {
            (CoeffData::Exact(a), CoeffData::Exact(b)) => {
                let out = (0..n).map(|i| &a[i] + &b[i]).collect();
                Ok(Self::new(self.ring, CoeffData::Exact(out)))
            }
            (CoeffData::Modular(a), CoeffData::Modular(b)) => {
                let m = self.ring.modulus().unwrap();
                let out = (0..n).map(|i| (a[i] + b[i]) % m).collect();
                Ok(Self::new(self.ring, CoeffData::Modular(out)))
            }
            _ => unreachable!("ring checked"),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_same_ring(other)?;
        let n = self.order().min(other.order());
        match (&self.data, &other.data) {
            (CoeffData::Exact(a), CoeffData::Exact(b)) => {
                let out = (0..n).map(|i| &a[i] - &b[i]).collect();
                Ok(Self::new(self.ring, CoeffData::Exact(out)))
            }
            (CoeffData::Modular(a), CoeffData::Modular(b)) => {
                let m = self.ring.modulus().unwrap();
                let out = (0..n).map(|i| (a[i] + m - b[i]) % m).collect();
                Ok(Self::new(self.ring, CoeffData::Modular(out)))
            }
            _ => unreachable!("ring checked"),
        }
    }

    pub fn negate(&self) -> Self {
        match &self.data {
            CoeffData::Exact(v) => {
                Self::new(self.ring, CoeffData::Exact(v.iter().map(|c| -c).collect()))
            }
            CoeffData::Modular(v) => {
                let m = self.ring.modulus().unwrap();
                Self::new(
                    self.ring,
                    CoeffData::Modular(v.iter().map(|&c| (m - c) % m).collect()),
                )
            }
        }
    }

    pub fn scalar_mul(&self, c: i64) -> Self {
        match &self.data {
            CoeffData::Exact(v) => {
                let cb = BigInt::from(c);
                Self::new(
                    self.ring,
                    CoeffData::Exact(v.iter().map(|x| x * &cb).collect()),
                )
            }
            CoeffData::Modular(v) => {
                let m = self.ring.modulus().unwrap();
                let cr = mod_reduce_i64(c, m);
                Self::new(
                    self.ring,
                    CoeffData::Modular(v.iter().map(|&x| x * cr % m).collect()),
                )
            }
        }
    }

    /// Cauchy product truncated to the shared order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_same_ring(other)?;
        let n = self.order().min(other.order());
        match (&self.data, &other.data) {
            (CoeffData::Exact(a), CoeffData::Exact(b)) => {
                let mut out = vec![BigInt::zero(); n];
                for i in 0..n.min(a.len()) {
                    if a[i].is_zero() {
                        continue;
                    }
                    for j in 0..(n - i).min(b.len()) {
                        if !b[j].is_zero() {
                            out[i + j] += &a[i] * &b[j];
                        }
                    }
                }
                Ok(Self::new(self.ring, CoeffData::Exact(out)))
            }
            (CoeffData::Modular(a), CoeffData::Modular(b)) => {
                let m = self.ring.modulus().unwrap();
                let mut out = vec![0u64; n];
                for i in 0..n.min(a.len()) {
                    if a[i] == 0 {
                        continue;
                    }
                    for j in 0..(n - i).min(b.len()) {
                        out[i + j] = (out[i + j] + a[i] * b[j]) % m;
                    }
                }
                Ok(Self::new(self.ring, CoeffData::Modular(out)))
            }
            _ => unreachable!("ring checked"),
        }
    }

    /// Multiplicative inverse to the series' own order.
    ///
    /// Requires a unit constant term (±1 over exact integers, coprime to
    /// the modulus otherwise). Standard recurrence:
    /// `b_n = -c0^{-1} * sum_{j>=1} a_j b_{n-j}`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let n = self.order();
        match &self.data {
            CoeffData::Exact(a) => {
                if !a[0].is_one() && a[0] != BigInt::from(-1) {
                    return Err(SeriesError::NonUnitConstantTerm(a[0].to_string()));
                }
                let negative_unit = a[0] == BigInt::from(-1);
                let mut b = vec![BigInt::zero(); n];
                b[0] = a[0].clone(); // self-inverse: (+1)^-1 = +1, (-1)^-1 = -1
                for i in 1..n {
                    let mut s = BigInt::zero();
                    for j in 1..=i {
                        if !a[j].is_zero() && !b[i - j].is_zero() {
                            s += &a[j] * &b[i - j];
                        }
                    }
                    b[i] = if negative_unit { s } else { -s };
                }
                Ok(Self::new(self.ring, CoeffData::Exact(b)))
            }
            CoeffData::Modular(a) => {
                let m = self.ring.modulus().unwrap();
                let inv0 = mod_inverse(a[0], m)
                    .ok_or_else(|| SeriesError::NonUnitConstantTerm(a[0].to_string()))?;
                let mut b = vec![0u64; n];
                b[0] = inv0;
                for i in 1..n {
                    let mut s: u64 = 0;
                    for j in 1..=i {
                        s = (s + a[j] * b[i - j]) % m;
                    }
                    b[i] = (m - s) % m * inv0 % m;
                }
                Ok(Self::new(self.ring, CoeffData::Modular(b)))
            }
        }
    }

    /// Integer power via repeated squaring; negative exponents go through
    /// [`Self::invert`].
    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        let n = self.order();
        if e == 0 {
            return Ok(Self::one(self.ring, n));
        }
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::one(self.ring, n);
        let mut sq = base;
        loop {
            if exp & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            sq = sq.mul(&sq)?;
        }
        Ok(acc)
    }

    /// `a(q) -> a(q^k)`. The result order is `k * order`: indices that are
    /// not multiples of `k` are exactly zero, and index `jk` is known for
    /// every `j < order`, so the full prefix below `k * order` is known.
    pub fn substitute_power(&self, k: u64) -> Result<Self, SeriesError> {
        if k == 0 {
            return Err(SeriesError::ZeroPowerSubstitution);
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let k = k as usize;
        let n = self.order();
        match &self.data {
            CoeffData::Exact(a) => {
                let mut out = vec![BigInt::zero(); n * k];
                for j in 0..n {
                    out[j * k] = a[j].clone();
                }
                Ok(Self::new(self.ring, CoeffData::Exact(out)))
            }
            CoeffData::Modular(a) => {
                let mut out = vec![0u64; n * k];
                for j in 0..n {
                    out[j * k] = a[j];
                }
                Ok(Self::new(self.ring, CoeffData::Modular(out)))
            }
        }
    }

    /// `a(q) -> a(-q)`: negate coefficients at odd indices.
    pub fn substitute_neg(&self) -> Self {
        match &self.data {
            CoeffData::Exact(v) => {
                let out = v
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                    .collect();
                Self::new(self.ring, CoeffData::Exact(out))
            }
            CoeffData::Modular(v) => {
                let m = self.ring.modulus().unwrap();
                let out = v
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| if i % 2 == 1 { (m - c) % m } else { c })
                    .collect();
                Self::new(self.ring, CoeffData::Modular(out))
            }
        }
    }

    /// Multiply by `q^j`: shift coefficients up, order grows by `j`.
    pub fn mul_qpower(&self, j: usize) -> Self {
        if j == 0 {
            return self.clone();
        }
        match &self.data {
            CoeffData::Exact(v) => {
                let mut out = vec![BigInt::zero(); v.len() + j];
                for (i, c) in v.iter().enumerate() {
                    out[i + j] = c.clone();
                }
                Self::new(self.ring, CoeffData::Exact(out))
            }
            CoeffData::Modular(v) => {
                let mut out = vec![0u64; v.len() + j];
                out[j..].copy_from_slice(v);
                Self::new(self.ring, CoeffData::Modular(out))
            }
        }
    }

    /// Extract the residue class `r` of an `m`-dissection: the result's
    /// coefficient at `n` is this series' coefficient at `m*n + r`.
    pub fn extract_dissection(&self, m: u64, r: u64) -> Result<Self, SeriesError> {
        if m == 0 || r >= m {
            return Err(SeriesError::ResidueOutOfRange { residue: r, modulus: m });
        }
        let (m, r) = (m as usize, r as usize);
        let n = self.order();
        if r >= n {
            return Err(SeriesError::EmptyResult("dissection extraction".into()));
        }
        let out_len = (n - r).div_ceil(m);
        match &self.data {
            CoeffData::Exact(v) => {
                let out = (0..out_len).map(|i| v[m * i + r].clone()).collect();
                Ok(Self::new(self.ring, CoeffData::Exact(out)))
            }
            CoeffData::Modular(v) => {
                let out = (0..out_len).map(|i| v[m * i + r]).collect();
                Ok(Self::new(self.ring, CoeffData::Modular(out)))
            }
        }
    }

    /// Reduce into `Modular(m)`. From the exact ring this is the canonical
    /// quotient map; from `Modular(m0)` it is only defined when `m | m0`.
    pub fn reduce_mod(&self, m: u64) -> Result<Self, SeriesError> {
        if !(2..=MAX_MODULUS).contains(&m) {
            return Err(SeriesError::InvalidModulus(m));
        }
        match &self.data {
            CoeffData::Exact(v) => {
                let out = v.iter().map(|c| mod_reduce_big(c, m)).collect();
                Ok(Self::new(
                    CoefficientRing::Modular(m),
                    CoeffData::Modular(out),
                ))
            }
            CoeffData::Modular(v) => {
                let m0 = self.ring.modulus().unwrap();
                if !m0.is_multiple_of(m) {
                    return Err(SeriesError::InvalidReduction { from: m0, to: m });
                }
                let out = v.iter().map(|&c| c % m).collect();
                Ok(Self::new(
                    CoefficientRing::Modular(m),
                    CoeffData::Modular(out),
                ))
            }
        }
    }

    /// Multiply by the two-term factor `1 + c * q^e` in a single pass.
    /// A factor whose monomial lies beyond the order is the identity.
    pub fn mul_binomial(&self, e: usize, c: i64) -> Self {
        let n = self.order();
        if e >= n || c == 0 {
            return self.clone();
        }
        match &self.data {
            CoeffData::Exact(a) => {
                let cb = BigInt::from(c);
                let mut out = a.clone();
                for i in (e..n).rev() {
                    let t = &a[i - e] * &cb;
                    out[i] += t;
                }
                Self::new(self.ring, CoeffData::Exact(out))
            }
            CoeffData::Modular(a) => {
                let m = self.ring.modulus().unwrap();
                let cr = mod_reduce_i64(c, m);
                let mut out = a.to_vec();
                for i in (e..n).rev() {
                    out[i] = (out[i] + a[i - e] * cr) % m;
                }
                Self::new(self.ring, CoeffData::Modular(out))
            }
        }
    }

    /// Multiply in place by the Euler product `f_k`, using its pentagonal
    /// expansion (coefficients ±1), in O(order * sqrt(order/k)).
    pub fn mul_euler_factor(&self, k: u64) -> Self {
        let n = self.order();
        let terms = pentagonal_terms(k, n);
        match &self.data {
            CoeffData::Exact(a) => {
                let mut out = vec![BigInt::zero(); n];
                for &(e, neg) in &terms {
                    if neg {
                        for i in e..n {
                            out[i] -= &a[i - e];
                        }
                    } else {
                        for i in e..n {
                            out[i] += &a[i - e];
                        }
                    }
                }
                Self::new(self.ring, CoeffData::Exact(out))
            }
            CoeffData::Modular(a) => {
                let m = self.ring.modulus().unwrap();
                let mut out = vec![0u64; n];
                for &(e, neg) in &terms {
                    if neg {
                        for i in e..n {
                            out[i] = (out[i] + m - a[i - e]) % m;
                        }
                    } else {
                        for i in e..n {
                            out[i] = (out[i] + a[i - e]) % m;
                        }
                    }
                }
                Self::new(self.ring, CoeffData::Modular(out))
            }
        }
    }

    /// Divide in place by `f_k` (constant term 1, so no unit inverse is
    /// needed): `c_n = a_n - sum_{e>0} sign_e * c_{n-e}`.
    pub fn div_euler_factor(&self, k: u64) -> Self {
        let n = self.order();
        let terms = pentagonal_terms(k, n);
        match &self.data {
            CoeffData::Exact(a) => {
                let mut c = vec![BigInt::zero(); n];
                for i in 0..n {
                    let mut acc = a[i].clone();
                    for &(e, neg) in terms.iter().skip(1) {
                        if e > i {
                            break;
                        }
                        if neg {
                            acc += &c[i - e];
                        } else {
                            acc -= &c[i - e];
                        }
                    }
                    c[i] = acc;
                }
                Self::new(self.ring, CoeffData::Exact(c))
            }
            CoeffData::Modular(a) => {
                let m = self.ring.modulus().unwrap();
                let mut c = vec![0u64; n];
                for i in 0..n {
                    let mut acc = a[i];
                    for &(e, neg) in terms.iter().skip(1) {
                        if e > i {
                            break;
                        }
                        if neg {
                            acc = (acc + c[i - e]) % m;
                        } else {
                            acc = (acc + m - c[i - e]) % m;
                        }
                    }
                    c[i] = acc % m;
                }
                Self::new(self.ring, CoeffData::Modular(c))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_integers(CoefficientRing::Exact, coeffs).unwrap()
    }

    #[test]
    fn make_series_reduces_into_ring() {
        let s = TruncatedSeries::from_integers(CoefficientRing::Modular(3), &[4, -1]).unwrap();
        assert_eq!(s.residue(0), Some(1));
        assert_eq!(s.residue(1), Some(2));
    }

    #[test]
    fn make_series_rejects_empty() {
        assert_eq!(
            TruncatedSeries::from_integers(CoefficientRing::Exact, &[]),
            Err(SeriesError::EmptyCoefficients)
        );
    }

    #[test]
    fn constant_one_series() {
        let s = exact(&[1]);
        assert_eq!(s.order(), 1);
        assert_eq!(s, TruncatedSeries::one(CoefficientRing::Exact, 1));
    }

    #[test]
    fn add_takes_min_order() {
        let a = exact(&[1, 1]);
        let b = exact(&[1, -1, 7]);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum, exact(&[2, 0]));
    }

    #[test]
    fn sub_self_is_zero() {
        let s = exact(&[3, -2, 5]);
        assert_eq!(s.sub(&s).unwrap(), TruncatedSeries::zero(CoefficientRing::Exact, 3));
    }

    #[test]
    fn scalar_mul_works() {
        assert_eq!(exact(&[1, 3]).scalar_mul(2), exact(&[2, 6]));
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = exact(&[1]);
        let b = TruncatedSeries::from_integers(CoefficientRing::Modular(5), &[1]).unwrap();
        assert!(matches!(a.add(&b), Err(SeriesError::RingMismatch { .. })));
    }

    #[test]
    fn mul_truncates() {
        let a = exact(&[1, 1]);
        assert_eq!(a.mul(&a).unwrap(), exact(&[1, 2]));
    }

    #[test]
    fn invert_geometric() {
        let s = exact(&[1, -1, 0, 0, 0]);
        assert_eq!(s.invert().unwrap(), exact(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn invert_negative_unit() {
        let s = exact(&[-1, 1]);
        let inv = s.invert().unwrap();
        assert_eq!(s.mul(&inv).unwrap(), TruncatedSeries::one(CoefficientRing::Exact, 2));
    }

    #[test]
    fn invert_rejects_zero_constant() {
        let s = exact(&[0, 1]);
        assert!(matches!(s.invert(), Err(SeriesError::NonUnitConstantTerm(_))));
    }

    #[test]
    fn invert_modular_non_coprime() {
        let s = TruncatedSeries::from_integers(CoefficientRing::Modular(4), &[2, 1]).unwrap();
        assert!(matches!(s.invert(), Err(SeriesError::NonUnitConstantTerm(_))));
    }

    #[test]
    fn pow_squares_binomial() {
        let s = exact(&[1, 1, 0]);
        assert_eq!(s.pow(2).unwrap(), exact(&[1, 2, 1]));
    }

    #[test]
    fn pow_zero_is_one() {
        let s = exact(&[5, 1, 2]);
        assert_eq!(s.pow(0).unwrap(), TruncatedSeries::one(CoefficientRing::Exact, 3));
    }

    #[test]
    fn pow_minus_one_is_invert() {
        let s = exact(&[1, 4, 4, 4]);
        assert_eq!(s.pow(-1).unwrap(), s.invert().unwrap());
    }

    #[test]
    fn substitute_power_spreads_coefficients() {
        let s = exact(&[1, 1]);
        let cubed = s.substitute_power(3).unwrap();
        assert_eq!(cubed, exact(&[1, 0, 0, 1, 0, 0]));
    }

    #[test]
    fn substitute_power_identity_at_one() {
        let s = exact(&[2, 3, 4]);
        assert_eq!(s.substitute_power(1).unwrap(), s);
    }

    #[test]
    fn substitute_power_rejects_zero() {
        assert!(matches!(
            exact(&[1]).substitute_power(0),
            Err(SeriesError::ZeroPowerSubstitution)
        ));
    }

    #[test]
    fn substitute_neg_flips_odd_indices() {
        let s = exact(&[1, 1, 1]);
        assert_eq!(s.substitute_neg(), exact(&[1, -1, 1]));
        assert_eq!(s.substitute_neg().substitute_neg(), s);
    }

    #[test]
    fn mul_qpower_shifts() {
        let s = exact(&[1, 1]);
        assert_eq!(s.mul_qpower(2), exact(&[0, 0, 1, 1]));
        assert_eq!(s.mul_qpower(0), s);
    }

    #[test]
    fn extract_dissection_selects_class() {
        let s = exact(&[1, 2, 3, 4, 5]);
        assert_eq!(s.extract_dissection(2, 1).unwrap(), exact(&[2, 4]));
    }

    #[test]
    fn extract_dissection_rejects_bad_residue() {
        let s = exact(&[1, 2]);
        assert!(matches!(
            s.extract_dissection(2, 2),
            Err(SeriesError::ResidueOutOfRange { .. })
        ));
    }

    #[test]
    fn reduce_mod_wraps() {
        let s = exact(&[2, 3]);
        let r = s.reduce_mod(2).unwrap();
        assert_eq!(r.residue(0), Some(0));
        assert_eq!(r.residue(1), Some(1));
    }

    #[test]
    fn reduce_mod_requires_divisor_between_modular_rings() {
        let s = TruncatedSeries::from_integers(CoefficientRing::Modular(12), &[7]).unwrap();
        assert!(s.reduce_mod(4).is_ok());
        assert!(matches!(
            s.reduce_mod(5),
            Err(SeriesError::InvalidReduction { .. })
        ));
    }

    #[test]
    fn euler_factor_mul_div_roundtrip() {
        let s = exact(&[1, 2, 4, 8, 14, 24, 40, 64, 100, 154]);
        let back = s.mul_euler_factor(2).div_euler_factor(2);
        assert_eq!(back, s);
        let back3 = s.div_euler_factor(3).mul_euler_factor(3);
        assert_eq!(back3, s);
    }

    #[test]
    fn euler_factor_matches_pentagonal_series() {
        // f_1 prefix: 1 - q - q^2 + q^5 + q^7 - ...
        let one = TruncatedSeries::one(CoefficientRing::Exact, 13);
        let f1 = one.mul_euler_factor(1);
        assert_eq!(f1, exact(&[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]));
    }

    #[test]
    fn inverse_of_f1_gives_partition_numbers() {
        // oracle: count partitions by direct recursion over largest part
        fn count_partitions(n: usize, max_part: usize) -> i64 {
            if n == 0 {
                return 1;
            }
            (1..=max_part.min(n))
                .map(|p| count_partitions(n - p, p))
                .sum()
        }
        let order = 14;
        let one = TruncatedSeries::one(CoefficientRing::Exact, order);
        let partitions = one.div_euler_factor(1);
        for n in 0..order {
            assert_eq!(
                partitions.coeff_bigint(n),
                BigInt::from(count_partitions(n, n.max(1))),
                "p({})",
                n
            );
        }
        let f1 = one.mul_euler_factor(1);
        assert_eq!(f1.invert().unwrap(), partitions);
    }
}
