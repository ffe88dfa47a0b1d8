//! Claim manifests: the statements to verify, as data.
//!
//! A manifest is UTF-8 text, one claim per stanza, stanzas separated by
//! blank lines, `#` starting a comment line. Every stanza has `id:` and
//! `kind:`; the remaining keys depend on the kind:
//!
//! ```text
//! id: f9f1-2diss
//! kind: identity
//! lhs: f9/f1
//! rhs: f12^3*f18/(f2^2*f6*f36) + q*f4^2*f6*f36/(f2^3*f12)
//! order: 400
//! cite: 2-dissection of f9/f1
//! ```
//!
//! `kind: identity` — `lhs:`, `rhs:`, optional `mod:` (checks the identity
//! in Z/m instead of Z), optional `order:`.
//!
//! `kind: dissection` — `source:`, `m:`, `r:`, `result:`, optional
//! `order:`: extracting residue class r mod m from the source equals the
//! result.
//!
//! `kind: congruence` — `family:`, `A:`, `B:`, `n-max:` plus one of:
//! * `mod:` alone: coefficients at An+B vanish mod m;
//! * `mod:` with `scale:`, `alpha-max:`, optional `sign: alternating`:
//!   coefficient at scale^a (An+B) is congruent to (sign)^a times the
//!   coefficient at An+B for 1 <= a <= alpha-max;
//! * `mod:` with `family2:`: the two families' coefficients agree at An+B;
//! * `rhs-family:`, `rhs-A:`, `rhs-B:`, `rhs-scalar:` and no `mod:`:
//!   exact equality of coefficients over the integers.
//!
//! `kind: prime-family` — `family:`, `mod:`, `cond:`, `A:`, `i-coeff:`,
//! `p-coeff:`, `offset:`, `primes:`, `n-max:`, optional `alpha1-n-max:`
//! and `note-legendre:`. The checked index is
//! `A p^{2a+2} n + (i-coeff * i + p-coeff * p) p^{2a+1} + offset` over
//! `1 <= i <= p-1`, `0 <= n <= n-max`, at `a = 0` (and `a = 1` for the
//! smallest prime when `alpha1-n-max` is given). `cond:` is either
//! `legendre(a) = -1` or `p = c (mod d)`; `primes: auto(k)` selects the k
//! smallest primes >= 5 satisfying the condition, while an explicit list
//! is validated against it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{parse_expression, EtaExpression};
use crate::families::FamilySpec;
use crate::ring::CoefficientRing;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "manifest line {}: {}", self.line, self.message)
    }
}

/// An exact series identity, `lhs == rhs` in the given ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityClaim {
    pub id: String,
    pub lhs: EtaExpression,
    pub rhs: EtaExpression,
    pub ring: CoefficientRing,
    pub verify_order: Option<usize>,
    pub cite: String,
}

/// Extracting residue class `r` of an `m`-dissection of `source` yields
/// `result`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DissectionClaim {
    pub id: String,
    pub source: EtaExpression,
    pub modulus: u64,
    pub residue: u64,
    pub result: EtaExpression,
    pub verify_order: Option<usize>,
    pub cite: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CongruenceKind {
    /// Coefficient at `A n + B` vanishes mod m for all checked n.
    Vanishing,
    /// Coefficient at `scale^a (A n + B)` is congruent to
    /// `sign^a * coefficient(A n + B)` for `1 <= a <= alpha_max`.
    ScaledRelation {
        scale: u64,
        alpha_max: u32,
        alternating: bool,
    },
    /// Two families agree at `A n + B` mod m.
    FamilyRelation { other: FamilySpec },
    /// Exact equality over Z:
    /// `family(A n + B) = rhs_scalar * rhs_family(rhs_A n + rhs_B)`.
    ExactEquality {
        rhs_family: FamilySpec,
        rhs_progression: (u64, u64),
        rhs_scalar: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceClaim {
    pub id: String,
    pub family: FamilySpec,
    /// (A, B) of the progression An + B.
    pub progression: (u64, u64),
    /// None only for exact-equality claims.
    pub modulus: Option<u64>,
    pub kind: CongruenceKind,
    pub n_max: u64,
    pub cite: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeCondition {
    /// `legendre(a) = value` for the claim's primes.
    LegendreIs { a: i64, value: i8 },
    /// `p = c (mod d)`.
    ResidueClass { c: u64, modulus: u64 },
}

impl fmt::Display for PrimeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeCondition::LegendreIs { a, value } => write!(f, "legendre({}) = {}", a, value),
            PrimeCondition::ResidueClass { c, modulus } => write!(f, "p = {} (mod {})", c, modulus),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeSelection {
    /// The k smallest primes >= 5 satisfying the side condition.
    Auto(usize),
    /// Explicit primes; each is checked against the side condition.
    List(Vec<u64>),
}

/// A prime-indexed congruence family: for qualifying primes p, the
/// coefficient at `A p^{2a+2} n + (ci * i + cp * p) p^{2a+1} + offset`
/// vanishes mod m for all `i` in `1..p` and checked `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFamilyClaim {
    pub id: String,
    pub family: FamilySpec,
    pub modulus: u64,
    pub condition: PrimeCondition,
    /// Legendre symbol recorded per prime for cross-reference, without
    /// gating (used when the gate is a residue class).
    pub note_legendre: Option<i64>,
    pub coef_n: u64,
    pub coef_i: u64,
    pub coef_p: u64,
    pub offset: u64,
    pub primes: PrimeSelection,
    pub n_max: u64,
    /// When set, the smallest prime is additionally checked at a = 1 with
    /// this n bound.
    pub alpha1_n_max: Option<u64>,
    pub cite: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Identity(IdentityClaim),
    Dissection(DissectionClaim),
    Congruence(CongruenceClaim),
    PrimeFamily(PrimeFamilyClaim),
}

impl Claim {
    pub fn id(&self) -> &str {
        match self {
            Claim::Identity(c) => &c.id,
            Claim::Dissection(c) => &c.id,
            Claim::Congruence(c) => &c.id,
            Claim::PrimeFamily(c) => &c.id,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Claim::Identity(_) => "identity",
            Claim::Dissection(_) => "dissection",
            Claim::Congruence(_) => "congruence",
            Claim::PrimeFamily(_) => "prime-family",
        }
    }

    pub fn cite(&self) -> &str {
        match self {
            Claim::Identity(c) => &c.cite,
            Claim::Dissection(c) => &c.cite,
            Claim::Congruence(c) => &c.cite,
            Claim::PrimeFamily(c) => &c.cite,
        }
    }
}

/// An ordered, id-unique collection of claims.
#[derive(Clone, Debug, Default)]
pub struct ClaimRegistry {
    claims: Vec<Claim>,
}

impl ClaimRegistry {
    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    pub fn find(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id() == id)
    }
}

struct Stanza {
    start_line: usize,
    fields: BTreeMap<String, (String, usize)>,
}

impl Stanza {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.fields.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<(String, usize), ManifestError> {
        self.take(key).ok_or(ManifestError {
            line: self.start_line,
            message: format!("missing required field '{}:'", key),
        })
    }

    fn finish(self) -> Result<(), ManifestError> {
        if let Some((key, (_, line))) = self.fields.into_iter().next() {
            return Err(ManifestError {
                line,
                message: format!("unknown field '{}:'", key),
            });
        }
        Ok(())
    }
}

fn parse_u64(value: &str, line: usize, what: &str) -> Result<u64, ManifestError> {
    value.trim().parse().map_err(|_| ManifestError {
        line,
        message: format!("invalid {} '{}'", what, value.trim()),
    })
}

fn parse_i64(value: &str, line: usize, what: &str) -> Result<i64, ManifestError> {
    value.trim().parse().map_err(|_| ManifestError {
        line,
        message: format!("invalid {} '{}'", what, value.trim()),
    })
}

fn parse_expr_field(value: &str, line: usize, key: &str) -> Result<EtaExpression, ManifestError> {
    parse_expression(value).map_err(|e| ManifestError {
        line,
        message: format!("in '{}': {}", key, e),
    })
}

fn parse_family(value: &str, line: usize) -> Result<FamilySpec, ManifestError> {
    let mut it = value.split_whitespace();
    let name = it.next().unwrap_or("");
    let nums: Result<Vec<u64>, _> = it.map(|w| parse_u64(w, line, "family parameter")).collect();
    let nums = nums?;
    let bad = |msg: String| ManifestError { line, message: msg };
    match (name, nums.as_slice()) {
        ("overpartition", []) => Ok(FamilySpec::Overpartition),
        ("tschur", [t]) => FamilySpec::t_schur(*t).map_err(|e| bad(e.to_string())),
        ("tschur-over", [t]) => FamilySpec::t_schur_over(*t).map_err(|e| bad(e.to_string())),
        ("tschur-over-tuple", [t, r]) => {
            FamilySpec::t_schur_over_tuple(*t, *r).map_err(|e| bad(e.to_string()))
        }
        _ => Err(bad(format!("invalid family '{}'", value.trim()))),
    }
}

/// `legendre(a) = -1` or `p = c (mod d)`.
fn parse_condition(value: &str, line: usize) -> Result<PrimeCondition, ManifestError> {
    let v = value.trim();
    let bad = || ManifestError {
        line,
        message: format!(
            "invalid condition '{}': expected 'legendre(a) = -1' or 'p = c (mod d)'",
            v
        ),
    };
    if let Some(rest) = v.strip_prefix("legendre(") {
        let (a_str, rest) = rest.split_once(')').ok_or_else(bad)?;
        let a = parse_i64(a_str, line, "legendre argument")?;
        let rest = rest.trim();
        let val_str = rest.strip_prefix('=').ok_or_else(bad)?.trim();
        let value: i8 = match val_str {
            "-1" => -1,
            "1" | "+1" => 1,
            _ => return Err(bad()),
        };
        return Ok(PrimeCondition::LegendreIs { a, value });
    }
    if let Some(rest) = v.strip_prefix('p') {
        let rest = rest.trim_start();
        let rest = rest.strip_prefix('=').ok_or_else(bad)?.trim();
        let (c_str, rest) = rest.split_once('(').ok_or_else(bad)?;
        let c = parse_u64(c_str, line, "residue")?;
        let d_str = rest
            .trim()
            .strip_prefix("mod")
            .and_then(|s| s.trim().strip_suffix(')'))
            .ok_or_else(bad)?;
        let modulus = parse_u64(d_str, line, "residue modulus")?;
        if modulus < 2 || c >= modulus {
            return Err(bad());
        }
        return Ok(PrimeCondition::ResidueClass { c, modulus });
    }
    Err(bad())
}

fn parse_primes(value: &str, line: usize) -> Result<PrimeSelection, ManifestError> {
    let v = value.trim();
    if let Some(rest) = v.strip_prefix("auto(") {
        let k_str = rest.strip_suffix(')').ok_or(ManifestError {
            line,
            message: format!("invalid primes spec '{}'", v),
        })?;
        let k = parse_u64(k_str, line, "prime count")? as usize;
        if k == 0 {
            return Err(ManifestError {
                line,
                message: String::from("primes: auto(k) needs k >= 1"),
            });
        }
        return Ok(PrimeSelection::Auto(k));
    }
    let list: Result<Vec<u64>, _> = v
        .split([' ', ','])
        .filter(|w| !w.is_empty())
        .map(|w| parse_u64(w, line, "prime"))
        .collect();
    let list = list?;
    if list.is_empty() {
        return Err(ManifestError {
            line,
            message: String::from("empty prime list"),
        });
    }
    Ok(PrimeSelection::List(list))
}

fn build_identity(mut s: Stanza, id: String, cite: String) -> Result<Claim, ManifestError> {
    let (lhs, lline) = s.require("lhs")?;
    let (rhs, rline) = s.require("rhs")?;
    let ring = match s.take("mod") {
        Some((m, mline)) => {
            let m = parse_u64(&m, mline, "modulus")?;
            CoefficientRing::modular(m).map_err(|e| ManifestError {
                line: mline,
                message: e.to_string(),
            })?
        }
        None => CoefficientRing::Exact,
    };
    let verify_order = match s.take("order") {
        Some((o, oline)) => Some(parse_u64(&o, oline, "order")? as usize),
        None => None,
    };
    s.finish()?;
    Ok(Claim::Identity(IdentityClaim {
        id,
        lhs: parse_expr_field(&lhs, lline, "lhs")?,
        rhs: parse_expr_field(&rhs, rline, "rhs")?,
        ring,
        verify_order,
        cite,
    }))
}

fn build_dissection(mut s: Stanza, id: String, cite: String) -> Result<Claim, ManifestError> {
    let (source, sline) = s.require("source")?;
    let (m, mline) = s.require("m")?;
    let (r, rline) = s.require("r")?;
    let (result, resline) = s.require("result")?;
    let modulus = parse_u64(&m, mline, "dissection modulus")?;
    let residue = parse_u64(&r, rline, "dissection residue")?;
    if modulus == 0 || residue >= modulus {
        return Err(ManifestError {
            line: rline,
            message: format!("residue {} out of range for m = {}", residue, modulus),
        });
    }
    let verify_order = match s.take("order") {
        Some((o, oline)) => Some(parse_u64(&o, oline, "order")? as usize),
        None => None,
    };
    s.finish()?;
    Ok(Claim::Dissection(DissectionClaim {
        id,
        source: parse_expr_field(&source, sline, "source")?,
        modulus,
        residue,
        result: parse_expr_field(&result, resline, "result")?,
        verify_order,
        cite,
    }))
}

fn build_congruence(mut s: Stanza, id: String, cite: String) -> Result<Claim, ManifestError> {
    let (fam, fline) = s.require("family")?;
    let family = parse_family(&fam, fline)?;
    let (a, aline) = s.require("A")?;
    let (b, bline) = s.require("B")?;
    let progression = (
        parse_u64(&a, aline, "progression step A")?,
        parse_u64(&b, bline, "progression offset B")?,
    );
    if progression.0 == 0 {
        return Err(ManifestError {
            line: aline,
            message: String::from("progression step A must be >= 1"),
        });
    }
    let (nmax, nline) = s.require("n-max")?;
    let n_max = parse_u64(&nmax, nline, "n-max")?;
    let modulus = match s.take("mod") {
        Some((m, mline)) => {
            let m = parse_u64(&m, mline, "modulus")?;
            if m < 2 {
                return Err(ManifestError {
                    line: mline,
                    message: format!("modulus {} too small", m),
                });
            }
            Some(m)
        }
        None => None,
    };
    let start = s.start_line;
    let kind = if let Some((scale, scline)) = s.take("scale") {
        let scale = parse_u64(&scale, scline, "scale")?;
        if scale < 2 {
            return Err(ManifestError {
                line: scline,
                message: String::from("scale must be >= 2"),
            });
        }
        let (am, amline) = s.require("alpha-max")?;
        let alpha_max = parse_u64(&am, amline, "alpha-max")? as u32;
        let alternating = match s.take("sign") {
            Some((sg, sgline)) => match sg.trim() {
                "alternating" => true,
                "+" => false,
                other => {
                    return Err(ManifestError {
                        line: sgline,
                        message: format!("invalid sign '{}' (use '+' or 'alternating')", other),
                    })
                }
            },
            None => false,
        };
        CongruenceKind::ScaledRelation {
            scale,
            alpha_max,
            alternating,
        }
    } else if let Some((fam2, f2line)) = s.take("family2") {
        CongruenceKind::FamilyRelation {
            other: parse_family(&fam2, f2line)?,
        }
    } else if let Some((rf, rfline)) = s.take("rhs-family") {
        let rhs_family = parse_family(&rf, rfline)?;
        let (ra, raline) = s.require("rhs-A")?;
        let (rb, rbline) = s.require("rhs-B")?;
        let (rs, rsline) = s.require("rhs-scalar")?;
        CongruenceKind::ExactEquality {
            rhs_family,
            rhs_progression: (
                parse_u64(&ra, raline, "rhs-A")?,
                parse_u64(&rb, rbline, "rhs-B")?,
            ),
            rhs_scalar: parse_u64(&rs, rsline, "rhs-scalar")?,
        }
    } else {
        CongruenceKind::Vanishing
    };
    match (&kind, modulus) {
        (CongruenceKind::ExactEquality { .. }, Some(_)) => {
            return Err(ManifestError {
                line: start,
                message: String::from("exact-equality claims take no 'mod:'"),
            })
        }
        (CongruenceKind::ExactEquality { .. }, None) => {}
        (_, None) => {
            return Err(ManifestError {
                line: start,
                message: String::from("congruence claim needs 'mod:'"),
            })
        }
        _ => {}
    }
    s.finish()?;
    Ok(Claim::Congruence(CongruenceClaim {
        id,
        family,
        progression,
        modulus,
        kind,
        n_max,
        cite,
    }))
}

fn build_prime_family(mut s: Stanza, id: String, cite: String) -> Result<Claim, ManifestError> {
    let (fam, fline) = s.require("family")?;
    let family = parse_family(&fam, fline)?;
    let (m, mline) = s.require("mod")?;
    let modulus = parse_u64(&m, mline, "modulus")?;
    if modulus < 2 {
        return Err(ManifestError {
            line: mline,
            message: format!("modulus {} too small", modulus),
        });
    }
    let (cond, cline) = s.require("cond")?;
    let condition = parse_condition(&cond, cline)?;
    let note_legendre = match s.take("note-legendre") {
        Some((v, vline)) => Some(parse_i64(&v, vline, "note-legendre")?),
        None => None,
    };
    let (a, aline) = s.require("A")?;
    let coef_n = parse_u64(&a, aline, "A")?;
    let (ci, ciline) = s.require("i-coeff")?;
    let coef_i = parse_u64(&ci, ciline, "i-coeff")?;
    let (cp, cpline) = s.require("p-coeff")?;
    let coef_p = parse_u64(&cp, cpline, "p-coeff")?;
    let (off, offline) = s.require("offset")?;
    let offset = parse_u64(&off, offline, "offset")?;
    let (pr, prline) = s.require("primes")?;
    let primes = parse_primes(&pr, prline)?;
    let (nmax, nline) = s.require("n-max")?;
    let n_max = parse_u64(&nmax, nline, "n-max")?;
    let alpha1_n_max = match s.take("alpha1-n-max") {
        Some((v, vline)) => Some(parse_u64(&v, vline, "alpha1-n-max")?),
        None => None,
    };
    s.finish()?;
    Ok(Claim::PrimeFamily(PrimeFamilyClaim {
        id,
        family,
        modulus,
        condition,
        note_legendre,
        coef_n,
        coef_i,
        coef_p,
        offset,
        primes,
        n_max,
        alpha1_n_max,
        cite,
    }))
}

/// Parse a manifest into a registry, rejecting duplicate ids.
pub fn register_manifest(text: &str) -> Result<ClaimRegistry, ManifestError> {
    let mut registry = ClaimRegistry::default();
    let mut stanza: Option<Stanza> = None;
    let mut stanzas: Vec<Stanza> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        if line.trim_start().starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if let Some(st) = stanza.take() {
                stanzas.push(st);
            }
            continue;
        }
        let (key, value) = line.split_once(':').ok_or(ManifestError {
            line: lineno,
            message: format!("expected 'key: value', found '{}'", line.trim()),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let st = stanza.get_or_insert_with(|| Stanza {
            start_line: lineno,
            fields: BTreeMap::new(),
        });
        if st.fields.insert(key.clone(), (value, lineno)).is_some() {
            return Err(ManifestError {
                line: lineno,
                message: format!("duplicate field '{}:'", key),
            });
        }
    }
    if let Some(st) = stanza.take() {
        stanzas.push(st);
    }

    for mut st in stanzas {
        let start = st.start_line;
        let (id, _) = st.require("id")?;
        if registry.find(&id).is_some() {
            return Err(ManifestError {
                line: start,
                message: format!("duplicate claim id '{}'", id),
            });
        }
        let (kind, kline) = st.require("kind")?;
        let cite = st.take("cite").map(|(v, _)| v).unwrap_or_default();
        let claim = match kind.trim() {
            "identity" => build_identity(st, id, cite)?,
            "dissection" => build_dissection(st, id, cite)?,
            "congruence" => build_congruence(st, id, cite)?,
            "prime-family" => build_prime_family(st, id, cite)?,
            other => {
                return Err(ManifestError {
                    line: kline,
                    message: format!("unknown claim kind '{}'", other),
                })
            }
        };
        registry.claims.push(claim);
    }
    Ok(registry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_is_empty_registry() {
        let r = register_manifest("").unwrap();
        assert!(r.is_empty());
        let r = register_manifest("# only comments\n\n# more\n").unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn parses_identity_stanza() {
        let text = "\
id: f12
kind: identity
lhs: f1^2
rhs: f2*f8^5/(f4^2*f16^2) - 2*q*f2*f16^2/f8
order: 400
cite: Entry 25
";
        let r = register_manifest(text).unwrap();
        assert_eq!(r.len(), 1);
        match r.find("f12").unwrap() {
            Claim::Identity(c) => {
                assert_eq!(c.verify_order, Some(400));
                assert_eq!(c.ring, CoefficientRing::Exact);
                assert_eq!(c.cite, "Entry 25");
            }
            other => panic!("wrong kind: {:?}", other),
        }
    }

    #[test]
    fn parses_modular_identity() {
        let text = "\
id: bt
kind: identity
lhs: f2^4
rhs: f1^8
mod: 8
";
        let r = register_manifest(text).unwrap();
        match r.find("bt").unwrap() {
            Claim::Identity(c) => assert_eq!(c.ring, CoefficientRing::Modular(8)),
            _ => panic!(),
        }
    }

    #[test]
    fn rejects_duplicate_ids() {
        let text = "\
id: a
kind: identity
lhs: f1
rhs: f1

id: a
kind: identity
lhs: f2
rhs: f2
";
        let err = register_manifest(text).unwrap_err();
        assert!(err.message.contains("duplicate claim id"));
    }

    #[test]
    fn malformed_expression_reports_position() {
        let text = "\
id: bad
kind: identity
lhs: f1^2
rhs: f2*)
";
        let err = register_manifest(text).unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.message.contains("rhs"));
    }

    #[test]
    fn unknown_field_is_rejected() {
        let text = "\
id: x
kind: identity
lhs: f1
rhs: f1
bogus: 3
";
        let err = register_manifest(text).unwrap_err();
        assert!(err.message.contains("unknown field"));
    }

    #[test]
    fn parses_congruence_kinds() {
        let text = "\
id: vanish
kind: congruence
family: tschur-over 9
A: 24
B: 23
mod: 32
n-max: 400

id: scaled
kind: congruence
family: tschur-over 9
A: 6
B: 3
mod: 16
scale: 3
alpha-max: 2
sign: alternating
n-max: 100

id: tuple-rel
kind: congruence
family: tschur-over-tuple 3 3
family2: tschur-over-tuple 3 1
A: 1
B: 0
mod: 4
n-max: 300

id: equality
kind: congruence
family: tschur-over-tuple 3 2
A: 2
B: 1
rhs-family: tschur-over 3
rhs-A: 4
rhs-B: 2
rhs-scalar: 2
n-max: 200
";
        let r = register_manifest(text).unwrap();
        assert_eq!(r.len(), 4);
        match r.find("vanish").unwrap() {
            Claim::Congruence(c) => {
                assert_eq!(c.kind, CongruenceKind::Vanishing);
                assert_eq!(c.modulus, Some(32));
            }
            _ => panic!(),
        }
        match r.find("scaled").unwrap() {
            Claim::Congruence(c) => assert!(matches!(
                c.kind,
                CongruenceKind::ScaledRelation { scale: 3, alpha_max: 2, alternating: true }
            )),
            _ => panic!(),
        }
        match r.find("equality").unwrap() {
            Claim::Congruence(c) => {
                assert_eq!(c.modulus, None);
                assert!(matches!(c.kind, CongruenceKind::ExactEquality { rhs_scalar: 2, .. }));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn congruence_without_mod_needs_equality_fields() {
        let text = "\
id: broken
kind: congruence
family: tschur-over 3
A: 2
B: 1
n-max: 10
";
        let err = register_manifest(text).unwrap_err();
        assert!(err.message.contains("needs 'mod:'"));
    }

    #[test]
    fn parses_prime_family() {
        let text = "\
id: pf
kind: prime-family
family: tschur-over 9
mod: 3
cond: legendre(-3) = -1
A: 6
i-coeff: 6
p-coeff: 1
offset: 0
primes: auto(2)
n-max: 50
alpha1-n-max: 3
";
        let r = register_manifest(text).unwrap();
        match r.find("pf").unwrap() {
            Claim::PrimeFamily(c) => {
                assert_eq!(c.condition, PrimeCondition::LegendreIs { a: -3, value: -1 });
                assert_eq!(c.primes, PrimeSelection::Auto(2));
                assert_eq!(c.alpha1_n_max, Some(3));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn parses_residue_condition_and_prime_list() {
        let text = "\
id: pf2
kind: prime-family
family: tschur-over 3
mod: 32
cond: p = 5 (mod 6)
note-legendre: -12
A: 24
i-coeff: 24
p-coeff: 7
offset: 0
primes: 5 11
n-max: 50
";
        let r = register_manifest(text).unwrap();
        match r.find("pf2").unwrap() {
            Claim::PrimeFamily(c) => {
                assert_eq!(c.condition, PrimeCondition::ResidueClass { c: 5, modulus: 6 });
                assert_eq!(c.primes, PrimeSelection::List(alloc::vec![5, 11]));
                assert_eq!(c.note_legendre, Some(-12));
            }
            _ => panic!(),
        }
    }
}
