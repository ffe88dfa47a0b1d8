//! Checks over the shipped claim manifests: parseability, printer
//! round-trips, modular spot checks against exact arithmetic, and the
//! tuple-reduction instances.

use std::fs;
use std::path::PathBuf;

use qseries_core::claims::{register_manifest, Claim};
use qseries_core::expr::{parse_expression, EtaExpression};
use qseries_core::families::{family_gf, FamilySpec};
use qseries_core::ring::CoefficientRing;
use qseries_core::verify::exact_spot_check;

fn manifest_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../manifests")
        .join(name)
}

fn shipped_registry() -> qseries_core::claims::ClaimRegistry {
    let text = fs::read_to_string(manifest_path("paper_claims.qsm")).unwrap();
    register_manifest(&text).unwrap()
}

#[test]
fn shipped_manifest_parses_with_expected_size() {
    let reg = shipped_registry();
    assert!(reg.len() >= 35, "only {} claims", reg.len());
    // a few anchors
    assert!(reg.find("s9-6n1").is_some());
    assert!(reg.find("c-s9-24n23-mod32").is_some());
    assert!(reg.find("pf-s9-mod3-quadres").is_some());
}

#[test]
fn refuted_manifest_parses() {
    let text = fs::read_to_string(manifest_path("refuted_claims.qsm")).unwrap();
    let reg = register_manifest(&text).unwrap();
    assert_eq!(reg.len(), 1);
}

fn expressions_of(claim: &Claim) -> Vec<&EtaExpression> {
    match claim {
        Claim::Identity(c) => vec![&c.lhs, &c.rhs],
        Claim::Dissection(c) => vec![&c.source, &c.result],
        _ => vec![],
    }
}

/// pretty-print(parse(text)) reparses to an equal AST for every
/// expression in the shipped manifest.
#[test]
fn printer_round_trips_entire_manifest() {
    let reg = shipped_registry();
    let mut seen = 0;
    for claim in reg.claims() {
        for expr in expressions_of(claim) {
            let printed = format!("{}", expr);
            let reparsed = parse_expression(&printed)
                .unwrap_or_else(|e| panic!("{}: '{}' failed to reparse: {}", claim.id(), printed, e));
            assert_eq!(&reparsed, expr, "claim {}", claim.id());
            seen += 1;
        }
    }
    assert!(seen > 100, "expected >100 expressions, saw {}", seen);
}

/// Re-verify the first indices of several modular claims in exact
/// arithmetic; the residues must match the modular-ring run.
#[test]
fn modular_runs_match_exact_arithmetic_spot_checks() {
    let reg = shipped_registry();
    let picks = [
        "c-s9-12n7-mod8",
        "c-s9-24n23-mod32",
        "c-s3-32n20-mod4",
        "c-s3-24n22-mod24",
        "c-s3-36n30-mod12",
    ];
    for id in picks {
        match reg.find(id) {
            Some(Claim::Congruence(c)) => {
                assert!(exact_spot_check(c, 20).unwrap(), "spot check failed for {}", id);
            }
            other => panic!("claim {} missing or wrong kind: {:?}", id, other.map(|c| c.kind_name())),
        }
    }
}

/// The four registered tuple-reduction instances hold to n <= 300.
#[test]
fn tuple_reduction_instances() {
    let cases: &[(u64, u64, u64, u64)] = &[
        // (t, r_big, r_small, modulus) with r_big = 2^z m + e, r_small = e
        (3, 3, 1, 4),
        (3, 5, 1, 8),
        (5, 7, 3, 4),
        (9, 9, 1, 16),
    ];
    for &(t, big, small, m) in cases {
        let ring = CoefficientRing::Modular(m);
        let a = family_gf(FamilySpec::t_schur_over_tuple(t, big).unwrap(), 301, ring).unwrap();
        let b = family_gf(FamilySpec::t_schur_over_tuple(t, small).unwrap(), 301, ring).unwrap();
        assert_eq!(
            a.first_mismatch(&b, 301).unwrap(),
            None,
            "t={} r={} vs r={} mod {}",
            t,
            big,
            small,
            m
        );
    }
}

/// The three extracted classes of the 3L-family generating functions
/// reassemble to the original series.
#[test]
fn three_ell_classes_reassemble() {
    for t in [3u64, 9, 15] {
        let gf = family_gf(
            FamilySpec::t_schur_over(t).unwrap(),
            240,
            CoefficientRing::Exact,
        )
        .unwrap();
        let mut total: Option<qseries_core::TruncatedSeries> = None;
        for r in 0..3u64 {
            let class = gf
                .extract_dissection(3, r)
                .unwrap()
                .substitute_power(3)
                .unwrap()
                .mul_qpower(r as usize);
            total = Some(match total {
                None => class,
                Some(acc) => acc.add(&class).unwrap(),
            });
        }
        let total = total.unwrap();
        let shared = total.order().min(gf.order());
        assert!(shared >= 238);
        assert_eq!(total.truncate(shared), gf.truncate(shared), "t={}", t);
    }
}

/// Deeper sanity anchor: the headline congruence holds at its first few
/// indices in exact arithmetic as well.
#[test]
fn s9_24n23_exact_prefix() {
    use num_bigint::BigInt;
    let gf = family_gf(
        FamilySpec::t_schur_over(9).unwrap(),
        24 * 6 + 24,
        CoefficientRing::Exact,
    )
    .unwrap();
    for n in 0..=5u64 {
        let c = gf.coeff_bigint((24 * n + 23) as usize);
        assert_eq!(&c % BigInt::from(32), BigInt::from(0), "n={} coefficient {}", n, c);
    }
}
