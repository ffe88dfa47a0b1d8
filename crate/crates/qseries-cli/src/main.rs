//! `qseries` — expand q-series expressions and verify claim manifests.
//!
//! Subcommands:
//! - `expand`: print the coefficient table of an expression.
//! - `verify`: run a claim manifest, emit a JSON (or TSV) report, exit 0
//!   iff every claim verified.
//! - `oracle`: compare generating-function coefficients against the
//!   brute-force enumeration oracles.
//! - `scan`: search progressions An+B whose coefficients all vanish mod m
//!   below a bound (conjectural output).

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qseries_core::claims::{register_manifest, Claim, ClaimRegistry};
use qseries_core::expr::parse_expression;
use qseries_core::families::{
    enumerate_overpartitions, family_gf, oracle_t_schur, oracle_t_schur_over,
    oracle_t_schur_over_direct, oracle_t_schur_regular, FamilySpec,
};
use qseries_core::ring::CoefficientRing;
use qseries_core::verify::{scan_progressions, verify_claim, VerifyOptions};
use qseries_core::{VerificationReport, VerifyStatus};

#[derive(Parser)]
#[command(name = "qseries", version, about = "Truncated q-series expansion and claim verification")]
struct Cli {
    /// Expansion order / verification order override.
    #[arg(long, global = true)]
    order: Option<usize>,

    /// Coefficient ring: `exact` or `mod:M`.
    #[arg(long, global = true, default_value = "exact")]
    ring: String,

    /// Worker threads for claim verification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,

    /// Default verification order for claims without one.
    #[arg(long, env = "QSERIES_DEFAULT_ORDER", default_value_t = 400, hide_env_values = true)]
    default_order: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an expression and print its coefficients.
    Expand(ExpandArgs),
    /// Verify every claim in a manifest file.
    Verify(VerifyArgs),
    /// Compare series coefficients against enumeration oracles.
    Oracle(OracleArgs),
    /// Scan residues B < A with coefficient(An+B) = 0 mod M up to n-max.
    Scan(ScanArgs),
}

#[derive(Args)]
struct ExpandArgs {
    /// Expression, e.g. "f2^3*f9^2*f36/(f1^2*f4*f18^3)" or "gf(tschur-over, 5)".
    expr: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to the claim manifest.
    manifest: String,

    /// Restrict to claims matching `id=X` or `kind=X` (repeatable).
    #[arg(long)]
    filter: Vec<String>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    /// Family: overpartition | tschur | tschur-over.
    #[arg(long)]
    family: String,

    /// Odd parameter t >= 3 (for the tschur families).
    #[arg(long)]
    t: Option<u64>,

    /// Tuple parameter; oracles exist only for r = 1.
    #[arg(long, default_value_t = 1)]
    r: u64,

    /// Largest n to tabulate.
    #[arg(long, default_value_t = 10)]
    n_max: u64,
}

#[derive(Args)]
struct ScanArgs {
    /// Family: overpartition | tschur | tschur-over | tschur-over-tuple.
    #[arg(long)]
    family: String,

    #[arg(long)]
    t: Option<u64>,

    #[arg(long)]
    r: Option<u64>,

    /// Progression step A.
    #[arg(long = "a", visible_alias = "progression")]
    a: u64,

    /// Modulus to test divisibility against.
    #[arg(long = "mod")]
    modulus: u64,

    #[arg(long, default_value_t = 200)]
    n_max: u64,
}

fn parse_ring(text: &str) -> Result<CoefficientRing, String> {
    if text == "exact" {
        return Ok(CoefficientRing::Exact);
    }
    if let Some(m) = text.strip_prefix("mod:") {
        let m: u64 = m
            .parse()
            .map_err(|_| format!("invalid modulus in --ring '{}'", text))?;
        return CoefficientRing::modular(m).map_err(|e| e.to_string());
    }
    Err(format!("invalid --ring '{}': use 'exact' or 'mod:M'", text))
}

fn parse_family(name: &str, t: Option<u64>, r: Option<u64>) -> Result<FamilySpec, String> {
    match name {
        "overpartition" => Ok(FamilySpec::Overpartition),
        "tschur" => {
            let t = t.ok_or("--t required for family tschur")?;
            FamilySpec::t_schur(t).map_err(|e| e.to_string())
        }
        "tschur-over" => {
            let t = t.ok_or("--t required for family tschur-over")?;
            FamilySpec::t_schur_over(t).map_err(|e| e.to_string())
        }
        "tschur-over-tuple" => {
            let t = t.ok_or("--t required for family tschur-over-tuple")?;
            let r = r.ok_or("--r required for family tschur-over-tuple")?;
            FamilySpec::t_schur_over_tuple(t, r).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown family '{}'", other)),
    }
}

// ---------------------------------------------------------------------------
// Report serialization (schema "1")
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonReport {
    schema: &'static str,
    claims: Vec<JsonClaim>,
}

#[derive(Serialize)]
struct JsonClaim {
    id: String,
    status: String,
    order: usize,
    detail: String,
    runtime_ms: u64,
}

fn to_json_claim(rep: &VerificationReport) -> JsonClaim {
    let (status, order, detail) = match &rep.status {
        VerifyStatus::Verified { order } => ("verified".to_string(), *order, rep.detail.clone()),
        VerifyStatus::Counterexample { index, lhs, rhs } => (
            "counterexample".to_string(),
            0,
            if rep.detail.is_empty() {
                format!("index {}: {} vs {}", index, lhs, rhs)
            } else {
                format!("index {}: {} vs {} ({})", index, lhs, rhs, rep.detail)
            },
        ),
        VerifyStatus::ConfigError { message } => ("config-error".to_string(), 0, message.clone()),
        VerifyStatus::OrderTooSmall { needed, had } => (
            "order-too-small".to_string(),
            0,
            format!("needed {}, had {}", needed, had),
        ),
    };
    JsonClaim {
        id: rep.claim_id.clone(),
        status,
        order,
        detail: format!("[{}] {}", rep.ring, detail),
        runtime_ms: rep.runtime_ms,
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_expand(cli: &Cli, args: &ExpandArgs) -> Result<ExitCode, String> {
    let ring = parse_ring(&cli.ring)?;
    let order = cli.order.unwrap_or(cli.default_order);
    let expr = parse_expression(&args.expr).map_err(|e| e.to_string())?;
    let series = expr.expand(order, ring).map_err(|e| e.to_string())?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.format {
        Format::Tsv => {
            for n in 0..series.order() {
                writeln!(out, "{}\t{}", n, series.coeff_string(n)).map_err(|e| e.to_string())?;
            }
        }
        Format::Json => {
            let rows: Vec<(usize, String)> =
                (0..series.order()).map(|n| (n, series.coeff_string(n))).collect();
            let json = serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?;
            writeln!(out, "{}", json).map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn claim_matches(claim: &Claim, filters: &[String]) -> Result<bool, String> {
    for f in filters {
        let (key, value) = f
            .split_once('=')
            .ok_or_else(|| format!("invalid --filter '{}': use key=value", f))?;
        let hit = match key {
            "id" => claim.id() == value,
            "kind" => claim.kind_name() == value,
            other => return Err(format!("unknown filter key '{}'", other)),
        };
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Run claims with a small worker pool; results keep manifest order.
fn run_claims(claims: &[&Claim], opts: &VerifyOptions, jobs: usize) -> Vec<VerificationReport> {
    let jobs = jobs.max(1).min(claims.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<VerificationReport>>> = Mutex::new(vec![None; claims.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= claims.len() {
                    break;
                }
                let started = Instant::now();
                let mut rep = verify_claim(claims[i], opts);
                rep.runtime_ms = started.elapsed().as_millis() as u64;
                results.lock().unwrap()[i] = Some(rep);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every claim slot filled"))
        .collect()
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode, String> {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| format!("cannot read '{}': {}", args.manifest, e))?;
    let registry: ClaimRegistry = register_manifest(&text).map_err(|e| e.to_string())?;
    let selected: Vec<&Claim> = registry
        .claims()
        .iter()
        .filter_map(|c| match claim_matches(c, &args.filter) {
            Ok(true) => Some(Ok(c)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, _>>()?;
    let opts = VerifyOptions {
        default_order: cli.default_order,
        order_override: cli.order,
    };
    let reports = run_claims(&selected, &opts, cli.jobs);

    let all_ok = reports.iter().all(|r| r.passed());
    let rendered = match cli.format {
        Format::Json => {
            let json = JsonReport {
                schema: "1",
                claims: reports.iter().map(to_json_claim).collect(),
            };
            serde_json::to_string_pretty(&json).map_err(|e| e.to_string())? + "\n"
        }
        Format::Tsv => {
            let mut s = String::new();
            for rep in &reports {
                let c = to_json_claim(rep);
                s += &format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    c.id, c.status, c.order, c.detail, c.runtime_ms
                );
            }
            s
        }
    };
    match &args.out {
        Some(path) => fs::write(path, rendered).map_err(|e| e.to_string())?,
        None => print!("{}", rendered),
    }
    // human summary on stderr
    let verified = reports.iter().filter(|r| r.passed()).count();
    eprintln!("{}/{} claims verified", verified, reports.len());
    for rep in reports.iter().filter(|r| !r.passed()) {
        eprintln!("FAIL {}: {}", rep.claim_id, rep.status);
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs) -> Result<ExitCode, String> {
    if args.r != 1 {
        return Err(String::from(
            "enumeration oracles are defined for r = 1 only",
        ));
    }
    let family = parse_family(&args.family, args.t, Some(args.r))?;
    let order = args.n_max as usize + 1;
    let gf = family_gf(family, order, CoefficientRing::Exact).map_err(|e| e.to_string())?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut rows: Vec<(u64, String, Vec<String>, bool)> = Vec::new();
    for n in 0..=args.n_max {
        let series = gf.coeff_string(n as usize);
        let oracles: Vec<u64> = match family {
            FamilySpec::Overpartition => vec![enumerate_overpartitions(n, |_| true)],
            FamilySpec::TSchur { t } => vec![
                oracle_t_schur(t, n).map_err(|e| e.to_string())?,
                oracle_t_schur_regular(t, n).map_err(|e| e.to_string())?,
            ],
            FamilySpec::TSchurOver { t } | FamilySpec::TSchurOverTuple { t, r: 1 } => vec![
                oracle_t_schur_over(t, n).map_err(|e| e.to_string())?,
                oracle_t_schur_over_direct(t, n).map_err(|e| e.to_string())?,
            ],
            FamilySpec::TSchurOverTuple { .. } => unreachable!("r = 1 checked above"),
        };
        let matches = oracles.iter().all(|&c| series == c.to_string());
        rows.push((
            n,
            series,
            oracles.iter().map(|c| c.to_string()).collect(),
            matches,
        ));
    }
    let all_match = rows.iter().all(|r| r.3);
    match cli.format {
        Format::Tsv => {
            for (n, series, oracles, ok) in &rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    n,
                    series,
                    oracles.join("\t"),
                    if *ok { "ok" } else { "MISMATCH" }
                )
                .map_err(|e| e.to_string())?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                n: u64,
                series: String,
                oracles: Vec<String>,
                matches: bool,
            }
            let json_rows: Vec<Row> = rows
                .into_iter()
                .map(|(n, series, oracles, matches)| Row { n, series, oracles, matches })
                .collect();
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&json_rows).map_err(|e| e.to_string())?
            )
            .map_err(|e| e.to_string())?;
        }
    }
    Ok(if all_match { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_scan(cli: &Cli, args: &ScanArgs) -> Result<ExitCode, String> {
    let family = parse_family(&args.family, args.t, args.r)?;
    if args.a == 0 {
        return Err(String::from("--a must be >= 1"));
    }
    let candidates =
        scan_progressions(family, args.a, args.modulus, args.n_max).map_err(|e| e.to_string())?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.format {
        Format::Tsv => {
            for b in &candidates {
                writeln!(
                    out,
                    "conjectural\t{}n+{} = 0 (mod {})\tn <= {}",
                    args.a, b, args.modulus, args.n_max
                )
                .map_err(|e| e.to_string())?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Scan<'a> {
                label: &'a str,
                a: u64,
                modulus: u64,
                n_max: u64,
                candidates: &'a [u64],
            }
            let json = serde_json::to_string_pretty(&Scan {
                label: "conjectural",
                a: args.a,
                modulus: args.modulus,
                n_max: args.n_max,
                candidates: &candidates,
            })
            .map_err(|e| e.to_string())?;
            writeln!(out, "{}", json).map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Expand(args) => cmd_expand(&cli, args),
        Command::Verify(args) => cmd_verify(&cli, args),
        Command::Oracle(args) => cmd_oracle(&cli, args),
        Command::Scan(args) => cmd_scan(&cli, args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
