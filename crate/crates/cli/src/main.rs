mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use fthresh::fthreshold::{bracket_threshold, denominator_structure_check, reconstruct, verify_klein_cone};
use fthresh::gieseker::{accumulation_report, family_csv, threshold_sequence, GiesekerParams};
use fthresh::groebner::Budget;
use fthresh::hnslope::{lemma_t_consistency, threshold_from_amin, HNData};
use fthresh::nu::{frobenius_witness_checks, CacheStore, EngineConfig, Method, NuEngine, NuError, NuRecord};
use fthresh::rational::{self, Rational};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn field(field: &str, err: impl std::fmt::Display) -> Self {
        CliError::validation(format!("{field}: {err}"))
    }
}

fn from_nu(field: &str, e: NuError) -> CliError {
    if e.is_resource_limit() {
        CliError {
            code: EXIT_RESOURCE,
            message: e.to_string(),
        }
    } else {
        CliError::field(field, e)
    }
}

fn from_threshold(e: fthresh::fthreshold::ThresholdError) -> CliError {
    match e {
        fthresh::fthreshold::ThresholdError::Nu(n) => from_nu("nu", n),
        fthresh::fthreshold::ThresholdError::Precondition { field, msg } => CliError::field(&format!("-{field}"), msg),
        other => CliError::field("records", other),
    }
}

#[derive(Parser)]
#[command(name = "fthresh", version, about = "F-thresholds in positive characteristic")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on concurrent containment probes.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Time budget per basis or elimination, in milliseconds.
    #[arg(long, global = true)]
    budget_ms: Option<u64>,
    /// JSON-lines cache of computed nu values.
    #[arg(long, global = true, env = "FTHRESH_CACHE")]
    cache: Option<PathBuf>,
    /// Include per-record wall times in the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// nu_1 .. nu_e of I against J.
    Nu(NuArgs),
    /// nu sequence, certified bracket and reconstruction of c^J(I).
    Estimate(EstimateArgs),
    /// The Klein-type cone x^(d-1)y + y^(d-1)z + z^(d-1)x against its closed form.
    #[command(name = "verify-klein-cone", alias = "verify-remark42")]
    VerifyKleinCone(VerifyArgs),
    /// Threshold sequence of the Gieseker-bundle family.
    Gieseker(GiesekerArgs),
    /// Slope calculus on a Harder–Narasimhan scenario file.
    Hn(HnArgs),
    /// Denominator structure of a threshold defect.
    CheckDenominator(DenominatorArgs),
}

#[derive(Args)]
struct IdealArgs {
    /// Ring file.
    #[arg(long)]
    ring: PathBuf,
    /// Ideal I (default: the maximal ideal).
    #[arg(long = "I")]
    i: Option<PathBuf>,
    /// Ideal J (default: the maximal ideal).
    #[arg(long = "J")]
    j: Option<PathBuf>,
    /// Largest Frobenius level.
    #[arg(short = 'e', long = "e-max", default_value_t = 1)]
    e_max: u32,
    /// Force a containment kernel.
    #[arg(long)]
    method: Option<Method>,
}

#[derive(Args)]
struct NuArgs {
    #[command(flatten)]
    ideals: IdealArgs,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    ideals: IdealArgs,
    /// Denominator bound b for reconstruction (denominators b and p*b).
    #[arg(long, default_value_t = 8)]
    b_bound: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short = 'd', long)]
    d: u64,
    #[arg(short = 'p', long)]
    p: u64,
    #[arg(short = 'e', long = "e-max", default_value_t = 1)]
    e_max: u32,
}

#[derive(Args)]
struct GiesekerArgs {
    #[arg(short = 'p', long)]
    p: u64,
    #[arg(short = 'g', long)]
    g: u64,
    #[arg(long)]
    m0: u32,
    #[arg(long)]
    n0: u64,
    /// Number of terms, m = 0 .. mmax-1.
    #[arg(long, default_value_t = 10)]
    mmax: u32,
    /// Emit the accumulation report instead of the plain sequence (json only).
    #[arg(long)]
    accumulation: bool,
}

#[derive(Args)]
struct HnArgs {
    /// Scenario file {"quotients": [[rank, "num/den"], ...], "level": m, "strong": bool}.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(short = 'p', long)]
    p: u64,
    /// Twist by a line bundle of this degree.
    #[arg(long, allow_hyphen_values = true)]
    twist: Option<String>,
    /// Dualize (after twisting).
    #[arg(long)]
    dual: bool,
    /// Pull back by Frobenius this many times (after twist and dual).
    #[arg(long, default_value_t = 0)]
    pullback: u32,
    /// Declare that each pullback is still the HN filtration.
    #[arg(long)]
    assume_remains_hn: bool,
    /// Multiplicity d for the threshold 1 - a_min/d.
    #[arg(short = 'd', long)]
    d: Option<u64>,
}

#[derive(Args)]
struct DenominatorArgs {
    /// Check mu_min(F^{m*}V)/p^m + C/p = mu_min(V) instead.
    #[arg(long)]
    lemma_t: bool,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "lemma_t")]
    c_p: Option<String>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "lemma_t")]
    c_inf: Option<String>,
    #[arg(long, allow_hyphen_values = true, required_if_eq("lemma_t", "true"))]
    mu_v: Option<String>,
    #[arg(long, allow_hyphen_values = true, required_if_eq("lemma_t", "true"))]
    mu_fmv: Option<String>,
    #[arg(short = 'm', long, default_value_t = 1)]
    m: u32,
    #[arg(short = 'p', long)]
    p: u64,
    #[arg(short = 'g', long)]
    g: u64,
    #[arg(short = 'r', long)]
    r: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn engine(common: &Common) -> Result<NuEngine, CliError> {
    if common.threads == 0 {
        return Err(CliError::validation("--threads: must be at least 1"));
    }
    let mut budget = Budget::default();
    if let Some(ms) = common.budget_ms {
        budget.max_time = Duration::from_millis(ms);
    }
    Ok(NuEngine::new(EngineConfig {
        method: None,
        budget,
        threads: common.threads,
    }))
}

fn open_cache(common: &Common) -> Result<CacheStore, CliError> {
    match &common.cache {
        Some(path) => CacheStore::open(path).map_err(|e| CliError::field("--cache", e)),
        None => Ok(CacheStore::in_memory()),
    }
}

fn parse_rational(flag: &str, text: &str) -> Result<Rational, CliError> {
    rational::parse(text).map_err(|e| CliError::field(flag, e))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn report_stats(engine: &NuEngine, start: Instant) {
    #[derive(Serialize)]
    struct Line {
        stats: fthresh::nu::StatsSnapshot,
        wall_ms: u64,
    }
    let line = Line {
        stats: engine.stats(),
        wall_ms: start.elapsed().as_millis() as u64,
    };
    eprintln!("{}", serde_json::to_string(&line).expect("stats serialize"));
}

/// A record as printed; wall time only on request, so reports are stable.
#[derive(Serialize)]
struct RecordOut<'a> {
    ring_digest: &'a str,
    #[serde(rename = "I_digest")]
    i_digest: &'a str,
    #[serde(rename = "J_digest")]
    j_digest: &'a str,
    e: u32,
    q: u64,
    nu: u64,
    method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<u64>,
}

fn records_out(records: &[NuRecord], timings: bool) -> Vec<RecordOut<'_>> {
    records
        .iter()
        .map(|r| RecordOut {
            ring_digest: &r.ring_digest,
            i_digest: &r.i_digest,
            j_digest: &r.j_digest,
            e: r.e,
            q: r.q,
            nu: r.nu,
            method: r.method,
            wall_ms: timings.then_some(r.wall_ms),
        })
        .collect()
}

fn compute_records(common: &Common, args: &IdealArgs, engine: &mut NuEngine) -> Result<(Vec<NuRecord>, u64, bool, u64), CliError> {
    if args.e_max == 0 {
        return Err(CliError::validation("-e: must be at least 1"));
    }
    let ring = input::load_ring(&args.ring)?;
    let i = input::load_ideal("--I", args.i.as_deref(), &ring)?;
    let j = input::load_ideal("--J", args.j.as_deref(), &ring)?;
    engine.config.method = args.method;
    let mut cache = open_cache(common)?;
    let records = engine
        .nu_sequence(&i, &j, args.e_max, &mut cache)
        .map_err(|e| from_nu("--J", e))?;
    Ok((records, i.generators().len() as u64, !ring.has_relations(), ring.characteristic()))
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let common = &cli.common;
    let start = Instant::now();
    match &cli.command {
        Command::Nu(args) => {
            let mut eng = engine(common)?;
            let (records, _, _, _) = compute_records(common, &args.ideals, &mut eng)?;
            report_stats(&eng, start);
            Ok(match common.format {
                Format::Json => json(&records_out(&records, common.timings)),
                Format::Csv => render::nu_csv(&records),
                Format::Table => render::nu_table(&records),
            })
        }
        Command::Estimate(args) => {
            if args.b_bound == 0 {
                return Err(CliError::validation("--b-bound: must be at least 1"));
            }
            let mut eng = engine(common)?;
            let (records, mu, relation_free, p) = compute_records(common, &args.ideals, &mut eng)?;
            report_stats(&eng, start);
            let interval = bracket_threshold(&records, mu, relation_free).map_err(from_threshold)?;
            let reconstruction = reconstruct(&interval, p, args.b_bound);
            let witness = frobenius_witness_checks(&records, p);
            #[derive(Serialize)]
            struct Estimate<'a> {
                records: Vec<RecordOut<'a>>,
                interval: &'a fthresh::fthreshold::RationalInterval,
                reconstruction: &'a fthresh::fthreshold::ReconstructionResult,
                witness_checks: &'a [fthresh::nu::WitnessCheck],
            }
            let out = Estimate {
                records: records_out(&records, common.timings),
                interval: &interval,
                reconstruction: &reconstruction,
                witness_checks: &witness,
            };
            Ok(match common.format {
                Format::Table => render::estimate_table(&records, &interval, &reconstruction),
                _ => json(&out),
            })
        }
        Command::VerifyKleinCone(args) => {
            let eng = engine(common)?;
            let mut cache = open_cache(common)?;
            let report = verify_klein_cone(&eng, args.d, args.p, args.e_max, &mut cache).map_err(from_threshold)?;
            report_stats(&eng, start);
            let table = render::klein_table(&report);
            Ok(match common.format {
                Format::Table => table,
                _ => {
                    eprint!("{table}");
                    json(&report)
                }
            })
        }
        Command::Gieseker(args) => {
            let params = GiesekerParams::new(args.p, args.g, args.m0, args.n0).map_err(|e| CliError::validation(e.to_string()))?;
            if args.accumulation {
                let report = accumulation_report(&params, args.mmax).map_err(|e| CliError::validation(e.to_string()))?;
                return Ok(json(&report));
            }
            let report = threshold_sequence(&params, args.mmax).map_err(|e| CliError::validation(e.to_string()))?;
            Ok(match common.format {
                Format::Csv => family_csv(&report),
                Format::Json => json(&report),
                Format::Table => render::family_table(&report),
            })
        }
        Command::Hn(args) => run_hn(args),
        Command::CheckDenominator(args) => {
            if args.lemma_t {
                let mu_v = parse_rational("--mu-v", args.mu_v.as_deref().unwrap_or_default())?;
                let mu_fmv = parse_rational("--mu-fmv", args.mu_fmv.as_deref().unwrap_or_default())?;
                if args.m == 0 {
                    return Err(CliError::validation("-m: must be at least 1"));
                }
                if args.g < 2 {
                    return Err(CliError::validation("-g: must be at least 2"));
                }
                if args.r < 2 {
                    return Err(CliError::validation("-r: must be at least 2"));
                }
                let report = lemma_t_consistency(&mu_v, &mu_fmv, args.p, args.m, args.g, args.r)
                    .map_err(|e| CliError::field("-p", e))?;
                return Ok(json(&report));
            }
            if !fthresh::field::is_prime(args.p) {
                return Err(CliError::validation(format!("-p: {} is not a prime", args.p)));
            }
            let c_p = parse_rational("--c-p", args.c_p.as_deref().unwrap_or_default())?;
            let c_inf = parse_rational("--c-inf", args.c_inf.as_deref().unwrap_or_default())?;
            let report = denominator_structure_check(&c_p, &c_inf, args.p, args.g, args.r).map_err(from_threshold)?;
            Ok(json(&report))
        }
    }
}

fn run_hn(args: &HnArgs) -> Result<String, CliError> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| CliError::validation(format!("--scenario {}: cannot read file: {e}", args.scenario.display())))?;
    let input: HNData = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("--scenario {}: {e}", args.scenario.display())))?;
    if !fthresh::field::is_prime(args.p) {
        return Err(CliError::validation(format!("-p: {} is not a prime", args.p)));
    }
    let mut data = input.clone();
    if let Some(t) = &args.twist {
        data = data.twist(&parse_rational("--twist", t)?);
    }
    if args.dual {
        data = data.dual();
    }
    for _ in 0..args.pullback {
        data = data
            .frobenius_pullback(args.p, args.assume_remains_hn)
            .map_err(|e| CliError::field("--assume-remains-hn", e))?;
    }
    let a_min = data.a_min(args.p).ok();
    let threshold = match (args.d, &a_min) {
        (Some(0), _) => return Err(CliError::validation("-d: must be positive")),
        (Some(d), Some(a)) => Some(threshold_from_amin(a, d).map_err(|e| CliError::field("-d", e))?),
        (Some(_), None) => return Err(CliError::validation("-d: threshold needs strong data (scenario field `strong`)")),
        (None, _) => None,
    };
    #[derive(Serialize)]
    struct HnReport {
        input: HNData,
        result: HNData,
        rank: u64,
        #[serde(with = "rational::text")]
        degree: Rational,
        #[serde(with = "rational::text_vec")]
        slopes: Vec<Rational>,
        #[serde(with = "rational::text")]
        mu_max: Rational,
        #[serde(with = "rational::text")]
        mu_min: Rational,
        #[serde(with = "rational::text_opt")]
        a_min: Option<Rational>,
        #[serde(with = "rational::text_opt")]
        threshold: Option<Rational>,
    }
    Ok(json(&HnReport {
        rank: data.rank(),
        degree: data.degree(),
        slopes: data.slopes(),
        mu_max: data.mu_max(),
        mu_min: data.mu_min(),
        a_min,
        threshold,
        input,
        result: data,
    }))
}
