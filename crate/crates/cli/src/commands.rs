use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::{Duration, Instant};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use eulerseq::defining::BuildOptions;
use eulerseq::gf2::MAX_DEGREE;
use eulerseq::io::{write_sequence, DefiningDocument, SequenceFormat};
use eulerseq::quotients::{find_normalized_root, is_wieferich, two_order_profile};
use eulerseq::sequences::generate_threshold;
use eulerseq::verify::{run_suite_with, CheckStatus, SuiteConfig};
use eulerseq::{DefiningData, LinearComplexityReport, Params};

use crate::{Failure, Format, GenerateArgs, OutputArgs, ParamArgs, ReportArgs, VerifyArgs};

pub const REPORT_SCHEMA: &str = "eulerseq-report-v1";
pub const VERIFY_SCHEMA: &str = "eulerseq-verify-v1";
pub const SEQUENCE_SCHEMA: &str = "eulerseq-sequence-v1";

/// Largest term count `generate` accepts.
const COUNT_CEILING: u64 = 1_000_000;

#[derive(Serialize)]
struct ParamsJson {
    p: u64,
    r: u32,
    period: u64,
}

impl ParamsJson {
    fn of(params: &Params) -> Self {
        ParamsJson { p: params.p(), r: params.r_frak(), period: params.period() }
    }
}

fn parse_params(args: &ParamArgs) -> Result<(Params, BuildOptions), Failure> {
    let params = Params::new(args.p, args.r)?;
    if args.max_degree == 0 || args.max_degree > MAX_DEGREE {
        return Err(Failure::Params(format!("--max-degree must lie in 1..={MAX_DEGREE}")));
    }
    Ok((params, BuildOptions { max_degree: args.max_degree }))
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>, Failure> {
    match &out.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))
                .map_err(Failure::Io)?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn emit_json<T: Serialize>(out: &OutputArgs, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    let mut w = open_output(out)?;
    w.write_all(text.as_bytes()).and_then(|()| w.flush()).context("write failed").map_err(Failure::Io)
}

fn millis(d: Duration) -> u64 {
    d.as_millis() as u64
}

pub fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let (params, _) = parse_params(&args.params)?;
    let count = args.count.unwrap_or(params.period());
    if count > COUNT_CEILING {
        return Err(Failure::Params(format!("count {count} exceeds the ceiling {COUNT_CEILING}")));
    }
    let seq = generate_threshold(&params, count as usize);
    match args.format {
        Format::Json => {
            #[derive(Serialize)]
            struct SequenceJson<'a> {
                schema: &'a str,
                params: ParamsJson,
                n: u64,
                bits: String,
            }
            let bits = seq.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
            emit_json(&args.output, &SequenceJson { schema: SEQUENCE_SCHEMA, params: ParamsJson::of(&params), n: count, bits })
        }
        Format::Ascii | Format::Bin => {
            let format = if matches!(args.format, Format::Ascii) { SequenceFormat::Ascii } else { SequenceFormat::Bin };
            let mut w = open_output(&args.output)?;
            write_sequence(&mut w, &seq, format)?;
            w.flush().context("write failed").map_err(Failure::Io)
        }
    }
}

#[derive(Serialize)]
struct CheckJson<'a> {
    check: &'a str,
    params: &'a ParamsJson,
    status: CheckStatus,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u64>,
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    schema: &'a str,
    params: &'a ParamsJson,
    all_passed: bool,
    warnings: Vec<String>,
    checks: Vec<CheckJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear_complexity: Option<LinearComplexityReport>,
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let (params, build) = parse_params(&args.params)?;
    let none = !(args.defining || args.trace || args.lemmas || args.lincomp);
    let cfg = if args.all || none {
        SuiteConfig { build, ..SuiteConfig::all() }
    } else {
        SuiteConfig { lemmas: args.lemmas, defining: args.defining, trace: args.trace, lincomp: args.lincomp, build }
    };
    let mut warnings = Vec::new();
    let needs_field = cfg.lemmas || cfg.defining || cfg.trace || cfg.lincomp;
    let dd = if needs_field && !is_wieferich(params.p()) {
        Some(DefiningData::build(&params, build)?)
    } else {
        None
    };
    if is_wieferich(params.p()) {
        let msg = format!("p={} is a Wieferich prime: field checks skipped", params.p());
        eprintln!("warning: {msg}");
        warnings.push(msg);
    }
    let results = run_suite_with(&params, &cfg, dd.as_ref());
    let linear_complexity = match (&dd, cfg.lincomp) {
        (Some(dd), true) => Some(LinearComplexityReport::compute(dd)?),
        _ => None,
    };
    let pj = ParamsJson::of(&params);
    let all_passed = results.iter().all(|r| r.passed);
    let checks = results
        .iter()
        .map(|r| CheckJson {
            check: &r.check,
            params: &pj,
            status: r.status,
            passed: r.passed,
            counterexample: r.counterexample.as_deref(),
            elapsed_ms: args.timing.then(|| millis(r.elapsed)),
        })
        .collect();
    emit_json(
        &args.output,
        &VerifyJson { schema: VERIFY_SCHEMA, params: &pj, all_passed, warnings, checks, linear_complexity },
    )?;
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct Timing {
    build_ms: u64,
    lincomp_ms: u64,
}

#[derive(Serialize)]
struct ReportJson {
    schema: &'static str,
    params: ParamsJson,
    wieferich: bool,
    lambda: u64,
    t0: u32,
    g: u64,
    degree: Option<usize>,
    modulus: Option<String>,
    beta: Option<String>,
    eta_digest: Option<String>,
    linear_complexity: Option<LinearComplexityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

/// SHA-256 over the hex rows of the eta table, one row per line.
pub fn eta_digest(doc: &DefiningDocument) -> String {
    let mut hasher = Sha256::new();
    for row in &doc.eta {
        hasher.update(row.join(",").as_bytes());
        hasher.update(b"\n");
    }
    let hex: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn report(args: &ReportArgs) -> Result<(), Failure> {
    let (params, build) = parse_params(&args.params)?;
    let profile = two_order_profile(params.p(), 1)?;
    let root = find_normalized_root(&params)?;
    let mut report = ReportJson {
        schema: REPORT_SCHEMA,
        params: ParamsJson::of(&params),
        wieferich: is_wieferich(params.p()),
        lambda: profile.lambda,
        t0: profile.t0,
        g: root.g,
        degree: None,
        modulus: None,
        beta: None,
        eta_digest: None,
        linear_complexity: None,
        timing: None,
    };
    if report.wieferich {
        eprintln!("warning: p={} is a Wieferich prime: field data omitted", params.p());
    } else {
        let start = Instant::now();
        let dd = DefiningData::build(&params, build)?;
        let build_ms = millis(start.elapsed());
        let start = Instant::now();
        let lc = LinearComplexityReport::compute(&dd)?;
        let lincomp_ms = millis(start.elapsed());
        let doc = DefiningDocument::from_data(&dd);
        report.degree = Some(doc.degree);
        report.eta_digest = Some(eta_digest(&doc));
        report.modulus = Some(doc.modulus);
        report.beta = Some(doc.beta);
        report.linear_complexity = Some(lc);
        report.timing = args.timing.then_some(Timing { build_ms, lincomp_ms });
    }
    emit_json(&args.output, &report)
}
