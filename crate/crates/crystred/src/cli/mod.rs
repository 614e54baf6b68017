//! Command-line front end: argument types, dispatch, and the JSON envelope
//! shared by every subcommand.

mod document;

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::binom::{identity_grid, val_int};
use crate::hecke::HeckeOp;
use crate::lemma_verify::{
    lemma62_bounded_search, lemma62_control, telescoping_claim, verify_section_prop, verify_telescoping, BlockId,
    Instance, PropId, MAX_SEARCH_RADIUS,
};
use crate::padic::{parse_scalar, ExtScalar, Prime};
use crate::report::{Status, VerificationReport};
use crate::symmod::q_structure_report;
use crate::zigzag::{check_llc_consistency, classify, llc_forward, Scope, Slope};

pub use document::{FunctionDocument, VertexEntry};

/// Version of the JSON envelope.
pub const SCHEMA: u32 = 1;
/// Environment variable holding the default precision K.
pub const PREC_ENV: &str = "CRYSTRED_PREC";
pub const DEFAULT_PREC: u32 = 40;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Engine(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

fn engine(e: impl std::fmt::Display) -> CliError {
    CliError::Engine(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "crystred",
    version,
    about = "Exact verification of slope-3/2 reductions of crystalline representations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Worker threads for parallel work; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub r: u64,
    /// a_p in the syntax pi^e*(d0 + d1*pi + ...), with p an alias for pi^2.
    #[arg(long)]
    pub ap: String,
}

#[derive(Debug, Args)]
pub struct PrecArgs {
    /// Relative precision K in pi-digits. Raised to 2(t+5) if lower.
    #[arg(long, env = PREC_ENV, default_value_t = DEFAULT_PREC)]
    pub prec: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariants, branch and mod-p local Langlands image of the reduction.
    Classify {
        #[command(flatten)]
        weight: WeightArgs,
        /// 1/2, 1 or 3/2.
        #[arg(long, default_value = "3/2")]
        slope: String,
    },
    /// Binomial congruence grid over exceptional weights.
    CheckIdentities {
        #[arg(long = "p", value_delimiter = ',', default_values_t = [5u64, 7, 11])]
        primes: Vec<u64>,
        #[arg(long = "n", value_delimiter = ',', default_values_t = [1u64, 2])]
        ns: Vec<u64>,
        #[arg(long = "t", value_delimiter = ',', default_values_t = [0u32, 1])]
        ts: Vec<u32>,
    },
    /// Telescoping identity for a block (chi, chi_prime(l), phi, xi, xi_prime,
    /// xi_dblprime, psi(m), psi_prime(m)), or `bounded-search`.
    VerifyLemma {
        id: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        ap: Option<String>,
        #[command(flatten)]
        prec: PrecArgs,
        /// Support radius for `bounded-search`.
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Image of F_1, F_2 or F_3 in ind J_i (F1, F2_le_t, F2_gt, F3_le_t, F3_lt_t1, F3_ge_t1).
    VerifyProp {
        id: String,
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        prec: PrecArgs,
    },
    /// Apply a Hecke operator to a function document read from a file or stdin.
    HeckeApply {
        /// Path to the document, or - for stdin.
        #[arg(long, default_value = "-")]
        input: String,
        /// T, T+ or T-; overrides the document's op.
        #[arg(long)]
        op: Option<String>,
    },
    /// Structure of the quotient Q of Sym^r.
    QStructure {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: usize,
    },
}

/// Result of one command, before serialization.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub pass: bool,
    pub warnings: Vec<String>,
    pub result: Value,
}

impl Outcome {
    fn new(command: &'static str, pass: bool, result: impl Serialize) -> Result<Self, CliError> {
        Ok(Outcome {
            command,
            pass,
            warnings: Vec::new(),
            result: serde_json::to_value(result)?,
        })
    }

    pub fn envelope(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "pass": self.pass,
            "warnings": self.warnings,
            "result": self.result,
        })
    }

    pub fn exit_code(&self) -> u8 {
        if self.pass {
            0
        } else {
            1
        }
    }

    /// Pretty JSON, also written to `path` when given.
    pub fn emit(&self, path: Option<&Path>) -> Result<String, CliError> {
        let text = serde_json::to_string_pretty(&self.envelope())? + "\n";
        if let Some(path) = path {
            std::fs::write(path, &text)?;
        }
        Ok(text)
    }
}

fn prime(p: u64) -> Result<Prime, CliError> {
    Prime::new(p).map_err(|e| CliError::Usage(e.to_string()))
}

fn scalar(p: u64, text: &str) -> Result<ExtScalar, CliError> {
    parse_scalar(prime(p)?, text).map_err(|e| CliError::Usage(format!("--ap {text:?}: {e}")))
}

/// K clamped to what the field type holds and raised to 2(t+5).
pub fn resolve_prec(p: u64, r: u64, requested: u32, warnings: &mut Vec<String>) -> Result<u32, CliError> {
    let max = prime(p)?.max_prec();
    let t = if r > 3 {
        val_int(p, &BigInt::from(r - 3)).unwrap_or(0) as u32
    } else {
        0
    };
    let need = Instance::min_prec(t);
    let mut k = requested;
    if k > max {
        warnings.push(format!(
            "K = {k} exceeds the supported {max} pi-digits for p = {p}; using {max}"
        ));
        k = max;
    }
    if k < need {
        if need > max {
            return Err(CliError::Engine(format!(
                "t = {t} needs K >= {need} but p = {p} supports at most {max}"
            )));
        }
        warnings.push(format!("K = {k} is below 2(t+5) = {need}; raised to {need}"));
        k = need;
    }
    Ok(k)
}

fn instance(p: u64, r: u64, ap: &str, prec: u32, warnings: &mut Vec<String>) -> Result<Instance, CliError> {
    let a_p = scalar(p, ap)?;
    let k = resolve_prec(p, r, prec, warnings)?;
    Instance::new(p, r, &a_p, k).map_err(engine)
}

fn passed(report: &VerificationReport) -> bool {
    report.status != Status::Fail
}

fn run_classify(weight: &WeightArgs, slope: &str) -> Result<Outcome, CliError> {
    let slope =
        Slope::parse(slope).ok_or_else(|| CliError::Usage(format!("slope must be 1/2, 1 or 3/2, got {slope:?}")))?;
    let a_p = scalar(weight.p, &weight.ap)?;
    let cl = classify(weight.p, weight.r, &a_p, slope).map_err(engine)?;
    let (consistency, image) = if slope == Slope::ThreeHalves && cl.scope == Scope::Verified {
        let (report, image) = check_llc_consistency(&cl).map_err(engine)?;
        (Some(report), image)
    } else {
        (None, llc_forward(weight.p, &cl.descriptor).map_err(engine)?)
    };
    let pass = consistency.as_ref().is_none_or(passed);
    Outcome::new(
        "classify",
        pass,
        json!({
            "invariants": cl.invariants,
            "branch": cl.branch,
            "branch_index": cl.branch_index,
            "scope": cl.scope,
            "descriptor": cl.descriptor,
            "constants": cl.constants,
            "llc_image": image,
            "consistency": consistency,
        }),
    )
}

fn run_identities(primes: &[u64], ns: &[u64], ts: &[u32]) -> Result<Outcome, CliError> {
    if primes.is_empty() || ns.is_empty() || ts.is_empty() {
        return Err(CliError::Usage("grid lists must be non-empty".into()));
    }
    for &p in primes {
        prime(p)?;
    }
    let records = identity_grid(primes, ns, ts, &[]);
    let failed = records.iter().filter(|r| !r.pass).count();
    let pass = failed == 0 && !records.is_empty();
    Outcome::new(
        "check-identities",
        pass,
        json!({ "checked": records.len(), "failed": failed, "records": records }),
    )
}

fn run_bounded_search(p: u64, radius: usize) -> Result<Outcome, CliError> {
    if radius > MAX_SEARCH_RADIUS {
        return Err(CliError::Usage(format!(
            "--radius {radius} exceeds {MAX_SEARCH_RADIUS}"
        )));
    }
    prime(p)?;
    let search = lemma62_bounded_search(p, radius).map_err(engine)?;
    let control = lemma62_control(p, radius).map_err(engine)?;
    let pass = search.passed() && control.passed();
    Outcome::new(
        "verify-lemma",
        pass,
        json!({ "id": "bounded-search", "p": p, "radius": radius, "report": search, "control": control }),
    )
}

fn run_lemma(id: &str, p: u64, r: Option<u64>, ap: Option<&str>, prec: u32) -> Result<Outcome, CliError> {
    let block: BlockId = id.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
    let (Some(r), Some(ap)) = (r, ap) else {
        return Err(CliError::Usage(format!("{block} needs --r and --ap")));
    };
    let mut warnings = Vec::new();
    let inst = instance(p, r, ap, prec, &mut warnings)?;
    let claim = telescoping_claim(block, &inst).map_err(engine)?;
    let report = verify_telescoping(block, &inst).map_err(engine)?;
    let mut out = Outcome::new(
        "verify-lemma",
        passed(&report),
        json!({ "id": block.to_string(), "instance": inst, "claim": claim, "report": report }),
    )?;
    out.warnings = warnings;
    Ok(out)
}

fn run_prop(id: &str, weight: &WeightArgs, prec: u32) -> Result<Outcome, CliError> {
    let prop: PropId = id.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
    let mut warnings = Vec::new();
    let inst = instance(weight.p, weight.r, &weight.ap, prec, &mut warnings)?;
    let report = verify_section_prop(prop, &inst).map_err(engine)?;
    let mut out = Outcome::new(
        "verify-prop",
        passed(&report),
        json!({ "id": prop.to_string(), "instance": inst, "report": report }),
    )?;
    out.warnings = warnings;
    Ok(out)
}

fn read_input(input: &str) -> Result<String, CliError> {
    if input == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(input)?)
    }
}

pub fn hecke_apply(doc: &FunctionDocument, op: Option<&str>) -> Result<FunctionDocument, CliError> {
    let op_name = op
        .map(str::to_string)
        .or_else(|| doc.op.clone())
        .unwrap_or_else(|| "T".into());
    let op = HeckeOp::parse(&op_name).ok_or_else(|| CliError::Usage(format!("unknown operator {op_name:?}")))?;
    let image = doc.to_function()?.hecke(op).map_err(engine)?;
    Ok(FunctionDocument::from_function(&image, Some(op_name)))
}

fn run_hecke_apply(input: &str, op: Option<&str>) -> Result<Outcome, CliError> {
    let doc: FunctionDocument =
        serde_json::from_str(&read_input(input)?).map_err(|e| CliError::Usage(format!("function document: {e}")))?;
    Outcome::new("hecke-apply", true, hecke_apply(&doc, op)?)
}

fn run_q_structure(p: u64, r: usize) -> Result<Outcome, CliError> {
    prime(p)?;
    let report = q_structure_report(p, r).map_err(engine)?;
    Outcome::new("q-structure", report.pass, &report)
}

/// Execute one parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Classify { weight, slope } => run_classify(weight, slope),
        Command::CheckIdentities { primes, ns, ts } => run_identities(primes, ns, ts),
        Command::VerifyLemma {
            id,
            p,
            r,
            ap,
            prec,
            radius,
        } => {
            if id == "bounded-search" {
                run_bounded_search(*p, *radius)
            } else {
                run_lemma(id, *p, *r, ap.as_deref(), prec.prec)
            }
        }
        Command::VerifyProp { id, weight, prec } => run_prop(id, weight, prec.prec),
        Command::HeckeApply { input, op } => run_hecke_apply(input, op.as_deref()),
        Command::QStructure { p, r } => run_q_structure(*p, *r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Outcome, CliError> {
        run(&Cli::try_parse_from(std::iter::once("crystred").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn precision_is_raised_and_clamped() {
        let mut w = Vec::new();
        assert_eq!(resolve_prec(5, 23, 12, &mut w).unwrap(), 12);
        assert!(w.is_empty());
        assert_eq!(resolve_prec(5, 23, 5, &mut w).unwrap(), 12);
        assert_eq!(resolve_prec(5, 23, 500, &mut w).unwrap(), 52);
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn classify_worked_instance() {
        let out = run_args(&[
            "classify", "--p", "5", "--r", "23", "--ap", "pi^3*(1)", "--slope", "3/2",
        ])
        .unwrap();
        assert!(out.pass);
        assert_eq!(out.result["branch"], "tau>=t+1");
        assert_eq!(out.result["branch_index"], 4);
    }

    #[test]
    fn lemma_and_prop_commands() {
        let out = run_args(&[
            "verify-lemma",
            "chi",
            "--p",
            "5",
            "--r",
            "23",
            "--ap",
            "pi^3*(1)",
            "--prec",
            "40",
        ])
        .unwrap();
        assert!(out.pass, "{:?}", out.result);
        let out = run_args(&["verify-prop", "F3_ge_t1", "--p", "5", "--r", "23", "--ap", "pi^3*(1)"]).unwrap();
        assert!(out.pass, "{:?}", out.result);
        assert!(matches!(
            run_args(&["verify-lemma", "chi", "--p", "5"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            run_args(&["verify-lemma", "nope", "--p", "5"]),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn output_is_deterministic() {
        let args = ["classify", "--p", "7", "--r", "45", "--ap", "pi^3*(1 + pi)"];
        let a = run_args(&args).unwrap().emit(None).unwrap();
        let b = run_args(&args).unwrap().emit(None).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }

    #[test]
    fn hecke_apply_matches_library() {
        let doc: FunctionDocument = serde_json::from_str(
            r#"{"p":5,"r":4,"vertices":[{"side":0,"depth":0,"digits":[],"poly":["1","0","0","0","1"]}]}"#,
        )
        .unwrap();
        let image = hecke_apply(&doc, None).unwrap();
        let direct = doc.to_function().unwrap().hecke(HeckeOp::T).unwrap();
        assert!(image.to_function().unwrap() == direct);
        assert_eq!(image.op.as_deref(), Some("T"));
    }
}
