//! Command-line surface. [`run`] writes everything to the given sink and
//! returns the process exit code, so the binary is a thin wrapper.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::extraction::{self, ExtractionError};
use crate::harness::{self, HarnessError, PipelineConfig};
use crate::kernel::{self, ast, ModelId};
use crate::logic::{self, check_derivation, AxiomId, CheckResult, Formula};
use crate::nat::Nat;
use crate::realizability::{CheckConfig, Checker, Evaluation, TraceStep, Verdict};
use crate::sample::{FormulaShape, Sampler};

pub const EXIT_OK: i32 = 0;
/// Refuted verdict, invalid proof, or a failed self-test.
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_CAPABILITY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "vreal", version, about = "Realizability workbench over two computability models")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Computability model: urec or total.
    #[arg(long, global = true, default_value = "urec")]
    pub model: ModelId,
    /// Step budget for each evaluation.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub fuel: u64,
    /// Largest candidate realizer tried for infinite antecedent sets.
    #[arg(long, global = true, default_value_t = 64)]
    pub bound: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether a number realizes a sentence under an evaluation.
    Check {
        /// The sentence, in ASCII syntax.
        #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
        formula: Option<String>,
        #[arg(long)]
        formula_file: Option<PathBuf>,
        /// Evaluation JSON file.
        #[arg(long)]
        evaluation: PathBuf,
        /// A decimal code or an s-expression program.
        #[arg(long)]
        realizer: String,
    },
    /// Compile a derivation into a realizer program.
    Extract {
        /// Derivation JSON file.
        derivation: PathBuf,
        /// Comma-separated argument variables; defaults to the conclusion's
        /// free variables in sorted order.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Validate a derivation without extracting.
    Prove {
        derivation: PathBuf,
    },
    /// Run the realizer pipeline for the separating sentence on one slice.
    DemoTheorem {
        #[arg(long, default_value_t = 32)]
        slice: u64,
        /// Number of sampled convergent applications compared against u.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Budget for building realizers and for each call of u.
        #[arg(long, default_value_t = 10_000_000)]
        pipeline_fuel: u64,
    },
    /// Refute a binary TOTAL program as an overuniversal function.
    Diagonalize {
        /// A decimal code or an s-expression program.
        candidate: String,
    },
    /// Run a quick built-in battery.
    Selftest,
}

/// Runs one command and returns its exit code.
pub fn run(cli: &Cli, out: &mut impl Write) -> i32 {
    let cfg = &cli.config;
    let result = match &cli.command {
        Command::Check { formula, formula_file, evaluation, realizer } => {
            cmd_check(cfg, formula.as_deref(), formula_file.as_deref(), evaluation, realizer)
        }
        Command::Extract { derivation, vars } => cmd_extract(cfg, derivation, vars.as_deref()),
        Command::Prove { derivation } => cmd_prove(cfg, derivation),
        Command::DemoTheorem { slice, samples, pipeline_fuel } => {
            let pc = PipelineConfig {
                slice: *slice,
                samples: *samples,
                seed: cfg.seed,
                direct_fuel: cfg.fuel,
                fuel: *pipeline_fuel,
            };
            cmd_demo(cfg, &pc)
        }
        Command::Diagonalize { candidate } => cmd_diagonalize(cfg, candidate),
        Command::Selftest => Ok(cmd_selftest(cfg)),
    };
    let (code, text) = match result {
        Ok(r) => r,
        Err(e) => (e.code, e.render(cfg.json)),
    };
    // a closed pipe is not worth a different exit code
    let _ = out.write_all(text.as_bytes());
    code
}

struct Failure {
    code: i32,
    stage: &'static str,
    message: String,
}

impl Failure {
    fn input(stage: &'static str, e: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, stage, message: e.to_string() }
    }

    fn render(&self, json: bool) -> String {
        if json {
            #[derive(Serialize)]
            struct Report<'a> {
                error: &'a str,
                stage: &'a str,
                exit_code: i32,
            }
            to_json(&Report { error: &self.message, stage: self.stage, exit_code: self.code })
        } else {
            format!("error ({}): {}\n", self.stage, self.message)
        }
    }
}

type Outcome = Result<(i32, String), Failure>;

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input("read", format!("{}: {e}", path.display())))
}

/// A decimal code, or a program in s-expression form.
pub fn parse_code(text: &str) -> Result<Nat, String> {
    let t = text.trim();
    if let Ok(n) = t.parse::<Nat>() {
        return Ok(n);
    }
    kernel::parse_program(t).map(|p| ast::encode(&p)).map_err(|e| e.to_string())
}

fn cmd_check(
    cfg: &RunConfig,
    formula: Option<&str>,
    formula_file: Option<&Path>,
    evaluation: &Path,
    realizer: &str,
) -> Outcome {
    let text = match (formula, formula_file) {
        (Some(f), _) => f.to_string(),
        (None, Some(p)) => read(p)?,
        (None, None) => return Err(Failure::input("arguments", "no formula given")),
    };
    let phi = logic::parse_formula(text.trim()).map_err(|e| Failure::input("formula", e))?;
    let ev = Evaluation::from_json(&read(evaluation)?).map_err(|e| Failure::input("evaluation", e))?;
    let e = parse_code(realizer).map_err(|e| Failure::input("realizer", e))?;
    let check = CheckConfig { fuel: cfg.fuel, candidate_bound: cfg.bound, model: cfg.model };
    let verdict = Checker::new(&ev, check).check(&e, &phi).map_err(|e| Failure::input("check", e))?;
    let code = match verdict {
        Verdict::Realizes => EXIT_OK,
        Verdict::Refuted { .. } => EXIT_FAIL,
        Verdict::Unknown { .. } => EXIT_UNKNOWN,
    };
    let text = if cfg.json {
        #[derive(Serialize)]
        struct Report<'a> {
            formula: String,
            realizer: &'a Nat,
            model: ModelId,
            fuel: u64,
            bound: u64,
            #[serde(flatten)]
            verdict: &'a Verdict,
        }
        to_json(&Report { formula: phi.to_string(), realizer: &e, model: cfg.model, fuel: cfg.fuel, bound: cfg.bound, verdict: &verdict })
    } else {
        render_verdict(&verdict)
    };
    Ok((code, text))
}

fn render_verdict(v: &Verdict) -> String {
    let mut s = String::new();
    match v {
        Verdict::Realizes => s.push_str("realizes\n"),
        Verdict::Unknown { reason } => {
            let _ = writeln!(s, "unknown: {reason:?}");
        }
        Verdict::Refuted { witness } => {
            s.push_str("refuted\n");
            for step in &witness.path {
                let line = match step {
                    TraceStep::Left => "left conjunct".to_string(),
                    TraceStep::Right => "right conjunct".to_string(),
                    TraceStep::Disjunct { tag } => format!("disjunct {tag}"),
                    TraceStep::Witness { value } => format!("witness {value}"),
                    TraceStep::Call { args, s, result } => format!("call {args:?} on {s} gave {result}"),
                    TraceStep::Pointwise { a, result } => format!("at {a} gave {result}"),
                };
                let _ = writeln!(s, "  {line}");
            }
            let _ = writeln!(s, "  cause: {:?}", witness.cause);
        }
    }
    s
}

fn load_derivation(path: &Path) -> Result<logic::Derivation, Failure> {
    logic::parse_derivation(&read(path)?).map_err(|e| Failure::input("derivation", e))
}

fn cmd_extract(cfg: &RunConfig, path: &Path, vars: Option<&[String]>) -> Outcome {
    let d = load_derivation(path)?;
    let zs: Vec<String> = match vars {
        Some(v) => v.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => d.conclusion().map(|c| c.free_vars().into_iter().collect()).unwrap_or_default(),
    };
    let r = extraction::extract(&d, &zs, cfg.model).map_err(|e| {
        let code = match e {
            ExtractionError::NeedsUniversal { .. } => EXIT_CAPABILITY,
            ExtractionError::MissingVariable(_) | ExtractionError::DuplicateVariable(_) => EXIT_INPUT,
            _ => EXIT_FAIL,
        };
        Failure { code, stage: "extraction", message: e.to_string() }
    })?;
    if cfg.json {
        let mut s = r.to_json();
        s.push('\n');
        return Ok((EXIT_OK, s));
    }
    let mut s = String::new();
    let _ = writeln!(s, "conclusion: {}", r.conclusion);
    let _ = writeln!(s, "model: {}", r.model);
    let _ = writeln!(s, "vars: [{}]", r.vars.join(", "));
    let _ = writeln!(s, "psi: {}", r.psi);
    for (i, step) in r.steps.iter().enumerate() {
        let _ = writeln!(s, "{i:>3}  {:<10} [{}]  {}", step.justification, step.vars.join(","), step.formula);
        let _ = writeln!(s, "     code {}", step.code);
    }
    Ok((EXIT_OK, s))
}

fn cmd_prove(cfg: &RunConfig, path: &Path) -> Outcome {
    let d = load_derivation(path)?;
    let result = check_derivation(&d);
    let code = if result.is_valid() { EXIT_OK } else { EXIT_FAIL };
    let conclusion = d.conclusion().map(Formula::to_string);
    let text = if cfg.json {
        #[derive(Serialize)]
        struct Report {
            valid: bool,
            steps: usize,
            conclusion: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            failed_step: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            reason: Option<String>,
        }
        let (failed_step, reason) = match &result {
            CheckResult::Valid => (None, None),
            CheckResult::Invalid { step, reason } => (Some(*step), Some(reason.clone())),
        };
        to_json(&Report { valid: result.is_valid(), steps: d.steps.len(), conclusion, failed_step, reason })
    } else {
        match &result {
            CheckResult::Valid => format!("valid: {} steps proving {}\n", d.steps.len(), conclusion.unwrap_or_default()),
            CheckResult::Invalid { step, reason } => format!("invalid at step {step}: {reason}\n"),
        }
    };
    Ok((code, text))
}

fn cmd_demo(cfg: &RunConfig, pc: &PipelineConfig) -> Outcome {
    let trace = harness::run_pipeline(cfg.model, pc).map_err(|e| match e {
        HarnessError::Extraction(ExtractionError::NeedsUniversal { .. }) => {
            Failure { code: EXIT_CAPABILITY, stage: "extraction", message: e.to_string() }
        }
        HarnessError::Extraction(_) => Failure { code: EXIT_FAIL, stage: "extraction", message: e.to_string() },
        HarnessError::NoValue { stage, .. } => Failure { code: EXIT_FAIL, stage, message: e.to_string() },
    })?;
    let code = if trace.all_agree() && !trace.left_verdict.is_refuted() { EXIT_OK } else { EXIT_FAIL };
    if cfg.json {
        return Ok((code, to_json(&trace)));
    }
    let mut s = String::new();
    let _ = writeln!(s, "formula: {}", trace.formula);
    let _ = writeln!(s, "derivation: {} steps, valid {}", trace.derivation_steps, trace.derivation_valid);
    let _ = writeln!(s, "closed realizer: {} bits", trace.realizer_bits);
    let _ = writeln!(s, "left realizer {} on slice {}: {}", trace.left_realizer, trace.slice, render_verdict(&trace.left_verdict).trim_end());
    let _ = writeln!(s, "e': {} bits, u: {} bits", trace.e_prime_bits, trace.u_bits);
    let _ = writeln!(s, "u agrees with direct evaluation on {}/{} samples", trace.agreed, trace.sampled);
    Ok((code, s))
}

fn cmd_diagonalize(cfg: &RunConfig, candidate: &str) -> Outcome {
    let c = parse_code(candidate).map_err(|e| Failure::input("candidate", e))?;
    let cert = harness::diagonalize(&c).map_err(|e| Failure { code: EXIT_FAIL, stage: "diagonalize", message: e.to_string() })?;
    if cfg.json {
        return Ok((EXIT_OK, to_json(&cert)));
    }
    let (x, y) = &cert.point;
    Ok((
        EXIT_OK,
        format!(
            "candidate {} at ({x}, {y}) = {}\nprogram {} at {x} = {}\nfuel {}\n",
            cert.candidate, cert.lhs, cert.diagonal_code, cert.rhs, cert.fuel
        ),
    ))
}

#[derive(Serialize)]
struct SelfCheck {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn cmd_selftest(cfg: &RunConfig) -> (i32, String) {
    let checks: Vec<(&'static str, fn(&RunConfig) -> Result<String, String>)> = vec![
        ("pairing", selftest_pairing),
        ("program codes", selftest_codes),
        ("derivation of the separating sentence", selftest_derivation),
        ("axiom extraction", selftest_axioms),
        ("diagonal refutation", selftest_diagonal),
        ("pipeline", selftest_pipeline),
    ];
    let results: Vec<SelfCheck> = checks
        .into_iter()
        .map(|(name, f)| match f(cfg) {
            Ok(detail) => SelfCheck { name, passed: true, detail },
            Err(detail) => SelfCheck { name, passed: false, detail },
        })
        .collect();
    let code = if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAIL };
    if cfg.json {
        return (code, to_json(&results));
    }
    let mut s = String::new();
    for r in &results {
        let _ = writeln!(s, "[{}] {}: {}", if r.passed { "ok" } else { "FAIL" }, r.name, r.detail);
    }
    (code, s)
}

fn selftest_pairing(_: &RunConfig) -> Result<String, String> {
    for n in 0..10_000u64 {
        let (a, b) = crate::nat::unpair(&Nat::from(n));
        if crate::nat::pair(&a, &b) != n {
            return Err(format!("pair(unpair({n})) != {n}"));
        }
    }
    Ok("round trip below 10000".into())
}

fn selftest_codes(cfg: &RunConfig) -> Result<String, String> {
    let mut s = Sampler::new(cfg.seed);
    for _ in 0..200 {
        let p = s.program(2, 4, cfg.model);
        let c = ast::encode(&p);
        if ast::decode(&c, cfg.model) != p {
            return Err(format!("decode(encode({p})) differs"));
        }
    }
    Ok("200 programs round trip".into())
}

fn selftest_derivation(cfg: &RunConfig) -> Result<String, String> {
    let d = harness::derivation5();
    if let CheckResult::Invalid { step, reason } = check_derivation(&d) {
        return Err(format!("step {step}: {reason}"));
    }
    match extraction::closed_realizer(&d, cfg.model, 10_000_000) {
        Ok(e) => Ok(format!("{} steps, realizer of {} bits", d.steps.len(), e.bits())),
        Err(ExtractionError::NeedsUniversal { step, .. }) if cfg.model == ModelId::Total => {
            Ok(format!("{} steps, extraction stops at step {step} as expected", d.steps.len()))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn selftest_axioms(cfg: &RunConfig) -> Result<String, String> {
    let mut s = Sampler::new(cfg.seed);
    let vars = vec!["x".to_string()];
    let shape = FormulaShape { depth: 1, implications: true, quantifiers: true };
    let check = CheckConfig { fuel: cfg.fuel, candidate_bound: cfg.bound, model: cfg.model };
    let (mut checked, mut skipped) = (0, 0);
    for id in AxiomId::ALL {
        for _ in 0..3 {
            let domain = s.domain(3);
            let inst = s.axiom_instance(id, &vars, &domain, shape);
            let phi = inst.formula().map_err(|e| e.to_string())?;
            let zs = extraction::axiom_context(&inst, &phi);
            let psi = match extraction::axiom_realizer(&inst, &zs, cfg.model) {
                Ok(p) => p,
                Err(ExtractionError::NeedsUniversal { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e.to_string()),
            };
            let ev = s.evaluation(&domain, 32);
            let mut checker = Checker::new(&ev, check);
            let v = extraction::verify_with(&mut checker, &psi, &phi, &zs).map_err(|e| e.to_string())?;
            if v.is_refuted() {
                return Err(format!("{id} instance {phi} refuted"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} instances non-refuted, {skipped} need u"))
}

fn selftest_diagonal(_: &RunConfig) -> Result<String, String> {
    for p in [ast::lit(0u64), ast::proj(1), ast::succ(ast::proj(2))] {
        let cert = harness::diagonalize(&ast::encode(&p)).map_err(|e| e.to_string())?;
        if !harness::replay(&cert) {
            return Err(format!("certificate for {p} does not replay"));
        }
    }
    Ok("3 candidates refuted".into())
}

fn selftest_pipeline(cfg: &RunConfig) -> Result<String, String> {
    let pc = PipelineConfig { slice: 8, samples: 10, seed: cfg.seed, ..PipelineConfig::default() };
    match harness::run_pipeline(cfg.model, &pc) {
        Ok(t) if t.all_agree() => Ok(format!("slice 8, u agrees on {}/{}", t.agreed, t.sampled)),
        Ok(t) => Err(format!("u agrees on only {}/{}", t.agreed, t.sampled)),
        Err(HarnessError::Extraction(ExtractionError::NeedsUniversal { .. })) if cfg.model == ModelId::Total => {
            Ok("stops at extraction as expected".into())
        }
        Err(e) => Err(e.to_string()),
    }
}
