//! Compiling Hilbert derivations into realizer programs.
//!
//! Every step `Φ` with context `z₁..z_m` gets an `m`-ary program `ψ` such
//! that `ψ(d̄)` realizes `Φ(d̄)` for every evaluation and every `d̄` in its
//! domain. An axiom step's context is its sorted free variables (plus the
//! term's variable for A11/A12); a rule step also keeps the variables its
//! premises depend on. Consumers re-index with [`adapt`].

pub mod lemma;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::kernel::ast::{self, Prog};
use crate::kernel::{code, quote_comp, quote_if0, EvalOutcome, Interpreter};
use crate::kernel::{KernelError, ModelId};
use crate::logic::{
    check_derivation, substitute, AxiomId, AxiomInstance, CheckResult, Derivation, Formula,
    Justification, Term,
};
use crate::nat::Nat;
use crate::realizability::{
    tuples, Cause, CheckConfig, CheckError, Checker, Evaluation, UnknownReason, Verdict, Witness,
};

pub use lemma::{g_index, g_program, h_index, h_needs_universal, h_program, shape, Shape};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractionError {
    #[error("invalid derivation at step {step}: {reason}")]
    Invalid { step: usize, reason: String },
    #[error("step {step} ({what}) needs the overuniversal function, which {model} lacks")]
    NeedsUniversal { step: usize, what: String, model: ModelId },
    #[error("free variable {0} of the conclusion is not in the variable list")]
    MissingVariable(String),
    #[error("variable {0} is listed twice")]
    DuplicateVariable(String),
    #[error("the conclusion is not a sentence")]
    NotASentence,
    #[error("the closed realizer program did not converge: {0:?}")]
    NoValue(EvalOutcome),
}

/// One row of the per-step table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRealizer {
    pub formula: String,
    pub justification: String,
    /// The step's context, i.e. the argument order of `code`.
    pub vars: Vec<String>,
    /// Decimal code of the step's program.
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub model: ModelId,
    pub conclusion: String,
    pub vars: Vec<String>,
    pub arity: usize,
    /// Decimal code of the `arity`-ary realizer program.
    pub psi: String,
    pub steps: Vec<StepRealizer>,
}

impl ExtractionResult {
    pub fn psi_code(&self) -> Nat {
        self.psi.parse().expect("decimal code")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Re-indexes a program over `from` to run over `to`. Variables missing from
/// `to` are filled with its first variable, or 0 when `to` is empty.
pub fn adapt(psi: &Prog, from: &[String], to: &[String]) -> Prog {
    if from == to {
        return psi.clone();
    }
    let pad = if to.is_empty() { ast::lit(0u64) } else { ast::proj(1) };
    let args = from
        .iter()
        .map(|v| match to.iter().position(|w| w == v) {
            Some(i) => ast::proj(i as u64 + 1),
            None => pad.clone(),
        })
        .collect();
    ast::comp(psi.clone(), args)
}

fn constant(p: &Prog) -> Prog {
    ast::lit(ast::encode(p))
}

fn needs_universal(step: usize, what: &str, model: ModelId) -> ExtractionError {
    ExtractionError::NeedsUniversal { step, what: what.to_string(), model }
}

fn kernel_err(step: usize, what: &str, e: KernelError) -> ExtractionError {
    match e {
        KernelError::NeedsUniversal(_) => needs_universal(step, what, ModelId::Total),
        other => ExtractionError::Invalid { step, reason: other.to_string() },
    }
}

/// Context of an axiom step: free variables plus the substituted term's.
pub fn axiom_context(inst: &AxiomInstance, phi: &Formula) -> Vec<String> {
    let mut vars = phi.free_vars();
    if let (AxiomId::A11 | AxiomId::A12, Some(Term::Var(x))) = (inst.id, &inst.term) {
        vars.insert(x.clone());
    }
    vars.into_iter().collect()
}

/// The realizer program of an axiom instance over its context
/// ([`axiom_context`]).
pub fn axiom_program(inst: &AxiomInstance, model: ModelId) -> Result<Prog, ExtractionError> {
    axiom_program_at(inst, model, 0)
}

fn axiom_program_at(inst: &AxiomInstance, model: ModelId, step: usize) -> Result<Prog, ExtractionError> {
    use ast::*;
    use AxiomId::*;
    let phi = inst.formula().map_err(|reason| ExtractionError::Invalid { step, reason })?;
    let ctx = axiom_context(inst, &phi);
    let urec_only = |what: &str| {
        if model == ModelId::Total {
            Err(needs_universal(step, what, model))
        } else {
            Ok(())
        }
    };
    Ok(match inst.id {
        A1 => lit(0u64),
        // a ↦ code of (y ↦ a)
        A2 => constant(&const_code(proj(1))),
        A3 => {
            urec_only("A3")?;
            // T(x, q, p) = u(φ_p(x), φ_q(x))
            let t = apply(apply(proj(3), proj(1)), apply(proj(2), proj(1)));
            // S(q, p) = code of x ↦ T(x, q, p)
            let s = smn_code(1, smn_code(2, constant(&t), proj(2)), proj(1));
            constant(&smn_code(1, constant(&s), proj(1)))
        }
        A4 => {
            // a ↦ code of (b ↦ c(a, b))
            let b4 = pair(proj(2), proj(1));
            constant(&smn_code(1, constant(&b4), proj(1)))
        }
        A5 => constant(&fst(proj(1))),
        A6 => constant(&snd(proj(1))),
        A7 => {
            // B(q, p) = code of d ↦ φ_p(p₂d) if p₁d = 0 else φ_q(p₂d)
            let arg = || vec![lit(code::snd(&code::proj(1)))];
            let body = quote_if0(
                lit(code::fst(&code::proj(1))),
                quote_comp(proj(2), arg()),
                quote_comp(proj(1), arg()),
            );
            constant(&smn_code(1, constant(&body), proj(1)))
        }
        A8 => constant(&pair(lit(0u64), proj(1))),
        A9 => constant(&pair(lit(1u64), proj(1))),
        A10 => constant(&proj(1)),
        A11 | A12 => {
            let a = inst.a.as_ref().expect("checked by formula()");
            let t = match inst.term.as_ref().expect("checked by formula()") {
                Term::Const(c) => lit(*c),
                Term::Var(x) => proj(ctx.iter().position(|v| v == x).expect("in context") as u64 + 1),
            };
            let b = if inst.id == A11 {
                urec_only("A11")?;
                // B(p, t) = φ_{g(p)}(t)
                apply(comp(g_program(a), vec![proj(1)]), proj(2))
            } else {
                // B(x, t) = c(t, x)
                pair(proj(2), proj(1))
            };
            smn_code(1, constant(&b), t)
        }
        A13 => {
            let a = inst.a.as_ref().expect("checked by formula()");
            let h = h_program(a, model).map_err(|e| kernel_err(step, "A13", e))?;
            // S(w, p) = h(code of y ↦ φ_p(y, w))
            let s = comp(h, vec![smn_code(1, proj(2), proj(1))]);
            constant(&smn_code(1, constant(&s), proj(1)))
        }
        A14 => {
            // p ↦ code of x ↦ φ_p(p₁x, p₂x)
            let args = vec![lit(code::fst(&code::proj(1))), lit(code::snd(&code::proj(1)))];
            constant(&quote_comp(proj(1), args))
        }
    })
}

/// `ψ` for an axiom instance over `zs`, which must cover its free variables.
pub fn axiom_realizer(inst: &AxiomInstance, zs: &[String], model: ModelId) -> Result<Nat, ExtractionError> {
    let phi = inst.formula().map_err(|reason| ExtractionError::Invalid { step: 0, reason })?;
    check_vars(&phi, zs)?;
    let p = axiom_program(inst, model)?;
    Ok(ast::encode(&adapt(&p, &axiom_context(inst, &phi), zs)))
}

fn check_vars(phi: &Formula, zs: &[String]) -> Result<(), ExtractionError> {
    let mut seen = BTreeSet::new();
    for z in zs {
        if !seen.insert(z) {
            return Err(ExtractionError::DuplicateVariable(z.clone()));
        }
    }
    match phi.free_vars().into_iter().find(|x| !zs.contains(x)) {
        Some(x) => Err(ExtractionError::MissingVariable(x)),
        None => Ok(()),
    }
}

/// The variables each step's realizer takes, in order. A rule's context
/// keeps the variables its premises depend on, so nothing is fixed to a
/// constant before the final re-indexing.
fn step_contexts(d: &Derivation) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::with_capacity(d.steps.len());
    for step in &d.steps {
        let mut ctx = step.formula.free_vars();
        match &step.by {
            Justification::Axiom(inst) => ctx = axiom_context(inst, &step.formula).into_iter().collect(),
            Justification::Mp(a, b) => {
                ctx.extend(out[*a].iter().cloned());
                ctx.extend(out[*b].iter().cloned());
            }
            Justification::Gen(a, y) => {
                ctx.extend(out[*a].iter().filter(|v| *v != y).cloned());
            }
        }
        out.push(ctx.into_iter().collect());
    }
    out
}

/// Every variable some step's realizer depends on, sorted. Extracting over
/// a list that covers these never pads with a constant.
pub fn derivation_vars(d: &Derivation) -> Vec<String> {
    step_contexts(d).into_iter().flatten().collect::<BTreeSet<_>>().into_iter().collect()
}

fn justification_text(j: &Justification) -> String {
    match j {
        Justification::Axiom(inst) => inst.id.to_string(),
        Justification::Mp(a, b) => format!("mp {a} {b}"),
        Justification::Gen(a, x) => format!("gen {a} {x}"),
    }
}

/// Compiles a valid derivation into a realizer of its conclusion over `zs`.
pub fn extract(d: &Derivation, zs: &[String], model: ModelId) -> Result<ExtractionResult, ExtractionError> {
    if let CheckResult::Invalid { step, reason } = check_derivation(d) {
        return Err(ExtractionError::Invalid { step, reason });
    }
    let conclusion = d.conclusion().expect("valid derivations are nonempty");
    check_vars(conclusion, zs)?;

    let contexts = step_contexts(d);
    let mut progs: Vec<(Prog, Vec<String>)> = Vec::with_capacity(d.steps.len());
    for (i, step) in d.steps.iter().enumerate() {
        let ctx = contexts[i].clone();
        let entry = match &step.by {
            Justification::Axiom(inst) => {
                (axiom_program_at(inst, model, i)?, ctx)
            }
            Justification::Mp(a, b) => {
                if model == ModelId::Total {
                    return Err(needs_universal(i, "modus ponens", model));
                }
                let (pa, va) = &progs[*a];
                let (pb, vb) = &progs[*b];
                (ast::apply(adapt(pb, vb, &ctx), adapt(pa, va, &ctx)), ctx)
            }
            Justification::Gen(a, y) => {
                let body = &d.steps[*a].formula;
                let h = h_program(body, model).map_err(|e| kernel_err(i, "generalization", e))?;
                let (pa, va) = &progs[*a];
                let mut inner = vec![y.clone()];
                inner.extend(ctx.iter().cloned());
                let q = adapt(pa, va, &inner);
                // s(d̄) = code of y ↦ q(y, d̄)
                let mut args = vec![ast::lit(code::proj(1))];
                args.extend((1..=ctx.len() as u64).map(|i| ast::const_code(ast::proj(i))));
                let s = quote_comp(constant(&q), args);
                (ast::comp(h, vec![s]), ctx)
            }
        };
        progs.push(entry);
    }

    let steps = d
        .steps
        .iter()
        .zip(&progs)
        .map(|(s, (p, vars))| StepRealizer {
            formula: s.formula.to_string(),
            justification: justification_text(&s.by),
            vars: vars.clone(),
            code: ast::encode(p).to_string(),
        })
        .collect();
    let (last, last_vars) = progs.last().expect("nonempty");
    Ok(ExtractionResult {
        model,
        conclusion: conclusion.to_string(),
        vars: zs.to_vec(),
        arity: zs.len(),
        psi: ast::encode(&adapt(last, last_vars, zs)).to_string(),
        steps,
    })
}

/// The realizer of a derivable sentence: its 0-ary program evaluated.
pub fn closed_realizer(d: &Derivation, model: ModelId, fuel: u64) -> Result<Nat, ExtractionError> {
    if d.conclusion().is_some_and(|c| !c.is_sentence()) {
        return Err(ExtractionError::NotASentence);
    }
    let r = extract(d, &[], model)?;
    match Interpreter::new(model).eval(&r.psi_code(), &[], fuel) {
        EvalOutcome::Converged(v) => Ok(v),
        other => Err(ExtractionError::NoValue(other)),
    }
}

/// Checks `ψ(d̄) r_f Φ(d̄)` for every `d̄` over the domain. A diverging `ψ`
/// refutes; running out of fuel is Unknown.
pub fn verify_realizer(
    psi: &Nat,
    phi: &Formula,
    zs: &[String],
    f: &Evaluation,
    cfg: CheckConfig,
) -> Result<Verdict, CheckError> {
    let mut checker = Checker::new(f, cfg);
    verify_with(&mut checker, psi, phi, zs)
}

pub fn verify_with(
    checker: &mut Checker<'_>,
    psi: &Nat,
    phi: &Formula,
    zs: &[String],
) -> Result<Verdict, CheckError> {
    let domain: Vec<u64> = checker.evaluation().domain.iter().copied().collect();
    let fuel = checker.config().fuel;
    let mut acc = Verdict::Realizes;
    for ds in tuples(&domain, zs.len()) {
        let args: Vec<Nat> = ds.iter().map(|&d| Nat::from(d)).collect();
        let v = match checker.interpreter().eval(psi, &args, fuel) {
            EvalOutcome::Converged(e) => {
                let pairs: Vec<(Term, String)> =
                    ds.iter().zip(zs).map(|(&d, z)| (Term::Const(d), z.clone())).collect();
                checker.check(&e, &substitute(phi, &pairs))?
            }
            EvalOutcome::OutOfFuel => Verdict::Unknown { reason: UnknownReason::OutOfFuel },
            EvalOutcome::Diverged => Verdict::Refuted {
                witness: Witness { path: Vec::new(), cause: Cause::Diverged { args: ds, s: None } },
            },
        };
        acc = acc.combine(v);
        if acc.is_refuted() {
            break;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::eval;
    use crate::logic::{parse_formula, DerivationBuilder};
    use crate::realizability::RealizerSet;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn vars(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    fn fin(xs: &[u64]) -> RealizerSet {
        RealizerSet::Finite(xs.iter().map(|&x| Nat::from(x)).collect())
    }

    fn check_axiom(inst: AxiomInstance, ev: &Evaluation) -> Verdict {
        let phi = inst.formula().unwrap();
        let zs: Vec<String> = axiom_context(&inst, &phi);
        let psi = axiom_realizer(&inst, &zs, ModelId::Urec).unwrap();
        verify_realizer(&psi, &phi, &zs, ev, CheckConfig::default()).unwrap()
    }

    #[test]
    fn a1_is_zero() {
        let psi = axiom_realizer(&AxiomInstance::new(AxiomId::A1), &vars(&["x"]), ModelId::Urec).unwrap();
        assert_eq!(eval(ModelId::Urec, &psi, &[5u64.into()], 100), EvalOutcome::Converged(Nat::ZERO));
    }

    #[test]
    fn a5_behaves_as_first_projection() {
        let inst = AxiomInstance::new(AxiomId::A5).a(f("P")).b(f("Q"));
        let psi = axiom_realizer(&inst, &[], ModelId::Urec).unwrap();
        let EvalOutcome::Converged(e) = eval(ModelId::Urec, &psi, &[], 100) else { panic!() };
        for (a, b) in [(0u64, 0u64), (3, 9), (17, 2)] {
            let v = eval(ModelId::Urec, &e, &[crate::nat::pair_u64(a, b)], 100);
            assert_eq!(v, EvalOutcome::Converged(a.into()));
        }
    }

    #[test]
    fn a2_small_instance_realizes() {
        let mut ev = Evaluation::new([1]);
        ev.set("P", vec![1], fin(&[4])).set("Q", vec![1], fin(&[9]));
        let inst = AxiomInstance::new(AxiomId::A2).a(f("P(1)")).b(f("Q(1)"));
        assert!(check_axiom(inst, &ev).is_realizes());
    }

    fn small_evaluation() -> Evaluation {
        let mut ev = Evaluation::new([1, 2]);
        ev.set("P", vec![1], fin(&[4]))
            .set("P", vec![2], fin(&[5, 6]))
            .set("Q", vec![1], fin(&[9]))
            .set("Q", vec![2], fin(&[2]))
            .set("R", vec![1], fin(&[0, 1]))
            .set("R", vec![2], fin(&[3]));
        ev
    }

    #[test]
    fn every_schema_on_a_small_evaluation() {
        use AxiomId::*;
        let ev = small_evaluation();
        let (a, b, c) = (f("P(x)"), f("Q(x)"), f("R(z)"));
        let insts = vec![
            AxiomInstance::new(A1),
            AxiomInstance::new(A2).a(a.clone()).b(b.clone()),
            AxiomInstance::new(A3).a(a.clone()).b(b.clone()).c(c.clone()),
            AxiomInstance::new(A4).a(a.clone()).b(c.clone()),
            AxiomInstance::new(A5).a(a.clone()).b(b.clone()),
            AxiomInstance::new(A6).a(a.clone()).b(b.clone()),
            AxiomInstance::new(A7).a(a.clone()).b(b.clone()).c(c.clone()),
            AxiomInstance::new(A8).a(a.clone()).b(b.clone()),
            AxiomInstance::new(A9).a(a.clone()).b(b.clone()),
            AxiomInstance::new(A10).a(a.clone()),
            AxiomInstance::new(A11).a(f("P(y) /\\ Q(x)")).var("y").term(Term::var("z")),
            AxiomInstance::new(A11).a(f("P(y) -> Q(y)")).var("y").term(Term::Const(2)),
            AxiomInstance::new(A12).a(f("P(y) /\\ R(y)")).var("y").term(Term::var("x")),
            AxiomInstance::new(A13).a(f("P(y)")).b(b.clone()).var("y"),
            AxiomInstance::new(A13).a(f("P(y) -> R(y)")).b(b.clone()).var("y"),
            AxiomInstance::new(A14).a(f("P(y)")).b(b.clone()).var("y"),
        ];
        for inst in insts {
            let id = inst.id;
            let v = check_axiom(inst, &ev);
            assert!(!v.is_refuted(), "{id}: {v:?}");
        }
    }

    #[test]
    fn total_rejects_constructions_needing_u() {
        let a3 = AxiomInstance::new(AxiomId::A3).a(f("P")).b(f("Q")).c(f("R"));
        assert!(matches!(
            axiom_realizer(&a3, &[], ModelId::Total),
            Err(ExtractionError::NeedsUniversal { .. })
        ));
        let a13 = AxiomInstance::new(AxiomId::A13).a(f("P(y)")).b(f("Q")).var("y");
        assert!(axiom_realizer(&a13, &[], ModelId::Total).is_ok());
        let a7 = AxiomInstance::new(AxiomId::A7).a(f("P")).b(f("Q")).c(f("R"));
        assert!(axiom_realizer(&a7, &[], ModelId::Total).is_ok());
    }

    #[test]
    fn generalized_identity_realizes() {
        let mut b = DerivationBuilder::new();
        let i = b.identity(f("P(y)"));
        b.gen(i, "y");
        let d = b.finish();
        let r = extract(&d, &[], ModelId::Urec).unwrap();
        assert_eq!(r.steps.len(), d.steps.len());
        let ev = small_evaluation();
        let phi = f("forall y. (P(y) -> P(y))");
        let v = verify_realizer(&r.psi_code(), &phi, &[], &ev, CheckConfig::default()).unwrap();
        assert!(v.is_realizes(), "{v:?}");
        let e = closed_realizer(&d, ModelId::Urec, 100_000).unwrap();
        assert!(crate::realizability::realizes(&e, &phi, &ev, CheckConfig::default()).unwrap().is_realizes());
    }

    #[test]
    fn open_conclusion_over_a_longer_list() {
        let mut b = DerivationBuilder::new();
        b.identity(f("P(x)"));
        let d = b.finish();
        let zs = vars(&["w", "x"]);
        let r = extract(&d, &zs, ModelId::Urec).unwrap();
        assert_eq!(r.arity, 2);
        let v = verify_realizer(&r.psi_code(), &f("P(x) -> P(x)"), &zs, &small_evaluation(), CheckConfig::default())
            .unwrap();
        assert!(v.is_realizes());
        assert!(matches!(extract(&d, &[], ModelId::Urec), Err(ExtractionError::MissingVariable(_))));
    }

    #[test]
    fn extraction_is_deterministic_and_checks_validity() {
        let mut b = DerivationBuilder::new();
        b.identity(f("P"));
        let d = b.finish();
        assert_eq!(extract(&d, &[], ModelId::Urec), extract(&d, &[], ModelId::Urec));
        assert!(matches!(extract(&d, &[], ModelId::Total), Err(ExtractionError::NeedsUniversal { .. })));
        let mut bad = d.clone();
        bad.steps.swap(0, 1);
        assert!(matches!(extract(&bad, &[], ModelId::Urec), Err(ExtractionError::Invalid { .. })));
    }
}
