//! The equivalence between realizability of the counterexample formula and
//! the existence of an overuniversal function, run end to end, plus a
//! diagonal refuter for candidate universal functions of TOTAL.

pub mod diagonal;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::extraction::{closed_realizer, ExtractionError};
use crate::kernel::ast::{self, Prog};
use crate::kernel::{code, quote_comp, quote_pair, EvalOutcome, Interpreter, ModelId};
use crate::logic::{
    check_derivation, parse_formula, AxiomId, AxiomInstance, Derivation, DerivationBuilder, Formula,
    Term,
};
use crate::nat::Nat;
use crate::realizability::{CheckConfig, Checker, Evaluation, RealizerSet, Verdict};

pub use diagonal::{diagonalize, replay, DiagonalCertificate, DiagonalError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("extraction failed: {0}")]
    Extraction(#[from] ExtractionError),
    #[error("{stage} did not converge: {outcome:?}")]
    NoValue { stage: &'static str, outcome: EvalOutcome },
}

const FORMULA5: &str = "forall x. (Q(x) -> forall y. (R(x,y) -> exists z. P(x,y,z))) \
                        -> forall y. forall x. (Q(x) /\\ R(x,y) -> exists z. P(x,y,z))";

/// `∀x(Q(x) → ∀y(R(x,y) → ∃z P(x,y,z))) → ∀y∀x(Q(x) ∧ R(x,y) → ∃z P(x,y,z))`.
pub fn formula5() -> Formula {
    parse_formula(FORMULA5).expect("well-formed")
}

fn split(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::Imp(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!("implication"),
    }
}

/// A Hilbert derivation of [`formula5`].
pub fn derivation5() -> Derivation {
    let f = |s: &str| parse_formula(s).expect("well-formed");
    let (l, _) = split(&formula5());
    let (q, r) = (f("Q(x)"), f("R(x,y)"));
    let s = f("exists z. P(x,y,z)");
    let c = f("forall y. (R(x,y) -> exists z. P(x,y,z))");
    let d = f("Q(x) /\\ R(x,y)");
    let mut b = DerivationBuilder::new();

    // L → (D → W) from L → W
    let lift = |b: &mut DerivationBuilder, i: usize, d: &Formula| {
        let (_, w) = split(b.formula(i));
        let k = b.axiom(AxiomInstance::new(AxiomId::A2).a(w).b(d.clone()));
        let k = b.weaken(k, l.clone());
        b.mp_under(k, i)
    };
    // L → (D → Y→Z), L → (D → Y) ⊢ L → (D → Z)
    let mp2 = |b: &mut DerivationBuilder, i: usize, j: usize| {
        let (_, dyz) = split(b.formula(i));
        let (_, yz) = split(&dyz);
        let (y, z) = split(&yz);
        let s = b.axiom(AxiomInstance::new(AxiomId::A3).a(d.clone()).b(y).c(z));
        let s = b.weaken(s, l.clone());
        let t = b.mp_under(s, i);
        b.mp_under(t, j)
    };

    let h1 = b.axiom(
        AxiomInstance::new(AxiomId::A11).a(Formula::Imp(Box::new(q.clone()), Box::new(c.clone()))).var("x").term(Term::var("x")),
    );
    let h2 = b.axiom(
        AxiomInstance::new(AxiomId::A11).a(Formula::Imp(Box::new(r.clone()), Box::new(s))).var("y").term(Term::var("y")),
    );
    let a5 = b.axiom(AxiomInstance::new(AxiomId::A5).a(q).b(r.clone()));
    let t_q = b.weaken(a5, l.clone());
    let a6 = b.axiom(AxiomInstance::new(AxiomId::A6).a(f("Q(x)")).b(r));
    let t_r = b.weaken(a6, l.clone());
    let t_qc = lift(&mut b, h1, &d);
    let t_c = mp2(&mut b, t_qc, t_q);
    let h2d = b.weaken(h2, d.clone());
    let t_crs = b.weaken(h2d, l.clone());
    let t_rs = mp2(&mut b, t_crs, t_c);
    let t_s = mp2(&mut b, t_rs, t_r);

    // generalize x, then y, moving each quantifier past L
    let mut cur = t_s;
    for x in ["x", "y"] {
        let (_, body) = split(b.formula(cur));
        let g = b.gen(cur, x);
        let ax = b.axiom(AxiomInstance::new(AxiomId::A13).a(body).b(l.clone()).var(x));
        cur = b.mp(g, ax);
    }
    let d = b.finish();
    debug_assert!(check_derivation(&d).is_valid());
    d
}

/// Fuel for deciding definedness in a slice; grows with the slice.
pub fn slice_fuel(slice: u64) -> u64 {
    1000 * slice
}

/// The finite slice `[0, slice)` of the evaluation that turns realizers of
/// the right side of [`formula5`] into an overuniversal function. Q is All;
/// R(a,b) is All when `φ_a(b)` converges inside the slice, Empty when it
/// diverges, Undetermined otherwise; P(a,b,c) is All exactly when
/// `φ_a(b) = c`.
pub fn theorem_evaluation(slice: u64) -> Evaluation {
    theorem_evaluation_on(0..slice, slice_fuel(slice))
}

/// [`theorem_evaluation`] over an arbitrary finite domain.
pub fn theorem_evaluation_on(domain: impl IntoIterator<Item = u64>, fuel: u64) -> Evaluation {
    let mut ev = Evaluation::new(domain);
    let dom: Vec<u64> = ev.domain.iter().copied().collect();
    let mut interp = Interpreter::new(ModelId::Urec);
    for &a in &dom {
        ev.set("Q", vec![a], RealizerSet::All);
        for &b in &dom {
            match interp.eval(&Nat::from(a), &[Nat::from(b)], fuel) {
                EvalOutcome::Converged(v) => match v.as_u64().filter(|v| dom.contains(v)) {
                    Some(c) => {
                        ev.set("R", vec![a, b], RealizerSet::All);
                        ev.set("P", vec![a, b, c], RealizerSet::All);
                    }
                    None => {
                        ev.set("R", vec![a, b], RealizerSet::Undetermined);
                    }
                },
                EvalOutcome::Diverged => {
                    ev.set("R", vec![a, b], RealizerSet::Empty);
                }
                EvalOutcome::OutOfFuel => {
                    ev.set("R", vec![a, b], RealizerSet::Undetermined);
                    for &c in &dom {
                        ev.set("P", vec![a, b, c], RealizerSet::Undetermined);
                    }
                }
            }
        }
    }
    ev
}

/// Unary program: `a ↦ k(a)` with `φ_{k(a)}(y, y₀) ≃ c(φ_a(y), 0)`.
fn k_program() -> Prog {
    let call = quote_comp(ast::proj(1), vec![ast::lit(code::proj(1))]);
    quote_pair(call, ast::lit(code::lit_u64(0)))
}

/// A realizer of the left side of [`formula5`]: `φ_e(x, x₀) ≃ k(x)`.
pub fn left_realizer() -> Nat {
    ast::encode(&ast::comp(k_program(), vec![ast::proj(1)]))
}

/// `u(x, y) ≃ p₁ φ_{e′}(y, x, c(0,0))`.
pub fn derive_overuniversal(e_prime: &Nat) -> Nat {
    let call = ast::comp(ast::decode(e_prime, ModelId::Urec), vec![ast::proj(2), ast::proj(1), ast::lit(0u64)]);
    ast::encode(&ast::fst(call))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub slice: u64,
    pub samples: usize,
    pub seed: u64,
    /// Budget for each direct evaluation `φ_a(b)`.
    pub direct_fuel: u64,
    /// Budget for building the realizers and for each call of `u`.
    pub fuel: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { slice: 32, samples: 100, seed: 0, direct_fuel: 10_000, fuel: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub a: u64,
    pub b: u64,
    pub direct: Nat,
    pub via_u: EvalOutcome,
}

impl Sample {
    pub fn agrees(&self) -> bool {
        self.via_u == EvalOutcome::Converged(self.direct.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub formula: String,
    pub derivation_steps: usize,
    pub derivation_valid: bool,
    /// Bit length of the extracted closed realizer of the formula.
    pub realizer_bits: u64,
    pub left_realizer: Nat,
    pub slice: u64,
    pub left_verdict: Verdict,
    pub e_prime_bits: u64,
    pub u_bits: u64,
    pub agreed: usize,
    pub sampled: usize,
    pub samples: Vec<Sample>,
}

impl PipelineTrace {
    pub fn all_agree(&self) -> bool {
        self.agreed == self.sampled
    }
}

/// Random `(a, b)` below 2¹⁰ with `φ_a(b)` converging within `fuel`.
pub fn convergent_pairs(seed: u64, n: usize, fuel: u64) -> Vec<(u64, u64, Nat)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut interp = Interpreter::new(ModelId::Urec);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (a, b) = (rng.gen_range(0..1024u64), rng.gen_range(0..1024u64));
        if let EvalOutcome::Converged(v) = interp.eval(&Nat::from(a), &[Nat::from(b)], fuel) {
            out.push((a, b, v));
        }
    }
    out
}

/// Extract the formula's realizer, feed it the left realizer, derive `u`
/// and compare `u` with direct evaluation on sampled convergent pairs.
pub fn run_pipeline(model: ModelId, cfg: &PipelineConfig) -> Result<PipelineTrace, HarnessError> {
    let d = derivation5();
    let derivation_valid = check_derivation(&d).is_valid();
    let r5 = closed_realizer(&d, model, cfg.fuel)?;
    let left = left_realizer();

    let ev = theorem_evaluation(cfg.slice);
    let (lhs, _) = split(&formula5());
    let check_cfg = CheckConfig { fuel: slice_fuel(cfg.slice), candidate_bound: 64, model };
    let left_verdict = Checker::new(&ev, check_cfg).check(&left, &lhs).expect("closed formula");

    let mut interp = Interpreter::new(model);
    let e_prime = match interp.eval(&r5, &[left.clone()], cfg.fuel) {
        EvalOutcome::Converged(v) => v,
        outcome => return Err(HarnessError::NoValue { stage: "applying the realizer", outcome }),
    };
    let u = derive_overuniversal(&e_prime);
    let samples: Vec<Sample> = convergent_pairs(cfg.seed, cfg.samples, cfg.direct_fuel)
        .into_iter()
        .map(|(a, b, direct)| {
            let via_u = interp.eval(&u, &[Nat::from(a), Nat::from(b)], cfg.fuel);
            Sample { a, b, direct, via_u }
        })
        .collect();
    Ok(PipelineTrace {
        formula: formula5().to_string(),
        derivation_steps: d.steps.len(),
        derivation_valid,
        realizer_bits: r5.bits(),
        left_realizer: left,
        slice: cfg.slice,
        left_verdict,
        e_prime_bits: e_prime.bits(),
        u_bits: u.bits(),
        agreed: samples.iter().filter(|s| s.agrees()).count(),
        sampled: samples.len(),
        samples,
    })
}
