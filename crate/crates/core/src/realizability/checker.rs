//! Bounded three-valued checking of `e r_f A`.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::evaluation::{Evaluation, RealizerSet};
use crate::kernel::{EvalOutcome, Interpreter, ModelId};
use crate::logic::syntax::subst_one;
use crate::logic::{canonicalize_blocks, Formula, Term};
use crate::nat::{self, Nat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Budget for each program call.
    pub fuel: u64,
    /// Candidate antecedent realizers are drawn from `0..=candidate_bound`
    /// when the antecedent's realizer set cannot be listed exactly.
    pub candidate_bound: u64,
    pub model: ModelId,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { fuel: 100_000, candidate_bound: 64, model: ModelId::Urec }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    OutOfFuel,
    EnumerationBound,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Verdict {
    Realizes,
    Refuted { witness: Witness },
    Unknown { reason: UnknownReason },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
    pub fn is_realizes(&self) -> bool {
        matches!(self, Verdict::Realizes)
    }
    fn unknown(reason: UnknownReason) -> Verdict {
        Verdict::Unknown { reason }
    }
    fn refuted(cause: Cause) -> Verdict {
        Verdict::Refuted { witness: Witness { path: Vec::new(), cause } }
    }
    fn under(self, step: TraceStep) -> Verdict {
        match self {
            Verdict::Refuted { mut witness } => {
                witness.path.insert(0, step);
                Verdict::Refuted { witness }
            }
            v => v,
        }
    }
    /// Refuted dominates, then Unknown, then Realizes; ties keep `self`.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (&self, &other) {
            (Verdict::Refuted { .. }, _) => self,
            (_, Verdict::Refuted { .. }) => other,
            (Verdict::Unknown { .. }, _) => self,
            (_, Verdict::Unknown { .. }) => other,
            _ => self,
        }
    }
}

/// A path from the checked realizer down to the clause that fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub path: Vec<TraceStep>,
    pub cause: Cause,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStep {
    /// Continue with `p₁e` on the left conjunct.
    Left,
    /// Continue with `p₂e` on the right conjunct.
    Right,
    /// Continue with `p₂e` on the disjunct selected by `p₁e`.
    Disjunct { tag: u8 },
    /// Continue with `p₂e` at the witness `p₁e`.
    Witness { value: u64 },
    /// `s` realizes the antecedent at `args`, and `φ_e(args, s)` converged to
    /// `result`; continue with `result` on the consequent.
    Call { args: Vec<u64>, s: Nat, result: Nat },
    /// `φ_e(a)` converged to `result`; continue on the body at `a`.
    Pointwise { a: u64, result: Nat },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    Bottom,
    NotMember { atom: String },
    BadDisjunctTag { tag: Nat },
    WitnessOutsideDomain { value: Nat },
    /// `φ_e(args, s)` is undefined (`s` is absent for pointwise calls).
    Diverged { args: Vec<u64>, s: Option<Nat> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("formula has free variables: {0:?}")]
    FreeVariables(Vec<String>),
    #[error("constant {0} is outside the domain")]
    ConstantOutsideDomain(u64),
    #[error("the evaluation's domain is empty")]
    EmptyDomain,
}

fn validate(a: &Formula, f: &Evaluation, allowed: &[&str]) -> Result<(), CheckError> {
    if f.domain.is_empty() {
        return Err(CheckError::EmptyDomain);
    }
    let free: Vec<String> =
        a.free_vars().into_iter().filter(|x| !allowed.contains(&x.as_str())).collect();
    if !free.is_empty() {
        return Err(CheckError::FreeVariables(free));
    }
    if let Some(k) = a.constants().into_iter().find(|k| !f.domain.contains(k)) {
        return Err(CheckError::ConstantOutsideDomain(k));
    }
    Ok(())
}

/// Antecedent realizers to try for one instantiation of a block.
enum Candidates {
    /// The exact realizer set; every member realizes definitely.
    Complete(Vec<Nat>),
    /// Members of `0..=B` that are not refuted, with their verdicts.
    Sampled(Vec<(Nat, Verdict)>),
}

/// Cap on exactly enumerated sets; larger ones fall back to sampling.
const ENUMERATION_CAP: usize = 4096;

/// A checker for one evaluation and configuration, memoizing verdicts.
pub struct Checker<'a> {
    f: &'a Evaluation,
    cfg: CheckConfig,
    interp: Interpreter,
    memo: HashMap<(Nat, Formula), Verdict>,
    candidates: HashMap<Formula, Rc<Candidates>>,
    exact: HashMap<Formula, Option<Rc<BTreeSet<Nat>>>>,
}

impl<'a> Checker<'a> {
    pub fn new(f: &'a Evaluation, cfg: CheckConfig) -> Self {
        Checker {
            f,
            cfg,
            interp: Interpreter::new(cfg.model),
            memo: HashMap::new(),
            candidates: HashMap::new(),
            exact: HashMap::new(),
        }
    }

    pub fn evaluation(&self) -> &Evaluation {
        self.f
    }

    pub fn config(&self) -> CheckConfig {
        self.cfg
    }

    pub fn interpreter(&mut self) -> &mut Interpreter {
        &mut self.interp
    }

    /// `e r_f A` for a sentence `A` over the domain.
    pub fn check(&mut self, e: &Nat, a: &Formula) -> Result<Verdict, CheckError> {
        validate(a, self.f, &[])?;
        Ok(self.realizes(e, a))
    }

    /// `e r′_f ∀y A(y)`: `φ_e(a)` realizes `A(a)` for each `a` in the domain.
    pub fn check_prime(&mut self, e: &Nat, y: &str, body: &Formula) -> Result<Verdict, CheckError> {
        validate(body, self.f, &[y])?;
        let mut acc = Verdict::Realizes;
        let domain: Vec<u64> = self.f.domain.iter().copied().collect();
        for a in domain {
            let v = match self.interp.eval(e, &[Nat::from(a)], self.cfg.fuel) {
                EvalOutcome::Converged(r) => {
                    let inst = subst_one(body, &Term::Const(a), y);
                    let step = TraceStep::Pointwise { a, result: r.clone() };
                    self.realizes(&r, &inst).under(step)
                }
                EvalOutcome::OutOfFuel => Verdict::unknown(UnknownReason::OutOfFuel),
                EvalOutcome::Diverged => Verdict::refuted(Cause::Diverged { args: vec![a], s: None }),
            };
            acc = acc.combine(v);
            if acc.is_refuted() {
                break;
            }
        }
        Ok(acc)
    }

    /// `(set, complete)`; see [`enumerate_realizers`].
    pub fn enumerate(&mut self, a: &Formula) -> Result<(BTreeSet<Nat>, bool), CheckError> {
        validate(a, self.f, &[])?;
        Ok(match self.exact_set(a) {
            Some(s) => ((*s).clone(), true),
            None => {
                let set = (0..=self.cfg.candidate_bound)
                    .map(Nat::from)
                    .filter(|s| self.realizes(s, a).is_realizes())
                    .collect();
                (set, false)
            }
        })
    }

    pub(crate) fn realizes(&mut self, e: &Nat, a: &Formula) -> Verdict {
        match a {
            Formula::Bottom => Verdict::refuted(Cause::Bottom),
            Formula::Top => Verdict::Realizes,
            Formula::Atom(p, args) => {
                let vals = ground(args);
                match self.f.get(p, &vals) {
                    RealizerSet::All => Verdict::Realizes,
                    RealizerSet::Finite(s) if s.contains(e) => Verdict::Realizes,
                    RealizerSet::Undetermined => Verdict::unknown(UnknownReason::Undetermined),
                    _ => Verdict::refuted(Cause::NotMember { atom: a.to_string() }),
                }
            }
            Formula::And(l, r) => {
                let (p1, p2) = nat::unpair(e);
                let left = self.realizes(&p1, l).under(TraceStep::Left);
                if left.is_refuted() {
                    return left;
                }
                left.combine(self.realizes(&p2, r).under(TraceStep::Right))
            }
            Formula::Or(l, r) => {
                let (p1, p2) = nat::unpair(e);
                match p1.as_u64() {
                    Some(0) => self.realizes(&p2, l).under(TraceStep::Disjunct { tag: 0 }),
                    Some(1) => self.realizes(&p2, r).under(TraceStep::Disjunct { tag: 1 }),
                    _ => Verdict::refuted(Cause::BadDisjunctTag { tag: p1 }),
                }
            }
            Formula::Exists(x, body) => {
                let (p1, p2) = nat::unpair(e);
                match p1.as_u64().filter(|v| self.f.domain.contains(v)) {
                    Some(v) => {
                        let inst = subst_one(body, &Term::Const(v), x);
                        self.realizes(&p2, &inst).under(TraceStep::Witness { value: v })
                    }
                    None => Verdict::refuted(Cause::WitnessOutsideDomain { value: p1 }),
                }
            }
            Formula::Imp(..) | Formula::Forall(..) => {
                let key = (e.clone(), a.clone());
                if let Some(v) = self.memo.get(&key) {
                    return v.clone();
                }
                let v = self.realizes_block(e, a);
                self.memo.insert(key, v.clone());
                v
            }
        }
    }

    fn realizes_block(&mut self, e: &Nat, a: &Formula) -> Verdict {
        let block = canonicalize_blocks(a).expect("implication or universal");
        let domain: Vec<u64> = self.f.domain.iter().copied().collect();
        let mut acc = Verdict::Realizes;
        let mut exhaustive = true;
        for args in tuples(&domain, block.vars.len()) {
            let (ante, cons) = block.instantiate(&args);
            let cands = self.candidates_for(&ante);
            let list: Vec<(Nat, Option<Verdict>)> = match &*cands {
                Candidates::Complete(v) => v.iter().map(|s| (s.clone(), None)).collect(),
                Candidates::Sampled(v) => {
                    exhaustive = false;
                    v.iter().map(|(s, w)| (s.clone(), Some(w.clone()))).collect()
                }
            };
            let mut call_args: Vec<Nat> = args.iter().map(|&v| Nat::from(v)).collect();
            call_args.push(Nat::ZERO);
            for (s, ante_verdict) in list {
                // without a definite antecedent verdict the call can settle nothing
                if let Some(Verdict::Unknown { reason }) = ante_verdict {
                    acc = acc.combine(Verdict::unknown(reason));
                    continue;
                }
                *call_args.last_mut().expect("nonempty") = s.clone();
                let v = match self.interp.eval(e, &call_args, self.cfg.fuel) {
                    EvalOutcome::Converged(r) => {
                        let step = TraceStep::Call { args: args.clone(), s: s.clone(), result: r.clone() };
                        self.realizes(&r, &cons).under(step)
                    }
                    EvalOutcome::OutOfFuel => Verdict::unknown(UnknownReason::OutOfFuel),
                    EvalOutcome::Diverged => Verdict::refuted(Cause::Diverged {
                        args: args.clone(),
                        s: Some(s.clone()),
                    }),
                };
                acc = acc.combine(v);
                if acc.is_refuted() {
                    return acc;
                }
            }
        }
        if !exhaustive {
            acc = acc.combine(Verdict::unknown(UnknownReason::EnumerationBound));
        }
        acc
    }

    fn candidates_for(&mut self, ante: &Formula) -> Rc<Candidates> {
        if let Some(c) = self.candidates.get(ante) {
            return c.clone();
        }
        let c = match self.exact_set(ante) {
            Some(set) => Candidates::Complete(set.iter().cloned().collect()),
            None => {
                let mut v = Vec::new();
                for s in 0..=self.cfg.candidate_bound {
                    let s = Nat::from(s);
                    let verdict = self.realizes(&s, ante);
                    if !verdict.is_refuted() {
                        v.push((s, verdict));
                    }
                }
                Candidates::Sampled(v)
            }
        };
        let c = Rc::new(c);
        self.candidates.insert(ante.clone(), c.clone());
        c
    }

    /// The exact realizer set, when it is finite, listable and not too big.
    fn exact_set(&mut self, a: &Formula) -> Option<Rc<BTreeSet<Nat>>> {
        if let Some(s) = self.exact.get(a) {
            return s.clone();
        }
        let s = self.compute_exact(a).filter(|s| s.len() <= ENUMERATION_CAP).map(Rc::new);
        self.exact.insert(a.clone(), s.clone());
        s
    }

    fn compute_exact(&mut self, a: &Formula) -> Option<BTreeSet<Nat>> {
        match a {
            Formula::Bottom => Some(BTreeSet::new()),
            Formula::Atom(p, args) => match self.f.get(p, &ground(args)) {
                RealizerSet::Finite(s) => Some(s.clone()),
                RealizerSet::Empty => Some(BTreeSet::new()),
                RealizerSet::All | RealizerSet::Undetermined => None,
            },
            Formula::And(l, r) => {
                let ls = self.exact_set(l);
                if ls.as_ref().is_some_and(|s| s.is_empty()) {
                    return Some(BTreeSet::new());
                }
                let rs = self.exact_set(r);
                if rs.as_ref().is_some_and(|s| s.is_empty()) {
                    return Some(BTreeSet::new());
                }
                let (ls, rs) = (ls?, rs?);
                if ls.len().saturating_mul(rs.len()) > ENUMERATION_CAP {
                    return None;
                }
                Some(ls.iter().flat_map(|x| rs.iter().map(move |y| nat::pair(x, y))).collect())
            }
            Formula::Or(l, r) => {
                let ls = self.exact_set(l)?;
                let rs = self.exact_set(r)?;
                let mut out: BTreeSet<Nat> = ls.iter().map(|x| nat::pair(&Nat::ZERO, x)).collect();
                out.extend(rs.iter().map(|y| nat::pair(&Nat::from(1u64), y)));
                Some(out)
            }
            Formula::Exists(x, body) => {
                let domain: Vec<u64> = self.f.domain.iter().copied().collect();
                let mut out = BTreeSet::new();
                for v in domain {
                    let inst = subst_one(body, &Term::Const(v), x);
                    let s = self.exact_set(&inst)?;
                    out.extend(s.iter().map(|r| nat::pair(&Nat::from(v), r)));
                    if out.len() > ENUMERATION_CAP {
                        return None;
                    }
                }
                Some(out)
            }
            Formula::Top | Formula::Imp(..) | Formula::Forall(..) => None,
        }
    }

    /// Whether every antecedent met while checking `a` has an exactly listed
    /// realizer set, so that a non-refuted verdict can only be Realizes or an
    /// OutOfFuel Unknown.
    pub fn antecedents_enumerable(&mut self, a: &Formula) -> bool {
        match a {
            Formula::Bottom | Formula::Top | Formula::Atom(..) => true,
            Formula::And(l, r) | Formula::Or(l, r) => {
                self.antecedents_enumerable(l) && self.antecedents_enumerable(r)
            }
            Formula::Exists(x, body) => {
                let domain: Vec<u64> = self.f.domain.iter().copied().collect();
                domain
                    .into_iter()
                    .all(|v| self.antecedents_enumerable(&subst_one(body, &Term::Const(v), x)))
            }
            Formula::Imp(..) | Formula::Forall(..) => {
                let block = canonicalize_blocks(a).expect("block");
                let domain: Vec<u64> = self.f.domain.iter().copied().collect();
                tuples(&domain, block.vars.len()).into_iter().all(|args| {
                    let (ante, cons) = block.instantiate(&args);
                    self.exact_set(&ante).is_some() && self.antecedents_enumerable(&cons)
                })
            }
        }
    }

    /// Re-derive a refutation of `e r_f A` from its witness.
    pub fn replay(&mut self, e: &Nat, a: &Formula, w: &Witness) -> bool {
        self.replay_from(e, a, &w.path, &w.cause)
    }

    fn replay_from(&mut self, e: &Nat, a: &Formula, path: &[TraceStep], cause: &Cause) -> bool {
        let Some((step, rest)) = path.split_first() else {
            return self.replay_cause(e, a, cause);
        };
        match (step, a) {
            (TraceStep::Left, Formula::And(l, _)) => self.replay_from(&nat::proj1(e), l, rest, cause),
            (TraceStep::Right, Formula::And(_, r)) => self.replay_from(&nat::proj2(e), r, rest, cause),
            (TraceStep::Disjunct { tag }, Formula::Or(l, r)) => {
                let (p1, p2) = nat::unpair(e);
                if p1 != u64::from(*tag) {
                    return false;
                }
                self.replay_from(&p2, if *tag == 0 { l } else { r }, rest, cause)
            }
            (TraceStep::Witness { value }, Formula::Exists(x, body)) => {
                let (p1, p2) = nat::unpair(e);
                if p1 != *value || !self.f.domain.contains(value) {
                    return false;
                }
                let inst = subst_one(body, &Term::Const(*value), x);
                self.replay_from(&p2, &inst, rest, cause)
            }
            (TraceStep::Call { args, s, result }, Formula::Imp(..) | Formula::Forall(..)) => {
                let Some((ante, cons)) = self.call_site(a, args) else {
                    return false;
                };
                if !self.realizes(s, &ante).is_realizes() {
                    return false;
                }
                let mut call: Vec<Nat> = args.iter().map(|&v| Nat::from(v)).collect();
                call.push(s.clone());
                if self.interp.eval(e, &call, self.cfg.fuel) != EvalOutcome::Converged(result.clone()) {
                    return false;
                }
                self.replay_from(result, &cons, rest, cause)
            }
            _ => false,
        }
    }

    fn call_site(&self, a: &Formula, args: &[u64]) -> Option<(Formula, Formula)> {
        let block = canonicalize_blocks(a)?;
        let ok = block.vars.len() == args.len() && args.iter().all(|v| self.f.domain.contains(v));
        ok.then(|| block.instantiate(args))
    }

    fn replay_cause(&mut self, e: &Nat, a: &Formula, cause: &Cause) -> bool {
        match (cause, a) {
            (Cause::Bottom, Formula::Bottom) => true,
            (Cause::NotMember { .. }, Formula::Atom(p, args)) => match self.f.get(p, &ground(args)) {
                RealizerSet::Empty => true,
                RealizerSet::Finite(s) => !s.contains(e),
                _ => false,
            },
            (Cause::BadDisjunctTag { tag }, Formula::Or(..)) => {
                let p1 = nat::proj1(e);
                p1 == *tag && p1.as_u64().is_none_or(|t| t > 1)
            }
            (Cause::WitnessOutsideDomain { value }, Formula::Exists(..)) => {
                let p1 = nat::proj1(e);
                p1 == *value && p1.as_u64().is_none_or(|v| !self.f.domain.contains(&v))
            }
            (Cause::Diverged { args, s: Some(s) }, Formula::Imp(..) | Formula::Forall(..)) => {
                let Some((ante, _)) = self.call_site(a, args) else {
                    return false;
                };
                if !self.realizes(s, &ante).is_realizes() {
                    return false;
                }
                let mut call: Vec<Nat> = args.iter().map(|&v| Nat::from(v)).collect();
                call.push(s.clone());
                self.interp.eval(e, &call, self.cfg.fuel) == EvalOutcome::Diverged
            }
            _ => false,
        }
    }

    /// Replay a refutation produced by [`Checker::check_prime`].
    pub fn replay_prime(&mut self, e: &Nat, y: &str, body: &Formula, w: &Witness) -> bool {
        match (w.path.first(), &w.cause) {
            (Some(TraceStep::Pointwise { a, result }), _) => {
                if !self.f.domain.contains(a)
                    || self.interp.eval(e, &[Nat::from(*a)], self.cfg.fuel)
                        != EvalOutcome::Converged(result.clone())
                {
                    return false;
                }
                let inst = subst_one(body, &Term::Const(*a), y);
                self.replay_from(result, &inst, &w.path[1..], &w.cause)
            }
            (None, Cause::Diverged { args, s: None }) if args.len() == 1 => {
                self.f.domain.contains(&args[0])
                    && self.interp.eval(e, &[Nat::from(args[0])], self.cfg.fuel)
                        == EvalOutcome::Diverged
            }
            _ => false,
        }
    }
}

fn ground(args: &[Term]) -> Vec<u64> {
    args.iter()
        .map(|t| match t {
            Term::Const(k) => *k,
            Term::Var(x) => panic!("unexpected free variable {x}"),
        })
        .collect()
}

/// All tuples of length `n` over `domain`, in lexicographic order.
pub fn tuples(domain: &[u64], n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                domain.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// `e r_f A`, bounded by `cfg`.
pub fn realizes(e: &Nat, a: &Formula, f: &Evaluation, cfg: CheckConfig) -> Result<Verdict, CheckError> {
    Checker::new(f, cfg).check(e, a)
}

/// `e r′_f ∀y body`.
pub fn realizes_prime(
    e: &Nat,
    y: &str,
    body: &Formula,
    f: &Evaluation,
    cfg: CheckConfig,
) -> Result<Verdict, CheckError> {
    Checker::new(f, cfg).check_prime(e, y, body)
}

/// The realizers of `A` and whether the list is exhaustive. Exhaustive lists
/// come from atoms with finite or empty sets closed under ∧, ∨, ∃; otherwise
/// the result is the definite realizers among `0..=B`.
pub fn enumerate_realizers(
    a: &Formula,
    f: &Evaluation,
    cfg: CheckConfig,
) -> Result<(BTreeSet<Nat>, bool), CheckError> {
    Checker::new(f, cfg).enumerate(a)
}
