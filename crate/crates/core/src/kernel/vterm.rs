//! V-terms: naturals, variables, and applications of coded functions.

use std::collections::BTreeMap;

use serde::Serialize;

use super::interp::{EvalOutcome, Interpreter};
use super::ModelId;
use crate::nat::{self, Nat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VTerm {
    Nat(Nat),
    Var(String),
    App { code: Nat, arity: usize, args: Vec<VTerm> },
}

impl VTerm {
    pub fn app(code: Nat, args: Vec<VTerm>) -> VTerm {
        VTerm::App { code, arity: args.len(), args }
    }

    pub fn var(name: &str) -> VTerm {
        VTerm::Var(name.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VTermError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("application declares arity {declared} but has {given} arguments")]
    Arity { declared: usize, given: usize },
}

/// Value of `t` under `subst`; `fuel` is shared across all calls in `t`.
pub fn vterm_eval(
    model: ModelId,
    t: &VTerm,
    subst: &BTreeMap<String, Nat>,
    fuel: u64,
) -> Result<EvalOutcome, VTermError> {
    let mut it = Interpreter::new(model);
    let mut fuel = fuel;
    eval_in(&mut it, t, subst, &mut fuel)
}

fn eval_in(
    it: &mut Interpreter,
    t: &VTerm,
    subst: &BTreeMap<String, Nat>,
    fuel: &mut u64,
) -> Result<EvalOutcome, VTermError> {
    match t {
        VTerm::Nat(k) => Ok(EvalOutcome::Converged(k.clone())),
        VTerm::Var(x) => subst
            .get(x)
            .map(|v| EvalOutcome::Converged(v.clone()))
            .ok_or_else(|| VTermError::Unbound(x.clone())),
        VTerm::App { code, arity, args } => {
            if *arity != args.len() {
                return Err(VTermError::Arity { declared: *arity, given: args.len() });
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                match eval_in(it, a, subst, fuel)? {
                    EvalOutcome::Converged(v) => vals.push(v),
                    other => return Ok(other),
                }
            }
            let out = it.eval_metered(code, &vals, fuel);
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KleeneReport {
    AgreeOnSamples,
    DisagreeAt { witness: BTreeMap<String, Nat>, left: EvalOutcome, right: EvalOutcome },
    Unknown { witness: BTreeMap<String, Nat> },
}

/// Deterministic sample `i`: the components of `i` under iterated unpairing.
pub fn sample_point(vars: &[String], i: u64) -> BTreeMap<String, Nat> {
    let mut rest = Nat::from(i);
    let mut out = BTreeMap::new();
    for (k, v) in vars.iter().enumerate() {
        if k + 1 == vars.len() {
            out.insert(v.clone(), rest.clone());
        } else {
            let (a, b) = nat::unpair(&rest);
            out.insert(v.clone(), a);
            rest = b;
        }
    }
    out
}

/// Sampled Kleene equality. Fuel exhaustion on both sides does not refute;
/// on one side only it makes the sample inconclusive.
pub fn kleene_equal(
    model: ModelId,
    t1: &VTerm,
    t2: &VTerm,
    vars: &[String],
    samples: u64,
    fuel: u64,
) -> Result<KleeneReport, VTermError> {
    let mut unknown = None;
    for i in 0..samples {
        let point = sample_point(vars, i);
        let l = vterm_eval(model, t1, &point, fuel)?;
        let r = vterm_eval(model, t2, &point, fuel)?;
        use EvalOutcome::*;
        match (&l, &r) {
            (Converged(a), Converged(b)) if a == b => {}
            (Diverged, Diverged) | (OutOfFuel, OutOfFuel) => {}
            (OutOfFuel, _) | (_, OutOfFuel) => {
                unknown.get_or_insert(point);
            }
            _ => return Ok(KleeneReport::DisagreeAt { witness: point, left: l, right: r }),
        }
    }
    Ok(match unknown {
        Some(witness) => KleeneReport::Unknown { witness },
        None => KleeneReport::AgreeOnSamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ast::*;
    use crate::kernel::combinators::dummy_index;

    #[test]
    fn constants_and_pairing() {
        let empty = BTreeMap::new();
        assert_eq!(
            vterm_eval(ModelId::Urec, &VTerm::Nat(Nat::from(7u64)), &empty, 1).unwrap(),
            EvalOutcome::Converged(Nat::from(7u64))
        );
        let c = VTerm::app(
            encode(&pair(proj(1), proj(2))),
            vec![VTerm::Nat(1u64.into()), VTerm::Nat(2u64.into())],
        );
        let t = VTerm::app(encode(&fst(proj(1))), vec![c]);
        assert_eq!(
            vterm_eval(ModelId::Urec, &t, &empty, 100).unwrap(),
            EvalOutcome::Converged(1u64.into())
        );
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let t = VTerm::var("x");
        assert_eq!(
            vterm_eval(ModelId::Urec, &t, &BTreeMap::new(), 10),
            Err(VTermError::Unbound("x".into()))
        );
    }

    #[test]
    fn dummy_extension_is_kleene_equal() {
        let e = encode(&succ(proj(1)));
        let d = dummy_index(&e, 1);
        let vars = vec!["x".to_string(), "y".to_string()];
        let t1 = VTerm::app(e, vec![VTerm::var("x")]);
        let t2 = VTerm::app(d, vec![VTerm::var("x"), VTerm::var("y")]);
        let r = kleene_equal(ModelId::Urec, &t1, &t2, &vars, 200, 100).unwrap();
        assert_eq!(r, KleeneReport::AgreeOnSamples);
        let t3 = VTerm::app(encode(&proj(1)), vec![VTerm::var("x")]);
        let r = kleene_equal(ModelId::Urec, &t1, &t3, &vars, 10, 100).unwrap();
        assert!(matches!(r, KleeneReport::DisagreeAt { .. }));
    }

    #[test]
    fn sample_points_cover_pairs() {
        let vars = vec!["a".to_string(), "b".to_string()];
        let p = sample_point(&vars, 7);
        assert_eq!(p["a"], 1);
        assert_eq!(p["b"], 2);
    }
}
