//! Refuting a binary TOTAL program as an overuniversal function.

use serde::{Deserialize, Serialize};

use crate::kernel::ast::{self, ProgramAst};
use crate::kernel::{EvalOutcome, Interpreter, ModelId};
use crate::nat::Nat;

/// `candidate(i, i) = lhs` but `φ_i(i) = rhs ≠ lhs`, where `i` is the code of
/// the diagonal program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalCertificate {
    pub candidate: Nat,
    pub diagonal_code: Nat,
    pub point: (Nat, Nat),
    pub lhs: Nat,
    pub rhs: Nat,
    pub fuel: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagonalError {
    #[error("candidate did not halt within {fuel} steps: {outcome:?}")]
    CandidateNotTotal { fuel: u64, outcome: EvalOutcome },
}

/// Largest step budget granted to a candidate.
const FUEL_CAP: u64 = 50_000_000;

/// Steps a TOTAL run of `p` can take: each node is entered at most once.
fn step_bound(p: &ProgramAst) -> u64 {
    use ProgramAst::*;
    let own = match p {
        SmnCode(n, ..) => n.saturating_add(1),
        _ => 1,
    };
    let kids: u64 = match p {
        Proj(_) | Lit(_) => 0,
        Pair(a, b) | SmnCode(_, a, b) | Apply(a, b) | CodePair(a, b) => {
            step_bound(a).saturating_add(step_bound(b))
        }
        Fst(a) | Snd(a) | Succ(a) | ConstCode(a) => step_bound(a),
        Comp(f, args) => args.iter().fold(step_bound(f), |acc, x| acc.saturating_add(step_bound(x))),
        If0(c, t, e) => step_bound(c).saturating_add(step_bound(t)).saturating_add(step_bound(e)),
    };
    own.saturating_add(kids)
}

/// Builds `d = Succ(candidate(x, x))` and evaluates both sides at its code.
pub fn diagonalize(candidate: &Nat) -> Result<DiagonalCertificate, DiagonalError> {
    let c = ast::decode(candidate, ModelId::Total);
    let d = ast::succ(ast::comp(c.clone(), vec![ast::proj(1), ast::proj(1)]));
    let i = ast::encode(&d);
    let fuel = step_bound(&d).min(FUEL_CAP);
    let mut interp = Interpreter::new(ModelId::Total);
    let run = |interp: &mut Interpreter, code: &Nat, args: &[Nat]| match interp.eval(code, args, fuel) {
        EvalOutcome::Converged(v) => Ok(v),
        outcome => Err(DiagonalError::CandidateNotTotal { fuel, outcome }),
    };
    let lhs = run(&mut interp, candidate, &[i.clone(), i.clone()])?;
    let rhs = run(&mut interp, &i, &[i.clone()])?;
    Ok(DiagonalCertificate { candidate: candidate.clone(), diagonal_code: i.clone(), point: (i.clone(), i), lhs, rhs, fuel })
}

/// Re-evaluates both sides and confirms the disagreement.
pub fn replay(cert: &DiagonalCertificate) -> bool {
    let mut interp = Interpreter::new(ModelId::Total);
    let (x, y) = &cert.point;
    let lhs = interp.eval(&cert.candidate, &[x.clone(), y.clone()], cert.fuel);
    let rhs = interp.eval(&cert.diagonal_code, &[x.clone()], cert.fuel);
    lhs == EvalOutcome::Converged(cert.lhs.clone())
        && rhs == EvalOutcome::Converged(cert.rhs.clone())
        && x == y
        && cert.lhs != cert.rhs
}
