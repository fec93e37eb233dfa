//! Per-evaluation realizer search.

use serde::Serialize;

use super::checker::{CheckConfig, CheckError, Checker, Verdict};
use super::evaluation::Evaluation;
use crate::logic::Formula;
use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakEntry {
    /// The first candidate that realizes, else the first one left unknown.
    pub best: Option<(Nat, Verdict)>,
    pub tried: u64,
}

impl WeakEntry {
    pub fn found_realizer(&self) -> bool {
        matches!(self.best, Some((_, Verdict::Realizes)))
    }
}

/// For each evaluation, search `hint` and then `0..=bound` for a candidate
/// that is not refuted. A `None` best means every candidate was refuted.
pub fn check_weak(
    a: &Formula,
    fs: &[Evaluation],
    cfg: CheckConfig,
    bound: u64,
    hint: Option<&Nat>,
) -> Result<Vec<WeakEntry>, CheckError> {
    let mut out = Vec::with_capacity(fs.len());
    for f in fs {
        let mut checker = Checker::new(f, cfg);
        let mut best: Option<(Nat, Verdict)> = None;
        let mut tried = 0;
        let candidates = hint.cloned().into_iter().chain((0..=bound).map(Nat::from));
        for e in candidates {
            tried += 1;
            let v = checker.check(&e, a)?;
            match v {
                Verdict::Realizes => {
                    best = Some((e, v));
                    break;
                }
                Verdict::Unknown { .. } if best.is_none() => best = Some((e, v)),
                _ => {}
            }
        }
        out.push(WeakEntry { best, tried });
    }
    Ok(out)
}
