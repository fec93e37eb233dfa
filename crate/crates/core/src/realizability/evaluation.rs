//! Finite evaluations: a domain and a realizer set for each atom over it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::logic::{parse_formula, Formula, Term};
use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizerSet {
    Finite(BTreeSet<Nat>),
    All,
    Empty,
    /// Membership is not known, e.g. a slice entry whose definedness ran out
    /// of fuel. Checking against it yields Unknown.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub domain: BTreeSet<u64>,
    pub atoms: BTreeMap<(String, Vec<u64>), RealizerSet>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvaluationError {
    #[error("evaluation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("the domain must be nonempty")]
    EmptyDomain,
    #[error("bad atom key {0:?}: expected P(k1,...,kn) with constants from the domain")]
    BadKey(String),
}

static EMPTY: RealizerSet = RealizerSet::Empty;

impl Evaluation {
    pub fn new(domain: impl IntoIterator<Item = u64>) -> Self {
        Evaluation { domain: domain.into_iter().collect(), atoms: BTreeMap::new() }
    }

    pub fn set(&mut self, pred: &str, args: Vec<u64>, s: RealizerSet) -> &mut Self {
        self.atoms.insert((pred.to_string(), args), s);
        self
    }

    /// Missing entries are empty.
    pub fn get(&self, pred: &str, args: &[u64]) -> &RealizerSet {
        self.atoms.get(&(pred.to_string(), args.to_vec())).unwrap_or(&EMPTY)
    }

    pub fn from_json(text: &str) -> Result<Self, EvaluationError> {
        let raw: RawEvaluation = serde_json::from_str(text)?;
        if raw.domain.is_empty() {
            return Err(EvaluationError::EmptyDomain);
        }
        let domain: BTreeSet<u64> = raw.domain.into_iter().collect();
        let mut atoms = BTreeMap::new();
        for (key, set) in raw.atoms {
            let bad = || EvaluationError::BadKey(key.clone());
            let Ok(Formula::Atom(p, args)) = parse_formula(&key) else {
                return Err(bad());
            };
            let mut vals = Vec::with_capacity(args.len());
            for t in args {
                match t {
                    Term::Const(k) if domain.contains(&k) => vals.push(k),
                    _ => return Err(bad()),
                }
            }
            atoms.insert((p, vals), set);
        }
        Ok(Evaluation { domain, atoms })
    }

    pub fn to_json(&self) -> String {
        let raw = RawEvaluation {
            domain: self.domain.iter().copied().collect(),
            atoms: self
                .atoms
                .iter()
                .map(|((p, args), s)| {
                    let args: Vec<String> = args.iter().map(u64::to_string).collect();
                    (format!("{p}({})", args.join(",")), s.clone())
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct RawEvaluation {
    domain: Vec<u64>,
    #[serde(default)]
    atoms: BTreeMap<String, RealizerSet>,
}
