//! Hilbert-style derivations: axiom instances, modus ponens, generalization.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::syntax::{
    alpha_eq, and, exists, forall, imp, or, subst_one, Formula, Term,
};
use super::text::{parse_formula, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    A13,
    A14,
}

impl AxiomId {
    pub const ALL: [AxiomId; 14] = [
        AxiomId::A1,
        AxiomId::A2,
        AxiomId::A3,
        AxiomId::A4,
        AxiomId::A5,
        AxiomId::A6,
        AxiomId::A7,
        AxiomId::A8,
        AxiomId::A9,
        AxiomId::A10,
        AxiomId::A11,
        AxiomId::A12,
        AxiomId::A13,
        AxiomId::A14,
    ];
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for AxiomId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| format!("unknown axiom {s:?}"))
    }
}

/// Schema id plus instantiation data. Which fields are used depends on the
/// schema: `a`, `b`, `c` are the schematic formulas, `var` is the bound
/// variable (`y` in A11/A12, `x` in A13/A14) and `term` the substituted term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomInstance {
    pub id: AxiomId,
    pub a: Option<Formula>,
    pub b: Option<Formula>,
    pub c: Option<Formula>,
    pub var: Option<String>,
    pub term: Option<Term>,
}

impl AxiomInstance {
    pub fn new(id: AxiomId) -> Self {
        AxiomInstance { id, a: None, b: None, c: None, var: None, term: None }
    }
    pub fn a(mut self, f: Formula) -> Self {
        self.a = Some(f);
        self
    }
    pub fn b(mut self, f: Formula) -> Self {
        self.b = Some(f);
        self
    }
    pub fn c(mut self, f: Formula) -> Self {
        self.c = Some(f);
        self
    }
    pub fn var(mut self, x: &str) -> Self {
        self.var = Some(x.to_string());
        self
    }
    pub fn term(mut self, t: Term) -> Self {
        self.term = Some(t);
        self
    }

    fn need<'a, T>(&self, v: &'a Option<T>, what: &str) -> Result<&'a T, String> {
        v.as_ref().ok_or_else(|| format!("{} instance is missing {what}", self.id))
    }

    /// The instantiated axiom, after checking side conditions.
    pub fn formula(&self) -> Result<Formula, String> {
        use AxiomId::*;
        let a = || self.need(&self.a, "A").cloned();
        let b = || self.need(&self.b, "B").cloned();
        let c = || self.need(&self.c, "C").cloned();
        Ok(match self.id {
            A1 => Formula::Top,
            A2 => imp(a()?, imp(b()?, a()?)),
            A3 => imp(
                imp(a()?, imp(b()?, c()?)),
                imp(imp(a()?, b()?), imp(a()?, c()?)),
            ),
            A4 => imp(a()?, imp(b()?, and(a()?, b()?))),
            A5 => imp(and(a()?, b()?), a()?),
            A6 => imp(and(a()?, b()?), b()?),
            A7 => imp(
                imp(a()?, c()?),
                imp(imp(b()?, c()?), imp(or(a()?, b()?), c()?)),
            ),
            A8 => imp(a()?, or(a()?, b()?)),
            A9 => imp(b()?, or(a()?, b()?)),
            A10 => imp(Formula::Bottom, a()?),
            A11 | A12 => {
                let y = self.need(&self.var, "y")?;
                let t = self.need(&self.term, "t")?;
                let body = a()?;
                let inst = subst_one(&body, t, y);
                if self.id == A11 {
                    imp(forall(y, body), inst)
                } else {
                    imp(inst, exists(y, body))
                }
            }
            A13 | A14 => {
                let x = self.need(&self.var, "x")?;
                let bf = b()?;
                if bf.is_free(x) {
                    return Err(format!("{}: {x} is free in B", self.id));
                }
                if self.id == A13 {
                    imp(forall(x, imp(bf.clone(), a()?)), imp(bf, forall(x, a()?)))
                } else {
                    imp(forall(x, imp(a()?, bf.clone())), imp(exists(x, a()?), bf))
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(AxiomInstance),
    /// `(antecedent step, implication step)`, 0-based.
    Mp(usize, usize),
    Gen(usize, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CheckResult {
    Valid,
    Invalid { step: usize, reason: String },
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckResult::Valid)
    }
}

/// Validate every step; reports the first offending one.
pub fn check_derivation(d: &Derivation) -> CheckResult {
    if d.steps.is_empty() {
        return CheckResult::Invalid { step: 0, reason: "empty derivation".into() };
    }
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    for (i, step) in d.steps.iter().enumerate() {
        let bad = |reason: String| CheckResult::Invalid { step: i, reason };
        for (p, n) in step.formula.predicates() {
            match arities.get(&p) {
                Some(&m) if m != n => {
                    return bad(format!("predicate {p} used at arities {m} and {n}"))
                }
                _ => {
                    arities.insert(p, n);
                }
            }
        }
        let cite = |j: usize| -> Result<&Formula, String> {
            if j < i {
                Ok(&d.steps[j].formula)
            } else {
                Err(format!("cites step {j}, which does not precede step {i}"))
            }
        };
        let verdict: Result<(), String> = match &step.by {
            Justification::Axiom(inst) => inst.formula().and_then(|f| {
                if alpha_eq(&f, &step.formula) {
                    Ok(())
                } else {
                    Err(format!("formula is not the {} instance {f}", inst.id))
                }
            }),
            Justification::Mp(a, b) => cite(*a).and_then(|fa| {
                let fb = cite(*b)?;
                match fb {
                    Formula::Imp(l, r) if alpha_eq(l, fa) && alpha_eq(r, &step.formula) => Ok(()),
                    Formula::Imp(l, _) if !alpha_eq(l, fa) => {
                        Err(format!("antecedent of step {b} does not match step {a}"))
                    }
                    Formula::Imp(..) => Err(format!("consequent of step {b} is not this formula")),
                    _ => Err(format!("step {b} is not an implication")),
                }
            }),
            Justification::Gen(a, x) => cite(*a).and_then(|fa| {
                if alpha_eq(&forall(x, fa.clone()), &step.formula) {
                    Ok(())
                } else {
                    Err(format!("formula is not forall {x} over step {a}"))
                }
            }),
        };
        if let Err(reason) = verdict {
            return bad(reason);
        }
    }
    CheckResult::Valid
}

// JSON form.

#[derive(Serialize, Deserialize)]
struct RawDerivation {
    steps: Vec<RawStep>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    formula: String,
    by: RawBy,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawBy {
    Mp {
        mp: [usize; 2],
    },
    Gen {
        gen: (usize, String),
    },
    Axiom {
        axiom: String,
        #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
        a: Option<String>,
        #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
        b: Option<String>,
        #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
        c: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<serde_json::Value>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum DerivationFormatError {
    #[error("derivation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("step {step}: {source}")]
    Formula { step: usize, source: ParseError },
    #[error("step {step}: {message}")]
    Shape { step: usize, message: String },
}

fn parse_term(v: &serde_json::Value) -> Option<Term> {
    match v {
        serde_json::Value::Number(n) => n.as_u64().map(Term::Const),
        serde_json::Value::String(s) => {
            let s = s.trim();
            if let Ok(k) = s.parse::<u64>() {
                Some(Term::Const(k))
            } else if s.starts_with(|c: char| c.is_ascii_lowercase() || c == '_') {
                Some(Term::Var(s.to_string()))
            } else {
                None
            }
        }
        _ => None,
    }
}

pub fn parse_derivation(text: &str) -> Result<Derivation, DerivationFormatError> {
    let raw: RawDerivation = serde_json::from_str(text)?;
    let mut steps = Vec::with_capacity(raw.steps.len());
    for (i, s) in raw.steps.into_iter().enumerate() {
        let formula = |t: &str| {
            parse_formula(t).map_err(|source| DerivationFormatError::Formula { step: i, source })
        };
        let opt = |t: Option<String>| t.map(|t| formula(&t)).transpose();
        let by = match s.by {
            RawBy::Mp { mp } => Justification::Mp(mp[0], mp[1]),
            RawBy::Gen { gen } => Justification::Gen(gen.0, gen.1),
            RawBy::Axiom { axiom, a, b, c, y, x, t } => {
                let id = axiom
                    .parse()
                    .map_err(|message| DerivationFormatError::Shape { step: i, message })?;
                let term = match t {
                    None => None,
                    Some(v) => Some(parse_term(&v).ok_or_else(|| DerivationFormatError::Shape {
                        step: i,
                        message: format!("bad term {v}"),
                    })?),
                };
                Justification::Axiom(AxiomInstance {
                    id,
                    a: opt(a)?,
                    b: opt(b)?,
                    c: opt(c)?,
                    var: y.or(x),
                    term,
                })
            }
        };
        steps.push(Step { formula: formula(&s.formula)?, by });
    }
    Ok(Derivation { steps })
}

pub fn print_derivation(d: &Derivation) -> String {
    let steps = d
        .steps
        .iter()
        .map(|s| RawStep {
            formula: s.formula.to_string(),
            by: match &s.by {
                Justification::Mp(a, b) => RawBy::Mp { mp: [*a, *b] },
                Justification::Gen(a, x) => RawBy::Gen { gen: (*a, x.clone()) },
                Justification::Axiom(inst) => {
                    let (y, x) = match inst.id {
                        AxiomId::A11 | AxiomId::A12 => (inst.var.clone(), None),
                        _ => (None, inst.var.clone()),
                    };
                    RawBy::Axiom {
                        axiom: inst.id.to_string(),
                        a: inst.a.as_ref().map(|f| f.to_string()),
                        b: inst.b.as_ref().map(|f| f.to_string()),
                        c: inst.c.as_ref().map(|f| f.to_string()),
                        y,
                        x,
                        t: inst.term.as_ref().map(|t| serde_json::Value::String(t.to_string())),
                    }
                }
            },
        })
        .collect();
    serde_json::to_string_pretty(&RawDerivation { steps }).expect("serializable")
}
