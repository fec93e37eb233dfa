//! Terms, formulas, free variables, substitution and alpha-equivalence.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(u64),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bottom,
    Top,
    Atom(String, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

pub fn atom(p: &str, args: Vec<Term>) -> Formula {
    Formula::Atom(p.to_string(), args)
}
pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}
pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}
pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::Imp(Box::new(a), Box::new(b))
}
pub fn forall(x: &str, a: Formula) -> Formula {
    Formula::Forall(x.to_string(), Box::new(a))
}
pub fn exists(x: &str, a: Formula) -> Formula {
    Formula::Exists(x.to_string(), Box::new(a))
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        use Formula::*;
        match self {
            Bottom | Top => {}
            Atom(_, args) => {
                for t in args {
                    if let Term::Var(x) = t {
                        if !bound.contains(&x.as_str()) {
                            out.insert(x.clone());
                        }
                    }
                }
            }
            And(a, b) | Or(a, b) | Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Forall(x, a) | Exists(x, a) => {
                bound.push(x);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<String>) {
        use Formula::*;
        match self {
            Bottom | Top => {}
            Atom(_, args) => {
                for t in args {
                    if let Term::Var(x) = t {
                        out.insert(x.clone());
                    }
                }
            }
            And(a, b) | Or(a, b) | Imp(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Forall(x, a) | Exists(x, a) => {
                out.insert(x.clone());
                a.collect_all(out);
            }
        }
    }

    /// Constants occurring in the formula.
    pub fn constants(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, args| {
            for t in args {
                if let Term::Const(k) = t {
                    out.insert(*k);
                }
            }
        });
        out
    }

    /// Predicate symbols with the arities they are used at.
    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |p, args| {
            out.insert((p.to_string(), args.len()));
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&str, &[Term])) {
        use Formula::*;
        match self {
            Bottom | Top => {}
            Atom(p, args) => f(p, args),
            And(a, b) | Or(a, b) | Imp(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Forall(_, a) | Exists(_, a) => a.visit_atoms(f),
        }
    }

    /// Connective and quantifier count.
    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            Bottom | Top | Atom(..) => 0,
            And(a, b) | Or(a, b) | Imp(a, b) => 1 + a.depth().max(b.depth()),
            Forall(_, a) | Exists(_, a) => 1 + a.depth(),
        }
    }
}

/// `x` with its trailing digits removed, then the smallest numeric suffix
/// giving a name outside `avoid`.
pub fn fresh_name(x: &str, avoid: &BTreeSet<String>) -> String {
    let base = x.trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if base.is_empty() { "v" } else { base };
    (1u64..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !avoid.contains(c))
        .expect("unbounded suffixes")
}

/// Simultaneous capture-avoiding substitution `[t₁..tₙ / x₁..xₙ] A`. Bound
/// variables are renamed only where a substituted term would be captured.
pub fn substitute(a: &Formula, pairs: &[(Term, String)]) -> Formula {
    let map: BTreeMap<String, Term> = pairs.iter().map(|(t, x)| (x.clone(), t.clone())).collect();
    subst_map(a, &map)
}

pub fn subst_one(a: &Formula, t: &Term, x: &str) -> Formula {
    substitute(a, &[(t.clone(), x.to_string())])
}

fn subst_map(a: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    use Formula::*;
    if map.is_empty() {
        return a.clone();
    }
    match a {
        Bottom | Top => a.clone(),
        Atom(p, args) => Atom(
            p.clone(),
            args.iter()
                .map(|t| match t {
                    Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
                    c => c.clone(),
                })
                .collect(),
        ),
        And(l, r) => and(subst_map(l, map), subst_map(r, map)),
        Or(l, r) => or(subst_map(l, map), subst_map(r, map)),
        Imp(l, r) => imp(subst_map(l, map), subst_map(r, map)),
        Forall(x, body) | Exists(x, body) => {
            let mut inner = map.clone();
            inner.remove(x);
            let fv = body.free_vars();
            inner.retain(|y, _| fv.contains(y));
            let captured = inner.values().any(|t| matches!(t, Term::Var(v) if v == x));
            let (name, body) = if captured {
                let mut avoid = body.all_vars();
                for t in inner.values() {
                    if let Term::Var(v) = t {
                        avoid.insert(v.clone());
                    }
                }
                avoid.extend(inner.keys().cloned());
                let fresh = fresh_name(x, &avoid);
                inner.insert(x.clone(), Term::Var(fresh.clone()));
                (fresh, subst_map(body, &inner))
            } else {
                (x.clone(), subst_map(body, &inner))
            };
            match a {
                Forall(..) => Forall(name, Box::new(body)),
                _ => Exists(name, Box::new(body)),
            }
        }
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_eq_in(a, b, &mut Vec::new())
}

fn alpha_eq_in<'a>(a: &'a Formula, b: &'a Formula, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    use Formula::*;
    match (a, b) {
        (Bottom, Bottom) | (Top, Top) => true,
        (Atom(p, xs), Atom(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(s, t)| term_eq(s, t, env))
        }
        (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) | (Imp(a1, a2), Imp(b1, b2)) => {
            alpha_eq_in(a1, b1, env) && alpha_eq_in(a2, b2, env)
        }
        (Forall(x, a1), Forall(y, b1)) | (Exists(x, a1), Exists(y, b1)) => {
            env.push((x, y));
            let r = alpha_eq_in(a1, b1, env);
            env.pop();
            r
        }
        _ => false,
    }
}

fn term_eq(s: &Term, t: &Term, env: &[(&str, &str)]) -> bool {
    match (s, t) {
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::Var(x), Term::Var(y)) => {
            let lx = env.iter().rposition(|(l, _)| *l == x);
            let ly = env.iter().rposition(|(_, r)| *r == y);
            match (lx, ly) {
                (None, None) => x == y,
                (Some(i), Some(j)) => i == j,
                _ => false,
            }
        }
        _ => false,
    }
}

/// Rename every bound variable by binding depth (`_0`, `_1`, … shifted past
/// any free variable of that shape). Alpha-equivalent formulas map to the
/// same result; the map is idempotent.
pub fn alpha_canonicalize(a: &Formula) -> Formula {
    let fv = a.free_vars();
    let depth = binder_depth(a);
    let mut offset = 0usize;
    while (offset..offset + depth).any(|i| fv.contains(&format!("_{i}"))) {
        offset += 1;
    }
    canon(a, &mut Vec::new(), offset)
}

fn binder_depth(a: &Formula) -> usize {
    use Formula::*;
    match a {
        Bottom | Top | Atom(..) => 0,
        And(l, r) | Or(l, r) | Imp(l, r) => binder_depth(l).max(binder_depth(r)),
        Forall(_, b) | Exists(_, b) => 1 + binder_depth(b),
    }
}

fn canon(a: &Formula, env: &mut Vec<String>, offset: usize) -> Formula {
    use Formula::*;
    match a {
        Bottom | Top => a.clone(),
        Atom(p, args) => Atom(
            p.clone(),
            args.iter()
                .map(|t| match t {
                    Term::Var(x) => match env.iter().rposition(|b| b == x) {
                        Some(i) => Term::Var(format!("_{}", i + offset)),
                        None => t.clone(),
                    },
                    c => c.clone(),
                })
                .collect(),
        ),
        And(l, r) => and(canon(l, env, offset), canon(r, env, offset)),
        Or(l, r) => or(canon(l, env, offset), canon(r, env, offset)),
        Imp(l, r) => imp(canon(l, env, offset), canon(r, env, offset)),
        Forall(x, b) | Exists(x, b) => {
            let name = format!("_{}", env.len() + offset);
            env.push(x.clone());
            let body = canon(b, env, offset);
            env.pop();
            match a {
                Forall(..) => Forall(name, Box::new(body)),
                _ => Exists(name, Box::new(body)),
            }
        }
    }
}

/// The view of an implication or universal used by the realizability
/// clauses: a maximal block of universally quantified variables over an
/// implication. Bodies that are not implications are read as `⊤ → body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub vars: Vec<String>,
    pub antecedent: Formula,
    pub consequent: Formula,
    pub wrapped: bool,
}

impl Block {
    /// Antecedent and consequent at the given values of the block variables.
    pub fn instantiate(&self, values: &[u64]) -> (Formula, Formula) {
        let map: BTreeMap<String, Term> = self
            .vars
            .iter()
            .zip(values)
            .map(|(x, v)| (x.clone(), Term::Const(*v)))
            .collect();
        (subst_map(&self.antecedent, &map), subst_map(&self.consequent, &map))
    }
}

/// `None` unless `a` is an implication or a universal.
pub fn canonicalize_blocks(a: &Formula) -> Option<Block> {
    match a {
        Formula::Imp(l, r) => Some(Block {
            vars: Vec::new(),
            antecedent: (**l).clone(),
            consequent: (**r).clone(),
            wrapped: false,
        }),
        Formula::Forall(..) => {
            let mut vars = Vec::new();
            let mut cur = a;
            while let Formula::Forall(x, b) = cur {
                vars.push(x.clone());
                cur = b;
            }
            Some(match cur {
                Formula::Imp(l, r) => Block {
                    vars,
                    antecedent: (**l).clone(),
                    consequent: (**r).clone(),
                    wrapped: false,
                },
                body => Block {
                    vars,
                    antecedent: Formula::Top,
                    consequent: body.clone(),
                    wrapped: true,
                },
            })
        }
        _ => None,
    }
}
