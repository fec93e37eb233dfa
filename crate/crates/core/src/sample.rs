//! Seeded random programs, formulas, evaluations and axiom instances for
//! property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::ast::{self, Prog};
use crate::kernel::ModelId;
use crate::logic::syntax::{and, atom, exists, forall, imp, or};
use crate::logic::{AxiomId, AxiomInstance, Formula, Term};
use crate::nat::Nat;
use crate::realizability::{Evaluation, RealizerSet};

/// Predicate symbols used by generated formulas, with arities.
pub const PREDICATES: [(&str, usize); 4] = [("P", 1), ("Q", 1), ("R", 2), ("S", 0)];

pub struct Sampler {
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, Copy)]
pub struct FormulaShape {
    pub depth: u32,
    pub implications: bool,
    pub quantifiers: bool,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A random program expecting `arity` arguments. TOTAL programs never
    /// contain `Apply`.
    pub fn program(&mut self, arity: u64, depth: u32, model: ModelId) -> Prog {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.leaf(arity);
        }
        let d = depth - 1;
        let kinds = if model == ModelId::Urec { 10 } else { 9 };
        match self.rng.gen_range(0..kinds) {
            0 => ast::pair(self.program(arity, d, model), self.program(arity, d, model)),
            1 => ast::fst(self.program(arity, d, model)),
            2 => ast::snd(self.program(arity, d, model)),
            3 => ast::succ(self.program(arity, d, model)),
            4 => ast::if0(
                self.program(arity, d, model),
                self.program(arity, d, model),
                self.program(arity, d, model),
            ),
            5 => {
                let k = self.rng.gen_range(0..=3);
                let f = self.program(k, d, model);
                let args = (0..k).map(|_| self.program(arity, d, model)).collect();
                ast::comp(f, args)
            }
            6 => {
                let n = self.rng.gen_range(0..=3);
                ast::smn_code(n, self.program(arity, d, model), self.program(arity, d, model))
            }
            7 => ast::const_code(self.program(arity, d, model)),
            8 => ast::codepair(self.program(arity, d, model), self.program(arity, d, model)),
            _ => ast::apply(self.program(arity, d, model), self.program(arity, d, model)),
        }
    }

    fn leaf(&mut self, arity: u64) -> Prog {
        if arity > 0 && self.rng.gen_bool(0.7) {
            ast::proj(self.rng.gen_range(1..=arity))
        } else {
            ast::lit(self.rng.gen_range(0..16u64))
        }
    }

    pub fn nat(&mut self, below: u64) -> Nat {
        Nat::from(self.rng.gen_range(0..below))
    }

    fn term(&mut self, vars: &[String], consts: &[u64]) -> Term {
        let use_const = vars.is_empty() || (!consts.is_empty() && self.rng.gen_bool(0.2));
        if use_const && !consts.is_empty() {
            Term::Const(*consts.choose(&mut self.rng).expect("nonempty"))
        } else if vars.is_empty() {
            Term::Const(0)
        } else {
            Term::Var(vars.choose(&mut self.rng).expect("nonempty").clone())
        }
    }

    /// An atom over the given variables and constants. With neither, only
    /// the 0-ary predicate is available.
    pub fn atom(&mut self, vars: &[String], consts: &[u64]) -> Formula {
        if vars.is_empty() && consts.is_empty() {
            return atom("S", vec![]);
        }
        let (p, n) = *PREDICATES.choose(&mut self.rng).expect("nonempty");
        atom(p, (0..n).map(|_| self.term(vars, consts)).collect())
    }

    /// A formula whose free variables are among `vars`.
    pub fn formula(&mut self, vars: &[String], consts: &[u64], shape: FormulaShape) -> Formula {
        if shape.depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..20) {
                0 => Formula::Top,
                1 if shape.implications => Formula::Bottom,
                _ => self.atom(vars, consts),
            };
        }
        let sub = FormulaShape { depth: shape.depth - 1, ..shape };
        let kinds = 3 + if shape.implications { 1 } else { 0 } + if shape.quantifiers { 2 } else { 0 };
        let pick = self.rng.gen_range(0..kinds);
        match pick {
            0 => and(self.formula(vars, consts, sub), self.formula(vars, consts, sub)),
            1 => or(self.formula(vars, consts, sub), self.formula(vars, consts, sub)),
            2 => {
                let x = self.bound_name(vars);
                let mut inner = vars.to_vec();
                inner.push(x.clone());
                exists(&x, self.formula(&inner, consts, sub))
            }
            3 if shape.implications => imp(self.formula(vars, consts, sub), self.formula(vars, consts, sub)),
            _ => {
                let x = self.bound_name(vars);
                let mut inner = vars.to_vec();
                inner.push(x.clone());
                if shape.quantifiers {
                    forall(&x, self.formula(&inner, consts, sub))
                } else {
                    exists(&x, self.formula(&inner, consts, sub))
                }
            }
        }
    }

    fn bound_name(&mut self, vars: &[String]) -> String {
        // occasionally reuse a name to exercise shadowing
        if !vars.is_empty() && self.rng.gen_bool(0.2) {
            vars.choose(&mut self.rng).expect("nonempty").clone()
        } else {
            ["u", "v", "w"].choose(&mut self.rng).expect("nonempty").to_string()
        }
    }

    /// A domain of 1 to `max_size` distinct small numbers.
    pub fn domain(&mut self, max_size: usize) -> Vec<u64> {
        let n = self.rng.gen_range(1..=max_size);
        let mut pool: Vec<u64> = (0..8).collect();
        pool.shuffle(&mut self.rng);
        let mut d = pool[..n].to_vec();
        d.sort_unstable();
        d
    }

    /// Finite realizer sets of up to three members drawn from
    /// `0..=max_realizer` for every atom of [`PREDICATES`] over the domain.
    pub fn evaluation(&mut self, domain: &[u64], max_realizer: u64) -> Evaluation {
        self.evaluation_for(PREDICATES.iter().map(|&(p, n)| (p.to_string(), n)), domain, max_realizer)
    }

    /// As [`Sampler::evaluation`], for the given predicate symbols.
    pub fn evaluation_for(
        &mut self,
        preds: impl IntoIterator<Item = (String, usize)>,
        domain: &[u64],
        max_realizer: u64,
    ) -> Evaluation {
        let mut ev = Evaluation::new(domain.iter().copied());
        for (p, n) in preds {
            for args in crate::realizability::tuples(domain, n) {
                let k = self.rng.gen_range(0..=3);
                let set = (0..k).map(|_| self.nat(max_realizer + 1)).collect();
                ev.set(&p, args, RealizerSet::Finite(set));
            }
        }
        ev
    }

    /// A random instance of schema `id` whose free variables are among
    /// `vars`.
    pub fn axiom_instance(&mut self, id: AxiomId, vars: &[String], consts: &[u64], shape: FormulaShape) -> AxiomInstance {
        use AxiomId::*;
        let mut inst = AxiomInstance::new(id);
        match id {
            A1 => {}
            A11 | A12 | A13 | A14 => {
                let y = ["y", "x", "v"].choose(&mut self.rng).expect("nonempty").to_string();
                let mut inner: Vec<String> = vars.iter().filter(|v| **v != y).cloned().collect();
                let outer = inner.clone();
                inner.push(y.clone());
                inst = inst.var(&y).a(self.formula(&inner, consts, shape));
                if matches!(id, A11 | A12) {
                    let t = self.term(vars, consts);
                    inst = inst.term(t);
                } else {
                    inst = inst.b(self.formula(&outer, consts, shape));
                }
            }
            _ => {
                inst = inst.a(self.formula(vars, consts, shape));
                if !matches!(id, A10) {
                    inst = inst.b(self.formula(vars, consts, shape));
                }
                if matches!(id, A3 | A7) {
                    inst = inst.c(self.formula(vars, consts, shape));
                }
            }
        }
        inst
    }
}
