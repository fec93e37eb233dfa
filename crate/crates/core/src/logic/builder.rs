//! Incremental construction of derivations, with a few derived rules.

use super::derivation::{AxiomId, AxiomInstance, Derivation, Justification, Step};
use super::syntax::{forall, imp, Formula};

#[derive(Debug, Clone, Default)]
pub struct DerivationBuilder {
    steps: Vec<Step>,
}

fn split_imp(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::Imp(l, r) => ((**l).clone(), (**r).clone()),
        other => panic!("expected an implication, got {other}"),
    }
}

impl DerivationBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.steps[i].formula
    }

    fn push(&mut self, formula: Formula, by: Justification) -> usize {
        self.steps.push(Step { formula, by });
        self.steps.len() - 1
    }

    /// Panics when the instance is incomplete or violates a side condition.
    pub fn axiom(&mut self, inst: AxiomInstance) -> usize {
        let f = inst.formula().unwrap_or_else(|e| panic!("{e}"));
        self.push(f, Justification::Axiom(inst))
    }

    /// From `a: X` and `b: X → Y` derive `Y`.
    pub fn mp(&mut self, a: usize, b: usize) -> usize {
        let (_, y) = split_imp(self.formula(b));
        self.push(y, Justification::Mp(a, b))
    }

    pub fn gen(&mut self, a: usize, x: &str) -> usize {
        let f = forall(x, self.formula(a).clone());
        self.push(f, Justification::Gen(a, x.to_string()))
    }

    /// From `a: Z` derive `X → Z`.
    pub fn weaken(&mut self, a: usize, x: Formula) -> usize {
        let z = self.formula(a).clone();
        let ax = self.axiom(AxiomInstance::new(AxiomId::A2).a(z).b(x));
        self.mp(a, ax)
    }

    /// From `a: X → (Y → Z)` and `b: X → Y` derive `X → Z`.
    pub fn mp_under(&mut self, a: usize, b: usize) -> usize {
        let (x, yz) = split_imp(self.formula(a));
        let (y, z) = split_imp(&yz);
        let ax = self.axiom(AxiomInstance::new(AxiomId::A3).a(x).b(y).c(z));
        let t = self.mp(a, ax);
        self.mp(b, t)
    }

    /// From `a: X → Y` and `b: Y → Z` derive `X → Z`.
    pub fn hs(&mut self, a: usize, b: usize) -> usize {
        let (x, _) = split_imp(self.formula(a));
        let w = self.weaken(b, x);
        self.mp_under(w, a)
    }

    /// `A → A`.
    pub fn identity(&mut self, a: Formula) -> usize {
        let aa = imp(a.clone(), a.clone());
        let k1 = self.axiom(AxiomInstance::new(AxiomId::A2).a(a.clone()).b(aa));
        let k2 = self.axiom(AxiomInstance::new(AxiomId::A2).a(a.clone()).b(a));
        self.mp_under(k1, k2)
    }

    pub fn finish(self) -> Derivation {
        Derivation { steps: self.steps }
    }
}
