//! Randomized invariants. Each case draws a seed and builds its inputs with
//! the crate's sampler, so failures shrink to a reproducible seed.

use proptest::prelude::*;
use rand::Rng;

use vreal::extraction::{self, axiom_context, axiom_realizer, verify_with};
use vreal::harness;
use vreal::kernel::{self, ast, EvalOutcome, Interpreter, ModelId};
use vreal::logic::syntax::{alpha_canonicalize, alpha_eq, forall, subst_one};
use vreal::logic::{AxiomId, Term};
use vreal::nat::{self, Nat};
use vreal::realizability::{realizes_prime, CheckConfig, Checker, RealizerSet, Verdict};
use vreal::sample::{FormulaShape, Sampler};

const SHAPE: FormulaShape = FormulaShape { depth: 3, implications: true, quantifiers: true };

fn cfg(fuel: u64, bound: u64) -> CheckConfig {
    CheckConfig { fuel, candidate_bound: bound, model: ModelId::Urec }
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn any_axiom() -> impl Strategy<Value = AxiomId> {
    (0..AxiomId::ALL.len()).prop_map(|i| AxiomId::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_round_trips(a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (Nat::from(a), Nat::from(b));
        let p = nat::pair(&a, &b);
        prop_assert_eq!(nat::unpair(&p), (a, b));
    }

    #[test]
    fn fuel_is_monotone(seed in any::<u64>(), fuel in 1u64..2000, extra in 0u64..5000) {
        let mut s = Sampler::new(seed);
        let p = ast::encode(&s.program(2, 5, ModelId::Urec));
        let args = [s.nat(64), s.nat(64)];
        let small = kernel::eval(ModelId::Urec, &p, &args, fuel);
        let large = kernel::eval(ModelId::Urec, &p, &args, fuel + extra);
        if small.is_converged() {
            prop_assert_eq!(small, large);
        }
    }

    #[test]
    fn evaluation_is_deterministic(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let p = ast::encode(&s.program(2, 5, ModelId::Urec));
        let args = [s.nat(64), s.nat(64)];
        let once = kernel::eval(ModelId::Urec, &p, &args, 3000);
        prop_assert_eq!(&once, &Interpreter::new(ModelId::Urec).eval(&p, &args, 3000));
        prop_assert_eq!(once, kernel::eval(ModelId::Urec, &p, &args, 3000));
    }

    #[test]
    fn total_programs_halt_within_ten_steps_per_node(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let p = s.program(2, 6, ModelId::Total);
        let args = [s.nat(64), s.nat(64)];
        let out = kernel::eval(ModelId::Total, &ast::encode(&p), &args, 10 * p.size());
        prop_assert!(out.is_converged(), "{} gave {:?}", p, out);
    }

    #[test]
    fn substitution_lemma(seed in any::<u64>(), t_var in any::<bool>()) {
        let mut s = Sampler::new(seed);
        let a = s.formula(&vars(&["x", "y"]), &[3], SHAPE);
        let t = if t_var { Term::var("u") } else { Term::Const(5) };
        let b = subst_one(&a, &t, "x");
        let mut expect = a.free_vars();
        if expect.remove("x") {
            if t_var {
                expect.insert("u".to_string());
            }
        }
        // a captured `u` would drop out of the free variables
        prop_assert_eq!(b.free_vars(), expect, "[{}/x]{} = {}", t, a, b);
    }

    #[test]
    fn alpha_canonicalization_is_idempotent(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let a = s.formula(&vars(&["x"]), &[1], SHAPE);
        let c = alpha_canonicalize(&a);
        prop_assert!(alpha_eq(&a, &c));
        prop_assert_eq!(alpha_canonicalize(&c), c);
    }

    #[test]
    fn checker_resources_never_flip_definite_verdicts(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let domain = s.domain(3);
        let a = s.formula(&[], &domain, FormulaShape { depth: 2, ..SHAPE });
        let ev = s.evaluation(&domain, 16);
        let e = if s.rng().gen_bool(0.5) { s.nat(300) } else { ast::encode(&s.program(1, 4, ModelId::Urec)) };
        let low = Checker::new(&ev, cfg(500, 8)).check(&e, &a).unwrap();
        let high = Checker::new(&ev, cfg(20_000, 32)).check(&e, &a).unwrap();
        let flipped = matches!(
            (&low, &high),
            (Verdict::Realizes, Verdict::Refuted { .. }) | (Verdict::Refuted { .. }, Verdict::Realizes)
        );
        prop_assert!(!flipped, "{}: {:?} then {:?}", a, low, high);
    }

    #[test]
    fn refutations_replay(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let domain = s.domain(3);
        let a = s.formula(&[], &domain, FormulaShape { depth: 2, ..SHAPE });
        let ev = s.evaluation(&domain, 16);
        let e = s.nat(300);
        let mut checker = Checker::new(&ev, cfg(5000, 16));
        if let Verdict::Refuted { witness } = checker.check(&e, &a).unwrap() {
            prop_assert!(checker.replay(&e, &a, &witness), "{} on {}: {:?}", e, a, witness);
        }
    }

    #[test]
    fn extracted_axiom_realizers_are_not_refuted(seed in any::<u64>(), id in any_axiom()) {
        let mut s = Sampler::new(seed);
        let domain = s.domain(3);
        let inst = s.axiom_instance(id, &vars(&["x"]), &domain, FormulaShape { depth: 1, ..SHAPE });
        let phi = inst.formula().unwrap();
        let zs = axiom_context(&inst, &phi);
        let psi = axiom_realizer(&inst, &zs, ModelId::Urec).unwrap();
        let ev = s.evaluation(&domain, 32);
        let v = verify_with(&mut Checker::new(&ev, cfg(100_000, 64)), &psi, &phi, &zs).unwrap();
        prop_assert!(!v.is_refuted(), "{}: {:?}", phi, v);
    }

    #[test]
    fn extraction_is_deterministic(seed in any::<u64>(), id in any_axiom()) {
        let mut s = Sampler::new(seed);
        let inst = s.axiom_instance(id, &vars(&["x", "y"]), &[1], SHAPE);
        let d = {
            let mut b = vreal::logic::DerivationBuilder::new();
            b.axiom(inst);
            b.finish()
        };
        let zs = extraction::derivation_vars(&d);
        let one = extraction::extract(&d, &zs, ModelId::Urec).unwrap();
        prop_assert_eq!(one.to_json(), extraction::extract(&d, &zs, ModelId::Urec).unwrap().to_json());
    }

    #[test]
    fn pointwise_and_uniform_realizers_convert_both_ways(seed in any::<u64>(), id in any_axiom()) {
        // ψ over [y] is a pointwise family for ∀y A; h makes it uniform and g
        // turns that back into a family
        let mut s = Sampler::new(seed);
        let domain = s.domain(3);
        let inst = s.axiom_instance(id, &vars(&["y"]), &domain, FormulaShape { depth: 1, ..SHAPE });
        let a = inst.formula().unwrap();
        prop_assume!(a.free_vars().iter().all(|v| v == "y"));
        let ys = vars(&["y"]);
        let family = axiom_realizer(&inst, &ys, ModelId::Urec).unwrap();
        let ev = s.evaluation(&domain, 32);
        let check = cfg(100_000, 64);
        let all_y = forall("y", a.clone());

        prop_assert!(!realizes_prime(&family, "y", &a, &ev, check).unwrap().is_refuted());
        let h = extraction::h_index(&a, ModelId::Urec).unwrap();
        let EvalOutcome::Converged(uniform) = kernel::eval(ModelId::Urec, &h, &[family], 100_000) else {
            return Err(TestCaseError::fail("h did not converge"));
        };
        let v = Checker::new(&ev, check).check(&uniform, &all_y).unwrap();
        prop_assert!(!v.is_refuted(), "h: {}: {:?}", all_y, v);
        let g = extraction::g_index(&a);
        let EvalOutcome::Converged(back) = kernel::eval(ModelId::Urec, &g, &[uniform], 100_000) else {
            return Err(TestCaseError::fail("g did not converge"));
        };
        let v = realizes_prime(&back, "y", &a, &ev, check).unwrap();
        prop_assert!(!v.is_refuted(), "g: {}: {:?}", all_y, v);
    }

    #[test]
    fn diagonalization_refutes_total_candidates(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = ast::encode(&s.program(2, 5, ModelId::Total));
        let cert = harness::diagonalize(&c).unwrap();
        prop_assert!(harness::replay(&cert));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn growing_the_slice_only_resolves_undetermined_entries(small in 1u64..8, grow in 1u64..8) {
        let lo = harness::theorem_evaluation(small);
        let hi = harness::theorem_evaluation(small + grow);
        for ((p, args), set) in &lo.atoms {
            if matches!(set, RealizerSet::All | RealizerSet::Empty) {
                prop_assert_eq!(set, hi.get(p, args), "{}{:?}", p, args);
            }
        }
    }
}
