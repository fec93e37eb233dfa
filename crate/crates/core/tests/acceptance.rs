//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured runtime and budget to stderr.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;

use vreal::extraction::{
    axiom_context, axiom_realizer, closed_realizer, derivation_vars, extract, verify_with,
};
use vreal::harness::{self, PipelineConfig};
use vreal::kernel::ast;
use vreal::kernel::{self, EvalOutcome, Interpreter, ModelId};
use vreal::logic::syntax::{and, subst_one};
use vreal::logic::{
    check_derivation, AxiomId, AxiomInstance, Derivation, DerivationBuilder, Formula, Justification,
    Term,
};
use vreal::nat::{self, Nat};
use vreal::realizability::{CheckConfig, Checker, Evaluation, RealizerSet};
use vreal::sample::{FormulaShape, Sampler};

const FUEL: u64 = 100_000;

fn criterion(id: u32, name: &str, budget: Duration, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = body();
    let took = start.elapsed();
    let timely = took <= budget;
    let (ok, detail) = match &outcome {
        Ok(d) => (timely, d.clone()),
        Err(d) => (false, d.clone()),
    };
    let line = format!(
        "[{}] criterion {id} {name}: {detail} ({:.2}s, budget {}s{})\n",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        budget.as_secs(),
        if timely { "" } else { ", over budget" },
    );
    // written to the raw handle so the line shows without --nocapture
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {detail}");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn urec(code: &Nat, args: &[Nat], fuel: u64) -> EvalOutcome {
    kernel::eval(ModelId::Urec, code, args, fuel)
}

/// Kleene equality of two computations given as fuel-indexed runs: whenever
/// one side converges within `fuel`, the other converges to the same value
/// within a larger budget, and a definite divergence is never matched by a
/// value.
fn kleene(l: impl Fn(u64) -> EvalOutcome, r: impl Fn(u64) -> EvalOutcome, fuel: u64) -> Result<bool, String> {
    let big = 8 * fuel + 100;
    let (ls, rs) = (l(fuel), r(fuel));
    for (side, small, other) in [("left", &ls, r(big)), ("right", &rs, l(big))] {
        match (small, &other) {
            (EvalOutcome::Converged(a), EvalOutcome::Converged(b)) if a == b => {}
            (EvalOutcome::Converged(_), _) => return Err(format!("{side} gave {small:?}, other side {other:?}")),
            (EvalOutcome::Diverged, EvalOutcome::Converged(_)) => {
                return Err(format!("{side} diverged, other side {other:?}"))
            }
            _ => {}
        }
    }
    Ok(ls.is_converged() || rs.is_converged())
}

fn args_of(s: &mut Sampler, n: u64) -> Vec<Nat> {
    (0..n).map(|_| s.nat(50)).collect()
}

/// Runs a composed oracle: inner calls first, then the outer one.
fn compose_oracle(e: &Nat, es: &[Nat], xs: &[Nat], fuel: u64) -> EvalOutcome {
    let mut vals = Vec::new();
    for ei in es {
        match urec(ei, xs, fuel) {
            EvalOutcome::Converged(v) => vals.push(v),
            other => return other,
        }
    }
    urec(e, &vals, fuel)
}

#[test]
fn criterion_1_kernel_laws() {
    criterion(1, "kernel laws", Duration::from_secs(10), || {
        for a in 0..1000u64 {
            for b in 0..1000u64 {
                let p = nat::pair_u64(a, b);
                let s = a + b;
                let expect = s * (s + 1) / 2 + a;
                ensure(p == expect, || format!("pair({a},{b}) = {p}, expected {expect}"))?;
                ensure(nat::unpair(&p) == (a.into(), b.into()), || format!("unpair(pair({a},{b}))"))?;
            }
        }
        for n in 0..100_000u64 {
            let (a, b) = nat::unpair(&n.into());
            ensure(nat::pair(&a, &b) == n, || format!("pair(unpair({n}))"))?;
        }

        let mut s = Sampler::new(11);
        let prog = |s: &mut Sampler, arity: u64| ast::encode(&s.program(arity, 4, ModelId::Urec));
        let mut laws: Vec<(&str, usize)> = Vec::new();
        let samples = 120;

        let mut defined = 0;
        for _ in 0..samples {
            let m = s.rng().gen_range(1..=3u64);
            let k = s.rng().gen_range(0..=3usize);
            let e = prog(&mut s, k as u64);
            let es: Vec<Nat> = (0..k).map(|_| prog(&mut s, m)).collect();
            let c = kernel::compose_index(&e, &es, &vec![m; k]);
            let xs = args_of(&mut s, m);
            defined += kleene(|f| urec(&c, &xs, f), |f| compose_oracle(&e, &es, &xs, f), 2000)? as usize;
        }
        laws.push(("Cm", defined));

        let mut defined = 0;
        for _ in 0..samples {
            let k = s.nat(1000);
            let n = s.rng().gen_range(0..=3u64);
            let xs = args_of(&mut s, n);
            let c = kernel::const_index(&k);
            defined += kleene(|f| urec(&c, &xs, f), |_| EvalOutcome::Converged(k.clone()), 100)? as usize;
        }
        laws.push(("Cn", defined));

        let mut defined = 0;
        for _ in 0..samples {
            let n = s.rng().gen_range(0..=2u64);
            let (e1, e2) = (prog(&mut s, n), prog(&mut s, n));
            let c = kernel::cond_index(&e1, &e2, n);
            let xs = args_of(&mut s, n);
            let d = if s.rng().gen_bool(0.5) { Nat::ZERO } else { s.nat(10).succ() };
            let mut call = xs.clone();
            call.push(d.clone());
            let branch = if d.is_zero() { &e1 } else { &e2 };
            defined += kleene(|f| urec(&c, &call, f), |f| urec(branch, &xs, f), 2000)? as usize;
        }
        laws.push(("Cs", defined));

        let mut defined = 0;
        for _ in 0..samples {
            let n = s.rng().gen_range(0..=2u64);
            let (e1, e2) = (prog(&mut s, n + 1), prog(&mut s, n + 1));
            let c = kernel::cond_prime_index(&e1, &e2, n);
            let xs = args_of(&mut s, n);
            let tag = if s.rng().gen_bool(0.5) { 0 } else { s.rng().gen_range(1..5u64) };
            let v = s.nat(100);
            let mut call = xs.clone();
            call.push(nat::pair(&tag.into(), &v));
            let mut inner = xs.clone();
            inner.push(v);
            let branch = if tag == 0 { &e1 } else { &e2 };
            defined += kleene(|f| urec(&c, &call, f), |f| urec(branch, &inner, f), 2000)? as usize;
        }
        laws.push(("Cs'", defined));

        let mut defined = 0;
        for _ in 0..samples {
            let n = s.rng().gen_range(0..=2u64);
            let m = s.rng().gen_range(1..=2u64);
            let e = prog(&mut s, n + m);
            let ks = args_of(&mut s, m);
            let c = kernel::smn_index(&e, &ks, n);
            let xs = args_of(&mut s, n);
            let mut full = xs.clone();
            full.extend(ks.iter().cloned());
            defined += kleene(|f| urec(&c, &xs, f), |f| urec(&e, &full, f), 2000)? as usize;
            // the runtime opcode fixes the last argument the same way
            let k = ks.last().expect("m >= 1").clone();
            let fixed = ast::encode(&ast::smn_code(n + m - 1, ast::lit(e.clone()), ast::lit(k.clone())));
            let EvalOutcome::Converged(c2) = urec(&fixed, &[], 1000) else {
                return Err("SmnCode did not build a code".into());
            };
            let xs2: Vec<Nat> = full[..full.len() - 1].to_vec();
            kleene(|f| urec(&c2, &xs2, f), |f| urec(&e, &full, f), 2000)?;
        }
        laws.push(("SMN", defined));

        let mut defined = 0;
        for _ in 0..samples {
            let n = s.rng().gen_range(1..=4usize);
            let e = prog(&mut s, n as u64);
            let mut perm: Vec<u64> = (1..=n as u64).collect();
            rand::seq::SliceRandom::shuffle(&mut perm[..], s.rng());
            let c = kernel::permute_index(&e, &perm).map_err(|e| e.to_string())?;
            let xs = args_of(&mut s, n as u64);
            let permuted: Vec<Nat> = perm.iter().map(|&p| xs[p as usize - 1].clone()).collect();
            defined += kleene(|f| urec(&c, &xs, f), |f| urec(&e, &permuted, f), 2000)? as usize;
        }
        laws.push(("PV", defined));

        let mut defined = 0;
        for _ in 0..samples {
            let n = s.rng().gen_range(0..=3u64);
            let e = prog(&mut s, n);
            let c = kernel::dummy_index(&e, n);
            let xs = args_of(&mut s, n);
            let mut more = xs.clone();
            more.push(s.nat(1000));
            defined += kleene(|f| urec(&c, &more, f), |f| urec(&e, &xs, f), 2000)? as usize;
        }
        laws.push(("DV", defined));

        let mut checked = 0;
        let mut interp = Interpreter::new(ModelId::Urec);
        while checked < 500 {
            let n = s.rng().gen_range(0..=2u64);
            let p = prog(&mut s, n);
            let xs = args_of(&mut s, n);
            let f = s.rng().gen_range(1..200u64);
            let small = interp.eval(&p, &xs, f);
            if small == EvalOutcome::OutOfFuel {
                continue;
            }
            let large = interp.eval(&p, &xs, f + s.rng().gen_range(1..10_000u64));
            ensure(large == small, || format!("fuel monotonicity: {small:?} then {large:?}"))?;
            checked += 1;
        }

        let summary: Vec<String> = laws.iter().map(|(n, d)| format!("{n} {samples} ({d} defined)")).collect();
        Ok(format!("pairing ok; {}; fuel monotone on 500", summary.join(", ")))
    });
}

#[test]
fn criterion_2_overuniversal() {
    criterion(2, "overuniversal function", Duration::from_secs(10), || {
        let mut s = Sampler::new(22);
        let mut report = Vec::new();
        for n in 1..=3u64 {
            let u = kernel::overuniversal_index(ModelId::Urec, n).map_err(|e| e.to_string())?;
            let mut agreed = 0;
            while agreed < 100 {
                let e = ast::encode(&s.program(n, 4, ModelId::Urec));
                let xs = args_of(&mut s, n);
                let EvalOutcome::Converged(v) = urec(&e, &xs, 5000) else { continue };
                let mut call = vec![e.clone()];
                call.extend(xs.iter().cloned());
                let got = urec(&u, &call, 1_000_000);
                ensure(got == EvalOutcome::Converged(v.clone()), || {
                    format!("u^{n}({e}, {xs:?}) = {got:?}, direct {v}")
                })?;
                agreed += 1;
            }
            report.push(format!("n={n} {agreed}/100"));
        }
        Ok(report.join(", "))
    });
}

#[test]
fn criterion_3_axiom_soundness() {
    criterion(3, "extraction soundness for A1-A14", Duration::from_secs(120), || {
        let mut s = Sampler::new(33);
        let cfg = CheckConfig { fuel: FUEL, candidate_bound: 64, model: ModelId::Urec };
        let shape = FormulaShape { depth: 2, implications: true, quantifiers: true };
        let vars = vec!["x".to_string(), "y".to_string()];
        let (mut realizes, mut unknown, mut exact) = (0, 0, 0);
        for id in AxiomId::ALL {
            for _ in 0..50 {
                let domain = s.domain(4);
                let inst = s.axiom_instance(id, &vars, &domain, shape);
                let ev = s.evaluation(&domain, 32);
                let phi = inst.formula().map_err(|e| e.to_string())?;
                let zs = axiom_context(&inst, &phi);
                let psi = axiom_realizer(&inst, &zs, ModelId::Urec).map_err(|e| e.to_string())?;
                let mut checker = Checker::new(&ev, cfg);
                let v = verify_with(&mut checker, &psi, &phi, &zs).map_err(|e| e.to_string())?;
                ensure(!v.is_refuted(), || format!("{id} refuted: {phi} on {}: {v:?}", ev.to_json()))?;
                let enumerable = vreal::realizability::tuples(&domain, zs.len()).iter().all(|ds| {
                    let pairs: Vec<(Term, String)> =
                        ds.iter().zip(&zs).map(|(&d, z)| (Term::Const(d), z.clone())).collect();
                    checker.antecedents_enumerable(&vreal::logic::substitute(&phi, &pairs))
                });
                if enumerable {
                    exact += 1;
                    ensure(v.is_realizes(), || format!("{id} not exact on enumerable {phi}: {v:?}"))?;
                }
                if v.is_realizes() {
                    realizes += 1;
                } else {
                    unknown += 1;
                }
            }
        }
        Ok(format!(
            "700 instances, 0 refuted, {realizes} realizes, {unknown} unknown; {exact} fully enumerable all Realizes"
        ))
    });
}

/// An axiom whose formula is `x → Y` for the given `x`.
fn implication_from(s: &mut Sampler, x: &Formula, vars: &[String], consts: &[u64]) -> AxiomInstance {
    let shape = FormulaShape { depth: 1, implications: false, quantifiers: true };
    let b = s.formula(vars, consts, shape);
    match s.rng().gen_range(0..4) {
        0 => AxiomInstance::new(AxiomId::A2).a(x.clone()).b(b),
        1 => AxiomInstance::new(AxiomId::A4).a(x.clone()).b(b),
        2 => AxiomInstance::new(AxiomId::A8).a(x.clone()).b(b),
        _ => AxiomInstance::new(AxiomId::A9).a(b).b(x.clone()),
    }
}

fn verify_derivation(d: &Derivation, ev: &Evaluation) -> Result<vreal::realizability::Verdict, String> {
    let phi = d.conclusion().ok_or("empty derivation")?.clone();
    // the declared list covers variables that only premises mention
    let zs = derivation_vars(d);
    let r = extract(d, &zs, ModelId::Urec).map_err(|e| e.to_string())?;
    let cfg = CheckConfig { fuel: FUEL, candidate_bound: 64, model: ModelId::Urec };
    let mut checker = Checker::new(ev, cfg);
    verify_with(&mut checker, &r.psi_code(), &phi, &zs).map_err(|e| e.to_string())
}

#[test]
fn criterion_4_rule_soundness() {
    criterion(4, "MP and Gen preserve realizers", Duration::from_secs(60), || {
        let mut s = Sampler::new(44);
        let vars = vec!["x".to_string(), "y".to_string()];
        let shape = FormulaShape { depth: 1, implications: true, quantifiers: true };
        let mut realizes = 0;
        for _ in 0..50 {
            let domain = s.domain(3);
            let id = AxiomId::ALL[s.rng().gen_range(0..AxiomId::ALL.len())];
            let first = s.axiom_instance(id, &vars, &domain, shape);
            let mut b = DerivationBuilder::new();
            let i = b.axiom(first);
            let x = b.formula(i).clone();
            let j = b.axiom(implication_from(&mut s, &x, &vars, &domain));
            b.mp(i, j);
            let d = b.finish();
            ensure(check_derivation(&d).is_valid(), || "generated MP derivation is invalid".into())?;
            let ev = s.evaluation(&domain, 32);
            let v = verify_derivation(&d, &ev)?;
            ensure(!v.is_refuted(), || format!("MP refuted: {:?}: {v:?}", d.conclusion()))?;
            realizes += v.is_realizes() as usize;
        }
        for _ in 0..50 {
            let domain = s.domain(3);
            let id = AxiomId::ALL[s.rng().gen_range(0..AxiomId::ALL.len())];
            let inst = s.axiom_instance(id, &vars, &domain, shape);
            let mut b = DerivationBuilder::new();
            let i = b.axiom(inst);
            let y = if s.rng().gen_bool(0.5) { "x" } else { "y" };
            b.gen(i, y);
            let d = b.finish();
            let ev = s.evaluation(&domain, 32);
            let v = verify_derivation(&d, &ev)?;
            ensure(!v.is_refuted(), || format!("Gen refuted: {:?}: {v:?}", d.conclusion()))?;
            realizes += v.is_realizes() as usize;
        }
        Ok(format!("50 MP + 50 Gen, 0 refuted, {realizes} realizes"))
    });
}

fn fixtures() -> Vec<(&'static str, Derivation)> {
    let mut top = DerivationBuilder::new();
    top.axiom(AxiomInstance::new(AxiomId::A1));
    let mut id = DerivationBuilder::new();
    let i = id.identity(vreal::logic::parse_formula("P(y)").unwrap());
    id.gen(i, "y");
    vec![("top", top.finish()), ("forall-identity", id.finish()), ("formula5", harness::derivation5())]
}

#[test]
fn criterion_5_closed_realizers() {
    criterion(5, "closed realizers of fixtures", Duration::from_secs(30), || {
        let mut s = Sampler::new(55);
        let cfg = CheckConfig { fuel: FUEL, candidate_bound: 64, model: ModelId::Urec };
        let mut lines = Vec::new();
        for (name, d) in fixtures() {
            let phi = d.conclusion().expect("nonempty").clone();
            let e = closed_realizer(&d, ModelId::Urec, 10_000_000).map_err(|e| e.to_string())?;
            let mut realizes = 0;
            for _ in 0..10 {
                let domain = s.domain(4);
                let ev = s.evaluation_for(phi.predicates(), &domain, 32);
                let v = Checker::new(&ev, cfg).check(&e, &phi).map_err(|e| e.to_string())?;
                ensure(!v.is_refuted(), || format!("{name} refuted on {}: {v:?}", ev.to_json()))?;
                realizes += v.is_realizes() as usize;
            }
            lines.push(format!("{name} 10/10 non-refuted ({realizes} realizes)"));
        }
        Ok(lines.join(", "))
    });
}

#[test]
fn criterion_6_theorem_pipeline() {
    criterion(6, "overuniversal function from the formula's realizer", Duration::from_secs(60), || {
        let cfg = PipelineConfig { slice: 32, samples: 100, seed: 66, ..PipelineConfig::default() };
        let t = harness::run_pipeline(ModelId::Urec, &cfg).map_err(|e| e.to_string())?;
        ensure(t.derivation_valid, || "derivation invalid".into())?;
        ensure(!t.left_verdict.is_refuted(), || format!("left realizer refuted: {:?}", t.left_verdict))?;
        let bad: Vec<_> = t.samples.iter().filter(|s| !s.agrees()).collect();
        ensure(bad.is_empty(), || format!("{} disagreements, first {:?}", bad.len(), bad.first()))?;
        Ok(format!("u agrees on {}/{} pairs; left realizer non-refuted on slice 32", t.agreed, t.sampled))
    });
}

#[test]
fn criterion_7_diagonal() {
    criterion(7, "diagonal certificates for TOTAL", Duration::from_secs(10), || {
        let mut s = Sampler::new(77);
        for _ in 0..20 {
            let cand = ast::encode(&s.program(2, 5, ModelId::Total));
            let cert = harness::diagonalize(&cand).map_err(|e| e.to_string())?;
            ensure(cert.lhs != cert.rhs && harness::replay(&cert), || format!("bad certificate {cert:?}"))?;
        }
        Ok("20/20 certificates replayed".into())
    });
}

/// Cantor unpairing by integer square root, independent of the library.
fn unpair_oracle(z: u64) -> (u64, u64) {
    let w = (((8 * z as u128 + 1) as f64).sqrt() as u64 - 1) / 2;
    let w = (w.saturating_sub(2)..=w + 2).rev().find(|w| w * (w + 1) / 2 <= z).expect("root");
    let a = z - w * (w + 1) / 2;
    (a, w - a)
}

fn member(e: u64, a: &Formula, ev: &Evaluation) -> bool {
    match a {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(p, args) => {
            let vals: Vec<u64> = args.iter().map(|t| match t {
                Term::Const(k) => *k,
                Term::Var(_) => unreachable!("sentence"),
            }).collect();
            match ev.get(p, &vals) {
                RealizerSet::All => true,
                RealizerSet::Finite(s) => s.contains(&Nat::from(e)),
                _ => false,
            }
        }
        Formula::And(l, r) => {
            let (x, y) = unpair_oracle(e);
            member(x, l, ev) && member(y, r, ev)
        }
        Formula::Or(l, r) => match unpair_oracle(e) {
            (0, y) => member(y, l, ev),
            (1, y) => member(y, r, ev),
            _ => false,
        },
        Formula::Exists(x, body) => {
            let (w, y) = unpair_oracle(e);
            ev.domain.contains(&w) && member(y, &subst_one(body, &Term::Const(w), x), ev)
        }
        Formula::Imp(..) | Formula::Forall(..) => unreachable!("generated without"),
    }
}

#[test]
fn criterion_8_checker_oracle() {
    criterion(8, "checker agrees with brute force", Duration::from_secs(30), || {
        let mut s = Sampler::new(88);
        let shape = FormulaShape { depth: 3, implications: false, quantifiers: false };
        let cfg = CheckConfig::default();
        let mut members = 0;
        for _ in 0..50 {
            let domain = s.domain(4);
            let phi = s.formula(&[], &domain, shape);
            let ev = s.evaluation(&domain, 32);
            let mut checker = Checker::new(&ev, cfg);
            for e in 0..=256u64 {
                let got = checker.check(&e.into(), &phi).map_err(|e| e.to_string())?;
                let want = member(e, &phi, &ev);
                ensure(got.is_realizes() == want && (want || got.is_refuted()), || {
                    format!("e={e} on {phi}: checker {got:?}, brute force {want}")
                })?;
                members += want as usize;
            }
        }
        Ok(format!("50 pairs x 257 codes agree ({members} memberships)"))
    });
}

fn mutations(d: &Derivation) -> Vec<Derivation> {
    let mut out = Vec::new();
    for i in 0..d.steps.len() {
        let mut m = d.clone();
        m.steps[i].formula = and(m.steps[i].formula.clone(), Formula::Top);
        out.push(m);
        let forward = match &d.steps[i].by {
            Justification::Mp(_, b) => Some(Justification::Mp(i, *b)),
            Justification::Gen(_, x) => Some(Justification::Gen(i, x.clone())),
            Justification::Axiom(_) => None,
        };
        if let Some(j) = forward {
            let mut m = d.clone();
            m.steps[i].by = j;
            out.push(m);
        }
        if let Justification::Mp(a, b) = &d.steps[i].by {
            let mut m = d.clone();
            m.steps[i].by = Justification::Mp(*b, *a);
            out.push(m);
        }
    }
    out
}

#[test]
fn criterion_9_logic_layer() {
    criterion(9, "substitution lemma and proof checking", Duration::from_secs(10), || {
        let mut s = Sampler::new(99);
        let shape = FormulaShape { depth: 4, implications: true, quantifiers: true };
        let vars: Vec<String> = ["x", "y", "u", "v"].iter().map(|v| v.to_string()).collect();
        for _ in 0..500 {
            let a = s.formula(&vars, &[3], shape);
            let x = vars[s.rng().gen_range(0..vars.len())].clone();
            let t = if s.rng().gen_bool(0.3) {
                Term::Const(3)
            } else {
                Term::Var(vars[s.rng().gen_range(0..vars.len())].clone())
            };
            let b = subst_one(&a, &t, &x);
            let mut want = a.free_vars();
            if want.remove(&x) {
                if let Term::Var(y) = &t {
                    want.insert(y.clone());
                }
            }
            ensure(b.free_vars() == want, || format!("FV({a}[{t}/{x}]) = {:?}, want {want:?}", b.free_vars()))?;
        }
        let mut rejected = 0;
        for (name, d) in fixtures() {
            ensure(check_derivation(&d).is_valid(), || format!("fixture {name} rejected"))?;
            for m in mutations(&d) {
                ensure(!check_derivation(&m).is_valid(), || format!("mutation of {name} accepted"))?;
                rejected += 1;
            }
        }
        Ok(format!("500 substitutions; 3 fixtures valid; {rejected}/{rejected} mutations rejected"))
    });
}
