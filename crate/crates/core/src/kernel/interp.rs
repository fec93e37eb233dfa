//! Fuel-bounded evaluator. Uses an explicit work stack so deeply nested or
//! long-running programs never touch the native call stack.

use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::ast::{decode, Prog, ProgramAst};
use super::code;
use super::ModelId;
use crate::nat::{self, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalOutcome {
    Converged(Nat),
    OutOfFuel,
    Diverged,
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            EvalOutcome::Converged(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, EvalOutcome::Converged(_))
    }
}

type Env = Rc<[Nat]>;

enum Work {
    Eval(Prog, Env),
    Pair,
    Fst,
    Snd,
    Succ,
    Smn(u64),
    ConstCode,
    CodePair,
    Branch(Prog, Prog, Env),
    Call(Prog, usize),
    Apply,
}

/// An evaluator for one model with a cache of decoded programs.
pub struct Interpreter {
    model: ModelId,
    cache: HashMap<Nat, Prog>,
}

const CACHE_LIMIT: usize = 1 << 16;

impl Interpreter {
    pub fn new(model: ModelId) -> Self {
        Interpreter { model, cache: HashMap::new() }
    }

    pub fn model(&self) -> ModelId {
        self.model
    }

    pub fn decode(&mut self, code: &Nat) -> Prog {
        if let Some(p) = self.cache.get(code) {
            return p.clone();
        }
        let p = decode(code, self.model);
        if self.cache.len() >= CACHE_LIMIT {
            self.cache.clear();
        }
        self.cache.insert(code.clone(), p.clone());
        p
    }

    /// `φ_code(args)` within `fuel` node entries.
    pub fn eval(&mut self, code: &Nat, args: &[Nat], fuel: u64) -> EvalOutcome {
        let prog = self.decode(code);
        self.run(&prog, args, fuel)
    }

    /// Run a program directly.
    pub fn run(&mut self, prog: &Prog, args: &[Nat], fuel: u64) -> EvalOutcome {
        let mut fuel = fuel;
        self.run_metered(prog, args, &mut fuel)
    }

    /// Like [`Interpreter::eval`], leaving the unspent budget in `fuel`.
    pub fn eval_metered(&mut self, code: &Nat, args: &[Nat], fuel: &mut u64) -> EvalOutcome {
        let prog = self.decode(code);
        self.run_metered(&prog, args, fuel)
    }

    pub fn run_metered(&mut self, prog: &Prog, args: &[Nat], fuel: &mut u64) -> EvalOutcome {
        let mut work = vec![Work::Eval(prog.clone(), Rc::from(args))];
        let mut vals: Vec<Nat> = Vec::new();
        while let Some(w) = work.pop() {
            match w {
                Work::Eval(p, env) => {
                    if *fuel == 0 {
                        return EvalOutcome::OutOfFuel;
                    }
                    *fuel -= 1;
                    match &*p {
                        ProgramAst::Proj(i) => {
                            let v = usize::try_from(*i)
                                .ok()
                                .and_then(|i| i.checked_sub(1))
                                .and_then(|i| env.get(i));
                            match (v, self.model) {
                                (Some(v), _) => vals.push(v.clone()),
                                (None, ModelId::Urec) => return EvalOutcome::Diverged,
                                (None, ModelId::Total) => vals.push(Nat::ZERO),
                            }
                        }
                        ProgramAst::Lit(k) => vals.push(k.clone()),
                        ProgramAst::Pair(a, b) => {
                            work.push(Work::Pair);
                            work.push(Work::Eval(b.clone(), env.clone()));
                            work.push(Work::Eval(a.clone(), env));
                        }
                        ProgramAst::Fst(a) => {
                            work.push(Work::Fst);
                            work.push(Work::Eval(a.clone(), env));
                        }
                        ProgramAst::Snd(a) => {
                            work.push(Work::Snd);
                            work.push(Work::Eval(a.clone(), env));
                        }
                        ProgramAst::Succ(a) => {
                            work.push(Work::Succ);
                            work.push(Work::Eval(a.clone(), env));
                        }
                        ProgramAst::Comp(f, args) => {
                            work.push(Work::Call(f.clone(), args.len()));
                            for a in args.iter().rev() {
                                work.push(Work::Eval(a.clone(), env.clone()));
                            }
                        }
                        ProgramAst::If0(c, t, e) => {
                            work.push(Work::Branch(t.clone(), e.clone(), env.clone()));
                            work.push(Work::Eval(c.clone(), env));
                        }
                        ProgramAst::SmnCode(n, a, b) => {
                            // building n projection codes is charged as n extra nodes
                            if *fuel < *n {
                                return EvalOutcome::OutOfFuel;
                            }
                            *fuel -= *n;
                            work.push(Work::Smn(*n));
                            work.push(Work::Eval(b.clone(), env.clone()));
                            work.push(Work::Eval(a.clone(), env));
                        }
                        ProgramAst::ConstCode(a) => {
                            work.push(Work::ConstCode);
                            work.push(Work::Eval(a.clone(), env));
                        }
                        ProgramAst::Apply(a, b) => match self.model {
                            ModelId::Urec => {
                                work.push(Work::Apply);
                                work.push(Work::Eval(b.clone(), env.clone()));
                                work.push(Work::Eval(a.clone(), env));
                            }
                            ModelId::Total => vals.push(Nat::ZERO),
                        },
                        ProgramAst::CodePair(a, b) => {
                            work.push(Work::CodePair);
                            work.push(Work::Eval(b.clone(), env.clone()));
                            work.push(Work::Eval(a.clone(), env));
                        }
                    }
                }
                Work::Pair => {
                    let b = vals.pop().expect("operand");
                    let a = vals.pop().expect("operand");
                    vals.push(nat::pair(&a, &b));
                }
                Work::Fst => {
                    let a = vals.pop().expect("operand");
                    vals.push(nat::proj1(&a));
                }
                Work::Snd => {
                    let a = vals.pop().expect("operand");
                    vals.push(nat::proj2(&a));
                }
                Work::Succ => {
                    let a = vals.pop().expect("operand");
                    vals.push(a.succ());
                }
                Work::Smn(n) => {
                    let k = vals.pop().expect("operand");
                    let f = vals.pop().expect("operand");
                    vals.push(code::specialize_last(&f, n, &k));
                }
                Work::ConstCode => {
                    let a = vals.pop().expect("operand");
                    vals.push(code::lit(&a));
                }
                Work::CodePair => {
                    let b = vals.pop().expect("operand");
                    let a = vals.pop().expect("operand");
                    vals.push(code::code_pair(&a, &b));
                }
                Work::Branch(t, e, env) => {
                    let c = vals.pop().expect("operand");
                    let next = if c.is_zero() { t } else { e };
                    work.push(Work::Eval(next, env));
                }
                Work::Call(f, n) => {
                    let at = vals.len() - n;
                    let env: Env = Rc::from(vals.split_off(at));
                    work.push(Work::Eval(f, env));
                }
                Work::Apply => {
                    let a = vals.pop().expect("operand");
                    let e = vals.pop().expect("operand");
                    let callee = self.decode(&e);
                    work.push(Work::Eval(callee, Rc::from(vec![a])));
                }
            }
        }
        EvalOutcome::Converged(vals.pop().expect("result"))
    }
}

/// `φ_code(args)` in `model` within `fuel`.
pub fn eval(model: ModelId, code: &Nat, args: &[Nat], fuel: u64) -> EvalOutcome {
    Interpreter::new(model).eval(code, args, fuel)
}
