//! Index-producing closure witnesses.
//!
//! The `*_index` functions are host-level: they take codes and return codes.
//! The `quote_*` helpers build programs that construct codes at runtime, for
//! the places where an index has to be computed from a runtime value.

use super::ast::{self, Prog};
use super::code;
use super::{KernelError, ModelId};
use crate::nat::Nat;

/// `φ_c(x̄) ≃ φ_e(φ_{e1}(x₁..x_{m₁}), …)`.
pub fn compose_index(e: &Nat, es: &[Nat], arities: &[u64]) -> Nat {
    let inner: Vec<Nat> = es
        .iter()
        .zip(arities.iter().chain(std::iter::repeat(&0)))
        .map(|(ei, &mi)| code::comp(ei, &code::projs(mi)))
        .collect();
    code::comp(e, &inner)
}

/// `φ_c(…) ≃ k` at every arity.
pub fn const_index(k: &Nat) -> Nat {
    code::lit(k)
}

/// `φ(x̄, d) ≃ φ_{e1}(x̄)` if `d = 0`, else `φ_{e2}(x̄)`.
pub fn cond_index(e1: &Nat, e2: &Nat, n: u64) -> Nat {
    let xs = code::projs(n);
    code::if0(&code::proj(n + 1), &code::comp(e1, &xs), &code::comp(e2, &xs))
}

/// `φ(x̄, d) ≃ φ_{e1}(x̄, p₂d)` if `p₁d = 0`, else `φ_{e2}(x̄, p₂d)`.
pub fn cond_prime_index(e1: &Nat, e2: &Nat, n: u64) -> Nat {
    let d = code::proj(n + 1);
    let mut xs = code::projs(n);
    xs.push(code::snd(&d));
    code::if0(&code::fst(&d), &code::comp(e1, &xs), &code::comp(e2, &xs))
}

/// `φ_c(x₁..xₙ) ≃ φ_e(x₁..xₙ, k₁..k_m)`.
pub fn smn_index(e: &Nat, ks: &[Nat], n: u64) -> Nat {
    let mut args = code::projs(n);
    args.extend(ks.iter().map(code::lit));
    code::comp(e, &args)
}

/// `φ_c(x₁..xₙ) ≃ φ_e(x_{p(1)}..x_{p(n)})`.
pub fn permute_index(e: &Nat, perm: &[u64]) -> Result<Nat, KernelError> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        let ok = p >= 1 && (p as usize) <= n && !seen[p as usize - 1];
        if !ok {
            return Err(KernelError::BadPermutation { perm: perm.to_vec(), n });
        }
        seen[p as usize - 1] = true;
    }
    let args: Vec<Nat> = perm.iter().map(|&p| code::proj(p)).collect();
    Ok(code::comp(e, &args))
}

/// `φ_c(x₁..xₙ, x_{n+1}) ≃ φ_e(x₁..xₙ)`.
pub fn dummy_index(e: &Nat, n: u64) -> Nat {
    code::comp(e, &code::projs(n))
}

/// An `(n+1)`-ary program agreeing with `φ_y(x₁..xₙ)` whenever that converges.
pub fn overuniversal_index(model: ModelId, n: u64) -> Result<Nat, KernelError> {
    Ok(ast::encode(&*overuniversal_program(model, n)?))
}

pub fn overuniversal_program(model: ModelId, n: u64) -> Result<Prog, KernelError> {
    if model == ModelId::Total {
        return Err(KernelError::NeedsUniversal(format!("overuniversal_index({n})")));
    }
    if n == 0 {
        return Err(KernelError::ZeroArity);
    }
    let mut u = ast::apply(ast::proj(1), ast::proj(2));
    for k in 1..n {
        // u^{k+1}(y, x₁..x_{k+1}) ≃ u^k(s(y), x₁..x_{k-1}, c(x_k, x_{k+1}))
        let mut args = vec![ast::comp(uncurry_last(k), vec![ast::proj(1)])];
        args.extend((2..=k).map(ast::proj));
        args.push(ast::pair(ast::proj(k + 1), ast::proj(k + 2)));
        u = ast::comp(u, args);
    }
    Ok(u)
}

/// Unary program `s` with `φ_{s(y)}(x₁..x_{k-1}, z) ≃ φ_y(x₁..x_{k-1}, p₁z, p₂z)`.
fn uncurry_last(k: u64) -> Prog {
    let mut args: Vec<Prog> = (1..k).map(|i| ast::lit(code::proj(i))).collect();
    let z = code::proj(k);
    args.push(ast::lit(code::fst(&z)));
    args.push(ast::lit(code::snd(&z)));
    quote_comp(ast::proj(1), args)
}

/// Evaluates to the code of `Comp(F, [A₁..A_k])` given programs computing the
/// codes of `F` and each `Aᵢ`.
pub fn quote_comp(f: Prog, args: Vec<Prog>) -> Prog {
    ast::codepair(ast::lit(5u64), ast::codepair(f, quote_list(args)))
}

pub fn quote_list(items: Vec<Prog>) -> Prog {
    items
        .into_iter()
        .rev()
        .fold(ast::lit(0u64), |tail, h| ast::codepair(h, tail))
}

pub fn quote_pair(p: Prog, q: Prog) -> Prog {
    ast::codepair(ast::lit(2u64), ast::codepair(p, q))
}

pub fn quote_if0(c: Prog, t: Prog, e: Prog) -> Prog {
    ast::codepair(ast::lit(6u64), ast::codepair(c, ast::codepair(t, e)))
}

pub fn quote_fst(p: Prog) -> Prog {
    ast::codepair(ast::lit(3u64), p)
}

pub fn quote_snd(p: Prog) -> Prog {
    ast::codepair(ast::lit(4u64), p)
}

/// A literal holding the code of `p`.
pub fn quoted(p: &Prog) -> Prog {
    ast::lit(ast::encode(p))
}
