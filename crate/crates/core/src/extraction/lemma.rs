//! Translators between `r_f ∀y A` and the pointwise `r′_f ∀y A`.
//!
//! Both are unary programs acting on codes: `g` turns a block realizer of
//! `∀y A` into a pointwise one, `h` goes back.

use crate::kernel::ast::{self, Prog};
use crate::kernel::{code, overuniversal_program, quote_comp, KernelError, ModelId};
use crate::logic::{canonicalize_blocks, Formula};
use crate::nat::Nat;

/// How `∀y A` is read by the realizability clauses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `A` is an implication or a universal whose block has `n` variables,
    /// so realizers of `∀y A` take `y, x₁..xₙ, w`.
    Block(u64),
    /// Any other `A`: realizers of `∀y A` take `y` and a realizer of `⊤`.
    Plain,
}

pub fn shape(a: &Formula) -> Shape {
    match canonicalize_blocks(a) {
        Some(b) => Shape::Block(b.vars.len() as u64),
        None => Shape::Plain,
    }
}

/// Unary program computing `g_A(e)`.
pub fn g_program(a: &Formula) -> Prog {
    match shape(a) {
        Shape::Block(n) => {
            // perm(e): φ(x̄, w, y) ≃ φ_e(y, x̄, w)
            let mut args = vec![ast::lit(code::proj(n + 2))];
            args.extend((1..=n + 1).map(|i| ast::lit(code::proj(i))));
            let perm = quote_comp(ast::proj(2), args);
            // K(y, e) = k(e, y), the perm with y fixed last
            let k = ast::smn_code(n + 1, perm, ast::proj(1));
            ast::smn_code(1, ast::lit(ast::encode(&k)), ast::proj(1))
        }
        // φ_{g(e)}(y) ≃ φ_e(y, 0)
        Shape::Plain => ast::smn_code(1, ast::proj(1), ast::lit(0u64)),
    }
}

/// Unary program computing `h_A(e)`. The block case calls the overuniversal
/// function and so exists only in UREC.
pub fn h_program(a: &Formula, model: ModelId) -> Result<Prog, KernelError> {
    match shape(a) {
        Shape::Block(n) => {
            // Hb(y, x̄, w, e) = u^{n+1}(φ_e(y), x̄, w)
            let u = overuniversal_program(model, n + 1)?;
            let mut args = vec![ast::apply(ast::proj(n + 3), ast::proj(1))];
            args.extend((2..=n + 2).map(ast::proj));
            let hb = ast::comp(u, args);
            Ok(ast::smn_code(n + 2, ast::lit(ast::encode(&hb)), ast::proj(1)))
        }
        // φ_{h(e)}(y, w) ≃ φ_e(y)
        Shape::Plain => Ok(quote_comp(ast::proj(1), vec![ast::lit(code::proj(1))])),
    }
}

/// Whether `h_A` needs the overuniversal function.
pub fn h_needs_universal(a: &Formula) -> bool {
    matches!(shape(a), Shape::Block(_))
}

pub fn g_index(a: &Formula) -> Nat {
    ast::encode(&g_program(a))
}

pub fn h_index(a: &Formula, model: ModelId) -> Result<Nat, KernelError> {
    Ok(ast::encode(&*h_program(a, model)?))
}
