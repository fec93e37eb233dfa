//! Intuitionistic predicate logic with numeric constants: syntax,
//! substitution, text formats and Hilbert-style proof checking.

pub mod builder;
pub mod derivation;
pub mod syntax;
pub mod text;

pub use builder::DerivationBuilder;
pub use derivation::{
    check_derivation, parse_derivation, print_derivation, AxiomId, AxiomInstance, CheckResult,
    Derivation, DerivationFormatError, Justification, Step,
};
pub use syntax::{
    alpha_canonicalize, alpha_eq, canonicalize_blocks, substitute, Block, Formula, Term,
};
pub use text::{parse_formula, print_formula, ParseError};
