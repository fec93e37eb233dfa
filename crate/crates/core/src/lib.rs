//! Generalized realizability workbench.
//!
//! Two concrete computability models over a total Gödel numbering, an IPC
//! proof checker, a compiler from Hilbert derivations to realizer indices,
//! a bounded three-valued realizability checker over finite evaluations, and
//! a harness tying realizability of one particular sentence to the existence
//! of an overuniversal function.

pub mod cli;
pub mod extraction;
pub mod harness;
pub mod kernel;
pub mod logic;
pub mod nat;
pub mod realizability;
pub mod sample;

pub use kernel::{eval, EvalOutcome, ModelId, ProgramAst};
pub use nat::Nat;
