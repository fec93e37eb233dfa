//! Computability models: program syntax and numbering, evaluation, the
//! closure combinators and V-terms.

pub mod ast;
pub mod code;
pub mod combinators;
pub mod interp;
pub mod vterm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use ast::{decode, encode, parse_program, Prog, ProgramAst};
pub use combinators::*;
pub use interp::{eval, EvalOutcome, Interpreter};
pub use vterm::{kleene_equal, vterm_eval, KleeneReport, VTerm, VTermError};

/// The two concrete models. UREC has the `Apply` opcode; TOTAL does not and
/// every TOTAL program halts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelId {
    Urec,
    Total,
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelId::Urec => "UREC",
            ModelId::Total => "TOTAL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown model {0:?} (expected UREC or TOTAL)")]
pub struct UnknownModel(pub String);

impl FromStr for ModelId {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "UREC" => Ok(ModelId::Urec),
            "TOTAL" => Ok(ModelId::Total),
            _ => Err(UnknownModel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("{0} needs the overuniversal function, which the TOTAL model lacks")]
    NeedsUniversal(String),
    #[error("not a permutation of 1..{n}: {perm:?}")]
    BadPermutation { perm: Vec<u64>, n: usize },
    #[error("arity must be at least 1")]
    ZeroArity,
}
