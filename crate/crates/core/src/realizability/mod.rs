//! Realizability over finite evaluations, checked with bounded resources.

pub mod checker;
pub mod evaluation;
pub mod weak;

pub use checker::{
    enumerate_realizers, realizes, realizes_prime, tuples, Cause, CheckConfig, CheckError,
    Checker, TraceStep, UnknownReason, Verdict, Witness,
};
pub use evaluation::{Evaluation, EvaluationError, RealizerSet};
pub use weak::{check_weak, WeakEntry};
