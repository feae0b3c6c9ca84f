//! Checker, evaluator and soundness harness for Capless, a calculus that
//! tracks the capabilities a value may capture through capture sets on its
//! type.

pub mod checker;
pub mod cli;
pub mod evaluator;
pub mod harness;
pub mod surface;
pub mod syntax;
