//! Tree-based GP: representation, initialization, evaluation and variation.

mod eval;
mod individual;
mod init;
mod ops;
mod tree;

pub use eval::{evaluate, protected_div, FeatureMatrix, DIV_EPSILON, OUTPUT_LIMIT};
pub use individual::Individual;
pub use init::{full, grow, ramped_half_and_half};
pub use ops::{
    choose_operator, pick_crossover_point, subtree_crossover, subtree_mutation, vary, Operator,
    VariationParams,
};
pub use tree::{Primitive, PrimitiveSet, ProgramTree, TreeLimits};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GpError {
    #[error("feature count {0} out of range")]
    FeatureCount(usize),
    #[error("function set is empty")]
    EmptyFunctionSet,
    #[error("{0:?} is a terminal, not a function")]
    TerminalAsFunction(Primitive),
    #[error("malformed program: {0}")]
    Malformed(String),
}
