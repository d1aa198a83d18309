//! Multi-objective genetic programming for unbalanced binary classification.
//!
//! MOEA/D with Tchebycheff decomposition, with or without semantic
//! similarity-based crossover, plus NSGA-II and SPEA2 baselines on the same
//! tree representation. Objectives are the true positive and true negative
//! rates, both maximized.

pub mod baselines;
pub mod data;
pub mod engine;
pub mod experiment;
pub mod gp;
pub mod metrics;
pub mod moead;
pub mod objectives;
pub mod semantics;

pub use engine::{EngineRun, EvolutionParams, GenerationStats};
pub use gp::{FeatureMatrix, Individual, Primitive, PrimitiveSet, ProgramTree, TreeLimits, VariationParams};
pub use moead::{MoeadParams, MoeadVariant};
pub use objectives::{LabeledDataset, Objectives};
pub use semantics::{SemanticConfig, SemanticsVector, SscPairing};
