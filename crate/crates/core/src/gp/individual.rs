use serde::{Deserialize, Serialize};

use super::eval::evaluate;
use super::tree::ProgramTree;
use crate::objectives::{confusion, LabeledDataset, Objectives};
use crate::semantics::SemanticsVector;

/// A program together with its training-set behaviour and objective scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub tree: ProgramTree,
    /// Output vector on the training cases; engines that never compare
    /// semantics drop it to save memory.
    #[serde(skip)]
    pub semantics: Option<SemanticsVector>,
    pub objectives: Objectives,
}

impl Individual {
    /// Evaluates `tree` on `data`, keeping its semantics.
    pub fn evaluate(tree: ProgramTree, data: &LabeledDataset) -> Self {
        let semantics = evaluate(&tree, &data.features);
        Self::from_semantics(tree, semantics, data)
    }

    pub fn from_semantics(tree: ProgramTree, semantics: SemanticsVector, data: &LabeledDataset) -> Self {
        let objectives = confusion(&semantics, &data.labels).objectives();
        Self {
            tree,
            semantics: Some(semantics),
            objectives,
        }
    }

    pub fn without_semantics(mut self) -> Self {
        self.semantics = None;
        self
    }

    pub fn point(&self) -> [f64; 2] {
        self.objectives.as_array()
    }
}
