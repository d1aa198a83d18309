//! Binary classification objectives: true positive and true negative rates.

use serde::{Deserialize, Serialize};

use crate::gp::FeatureMatrix;
use crate::semantics::SemanticsVector;

/// Label of the minority (positive) class.
pub const POSITIVE: u8 = 1;

/// Features plus 0/1 labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub features: FeatureMatrix,
    pub labels: Vec<u8>,
}

impl LabeledDataset {
    /// # Panics
    /// If label count differs from row count or a label is not 0/1.
    pub fn new(features: FeatureMatrix, labels: Vec<u8>) -> Self {
        assert_eq!(features.n_rows(), labels.len(), "one label per row");
        assert!(labels.iter().all(|&l| l <= 1), "labels must be 0 or 1");
        Self { features, labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_features()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == POSITIVE).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }
}

/// Output-to-class rule: non-negative outputs are positive.
#[inline]
pub fn classify(output: f64) -> u8 {
    if output >= 0.0 {
        1
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// TPR = TP/(TP+FN), TNR = TN/(TN+FP); an empty class scores 0.
    pub fn objectives(&self) -> Objectives {
        Objectives {
            tpr: ratio(self.tp, self.tp + self.fn_),
            tnr: ratio(self.tn, self.tn + self.fp),
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// # Panics
/// If `semantics` and `labels` differ in length.
pub fn confusion(semantics: &SemanticsVector, labels: &[u8]) -> ConfusionCounts {
    assert_eq!(semantics.len(), labels.len(), "one output per label");
    let mut c = ConfusionCounts::default();
    for (&out, &label) in semantics.values().iter().zip(labels) {
        match (classify(out), label == POSITIVE) {
            (1, true) => c.tp += 1,
            (0, false) => c.tn += 1,
            (1, false) => c.fp += 1,
            _ => c.fn_ += 1,
        }
    }
    c
}

/// The two maximized objectives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub tpr: f64,
    pub tnr: f64,
}

impl Objectives {
    pub fn new(tpr: f64, tnr: f64) -> Self {
        Self { tpr, tnr }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.tpr, self.tnr]
    }
}
