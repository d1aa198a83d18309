//! Program semantics and semantic similarity-based crossover (SSC).
//!
//! The semantics of a program is its output vector over the fitness cases.
//! Two programs differ on a case when their outputs there differ by more than
//! the sensitivity threshold `ubss`; SSC retries crossover until each child
//! differs from its parent on at least one case, or the trial budget runs out.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gp::{evaluate, subtree_crossover, FeatureMatrix, Individual, ProgramTree, VariationParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemanticsVector(Vec<f64>);

impl SemanticsVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Which parent/child comparisons must pass for SSC to accept a trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SscPairing {
    /// Child 1 must differ from parent 1 and child 2 from parent 2.
    #[default]
    Joint,
    /// Only the child that is kept (child 1) is tested against parent 1.
    FirstChild,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemanticConfig {
    pub ubss: f64,
    pub max_trials: usize,
    #[serde(default)]
    pub pairing: SscPairing,
}

impl Default for SemanticConfig {
    fn default() -> Self {
        Self {
            ubss: 0.5,
            max_trials: 20,
            pairing: SscPairing::Joint,
        }
    }
}

/// Number of cases on which the two output vectors differ by more than `ubss`.
///
/// # Panics
/// If the vectors have different lengths.
pub fn semantic_distance(sp: &SemanticsVector, sv: &SemanticsVector, ubss: f64) -> usize {
    assert_eq!(sp.len(), sv.len(), "semantics vectors must have equal length");
    sp.0.iter()
        .zip(&sv.0)
        .filter(|(a, b)| (*a - *b).abs() > ubss)
        .count()
}

pub fn semantically_different(sp: &SemanticsVector, sv: &SemanticsVector, ubss: f64) -> bool {
    assert_eq!(sp.len(), sv.len(), "semantics vectors must have equal length");
    sp.0.iter().zip(&sv.0).any(|(a, b)| (a - b).abs() > ubss)
}

#[derive(Clone, Debug)]
pub struct SscOutcome {
    pub offspring: (ProgramTree, ProgramTree),
    /// Training semantics of the first child.
    pub first_semantics: SemanticsVector,
    /// Number of crossover trials performed (1..=max_trials).
    pub trials: usize,
    /// False when the budget was exhausted and the fallback was returned.
    pub accepted: bool,
}

/// Semantic similarity-based crossover.
///
/// Trial 1 draws from `rng`, exactly as a plain crossover would; later trials
/// draw from `retry_rng`. When no trial is accepted the first trial's
/// children are returned, so with an unreachable threshold the caller's
/// random stream and result match standard crossover.
#[allow(clippy::too_many_arguments)]
pub fn ssc_crossover<R: Rng + ?Sized, Q: Rng + ?Sized>(
    p1: &Individual,
    p2: &Individual,
    features: &FeatureMatrix,
    cfg: &SemanticConfig,
    params: &VariationParams,
    rng: &mut R,
    retry_rng: &mut Q,
) -> SscOutcome {
    let s1 = parent_semantics(p1, features);
    let s2 = parent_semantics(p2, features);

    let mut first: Option<((ProgramTree, ProgramTree), SemanticsVector)> = None;
    for trial in 1..=cfg.max_trials.max(1) {
        let children = if trial == 1 {
            subtree_crossover(&p1.tree, &p2.tree, params, rng)
        } else {
            subtree_crossover(&p1.tree, &p2.tree, params, retry_rng)
        };
        let c1_sem = evaluate(&children.0, features);
        let pass = semantically_different(&s1, &c1_sem, cfg.ubss)
            && match cfg.pairing {
                SscPairing::FirstChild => true,
                SscPairing::Joint => {
                    semantically_different(&s2, &evaluate(&children.1, features), cfg.ubss)
                }
            };
        if pass {
            return SscOutcome {
                offspring: children,
                first_semantics: c1_sem,
                trials: trial,
                accepted: true,
            };
        }
        if first.is_none() {
            first = Some((children, c1_sem));
        }
    }
    let (offspring, first_semantics) = first.expect("at least one trial");
    SscOutcome {
        offspring,
        first_semantics,
        trials: cfg.max_trials.max(1),
        accepted: false,
    }
}

fn parent_semantics<'a>(p: &'a Individual, features: &FeatureMatrix) -> std::borrow::Cow<'a, SemanticsVector> {
    match &p.semantics {
        Some(s) => std::borrow::Cow::Borrowed(s),
        None => std::borrow::Cow::Owned(evaluate(&p.tree, features)),
    }
}
