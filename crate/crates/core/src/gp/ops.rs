use rand::Rng;
use serde::{Deserialize, Serialize};

use super::init::grow;
use super::tree::{PrimitiveSet, ProgramTree, TreeLimits};

/// Operator rates and shape parameters shared by every engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationParams {
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Probability that a crossover point is an internal node (when one exists).
    pub internal_node_bias: f64,
    /// Maximum depth of subtrees grown by mutation.
    pub mutation_depth: usize,
    pub limits: TreeLimits,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self {
            crossover_rate: 0.6,
            mutation_rate: 0.4,
            internal_node_bias: 0.9,
            mutation_depth: 4,
            limits: TreeLimits::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    Crossover,
    Mutation,
}

/// Exclusive choice between crossover and mutation for one offspring.
pub fn choose_operator<R: Rng + ?Sized>(params: &VariationParams, rng: &mut R) -> Operator {
    let total = params.crossover_rate + params.mutation_rate;
    if rng.random::<f64>() * total < params.crossover_rate {
        Operator::Crossover
    } else {
        Operator::Mutation
    }
}

/// Picks a crossover point: internal node with probability `bias`, else a leaf.
/// Trees without internal nodes always yield a leaf.
pub fn pick_crossover_point<R: Rng + ?Sized>(tree: &ProgramTree, bias: f64, rng: &mut R) -> usize {
    let internal = tree.internal_count();
    let want_internal = internal > 0 && rng.random::<f64>() < bias;
    let (count, terminal) = if want_internal {
        (internal, false)
    } else {
        (tree.len() - internal, true)
    };
    let k = rng.random_range(0..count);
    tree.nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_terminal() == terminal)
        .nth(k)
        .map(|(i, _)| i)
        .expect("k < count")
}

/// One subtree swap with 90/10-style point selection. A child that breaks
/// `limits` is replaced by a copy of the parent providing its root context.
pub fn subtree_crossover<R: Rng + ?Sized>(
    p1: &ProgramTree,
    p2: &ProgramTree,
    params: &VariationParams,
    rng: &mut R,
) -> (ProgramTree, ProgramTree) {
    let a = pick_crossover_point(p1, params.internal_node_bias, rng);
    let b = pick_crossover_point(p2, params.internal_node_bias, rng);
    let c1 = p1.with_subtree(a, p2.subtree(b));
    let c2 = p2.with_subtree(b, p1.subtree(a));
    let c1 = if c1.fits(&params.limits) { c1 } else { p1.clone() };
    let c2 = if c2.fits(&params.limits) { c2 } else { p2.clone() };
    (c1, c2)
}

/// Replaces a uniformly chosen node with a grown subtree.
pub fn subtree_mutation<R: Rng + ?Sized>(
    parent: &ProgramTree,
    primitives: &PrimitiveSet,
    params: &VariationParams,
    rng: &mut R,
) -> ProgramTree {
    let at = rng.random_range(0..parent.len());
    let fresh = grow(params.mutation_depth, false, primitives, rng);
    let child = parent.with_subtree(at, fresh.nodes());
    if child.fits(&params.limits) {
        child
    } else {
        parent.clone()
    }
}

/// Produces one offspring: the first crossover child or a mutant of `p1`.
pub fn vary<R: Rng + ?Sized>(
    p1: &ProgramTree,
    p2: &ProgramTree,
    primitives: &PrimitiveSet,
    params: &VariationParams,
    rng: &mut R,
) -> ProgramTree {
    match choose_operator(params, rng) {
        Operator::Crossover => subtree_crossover(p1, p2, params, rng).0,
        Operator::Mutation => subtree_mutation(p1, primitives, params, rng),
    }
}
