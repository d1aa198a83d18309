//! MOEA/D with Tchebycheff decomposition over GP individuals.
//!
//! Each of the N sub-problems owns a weight vector on the 2-simplex and one
//! current solution. Offspring are bred from parents in a sub-problem's
//! neighbourhood and replace any neighbour whose scalarized value they match
//! or improve. Both objectives (TPR, TNR) are maximized, so the ideal point
//! tracks the component-wise maximum.

use std::cmp::Ordering;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{population_best, rng_streams, tournament, EngineRun, EvolutionParams, GenerationStats};
use crate::gp::{
    choose_operator, evaluate, subtree_crossover, subtree_mutation, Individual, Operator, PrimitiveSet,
};
use crate::metrics::dominates;
use crate::objectives::LabeledDataset;
use crate::semantics::{ssc_crossover, SemanticConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(pub [f64; 2]);

/// Uniform lattice `(i/(N-1), 1 - i/(N-1))`, `i = 0..N`.
///
/// # Panics
/// If `n < 2`.
pub fn generate_weights(n: usize) -> Vec<WeightVector> {
    assert!(n >= 2, "need at least two sub-problems");
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let a = i as f64 / last;
            WeightVector([a, 1.0 - a])
        })
        .collect()
}

/// For each weight, indices of the `t` closest weights (Euclidean), nearest
/// first, ties broken by lower index. Every index is its own nearest neighbour.
pub fn build_neighborhoods(weights: &[WeightVector], t: usize) -> Vec<Vec<usize>> {
    assert!(t >= 1 && t <= weights.len(), "neighbourhood size out of range");
    weights
        .iter()
        .map(|wi| {
            let mut idx: Vec<(f64, usize)> = weights
                .iter()
                .enumerate()
                .map(|(j, wj)| {
                    let d = (wi.0[0] - wj.0[0]).hypot(wi.0[1] - wj.0[1]);
                    (d, j)
                })
                .collect();
            idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            idx.into_iter().take(t).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Best objective values seen so far.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealPoint(pub [f64; 2]);

impl IdealPoint {
    /// Component-wise maximum with `f`.
    pub fn updated(self, f: [f64; 2]) -> Self {
        IdealPoint([self.0[0].max(f[0]), self.0[1].max(f[1])])
    }

    pub fn update(&mut self, f: [f64; 2]) {
        *self = self.updated(f);
    }
}

/// `max_j λ_j |f_j - z_j|`; smaller is better.
pub fn tchebycheff(f: [f64; 2], weight: &WeightVector, z: &IdealPoint) -> f64 {
    (weight.0[0] * (f[0] - z.0[0]).abs()).max(weight.0[1] * (f[1] - z.0[1]).abs())
}

/// Archive of mutually non-dominated solutions, one per objective vector.
#[derive(Clone, Debug, Default)]
pub struct ExternalPopulation {
    members: Vec<Individual>,
}

impl ExternalPopulation {
    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Adds `candidate` unless a member dominates or equals it; evicts members
    /// it dominates. Returns whether it was added.
    pub fn insert(&mut self, candidate: &Individual) -> bool {
        let p = candidate.point();
        if self.members.iter().any(|m| {
            let q = m.point();
            q == p || dominates(&q, &p)
        }) {
            return false;
        }
        self.members.retain(|m| !dominates(&p, &m.point()));
        let mut stored = candidate.clone();
        stored.semantics = None;
        self.members.push(stored);
        true
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MoeadVariant {
    Canonical,
    Semantic(SemanticConfig),
}

/// How parents are drawn from a neighbourhood.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatingSelection {
    /// Uniform random pick.
    #[default]
    Neighborhood,
    /// Tournament within the neighbourhood on the sub-problem's scalarized value.
    Tournament,
}

/// Whether an offspring with an equal scalarized value replaces a neighbour.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementTie {
    #[default]
    Replace,
    Keep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoeadParams {
    pub evolution: EvolutionParams,
    pub neighborhood_size: usize,
    pub mating: MatingSelection,
    pub replacement_tie: ReplacementTie,
    pub variant: MoeadVariant,
}

impl Default for MoeadParams {
    fn default() -> Self {
        Self {
            evolution: EvolutionParams::default(),
            neighborhood_size: 20,
            mating: MatingSelection::Neighborhood,
            replacement_tie: ReplacementTie::Replace,
            variant: MoeadVariant::Canonical,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubProblem {
    pub index: usize,
    pub weight: WeightVector,
    pub neighbors: Vec<usize>,
    pub current: Individual,
}

/// SSC bookkeeping across a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SscCounters {
    pub crossovers: u64,
    pub trials: u64,
    pub accepted: u64,
    pub max_trials_seen: usize,
}

#[derive(Clone, Debug)]
pub struct MoeadState {
    pub subproblems: Vec<SubProblem>,
    pub ideal: IdealPoint,
    pub ep: ExternalPopulation,
    pub generation: usize,
    pub stats: Vec<GenerationStats>,
    pub ssc: SscCounters,
}

impl MoeadState {
    /// Empty EP, weights with neighbourhoods, random initial solutions and
    /// the ideal point of that population.
    pub fn initialize<R: Rng + ?Sized>(
        params: &MoeadParams,
        primitives: &PrimitiveSet,
        data: &LabeledDataset,
        rng: &mut R,
    ) -> Self {
        let n = params.evolution.population_size;
        let weights = generate_weights(n);
        let neighborhoods = build_neighborhoods(&weights, params.neighborhood_size);
        let keep = matches!(params.variant, MoeadVariant::Semantic(_));
        let pop = params.evolution.initial_population(primitives, data, keep, rng);
        let ideal = IdealPoint(population_best(&pop));
        let subproblems = weights
            .into_iter()
            .zip(neighborhoods)
            .zip(pop)
            .enumerate()
            .map(|(index, ((weight, neighbors), current))| SubProblem {
                index,
                weight,
                neighbors,
                current,
            })
            .collect();
        let mut state = Self {
            subproblems,
            ideal,
            ep: ExternalPopulation::default(),
            generation: 0,
            stats: Vec::new(),
            ssc: SscCounters::default(),
        };
        state.record_stats();
        state
    }

    pub fn population(&self) -> Vec<Individual> {
        self.subproblems.iter().map(|s| s.current.clone()).collect()
    }

    fn record_stats(&mut self) {
        let best = self.subproblems.iter().fold([0.0f64, 0.0f64], |acc, s| {
            [acc[0].max(s.current.objectives.tpr), acc[1].max(s.current.objectives.tnr)]
        });
        self.stats.push(GenerationStats {
            generation: self.generation,
            ideal: self.ideal.0,
            archive_size: self.ep.len(),
            best,
        });
    }

    /// Replaces every neighbour of sub-problem `i` that `y` matches or beats
    /// on that neighbour's scalarized value. Returns the replaced indices.
    pub fn replace_neighbors(&mut self, i: usize, y: &Individual, tie: ReplacementTie) -> Vec<usize> {
        let z = self.ideal;
        let fy = y.point();
        let neighbors = self.subproblems[i].neighbors.clone();
        let mut replaced = Vec::new();
        for j in neighbors {
            let sp = &mut self.subproblems[j];
            let g_new = tchebycheff(fy, &sp.weight, &z);
            let g_old = tchebycheff(sp.current.point(), &sp.weight, &z);
            let better = match tie {
                ReplacementTie::Replace => g_new <= g_old,
                ReplacementTie::Keep => g_new < g_old,
            };
            if better {
                sp.current = y.clone();
                replaced.push(j);
            }
        }
        replaced
    }
}

fn pick_parent<R: Rng + ?Sized>(state: &MoeadState, i: usize, params: &MoeadParams, rng: &mut R) -> usize {
    let sp = &state.subproblems[i];
    let t = sp.neighbors.len();
    match params.mating {
        MatingSelection::Neighborhood => sp.neighbors[rng.random_range(0..t)],
        MatingSelection::Tournament => {
            let g = |k: usize| {
                let j = sp.neighbors[k];
                tchebycheff(state.subproblems[j].current.point(), &sp.weight, &state.ideal)
            };
            let k = tournament(t, params.evolution.tournament_size, rng, |a, b| {
                g(a).partial_cmp(&g(b)).unwrap_or(Ordering::Equal)
            });
            sp.neighbors[k]
        }
    }
}

/// One pass over all sub-problems in index order.
pub fn moead_generation<R: Rng + ?Sized, Q: Rng + ?Sized>(
    state: &mut MoeadState,
    params: &MoeadParams,
    primitives: &PrimitiveSet,
    data: &LabeledDataset,
    rng: &mut R,
    retry_rng: &mut Q,
) {
    let variation = &params.evolution.variation;
    let keep_semantics = matches!(params.variant, MoeadVariant::Semantic(_));
    for i in 0..state.subproblems.len() {
        let k = pick_parent(state, i, params, rng);
        let l = pick_parent(state, i, params, rng);
        let p1 = &state.subproblems[k].current;
        let p2 = &state.subproblems[l].current;

        let (tree, semantics) = match choose_operator(variation, rng) {
            Operator::Crossover => match &params.variant {
                MoeadVariant::Canonical => {
                    let child = subtree_crossover(&p1.tree, &p2.tree, variation, rng).0;
                    let s = evaluate(&child, &data.features);
                    (child, s)
                }
                MoeadVariant::Semantic(cfg) => {
                    let out = ssc_crossover(p1, p2, &data.features, cfg, variation, rng, retry_rng);
                    state.ssc.crossovers += 1;
                    state.ssc.trials += out.trials as u64;
                    state.ssc.accepted += u64::from(out.accepted);
                    state.ssc.max_trials_seen = state.ssc.max_trials_seen.max(out.trials);
                    (out.offspring.0, out.first_semantics)
                }
            },
            Operator::Mutation => {
                let child = subtree_mutation(&p1.tree, primitives, variation, rng);
                let s = evaluate(&child, &data.features);
                (child, s)
            }
        };
        let mut y = Individual::from_semantics(tree, semantics, data);
        if !keep_semantics {
            y.semantics = None;
        }

        state.ideal.update(y.point());
        state.replace_neighbors(i, &y, params.replacement_tie);
        state.ep.insert(&y);
    }
    state.generation += 1;
    state.record_stats();
}

/// Full run: initialization then `generations` update passes.
pub fn run_moead(params: &MoeadParams, primitives: &PrimitiveSet, data: &LabeledDataset, seed: u64) -> (EngineRun, SscCounters) {
    let start = Instant::now();
    let (mut rng, mut retry) = rng_streams(seed);
    let mut state = MoeadState::initialize(params, primitives, data, &mut rng);
    for _ in 0..params.evolution.generations {
        moead_generation(&mut state, params, primitives, data, &mut rng, &mut retry);
    }
    let population = state
        .subproblems
        .into_iter()
        .map(|s| s.current.without_semantics())
        .collect();
    (
        EngineRun {
            population,
            archive: state.ep.into_members(),
            stats: state.stats,
            elapsed: start.elapsed(),
        },
        state.ssc,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{FeatureMatrix, ProgramTree};
    use crate::objectives::Objectives;
    use proptest::prelude::*;

    #[test]
    fn weights_examples() {
        let w = generate_weights(2);
        assert_eq!(w, vec![WeightVector([0.0, 1.0]), WeightVector([1.0, 0.0])]);
        let w = generate_weights(3);
        assert_eq!(w[1], WeightVector([0.5, 0.5]));
        let w = generate_weights(500);
        assert_eq!(w.len(), 500);
        for pair in w.windows(2) {
            assert!((pair[1].0[0] - pair[0].0[0] - 1.0 / 499.0).abs() < 1e-12);
            assert!((pair[1].0[0] + pair[1].0[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn neighborhood_examples() {
        let w = generate_weights(5);
        assert!(build_neighborhoods(&w, 5).iter().all(|b| {
            let mut s = b.clone();
            s.sort();
            s == vec![0, 1, 2, 3, 4]
        }));
        let b = build_neighborhoods(&w, 1);
        assert_eq!(b, (0..5).map(|i| vec![i]).collect::<Vec<_>>());
        let b = build_neighborhoods(&w, 3);
        assert_eq!(b[0], vec![0, 1, 2]);
        assert_eq!(b[2], vec![2, 1, 3]);
        assert_eq!(b[4], vec![4, 3, 2]);
    }

    #[test]
    fn tchebycheff_examples() {
        let z = IdealPoint([1.0, 1.0]);
        assert_eq!(tchebycheff([1.0, 1.0], &WeightVector([0.3, 0.7]), &z), 0.0);
        let g = tchebycheff([0.8, 0.6], &WeightVector([0.5, 0.5]), &z);
        assert!((g - 0.2).abs() < 1e-12);
        let g = tchebycheff([0.3, 0.9], &WeightVector([1.0, 0.0]), &z);
        assert!((g - 0.7).abs() < 1e-12);
    }

    #[test]
    fn ideal_update_examples() {
        assert_eq!(IdealPoint([0.5, 0.5]).updated([0.7, 0.4]), IdealPoint([0.7, 0.5]));
        assert_eq!(IdealPoint([0.9, 0.9]).updated([0.1, 0.2]), IdealPoint([0.9, 0.9]));
        assert_eq!(IdealPoint([0.0, 0.0]).updated([0.3, 0.6]), IdealPoint([0.3, 0.6]));
    }

    fn ind(tpr: f64, tnr: f64) -> Individual {
        Individual {
            tree: ProgramTree::leaf(0),
            semantics: None,
            objectives: Objectives::new(tpr, tnr),
        }
    }

    #[test]
    fn external_population_keeps_front() {
        let mut ep = ExternalPopulation::default();
        assert!(ep.insert(&ind(0.5, 0.5)));
        assert!(!ep.insert(&ind(0.5, 0.5)));
        assert!(!ep.insert(&ind(0.4, 0.5)));
        assert!(ep.insert(&ind(1.0, 0.0)));
        assert!(ep.insert(&ind(0.6, 0.6)));
        assert_eq!(ep.len(), 2);
        assert!(ep.insert(&ind(1.0, 1.0)));
        assert_eq!(ep.len(), 1);
    }

    fn toy_state(n: usize) -> MoeadState {
        let w = generate_weights(n);
        let nb = build_neighborhoods(&w, 3.min(n));
        MoeadState {
            subproblems: w
                .into_iter()
                .zip(nb)
                .enumerate()
                .map(|(i, (weight, neighbors))| SubProblem {
                    index: i,
                    weight,
                    neighbors,
                    current: ind(0.5, 0.5),
                })
                .collect(),
            ideal: IdealPoint([0.9, 0.9]),
            ep: ExternalPopulation::default(),
            generation: 0,
            stats: vec![],
            ssc: SscCounters::default(),
        }
    }

    #[test]
    fn ideal_offspring_replaces_all_neighbors() {
        let mut s = toy_state(5);
        s.ideal.update([1.0, 1.0]);
        let replaced = s.replace_neighbors(2, &ind(1.0, 1.0), ReplacementTie::Replace);
        assert_eq!(replaced, vec![2, 1, 3]);
    }

    #[test]
    fn dominated_offspring_replaces_nothing() {
        let mut s = toy_state(5);
        let replaced = s.replace_neighbors(2, &ind(0.1, 0.1), ReplacementTie::Replace);
        assert!(replaced.is_empty());
        let replaced = s.replace_neighbors(2, &ind(0.5, 0.5), ReplacementTie::Keep);
        assert!(replaced.is_empty());
        let replaced = s.replace_neighbors(2, &ind(0.5, 0.5), ReplacementTie::Replace);
        assert_eq!(replaced.len(), 3);
    }

    fn toy_data() -> LabeledDataset {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 7) as f64 / 7.0, (i % 5) as f64 / 5.0 - 0.3, (i % 3) as f64 - 1.0])
            .collect();
        let labels = (0..40).map(|i| u8::from(i % 4 == 0)).collect();
        LabeledDataset::new(FeatureMatrix::from_rows(&rows), labels)
    }

    #[test]
    fn zero_generations_returns_initial_population() {
        let data = toy_data();
        let ps = PrimitiveSet::standard(3);
        let mut params = MoeadParams::default();
        params.evolution.population_size = 12;
        params.evolution.generations = 0;
        params.neighborhood_size = 4;
        let (run, _) = run_moead(&params, &ps, &data, 3);
        assert_eq!(run.population.len(), 12);
        assert!(run.archive.is_empty());
        assert_eq!(run.stats.len(), 1);
    }

    #[test]
    fn generation_is_reproducible() {
        let data = toy_data();
        let ps = PrimitiveSet::standard(3);
        let mut params = MoeadParams::default();
        params.evolution.population_size = 16;
        params.evolution.generations = 3;
        params.neighborhood_size = 5;
        for variant in [MoeadVariant::Canonical, MoeadVariant::Semantic(SemanticConfig::default())] {
            params.variant = variant;
            let (a, _) = run_moead(&params, &ps, &data, 11);
            let (b, _) = run_moead(&params, &ps, &data, 11);
            assert_eq!(a.population, b.population);
            assert_eq!(a.archive, b.archive);
        }
    }

    #[test]
    fn ep_stays_nondominated_and_ideal_monotone() {
        let data = toy_data();
        let ps = PrimitiveSet::standard(3);
        let mut params = MoeadParams::default();
        params.evolution.population_size = 20;
        params.evolution.generations = 5;
        params.neighborhood_size = 5;
        params.variant = MoeadVariant::Semantic(SemanticConfig::default());
        let (mut rng, mut retry) = rng_streams(5);
        let mut state = MoeadState::initialize(&params, &ps, &data, &mut rng);
        for _ in 0..5 {
            moead_generation(&mut state, &params, &ps, &data, &mut rng, &mut retry);
            let m = state.ep.members();
            for a in m {
                for b in m {
                    assert!(!dominates(&a.point(), &b.point()));
                }
            }
        }
        for w in state.stats.windows(2) {
            assert!(w[1].ideal[0] >= w[0].ideal[0] && w[1].ideal[1] >= w[0].ideal[1]);
        }
        assert!(state.ssc.max_trials_seen <= 20);
    }

    #[test]
    fn single_trial_ssc_without_threshold_is_canonical() {
        let data = toy_data();
        let ps = PrimitiveSet::standard(3);
        let mut params = MoeadParams::default();
        params.evolution.population_size = 20;
        params.evolution.generations = 6;
        params.neighborhood_size = 5;
        let run = |variant| {
            let mut p = params.clone();
            p.variant = variant;
            let (r, _) = run_moead(&p, &ps, &data, 21);
            let key = |v: &[Individual]| -> Vec<_> { v.iter().map(|i| (i.tree.clone(), i.point())).collect() };
            (key(&r.population), key(&r.archive), r.stats.iter().map(|s| (s.ideal, s.best, s.archive_size)).collect::<Vec<_>>())
        };
        let semantic = MoeadVariant::Semantic(SemanticConfig { ubss: f64::INFINITY, max_trials: 1, ..Default::default() });
        assert_eq!(run(MoeadVariant::Canonical), run(semantic));
    }

    proptest! {
        #[test]
        fn replacement_never_worsens_neighbors(
            current in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 8),
            y in (0.0f64..1.0, 0.0f64..1.0),
            keep_ties in any::<bool>(),
        ) {
            let mut state = toy_state(8);
            for (sp, c) in state.subproblems.iter_mut().zip(&current) {
                sp.current = ind(c.0, c.1);
            }
            state.ideal = IdealPoint([1.0, 1.0]);
            let before: Vec<f64> = state
                .subproblems
                .iter()
                .map(|sp| tchebycheff(sp.current.point(), &sp.weight, &state.ideal))
                .collect();
            let tie = if keep_ties { ReplacementTie::Keep } else { ReplacementTie::Replace };
            let replaced = state.replace_neighbors(3, &ind(y.0, y.1), tie);
            for (j, sp) in state.subproblems.iter().enumerate() {
                let g = tchebycheff(sp.current.point(), &sp.weight, &state.ideal);
                prop_assert!(g <= before[j]);
                if !replaced.contains(&j) {
                    prop_assert_eq!(g, before[j]);
                } else {
                    prop_assert!(state.subproblems[3].neighbors.contains(&j));
                }
            }
        }

        #[test]
        fn tchebycheff_weakly_monotone(
            f in (0.0f64..1.0, 0.0f64..1.0),
            d in (0.0f64..0.5, 0.0f64..0.5),
            l in 0.01f64..0.99,
        ) {
            let better = [f.0, f.1];
            let worse = [f.0 - d.0, f.1 - d.1];
            let z = IdealPoint([1.0, 1.0]);
            let w = WeightVector([l, 1.0 - l]);
            prop_assert!(tchebycheff(better, &w, &z) <= tchebycheff(worse, &w, &z));
        }
    }
}
