//! Pieces shared by every optimizer: run parameters, per-generation logs,
//! seeded random streams and tournament selection.

use std::cmp::Ordering;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gp::{ramped_half_and_half, Individual, PrimitiveSet, VariationParams};
use crate::metrics::nondominated_indices;
use crate::objectives::LabeledDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub init_min_depth: usize,
    pub init_max_depth: usize,
    pub variation: VariationParams,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self {
            population_size: 500,
            generations: 50,
            tournament_size: 7,
            init_min_depth: 1,
            init_max_depth: 5,
            variation: VariationParams::default(),
        }
    }
}

impl EvolutionParams {
    /// Random initial population, evaluated on `data`.
    pub fn initial_population<R: Rng + ?Sized>(
        &self,
        primitives: &PrimitiveSet,
        data: &LabeledDataset,
        keep_semantics: bool,
        rng: &mut R,
    ) -> Vec<Individual> {
        ramped_half_and_half(
            self.population_size,
            self.init_min_depth,
            self.init_max_depth,
            primitives,
            rng,
        )
        .into_iter()
        .map(|t| {
            let ind = Individual::evaluate(t, data);
            if keep_semantics {
                ind
            } else {
                ind.without_semantics()
            }
        })
        .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best value seen so far per objective (the MOEA/D ideal point).
    pub ideal: [f64; 2],
    /// External population or archive size.
    pub archive_size: usize,
    /// Best value per objective in the current population.
    pub best: [f64; 2],
}

/// Outcome of one optimizer run on the training set.
#[derive(Clone, Debug)]
pub struct EngineRun {
    pub population: Vec<Individual>,
    /// MOEA/D external population or SPEA2 archive; empty for NSGA-II.
    pub archive: Vec<Individual>,
    pub stats: Vec<GenerationStats>,
    pub elapsed: Duration,
}

impl EngineRun {
    /// Training-set non-dominated members of archive and final population,
    /// one per distinct objective vector.
    pub fn final_front(&self) -> Vec<&Individual> {
        let all: Vec<&Individual> = self.archive.iter().chain(&self.population).collect();
        let pts: Vec<[f64; 2]> = all.iter().map(|i| i.point()).collect();
        nondominated_indices(&pts).into_iter().map(|i| all[i]).collect()
    }
}

/// Main and auxiliary random streams for a run. The auxiliary stream feeds
/// SSC retries so they never shift the main sequence.
pub fn rng_streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let main = ChaCha8Rng::seed_from_u64(seed);
    let mut aux = ChaCha8Rng::seed_from_u64(seed);
    aux.set_stream(1);
    (main, aux)
}

/// Best of `size` uniformly drawn (with replacement) indices under `better`,
/// which returns `Ordering::Less` when its first argument is preferred.
pub fn tournament<R, F>(n: usize, size: usize, rng: &mut R, mut better: F) -> usize
where
    R: Rng + ?Sized,
    F: FnMut(usize, usize) -> Ordering,
{
    let mut best = rng.random_range(0..n);
    for _ in 1..size.max(1) {
        let c = rng.random_range(0..n);
        if better(c, best) == Ordering::Less {
            best = c;
        }
    }
    best
}

pub(crate) fn population_best(pop: &[Individual]) -> [f64; 2] {
    pop.iter().fold([0.0f64, 0.0f64], |acc, i| {
        [acc[0].max(i.objectives.tpr), acc[1].max(i.objectives.tnr)]
    })
}
