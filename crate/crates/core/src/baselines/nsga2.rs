use std::cmp::Ordering;
use std::time::Instant;

use crate::engine::{population_best, rng_streams, tournament, EngineRun, EvolutionParams, GenerationStats};
use crate::gp::{vary, Individual, PrimitiveSet};
use crate::objectives::LabeledDataset;

use super::sorting::{crowding_distance, fast_nondominated_sort};

/// Front index and crowding distance for every member of a population.
#[derive(Clone, Debug)]
pub struct RankedPopulation {
    pub individuals: Vec<Individual>,
    pub rank: Vec<usize>,
    pub crowding: Vec<f64>,
}

impl RankedPopulation {
    pub fn new(individuals: Vec<Individual>) -> Self {
        let pts: Vec<[f64; 2]> = individuals.iter().map(Individual::point).collect();
        let mut rank = vec![0; pts.len()];
        let mut crowding = vec![0.0; pts.len()];
        for (r, front) in fast_nondominated_sort(&pts).iter().enumerate() {
            for (k, d) in crowding_distance(&pts, front).into_iter().enumerate() {
                rank[front[k]] = r;
                crowding[front[k]] = d;
            }
        }
        Self {
            individuals,
            rank,
            crowding,
        }
    }

    /// Crowded-comparison order: lower rank first, then larger crowding.
    pub fn crowded_cmp(&self, a: usize, b: usize) -> Ordering {
        self.rank[a]
            .cmp(&self.rank[b])
            .then(self.crowding[b].total_cmp(&self.crowding[a]))
    }
}

/// (μ+λ) survival: whole fronts while they fit, then the least crowded
/// members of the first front that does not.
pub fn environmental_selection(merged: Vec<Individual>, size: usize) -> Vec<Individual> {
    let pts: Vec<[f64; 2]> = merged.iter().map(Individual::point).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for front in fast_nondominated_sort(&pts) {
        if chosen.len() + front.len() <= size {
            chosen.extend_from_slice(&front);
            continue;
        }
        let d = crowding_distance(&pts, &front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(front[a].cmp(&front[b])));
        let room = size - chosen.len();
        chosen.extend(order.into_iter().take(room).map(|k| front[k]));
        break;
    }
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    chosen.into_iter().map(|i| slots[i].take().expect("unique")).collect()
}

pub fn run_nsga2(params: &EvolutionParams, primitives: &PrimitiveSet, data: &LabeledDataset, seed: u64) -> EngineRun {
    let start = Instant::now();
    let (mut rng, _) = rng_streams(seed);
    let n = params.population_size;
    let mut ranked = RankedPopulation::new(params.initial_population(primitives, data, false, &mut rng));
    let mut stats = vec![stats_for(0, &ranked.individuals)];

    for generation in 1..=params.generations {
        let mut offspring = Vec::with_capacity(n);
        for _ in 0..n {
            let a = tournament(n, params.tournament_size, &mut rng, |x, y| ranked.crowded_cmp(x, y));
            let b = tournament(n, params.tournament_size, &mut rng, |x, y| ranked.crowded_cmp(x, y));
            let child = vary(
                &ranked.individuals[a].tree,
                &ranked.individuals[b].tree,
                primitives,
                &params.variation,
                &mut rng,
            );
            offspring.push(Individual::evaluate(child, data).without_semantics());
        }
        let mut merged = ranked.individuals;
        merged.extend(offspring);
        ranked = RankedPopulation::new(environmental_selection(merged, n));
        stats.push(stats_for(generation, &ranked.individuals));
    }

    EngineRun {
        population: ranked.individuals,
        archive: Vec::new(),
        stats,
        elapsed: start.elapsed(),
    }
}

fn stats_for(generation: usize, pop: &[Individual]) -> GenerationStats {
    let best = population_best(pop);
    GenerationStats {
        generation,
        ideal: best,
        archive_size: 0,
        best,
    }
}
