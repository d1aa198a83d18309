use std::cmp::Ordering;
use std::time::Instant;

use crate::engine::{population_best, rng_streams, tournament, EngineRun, EvolutionParams, GenerationStats};
use crate::gp::{vary, Individual, PrimitiveSet};
use crate::metrics::dominates;
use crate::objectives::LabeledDataset;

/// Per-individual SPEA2 fitness terms; lower `fitness()` is better and
/// non-dominated individuals score below 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spea2Fitness {
    /// How many individuals this one dominates.
    pub strength: usize,
    /// Sum of the strengths of its dominators.
    pub raw: f64,
    /// `1 / (σ_k + 2)` with σ_k the distance to the k-th nearest neighbour.
    pub density: f64,
}

impl Spea2Fitness {
    pub fn fitness(&self) -> f64 {
        self.raw + self.density
    }
}

fn distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Strength, raw fitness and k-th-nearest density with `k = ⌊√n⌋`.
pub fn spea2_fitness(points: &[[f64; 2]]) -> Vec<Spea2Fitness> {
    let n = points.len();
    let strength: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| dominates(&points[i], &points[j])).count())
        .collect();
    let k = ((n as f64).sqrt().floor() as usize).clamp(1, n.saturating_sub(1).max(1));
    (0..n)
        .map(|i| {
            let raw = (0..n)
                .filter(|&j| dominates(&points[j], &points[i]))
                .map(|j| strength[j] as f64)
                .sum();
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| distance(&points[i], &points[j])).collect();
            let sigma = if d.is_empty() {
                0.0
            } else {
                let kth = (k - 1).min(d.len() - 1);
                *d.select_nth_unstable_by(kth, f64::total_cmp).1
            };
            Spea2Fitness {
                strength: strength[i],
                raw,
                density: 1.0 / (sigma + 2.0),
            }
        })
        .collect()
}

/// Indices forming the next archive of exactly `capacity` members (or all of
/// them when fewer exist): the non-dominated set, truncated by iteratively
/// dropping the member with the lexicographically smallest sorted
/// neighbour-distance list, or filled with the best dominated ones.
pub fn environmental_selection(points: &[[f64; 2]], fitness: &[Spea2Fitness], capacity: usize) -> Vec<usize> {
    let mut nondominated: Vec<usize> = (0..points.len()).filter(|&i| fitness[i].fitness() < 1.0).collect();
    if nondominated.len() <= capacity {
        let mut rest: Vec<usize> = (0..points.len()).filter(|&i| fitness[i].fitness() >= 1.0).collect();
        rest.sort_by(|&a, &b| fitness[a].fitness().total_cmp(&fitness[b].fitness()).then(a.cmp(&b)));
        let room = capacity - nondominated.len();
        nondominated.extend(rest.into_iter().take(room));
        return nondominated;
    }
    truncate(points, &nondominated, capacity)
}

fn truncate(points: &[[f64; 2]], members: &[usize], capacity: usize) -> Vec<usize> {
    let m = members.len();
    // neighbours[a] = (distance, b) sorted ascending, over local indices
    let neighbours: Vec<Vec<(f64, usize)>> = (0..m)
        .map(|a| {
            let mut v: Vec<(f64, usize)> = (0..m)
                .filter(|&b| b != a)
                .map(|b| (distance(&points[members[a]], &points[members[b]]), b))
                .collect();
            v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            v
        })
        .collect();
    let mut alive = vec![true; m];
    let mut remaining = m;

    let cmp = |a: usize, b: usize, alive: &[bool]| -> Ordering {
        let mut ia = neighbours[a].iter().filter(|(_, j)| alive[*j]);
        let mut ib = neighbours[b].iter().filter(|(_, j)| alive[*j]);
        loop {
            match (ia.next(), ib.next()) {
                (Some(x), Some(y)) => match x.0.total_cmp(&y.0) {
                    Ordering::Equal => continue,
                    o => return o,
                },
                _ => return a.cmp(&b),
            }
        }
    };

    while remaining > capacity {
        let mut worst = None;
        for a in (0..m).filter(|&a| alive[a]) {
            worst = match worst {
                None => Some(a),
                Some(w) if cmp(a, w, &alive) == Ordering::Less => Some(a),
                keep => keep,
            };
        }
        alive[worst.expect("non-empty")] = false;
        remaining -= 1;
    }
    (0..m).filter(|&a| alive[a]).map(|a| members[a]).collect()
}

/// Fixed-capacity archive with the fitness values used for mating.
#[derive(Clone, Debug, Default)]
pub struct Spea2Archive {
    pub members: Vec<Individual>,
    pub fitness: Vec<f64>,
}

impl Spea2Archive {
    /// Environmental selection over `archive ∪ population`.
    pub fn select(previous: Spea2Archive, population: Vec<Individual>, capacity: usize) -> Self {
        let combined: Vec<Individual> = previous.members.into_iter().chain(population).collect();
        let pts: Vec<[f64; 2]> = combined.iter().map(Individual::point).collect();
        let fit = spea2_fitness(&pts);
        let chosen = environmental_selection(&pts, &fit, capacity);
        let fitness = chosen.iter().map(|&i| fit[i].fitness()).collect();
        let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
        let members = chosen.into_iter().map(|i| slots[i].take().expect("unique")).collect();
        Self { members, fitness }
    }
}

pub fn run_spea2(params: &EvolutionParams, primitives: &PrimitiveSet, data: &LabeledDataset, seed: u64) -> EngineRun {
    let start = Instant::now();
    let (mut rng, _) = rng_streams(seed);
    let n = params.population_size;
    let mut population = params.initial_population(primitives, data, false, &mut rng);
    let mut archive = Spea2Archive::default();
    let mut stats = Vec::new();
    let mut ideal = [0.0f64, 0.0f64];

    for generation in 0..=params.generations {
        let best = population_best(&population);
        ideal = [ideal[0].max(best[0]), ideal[1].max(best[1])];
        archive = Spea2Archive::select(archive, std::mem::take(&mut population), n);
        stats.push(GenerationStats {
            generation,
            ideal,
            archive_size: archive.members.len(),
            best: population_best(&archive.members),
        });
        if generation == params.generations {
            break;
        }
        let size = archive.members.len();
        population = (0..n)
            .map(|_| {
                let a = tournament(size, params.tournament_size, &mut rng, |x, y| {
                    archive.fitness[x].total_cmp(&archive.fitness[y])
                });
                let b = tournament(size, params.tournament_size, &mut rng, |x, y| {
                    archive.fitness[x].total_cmp(&archive.fitness[y])
                });
                let child = vary(
                    &archive.members[a].tree,
                    &archive.members[b].tree,
                    primitives,
                    &params.variation,
                    &mut rng,
                );
                Individual::evaluate(child, data).without_semantics()
            })
            .collect();
    }

    EngineRun {
        population,
        archive: archive.members,
        stats,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lone_nondominated_has_zero_raw() {
        let pts = [[0.9, 0.9], [0.5, 0.1], [0.1, 0.5]];
        let f = spea2_fitness(&pts);
        assert_eq!(f[0].raw, 0.0);
        assert_eq!(f[0].strength, 2);
        assert_eq!(f[1].raw, 2.0);
        assert!(f[0].fitness() < 1.0 && f[1].fitness() >= 1.0);
    }

    #[test]
    fn exact_capacity_keeps_everyone() {
        let pts: Vec<[f64; 2]> = (0..10).map(|i| [i as f64 / 9.0, 1.0 - i as f64 / 9.0]).collect();
        let f = spea2_fitness(&pts);
        assert_eq!(environmental_selection(&pts, &f, 10), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn fill_takes_best_dominated() {
        let pts = [[0.9, 0.9], [0.5, 0.5], [0.1, 0.1]];
        let f = spea2_fitness(&pts);
        assert_eq!(environmental_selection(&pts, &f, 2), vec![0, 1]);
    }

    #[test]
    fn truncation_removes_crowded_points() {
        // 0.50/0.51 are nearly coincident; one of them must go.
        let pts = [[0.0, 1.0], [0.5, 0.5], [0.51, 0.49], [1.0, 0.0]];
        let f = spea2_fitness(&pts);
        let kept = environmental_selection(&pts, &f, 3);
        assert_eq!(kept.len(), 3);
        assert!(kept.contains(&0) && kept.contains(&3));
    }

    #[test]
    fn truncation_preserves_extremes_on_line() {
        let pts: Vec<[f64; 2]> = (0..21).map(|i| [i as f64 / 20.0, 1.0 - i as f64 / 20.0]).collect();
        let f = spea2_fitness(&pts);
        let kept = environmental_selection(&pts, &f, 5);
        assert_eq!(kept.len(), 5);
        assert!(kept.contains(&0) && kept.contains(&20));
    }

    proptest! {
        #[test]
        fn archive_is_nondominated_or_contains_front(
            raw in prop::collection::vec((0u8..8, 0u8..8), 1..40),
            capacity in 1usize..20,
        ) {
            let pts: Vec<[f64; 2]> = raw.iter().map(|&(a, b)| [a as f64 / 8.0, b as f64 / 8.0]).collect();
            let fit = spea2_fitness(&pts);
            let sel = environmental_selection(&pts, &fit, capacity);
            let nd: Vec<usize> = (0..pts.len())
                .filter(|&i| !pts.iter().any(|q| dominates(q, &pts[i])))
                .collect();
            prop_assert_eq!(sel.len(), capacity.min(pts.len()));
            if nd.len() >= capacity {
                prop_assert!(sel.iter().all(|i| nd.contains(i)));
            } else {
                prop_assert!(nd.iter().all(|i| sel.contains(i)));
            }
        }
    }
}
