//! Pareto-dominance baselines: NSGA-II and SPEA2 on the shared GP representation.

mod nsga2;
mod sorting;
mod spea2;

pub use nsga2::{environmental_selection as nsga2_survival, run_nsga2, RankedPopulation};
pub use sorting::{crowding_distance, fast_nondominated_sort};
pub use spea2::{environmental_selection as spea2_selection, run_spea2, spea2_fitness, Spea2Archive, Spea2Fitness};
