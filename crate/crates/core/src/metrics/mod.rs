//! Pareto utilities, the 2-D hypervolume indicator, rank-sum significance
//! testing and payoff tables.

mod hypervolume;
mod pareto;
mod payoff;
mod wilcoxon;

pub use hypervolume::hypervolume_2d;
pub use pareto::{accumulated_po_front, dominates, nondominated_filter, nondominated_indices, FrontPoint};
pub use payoff::{payoff_table, payoff_table_ordered, significantly_better, PayoffTable};
pub use wilcoxon::{midranks, wilcoxon_rank_sum, RankSumTest};

pub(crate) use payoff::mean;

/// Reference point for (TPR, TNR) hypervolumes.
pub const ORIGIN: [f64; 2] = [0.0, 0.0];

/// Sample standard deviation (n - 1); zero for fewer than two values.
pub fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}
