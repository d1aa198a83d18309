use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

/// Two-sided Wilcoxon rank-sum (Mann-Whitney U) test result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSumTest {
    /// Mann-Whitney U of the first sample.
    pub u: f64,
    /// Continuity-corrected standard normal score.
    pub z: f64,
    pub p_value: f64,
}

/// Midranks (1-based) of `values`, ties sharing the average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Normal approximation with tie-corrected variance and 0.5 continuity
/// correction. A pooled sample with no spread yields `p = 1`.
///
/// # Panics
/// If either sample is empty.
pub fn wilcoxon_rank_sum(x: &[f64], y: &[f64]) -> RankSumTest {
    assert!(!x.is_empty() && !y.is_empty(), "samples must be non-empty");
    let n1 = x.len() as f64;
    let n2 = y.len() as f64;
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..x.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;

    let n = n1 + n2;
    let mut tie_term = 0.0;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance.is_nan() || variance <= 0.0 {
        return RankSumTest {
            u,
            z: 0.0,
            p_value: 1.0,
        };
    }
    let mean = n1 * n2 / 2.0;
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let p_value = erfc(z / std::f64::consts::SQRT_2).min(1.0);
    RankSumTest {
        u,
        z: z.copysign(u - mean),
        p_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midranks_with_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn identical_samples() {
        let x = [0.91, 0.92, 0.93, 0.90];
        let t = wilcoxon_rank_sum(&x, &x);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let c = [0.5; 10];
        assert_eq!(wilcoxon_rank_sum(&c, &c).p_value, 1.0);
    }

    #[test]
    fn complete_separation() {
        let x: Vec<f64> = (1..=30).map(f64::from).collect();
        let y: Vec<f64> = (31..=60).map(f64::from).collect();
        let t = wilcoxon_rank_sum(&x, &y);
        assert_eq!(t.u, 0.0);
        assert!(t.p_value < 1e-9 && t.p_value > 0.0, "{}", t.p_value);
        assert!(t.z < 0.0);
    }

    #[test]
    fn two_sided_symmetry() {
        let x = [0.1, 0.5, 0.3, 0.9, 0.7];
        let y = [0.2, 0.8, 0.6, 0.65, 0.95, 0.99];
        let a = wilcoxon_rank_sum(&x, &y);
        let b = wilcoxon_rank_sum(&y, &x);
        assert!((a.p_value - b.p_value).abs() < 1e-15);
        assert_eq!(a.u + b.u, 30.0);
    }
}
