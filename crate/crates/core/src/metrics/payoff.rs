use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::wilcoxon::wilcoxon_rank_sum;

/// Pairwise win counts. `cells[row][col]` counts the tasks on which the
/// column strategy is significantly better than the row strategy; the
/// diagonal is `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    pub strategies: Vec<String>,
    pub cells: Vec<Vec<Option<u32>>>,
}

impl PayoffTable {
    pub fn cell(&self, row: &str, col: &str) -> Option<u32> {
        let r = self.strategies.iter().position(|s| s == row)?;
        let c = self.strategies.iter().position(|s| s == col)?;
        self.cells[r][c]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row\\col");
        for s in &self.strategies {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (r, name) in self.strategies.iter().enumerate() {
            out.push_str(name);
            for c in &self.cells[r] {
                out.push(',');
                if let Some(v) = c {
                    out.push_str(&v.to_string());
                } else {
                    out.push('-');
                }
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for PayoffTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.strategies.iter().map(String::len).max().unwrap_or(1).max(4);
        write!(f, "{:w$}", "", w = w)?;
        for s in &self.strategies {
            write!(f, "  {s:>w$}")?;
        }
        writeln!(f)?;
        for (r, name) in self.strategies.iter().enumerate() {
            write!(f, "{name:w$}")?;
            for c in &self.cells[r] {
                match c {
                    Some(v) => write!(f, "  {v:>w$}")?,
                    None => write!(f, "  {:>w$}", "-")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `samples[strategy][task]` holds per-run indicator values (higher is better).
/// Column B wins against row A on a task when B's mean is higher and the
/// rank-sum p-value is below `alpha`. Tasks missing for either strategy are skipped.
pub fn payoff_table(samples: &BTreeMap<String, BTreeMap<u8, Vec<f64>>>, alpha: f64) -> PayoffTable {
    payoff_table_ordered(&samples.keys().cloned().collect::<Vec<_>>(), samples, alpha)
}

/// As [`payoff_table`] with an explicit strategy order.
pub fn payoff_table_ordered(
    order: &[String],
    samples: &BTreeMap<String, BTreeMap<u8, Vec<f64>>>,
    alpha: f64,
) -> PayoffTable {
    let empty = BTreeMap::new();
    let n = order.len();
    let mut cells = vec![vec![None; n]; n];
    for (r, row) in order.iter().enumerate() {
        for (c, col) in order.iter().enumerate() {
            if r == c {
                continue;
            }
            let a = samples.get(row).unwrap_or(&empty);
            let b = samples.get(col).unwrap_or(&empty);
            let wins = a
                .iter()
                .filter_map(|(task, xa)| b.get(task).map(|xb| (xa, xb)))
                .filter(|(xa, xb)| significantly_better(xb, xa, alpha))
                .count();
            cells[r][c] = Some(wins as u32);
        }
    }
    PayoffTable {
        strategies: order.to_vec(),
        cells,
    }
}

/// `a` has the higher mean and the two-sided rank-sum test rejects at `alpha`.
pub fn significantly_better(a: &[f64], b: &[f64], alpha: f64) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    mean(a) > mean(b) && wilcoxon_rank_sum(a, b).p_value < alpha
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(spec: &[(&str, Vec<f64>)]) -> BTreeMap<String, BTreeMap<u8, Vec<f64>>> {
        spec.iter()
            .map(|(name, base)| {
                let per_task = (0..10u8)
                    .map(|d| (d, base.iter().map(|v| v + d as f64 * 0.001).collect()))
                    .collect();
                (name.to_string(), per_task)
            })
            .collect()
    }

    #[test]
    fn identical_samples_give_zero() {
        let s: Vec<f64> = (0..30).map(|i| 0.9 + i as f64 * 1e-3).collect();
        let g = grid(&[("a", s.clone()), ("b", s.clone()), ("c", s)]);
        let t = payoff_table(&g, 0.05);
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(t.cells[r][c], if r == c { None } else { Some(0) });
            }
        }
    }

    #[test]
    fn column_beats_row() {
        let lo: Vec<f64> = (0..30).map(|i| 0.80 + i as f64 * 1e-4).collect();
        let hi: Vec<f64> = (0..30).map(|i| 0.90 + i as f64 * 1e-4).collect();
        let g = grid(&[("canonical", lo), ("semantic", hi)]);
        let t = payoff_table(&g, 0.05);
        assert_eq!(t.cell("canonical", "semantic"), Some(10));
        assert_eq!(t.cell("semantic", "canonical"), Some(0));
        assert!(t.to_csv().starts_with("row\\col,canonical,semantic\n"));
    }

    proptest::proptest! {
        #[test]
        fn wins_are_one_sided_per_task(
            shifts in proptest::collection::vec(-0.05f64..0.05, 10),
            noise in proptest::collection::vec(0.0f64..0.02, 60),
        ) {
            let mut g: BTreeMap<String, BTreeMap<u8, Vec<f64>>> = BTreeMap::new();
            for (d, shift) in shifts.iter().enumerate() {
                let a: Vec<f64> = noise[..30].iter().map(|n| 0.8 + n).collect();
                let b: Vec<f64> = noise[30..].iter().map(|n| 0.8 + shift + n).collect();
                g.entry("a".into()).or_default().insert(d as u8, a.clone());
                g.entry("b".into()).or_default().insert(d as u8, b.clone());
                proptest::prop_assert!(!(significantly_better(&a, &b, 0.05) && significantly_better(&b, &a, 0.05)));
            }
            let t = payoff_table(&g, 0.05);
            let total = t.cell("a", "b").unwrap() + t.cell("b", "a").unwrap();
            proptest::prop_assert!(total <= 10);
        }
    }
}
