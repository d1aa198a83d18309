use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::config::Variant;
use super::runner::{Record, RunKey, RunResult};
use crate::metrics::{
    accumulated_po_front, hypervolume_2d, payoff_table_ordered, sample_std, significantly_better, FrontPoint,
    PayoffTable, ORIGIN,
};

/// Successful runs, one per key (the last record written wins), plus the
/// keys whose only records are errors.
#[derive(Clone, Debug, Default)]
pub struct ResultSet {
    pub runs: BTreeMap<RunKey, RunResult>,
    pub errors: BTreeSet<RunKey>,
}

impl ResultSet {
    pub fn from_records(records: impl IntoIterator<Item = Record>) -> Self {
        let mut set = ResultSet::default();
        for r in records {
            match r {
                Record::Ok(run) => {
                    set.errors.remove(&run.key);
                    set.runs.insert(run.key, run);
                }
                Record::Error(e) => {
                    if !set.runs.contains_key(&e.key) {
                        set.errors.insert(e.key);
                    }
                }
            }
        }
        set
    }

    pub fn variants(&self) -> Vec<Variant> {
        let set: BTreeSet<Variant> = self.runs.keys().map(|k| k.variant).collect();
        set.into_iter().collect()
    }

    pub fn digits(&self) -> Vec<u8> {
        let set: BTreeSet<u8> = self.runs.keys().map(|k| k.digit).collect();
        set.into_iter().collect()
    }

    pub fn cell(&self, variant: Variant, digit: u8) -> impl Iterator<Item = &RunResult> {
        self.runs
            .values()
            .filter(move |r| r.key.variant == variant && r.key.digit == digit)
    }

    /// Per-run hypervolumes of one cell, in run order.
    pub fn hypervolumes(&self, variant: Variant, digit: u8) -> Vec<f64> {
        self.cell(variant, digit).map(|r| r.hypervolume).collect()
    }

    /// Accumulated PO front of one cell; `run` on each point is the source run.
    pub fn po_front(&self, variant: Variant, digit: u8) -> Vec<FrontPoint> {
        let fronts: Vec<Vec<FrontPoint>> = self
            .cell(variant, digit)
            .map(|r| {
                r.front
                    .iter()
                    .map(|p| FrontPoint { run: r.key.run, ..*p })
                    .collect()
            })
            .collect();
        accumulated_po_front(&fronts)
    }

    /// Strategy label → digit → per-run hypervolumes.
    pub fn samples(&self) -> BTreeMap<String, BTreeMap<u8, Vec<f64>>> {
        let mut out: BTreeMap<String, BTreeMap<u8, Vec<f64>>> = BTreeMap::new();
        for r in self.runs.values() {
            out.entry(r.key.variant.label().to_string())
                .or_default()
                .entry(r.key.digit)
                .or_default()
                .push(r.hypervolume);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub variant: Variant,
    pub digit: u8,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub po_hypervolume: f64,
    /// `+` significantly better than the baseline, `-` significantly worse.
    pub marker: Option<char>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub baseline: Option<Variant>,
    pub rows: Vec<ReportRow>,
    /// Grid cells (observed variants × observed digits) without a result.
    pub missing: Vec<(Variant, u8)>,
}

pub fn build_report(results: &ResultSet, baseline: Option<Variant>, alpha: f64) -> Report {
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for digit in results.digits() {
        let base = baseline.map(|b| results.hypervolumes(b, digit));
        for variant in results.variants() {
            let hv = results.hypervolumes(variant, digit);
            if hv.is_empty() {
                missing.push((variant, digit));
                continue;
            }
            let po: Vec<[f64; 2]> = results.po_front(variant, digit).iter().map(FrontPoint::point).collect();
            let marker = match &base {
                Some(b) if Some(variant) != baseline && !b.is_empty() => {
                    if significantly_better(&hv, b, alpha) {
                        Some('+')
                    } else if significantly_better(b, &hv, alpha) {
                        Some('-')
                    } else {
                        None
                    }
                }
                _ => None,
            };
            rows.push(ReportRow {
                variant,
                digit,
                runs: hv.len(),
                mean: hv.iter().sum::<f64>() / hv.len() as f64,
                std: sample_std(&hv),
                po_hypervolume: hypervolume_2d(&po, ORIGIN),
                marker,
            });
        }
    }
    Report {
        baseline,
        rows,
        missing,
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<6} {:<16} {:>5} {:>17} {:>9}  {}",
            "digit",
            "variant",
            "runs",
            "hypervolume",
            "PO front",
            self.baseline.map_or(String::new(), |b| format!("vs {}", b.label()))
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<6} {:<16} {:>5} {:>9.3} ± {:<5.3} {:>9.3}  {}",
                r.digit,
                r.variant.label(),
                r.runs,
                r.mean,
                r.std,
                r.po_hypervolume,
                r.marker.map(String::from).unwrap_or_default()
            );
        }
        for (v, d) in &self.missing {
            let _ = writeln!(out, "missing: {} digit {d}", v.label());
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("digit,variant,runs,mean,std,po_hypervolume,marker\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.digit,
                r.variant.key(),
                r.runs,
                r.mean,
                r.std,
                r.po_hypervolume,
                r.marker.map(String::from).unwrap_or_default()
            );
        }
        out
    }
}

/// Payoff table over every variant present, in canonical variant order.
pub fn payoff(results: &ResultSet, alpha: f64) -> PayoffTable {
    let order: Vec<String> = results.variants().iter().map(|v| v.label().to_string()).collect();
    payoff_table_ordered(&order, &results.samples(), alpha)
}
