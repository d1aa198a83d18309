use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{derive_seed, DataFormat, ExperimentConfig, Variant};
use super::ExperimentError;
use crate::baselines::{run_nsga2, run_spea2};
use crate::data::{
    build_binary_task, extract_features, load_csv, parse_idx, read_feature_cache, stratified_split,
    write_feature_cache, FeatureSpec,
};
use crate::engine::{EngineRun, GenerationStats};
use crate::gp::{evaluate, PrimitiveSet, ProgramTree};
use crate::metrics::{hypervolume_2d, nondominated_indices, FrontPoint, ORIGIN};
use crate::moead::{run_moead, SscCounters};
use crate::objectives::{confusion, LabeledDataset, Objectives};

pub const SCHEMA_VERSION: u32 = 1;
pub const RESULTS_FILE: &str = "results.jsonl";

/// Identifies one cell of the experiment grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RunKey {
    pub variant: Variant,
    pub digit: u8,
    pub run: u32,
}

/// A final-front program with its objectives on both splits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub program: ProgramTree,
    pub train: Objectives,
    pub test: Objectives,
}

/// An archive member as it stood at the end of training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchivedProgram {
    pub program: ProgramTree,
    pub train: Objectives,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    #[serde(flatten)]
    pub key: RunKey,
    pub seed: u64,
    pub config_hash: String,
    /// Test-set non-dominated front; `individual` indexes `solutions`.
    pub front: Vec<FrontPoint>,
    pub hypervolume: f64,
    pub solutions: Vec<Solution>,
    /// MOEA/D external population or SPEA2 archive.
    pub archive: Vec<ArchivedProgram>,
    pub generations: Vec<GenerationStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ssc: Option<SscCounters>,
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub schema_version: u32,
    #[serde(flatten)]
    pub key: RunKey,
    pub seed: u64,
    pub config_hash: String,
    pub message: String,
}

/// One line of `results.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Record {
    Ok(RunResult),
    Error(ErrorRecord),
}

impl Record {
    pub fn key(&self) -> RunKey {
        match self {
            Record::Ok(r) => r.key,
            Record::Error(e) => e.key,
        }
    }

    pub fn config_hash(&self) -> &str {
        match self {
            Record::Ok(r) => &r.config_hash,
            Record::Error(e) => &e.config_hash,
        }
    }
}

/// Train/test pair for one task key.
#[derive(Clone, Debug)]
pub struct Task {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

/// Builds the train/test pair for every task key of the config.
pub fn load_tasks(cfg: &ExperimentConfig) -> Result<BTreeMap<u8, Task>, ExperimentError> {
    let mut tasks = BTreeMap::new();
    match cfg.data.format {
        DataFormat::Csv => {
            let path = cfg.data.csv.as_ref().expect("validated");
            let all = load_csv(path, &cfg.data.label_column)?;
            let (train, test) = stratified_split(&all, cfg.data.split_seed);
            tasks.insert(0, Task { train, test });
        }
        DataFormat::Mnist => {
            let raw = parse_idx(&cfg.data.images, &cfg.data.labels)?;
            let spec = FeatureSpec::default();
            let features = match &cfg.data.feature_cache {
                Some(p) if p.exists() => {
                    let f = read_feature_cache(p)?;
                    if f.n_rows() != raw.len() {
                        return Err(crate::data::DataError::Inconsistent(format!(
                            "feature cache {} has {} rows, label file has {}",
                            p.display(),
                            f.n_rows(),
                            raw.len()
                        ))
                        .into());
                    }
                    f
                }
                cache => {
                    let f = extract_features(&raw, &spec);
                    if let Some(p) = cache {
                        write_feature_cache(p, &f)?;
                    }
                    f
                }
            };
            for &digit in &cfg.digits {
                let (train, test) =
                    build_binary_task(&raw.labels, &features, digit, cfg.data.per_digit, cfg.data.split_seed)?;
                tasks.insert(digit, Task { train, test });
            }
        }
    }
    Ok(tasks)
}

/// Runs one optimizer, scores its final front on the test set and packages
/// the result.
pub fn run_cell(cfg: &ExperimentConfig, key: RunKey, task: &Task, config_hash: &str) -> RunResult {
    let seed = derive_seed(cfg.base_seed, key.variant, key.digit, key.run);
    let primitives = PrimitiveSet::standard(task.train.n_features());
    let (run, ssc) = match key.variant {
        Variant::Nsga2 => (run_nsga2(&cfg.evolution_params(), &primitives, &task.train, seed), None),
        Variant::Spea2 => (run_spea2(&cfg.evolution_params(), &primitives, &task.train, seed), None),
        Variant::MoeadTch => {
            let (r, _) = run_moead(&cfg.moead_params(false), &primitives, &task.train, seed);
            (r, None)
        }
        Variant::MoeadTchSsc => {
            let (r, c) = run_moead(&cfg.moead_params(true), &primitives, &task.train, seed);
            (r, Some(c))
        }
    };
    let (solutions, front) = test_front(&run, &task.test);
    RunResult {
        schema_version: SCHEMA_VERSION,
        key,
        seed,
        config_hash: config_hash.to_string(),
        hypervolume: hypervolume_2d(&front.iter().map(FrontPoint::point).collect::<Vec<_>>(), ORIGIN),
        front,
        solutions,
        archive: run
            .archive
            .iter()
            .map(|i| ArchivedProgram {
                program: i.tree.clone(),
                train: i.objectives,
            })
            .collect(),
        generations: run.stats,
        ssc,
        wall_time_secs: run.elapsed.as_secs_f64(),
    }
}

/// Re-scores the training front on `test` and keeps the test-set maximal
/// points. Front points carry the run index 0; callers merging runs set it.
pub fn test_front(run: &EngineRun, test: &LabeledDataset) -> (Vec<Solution>, Vec<FrontPoint>) {
    let solutions: Vec<Solution> = run
        .final_front()
        .into_iter()
        .map(|ind| Solution {
            program: ind.tree.clone(),
            train: ind.objectives,
            test: confusion(&evaluate(&ind.tree, &test.features), &test.labels).objectives(),
        })
        .collect();
    let pts: Vec<[f64; 2]> = solutions.iter().map(|s| s.test.as_array()).collect();
    let front = nondominated_indices(&pts)
        .into_iter()
        .map(|i| FrontPoint {
            tpr: pts[i][0],
            tnr: pts[i][1],
            run: 0,
            individual: i as u32,
        })
        .collect();
    (solutions, front)
}

/// Reads every parseable record of `results.jsonl` in `dir`.
pub fn read_records(dir: &Path) -> Result<Vec<Record>, ExperimentError> {
    let path = dir.join(RESULTS_FILE);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = File::open(&path).map_err(|e| ExperimentError::io(&path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| ExperimentError::io(&path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(&line) {
            Ok(r) => out.push(r),
            // a torn final line from an interrupted run is dropped
            Err(e) => log::warn!("{}:{}: skipping unreadable record: {e}", path.display(), n + 1),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentSummary {
    pub completed: Vec<RunKey>,
    pub skipped: Vec<RunKey>,
    pub failed: Vec<RunKey>,
    pub results_path: PathBuf,
}

impl ExperimentSummary {
    pub fn is_partial(&self) -> bool {
        !self.failed.is_empty()
    }
}

/// Appends a newline if an interrupted write left the file without one.
fn terminate_last_line(path: &Path, mut file: &File) -> Result<(), ExperimentError> {
    let io = |e| ExperimentError::io(path, e);
    let len = file.metadata().map_err(io)?.len();
    if len == 0 {
        return Ok(());
    }
    let mut last = [0u8];
    let mut reader = File::open(path).map_err(io)?;
    reader.seek(SeekFrom::Start(len - 1)).map_err(io)?;
    reader.read_exact(&mut last).map_err(io)?;
    if last[0] != b'\n' {
        file.write_all(b"\n").map_err(|e| ExperimentError::io(path, e))?;
    }
    Ok(())
}

/// Every (variant, task, run) cell, in a fixed order.
pub fn plan(cfg: &ExperimentConfig) -> Vec<RunKey> {
    let mut keys = Vec::new();
    for &variant in &cfg.variants {
        for digit in cfg.tasks() {
            for run in 0..cfg.runs {
                keys.push(RunKey { variant, digit, run });
            }
        }
    }
    keys
}

/// Worker count: `SEMGP_WORKERS` if set, else the config, else all cores.
pub fn effective_workers(cfg: &ExperimentConfig) -> usize {
    std::env::var("SEMGP_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Loads data and runs every missing cell, appending one JSON line per cell.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    let tasks = load_tasks(cfg)?;
    run_experiment_with(cfg, &tasks)
}

/// As [`run_experiment`] with preloaded tasks.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    tasks: &BTreeMap<u8, Task>,
) -> Result<ExperimentSummary, ExperimentError> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let hash = cfg.config_hash();

    let existing = read_records(dir)?;
    if let Some(r) = existing.iter().find(|r| r.config_hash() != hash) {
        return Err(ExperimentError::Results(format!(
            "{} holds results from a different configuration (hash {}, expected {hash})",
            dir.display(),
            r.config_hash()
        )));
    }
    let done: HashSet<RunKey> = existing
        .iter()
        .filter(|r| matches!(r, Record::Ok(_)))
        .map(Record::key)
        .collect();

    let (skipped, todo): (Vec<RunKey>, Vec<RunKey>) = plan(cfg).into_iter().partition(|k| done.contains(k));
    let path = dir.join(RESULTS_FILE);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| ExperimentError::io(&path, e))?;
    terminate_last_line(&path, &file)?;
    let writer = Mutex::new(file);
    let workers = effective_workers(cfg);
    log::info!("{} cells to run, {} already done, {workers} workers", todo.len(), skipped.len());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExperimentError::Results(e.to_string()))?;
    let outcomes: Vec<Result<(RunKey, bool), ExperimentError>> = pool.install(|| {
        todo.par_iter()
            .map(|&key| {
                let task = &tasks[&key.digit];
                let record = match catch_unwind(AssertUnwindSafe(|| run_cell(cfg, key, task, &hash))) {
                    Ok(r) => {
                        log::info!(
                            "{} digit {} run {}: hv {:.4} ({:.1}s)",
                            key.variant,
                            key.digit,
                            key.run,
                            r.hypervolume,
                            r.wall_time_secs
                        );
                        Record::Ok(r)
                    }
                    Err(panic) => {
                        let message = panic
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_else(|| "engine panicked".into());
                        log::error!("{} digit {} run {} failed: {message}", key.variant, key.digit, key.run);
                        Record::Error(ErrorRecord {
                            schema_version: SCHEMA_VERSION,
                            key,
                            seed: derive_seed(cfg.base_seed, key.variant, key.digit, key.run),
                            config_hash: hash.clone(),
                            message,
                        })
                    }
                };
                let ok = matches!(record, Record::Ok(_));
                let mut line = serde_json::to_string(&record).expect("record serializes");
                line.push('\n');
                let mut f = writer.lock().unwrap_or_else(|p| p.into_inner());
                f.write_all(line.as_bytes())
                    .and_then(|_| f.flush())
                    .map_err(|e| ExperimentError::io(&path, e))?;
                Ok((key, ok))
            })
            .collect()
    });

    let mut summary = ExperimentSummary {
        skipped,
        results_path: path.clone(),
        ..Default::default()
    };
    for o in outcomes {
        let (key, ok) = o?;
        if ok {
            summary.completed.push(key);
        } else {
            summary.failed.push(key);
        }
    }
    Ok(summary)
}
