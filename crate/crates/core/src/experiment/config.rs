use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::EvolutionParams;
use crate::gp::{TreeLimits, VariationParams};
use crate::moead::{MatingSelection, MoeadParams, MoeadVariant, ReplacementTie};
use crate::semantics::{SemanticConfig, SscPairing};

/// The four compared optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "nsga2")]
    Nsga2,
    #[serde(rename = "spea2")]
    Spea2,
    #[serde(rename = "moead-tch")]
    MoeadTch,
    #[serde(rename = "moead-tch-ssc")]
    MoeadTchSsc,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Nsga2, Variant::Spea2, Variant::MoeadTch, Variant::MoeadTchSsc];

    pub fn key(&self) -> &'static str {
        match self {
            Variant::Nsga2 => "nsga2",
            Variant::Spea2 => "spea2",
            Variant::MoeadTch => "moead-tch",
            Variant::MoeadTchSsc => "moead-tch-ssc",
        }
    }

    /// Display name used in tables and plots.
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Nsga2 => "NSGA-II",
            Variant::Spea2 => "SPEA2",
            Variant::MoeadTch => "MOEA/D-TCH",
            Variant::MoeadTchSsc => "MOEA/D-TCH SSC",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.key() == s || v.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!(
                    "unknown variant `{s}` (expected one of {})",
                    Variant::ALL.map(|v| v.key()).join(", ")
                )
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    /// IDX image and label files, one-vs-rest per digit.
    Mnist,
    /// Headered CSV with a 0/1 label column; a single task keyed 0.
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub format: DataFormat,
    pub images: PathBuf,
    pub labels: PathBuf,
    /// Read features from here when present; written after extraction otherwise.
    pub feature_cache: Option<PathBuf>,
    pub per_digit: usize,
    pub csv: Option<PathBuf>,
    pub label_column: String,
    /// Seed for subsampling and the train/test split, shared by every run.
    pub split_seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            format: DataFormat::Mnist,
            images: PathBuf::from("data/mnist/train-images-idx3-ubyte"),
            labels: PathBuf::from("data/mnist/train-labels-idx1-ubyte"),
            feature_cache: None,
            per_digit: 6000,
            csv: None,
            label_column: "label".into(),
            split_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub internal_node_bias: f64,
    pub mutation_depth: usize,
    pub tournament_size: usize,
    pub init_min_depth: usize,
    pub init_max_depth: usize,
    pub max_length: usize,
    pub max_depth: usize,
    pub runs: u32,
    pub ubss: f64,
    pub max_trials: usize,
    pub neighborhood_size: usize,
    pub ssc_pairing: SscPairing,
    pub moead_mating: MatingSelection,
    pub replacement_tie: ReplacementTie,
    pub digits: Vec<u8>,
    pub variants: Vec<Variant>,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// Parallel cells; `None` uses every core.
    pub workers: Option<usize>,
    pub alpha: f64,
    pub data: DataConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let variation = VariationParams::default();
        let evolution = EvolutionParams::default();
        let ssc = SemanticConfig::default();
        Self {
            population_size: evolution.population_size,
            generations: evolution.generations,
            crossover_rate: variation.crossover_rate,
            mutation_rate: variation.mutation_rate,
            internal_node_bias: variation.internal_node_bias,
            mutation_depth: variation.mutation_depth,
            tournament_size: evolution.tournament_size,
            init_min_depth: evolution.init_min_depth,
            init_max_depth: evolution.init_max_depth,
            max_length: variation.limits.max_length,
            max_depth: variation.limits.max_depth,
            runs: 30,
            ubss: ssc.ubss,
            max_trials: ssc.max_trials,
            neighborhood_size: 20,
            ssc_pairing: SscPairing::Joint,
            moead_mating: MatingSelection::Neighborhood,
            replacement_tie: ReplacementTie::Replace,
            digits: (0..10).collect(),
            variants: Variant::ALL.to_vec(),
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            workers: None,
            alpha: 0.05,
            data: DataConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid `{key}` = {value}: {constraint}")]
    Invalid {
        key: String,
        value: String,
        constraint: String,
    },
}

fn invalid(key: &str, value: impl fmt::Display, constraint: &str) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        value: value.to_string(),
        constraint: constraint.into(),
    }
}

/// Parses a TOML config, fills defaults and validates it. Relative data and
/// output paths are resolved against the config file's directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })?;
    if let Some(base) = path.parent() {
        cfg.resolve_paths(base);
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        fix(&mut self.data.images);
        fix(&mut self.data.labels);
        if let Some(p) = self.data.feature_cache.as_mut() {
            fix(p);
        }
        if let Some(p) = self.data.csv.as_mut() {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
            ("internal_node_bias", self.internal_node_bias),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(key, v, "must lie in [0, 1]"));
            }
        }
        let sum = self.crossover_rate + self.mutation_rate;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(invalid(
                "crossover_rate + mutation_rate",
                format!("{} + {} = {sum}", self.crossover_rate, self.mutation_rate),
                "rates must sum to 1",
            ));
        }
        if self.ubss.is_nan() || self.ubss <= 0.0 {
            return Err(invalid("ubss", self.ubss, "must be > 0"));
        }
        if self.population_size < 2 {
            return Err(invalid("population_size", self.population_size, "must be at least 2"));
        }
        if self.neighborhood_size == 0 || self.neighborhood_size > self.population_size {
            return Err(invalid(
                "neighborhood_size",
                self.neighborhood_size,
                &format!("must lie in 1..={} (population_size)", self.population_size),
            ));
        }
        if self.tournament_size == 0 {
            return Err(invalid("tournament_size", 0, "must be at least 1"));
        }
        if self.max_trials == 0 {
            return Err(invalid("max_trials", 0, "must be at least 1"));
        }
        if self.init_min_depth == 0 {
            return Err(invalid("init_min_depth", 0, "must be at least 1"));
        }
        if self.init_max_depth < self.init_min_depth {
            return Err(invalid(
                "init_max_depth",
                self.init_max_depth,
                &format!("must be >= init_min_depth ({})", self.init_min_depth),
            ));
        }
        if self.init_max_depth > self.max_depth {
            return Err(invalid(
                "init_max_depth",
                self.init_max_depth,
                &format!("must be <= max_depth ({})", self.max_depth),
            ));
        }
        if self.mutation_depth > self.max_depth {
            return Err(invalid(
                "mutation_depth",
                self.mutation_depth,
                &format!("must be <= max_depth ({})", self.max_depth),
            ));
        }
        // a full tree of depth d has 2^(d+1) - 1 nodes
        let smallest_full = (1usize << (self.init_min_depth + 1).min(60)) - 1;
        if self.max_length < smallest_full {
            return Err(invalid(
                "max_length",
                self.max_length,
                &format!("must admit a full tree of init_min_depth ({smallest_full} nodes)"),
            ));
        }
        if self.runs == 0 {
            return Err(invalid("runs", 0, "must be at least 1"));
        }
        if self.digits.is_empty() {
            return Err(invalid("digits", "[]", "must not be empty"));
        }
        if let Some(d) = self.digits.iter().find(|&&d| d > 9) {
            return Err(invalid("digits", d, "digits lie in 0..=9"));
        }
        if self.variants.is_empty() {
            return Err(invalid("variants", "[]", "must not be empty"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", 0, "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha", self.alpha, "must lie in (0, 1)"));
        }
        if self.data.format == DataFormat::Mnist && self.data.per_digit < 2 {
            return Err(invalid("data.per_digit", self.data.per_digit, "must be at least 2"));
        }
        if self.data.format == DataFormat::Csv && self.data.csv.is_none() {
            return Err(invalid("data.csv", "(unset)", "required when data.format = \"csv\""));
        }
        Ok(())
    }

    /// Task keys: the configured digits, or the single key 0 for CSV data.
    pub fn tasks(&self) -> Vec<u8> {
        match self.data.format {
            DataFormat::Mnist => self.digits.clone(),
            DataFormat::Csv => vec![0],
        }
    }

    pub fn variation_params(&self) -> VariationParams {
        VariationParams {
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            internal_node_bias: self.internal_node_bias,
            mutation_depth: self.mutation_depth,
            limits: TreeLimits {
                max_depth: self.max_depth,
                max_length: self.max_length,
            },
        }
    }

    pub fn evolution_params(&self) -> EvolutionParams {
        EvolutionParams {
            population_size: self.population_size,
            generations: self.generations,
            tournament_size: self.tournament_size,
            init_min_depth: self.init_min_depth,
            init_max_depth: self.init_max_depth,
            variation: self.variation_params(),
        }
    }

    pub fn semantic_config(&self) -> SemanticConfig {
        SemanticConfig {
            ubss: self.ubss,
            max_trials: self.max_trials,
            pairing: self.ssc_pairing,
        }
    }

    pub fn moead_params(&self, semantic: bool) -> MoeadParams {
        MoeadParams {
            evolution: self.evolution_params(),
            neighborhood_size: self.neighborhood_size,
            mating: self.moead_mating,
            replacement_tie: self.replacement_tie,
            variant: if semantic {
                MoeadVariant::Semantic(self.semantic_config())
            } else {
                MoeadVariant::Canonical
            },
        }
    }

    /// SHA-256 over the settings that affect results; output location,
    /// worker count and run count are excluded so resumed or extended
    /// experiments keep matching.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        canonical.workers = None;
        canonical.runs = 0;
        canonical.digits.clear();
        canonical.variants.clear();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// `base_seed` XOR the first eight bytes of SHA-256("variant/task/run").
pub fn derive_seed(base_seed: u64, variant: Variant, task: u8, run: u32) -> u64 {
    let digest = Sha256::digest(format!("{}/{task}/{run}", variant.key()).as_bytes());
    base_seed ^ u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}
