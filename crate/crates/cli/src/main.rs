use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semgp::data::{extract_features, parse_idx, write_feature_cache, DataError, FeatureSpec};
use semgp::experiment::{
    build_report, load_config, load_results, payoff, plot_fronts, run_experiment, ExperimentError, ResultSet,
    Variant,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "semgp", version, about = "Multi-objective GP experiments on imbalanced classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) every cell of an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Parallel runs; overrides the config.
        #[arg(long, env = "SEMGP_WORKERS")]
        workers: Option<usize>,
    },
    /// Mean ± std and PO-front hypervolume per variant and digit.
    Report {
        #[arg(long)]
        results: PathBuf,
        /// Variant to mark significance against (e.g. moead-tch).
        #[arg(long)]
        baseline: Option<Variant>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Pairwise count of digits where the column variant beats the row variant.
    Payoff {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Accumulated PO fronts of one digit as SVG and CSV.
    Plot {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=9))]
        digit: u8,
        /// Output directory (defaults to the results directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract box features from IDX files into a feature cache.
    Features {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let code = match e {
            ExperimentError::Config(_) => EXIT_CONFIG,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure {
            code: EXIT_DATA,
            message: e.to_string(),
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_nonempty(dir: &Path) -> Result<ResultSet, Failure> {
    let results = load_results(dir)?;
    if results.runs.is_empty() {
        return Err(Failure {
            code: EXIT_DATA,
            message: format!("no completed runs in {}", dir.display()),
        });
    }
    Ok(results)
}

/// Success, or partial output when some cells failed or are missing.
fn finish(partial: bool) -> Result<u8, Failure> {
    Ok(if partial { EXIT_PARTIAL } else { 0 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Run { config, workers } => {
            let mut cfg = load_config(&config).map_err(ExperimentError::from)?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            cfg.validate().map_err(ExperimentError::from)?;
            let summary = run_experiment(&cfg)?;
            println!(
                "{} completed, {} skipped, {} failed -> {}",
                summary.completed.len(),
                summary.skipped.len(),
                summary.failed.len(),
                summary.results_path.display()
            );
            for k in &summary.failed {
                eprintln!("failed: {} digit {} run {}", k.variant, k.digit, k.run);
            }
            finish(summary.is_partial())
        }
        Command::Report {
            results,
            baseline,
            alpha,
        } => {
            let set = load_nonempty(&results)?;
            let report = build_report(&set, baseline, alpha);
            print!("{}", report.to_text());
            write(&results.join("report.csv"), &report.to_csv())?;
            for k in &set.errors {
                eprintln!("errored cell: {} digit {} run {}", k.variant, k.digit, k.run);
            }
            finish(!report.missing.is_empty() || !set.errors.is_empty())
        }
        Command::Payoff { results, alpha } => {
            let set = load_nonempty(&results)?;
            let table = payoff(&set, alpha);
            print!("{table}");
            write(&results.join("payoff.csv"), &table.to_csv())?;
            finish(set.variants().len() < Variant::ALL.len())
        }
        Command::Plot { results, digit, out } => {
            let set = load_results(&results)?;
            let plot = plot_fronts(&set, digit);
            for w in &plot.warnings {
                log::warn!("{w}");
            }
            if plot.fronts.is_empty() {
                return Err(Failure {
                    code: EXIT_DATA,
                    message: format!("no results for digit {digit} in {}", results.display()),
                });
            }
            let out = out.unwrap_or(results);
            fs::create_dir_all(&out).map_err(|e| Failure {
                code: EXIT_DATA,
                message: format!("{}: {e}", out.display()),
            })?;
            let svg = out.join(format!("fronts_digit{digit}.svg"));
            let csv = out.join(format!("fronts_digit{digit}.csv"));
            write(&svg, &plot.to_svg())?;
            write(&csv, &plot.to_csv())?;
            println!("{}\n{}", svg.display(), csv.display());
            finish(!plot.warnings.is_empty())
        }
        Command::Features { images, labels, out } => {
            let raw = parse_idx(&images, &labels)?;
            let features = extract_features(&raw, &FeatureSpec::default());
            write_feature_cache(&out, &features)?;
            println!(
                "{} images, {} features -> {}",
                features.n_rows(),
                features.n_features(),
                out.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
