use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use semgp::data::{read_feature_cache, write_idx, RawImageSet};

fn semgp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semgp"))
        .args(args)
        .env_remove("SEMGP_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn toy_experiment(dir: &Path) -> std::path::PathBuf {
    let mut csv = String::from("a,b,c,label\n");
    for i in 0..120 {
        let a = (i as f64 * 0.37).sin();
        let b = (i as f64 * 0.11).cos();
        let c = i as f64 / 120.0;
        csv.push_str(&format!("{a},{b},{c},{}\n", u8::from(a + c > 0.8)));
    }
    fs::write(dir.join("toy.csv"), csv).unwrap();
    let cfg = dir.join("exp.toml");
    fs::write(
        &cfg,
        r#"
population_size = 12
generations = 3
neighborhood_size = 4
runs = 2
variants = ["nsga2", "spea2", "moead-tch", "moead-tch-ssc"]
output_dir = "out"

[data]
format = "csv"
csv = "toy.csv"
"#,
    )
    .unwrap();
    cfg
}

#[test]
fn run_report_payoff_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = toy_experiment(tmp.path());
    let out = tmp.path().join("out");

    let o = semgp(&["run", "--config", cfg.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("8 completed"));
    let o = semgp(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("8 skipped"));

    let results = out.to_str().unwrap();
    let o = semgp(&["report", "--results", results, "--baseline", "moead-tch"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("SPEA2") && text.contains("vs MOEA/D-TCH"), "{text}");
    assert!(out.join("report.csv").exists());

    let o = semgp(&["payoff", "--results", results]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(out.join("payoff.csv")).unwrap().lines().count(), 5);

    let o = semgp(&["plot", "--results", results, "--digit", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out.join("fronts_digit0.svg")).unwrap().contains("<polyline"));
    assert!(out.join("fronts_digit0.csv").exists());

    let o = semgp(&["plot", "--results", results, "--digit", "4"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "crossover_rate = 0.7\nmutation_rate = 0.4\n").unwrap();
    let o = semgp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("crossover_rate") && err.contains("sum to 1"), "{err}");

    fs::write(&cfg, "ubss = 0\n").unwrap();
    assert_eq!(code(&semgp(&["run", "--config", cfg.to_str().unwrap()])), 1);
    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(code(&semgp(&["run", "--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn missing_data_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    fs::write(&cfg, "[data]\nimages = \"nope-images\"\nlabels = \"nope-labels\"\n").unwrap();
    assert_eq!(code(&semgp(&["run", "--config", cfg.to_str().unwrap()])), 2);
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&semgp(&["report", "--results", empty.to_str().unwrap()])), 2);
}

#[test]
fn features_subcommand_writes_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let set = RawImageSet {
        rows: 28,
        cols: 28,
        pixels: (0..3 * 784).map(|i| (i % 251) as u8).collect(),
        labels: vec![3, 1, 4],
    };
    let (img, lab) = write_idx(&set);
    let (ip, lp, cp) = (tmp.path().join("i"), tmp.path().join("l"), tmp.path().join("f.sgf"));
    fs::write(&ip, img).unwrap();
    fs::write(&lp, lab).unwrap();
    let o = semgp(&[
        "features",
        "--images",
        ip.to_str().unwrap(),
        "--labels",
        lp.to_str().unwrap(),
        "--out",
        cp.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let f = read_feature_cache(&cp).unwrap();
    assert_eq!((f.n_rows(), f.n_features()), (3, 18));

    fs::write(&lp, b"garbage").unwrap();
    let o = semgp(&[
        "features",
        "--images",
        ip.to_str().unwrap(),
        "--labels",
        lp.to_str().unwrap(),
        "--out",
        cp.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn plot_with_one_variant_is_partial() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = toy_experiment(tmp.path());
    let text = fs::read_to_string(&cfg).unwrap().replace(
        r#"variants = ["nsga2", "spea2", "moead-tch", "moead-tch-ssc"]"#,
        r#"variants = ["moead-tch"]"#,
    );
    fs::write(&cfg, text).unwrap();
    assert_eq!(code(&semgp(&["run", "--config", cfg.to_str().unwrap()])), 0);
    let o = semgp(&["plot", "--results", tmp.path().join("out").to_str().unwrap(), "--digit", "0"]);
    assert_eq!(code(&o), 3);
}
