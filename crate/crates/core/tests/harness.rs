use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use urqt::graph::{DirectedNetwork, ModelParams, RateLevels, COMBOS};
use urqt::harness::{run_sweep, ExperimentConfig, NetworkSpec, Outcome, SUMMARY_HEADER};

fn urqt(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_urqt"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn small_config(n: usize) -> ExperimentConfig {
    ExperimentConfig {
        n,
        t_max: 20.0,
        dt: 0.5,
        subsample: 4,
        paths: 50,
        network: NetworkSpec::SmallWorld { k: 4, p: 0.2 },
        ..ExperimentConfig::default()
    }
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for sub in [dir.to_path_buf(), dir.join("trajectories")] {
        for e in fs::read_dir(&sub).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() {
                out.insert(
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

#[test]
fn spectral_reports_dies_out_when_column_sums_are_small() {
    let dir = tempfile::tempdir().unwrap();
    let g = DirectedNetwork::complete(4);
    // column sums 3 * 0.1 < theta = 0.5
    let p = ModelParams::uniform(g.clone(), g, [0.3, 0.1, 0.2, 0.2], 0.5, 0.4).unwrap();
    let params = dir.path().join("params.json");
    p.write_json(&params).unwrap();
    let config = dir.path().join("c.json");
    fs::write(&config, format!(r#"{{"params_path": {:?}}}"#, params)).unwrap();
    let (code, stdout, _) = urqt(&["spectral", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(json["verdict"], "DiesOut");
    assert_eq!(json["corollary_c"], true);
    assert!(json["s_q1"].as_f64().unwrap() < 0.0);
}

#[test]
fn simulate_then_compare_with_itself() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    fs::write(&config, small_config(15).to_json().unwrap()).unwrap();
    let out = dir.path().join("run");
    let (code, _, err) = urqt(&[
        "simulate",
        "--model",
        "linear",
        "--combo",
        "100",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let node = out.join("trajectory.csv");
    assert!(fs::read_to_string(&node)
        .unwrap()
        .starts_with("t,node,U,R,Q,T\n"));
    let agg = out.join("aggregate.csv");
    let (code, stdout, _) = urqt(&["compare", node.to_str().unwrap(), agg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    // the aggregate file is the node file averaged, up to 9-digit rounding
    assert!(json["sup_r_frac"].as_f64().unwrap() < 1e-8);
    let (_, stdout, _) = urqt(&["compare", agg.to_str().unwrap(), agg.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(json["sup_r_frac"].as_f64().unwrap(), 0.0);
}

#[test]
fn every_model_kind_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small_config(5);
    c.paths = 20;
    let config = dir.path().join("c.json");
    fs::write(&config, c.to_json().unwrap()).unwrap();
    for model in ["linear", "generic", "surqt", "exact", "ensemble"] {
        let (code, stdout, err) = urqt(&[
            "simulate",
            "--model",
            model,
            "--config",
            config.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{model}: {err}");
        assert!(stdout.contains("final_r_frac"));
    }
}

#[test]
fn usage_and_validation_errors() {
    let (code, _, err) = urqt(&["spectral", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("/nonexistent/cfg.json"));
    let (code, _, err) = urqt(&["sweep", "--frobnicate"]);
    assert_eq!(code, 1);
    assert!(err.contains("Usage"));
    assert_eq!(urqt(&["--help"]).0, 0);
    assert_eq!(urqt(&["simulate", "--model", "quantum"]).0, 1);
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    fs::write(&config, r#"{"classification_eps": 0.5}"#).unwrap();
    assert_eq!(urqt(&["sweep", "--config", config.to_str().unwrap()]).0, 1);
    // the exact solver refuses large networks
    assert_eq!(urqt(&["simulate", "--model", "exact"]).0, 1);
}

#[test]
fn generate_writes_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen");
    let (code, _, err) = urqt(&[
        "generate",
        "--seed",
        "3",
        "--combo",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let p = ModelParams::read_json(&out.join("params.json")).unwrap();
    assert_eq!(p.n(), 50);
    assert_eq!(
        DirectedNetwork::read_edge_list(&out.join("g_r.edges")).unwrap(),
        p.g_r
    );
    let cfg = ExperimentConfig::read(&out.join("config.json")).unwrap();
    assert_eq!((cfg.seed, cfg.combo), (3, 5));
}

#[test]
fn sweep_without_truth_to_rumor_spreading_dies_out() {
    let mut c = small_config(12);
    c.levels = RateLevels {
        beta_t: [0.0; 3],
        theta: [0.5, 0.7, 0.9],
        ..RateLevels::default()
    };
    c.subsample = 0;
    let reports = run_sweep(&c, None).unwrap();
    assert_eq!(reports.len(), COMBOS);
    for (k, r) in reports.iter().enumerate() {
        assert_eq!(r.combo, k);
        assert_eq!(r.outcome_linear, Outcome::DiesOut, "combo {k}");
        assert!(r.deviation.is_none());
    }
}

#[test]
fn sweep_is_reproducible_across_worker_counts() {
    let base = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for (k, workers) in [1, 4, 4].into_iter().enumerate() {
        let mut c = small_config(12);
        c.workers = Some(workers);
        let out = base.path().join(format!("run{k}"));
        let reports = run_sweep(&c, Some(&out)).unwrap();
        assert_eq!(reports.iter().filter(|r| r.deviation.is_some()).count(), 4);
        contents.push(dir_contents(&out));
    }
    assert_eq!(contents[0], contents[1]);
    assert_eq!(contents[1], contents[2]);
    let summary = String::from_utf8(contents[0]["sweep_summary.csv"].clone()).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some(SUMMARY_HEADER));
    assert_eq!(lines.count(), COMBOS);
}

#[test]
fn sweep_agrees_with_thresholds() {
    // default horizon and grid; only the network is smaller
    let c = ExperimentConfig {
        n: 20,
        subsample: 0,
        network: NetworkSpec::SmallWorld { k: 4, p: 0.2 },
        ..ExperimentConfig::default()
    };
    let reports = run_sweep(&c, None).unwrap();
    for r in &reports {
        if r.s_q1 < 0.0 {
            assert_eq!(r.outcome_linear, Outcome::DiesOut, "combo {}", r.combo);
        }
        if r.s_q2 > 0.0 {
            assert_eq!(r.outcome_linear, Outcome::Persists, "combo {}", r.combo);
        }
    }
}
