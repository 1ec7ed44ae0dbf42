//! Command line front end. [`run`] parses arguments, executes one subcommand
//! and returns the process exit status.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::{run_sweep, sup_deviation, ExperimentConfig, ModelKind, Outcome};
use crate::ctmc::{ensemble_average, point_mass, solve_exact, NodeState};
use crate::dynamics::{
    init_from_state, integrate_generic, integrate_linear, integrate_surqt, RtInit,
};
use crate::error::{Error, Result};
use crate::graph::ModelParams;
use crate::spectral::spectral_report;
use crate::trajectory::{Aggregate, Trajectory};

#[derive(Debug, Parser)]
#[command(name = "urqt", about = "Rumor and truth spreading on social networks")]
struct Cli {
    /// Base seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the networks and the parameters of one combo to files.
    Generate {
        #[arg(long)]
        combo: Option<usize>,
    },
    /// Run one model and write its trajectory CSVs.
    Simulate {
        #[arg(long, value_parser = parse_model)]
        model: Option<ModelKind>,
        #[arg(long)]
        combo: Option<usize>,
        /// Parameter JSON to use instead of a sampled combo.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Print the threshold report as JSON.
    Spectral {
        #[arg(long)]
        combo: Option<usize>,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Skip the rumor equilibrium search.
        #[arg(long)]
        no_equilibrium: bool,
    },
    /// Run the full factorial study.
    Sweep,
    /// Deviation statistics between two trajectory CSVs.
    Compare { a: PathBuf, b: PathBuf },
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown model {s:?} (linear, generic, surqt, exact, ensemble)"))
}

/// Parses `argv` (program name first) and runs the selected subcommand.
/// Returns 0 on success, 1 for usage and validation errors, 2 for numerical
/// failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::read(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    Ok(config)
}

fn out_dir(cli: &Cli) -> Result<Option<&Path>> {
    if let Some(d) = &cli.out {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    Ok(cli.out.as_deref())
}

fn write(path: PathBuf, text: &str) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn resolve_params(
    config: &ExperimentConfig,
    params: Option<&Path>,
    combo: Option<usize>,
) -> Result<ModelParams> {
    if let Some(p) = params.or(config.params_path.as_deref()) {
        return ModelParams::read_json(p);
    }
    let combo = combo.unwrap_or(config.combo);
    let nets = config.networks()?;
    config.params_for_combo(&nets, combo)
}

fn print_json<S: Serialize>(value: &S) -> Result<String> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    Ok(text)
}

fn execute(cli: Cli) -> Result<()> {
    let mut config = load_config(&cli)?;
    let out = out_dir(&cli)?;
    match &cli.command {
        Command::Generate { combo } => {
            let dir = out.ok_or_else(|| Error::param("generate needs --out"))?;
            if let Some(c) = combo {
                config.combo = *c;
            }
            config.validate()?;
            let nets = config.networks()?;
            let params = config.params_for_combo(&nets, config.combo)?;
            nets.0.write_edge_list(&dir.join("g_r.edges"))?;
            nets.1.write_edge_list(&dir.join("g_t.edges"))?;
            params.write_json(&dir.join("params.json"))?;
            write(dir.join("config.json"), &config.to_json()?)?;
            println!(
                "wrote {} nodes, combo {} to {}",
                params.n(),
                config.combo,
                dir.display()
            );
        }
        Command::Simulate {
            model,
            combo,
            params,
        } => {
            if let Some(m) = model {
                config.model = *m;
            }
            if let Some(c) = combo {
                config.combo = *c;
            }
            config.validate()?;
            let p = resolve_params(&config, params.as_deref(), None)?;
            let traj = config.install(|| simulate(&config, &p))??;
            let outcome = super::classify_outcome(&traj, config.classification_eps)?;
            if let Some(dir) = out {
                traj.write_node_csv(&dir.join("trajectory.csv"))?;
                traj.write_aggregate_csv(&dir.join("aggregate.csv"))?;
            }
            print_json(&SimulateSummary {
                model: config.model,
                n: p.n(),
                final_r_frac: *traj.r_frac.last().unwrap_or(&0.0),
                final_t_frac: *traj.t_frac.last().unwrap_or(&0.0),
                outcome,
            })?;
        }
        Command::Spectral {
            combo,
            params,
            no_equilibrium,
        } => {
            config.validate()?;
            let p = resolve_params(&config, params.as_deref(), *combo)?;
            let family = config.family(&p)?;
            let report = spectral_report(&p, &family, !no_equilibrium)?;
            let text = print_json(&report)?;
            if let Some(dir) = out {
                write(dir.join("spectral_report.json"), &text)?;
            }
        }
        Command::Sweep => {
            let reports = run_sweep(&config, out)?;
            let dies = reports
                .iter()
                .filter(|r| r.outcome_linear == Outcome::DiesOut)
                .count();
            println!(
                "{} combos: {} DiesOut, {} Persists, {} with ensembles",
                reports.len(),
                dies,
                reports.len() - dies,
                reports.iter().filter(|r| r.deviation.is_some()).count()
            );
        }
        Command::Compare { a, b } => {
            let stats = compare(&Aggregate::read(a)?, &Aggregate::read(b)?)?;
            let text = print_json(&stats)?;
            if let Some(dir) = out {
                write(dir.join("compare.json"), &text)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateSummary {
    model: ModelKind,
    n: usize,
    final_r_frac: f64,
    final_t_frac: f64,
    outcome: Outcome,
}

/// Runs the configured model from the combo's seeded outbreak. The
/// simplified model has no uncertain nodes, so they start as believers.
pub fn simulate(config: &ExperimentConfig, params: &ModelParams) -> Result<Trajectory> {
    let tgrid = config.tgrid()?;
    let init = config.initial_state(params.n(), config.combo)?;
    match config.model {
        ModelKind::Linear => integrate_linear(params, &init_from_state(&init), &tgrid),
        ModelKind::Generic => integrate_generic(
            params,
            &config.family(params)?,
            &init_from_state(&init),
            &tgrid,
        ),
        ModelKind::Surqt => {
            let rt: Vec<RtInit> = init
                .0
                .iter()
                .map(|s| match s {
                    NodeState::Rumor => RtInit { r: 1.0, t: 0.0 },
                    NodeState::Quarantined => RtInit { r: 0.0, t: 0.0 },
                    _ => RtInit { r: 0.0, t: 1.0 },
                })
                .collect();
            integrate_surqt(params, &config.family(params)?, &rt, &tgrid)
        }
        ModelKind::Exact => solve_exact(params, &point_mass(&init)?, &tgrid),
        ModelKind::Ensemble => ensemble_average(
            params,
            &init,
            &tgrid,
            config.paths,
            config.ensemble_seed(config.combo),
        ),
    }
}

/// Deviation statistics between two aggregate series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareStats {
    pub points: usize,
    pub sup_r_frac: f64,
    pub sup_t_frac: f64,
    pub mean_abs_r_frac: f64,
}

pub fn compare(a: &Aggregate, b: &Aggregate) -> Result<CompareStats> {
    if a.tgrid.len() != b.tgrid.len()
        || a.tgrid
            .iter()
            .zip(&b.tgrid)
            .any(|(x, y)| (x - y).abs() > 1e-9)
    {
        return Err(Error::param("trajectories are on different time grids"));
    }
    let points = a.tgrid.len();
    let mean_abs_r_frac = if points == 0 {
        0.0
    } else {
        a.r_frac
            .iter()
            .zip(&b.r_frac)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
            / points as f64
    };
    Ok(CompareStats {
        points,
        sup_r_frac: sup_deviation(&a.r_frac, &b.r_frac)?,
        sup_t_frac: sup_deviation(&a.t_frac, &b.t_frac)?,
        mean_abs_r_frac,
    })
}
