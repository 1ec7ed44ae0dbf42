//! Parameter sweeps comparing the linear model with ensemble averages of the
//! exact chain, plus the command line front end in [`cli`].

pub mod cli;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ctmc::{ensemble_average, OsnState};
use crate::dynamics::{init_from_state, integrate_linear, RateFamily, RateKind};
use crate::error::{Error, Result};
use crate::graph::{
    generate_scale_free, generate_small_world, sample_params, DirectedNetwork, ModelParams,
    RateLevels, COMBOS,
};
use crate::ode::uniform_grid;
use crate::seed::derive_seed;
use crate::spectral::{spectral_report, Verdict};
use crate::trajectory::{fmt_sig, Trajectory};

// Independent random streams derived from the base seed.
const STREAM_NET_R: u64 = 1;
const STREAM_NET_T: u64 = 2;
const STREAM_PARAMS: u64 = 3;
const STREAM_INIT: u64 = 4;
const STREAM_ENSEMBLE: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkSpec {
    ScaleFree { m: usize },
    SmallWorld { k: usize, p: f64 },
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec::ScaleFree { m: 2 }
    }
}

impl NetworkSpec {
    pub fn generate(&self, n: usize, seed: u64) -> Result<DirectedNetwork> {
        match *self {
            NetworkSpec::ScaleFree { m } => generate_scale_free(n, m, seed),
            NetworkSpec::SmallWorld { k, p } => generate_small_world(n, k, p, seed),
        }
    }
}

/// Which model a single `simulate` run integrates or samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Linear,
    Generic,
    Surqt,
    Exact,
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    #[default]
    Linear,
    Saturating,
}

/// Configuration shared by every subcommand. Missing keys take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSpec,
    pub n: usize,
    /// Generate independent rumor and truth networks instead of sharing one.
    pub distinct_networks: bool,
    pub levels: RateLevels,
    /// Ensemble size for subsampled combos and `simulate --model ensemble`.
    #[serde(rename = "M")]
    pub paths: usize,
    pub t_max: f64,
    pub dt: f64,
    pub seed: u64,
    pub classification_eps: f64,
    /// Number of combos that also get an ensemble run.
    pub subsample: usize,
    /// Combo used by `simulate` and `spectral` when no parameter file is given.
    pub combo: usize,
    pub params_path: Option<PathBuf>,
    pub model: ModelKind,
    pub rate_family: FamilyKind,
    pub saturation_c: f64,
    /// Rayon worker count; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            network: NetworkSpec::default(),
            n: 50,
            distinct_networks: false,
            levels: RateLevels::default(),
            paths: 1000,
            t_max: 50.0,
            dt: 0.1,
            seed: 1,
            classification_eps: 1e-3,
            subsample: 20,
            combo: 0,
            params_path: None,
            model: ModelKind::Linear,
            rate_family: FamilyKind::Linear,
            saturation_c: 1.0,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n must be at least 2"));
        }
        if self.paths < 1 {
            return Err(Error::param("M must be at least 1"));
        }
        if !(self.t_max > 0.0 && self.dt > 0.0) {
            return Err(Error::param("t_max and dt must be positive"));
        }
        if !(self.classification_eps > 0.0 && self.classification_eps <= 0.1) {
            return Err(Error::param("classification_eps must lie in (0, 0.1]"));
        }
        if self.combo >= COMBOS {
            return Err(Error::param(format!("combo must be below {COMBOS}")));
        }
        if self.subsample > COMBOS {
            return Err(Error::param(format!("subsample must not exceed {COMBOS}")));
        }
        if !(self.saturation_c > 0.0) {
            return Err(Error::param("saturation_c must be positive"));
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers must be positive"));
        }
        match self.network {
            NetworkSpec::ScaleFree { m: 0 } => {
                Err(Error::param("scale-free m must be positive"))
            }
            NetworkSpec::SmallWorld { k, p } if k == 0 || !(0.0..=1.0).contains(&p) => {
                Err(Error::param("small-world needs k > 0 and p in [0, 1]"))
            }
            _ => self.levels.validate(),
        }
    }

    pub fn tgrid(&self) -> Result<Vec<f64>> {
        uniform_grid(self.t_max, self.dt)
    }

    /// Rumor and truth networks for this configuration.
    pub fn networks(&self) -> Result<(DirectedNetwork, DirectedNetwork)> {
        let g_r = self
            .network
            .generate(self.n, derive_seed(self.seed, STREAM_NET_R))?;
        let g_t = if self.distinct_networks {
            self.network
                .generate(self.n, derive_seed(self.seed, STREAM_NET_T))?
        } else {
            g_r.clone()
        };
        Ok((g_r, g_t))
    }

    pub fn params_for_combo(
        &self,
        nets: &(DirectedNetwork, DirectedNetwork),
        combo: usize,
    ) -> Result<ModelParams> {
        sample_params(
            &nets.0,
            &nets.1,
            &self.levels,
            combo,
            derive_seed(self.seed, STREAM_PARAMS),
        )
    }

    /// Initial joint state of a combo: one spreader and one believer.
    pub fn initial_state(&self, n: usize, combo: usize) -> Result<OsnState> {
        OsnState::seeded_outbreak(
            n,
            derive_seed(derive_seed(self.seed, STREAM_INIT), combo as u64),
        )
    }

    pub fn ensemble_seed(&self, combo: usize) -> u64 {
        derive_seed(derive_seed(self.seed, STREAM_ENSEMBLE), combo as u64)
    }

    pub fn family(&self, params: &ModelParams) -> Result<RateFamily> {
        let kind = match self.rate_family {
            FamilyKind::Linear => RateKind::Linear,
            FamilyKind::Saturating => RateKind::Saturating {
                c: self.saturation_c,
            },
        };
        RateFamily::new(params, kind)
    }

    /// Runs `f` on a dedicated pool when `workers` is set.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(f()),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map(|pool| pool.install(f))
                .map_err(|e| Error::Numerical(format!("thread pool: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    DiesOut,
    Persists,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::DiesOut => "DiesOut",
            Outcome::Persists => "Persists",
        }
    }
}

/// Mean rumor fraction over the last 10% of the covered horizon.
pub fn tail_mean(tgrid: &[f64], r_frac: &[f64]) -> Result<f64> {
    if tgrid.is_empty() || tgrid.len() != r_frac.len() {
        return Err(Error::param("cannot classify an empty trajectory"));
    }
    let (t0, t1) = (tgrid[0], tgrid[tgrid.len() - 1]);
    let cut = t1 - 0.1 * (t1 - t0);
    let tail: Vec<f64> = tgrid
        .iter()
        .zip(r_frac)
        .filter(|(t, _)| **t >= cut - 1e-12)
        .map(|(_, r)| *r)
        .collect();
    Ok(tail.iter().sum::<f64>() / tail.len() as f64)
}

/// `DiesOut` iff the tail mean of the rumor fraction is below `eps`.
pub fn classify_outcome(traj: &Trajectory, eps: f64) -> Result<Outcome> {
    classify_fractions(&traj.tgrid, &traj.r_frac, eps)
}

pub fn classify_fractions(tgrid: &[f64], r_frac: &[f64], eps: f64) -> Result<Outcome> {
    if !(eps > 0.0) {
        return Err(Error::param("classification threshold must be positive"));
    }
    Ok(if tail_mean(tgrid, r_frac)? < eps {
        Outcome::DiesOut
    } else {
        Outcome::Persists
    })
}

/// Largest pointwise gap between two rumor-fraction series on the same grid.
pub fn sup_deviation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::param("series lengths differ"));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub combo: usize,
    pub s_q1: f64,
    pub s_q2: f64,
    pub verdict: Verdict,
    pub outcome_linear: Outcome,
    pub tail_linear: f64,
    pub outcome_exact: Option<Outcome>,
    pub deviation: Option<f64>,
    pub trajectories: Vec<PathBuf>,
}

impl ComparisonReport {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.combo,
            fmt_sig(self.s_q1),
            fmt_sig(self.s_q2),
            self.verdict.as_str(),
            self.outcome_linear.as_str(),
            self.outcome_exact.map(Outcome::as_str).unwrap_or(""),
            self.deviation.map(fmt_sig).unwrap_or_default()
        )
    }
}

pub const SUMMARY_HEADER: &str = "combo,s_q1,s_q2,verdict,outcome_linear,outcome_exact,deviation";

pub fn summary_csv(reports: &[ComparisonReport]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\n");
    for r in reports {
        writeln!(s, "{}", r.csv_row()).unwrap();
    }
    s
}

/// Combos that get an ensemble run: up to `k / 2` per outcome class, evenly
/// spaced through each class in combo order, with any shortfall in one
/// class filled from the other.
pub fn select_subsample(outcomes: &[Outcome], k: usize) -> Vec<usize> {
    let dies: Vec<usize> = (0..outcomes.len())
        .filter(|&c| outcomes[c] == Outcome::DiesOut)
        .collect();
    let pers: Vec<usize> = (0..outcomes.len())
        .filter(|&c| outcomes[c] == Outcome::Persists)
        .collect();
    let half = k / 2;
    let mut take_d = half.min(dies.len());
    let take_p = (k - take_d).min(pers.len());
    take_d = (k - take_p).min(dies.len());
    let spaced =
        |v: &[usize], m: usize| -> Vec<usize> { (0..m).map(|i| v[i * v.len() / m]).collect() };
    let mut out = spaced(&dies, take_d);
    out.extend(spaced(&pers, take_p));
    out.sort_unstable();
    out
}

struct LinearRun {
    report: ComparisonReport,
    traj: Trajectory,
}

fn linear_combo(
    config: &ExperimentConfig,
    nets: &(DirectedNetwork, DirectedNetwork),
    tgrid: &[f64],
    combo: usize,
) -> Result<LinearRun> {
    let params = config.params_for_combo(nets, combo)?;
    let spec = spectral_report(&params, &RateFamily::linear(&params), false)?;
    let init = config.initial_state(params.n(), combo)?;
    let traj = integrate_linear(&params, &init_from_state(&init), tgrid)?;
    let tail_linear = tail_mean(&traj.tgrid, &traj.r_frac)?;
    let outcome_linear = classify_outcome(&traj, config.classification_eps)?;
    Ok(LinearRun {
        report: ComparisonReport {
            combo,
            s_q1: spec.s_q1,
            s_q2: spec.s_q2,
            verdict: spec.verdict,
            outcome_linear,
            tail_linear,
            outcome_exact: None,
            deviation: None,
            trajectories: Vec::new(),
        },
        traj,
    })
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Full factorial study. Every combo gets a spectral report and a linear
/// run; the subsample also gets an ensemble of `M` paths. When `out` is
/// given, writes `sweep_summary.csv` and per-combo CSVs under
/// `trajectories/`. Reports are ordered by combo index.
pub fn run_sweep(config: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<ComparisonReport>> {
    config.validate()?;
    config.install(|| sweep_inner(config, out))?
}

fn sweep_inner(config: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<ComparisonReport>> {
    let nets = config.networks()?;
    let tgrid = config.tgrid()?;
    let mut runs = (0..COMBOS)
        .into_par_iter()
        .map(|c| {
            linear_combo(config, &nets, &tgrid, c).map_err(|e| Error::Combo {
                combo: c,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let outcomes: Vec<Outcome> = runs.iter().map(|r| r.report.outcome_linear).collect();
    let chosen = select_subsample(&outcomes, config.subsample);
    let mut exact = Vec::with_capacity(chosen.len());
    for &c in &chosen {
        let ens = (|| {
            let params = config.params_for_combo(&nets, c)?;
            let init = config.initial_state(params.n(), c)?;
            ensemble_average(
                &params,
                &init,
                &tgrid,
                config.paths,
                config.ensemble_seed(c),
            )
        })()
        .map_err(|e| Error::Combo {
            combo: c,
            source: Box::new(e),
        })?;
        let run = &mut runs[c];
        run.report.deviation = Some(sup_deviation(&run.traj.r_frac, &ens.r_frac)?);
        run.report.outcome_exact = Some(classify_outcome(&ens, config.classification_eps)?);
        exact.push((c, ens));
    }

    if let Some(dir) = out {
        let tdir = dir.join("trajectories");
        fs::create_dir_all(&tdir).map_err(|e| Error::io(&tdir, e))?;
        for run in runs.iter_mut() {
            let name = format!("combo_{:03}_linear_agg.csv", run.report.combo);
            let p = write(tdir.join(name), &run.traj.to_aggregate_csv())?;
            run.report.trajectories.push(p);
        }
        for (c, ens) in &exact {
            let run = &mut runs[*c];
            let p = write(
                tdir.join(format!("combo_{c:03}_linear.csv")),
                &run.traj.to_node_csv(),
            )?;
            run.report.trajectories.push(p);
            let p = write(
                tdir.join(format!("combo_{c:03}_exact.csv")),
                &ens.to_node_csv(),
            )?;
            run.report.trajectories.push(p);
            let p = write(
                tdir.join(format!("combo_{c:03}_exact_agg.csv")),
                &ens.to_aggregate_csv(),
            )?;
            run.report.trajectories.push(p);
        }
    }
    let reports: Vec<ComparisonReport> = runs.into_iter().map(|r| r.report).collect();
    if let Some(dir) = out {
        write(dir.join("sweep_summary.csv"), &summary_csv(&reports))?;
    }
    Ok(reports)
}
