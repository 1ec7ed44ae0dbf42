//! Deterministic mean-field models.
//!
//! The generic model uses four spreading-rate functions per node:
//! `f^U`, `f^T` (driven by rumor-spreaders) and `g^U`, `g^R` (driven by
//! truth-believers). [`RateKind::Linear`] gives the linear model; the
//! saturating kind `c (1 - exp(-z / c))` is a smooth, strictly increasing,
//! concave alternative with the same Jacobian at the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ModelParams;
use crate::matrix::{Matrix, SparseRows};
use crate::ode::Dopri5;
use crate::trajectory::Trajectory;

/// Largest excursion outside the box tolerated inside the integrator.
pub const UNDERSHOOT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateKind {
    Linear,
    Saturating { c: f64 },
}

impl RateKind {
    fn profile(self, z: f64) -> f64 {
        match self {
            RateKind::Linear => z,
            RateKind::Saturating { c } => c * -(-z / c).exp_m1(),
        }
    }

    fn slope_at_zero(self) -> f64 {
        1.0
    }
}

/// Which of the four spreading rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rate {
    /// uncertain -> rumor, driven by rumor-spreaders
    FU,
    /// truth -> rumor, driven by rumor-spreaders
    FT,
    /// uncertain -> truth, driven by truth-believers
    GU,
    /// rumor -> truth, driven by truth-believers
    GR,
}

impl Rate {
    fn slot(self) -> usize {
        self as usize
    }
}

/// Spreading-rate functions `rate_i(x) = profile(sum_j w_ij x_j)`.
#[derive(Debug, Clone)]
pub struct RateFamily {
    kind: RateKind,
    dense: [Matrix; 4],
    sparse: [SparseRows; 4],
}

impl RateFamily {
    pub fn new(params: &ModelParams, kind: RateKind) -> Result<Self> {
        if let RateKind::Saturating { c } = kind {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::param(format!(
                    "saturation constant {c} must be positive"
                )));
            }
        }
        let dense = [
            params.beta_u.clone(),
            params.beta_t.clone(),
            params.gamma_u.clone(),
            params.gamma_r.clone(),
        ];
        let sparse = [
            SparseRows::from_matrix(&dense[0]),
            SparseRows::from_matrix(&dense[1]),
            SparseRows::from_matrix(&dense[2]),
            SparseRows::from_matrix(&dense[3]),
        ];
        Ok(RateFamily {
            kind,
            dense,
            sparse,
        })
    }

    pub fn linear(params: &ModelParams) -> Self {
        Self::new(params, RateKind::Linear).expect("linear family is always valid")
    }

    pub fn saturating(params: &ModelParams, c: f64) -> Result<Self> {
        Self::new(params, RateKind::Saturating { c })
    }

    pub fn kind(&self) -> RateKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.dense[0].n()
    }

    pub fn weights(&self, which: Rate) -> &Matrix {
        &self.dense[which.slot()]
    }

    /// One component, without the box check.
    pub fn eval_one(&self, which: Rate, i: usize, x: &[f64]) -> f64 {
        self.kind.profile(self.sparse[which.slot()].dot_row(i, x))
    }

    pub(crate) fn eval_into(&self, which: Rate, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.eval_one(which, i, x);
        }
    }

    pub fn eval(&self, which: Rate, x: &[f64]) -> Result<Vec<f64>> {
        eval_rates(self, which, x)
    }

    /// Analytic Jacobian at the origin.
    pub fn jacobian_at_zero(&self, which: Rate) -> Matrix {
        self.weights(which).scale(self.kind.slope_at_zero())
    }
}

/// Evaluates one spreading rate at `x` in `[0, 1]^n`.
pub fn eval_rates(family: &RateFamily, which: Rate, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != family.n() {
        return Err(Error::param(format!(
            "argument has length {}, expected {}",
            x.len(),
            family.n()
        )));
    }
    if let Some((i, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::param(format!("x[{i}] = {v} outside [0, 1]")));
    }
    let mut out = vec![0.0; x.len()];
    family.eval_into(which, x, &mut out);
    Ok(out)
}

pub fn jacobian_at_zero(family: &RateFamily, which: Rate) -> Matrix {
    family.jacobian_at_zero(which)
}

/// Per-node initial probabilities for the models with uncertain nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrtInit {
    pub u: f64,
    pub r: f64,
    pub t: f64,
}

impl UrtInit {
    pub fn new(u: f64, r: f64, t: f64) -> Self {
        UrtInit { u, r, t }
    }
}

/// Per-node initial probabilities for the simplified model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtInit {
    pub r: f64,
    pub t: f64,
}

/// Vector field of the generic model on `y = [U, R, T]`.
pub fn urqt_vector_field(params: &ModelParams, family: &RateFamily, y: &[f64], dy: &mut [f64]) {
    let n = params.n();
    let (u, rest) = y.split_at(n);
    let (r, t) = rest.split_at(n);
    let mut fu = vec![0.0; n];
    let mut ft = vec![0.0; n];
    let mut gu = vec![0.0; n];
    let mut gr = vec![0.0; n];
    family.eval_into(Rate::FU, r, &mut fu);
    family.eval_into(Rate::FT, r, &mut ft);
    family.eval_into(Rate::GU, t, &mut gu);
    family.eval_into(Rate::GR, t, &mut gr);
    for i in 0..n {
        dy[i] = -u[i] * fu[i] - u[i] * gu[i];
        dy[n + i] = u[i] * fu[i] + t[i] * ft[i] - r[i] * gr[i] - params.theta[i] * r[i];
        dy[2 * n + i] = u[i] * gu[i] + r[i] * gr[i] - t[i] * ft[i]
            + params.delta[i] * (1.0 - u[i] - r[i] - t[i]);
    }
}

/// Vector field of the simplified model on `y = [R, T]`.
pub fn surqt_vector_field(params: &ModelParams, family: &RateFamily, y: &[f64], dy: &mut [f64]) {
    let n = params.n();
    let (r, t) = y.split_at(n);
    let mut ft = vec![0.0; n];
    let mut gr = vec![0.0; n];
    family.eval_into(Rate::FT, r, &mut ft);
    family.eval_into(Rate::GR, t, &mut gr);
    for i in 0..n {
        dy[i] = t[i] * ft[i] - r[i] * gr[i] - params.theta[i] * r[i];
        dy[n + i] = r[i] * gr[i] - t[i] * ft[i] + params.delta[i] * (1.0 - r[i] - t[i]);
    }
}

fn integrator() -> Dopri5 {
    Dopri5::with_tolerances(1e-8, 1e-10)
}

fn check_box(groups: usize, n: usize, y: &[f64], t: f64) -> Result<()> {
    for (k, v) in y.iter().enumerate() {
        if *v < -UNDERSHOOT_LIMIT || *v > 1.0 + UNDERSHOOT_LIMIT {
            return Err(Error::numerical(format!(
                "state component {k} = {v} left the unit box at t = {t}"
            )));
        }
    }
    for i in 0..n {
        let s: f64 = (0..groups).map(|g| y[g * n + i]).sum();
        if s > 1.0 + UNDERSHOOT_LIMIT {
            return Err(Error::numerical(format!(
                "node {i} probabilities sum to {s} at t = {t}"
            )));
        }
    }
    Ok(())
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Generic model with the given rate family.
pub fn integrate_generic(
    params: &ModelParams,
    family: &RateFamily,
    init: &[UrtInit],
    tgrid: &[f64],
) -> Result<Trajectory> {
    let n = params.n();
    if init.len() != n || family.n() != n {
        return Err(Error::param(
            "initial condition size does not match the network",
        ));
    }
    for (i, s) in init.iter().enumerate() {
        let ok = [s.u, s.r, s.t].iter().all(|v| (0.0..=1.0).contains(v))
            && s.u + s.r + s.t <= 1.0 + 1e-12;
        if !ok {
            return Err(Error::param(format!(
                "initial state of node {i} is outside the simplex"
            )));
        }
    }
    let y0: Vec<f64> = init
        .iter()
        .map(|s| s.u)
        .chain(init.iter().map(|s| s.r))
        .chain(init.iter().map(|s| s.t))
        .collect();
    let states = integrator().integrate(
        |y, dy| urqt_vector_field(params, family, y, dy),
        &y0,
        tgrid,
        |t, y| check_box(3, n, y, t),
    )?;
    let mut cols: [Vec<Vec<f64>>; 4] = Default::default();
    for y in &states {
        let u: Vec<f64> = y[..n].iter().copied().map(clamp01).collect();
        let r: Vec<f64> = y[n..2 * n].iter().copied().map(clamp01).collect();
        let t: Vec<f64> = y[2 * n..].iter().copied().map(clamp01).collect();
        let q = (0..n)
            .map(|i| clamp01(1.0 - y[i] - y[n + i] - y[2 * n + i]))
            .collect();
        cols[0].push(u);
        cols[1].push(r);
        cols[2].push(q);
        cols[3].push(t);
    }
    let [u, r, q, t] = cols;
    Ok(Trajectory::new(tgrid.to_vec(), u, r, q, t))
}

/// Linear model: the generic model with the linear rate family.
pub fn integrate_linear(
    params: &ModelParams,
    init: &[UrtInit],
    tgrid: &[f64],
) -> Result<Trajectory> {
    integrate_generic(params, &RateFamily::linear(params), init, tgrid)
}

/// Simplified model on `[R, T]`; the reported `U` is identically zero.
pub fn integrate_surqt(
    params: &ModelParams,
    family: &RateFamily,
    init: &[RtInit],
    tgrid: &[f64],
) -> Result<Trajectory> {
    let n = params.n();
    if init.len() != n || family.n() != n {
        return Err(Error::param(
            "initial condition size does not match the network",
        ));
    }
    for (i, s) in init.iter().enumerate() {
        if !(s.r >= 0.0 && s.t >= 0.0 && s.r + s.t <= 1.0 + 1e-12) {
            return Err(Error::param(format!(
                "initial state of node {i} is outside Omega"
            )));
        }
    }
    let y0: Vec<f64> = init
        .iter()
        .map(|s| s.r)
        .chain(init.iter().map(|s| s.t))
        .collect();
    let states = integrator().integrate(
        |y, dy| surqt_vector_field(params, family, y, dy),
        &y0,
        tgrid,
        |t, y| check_box(2, n, y, t),
    )?;
    let mut cols: [Vec<Vec<f64>>; 4] = Default::default();
    for y in &states {
        cols[0].push(vec![0.0; n]);
        cols[1].push(y[..n].iter().copied().map(clamp01).collect());
        cols[2].push((0..n).map(|i| clamp01(1.0 - y[i] - y[n + i])).collect());
        cols[3].push(y[n..].iter().copied().map(clamp01).collect());
    }
    let [u, r, q, t] = cols;
    Ok(Trajectory::new(tgrid.to_vec(), u, r, q, t))
}

/// Mean-field initial condition for a joint point-mass state.
pub fn init_from_state(state: &crate::ctmc::OsnState) -> Vec<UrtInit> {
    use crate::ctmc::NodeState::*;
    state
        .0
        .iter()
        .map(|s| match s {
            Uncertain => UrtInit::new(1.0, 0.0, 0.0),
            Rumor => UrtInit::new(0.0, 1.0, 0.0),
            Quarantined => UrtInit::new(0.0, 0.0, 0.0),
            Truth => UrtInit::new(0.0, 0.0, 1.0),
        })
        .collect()
}
