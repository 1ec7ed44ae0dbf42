//! Threshold matrices, Perron roots and rumor equilibria.
//!
//! With `J = df^T(0)` the Jacobian of the truth-to-rumor rate at the origin:
//!
//! - `Q1 = J - D_theta`; `s(Q1) < 0` makes the rumor-free state `E0`
//!   globally attracting.
//! - `Q2 = Q1 - diag(theta / (theta + delta)) J - diag(g^R(1))`;
//!   `s(Q2) > 0` makes the rumor persistent.

use serde::{Deserialize, Serialize};

use crate::dynamics::{surqt_vector_field, Rate, RateFamily};
use crate::error::{Error, Result};
use crate::graph::{strongly_connected_components, ModelParams};
use crate::matrix::Matrix;

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 100_000;
/// `|s(Q1)|` below this is reported as indeterminate.
pub const INDETERMINATE_BAND: f64 = 1e-9;
pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 100_000;
pub const SEED_EPSILON: f64 = 1e-2;
pub const MAX_HALVINGS: usize = 60;

/// Dominant real eigenvalue of a Metzler matrix with a nonnegative
/// eigenvector for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Perron {
    pub value: f64,
    /// Max-normalised; strictly positive when the matrix is irreducible.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Spectral abscissa `s(m)` of a Metzler matrix.
///
/// Each irreducible diagonal block is shifted by `sigma = max |m_ii| + 1`
/// (making it nonnegative with a positive diagonal, hence primitive) and
/// power-iterated until the Collatz–Wielandt bracket
/// `min_i (Ax)_i / x_i <= rho <= max_i (Ax)_i / x_i` is narrower than
/// `1e-12`. The abscissa is the largest block root.
pub fn spectral_abscissa(m: &Matrix) -> Result<Perron> {
    if !m.is_metzler() {
        return Err(Error::param("matrix is not Metzler"));
    }
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::param("matrix has non-finite entries"));
    }
    let n = m.n();
    if n == 0 {
        return Err(Error::param("empty matrix"));
    }
    let mut adj = vec![Vec::new(); n];
    for (i, j) in m.off_diagonal_support() {
        adj[j].push(i);
    }
    let components = strongly_connected_components(&adj);
    let mut best: Option<Perron> = None;
    for comp in &components {
        let block = principal_block(m, comp);
        let p = irreducible_root(&block)?;
        if best.as_ref().is_none_or(|b| p.value > b.value) {
            let mut vector = vec![0.0; n];
            for (k, &i) in comp.iter().enumerate() {
                vector[i] = p.vector[k];
            }
            best = Some(Perron {
                value: p.value,
                vector,
                iterations: p.iterations,
            });
        }
    }
    Ok(best.expect("at least one component"))
}

/// Spectral radius of an (entrywise) nonnegative matrix, which equals its
/// spectral abscissa.
pub fn spectral_radius_nonnegative(m: &Matrix) -> Result<f64> {
    let scale = m.as_slice().iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if m.as_slice().iter().any(|&v| v < -1e-12 * scale) {
        return Err(Error::param("matrix is not nonnegative"));
    }
    Ok(spectral_abscissa(m)?.value)
}

fn principal_block(m: &Matrix, idx: &[usize]) -> Matrix {
    let mut b = Matrix::zeros(idx.len());
    for (a, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            b[(a, c)] = m[(i, j)];
        }
    }
    b
}

fn irreducible_root(m: &Matrix) -> Result<Perron> {
    let n = m.n();
    if n == 1 {
        return Ok(Perron {
            value: m[(0, 0)],
            vector: vec![1.0],
            iterations: 0,
        });
    }
    let sigma = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max) + 1.0;
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] += sigma;
    }
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut bracket = (0.0, f64::INFINITY);
    for it in 1..=POWER_PHASE {
        shifted.mul_vec_into(&x, &mut y);
        bracket = normalise(&mut x, &y);
        if bracket.1 - bracket.0 <= POWER_TOL {
            return Ok(finish(bracket, sigma, x, it));
        }
    }
    // Slow power convergence means a small spectral gap. Inverse iteration
    // with a shift just above the Collatz–Wielandt upper bound keeps the
    // iterates positive (the shifted inverse is a nonnegative matrix) and
    // contracts at rate (mu - rho) / (mu - lambda_2).
    for it in POWER_PHASE + 1..=POWER_MAX_ITER {
        let width = bracket.1 - bracket.0;
        let mu = bracket.1 + width.max(1e-13 * bracket.1.abs().max(1.0));
        let mut a = shifted.scale(-1.0);
        for i in 0..n {
            a[(i, i)] += mu;
        }
        let Some(z) = lu_solve(a, &x) else {
            break;
        };
        if z.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            break;
        }
        let top = z.iter().cloned().fold(0.0, f64::max);
        x = z.iter().map(|v| v / top).collect();
        shifted.mul_vec_into(&x, &mut y);
        let b = cw_bracket(&x, &y);
        bracket = (bracket.0.max(b.0), bracket.1.min(b.1));
        if bracket.1 - bracket.0 <= POWER_TOL {
            return Ok(finish(bracket, sigma, x, it));
        }
    }
    Err(Error::numerical(format!(
        "power iteration did not converge in {POWER_MAX_ITER} iterations"
    )))
}

const POWER_PHASE: usize = 20_000;

fn cw_bracket(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b) in y.iter().zip(x) {
        let r = a / b;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

/// Collatz–Wielandt bracket of `y = A x`, then `x <- y / max(y)`.
fn normalise(x: &mut [f64], y: &[f64]) -> (f64, f64) {
    let b = cw_bracket(x, y);
    let top = y.iter().cloned().fold(0.0, f64::max);
    for (xi, yi) in x.iter_mut().zip(y) {
        *xi = yi / top;
    }
    b
}

fn finish(bracket: (f64, f64), sigma: f64, vector: Vec<f64>, iterations: usize) -> Perron {
    Perron {
        value: 0.5 * (bracket.0 + bracket.1) - sigma,
        vector,
        iterations,
    }
}

/// Solves `a z = b` by Gaussian elimination with partial pivoting.
fn lu_solve(mut a: Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.n();
    let mut z = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))?;
        if a[(p, k)] == 0.0 {
            return None;
        }
        if p != k {
            for c in 0..n {
                let tmp = a[(k, c)];
                a[(k, c)] = a[(p, c)];
                a[(p, c)] = tmp;
            }
            z.swap(k, p);
        }
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            if f != 0.0 {
                for c in k..n {
                    a[(i, c)] -= f * a[(k, c)];
                }
                z[i] -= f * z[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut acc = z[k];
        for c in k + 1..n {
            acc -= a[(k, c)] * z[c];
        }
        z[k] = acc / a[(k, k)];
    }
    Some(z)
}

/// `Q1 = df^T(0)/dx - D_theta`.
pub fn build_q1(params: &ModelParams, family: &RateFamily) -> Matrix {
    family
        .jacobian_at_zero(Rate::FT)
        .sub(&Matrix::from_diag(&params.theta))
}

/// `g^R(1)`, the truth-to-rumor recovery pressure when everyone believes
/// the truth.
pub fn recovery_at_full_truth(params: &ModelParams, family: &RateFamily) -> Vec<f64> {
    let mut g = vec![0.0; params.n()];
    family.eval_into(Rate::GR, &vec![1.0; params.n()], &mut g);
    g
}

/// `Q2 = Q1 - diag(theta / (theta + delta)) df^T(0)/dx - diag g^R(1)`.
pub fn build_q2(params: &ModelParams, family: &RateFamily) -> Matrix {
    let jac = family.jacobian_at_zero(Rate::FT);
    let frac: Vec<f64> = params
        .theta
        .iter()
        .zip(&params.delta)
        .map(|(t, d)| t / (t + d))
        .collect();
    build_q1(params, family)
        .sub(&jac.scale_rows(&frac))
        .sub(&Matrix::from_diag(&recovery_at_full_truth(params, family)))
}

/// Jacobian of the rumor block of the simplified model at `E0`:
/// `Q1 - diag g^R(1)`. Its abscissa decides whether `E0` repels small
/// rumor perturbations.
pub fn rumor_free_linearization(params: &ModelParams, family: &RateFamily) -> Matrix {
    build_q1(params, family).sub(&Matrix::from_diag(&recovery_at_full_truth(params, family)))
}

/// The four sufficient dying-out criteria in terms of `B_T` and `D_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficientCriteria {
    /// `rho(Q1 D_theta^-1 + I) < 1` with `Q1 = B_T - D_theta`
    pub a: bool,
    /// `rho(B_T D_theta^-1) < 1`
    pub b: bool,
    /// `sum_i beta_ij < theta_j` for every column `j`
    pub c: bool,
    /// `sum_j beta_ij / theta_j < 1` for every row `i`
    pub d: bool,
}

pub fn sufficient_criteria(params: &ModelParams) -> Result<SufficientCriteria> {
    let inv_theta: Vec<f64> = params.theta.iter().map(|t| 1.0 / t).collect();
    let scaled = params.beta_t.scale_cols(&inv_theta);
    let q1 = params.beta_t.sub(&Matrix::from_diag(&params.theta));
    let shifted = q1.scale_cols(&inv_theta).add(&Matrix::identity(params.n()));
    let cols = params.beta_t.col_sums();
    Ok(SufficientCriteria {
        a: spectral_radius_nonnegative(&shifted)? < 1.0,
        b: spectral_radius_nonnegative(&scaled)? < 1.0,
        c: cols.iter().zip(&params.theta).all(|(s, t)| s < t),
        d: scaled.row_sums().iter().all(|&s| s < 1.0),
    })
}

/// Asymptotic bounds `limsup R_i <= a_i` and `liminf T_i >= b_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBounds {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn asymptotic_bounds(params: &ModelParams, family: &RateFamily) -> AsymptoticBounds {
    let n = params.n();
    let mut f1 = vec![0.0; n];
    family.eval_into(Rate::FT, &vec![1.0; n], &mut f1);
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let (f, th, de) = (f1[i], params.theta[i], params.delta[i]);
        a.push(f / (f + th));
        b.push(th * de / ((f + th) * (f + de)));
    }
    AsymptoticBounds { a, b }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    /// Sup-norm of the simplified vector field at `(R, T)`.
    pub residual: f64,
    pub converged: bool,
    #[serde(skip)]
    pub iterations: usize,
    /// Most negative per-iteration change seen (0 for a monotone run).
    #[serde(skip)]
    pub worst_decrease: f64,
}

impl EquilibriumResult {
    fn rumor_free(n: usize) -> Self {
        EquilibriumResult {
            r: vec![0.0; n],
            t: vec![1.0; n],
            residual: 0.0,
            converged: false,
            iterations: 0,
            worst_decrease: 0.0,
        }
    }
}

/// Equilibrium relation `T_i = 1 - (theta_i + delta_i) R_i / delta_i`.
pub fn truth_from_rumor(params: &ModelParams, r: &[f64]) -> Vec<f64> {
    r.iter()
        .enumerate()
        .map(|(i, x)| 1.0 - (params.theta[i] + params.delta[i]) * x / params.delta[i])
        .collect()
}

/// Fixed-point map whose fixed points in `prod (0, delta_i/(theta_i+delta_i))`
/// are the rumor equilibria:
///
/// `H_i(x) = f_i(x) / (theta_i + g_i(T(x)) + c_i f_i(x))`, with
/// `c_i = (theta_i + delta_i) / delta_i` and `T(x) = 1 - c x`.
///
/// It is the equilibrium condition `R_i (theta_i + g_i(T)) = T_i f_i(R)`
/// solved for `R_i`, and is nondecreasing in every argument.
pub fn equilibrium_map(params: &ModelParams, family: &RateFamily, x: &[f64]) -> Vec<f64> {
    let n = params.n();
    let t = truth_from_rumor(params, x);
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    family.eval_into(Rate::FT, x, &mut f);
    family.eval_into(Rate::GR, &t, &mut g);
    (0..n)
        .map(|i| {
            let c = (params.theta[i] + params.delta[i]) / params.delta[i];
            f[i] / (params.theta[i] + g[i] + c * f[i])
        })
        .collect()
}

/// Minimal rumor equilibrium by monotone iteration from below.
///
/// Returns `E0` flagged non-converged when `s(Q1) <= 0`, or when `E0` is
/// linearly stable (`s(Q1 - diag g^R(1)) <= 0`, no seed below a rumor
/// equilibrium exists), or when iteration fails to settle.
pub fn find_rumor_equilibrium(
    params: &ModelParams,
    family: &RateFamily,
) -> Result<EquilibriumResult> {
    let n = params.n();
    if spectral_abscissa(&build_q1(params, family))?.value <= 0.0 {
        return Ok(EquilibriumResult::rumor_free(n));
    }
    let lin = spectral_abscissa(&rumor_free_linearization(params, family))?;
    if lin.value <= 0.0 {
        return Ok(EquilibriumResult::rumor_free(n));
    }
    let v = lin.vector;

    let mut eps = SEED_EPSILON;
    let mut seed = None;
    for _ in 0..=MAX_HALVINGS {
        let x: Vec<f64> = v.iter().map(|vi| eps * vi).collect();
        let hx = equilibrium_map(params, family, &x);
        if hx.iter().zip(&x).all(|(h, xi)| h >= xi) {
            seed = Some(x);
            break;
        }
        eps *= 0.5;
    }
    let Some(mut x) = seed else {
        return Ok(EquilibriumResult::rumor_free(n));
    };

    let mut worst_decrease = 0.0f64;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=FIXED_POINT_MAX_ITER {
        let next = equilibrium_map(params, family, &x);
        let mut change = 0.0f64;
        for (a, b) in next.iter().zip(&x) {
            change = change.max((a - b).abs());
            worst_decrease = worst_decrease.min(a - b);
        }
        x = next;
        iterations = it;
        if change < FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }
    let t = truth_from_rumor(params, &x);
    let state: Vec<f64> = x.iter().chain(&t).copied().collect();
    let mut field = vec![0.0; 2 * n];
    surqt_vector_field(params, family, &state, &mut field);
    let residual = field.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(EquilibriumResult {
        r: x,
        t,
        residual,
        converged,
        iterations,
        worst_decrease,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    DiesOut,
    MayPersist,
    Persistent,
    Indeterminate,
}

impl Verdict {
    pub fn classify(s_q1: f64, s_q2: f64) -> Self {
        if s_q2 > 0.0 {
            Verdict::Persistent
        } else if s_q1.abs() < INDETERMINATE_BAND {
            Verdict::Indeterminate
        } else if s_q1 < 0.0 {
            Verdict::DiesOut
        } else {
            Verdict::MayPersist
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::DiesOut => "DiesOut",
            Verdict::MayPersist => "MayPersist",
            Verdict::Persistent => "Persistent",
            Verdict::Indeterminate => "Indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    #[serde(skip)]
    pub q1: Matrix,
    #[serde(skip)]
    pub q2: Matrix,
    pub s_q1: f64,
    pub s_q2: f64,
    pub corollary_a: bool,
    pub corollary_b: bool,
    pub corollary_c: bool,
    pub corollary_d: bool,
    pub bounds_a: Vec<f64>,
    pub bounds_b: Vec<f64>,
    pub verdict: Verdict,
    pub equilibrium: EquilibriumResult,
}

impl SpectralReport {
    pub fn criteria(&self) -> SufficientCriteria {
        SufficientCriteria {
            a: self.corollary_a,
            b: self.corollary_b,
            c: self.corollary_c,
            d: self.corollary_d,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Everything the threshold analysis says about one parameter set. The
/// equilibrium search is skipped (reported as `E0`) unless `with_equilibrium`.
pub fn spectral_report(
    params: &ModelParams,
    family: &RateFamily,
    with_equilibrium: bool,
) -> Result<SpectralReport> {
    let q1 = build_q1(params, family);
    let q2 = build_q2(params, family);
    let s_q1 = spectral_abscissa(&q1)?.value;
    let s_q2 = spectral_abscissa(&q2)?.value;
    let cor = sufficient_criteria(params)?;
    let bounds = asymptotic_bounds(params, family);
    let equilibrium = if with_equilibrium {
        find_rumor_equilibrium(params, family)?
    } else {
        EquilibriumResult::rumor_free(params.n())
    };
    Ok(SpectralReport {
        q1,
        q2,
        s_q1,
        s_q2,
        corollary_a: cor.a,
        corollary_b: cor.b,
        corollary_c: cor.c,
        corollary_d: cor.d,
        bounds_a: bounds.a,
        bounds_b: bounds.b,
        verdict: Verdict::classify(s_q1, s_q2),
        equilibrium,
    })
}
