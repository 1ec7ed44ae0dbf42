//! Adaptive Dormand–Prince 5(4) integration for autonomous systems, sampled
//! on a caller-supplied time grid. Steps are clipped to land on every grid
//! point, so reported states carry the full step accuracy.

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step-size controlled explicit integrator.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step; `None` means the whole span.
    pub h_max: Option<f64>,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 1_000_000,
            h_max: None,
        }
    }
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            ..Default::default()
        }
    }

    /// Integrates `y' = rhs(y)` from `tgrid[0]` to the last grid point and
    /// returns the state at every grid time. `on_step` sees each accepted
    /// step end state and may abort the integration.
    pub fn integrate<F, S>(
        &self,
        mut rhs: F,
        y0: &[f64],
        tgrid: &[f64],
        mut on_step: S,
    ) -> Result<Vec<Vec<f64>>>
    where
        F: FnMut(&[f64], &mut [f64]),
        S: FnMut(f64, &[f64]) -> Result<()>,
    {
        validate_grid(tgrid)?;
        let dim = y0.len();
        let t0 = tgrid[0];
        let t_end = *tgrid.last().unwrap();
        let mut out = Vec::with_capacity(tgrid.len());
        out.push(y0.to_vec());
        if tgrid.len() == 1 || dim == 0 {
            out.resize(tgrid.len(), y0.to_vec());
            return Ok(out);
        }

        let h_max = self.h_max.unwrap_or(t_end - t0).min(t_end - t0);
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
        let mut y = y0.to_vec();
        let mut y_new = vec![0.0; dim];
        let mut stage = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        rhs(&y, &mut k[0]);

        let mut h = self.initial_step(&mut rhs, &y, &k[0], h_max);
        let mut t = t0;
        let mut next = 1;
        let mut steps = 0;
        let mut rejected_last = false;

        while next < tgrid.len() {
            if steps >= self.max_steps {
                return Err(Error::numerical(format!(
                    "step limit {} reached at t = {t}",
                    self.max_steps
                )));
            }
            steps += 1;
            let target = tgrid[next];
            let h_free = h;
            let landing = t + h >= target || (target - (t + h)) < 1e-12 * h;
            if landing {
                h = target - t;
            }

            for s in 1..7 {
                for d in 0..dim {
                    let mut acc = y[d];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += h * A[s][j] * kj[d];
                    }
                    stage[d] = acc;
                }
                rhs(&stage, &mut k[s]);
            }
            // stage 7 is evaluated at the fifth-order solution itself
            y_new.copy_from_slice(&stage);

            let mut norm = 0.0;
            for d in 0..dim {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[d];
                }
                err[d] = h * e;
                let sc = self.atol + self.rtol * y[d].abs().max(y_new[d].abs());
                norm += (err[d] / sc).powi(2);
            }
            let norm = (norm / dim as f64).sqrt();
            if !norm.is_finite() {
                return Err(Error::numerical(format!(
                    "non-finite error estimate at t = {t}"
                )));
            }

            if norm <= 1.0 {
                let t_new = if landing { target } else { t + h };
                if landing {
                    out.push(y_new.clone());
                    next += 1;
                }
                on_step(t_new, &y_new)?;
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                let f_last = std::mem::take(&mut k[6]);
                k[6] = std::mem::replace(&mut k[0], f_last);

                let mut fac = if norm == 0.0 {
                    5.0
                } else {
                    0.9 * norm.powf(-0.2)
                };
                fac = fac.clamp(0.2, 5.0);
                if rejected_last {
                    fac = fac.min(1.0);
                }
                rejected_last = false;
                h = (h * fac).min(h_max);
                if landing {
                    // a clipped step says nothing about the admissible size
                    h = h.max(h_free.min(h_max));
                }
            } else {
                rejected_last = true;
                h *= (0.9 * norm.powf(-0.2)).max(0.2);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::numerical(format!("step size underflow at t = {t}")));
                }
            }
        }
        Ok(out)
    }

    fn initial_step<F>(&self, rhs: &mut F, y: &[f64], f0: &[f64], h_max: f64) -> f64
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let dim = y.len() as f64;
        let sc: Vec<f64> = y.iter().map(|v| self.atol + self.rtol * v.abs()).collect();
        let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / dim).sqrt();
        let d1 = (f0
            .iter()
            .zip(&sc)
            .map(|(v, s)| (v / s).powi(2))
            .sum::<f64>()
            / dim)
            .sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(h_max);
        let y1: Vec<f64> = y.iter().zip(f0).map(|(v, f)| v + h0 * f).collect();
        let mut f1 = vec![0.0; y.len()];
        rhs(&y1, &mut f1);
        let d2 = (f1
            .iter()
            .zip(f0)
            .zip(&sc)
            .map(|((a, b), s)| ((a - b) / s).powi(2))
            .sum::<f64>()
            / dim)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(h_max)
    }
}

fn validate_grid(tgrid: &[f64]) -> Result<()> {
    if tgrid.is_empty() {
        return Err(Error::param("empty time grid"));
    }
    if tgrid.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("time grid contains non-finite values"));
    }
    if tgrid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("time grid must be strictly increasing"));
    }
    Ok(())
}

/// `0, dt, 2 dt, ..., t_max` (the last point is exactly `t_max`).
pub fn uniform_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && dt > 0.0 && dt <= t_max) {
        return Err(Error::param(format!(
            "invalid grid: t_max = {t_max}, dt = {dt}"
        )));
    }
    let steps = (t_max / dt).round() as usize;
    if ((steps as f64) * dt - t_max).abs() > 1e-9 * t_max {
        return Err(Error::param(format!(
            "t_max = {t_max} is not a multiple of dt = {dt}"
        )));
    }
    Ok((0..=steps)
        .map(|k| if k == steps { t_max } else { k as f64 * dt })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_check(_: f64, _: &[f64]) -> Result<()> {
        Ok(())
    }

    #[test]
    fn exponential_decay() {
        let grid = uniform_grid(5.0, 0.5).unwrap();
        let sol = Dopri5::with_tolerances(1e-10, 1e-12)
            .integrate(|y, dy| dy[0] = -y[0], &[1.0], &grid, no_check)
            .unwrap();
        for (t, y) in grid.iter().zip(&sol) {
            assert!((y[0] - (-t).exp()).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let grid: Vec<f64> = (0..=200).map(|k| k as f64 * 0.05).collect();
        let sol = Dopri5::with_tolerances(1e-10, 1e-12)
            .integrate(
                |y, dy| {
                    dy[0] = y[1];
                    dy[1] = -y[0];
                },
                &[0.0, 1.0],
                &grid,
                no_check,
            )
            .unwrap();
        for (t, y) in grid.iter().zip(&sol) {
            assert!((y[0] - t.sin()).abs() < 1e-8);
            assert!((y[1] - t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn observer_can_abort() {
        let grid = [0.0, 1.0];
        let res = Dopri5::default().integrate(
            |_, dy| dy[0] = 1.0,
            &[0.0],
            &grid,
            |_, y| {
                if y[0] > 0.5 {
                    Err(Error::numerical("stop"))
                } else {
                    Ok(())
                }
            },
        );
        assert!(matches!(res, Err(Error::Numerical(_))));
    }

    #[test]
    fn grid_validation() {
        assert!(uniform_grid(1.0, 0.3).is_err());
        assert_eq!(uniform_grid(1.0, 0.25).unwrap().len(), 5);
        assert!(Dopri5::default()
            .integrate(|_, _| {}, &[0.0], &[1.0, 0.5], no_check)
            .is_err());
    }
}
