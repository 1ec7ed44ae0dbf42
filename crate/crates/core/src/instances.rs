//! Random parameter sets for audits and demos.
//!
//! Group scales are drawn log-uniformly from [`InstanceRanges`] so that both
//! dying-out and persistent regimes show up; each edge (or node) then gets
//! `scale * Uniform(0.5, 1.5)`.

use rand::Rng;

use crate::dynamics::RtInit;
use crate::error::Result;
use crate::graph::{generate_scale_free, generate_small_world, DirectedNetwork, ModelParams};
use crate::matrix::Matrix;
use crate::seed::{derive_seed, rng_from_seed, Rng as SeedRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceRanges {
    pub beta_u: (f64, f64),
    pub beta_t: (f64, f64),
    pub gamma_u: (f64, f64),
    pub gamma_r: (f64, f64),
    pub theta: (f64, f64),
    pub delta: (f64, f64),
}

impl Default for InstanceRanges {
    fn default() -> Self {
        InstanceRanges {
            beta_u: (0.05, 0.6),
            beta_t: (0.02, 0.6),
            gamma_u: (0.05, 0.6),
            gamma_r: (0.02, 0.5),
            theta: (0.1, 1.0),
            delta: (0.1, 1.0),
        }
    }
}

fn log_uniform(rng: &mut SeedRng, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// A strongly connected network for an `n`-node instance: complete for
/// `n <= 3`, otherwise small-world or scale-free depending on the seed.
pub fn random_network(n: usize, seed: u64) -> Result<DirectedNetwork> {
    if n <= 3 {
        return Ok(DirectedNetwork::complete(n));
    }
    if seed.is_multiple_of(2) {
        let k = if n < 6 { 2 } else { 4 };
        generate_small_world(n, k, 0.2, seed)
    } else {
        generate_scale_free(n, 2.min(n - 1), seed)
    }
}

/// Random parameters on a shared rumor/truth network.
pub fn random_instance(n: usize, seed: u64) -> Result<ModelParams> {
    random_instance_with(n, seed, &InstanceRanges::default())
}

pub fn random_instance_with(n: usize, seed: u64, ranges: &InstanceRanges) -> Result<ModelParams> {
    let net = random_network(n, derive_seed(seed, 0))?;
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    let scales = [
        log_uniform(&mut rng, ranges.beta_u),
        log_uniform(&mut rng, ranges.beta_t),
        log_uniform(&mut rng, ranges.gamma_u),
        log_uniform(&mut rng, ranges.gamma_r),
        log_uniform(&mut rng, ranges.theta),
        log_uniform(&mut rng, ranges.delta),
    ];
    let mut edge_rates = |scale: f64| {
        let mut m = Matrix::zeros(n);
        for (i, j) in net.edges() {
            m[(i, j)] = scale * (0.5 + rng.random::<f64>());
        }
        m
    };
    let beta_u = edge_rates(scales[0]);
    let beta_t = edge_rates(scales[1]);
    let gamma_u = edge_rates(scales[2]);
    let gamma_r = edge_rates(scales[3]);
    let theta = (0..n)
        .map(|_| scales[4] * (0.5 + rng.random::<f64>()))
        .collect();
    let delta = (0..n)
        .map(|_| scales[5] * (0.5 + rng.random::<f64>()))
        .collect();
    ModelParams::new(
        net.clone(),
        net,
        beta_u,
        beta_t,
        gamma_u,
        gamma_r,
        theta,
        delta,
    )
}

/// A point of `Omega` with every `R_i` in `[0.01, 0.5)`.
pub fn random_omega_point(n: usize, seed: u64) -> Vec<RtInit> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| {
            let r = 0.01 + 0.49 * rng.random::<f64>();
            let t = (1.0 - r) * rng.random::<f64>();
            RtInit { r, t }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_valid_and_reproducible() {
        for seed in 0..10 {
            let a = random_instance(7, seed).unwrap();
            assert_eq!(a, random_instance(7, seed).unwrap());
            assert!(a.validate().is_ok());
        }
        for p in random_omega_point(20, 3) {
            assert!(p.r > 0.0 && p.t >= 0.0 && p.r + p.t <= 1.0);
        }
    }
}
