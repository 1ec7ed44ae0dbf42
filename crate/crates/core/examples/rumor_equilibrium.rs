//! Rumor equilibria by monotone fixed-point iteration, verified by starting
//! the simplified model at the result. Also shows an instance where
//! s(Q1) > 0 yet the rumor-free state is stable and no equilibrium exists.
//!
//! cargo run --release --example rumor_equilibrium

use urqt::dynamics::{integrate_surqt, RateFamily, RtInit};
use urqt::graph::{DirectedNetwork, ModelParams};
use urqt::instances::random_instance;
use urqt::spectral::{
    build_q1, find_rumor_equilibrium, rumor_free_linearization, spectral_abscissa,
};

fn inspect(label: &str, params: &ModelParams) -> urqt::Result<()> {
    let family = RateFamily::linear(params);
    let s_q1 = spectral_abscissa(&build_q1(params, &family))?.value;
    let s_lin = spectral_abscissa(&rumor_free_linearization(params, &family))?.value;
    let eq = find_rumor_equilibrium(params, &family)?;
    println!("{label}: s(Q1) = {s_q1:.4}, s(Q1 - diag g(1)) = {s_lin:.4}");
    if !eq.converged {
        let init = vec![RtInit { r: 0.4, t: 0.3 }; params.n()];
        let end = integrate_surqt(params, &family, &init, &[0.0, 500.0])?;
        println!(
            "  no rumor equilibrium; the rumor fraction decays to {:.2e}",
            end.r_frac[1]
        );
        return Ok(());
    }
    let init: Vec<RtInit> =
        eq.r.iter()
            .zip(&eq.t)
            .map(|(&r, &t)| RtInit { r, t })
            .collect();
    let later = integrate_surqt(params, &family, &init, &[0.0, 50.0])?;
    let drift = (0..params.n())
        .map(|i| (later.r[1][i] - eq.r[i]).abs())
        .fold(0.0, f64::max);
    println!(
        "  converged in {} iterations, residual {:.1e}, mean R {:.4}, drift after t = 50: {drift:.1e}",
        eq.iterations,
        eq.residual,
        eq.r.iter().sum::<f64>() / params.n() as f64
    );
    Ok(())
}

fn main() -> urqt::Result<()> {
    inspect("random instance 604", &random_instance(12, 604)?)?;
    let pair = DirectedNetwork::complete(2);
    let stable = ModelParams::uniform(pair.clone(), pair, [0.2, 0.5, 0.2, 0.5], 0.3, 0.5)?;
    inspect("stable pair", &stable)?;
    Ok(())
}
