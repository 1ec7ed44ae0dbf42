//! Threshold analysis for a batch of random instances: spectral abscissae,
//! the sufficient dying-out criteria, and the verdict, checked against a long
//! run of the simplified model.
//!
//! cargo run --release --example thresholds

use urqt::dynamics::{integrate_surqt, RateFamily};
use urqt::instances::{random_instance, random_omega_point};
use urqt::spectral::spectral_report;

fn main() -> urqt::Result<()> {
    println!(
        "{:>4} {:>9} {:>9} {:>5} {:>13} {:>12}",
        "seed", "s(Q1)", "s(Q2)", "abcd", "verdict", "R(200)"
    );
    for seed in 0..12 {
        let params = random_instance(30, seed)?;
        let family = RateFamily::linear(&params);
        let rep = spectral_report(&params, &family, false)?;
        let flags: String = [
            rep.corollary_a,
            rep.corollary_b,
            rep.corollary_c,
            rep.corollary_d,
        ]
        .iter()
        .map(|&b| if b { 'y' } else { '.' })
        .collect();
        let traj = integrate_surqt(
            &params,
            &family,
            &random_omega_point(30, seed),
            &[0.0, 200.0],
        )?;
        println!(
            "{seed:>4} {:>9.4} {:>9.4} {flags:>5} {:>13} {:>12.3e}",
            rep.s_q1,
            rep.s_q2,
            rep.verdict.as_str(),
            traj.r_frac[1]
        );
    }
    Ok(())
}
