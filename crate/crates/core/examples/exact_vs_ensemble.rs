//! Exact chain on a small network: the forward equation on all 4^n joint
//! states against an average of Gillespie sample paths.
//!
//! cargo run --release --example exact_vs_ensemble -- [paths]

use urqt::ctmc::{ensemble_average, point_mass, solve_exact, OsnState};
use urqt::instances::random_instance;
use urqt::ode::uniform_grid;

fn main() -> urqt::Result<()> {
    let paths = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000);
    let n = 4;
    let params = random_instance(n, 102)?;
    let init = OsnState::seeded_outbreak(n, 102)?;
    let tgrid = uniform_grid(20.0, 0.1)?;

    let exact = solve_exact(&params, &point_mass(&init)?, &tgrid)?;
    let ens = ensemble_average(&params, &init, &tgrid, paths, 1)?;

    let mut worst: f64 = 0.0;
    for k in 0..tgrid.len() {
        for i in 0..n {
            worst = worst.max((exact.r[k][i] - ens.r[k][i]).abs());
        }
    }
    println!("{:>5} {:>10} {:>10}", "t", "R exact", "R ensemble");
    for k in (0..tgrid.len()).step_by(20) {
        println!(
            "{:>5.1} {:>10.5} {:>10.5}",
            tgrid[k], exact.r_frac[k], ens.r_frac[k]
        );
    }
    println!(
        "sup over nodes and time of |R_i exact - R_i ensemble| = {worst:.4} with {paths} paths"
    );
    Ok(())
}
