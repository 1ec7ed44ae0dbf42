//! One node that starts out spreading the rumor, with theta = delta = 1:
//! R(t) = exp(-t) and Q(t) = t exp(-t). Compares the forward equation and a
//! Gillespie ensemble with the closed form.
//!
//! cargo run --release --example single_node

use urqt::ctmc::{ensemble_average, point_mass, solve_exact, NodeState, OsnState};
use urqt::graph::{DirectedNetwork, ModelParams};
use urqt::ode::uniform_grid;

fn main() -> urqt::Result<()> {
    let g = DirectedNetwork::complete(1);
    let params = ModelParams::uniform(g.clone(), g, [0.0; 4], 1.0, 1.0)?;
    let init = OsnState(vec![NodeState::Rumor]);
    let tgrid = uniform_grid(4.0, 0.5)?;

    let exact = solve_exact(&params, &point_mass(&init)?, &tgrid)?;
    let ens = ensemble_average(&params, &init, &tgrid, 10_000, 7)?;

    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10}",
        "t", "exp(-t)", "forward", "ensemble", "Q forward"
    );
    for (k, &t) in tgrid.iter().enumerate() {
        println!(
            "{t:>5.1} {:>10.6} {:>10.6} {:>10.4} {:>10.6}",
            (-t).exp(),
            exact.r[k][0],
            ens.r[k][0],
            exact.q[k][0]
        );
    }
    Ok(())
}
