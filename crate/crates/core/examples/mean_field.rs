//! Deterministic models on one network: the linear model, the generic model
//! with saturating rates, and the simplified model without uncertain nodes.
//! Writes the linear trajectory as CSV.
//!
//! cargo run --release --example mean_field

use urqt::ctmc::OsnState;
use urqt::dynamics::{
    init_from_state, integrate_generic, integrate_linear, integrate_surqt, RateFamily, RtInit,
};
use urqt::instances::random_instance;
use urqt::ode::uniform_grid;

fn main() -> urqt::Result<()> {
    let n = 30;
    let params = random_instance(n, 7)?;
    let outbreak = OsnState::seeded_outbreak(n, 7)?;
    let init = init_from_state(&outbreak);
    let tgrid = uniform_grid(60.0, 0.1)?;

    let linear = integrate_linear(&params, &init, &tgrid)?;
    let saturating = integrate_generic(
        &params,
        &RateFamily::saturating(&params, 1.0)?,
        &init,
        &tgrid,
    )?;
    let rt: Vec<RtInit> = init
        .iter()
        .map(|s| RtInit {
            r: s.r,
            t: 1.0 - s.r,
        })
        .collect();
    let simplified = integrate_surqt(&params, &RateFamily::linear(&params), &rt, &tgrid)?;

    println!("{:>5} {:>9} {:>9} {:>9}", "t", "linear", "saturate", "no U");
    for k in (0..tgrid.len()).step_by(50) {
        println!(
            "{:>5.1} {:>9.5} {:>9.5} {:>9.5}",
            tgrid[k], linear.r_frac[k], saturating.r_frac[k], simplified.r_frac[k]
        );
    }
    let path = std::env::temp_dir().join("urqt_linear.csv");
    linear.write_node_csv(&path)?;
    println!("linear per-node trajectory written to {}", path.display());
    Ok(())
}
