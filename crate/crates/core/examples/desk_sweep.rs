//! The full factorial study at desk scale: 729 combos on a 50-node network,
//! each classified by the linear model, 20 of them compared with ensembles.
//!
//! cargo run --release --example desk_sweep -- [out_dir] [scale_free|small_world]

use urqt::harness::{run_sweep, ExperimentConfig, NetworkSpec, Outcome};

fn main() -> urqt::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "sweep_out".to_string());
    let network = match args.next().as_deref() {
        Some("small_world") => NetworkSpec::SmallWorld { k: 4, p: 0.1 },
        _ => NetworkSpec::ScaleFree { m: 2 },
    };
    let config = ExperimentConfig {
        network,
        ..ExperimentConfig::default()
    };
    let reports = run_sweep(&config, Some(std::path::Path::new(&out)))?;
    let dies = reports
        .iter()
        .filter(|r| r.outcome_linear == Outcome::DiesOut)
        .count();
    println!("{dies} DiesOut, {} Persists", reports.len() - dies);
    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>9}",
        "combo", "s(Q1)", "linear", "ensemble", "deviation"
    );
    for r in reports.iter().filter(|r| r.deviation.is_some()) {
        println!(
            "{:>5} {:>9.4} {:>9} {:>9} {:>9.4}",
            r.combo,
            r.s_q1,
            r.outcome_linear.as_str(),
            r.outcome_exact.map(Outcome::as_str).unwrap_or("-"),
            r.deviation.unwrap_or(f64::NAN)
        );
    }
    println!("summary and trajectories written under {out}");
    Ok(())
}
