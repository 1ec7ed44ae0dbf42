//! Generate the two network families and compare their structure.
//!
//! cargo run --example networks -- [n] [seed]

use urqt::graph::{generate_scale_free, generate_small_world, DirectedNetwork};

fn describe(name: &str, g: &DirectedNetwork) {
    let deg = g.in_degrees();
    let max = deg.iter().max().copied().unwrap_or(0);
    let mean = deg.iter().sum::<usize>() as f64 / g.n() as f64;
    println!(
        "{name:<12} nodes {:>4}  directed edges {:>5}  mean degree {mean:>5.2}  max degree {max:>3}  mean path {:.3}",
        g.n(),
        g.edge_count(),
        g.mean_shortest_path()
    );
}

fn main() -> urqt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);

    let sf = generate_scale_free(n, 2, seed)?;
    let sw = generate_small_world(n, 4, 0.1, seed)?;
    let ring = DirectedNetwork::ring_lattice(n, 4)?;
    describe("scale-free", &sf);
    describe("small-world", &sw);
    describe("ring", &ring);

    let path = std::env::temp_dir().join("urqt_scale_free.edges");
    sf.write_edge_list(&path)?;
    println!("scale-free edge list written to {}", path.display());
    Ok(())
}
