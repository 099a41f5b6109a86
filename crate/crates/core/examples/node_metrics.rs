//! Degree, strength, disparity and clustering of every spin, written as CSV.

use xxnet::metrics::{degree_stats, node_metrics};
use xxnet::network::build_network;

fn main() -> xxnet::Result<()> {
    let net = build_network(30, 6)?;
    let m = node_metrics(&net);
    print!("{}", m.to_csv());

    let d = degree_stats(&net);
    eprintln!("<d> = {:.4} +- {:.4}", d.mean, d.std_dev);
    eprintln!("<s> = {:.6}", m.mean_strength());
    if let Some(y) = m.mean_disparity() {
        eprintln!("<Y> = {y:.6}");
    }
    Ok(())
}
