//! Builds the concurrence network of one sector and prints the strongest
//! links and how concurrence decays with distance.

use xxnet::metrics::concurrence_by_length;
use xxnet::network::{build_network_with, to_edge_list, NetworkOptions, Reach};
use xxnet::xx_solver::sector_midpoint_field;

fn main() -> xxnet::Result<()> {
    let (n, k) = (40, 9);
    let options = NetworkOptions { reach: Reach::Full, ..Default::default() };
    let net = build_network_with(n, k, &options)?;
    let edges = to_edge_list(&net);
    println!("N = {n}, k = {k}, B_mid = {:.4}: {} links above tau = {:e}", sector_midpoint_field(n, k), edges.edges.len(), net.tau());

    let mut strongest = edges.edges.clone();
    strongest.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    for e in strongest.iter().take(5) {
        println!("  {:>2} -- {:>2}  C = {:.6}", e.i, e.j, e.weight);
    }

    println!("\nmean concurrence by length");
    for (len, c) in concurrence_by_length(&net) {
        if c > 0.0 {
            println!("  r = {len:<2} {c:.6}");
        }
    }
    Ok(())
}
