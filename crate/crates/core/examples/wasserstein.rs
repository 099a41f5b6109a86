//! Heterogeneity of the rescaled weight distributions across sectors.
//!
//! Near full polarization every spin sees almost the same distribution, so
//! the mean pairwise distance is small; it grows once the links localize.

use xxnet::metrics::{mean_pairwise_wasserstein, rescaled_weight_distribution, wasserstein_1d};
use xxnet::network::build_network;

fn main() -> xxnet::Result<()> {
    let n = 48;
    let net = build_network(n, 1)?;
    let edge = rescaled_weight_distribution(&net, 0)?;
    let centre = rescaled_weight_distribution(&net, n / 2)?;
    println!("k = 1: W(node 1, node {}) = {:.6}", n / 2 + 1, wasserstein_1d(&edge.values, &centre.values)?);

    for k in [1, 2, 4, 8, 16, 24] {
        let w = mean_pairwise_wasserstein(&build_network(n, k)?)?;
        println!("k = {k:<3} <W> = {:.6}  ({} pairs, {} isolated)", w.mean, w.pairs, w.excluded);
    }
    Ok(())
}
