//! Label propagation on one sector, weighted and unweighted.

use xxnet::community::{community_census, lpa_detect};
use xxnet::network::build_network;

fn main() -> xxnet::Result<()> {
    let (n, k) = (60, 20);
    let net = build_network(n, k)?;
    for weighted in [true, false] {
        let lab = lpa_detect(&net, weighted)?;
        let census = community_census(&lab, false);
        println!(
            "{} LPA: {} communities after {} sweeps, mean size {:.3}, sizes {:?}",
            if weighted { "weighted  " } else { "unweighted" },
            census.n_c,
            lab.sweeps,
            census.mean_size,
            census.histogram
        );
    }
    Ok(())
}
