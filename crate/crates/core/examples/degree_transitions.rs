//! Scans the mean degree over sectors and locates the jumps where the
//! network range grows by one site.
//!
//! ```bash
//! cargo run --release --example degree_transitions -- 240
//! ```

use xxnet::analysis::{find_transitions, scan_over_k, ScanOptions};

fn main() -> xxnet::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(240, |a| a.parse().expect("N must be a positive integer"));
    let scan = scan_over_k(n, 1..=n / 2, &ScanOptions::default())?;

    for r in scan.records.iter().step_by((n / 40).max(1)) {
        println!("k = {:<4} B_mid = {:+.4}  <d> = {:>7.3}  sigma_d = {:.3}", r.k, r.b_mid, r.mean_degree, r.std_degree);
    }

    let transitions = find_transitions(&scan, 4)?;
    println!();
    for p in &transitions.peaks {
        println!("m = {}: k = {}, B = {:.4}, |delta <d>| = {:.3}", p.m, p.k, p.b_mid, p.height);
    }
    Ok(())
}
