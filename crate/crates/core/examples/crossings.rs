//! Level-crossing fields of a short chain and the sector each field selects.
//!
//! ```bash
//! cargo run --example crossings -- 12
//! ```

use xxnet::xx_solver::{floor_rule_sector, level_crossing_fields, sector_for_field, sector_midpoint_field};

fn main() -> xxnet::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(12, |a| a.parse().expect("N must be a positive integer"));

    println!("crossings for N = {n}");
    for (k, b) in level_crossing_fields(n)?.iter().enumerate() {
        println!("  B_{:<3} = {b:+.6}", k + 1);
    }

    println!("\nsector midpoints");
    for k in 0..=n {
        println!("  k = {k:<3} B_mid = {:+.6}", sector_midpoint_field(n, k));
    }

    // a field sitting exactly on a crossing is ambiguous for the strict lookup
    for field in [0.9, 0.3, sector_midpoint_field(n, 2), level_crossing_fields(n)?[1]] {
        match sector_for_field(n, field) {
            Ok(k) => println!("B = {field:.6} -> k = {k}"),
            Err(e) => println!("B = {field:.6} -> {e}; floor rule gives k = {}", floor_rule_sector(n, field)?),
        }
    }
    Ok(())
}
