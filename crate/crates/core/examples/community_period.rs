//! Predicted period of the community pattern for a rational mean size, and
//! the clustering profile of the central spins at the matching field.

use xxnet::analysis::{clustering_profile, detect_period, field_for_mean_size, parse_rational, period_prediction};
use xxnet::network::{NetworkOptions, Reach};

fn main() -> xxnet::Result<()> {
    let s = parse_rational("7/2")?;
    let pred = period_prediction(s)?;
    println!("s = {s}: p = {}, q = {}, f = {:.4}, group of {} spins", pred.p, pred.q, pred.f, pred.group_size);

    let field = field_for_mean_size(3.5);
    let options = NetworkOptions { reach: Reach::QuietRun(16), ..Default::default() };
    let profile = clustering_profile(300, field, 40, &options)?;
    println!("B = {field:.6}, N = 300, k = {}", profile.k);
    for (x, c) in profile.positions.iter().zip(&profile.values).take(14) {
        println!("  {x:>6.1} {c:.8}");
    }
    match detect_period(&profile.values)? {
        Some(p) => println!("detected period {p}"),
        None => println!("no period detected"),
    }
    Ok(())
}
