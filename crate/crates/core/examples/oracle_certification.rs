//! Cross-checks the free-fermion two-spin states against brute-force
//! diagonalization of small chains.

use xxnet::oracle::{certify, diagonalize_sector, rdm_from_state, wootters_concurrence, CERTIFY_TOLERANCE};
use xxnet::xx_solver::{sector_midpoint_field, two_spin_rdm, SectorState};

fn main() -> xxnet::Result<()> {
    // one pair by hand first
    let (n, k, i, j) = (8, 3, 3, 4);
    let field = sector_midpoint_field(n, k);
    let (energy, exact) = diagonalize_sector(n, k, field)?;
    let rho_exact = rdm_from_state(&exact, i, j)?;
    let fast = two_spin_rdm(&SectorState::build(n, k)?, i, j)?;
    println!("N = {n}, k = {k}, B = {field:.4}, E0 = {energy:.10}");
    println!("  C exact = {:.12}", wootters_concurrence(&rho_exact)?);
    println!("  C fast  = {:.12}", fast.concurrence());

    let max_n = 10;
    let cert = certify(max_n)?;
    println!("\nall pairs up to N = {max_n}: {} pairs", cert.pairs);
    println!("  max |rho_fast - rho_exact| = {:.2e}", cert.max_rdm_deviation);
    println!("  max |C_fast - C_exact|     = {:.2e}", cert.max_concurrence_deviation);
    println!("  worst (N, k, i, j) = {:?}", cert.worst_at);
    println!("  within {CERTIFY_TOLERANCE:e}: {}", cert.passes(CERTIFY_TOLERANCE));
    Ok(())
}
