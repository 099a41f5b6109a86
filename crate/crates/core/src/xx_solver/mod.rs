//! Exact ground states of the open XX chain
//!
//! H = -[ sum_i (σx_i σx_{i+1} + σy_i σy_{i+1}) / 2 + B σz_i ]  (J = 1)
//!
//! The Jordan-Wigner map turns every magnetization sector into a Slater
//! determinant of standing-wave modes. Fermion occupation is identified with
//! a flipped (down) spin, so sector k = 0 is the fully polarized all-up state.
//! Sites are 1-based everywhere in the public API.

mod coherence;

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use coherence::{coherence_via_modes, coherence_via_window, RowScanner};

/// Fields closer than this to a level crossing are treated as degenerate.
pub const CROSSING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n: usize,
    pub field: f64,
}

impl ChainSpec {
    pub fn new(n: usize, field: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidChainLength(n));
        }
        if !field.is_finite() {
            return Err(Error::NonFiniteField { field });
        }
        Ok(ChainSpec { n, field })
    }

    /// Ground-state sector for this field.
    pub fn sector(&self) -> Result<usize> {
        sector_for_field(self.n, self.field)
    }
}

/// `cos(kπ/(N+1))`, defined for every `k` so that `k = 0` gives 1 and
/// `k = N + 1` gives -1.
pub fn crossing_field(n: usize, k: usize) -> f64 {
    (k as f64 * PI / (n as f64 + 1.0)).cos()
}

/// The N level-crossing fields `B_1 > B_2 > ... > B_N`.
pub fn level_crossing_fields(n: usize) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::InvalidChainLength(n));
    }
    Ok((1..=n).map(|k| crossing_field(n, k)).collect())
}

/// Midpoint `(B_{k+1} + B_k)/2` of the field window where sector k is the
/// ground state. For k = 0 the upper edge is taken as B = 1.
pub fn sector_midpoint_field(n: usize, k: usize) -> f64 {
    0.5 * (crossing_field(n, k) + crossing_field(n, k + 1))
}

fn check_crossing(n: usize, field: f64) -> Result<()> {
    if !field.is_finite() {
        return Err(Error::NonFiniteField { field });
    }
    if field.abs() > 1.0 {
        return Ok(());
    }
    // the nearest crossings lie next to the floor-rule estimate
    let t = (n as f64 + 1.0) * field.clamp(-1.0, 1.0).acos() / PI;
    let guess = t.round() as i64;
    for k in (guess - 1).max(1)..=(guess + 1).min(n as i64) {
        let k = k as usize;
        if (field - crossing_field(n, k)).abs() <= CROSSING_TOLERANCE {
            return Err(Error::DegenerateField { field, k });
        }
    }
    Ok(())
}

/// Ground-state sector k for field B, with `B_{k+1} < B < B_k`.
///
/// Fields on a crossing are rejected: the ground state there is a
/// degenerate pair of sectors.
pub fn sector_for_field(n: usize, field: f64) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidChainLength(n));
    }
    check_crossing(n, field)?;
    Ok(floor_sector(n, field))
}

/// `k = ⌊(N+1) arccos(B)/π⌋`, clamped to `[0, N]`.
///
/// Unlike [`sector_for_field`] this accepts fields on a crossing, where it
/// returns the sector just below the crossing. Ratios within 1e-9 of an
/// integer are snapped before flooring, so `B = cos(kπ/(N+1))` yields `k`.
pub fn floor_rule_sector(n: usize, field: f64) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidChainLength(n));
    }
    if !field.is_finite() {
        return Err(Error::NonFiniteField { field });
    }
    Ok(floor_sector(n, field))
}

fn floor_sector(n: usize, field: f64) -> usize {
    if field >= 1.0 {
        return 0;
    }
    if field <= -1.0 {
        return n;
    }
    let t = (n as f64 + 1.0) * field.acos() / PI;
    let r = t.round();
    let k = if (t - r).abs() < 1e-9 { r } else { t.floor() };
    (k.max(0.0) as usize).min(n)
}

/// `ε_g^k = -(N - 2k) B - 2 Σ_{l=1}^k cos(πl/(N+1))`.
pub fn ground_energy(n: usize, k: usize, field: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidChainLength(n));
    }
    if k > n {
        return Err(Error::InvalidSector { n, k });
    }
    let band: f64 = (1..=k).map(|l| crossing_field(n, l)).sum();
    Ok(-(n as f64 - 2.0 * k as f64) * field - 2.0 * band)
}

/// Exact ground state of sector k: the occupied single-particle modes and
/// the one-body correlation matrix `G = S Sᵀ`, `G_ab = <c†_a c_b>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    n: usize,
    k: usize,
    modes: DMatrix<f64>,
    corr: DMatrix<f64>,
}

/// `S_l^m = sqrt(2/(N+1)) sin(π m l/(N+1))`, 1-based.
pub fn mode_amplitude(n: usize, l: usize, m: usize) -> f64 {
    let scale = (2.0 / (n as f64 + 1.0)).sqrt();
    scale * (PI * (m * l) as f64 / (n as f64 + 1.0)).sin()
}

impl SectorState {
    pub fn build(n: usize, k: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidChainLength(n));
        }
        if k > n {
            return Err(Error::InvalidSector { n, k });
        }
        let modes = DMatrix::from_fn(n, k, |r, c| mode_amplitude(n, r + 1, c + 1));
        let corr = &modes * modes.transpose();
        Ok(SectorState { n, k, modes, corr })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// N×k mode matrix, 0-based storage.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// N×N correlation matrix, 0-based storage.
    pub fn correlations(&self) -> &DMatrix<f64> {
        &self.corr
    }

    /// `G_ab`, 1-based.
    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.corr[(a - 1, b - 1)]
    }

    /// Reduced state of (i, j) given the string coherence `z`.
    ///
    /// `p_dd = <n_i n_j>` is the 2×2 minor of `G`. When that minor cancels
    /// to within `1e-6` of `G_ii G_jj` it is recomputed as the Cauchy-Binet
    /// sum of squares over occupied modes, and `p_uu` likewise over empty
    /// modes, so exact zeros (k = 1, k = N - 1) stay zero instead of leaving
    /// roundoff that the square root in the concurrence would amplify.
    pub fn pair_state(&self, i: usize, j: usize, z: f64) -> TwoSpinState {
        let (g_ii, g_jj, g_ij) = (self.g(i, i), self.g(j, j), self.g(i, j));
        let mut p_dd = g_ii * g_jj - g_ij * g_ij;
        if p_dd < 1e-6 * g_ii * g_jj {
            p_dd = self.minor_sum(i, j, 1..=self.k);
        }
        let mut p_uu = 1.0 - g_ii - g_jj + p_dd;
        let (h_ii, h_jj) = (1.0 - g_ii, 1.0 - g_jj);
        if p_uu < 1e-6 * h_ii * h_jj {
            p_uu = self.minor_sum(i, j, self.k + 1..=self.n);
        }
        TwoSpinState {
            i,
            j,
            p_uu,
            p_ud: g_jj - p_dd,
            p_du: g_ii - p_dd,
            p_dd,
            z,
        }
    }

    /// `Σ_{m<m'} (S_i^m S_j^m' - S_i^m' S_j^m)²` over the given modes.
    fn minor_sum(&self, i: usize, j: usize, modes: std::ops::RangeInclusive<usize>) -> f64 {
        let a: Vec<f64> = modes.clone().map(|m| mode_amplitude(self.n, i, m)).collect();
        let b: Vec<f64> = modes.map(|m| mode_amplitude(self.n, j, m)).collect();
        let mut acc = 0.0;
        for p in 0..a.len() {
            for q in p + 1..a.len() {
                let d = a[p] * b[q] - a[q] * b[p];
                acc += d * d;
            }
        }
        acc
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i < 1 || j > self.n || i >= j {
            return Err(Error::InvalidPair { n: self.n, i, j });
        }
        Ok(())
    }
}

/// `<σ+_i σ-_j>` including the Jordan-Wigner string over `i < l < j`.
///
/// Evaluated through whichever of the two determinant forms is smaller:
/// the `(j-i)`-window of `2G - 1` or the `(k+1)`-bordered mode overlap.
pub fn string_coherence(state: &SectorState, i: usize, j: usize) -> Result<f64> {
    state.check_pair(i, j)?;
    if j - i <= state.k + 1 {
        Ok(coherence_via_window(state, i, j))
    } else {
        Ok(coherence_via_modes(state, i, j))
    }
}

/// Reduced state of spins (i, j). Basis order: ↑↑, ↑↓, ↓↑, ↓↓ (spin i first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinState {
    pub i: usize,
    pub j: usize,
    pub p_uu: f64,
    pub p_ud: f64,
    pub p_du: f64,
    pub p_dd: f64,
    /// `<σ+_i σ-_j>`, equal to the ↑↓/↓↑ coherence.
    pub z: f64,
}

impl TwoSpinState {
    /// Assemble from the one-body correlators of the pair and the coherence.
    pub fn from_correlators(i: usize, j: usize, g_ii: f64, g_jj: f64, g_ij: f64, z: f64) -> Self {
        let p_dd = g_ii * g_jj - g_ij * g_ij;
        TwoSpinState {
            i,
            j,
            p_uu: 1.0 - g_ii - g_jj + p_dd,
            p_ud: g_jj - p_dd,
            p_du: g_ii - p_dd,
            p_dd,
            z,
        }
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        [
            [self.p_uu, 0.0, 0.0, 0.0],
            [0.0, self.p_ud, self.z, 0.0],
            [0.0, self.z, self.p_du, 0.0],
            [0.0, 0.0, 0.0, self.p_dd],
        ]
    }

    /// Concurrence of an X-shaped state without ↑↑/↓↓ coherence:
    /// `2 max(0, |z| - sqrt(p_uu p_dd))`.
    pub fn concurrence(&self) -> f64 {
        let diag = (self.p_uu.max(0.0) * self.p_dd.max(0.0)).sqrt();
        (2.0 * (self.z.abs() - diag)).max(0.0)
    }
}

/// Two-spin reduced density matrix of the sector ground state.
pub fn two_spin_rdm(state: &SectorState, i: usize, j: usize) -> Result<TwoSpinState> {
    let z = string_coherence(state, i, j)?;
    Ok(state.pair_state(i, j, z))
}
