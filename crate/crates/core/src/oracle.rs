//! Brute-force ground truth for small chains.
//!
//! Everything here works on explicit state vectors in the spin basis and is
//! deliberately independent of the correlation-matrix route in
//! [`crate::xx_solver`]: amplitudes come from k×k determinants of the mode
//! matrix, the sector Hamiltonian is diagonalized directly, reduced states
//! come from partial traces, and concurrence from the general two-qubit
//! formula.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::xx_solver::mode_amplitude;

/// Default limit on the number of basis configurations in a sector.
pub const DEFAULT_CONFIG_CAP: usize = 2_000_000;

/// Sites carrying a flipped spin, strictly increasing and 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisConfig {
    sites: Vec<usize>,
}

impl BasisConfig {
    pub fn new(n: usize, sites: Vec<usize>) -> Result<Self> {
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(format!("sites {sites:?} not strictly increasing")));
        }
        if sites.iter().any(|&l| l < 1 || l > n) {
            return Err(Error::InvalidConfig(format!("sites {sites:?} outside [1, {n}]")));
        }
        Ok(BasisConfig { sites })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    fn mask(&self) -> u64 {
        self.sites.iter().fold(0, |m, &l| m | 1 << (l - 1))
    }

    fn from_mask(mask: u64) -> Self {
        let sites = (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        BasisConfig { sites }
    }
}

/// `A_{l_1..l_k} = det[S_{l_a}^b]`.
pub fn amplitude(n: usize, k: usize, config: &BasisConfig) -> Result<f64> {
    if config.sites.len() != k {
        return Err(Error::InvalidConfig(format!(
            "{} sites for sector k = {k}",
            config.sites.len()
        )));
    }
    if config.sites.iter().any(|&l| l < 1 || l > n) {
        return Err(Error::InvalidConfig(format!("sites outside [1, {n}]")));
    }
    Ok(slater_amplitude(n, &config.sites))
}

fn slater_amplitude(n: usize, sites: &[usize]) -> f64 {
    let k = sites.len();
    if k == 0 {
        return 1.0;
    }
    DMatrix::from_fn(k, k, |a, b| mode_amplitude(n, sites[a], b + 1)).determinant()
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, t| acc * (n - t) as u128 / (t + 1) as u128)
}

/// Masks with `k` of the lowest `n` bits set, in lexicographic order of the
/// corresponding site lists.
fn enumerate_configs(n: usize, k: usize) -> Vec<u64> {
    fn rec(n: usize, k: usize, start: usize, mask: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for l in start..=n - k {
            rec(n, k - 1, l + 1, mask | 1 << l, out);
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, 0, &mut out);
    out
}

/// Sector-k state in the spin basis, configs in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub k: usize,
    masks: Vec<u64>,
    pub amplitudes: Vec<f64>,
}

impl StateVector {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn configs(&self) -> impl Iterator<Item = BasisConfig> + '_ {
        self.masks.iter().map(|&m| BasisConfig::from_mask(m))
    }

    pub fn amplitude_of(&self, config: &BasisConfig) -> Option<f64> {
        let mask = config.mask();
        self.masks.iter().position(|&m| m == mask).map(|p| self.amplitudes[p])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    pub fn overlap(&self, other: &StateVector) -> f64 {
        assert_eq!(self.masks, other.masks, "states live in different sectors");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum()
    }
}

fn check_size(n: usize, k: usize, cap: usize) -> Result<()> {
    if !(1..=63).contains(&n) {
        return Err(Error::InvalidChainLength(n));
    }
    if k > n {
        return Err(Error::InvalidSector { n, k });
    }
    let size = binomial(n, k);
    if size > cap as u128 {
        return Err(Error::SizeCap { n, k, size, cap });
    }
    Ok(())
}

pub fn full_state(n: usize, k: usize) -> Result<StateVector> {
    full_state_with_cap(n, k, DEFAULT_CONFIG_CAP)
}

/// Ground state of sector k from the determinant amplitudes.
pub fn full_state_with_cap(n: usize, k: usize, cap: usize) -> Result<StateVector> {
    check_size(n, k, cap)?;
    let masks = enumerate_configs(n, k);
    let amplitudes = masks
        .iter()
        .map(|&m| slater_amplitude(n, BasisConfig::from_mask(m).sites()))
        .collect();
    Ok(StateVector { n, k, masks, amplitudes })
}

/// Two-spin reduced density matrix by explicit partial trace.
///
/// Basis order ↑↑, ↑↓, ↓↑, ↓↓ with spin `i` first.
pub fn rdm_from_state(state: &StateVector, i: usize, j: usize) -> Result<[[f64; 4]; 4]> {
    if i < 1 || j > state.n || i >= j {
        return Err(Error::InvalidPair { n: state.n, i, j });
    }
    let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
    let pair = bi | bj;
    let mut groups: HashMap<u64, [f64; 4]> = HashMap::new();
    for (&m, &amp) in state.masks.iter().zip(&state.amplitudes) {
        let local = 2 * usize::from(m & bi != 0) + usize::from(m & bj != 0);
        groups.entry(m & !pair).or_insert([0.0; 4])[local] += amp;
    }
    // fixed summation order keeps the result deterministic
    let mut keys: Vec<u64> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut rho = [[0.0; 4]; 4];
    for key in keys {
        let v = groups[&key];
        for a in 0..4 {
            for b in 0..4 {
                rho[a][b] += v[a] * v[b];
            }
        }
    }
    Ok(rho)
}

/// Tolerance for trace, symmetry and positivity checks on density matrices.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Eigenvalues of ρ at or below this are treated as exact zeros.
pub const SPECTRAL_FLOOR: f64 = 1e-14;

/// Wootters concurrence of a real two-qubit density matrix:
/// `max(0, λ1 - λ2 - λ3 - λ4)` with `λ` the decreasing square roots of the
/// eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`.
pub fn wootters_concurrence(rho: &[[f64; 4]; 4]) -> Result<f64> {
    let m = Matrix4::from_fn(|a, b| rho[a][b]);
    let asym = (m - m.transpose()).amax();
    if asym > DENSITY_TOLERANCE {
        return Err(Error::InvalidDensityMatrix(format!("not symmetric ({asym:e})")));
    }
    let trace = m.trace();
    if (trace - 1.0).abs() > DENSITY_TOLERANCE {
        return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
    }
    let eig = SymmetricEigen::new(m);
    let min = eig.eigenvalues.min();
    if min < -DENSITY_TOLERANCE {
        return Err(Error::InvalidDensityMatrix(format!("eigenvalue {min:e} < 0")));
    }
    // eigenvalues at roundoff level are exact zeros of the state
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(|x| {
            if x <= SPECTRAL_FLOOR {
                0.0
            } else {
                x.sqrt()
            }
        }))
        * eig.eigenvectors.transpose();
    // σy⊗σy for real matrices: anti-diagonal (-1, 1, 1, -1)
    let yy = Matrix4::new(
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0,
    );
    // T = √ρ Y √ρ squares to √ρ ρ̃ √ρ, so the λ are |eig(T)|
    let t = root * yy * root;
    let t = (t + t.transpose()) * 0.5;
    let mut lambda: Vec<f64> = t.symmetric_eigenvalues().iter().map(|x| x.abs()).collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).clamp(0.0, 1.0))
}

/// Lowest eigenpair of the sector-k Hamiltonian, with the state's global
/// sign fixed by making its largest-magnitude amplitude positive.
pub fn diagonalize_sector(n: usize, k: usize, field: f64) -> Result<(f64, StateVector)> {
    diagonalize_sector_with_cap(n, k, field, DEFAULT_CONFIG_CAP)
}

/// Sector dimension above which the Lanczos path replaces dense eigensolving.
pub const DENSE_LIMIT: usize = 400;

pub fn diagonalize_sector_with_cap(
    n: usize,
    k: usize,
    field: f64,
    cap: usize,
) -> Result<(f64, StateVector)> {
    check_size(n, k, cap)?;
    let h = SectorHamiltonian::new(n, k, field);
    let (energy, vector) = if h.dim() <= DENSE_LIMIT {
        h.lowest_dense()?
    } else {
        h.lowest_lanczos()?
    };
    let mut amplitudes = vector;
    let pivot = amplitudes
        .iter()
        .copied()
        .fold(0.0f64, |best, a| if a.abs() > best.abs() { a } else { best });
    if pivot < 0.0 {
        amplitudes.iter_mut().for_each(|a| *a = -*a);
    }
    Ok((energy, StateVector { n, k, masks: h.masks, amplitudes }))
}

/// Gap below which the lowest level counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Sector-restricted XX Hamiltonian in the lexicographic config basis.
pub struct SectorHamiltonian {
    masks: Vec<u64>,
    diagonal: f64,
    // hopping partners of each config
    hops: Vec<Vec<usize>>,
}

impl SectorHamiltonian {
    pub fn new(n: usize, k: usize, field: f64) -> Self {
        let masks = enumerate_configs(n, k);
        let index: HashMap<u64, usize> = masks.iter().enumerate().map(|(p, &m)| (m, p)).collect();
        let hops = masks
            .iter()
            .map(|&m| {
                (0..n.saturating_sub(1))
                    .filter(|&l| (m >> l & 1) != (m >> (l + 1) & 1))
                    .map(|l| index[&(m ^ (0b11 << l))])
                    .collect()
            })
            .collect();
        // -B Σ σz with N - k up spins and k down spins
        let diagonal = -field * (n as f64 - 2.0 * k as f64);
        SectorHamiltonian { masks, diagonal, hops }
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (p, out) in y.iter_mut().enumerate() {
            let hop: f64 = self.hops[p].iter().map(|&q| x[q]).sum();
            *out = self.diagonal * x[p] - hop;
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut h = DMatrix::from_diagonal_element(d, d, self.diagonal);
        for (p, hs) in self.hops.iter().enumerate() {
            for &q in hs {
                h[(p, q)] -= 1.0;
            }
        }
        h
    }

    fn lowest_dense(&self) -> Result<(f64, Vec<f64>)> {
        let eig = SymmetricEigen::new(self.dense());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        if order.len() > 1 {
            let gap = eig.eigenvalues[order[1]] - eig.eigenvalues[order[0]];
            if gap < DEGENERACY_GAP {
                return Err(Error::Degenerate { gap });
            }
        }
        let v = eig.eigenvectors.column(order[0]);
        Ok((eig.eigenvalues[order[0]], v.iter().copied().collect()))
    }

    /// Lanczos with full reorthogonalization.
    fn lowest_lanczos(&self) -> Result<(f64, Vec<f64>)> {
        let d = self.dim();
        let max_iter = d.min(300);
        // deterministic, non-symmetric start vector
        let mut v = DVector::from_fn(d, |p, _| 1.0 + ((p * 7919) % 104_729) as f64 / 104_729.0);
        v.normalize_mut();
        let mut basis: Vec<DVector<f64>> = vec![v];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = DVector::zeros(d);
        let mut previous = f64::INFINITY;
        loop {
            let m = basis.len();
            self.apply(basis[m - 1].as_slice(), w.as_mut_slice());
            let a = basis[m - 1].dot(&w);
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&w);
                    w.axpy(-c, b, 1.0);
                }
            }
            let norm = w.norm();
            let (theta, gap, y) = tridiagonal_lowest(&alpha, &beta);
            let converged = (theta - previous).abs() < 1e-14 * theta.abs().max(1.0);
            previous = theta;
            if norm < 1e-12 || m >= max_iter || (converged && m > 2) {
                if gap < DEGENERACY_GAP {
                    return Err(Error::Degenerate { gap });
                }
                let mut x = DVector::zeros(d);
                for (c, b) in y.iter().zip(&basis) {
                    x.axpy(*c, b, 1.0);
                }
                x.normalize_mut();
                return Ok((theta, x.iter().copied().collect()));
            }
            beta.push(norm);
            basis.push(&w / norm);
        }
    }
}

/// Lowest eigenvalue, gap to the next one, and eigenvector of the Lanczos
/// tridiagonal matrix.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for p in 0..m {
        t[(p, p)] = alpha[p];
        if p + 1 < m {
            t[(p, p + 1)] = beta[p];
            t[(p + 1, p)] = beta[p];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let gap = if m > 1 {
        eig.eigenvalues[order[1]] - eig.eigenvalues[order[0]]
    } else {
        f64::INFINITY
    };
    let y = eig.eigenvectors.column(order[0]).iter().copied().collect();
    (eig.eigenvalues[order[0]], gap, y)
}

/// Tolerance of [`certify`].
pub const CERTIFY_TOLERANCE: f64 = 1e-10;

/// Outcome of comparing the fast two-spin states against the brute-force
/// ones for every chain up to some length.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Certification {
    pub max_n: usize,
    pub pairs: usize,
    pub max_rdm_deviation: f64,
    pub max_concurrence_deviation: f64,
    /// `(n, k, i, j)` of the largest deviation of either kind.
    pub worst_at: (usize, usize, usize, usize),
}

impl Certification {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rdm_deviation < tol && self.max_concurrence_deviation < tol
    }
}

/// Sweeps all `2 <= N <= max_n`, `0 <= k <= N` and pairs `i < j`, checking
/// the free-fermion reduced states and concurrences against the partial
/// trace of the explicit ground state and the general two-qubit formula.
pub fn certify(max_n: usize) -> Result<Certification> {
    if max_n < 2 {
        return Err(Error::InvalidChainLength(max_n));
    }
    let mut report = Certification {
        max_n,
        pairs: 0,
        max_rdm_deviation: 0.0,
        max_concurrence_deviation: 0.0,
        worst_at: (0, 0, 0, 0),
    };
    let mut worst = -1.0f64;
    for n in 2..=max_n {
        for k in 0..=n {
            let state = crate::xx_solver::SectorState::build(n, k)?;
            let vector = full_state(n, k)?;
            for i in 1..n {
                for j in i + 1..=n {
                    let fast = crate::xx_solver::two_spin_rdm(&state, i, j)?;
                    let exact = rdm_from_state(&vector, i, j)?;
                    let m = fast.matrix();
                    let mut d_rdm = 0.0f64;
                    for a in 0..4 {
                        for b in 0..4 {
                            d_rdm = d_rdm.max((m[a][b] - exact[a][b]).abs());
                        }
                    }
                    let d_c = (fast.concurrence() - wootters_concurrence(&exact)?).abs();
                    report.max_rdm_deviation = report.max_rdm_deviation.max(d_rdm);
                    report.max_concurrence_deviation = report.max_concurrence_deviation.max(d_c);
                    if d_rdm.max(d_c) > worst {
                        worst = d_rdm.max(d_c);
                        report.worst_at = (n, k, i, j);
                    }
                    report.pairs += 1;
                }
            }
        }
    }
    Ok(report)
}
