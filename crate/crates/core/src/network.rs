//! Weighted concurrence networks and their thresholded topology.
//!
//! Nodes are 0-based (node `a` is spin `a + 1`); the edge-list text format
//! uses 1-based spin indices.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::xx_solver::{RowScanner, SectorState};

/// Default separability threshold.
pub const DEFAULT_TAU: f64 = 1e-10;

/// How far along each row pair concurrences are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reach {
    /// Every pair.
    Full,
    /// Stop a row after this many consecutive separable pairs.
    ///
    /// Off the critical point concurrence only survives up to a short
    /// distance, so rows can end early. This is exact whenever no link lies
    /// beyond such a run of zeros, which is what the regression tests check
    /// against [`Reach::Full`] for the sectors the scans use. It is not safe
    /// near `k = 1`, where the network is complete but some weights vanish
    /// at mode nodes.
    QuietRun(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkOptions {
    pub tau: f64,
    pub reach: Reach,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        NetworkOptions { tau: DEFAULT_TAU, reach: Reach::Full }
    }
}

/// Symmetric concurrence matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNetwork {
    n: usize,
    weights: Vec<f64>,
    tau: f64,
    /// `(N, k)` of the spin state the network was built from.
    pub meta: Option<(usize, usize)>,
}

impl WeightedNetwork {
    /// Validates symmetry, zero diagonal and `0 <= w <= 1`; entries `<= tau`
    /// are stored as exact zeros.
    pub fn from_dense(weights: DMatrix<f64>, tau: f64) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::InvalidArgument("weight matrix is not square".into()));
        }
        let mut flat = vec![0.0; n * n];
        for a in 0..n {
            if weights[(a, a)] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at node {a}")));
            }
            for b in 0..n {
                let w = weights[(a, b)];
                if w != weights[(b, a)] {
                    return Err(Error::InvalidArgument(format!("asymmetric at ({a}, {b})")));
                }
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidArgument(format!("weight {w} at ({a}, {b})")));
                }
                flat[a * n + b] = if w > tau { w } else { 0.0 };
            }
        }
        Ok(WeightedNetwork { n, weights: flat, tau, meta: None })
    }

    pub fn empty(n: usize, tau: f64) -> Self {
        WeightedNetwork { n, weights: vec![0.0; n * n], tau, meta: None }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[inline]
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.weights[a * self.n..(a + 1) * self.n]
    }

    /// `(b, ω_ab)` for every linked node `b`, increasing in `b`.
    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row(a).iter().copied().enumerate().filter(|&(_, w)| w > 0.0)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    fn set(&mut self, a: usize, b: usize, w: f64) {
        let w = if w > self.tau { w } else { 0.0 };
        self.weights[a * self.n + b] = w;
        self.weights[b * self.n + a] = w;
    }
}

pub fn build_network(n: usize, k: usize) -> Result<WeightedNetwork> {
    build_network_with(n, k, &NetworkOptions::default())
}

/// Concurrence network of the sector-k ground state.
pub fn build_network_with(n: usize, k: usize, options: &NetworkOptions) -> Result<WeightedNetwork> {
    let state = SectorState::build(n, k)?;
    Ok(network_from_state(&state, options))
}

pub fn network_from_state(state: &SectorState, options: &NetworkOptions) -> WeightedNetwork {
    let n = state.n();
    let tau = options.tau;
    let rows: Vec<Vec<(usize, f64)>> = (1..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            let mut quiet = 0;
            for (j, z) in RowScanner::new(state, i) {
                let w = state.pair_state(i, j, z).concurrence().min(1.0);
                if w > tau {
                    row.push((j, w));
                    quiet = 0;
                } else {
                    quiet += 1;
                    if let Reach::QuietRun(limit) = options.reach {
                        if quiet >= limit {
                            break;
                        }
                    }
                }
            }
            row
        })
        .collect();
    let mut net = WeightedNetwork::empty(n, tau);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, w) in row {
            net.set(i, j - 1, w);
        }
    }
    net.meta = Some((n, state.k()));
    net
}

/// `a_ij = Θ(ω_ij - τ)`.
pub fn adjacency(net: &WeightedNetwork) -> DMatrix<u8> {
    DMatrix::from_fn(net.len(), net.len(), |a, b| u8::from(net.weight(a, b) > net.tau()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// 1-based, `i < j`
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub k: Option<usize>,
    pub tau: f64,
    pub edges: Vec<Edge>,
}

pub fn to_edge_list(net: &WeightedNetwork) -> EdgeList {
    let mut edges = Vec::new();
    for a in 0..net.len() {
        for (b, w) in net.neighbors(a).filter(|&(b, _)| b > a) {
            edges.push(Edge { i: a + 1, j: b + 1, weight: w });
        }
    }
    EdgeList {
        n: net.len(),
        k: net.meta.map(|(_, k)| k),
        tau: net.tau(),
        edges,
    }
}

pub fn from_edge_list(list: &EdgeList) -> Result<WeightedNetwork> {
    let mut net = WeightedNetwork::empty(list.n, list.tau);
    let mut last = (0, 0);
    for e in &list.edges {
        if e.i < 1 || e.j > list.n || e.i >= e.j {
            return Err(Error::InvalidPair { n: list.n, i: e.i, j: e.j });
        }
        if (e.i, e.j) <= last {
            return Err(Error::Parse(format!("edge ({}, {}) out of order", e.i, e.j)));
        }
        if !(e.weight > 0.0 && e.weight <= 1.0) {
            return Err(Error::Parse(format!("weight {} out of range", e.weight)));
        }
        last = (e.i, e.j);
        net.set(e.i - 1, e.j - 1, e.weight);
    }
    net.meta = list.k.map(|k| (list.n, k));
    Ok(net)
}

impl EdgeList {
    /// `# N k tau` then `i j weight` per line, weights with 17 significant
    /// digits so that parsing returns the same bits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let k = self.k.map_or_else(|| "NA".to_string(), |k| k.to_string());
        writeln!(out, "# {} {} {:e}", self.n, k, self.tau).unwrap();
        for e in &self.edges {
            writeln!(out, "{} {} {:.16e}", e.i, e.j, e.weight).unwrap();
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "#" {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let n = parse_field::<usize>(fields[1])?;
        let k = match fields[2] {
            "NA" => None,
            s => Some(parse_field::<usize>(s)?),
        };
        let tau = parse_field::<f64>(fields[3])?;
        let mut edges = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("bad edge line {line:?}")));
            }
            edges.push(Edge {
                i: parse_field(f[0])?,
                j: parse_field(f[1])?,
                weight: parse_field(f[2])?,
            });
        }
        Ok(EdgeList { n, k, tau, edges })
    }
}

fn parse_field<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("cannot parse {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_excitation_is_product_form() {
        let n = 40;
        let net = build_network(n, 1).unwrap();
        let alpha: Vec<f64> = (1..=n)
            .map(|i| 2.0 * (i as f64 * PI / (n as f64 + 1.0)).sin() / (n as f64 + 1.0).sqrt())
            .collect();
        for a in 0..n {
            for b in 0..n {
                let want = if a == b { 0.0 } else { alpha[a] * alpha[b] };
                assert!((net.weight(a, b) - want).abs() < 1e-10);
            }
        }
        let adj = adjacency(&net);
        for a in 0..n {
            assert_eq!(adj.row(a).iter().map(|&x| x as usize).sum::<usize>(), n - 1);
        }
    }

    #[test]
    fn polarized_sector_is_empty() {
        let net = build_network(15, 0).unwrap();
        assert_eq!(net.max_weight(), 0.0);
        assert_eq!(adjacency(&net).iter().map(|&x| x as usize).sum::<usize>(), 0);
        assert!(to_edge_list(&net).edges.is_empty());
    }

    #[test]
    fn network_invariants() {
        for (n, k) in [(20, 3), (33, 16), (25, 24)] {
            let net = build_network(n, k).unwrap();
            for a in 0..n {
                assert_eq!(net.weight(a, a), 0.0);
                for b in 0..n {
                    let w = net.weight(a, b);
                    assert_eq!(w, net.weight(b, a));
                    assert!(w == 0.0 || (w > net.tau() && w <= 1.0));
                }
            }
        }
    }

    #[test]
    fn deterministic_build() {
        let a = build_network(60, 17).unwrap();
        let b = build_network(60, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tau_thresholds_topology() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1e-11, 0.3, 1e-11, 0.0, 0.0, 0.3, 0.0, 0.0]);
        let net = WeightedNetwork::from_dense(m, 1e-10).unwrap();
        assert_eq!(net.weight(0, 1), 0.0);
        let adj = adjacency(&net);
        assert_eq!(adj[(0, 2)], 1);
        assert_eq!(adj[(0, 1)], 0);
    }

    #[test]
    fn dense_validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 0.2, 0.3, 0.0]);
        assert!(WeightedNetwork::from_dense(asym, 0.0).is_err());
        let diag = DMatrix::from_row_slice(2, 2, &[0.1, 0.2, 0.2, 0.0]);
        assert!(WeightedNetwork::from_dense(diag, 0.0).is_err());
    }

    #[test]
    fn edge_list_text() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        let net = WeightedNetwork::from_dense(m, DEFAULT_TAU).unwrap();
        let list = to_edge_list(&net);
        assert_eq!(list.edges, vec![Edge { i: 1, j: 2, weight: 0.5 }]);
        assert_eq!(list.to_text(), "# 2 NA 1e-10\n1 2 5.0000000000000000e-1\n");

        let net = build_network(20, 7).unwrap();
        let text = to_edge_list(&net).to_text();
        assert!(text.starts_with("# 20 7 1e-10\n"));
        let back = from_edge_list(&EdgeList::read_from(text.as_bytes()).unwrap()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(EdgeList::read_from("3 4 5\n".as_bytes()).is_err());
        assert!(EdgeList::read_from("# 3 1 1e-10\n1 x 0.5\n".as_bytes()).is_err());
        let bad = EdgeList::read_from("# 3 1 1e-10\n2 1 0.5\n".as_bytes()).unwrap();
        assert!(from_edge_list(&bad).is_err());
        let dup = EdgeList::read_from("# 3 1 1e-10\n1 2 0.5\n1 2 0.5\n".as_bytes()).unwrap();
        assert!(from_edge_list(&dup).is_err());
    }
}
