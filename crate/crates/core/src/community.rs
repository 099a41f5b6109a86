//! Semi-synchronous label propagation with Prec-Max tie breaking.
//!
//! Nodes are first colored greedily; every sweep then updates one color
//! class at a time (ascending color), all nodes of a class simultaneously.
//! A node takes the label with the largest (optionally weight-summed)
//! frequency among its neighbours. If its current label is among the
//! maxima it is kept, otherwise the largest maximal label wins.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::WeightedNetwork;

pub const DEFAULT_MAX_SWEEPS: usize = 1000;
/// Weighted frequencies closer than this are tied.
pub const FREQUENCY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl Coloring {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

/// Greedy coloring in node order, each node taking the smallest color not
/// used by an earlier neighbour.
pub fn greedy_coloring(adjacency: &DMatrix<u8>) -> Coloring {
    let n = adjacency.nrows();
    color_with(n, |a| (0..n).filter(move |&b| b != a && adjacency[(a, b)] != 0))
}

fn color_with<I, F>(n: usize, neighbors: F) -> Coloring
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut colors = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut taken = Vec::new();
    for a in 0..n {
        taken.clear();
        taken.resize(classes.len() + 1, false);
        for b in neighbors(a) {
            if b < a {
                taken[colors[b]] = true;
            }
        }
        let c = taken.iter().position(|&t| !t).unwrap();
        if c == classes.len() {
            classes.push(Vec::new());
        }
        colors[a] = c;
        classes[c].push(a);
    }
    Coloring { colors, classes }
}

fn network_coloring(net: &WeightedNetwork) -> Coloring {
    color_with(net.len(), |a| net.neighbors(a).map(|(b, _)| b))
}

/// Final labels; label ids start at 1 (node `a` starts with `a + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub labels: Vec<usize>,
    /// 0-based indices of nodes without links.
    pub isolated: Vec<usize>,
    pub sweeps: usize,
}

impl Labeling {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `node,label`, 1-based nodes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,label\n");
        for (a, l) in self.labels.iter().enumerate() {
            writeln!(out, "{},{}", a + 1, l).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpaOptions {
    pub weighted: bool,
    pub max_sweeps: usize,
}

impl Default for LpaOptions {
    fn default() -> Self {
        LpaOptions { weighted: true, max_sweeps: DEFAULT_MAX_SWEEPS }
    }
}

pub fn lpa_detect(net: &WeightedNetwork, weighted: bool) -> Result<Labeling> {
    lpa_detect_with(net, &LpaOptions { weighted, ..LpaOptions::default() })
}

pub fn lpa_detect_with(net: &WeightedNetwork, options: &LpaOptions) -> Result<Labeling> {
    let n = net.len();
    let coloring = network_coloring(net);
    let mut labels: Vec<usize> = (1..=n).collect();
    let mut before_last: Option<Vec<usize>> = None;
    for sweep in 1..=options.max_sweeps {
        let start = labels.clone();
        for class in &coloring.classes {
            let updates: Vec<usize> = class
                .par_iter()
                .map(|&a| choose_label(net, &labels, a, options.weighted))
                .collect();
            for (&a, l) in class.iter().zip(updates) {
                labels[a] = l;
            }
        }
        if labels == start {
            let isolated = (0..n).filter(|&a| net.neighbors(a).next().is_none()).collect();
            return Ok(Labeling { labels, isolated, sweeps: sweep });
        }
        if before_last.as_ref() == Some(&labels) {
            return Err(Error::NoConvergence { sweeps: sweep, oscillating: changed(&start, &labels) });
        }
        before_last = Some(start);
    }
    let last = before_last.unwrap_or_default();
    Err(Error::NoConvergence { sweeps: options.max_sweeps, oscillating: changed(&last, &labels) })
}

fn changed(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b).enumerate().filter(|(_, (x, y))| x != y).map(|(p, _)| p).collect()
}

fn choose_label(net: &WeightedNetwork, labels: &[usize], a: usize, weighted: bool) -> usize {
    let mut freq: BTreeMap<usize, f64> = BTreeMap::new();
    for (b, w) in net.neighbors(a) {
        *freq.entry(labels[b]).or_insert(0.0) += if weighted { w } else { 1.0 };
    }
    let Some(best) = freq.values().copied().reduce(f64::max) else {
        return labels[a];
    };
    let tol = if weighted { FREQUENCY_TOLERANCE } else { 0.0 };
    let current = labels[a];
    if freq.get(&current).is_some_and(|&f| f >= best - tol) {
        return current;
    }
    // BTreeMap iterates in ascending label order
    freq.iter().rev().find(|(_, &f)| f >= best - tol).map(|(&l, _)| l).unwrap()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityCensus {
    pub n_c: usize,
    /// Community sizes ordered by label.
    pub sizes: Vec<usize>,
    pub mean_size: f64,
    /// size -> number of communities of that size
    pub histogram: BTreeMap<usize, usize>,
    pub isolated: usize,
}

impl CommunityCensus {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }
}

/// Counts communities. Isolated nodes keep singleton labels; they enter the
/// counts only when `include_isolated` is set.
pub fn community_census(lab: &Labeling, include_isolated: bool) -> CommunityCensus {
    let mut members: BTreeMap<usize, usize> = BTreeMap::new();
    let mut skip = vec![false; lab.len()];
    if !include_isolated {
        for &a in &lab.isolated {
            skip[a] = true;
        }
    }
    for (a, &l) in lab.labels.iter().enumerate() {
        if !skip[a] {
            *members.entry(l).or_insert(0) += 1;
        }
    }
    let sizes: Vec<usize> = members.into_values().collect();
    let mut histogram = BTreeMap::new();
    for &s in &sizes {
        *histogram.entry(s).or_insert(0) += 1;
    }
    let total: usize = sizes.iter().sum();
    CommunityCensus {
        n_c: sizes.len(),
        mean_size: if sizes.is_empty() { 0.0 } else { total as f64 / sizes.len() as f64 },
        sizes,
        histogram,
        isolated: lab.isolated.len(),
    }
}
