//! Local network measures and the distributional quantities built on them.
//!
//! | measure             | definition                                               |
//! |---------------------|----------------------------------------------------------|
//! | degree              | `d_i = Σ_j a_ij`                                         |
//! | strength            | `s_i = Σ_j ω_ij`                                         |
//! | clustering          | `c_i = Σ_jk a_ij a_ik a_jk / d_i(d_i - 1)`               |
//! | weighted clustering | `Σ_jk (ω_ij ω_ik ω_jk)^(1/3) / (d_i(d_i - 1) max ω)`     |
//! | disparity           | `Y_i = Σ_j ω_ij² / s_i²`                                 |
//!
//! Clustering is 0 for `d_i < 2`; disparity is undefined (`None`) for
//! isolated nodes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::WeightedNetwork;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetrics {
    pub degree: Vec<usize>,
    pub strength: Vec<f64>,
    pub disparity: Vec<Option<f64>>,
    pub clustering: Vec<f64>,
    pub weighted_clustering: Vec<f64>,
}

impl NodeMetrics {
    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }

    pub fn mean_strength(&self) -> f64 {
        mean(&self.strength)
    }

    /// Mean over nodes with defined disparity; `None` if there are none.
    pub fn mean_disparity(&self) -> Option<f64> {
        let defined: Vec<f64> = self.disparity.iter().flatten().copied().collect();
        (!defined.is_empty()).then(|| mean(&defined))
    }

    /// `node,d,s,Y,c,cw` with 1-based nodes and `NA` for undefined disparity.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,d,s,Y,c,cw\n");
        for a in 0..self.len() {
            let y = self.disparity[a].map_or_else(|| "NA".to_string(), |y| format!("{y:.16e}"));
            writeln!(
                out,
                "{},{},{:.16e},{},{:.16e},{:.16e}",
                a + 1,
                self.degree[a],
                self.strength[a],
                y,
                self.clustering[a],
                self.weighted_clustering[a]
            )
            .unwrap();
        }
        out
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn node_metrics(net: &WeightedNetwork) -> NodeMetrics {
    let max_w = net.max_weight();
    let per_node: Vec<(usize, f64, Option<f64>, f64, f64)> = (0..net.len())
        .into_par_iter()
        .map(|a| {
            let nb: Vec<(usize, f64)> = net.neighbors(a).collect();
            let d = nb.len();
            let s: f64 = nb.iter().map(|&(_, w)| w).sum();
            let disparity = (s > 0.0).then(|| nb.iter().map(|&(_, w)| w * w).sum::<f64>() / (s * s));
            let (c, cw) = if d < 2 {
                (0.0, 0.0)
            } else {
                let mut closed = 0usize;
                let mut geo = 0.0;
                for (p, &(j, wj)) in nb.iter().enumerate() {
                    let row = net.row(j);
                    for &(l, wl) in &nb[p + 1..] {
                        let wjl = row[l];
                        if wjl > 0.0 {
                            closed += 1;
                            geo += (wj * wl * wjl).cbrt();
                        }
                    }
                }
                // unordered pairs counted once, so the ordered sum is twice this
                let pairs = (d * (d - 1)) as f64;
                (2.0 * closed as f64 / pairs, 2.0 * geo / (pairs * max_w))
            };
            (d, s, disparity, c, cw)
        })
        .collect();
    NodeMetrics {
        degree: per_node.iter().map(|t| t.0).collect(),
        strength: per_node.iter().map(|t| t.1).collect(),
        disparity: per_node.iter().map(|t| t.2).collect(),
        clustering: per_node.iter().map(|t| t.3).collect(),
        weighted_clustering: per_node.iter().map(|t| t.4).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub mean: f64,
    /// `sqrt(<d²> - <d>²)`
    pub std_dev: f64,
}

pub fn degree_stats(net: &WeightedNetwork) -> DegreeStats {
    let degrees: Vec<f64> = (0..net.len()).map(|a| net.neighbors(a).count() as f64).collect();
    degree_stats_of(&degrees)
}

pub fn degree_stats_of(degrees: &[f64]) -> DegreeStats {
    let m = mean(degrees);
    let var = degrees.iter().map(|d| (d - m) * (d - m)).sum::<f64>() / degrees.len().max(1) as f64;
    DegreeStats { mean: m, std_dev: var.sqrt() }
}

/// Link weights of one node divided by their mean `s_i/d_i`, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledWeights {
    pub node: usize,
    pub values: Vec<f64>,
}

pub fn rescaled_weight_distribution(net: &WeightedNetwork, node: usize) -> Result<RescaledWeights> {
    let weights: Vec<f64> = net.neighbors(node).map(|(_, w)| w).collect();
    if weights.is_empty() {
        return Err(Error::IsolatedNode(node));
    }
    let scale = weights.iter().sum::<f64>() / weights.len() as f64;
    let mut values: Vec<f64> = weights.iter().map(|w| w / scale).collect();
    values.sort_by(f64::total_cmp);
    Ok(RescaledWeights { node, values })
}

/// First Wasserstein distance between two empirical distributions given as
/// sorted samples, via the quantile coupling.
///
/// The unit interval is cut on the common grid `1/(|a| |b|)`, so samples of
/// different sizes are handled exactly.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    debug_assert!(a.windows(2).all(|w| w[0] <= w[1]) && b.windows(2).all(|w| w[0] <= w[1]));
    let (na, nb) = (a.len() as u64, b.len() as u64);
    if na == nb {
        return Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / na as f64);
    }
    let (mut p, mut q, mut cur) = (0usize, 0usize, 0u64);
    let mut acc = 0.0;
    while p < a.len() && q < b.len() {
        let next_a = (p as u64 + 1) * nb;
        let next_b = (q as u64 + 1) * na;
        let next = next_a.min(next_b);
        acc += (a[p] - b[q]).abs() * (next - cur) as f64;
        cur = next;
        if next_a == next {
            p += 1;
        }
        if next_b == next {
            q += 1;
        }
    }
    Ok(acc / (na * nb) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseWasserstein {
    pub mean: f64,
    pub pairs: usize,
    /// Isolated nodes left out of the average.
    pub excluded: usize,
}

/// Mean Wasserstein distance between the rescaled weight distributions of
/// all pairs of non-isolated nodes.
pub fn mean_pairwise_wasserstein(net: &WeightedNetwork) -> Result<PairwiseWasserstein> {
    let dists: Vec<RescaledWeights> = (0..net.len())
        .filter_map(|a| rescaled_weight_distribution(net, a).ok())
        .collect();
    let excluded = net.len() - dists.len();
    if dists.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} non-isolated nodes, need 2",
            dists.len()
        )));
    }
    // per-row partial sums reduced in row order
    let rows: Vec<f64> = (0..dists.len())
        .into_par_iter()
        .map(|p| {
            dists[p + 1..]
                .iter()
                .map(|other| wasserstein_1d(&dists[p].values, &other.values).unwrap())
                .sum()
        })
        .collect();
    let pairs = dists.len() * (dists.len() - 1) / 2;
    Ok(PairwiseWasserstein {
        mean: rows.iter().sum::<f64>() / pairs as f64,
        pairs,
        excluded,
    })
}

/// Mean weight `<C>_l` of the links of each length `l = |i - j|`.
pub fn concurrence_by_length(net: &WeightedNetwork) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for a in 0..net.len() {
        for (b, w) in net.neighbors(a).filter(|&(b, _)| b > a) {
            let e = acc.entry(b - a).or_insert((0.0, 0));
            e.0 += w;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(l, (s, c))| (l, s / c as f64)).collect()
}

/// Interior local extrema of a profile; positions are 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extrema {
    pub maxima: Vec<usize>,
    pub minima: Vec<usize>,
}

pub fn profile_extrema(series: &[f64]) -> Result<Extrema> {
    let scale = series.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    profile_extrema_with_tolerance(series, 1e-12 * scale)
}

/// Runs of values within `tol` of the run's first value form plateaus. A
/// plateau flanked on both sides by strictly smaller (larger) values is one
/// maximum (minimum), located at its midpoint. Runs touching either end are
/// never extrema.
pub fn profile_extrema_with_tolerance(series: &[f64], tol: f64) -> Result<Extrema> {
    if series.len() < 3 {
        return Err(Error::TooShort { len: series.len(), min: 3 });
    }
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    for (p, &x) in series.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if (x - run.2).abs() <= tol => run.1 = p,
            _ => runs.push((p, p, x)),
        }
    }
    let mut out = Extrema { maxima: Vec::new(), minima: Vec::new() };
    for w in runs.windows(3) {
        let (left, mid, right) = (w[0].2, w[1].2, w[2].2);
        let at = (w[1].0 + w[1].1) / 2;
        if mid > left && mid > right {
            out.maxima.push(at);
        } else if mid < left && mid < right {
            out.minima.push(at);
        }
    }
    Ok(out)
}

/// Topographic prominence of the interior maximum at `p`: its height above
/// the higher of the two lowest points reached on either side before the
/// profile climbs above it again (or ends).
pub fn prominence(series: &[f64], p: usize) -> f64 {
    let v = series[p];
    let scale = series.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let base = |it: &mut dyn Iterator<Item = &f64>| {
        let mut low = v;
        for &x in it {
            if x > v + 1e-12 * scale {
                break;
            }
            low = low.min(x);
        }
        low
    };
    let left = base(&mut series[..p].iter().rev());
    let right = base(&mut series[p + 1..].iter());
    v - left.max(right)
}

/// Minimum prominence of a bulk peak relative to its own height.
pub const PEAK_RELATIVE_PROMINENCE: f64 = 0.02;

/// Maxima with a valley (interior minimum) on both sides and a prominence
/// of at least `min_relative` times their height.
///
/// Near the chain ends a profile can rise a little before falling into the
/// first valley; such shoulders have no valley on their outer side and are
/// not counted. Ripples on flat stretches fail the prominence floor.
pub fn bulk_peaks(series: &[f64], min_relative: f64) -> Result<Vec<usize>> {
    let extrema = profile_extrema(series)?;
    let (Some(&first), Some(&last)) = (extrema.minima.first(), extrema.minima.last()) else {
        return Ok(Vec::new());
    };
    Ok(extrema
        .maxima
        .into_iter()
        .filter(|&p| first < p && p < last && prominence(series, p) >= min_relative * series[p].abs())
        .collect())
}
