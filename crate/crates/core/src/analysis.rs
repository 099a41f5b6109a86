//! Scans over sectors and sizes: degree transitions, finite-size scaling
//! and the size periodicity of the central clustering.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::community::{community_census, lpa_detect};
use crate::error::{Error, Result};
use crate::metrics::{degree_stats, node_metrics, profile_extrema_with_tolerance};
use crate::network::{build_network_with, NetworkOptions, Reach, DEFAULT_TAU};
use crate::xx_solver::{floor_rule_sector, sector_midpoint_field};

/// Run length used by the scans; see [`Reach::QuietRun`].
pub const SCAN_QUIET_RUN: usize = 16;
/// Minimum distance in `k` between two selected transition peaks.
pub const PEAK_SEPARATION: usize = 2;
/// A full step of `<d>` by 2 gives `|Δ<d>|` peaks near 0.5 at every size
/// checked (N = 120 to 960); noise between plateaus stays near 0.1.
pub const MIN_PEAK_HEIGHT: f64 = 0.25;
pub const PERIOD_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub network: NetworkOptions,
    pub weighted_communities: bool,
    pub unweighted_communities: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            network: NetworkOptions { tau: DEFAULT_TAU, reach: Reach::QuietRun(SCAN_QUIET_RUN) },
            weighted_communities: false,
            unweighted_communities: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub k: usize,
    pub b_mid: f64,
    pub mean_degree: f64,
    pub std_degree: f64,
    pub mean_strength: f64,
    pub mean_disparity: Option<f64>,
    pub n_c_weighted: Option<usize>,
    pub n_c_unweighted: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSeries {
    pub n: usize,
    pub tau: f64,
    pub records: Vec<ScanRecord>,
}

impl ScanSeries {
    pub fn column(&self, f: impl Fn(&ScanRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,k,B_mid,mean_d,std_d,mean_s,mean_Y,n_c_weighted,n_c_unweighted\n");
        let opt = |x: Option<String>| x.unwrap_or_else(|| "NA".into());
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
                self.n,
                r.k,
                r.b_mid,
                r.mean_degree,
                r.std_degree,
                r.mean_strength,
                opt(r.mean_disparity.map(|y| format!("{y:.16e}"))),
                opt(r.n_c_weighted.map(|c| c.to_string())),
                opt(r.n_c_unweighted.map(|c| c.to_string())),
            )
            .unwrap();
        }
        out
    }

    /// Reproducibility record written next to the CSV.
    pub fn sidecar(&self, options: &ScanOptions) -> serde_json::Value {
        let ks = self.records.first().map(|r| r.k).zip(self.records.last().map(|r| r.k));
        serde_json::json!({
            "N": self.n,
            "k_range": ks.map(|(a, b)| [a, b]),
            "tau": self.tau,
            "reach": reach_label(options.network.reach),
            "b_convention": "sector midpoint",
            "isolated_nodes_in_n_c": false,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

pub fn reach_label(reach: Reach) -> String {
    match reach {
        Reach::Full => "full".into(),
        Reach::QuietRun(q) => format!("quiet-run-{q}"),
    }
}

pub fn scan_record(n: usize, k: usize, options: &ScanOptions) -> Result<ScanRecord> {
    let net = build_network_with(n, k, &options.network)?;
    let metrics = node_metrics(&net);
    let degrees: Vec<f64> = metrics.degree.iter().map(|&d| d as f64).collect();
    let stats = crate::metrics::degree_stats_of(&degrees);
    let n_c = |weighted: bool| -> Result<usize> { Ok(community_census(&lpa_detect(&net, weighted)?, false).n_c) };
    Ok(ScanRecord {
        k,
        b_mid: sector_midpoint_field(n, k),
        mean_degree: stats.mean,
        std_degree: stats.std_dev,
        mean_strength: metrics.mean_strength(),
        mean_disparity: metrics.mean_disparity(),
        n_c_weighted: options.weighted_communities.then(|| n_c(true)).transpose()?,
        n_c_unweighted: options.unweighted_communities.then(|| n_c(false)).transpose()?,
    })
}

pub fn scan_over_k(n: usize, ks: RangeInclusive<usize>, options: &ScanOptions) -> Result<ScanSeries> {
    if n < 2 {
        return Err(Error::InvalidChainLength(n));
    }
    if *ks.end() > n || ks.is_empty() {
        return Err(Error::InvalidArgument(format!("k range {ks:?} outside 0..={n}")));
    }
    let records = ks
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| scan_record(n, k, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanSeries { n, tau: options.network.tau, records })
}

/// Second-order central differences, one-sided at the ends.
pub fn central_diff(values: &[f64]) -> Result<Vec<f64>> {
    let len = values.len();
    if len < 3 {
        return Err(Error::TooShort { len, min: 3 });
    }
    let mut out = Vec::with_capacity(len);
    out.push(values[1] - values[0]);
    for p in 1..len - 1 {
        out.push((values[p + 1] - values[p - 1]) / 2.0);
    }
    out.push(values[len - 1] - values[len - 2]);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionPeak {
    pub m: usize,
    pub k: usize,
    pub b_mid: f64,
    pub height: f64,
}

/// Peaks ordered by `m`, i.e. by increasing field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionSet {
    pub n: usize,
    pub peaks: Vec<TransitionPeak>,
}

impl TransitionSet {
    pub fn fields(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.b_mid).collect()
    }
}

/// The `n_peaks` right-most transitions of `<d>` against `k`, numbered
/// from the largest `k` (lowest field) as `m = 1`.
///
/// `<d>` falls as `k` grows, so the transitions are local maxima of
/// `|Δ<d>|`. Only maxima at least [`MIN_PEAK_HEIGHT`] high and at positive
/// field count; sectors beyond `N/2` mirror those below it. Near `k = 1`
/// the degree falls off like `N/k`, so every point there clears the floor,
/// but those come last in the right-to-left order.
pub fn find_transitions(scan: &ScanSeries, n_peaks: usize) -> Result<TransitionSet> {
    let degree = scan.column(|r| r.mean_degree);
    let delta: Vec<f64> = central_diff(&degree)?.into_iter().map(f64::abs).collect();
    let mut candidates: Vec<usize> = profile_extrema_with_tolerance(&delta, 0.0)?
        .maxima
        .into_iter()
        .filter(|&p| delta[p] >= MIN_PEAK_HEIGHT && scan.records[p].b_mid > 0.0)
        .collect();
    candidates.sort_by_key(|&p| std::cmp::Reverse(scan.records[p].k));
    let mut chosen: Vec<usize> = Vec::new();
    for p in candidates {
        let k = scan.records[p].k;
        if chosen.iter().all(|&c| scan.records[c].k.abs_diff(k) >= PEAK_SEPARATION) {
            chosen.push(p);
            if chosen.len() == n_peaks {
                break;
            }
        }
    }
    if chosen.len() < n_peaks {
        return Err(Error::TooFewPeaks { found: chosen.len(), requested: n_peaks });
    }
    let peaks = chosen
        .into_iter()
        .enumerate()
        .map(|(idx, p)| TransitionPeak {
            m: idx + 1,
            k: scan.records[p].k,
            b_mid: scan.records[p].b_mid,
            height: delta[p],
        })
        .collect();
    Ok(TransitionSet { n: scan.n, peaks })
}

/// Least-squares slope of `log y` against `log x`.
pub fn scaling_exponent(sizes: &[f64], values: &[f64]) -> Result<f64> {
    if sizes.len() != values.len() {
        return Err(Error::InvalidArgument("sizes and values differ in length".into()));
    }
    if sizes.len() < 4 {
        return Err(Error::InsufficientData(format!("{} sizes, need 4", sizes.len())));
    }
    if let Some(&bad) = sizes.iter().chain(values).find(|&&v| !(v > 0.0)) {
        return Err(Error::NonPositive(bad));
    }
    let xs: Vec<f64> = sizes.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Degree spread of the ground state at `field` for each chain length,
/// with the sector chosen by the floor rule.
pub fn degree_spread_at_field(sizes: &[usize], field: f64, options: &NetworkOptions) -> Result<Vec<f64>> {
    sizes
        .par_iter()
        .map(|&n| {
            let k = floor_rule_sector(n, field)?;
            Ok(degree_stats(&build_network_with(n, k, options)?).std_dev)
        })
        .collect()
}

/// Weighted clustering of the central spins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringProfile {
    pub n: usize,
    pub k: usize,
    /// Offset of each spin from the chain centre, `i - (N+1)/2`.
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
}

impl ClusteringProfile {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,k,offset,cw\n");
        for (x, c) in self.positions.iter().zip(&self.values) {
            writeln!(out, "{},{},{},{:.16e}", self.n, self.k, x, c).unwrap();
        }
        out
    }
}

/// Window of `n_center` spins (one more when the parities of `N` and
/// `n_center` differ) placed symmetrically about the chain centre.
pub fn central_window(n: usize, n_center: usize) -> Result<RangeInclusive<usize>> {
    let width = if (n - n_center.min(n)) % 2 == 1 { n_center + 1 } else { n_center };
    if n_center == 0 || width > n {
        return Err(Error::InvalidArgument(format!("{n_center} central spins in a chain of {n}")));
    }
    let start = (n - width) / 2 + 1;
    Ok(start..=start + width - 1)
}

pub fn clustering_profile(n: usize, field: f64, n_center: usize, options: &NetworkOptions) -> Result<ClusteringProfile> {
    if !(field > 0.0 && field < 1.0) {
        return Err(Error::InvalidArgument(format!("field {field} outside (0, 1)")));
    }
    let k = floor_rule_sector(n, field)?;
    let window = central_window(n, n_center)?;
    let net = build_network_with(n, k, options)?;
    let cw = node_metrics(&net).weighted_clustering;
    let centre = (n as f64 + 1.0) / 2.0;
    Ok(ClusteringProfile {
        n,
        k,
        positions: window.clone().map(|i| i as f64 - centre).collect(),
        values: window.map(|i| cw[i - 1]).collect(),
    })
}

/// Largest entrywise deviation between two central profiles, minimised
/// over relative shifts of up to `max_shift` spins.
///
/// Profiles of chains with different parity are centred half a spin apart,
/// so no single offset convention lines them up; the shift absorbs that.
/// At least `len - max_shift` entries must overlap.
pub fn aligned_deviation(a: &ClusteringProfile, b: &ClusteringProfile, max_shift: usize) -> f64 {
    let (la, lb) = (a.values.len() as isize, b.values.len() as isize);
    let need = la.min(lb) - max_shift as isize;
    let mut best = f64::INFINITY;
    for t in -(max_shift as isize)..=max_shift as isize {
        let pairs: Vec<(f64, f64)> = (0..la)
            .filter(|&p| (0..lb).contains(&(p + t)))
            .map(|p| (a.values[p as usize], b.values[(p + t) as usize]))
            .collect();
        if pairs.len() as isize >= need.max(1) {
            best = best.min(pairs.iter().fold(0.0, |m, (x, y)| m.max((x - y).abs())));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodPrediction {
    pub p: i64,
    pub q: i64,
    /// Fraction of communities of size `floor(s) + 1`.
    pub f: f64,
    /// Smallest spin group with the average community structure.
    pub group_size: i64,
}

pub fn period_prediction(mean_size: Ratio<i64>) -> Result<PeriodPrediction> {
    if mean_size <= Ratio::from_integer(1) {
        return Err(Error::InvalidRational(format!("{mean_size} is not above 1")));
    }
    let (p, q) = (*mean_size.numer(), *mean_size.denom());
    Ok(PeriodPrediction { p, q, f: (p % q) as f64 / q as f64, group_size: p })
}

/// Parses `7/2`, `3.5` or `3` as an exact rational.
pub fn parse_rational(text: &str) -> Result<Ratio<i64>> {
    let bad = || Error::InvalidRational(text.to_string());
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.is_empty() && frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return Err(bad());
    }
    let scale = 10i64.pow(frac.len() as u32);
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let sign = if int.starts_with('-') { -1 } else { 1 };
    let num = whole.checked_mul(scale).and_then(|w| w.checked_add(sign * part)).ok_or_else(bad)?;
    Ok(Ratio::new(num, scale))
}

/// Field whose sector has mean community size close to `s`.
pub fn field_for_mean_size(s: f64) -> f64 {
    (std::f64::consts::PI / s).cos()
}

/// Smallest shift `p` under which the series matches itself within the
/// relative tolerance, testing shifts up to a third of the length.
pub fn detect_period(values: &[f64]) -> Result<Option<usize>> {
    detect_period_with(values, values.len() / 3, PERIOD_TOLERANCE)
}

pub fn detect_period_with(values: &[f64], max_period: usize, tol: f64) -> Result<Option<usize>> {
    if values.len() < 3 || max_period == 0 || 3 * max_period > values.len() {
        return Err(Error::InsufficientData(format!(
            "{} values cannot test periods up to {max_period}",
            values.len()
        )));
    }
    Ok((1..=max_period).find(|&p| {
        values
            .iter()
            .zip(&values[p..])
            .all(|(a, b)| (a - b).abs() <= tol * a.abs().max(b.abs()))
    }))
}
