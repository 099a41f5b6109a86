//! Command-line front end. Every subcommand produces one data file (CSV,
//! edge list or JSON) and, for the scans and profiles, a JSON sidecar
//! recording the parameters and conventions used.
//!
//! With `--out PATH` the data goes to `PATH` and the sidecar to `PATH`
//! with its extension replaced by `json`; otherwise the data is printed.
//! Failures print `{"error": {"kind": ..., "message": ...}}` to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::{
    clustering_profile, detect_period, field_for_mean_size, find_transitions, parse_rational, period_prediction,
    reach_label, scan_over_k, ScanOptions, ScanSeries, PERIOD_TOLERANCE, SCAN_QUIET_RUN,
};
use crate::community::{community_census, lpa_detect};
use crate::error::{Error, Result};
use crate::metrics::{mean_pairwise_wasserstein, node_metrics};
use crate::network::{build_network_with, to_edge_list, NetworkOptions, Reach, DEFAULT_TAU};
use crate::oracle::{certify, CERTIFY_TOLERANCE};
use crate::xx_solver::{crossing_field, sector_for_field, sector_midpoint_field};

/// Environment variable holding the worker thread count.
pub const THREADS_VAR: &str = "XXNET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "xxnet", version, about = "Concurrence networks of the open XX chain ground state")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the data here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Level-crossing fields B_k = cos(k pi / (N+1)).
    Crossings {
        #[arg(long)]
        n: usize,
    },
    /// Edge list of one concurrence network.
    Network(StateArgs),
    /// Per-node degree, strength, disparity and clustering.
    Metrics(StateArgs),
    /// Label-propagation communities of one network.
    Communities {
        #[command(flatten)]
        state: StateArgs,
        /// Ignore the weights when counting neighbour labels.
        #[arg(long)]
        unweighted: bool,
        /// Count isolated nodes as singleton communities.
        #[arg(long)]
        include_isolated: bool,
    },
    /// Mean and spread of the degree over a range of sectors.
    ScanDegree {
        #[command(flatten)]
        range: ScanArgs,
        /// Number of right-most transitions to report in the sidecar.
        #[arg(long, default_value_t = 4)]
        transitions: usize,
    },
    /// Community counts over a range of sectors.
    ScanCommunities {
        #[command(flatten)]
        range: ScanArgs,
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        unweighted: bool,
    },
    /// Mean pairwise Wasserstein distance of rescaled weight distributions.
    Wasserstein {
        #[command(flatten)]
        range: ScanArgs,
    },
    /// Weighted clustering of the central spins for a range of N.
    Profile {
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long, allow_hyphen_values = true)]
        field: f64,
        #[arg(long, default_value_t = 16)]
        center: usize,
    },
    /// Mean central clustering against N, its period and the predicted one.
    Period {
        #[command(flatten)]
        sizes: SizeArgs,
        /// Target mean community size, e.g. `3.5` or `7/2`; sets B = cos(pi/s).
        #[arg(long, conflicts_with = "field", required_unless_present = "field")]
        s: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        field: Option<f64>,
        #[arg(long, default_value_t = 100)]
        center: usize,
    },
    /// Compare the fast solver against brute force for all N <= max-n.
    OracleCheck {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub k: Option<usize>,
    /// Transverse field; must not sit on a level crossing.
    #[arg(long, allow_hyphen_values = true)]
    pub field: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// End each row after this many consecutive separable pairs (0: never).
    #[arg(long, default_value_t = 0)]
    pub quiet_run: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: usize,
    /// Defaults to 1.
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Defaults to N/2; sectors above it mirror those below.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, default_value_t = SCAN_QUIET_RUN)]
    pub quiet_run: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SizeArgs {
    #[arg(long)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, default_value_t = SCAN_QUIET_RUN)]
    pub quiet_run: usize,
}

fn reach(quiet_run: usize) -> Reach {
    if quiet_run == 0 {
        Reach::Full
    } else {
        Reach::QuietRun(quiet_run)
    }
}

impl StateArgs {
    /// Resolves `--field` to its sector; this is the only place a field is
    /// turned into `k`.
    pub fn sector(&self) -> Result<usize> {
        match (self.k, self.field) {
            (Some(k), _) => Ok(k),
            (None, Some(b)) => sector_for_field(self.n, b),
            (None, None) => Err(Error::InvalidArgument("one of --k or --field is required".into())),
        }
    }

    fn options(&self) -> NetworkOptions {
        NetworkOptions { tau: self.tau, reach: reach(self.quiet_run) }
    }
}

impl ScanArgs {
    fn bounds(&self) -> Result<(usize, usize)> {
        let lo = self.k_min.unwrap_or(1);
        let hi = self.k_max.unwrap_or(self.n / 2);
        if lo > hi || hi > self.n {
            return Err(Error::InvalidArgument(format!("k range {lo}..={hi} for N = {}", self.n)));
        }
        Ok((lo, hi))
    }

    fn options(&self) -> ScanOptions {
        ScanOptions {
            network: NetworkOptions { tau: self.tau, reach: reach(self.quiet_run) },
            ..ScanOptions::default()
        }
    }
}

impl SizeArgs {
    fn sizes(&self) -> Result<Vec<usize>> {
        if self.n_min < 2 || self.n_min > self.n_max {
            return Err(Error::InvalidArgument(format!("N range {}..={}", self.n_min, self.n_max)));
        }
        Ok((self.n_min..=self.n_max).collect())
    }

    fn options(&self) -> NetworkOptions {
        NetworkOptions { tau: self.tau, reach: reach(self.quiet_run) }
    }
}

/// Data produced by one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub data: String,
    pub sidecar: Option<Value>,
}

fn sidecar(command: &str, tau: f64, reach: Reach, extra: Value) -> Value {
    let mut v = json!({
        "command": command,
        "tau": tau,
        "reach": reach_label(reach),
        "version": env!("CARGO_PKG_VERSION"),
    });
    if let (Some(map), Value::Object(more)) = (v.as_object_mut(), extra) {
        map.extend(more);
    }
    v
}

pub fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::Crossings { n } => {
            if *n < 1 {
                return Err(Error::InvalidChainLength(*n));
            }
            let mut data = String::from("k,B_k,B_mid\n");
            for k in 1..=*n {
                writeln!(data, "{k},{:.16e},{:.16e}", crossing_field(*n, k), sector_midpoint_field(*n, k)).unwrap();
            }
            Ok(Output { data, sidecar: None })
        }
        Command::Network(state) => {
            let net = build_network_with(state.n, state.sector()?, &state.options())?;
            Ok(Output { data: to_edge_list(&net).to_text(), sidecar: None })
        }
        Command::Metrics(state) => {
            let k = state.sector()?;
            let net = build_network_with(state.n, k, &state.options())?;
            let extra = json!({"N": state.n, "k": k, "columns": "node,d,s,Y,c,cw", "undefined": "NA"});
            Ok(Output {
                data: node_metrics(&net).to_csv(),
                sidecar: Some(sidecar("metrics", state.tau, state.options().reach, extra)),
            })
        }
        Command::Communities { state, unweighted, include_isolated } => {
            let k = state.sector()?;
            let net = build_network_with(state.n, k, &state.options())?;
            let labels = lpa_detect(&net, !unweighted)?;
            let census = community_census(&labels, *include_isolated);
            let extra = json!({
                "N": state.n,
                "k": k,
                "weighted": !unweighted,
                "isolated_nodes_in_n_c": include_isolated,
                "sweeps": labels.sweeps,
                "census": census,
            });
            Ok(Output {
                data: labels.to_csv(),
                sidecar: Some(sidecar("communities", state.tau, state.options().reach, extra)),
            })
        }
        Command::ScanDegree { range, transitions } => {
            let options = range.options();
            let scan = run_scan(range, &options)?;
            let mut side = scan.sidecar(&options);
            let peaks = match find_transitions(&scan, *transitions) {
                Ok(t) => serde_json::to_value(t.peaks).unwrap(),
                Err(e) => json!({"error": e.to_string()}),
            };
            side["command"] = json!("scan-degree");
            side["transitions"] = peaks;
            Ok(Output { data: scan.to_csv(), sidecar: Some(side) })
        }
        Command::ScanCommunities { range, weighted, unweighted } => {
            let both = !weighted && !unweighted;
            let options = ScanOptions {
                weighted_communities: *weighted || both,
                unweighted_communities: *unweighted || both,
                ..range.options()
            };
            let scan = run_scan(range, &options)?;
            let mut side = scan.sidecar(&options);
            side["command"] = json!("scan-communities");
            Ok(Output { data: scan.to_csv(), sidecar: Some(side) })
        }
        Command::Wasserstein { range } => {
            let (lo, hi) = range.bounds()?;
            let options = range.options().network;
            let mut data = String::from("N,k,B_mid,mean_W,pairs,excluded\n");
            for k in lo..=hi {
                let net = build_network_with(range.n, k, &options)?;
                let b = sector_midpoint_field(range.n, k);
                match mean_pairwise_wasserstein(&net) {
                    Ok(w) => writeln!(data, "{},{k},{b:.16e},{:.16e},{},{}", range.n, w.mean, w.pairs, w.excluded),
                    Err(Error::InsufficientData(_)) => writeln!(data, "{},{k},{b:.16e},NA,0,{}", range.n, range.n),
                    Err(e) => return Err(e),
                }
                .unwrap();
            }
            let extra = json!({"N": range.n, "k_range": [lo, hi], "isolated": "excluded and counted"});
            Ok(Output { data, sidecar: Some(sidecar("wasserstein", range.tau, options.reach, extra)) })
        }
        Command::Profile { sizes, field, center } => {
            let options = sizes.options();
            let mut data = String::from("N,k,offset,cw\n");
            for n in sizes.sizes()? {
                let profile = clustering_profile(n, *field, *center, &options)?;
                data.push_str(profile.to_csv().split_once('\n').unwrap().1);
            }
            let extra = json!({
                "N_range": [sizes.n_min, sizes.n_max],
                "field": field,
                "center": center,
                "sector_rule": "k = floor((N+1) acos(B) / pi)",
                "offset": "i - (N+1)/2",
            });
            Ok(Output { data, sidecar: Some(sidecar("profile", sizes.tau, options.reach, extra)) })
        }
        Command::Period { sizes, s, field, center } => {
            let options = sizes.options();
            let (b, prediction) = match (s, field) {
                (Some(text), _) => {
                    let ratio = parse_rational(text)?;
                    let pred = period_prediction(ratio)?;
                    (field_for_mean_size(*ratio.numer() as f64 / *ratio.denom() as f64), Some(pred))
                }
                (None, Some(b)) => (*b, None),
                (None, None) => return Err(Error::InvalidArgument("one of --s or --field is required".into())),
            };
            let mut data = String::from("N,k,mean_cw\n");
            let mut means = Vec::new();
            for n in sizes.sizes()? {
                let profile = clustering_profile(n, b, *center, &options)?;
                means.push(profile.mean());
                writeln!(data, "{n},{},{:.16e}", profile.k, profile.mean()).unwrap();
            }
            let detected = detect_period(&means).ok().flatten();
            let extra = json!({
                "N_range": [sizes.n_min, sizes.n_max],
                "field": b,
                "center": center,
                "prediction": prediction,
                "detected_period": detected,
                "period_tolerance": PERIOD_TOLERANCE,
            });
            Ok(Output { data, sidecar: Some(sidecar("period", sizes.tau, options.reach, extra)) })
        }
        Command::OracleCheck { max_n } => {
            let report = certify(*max_n)?;
            if !report.passes(CERTIFY_TOLERANCE) {
                let (n, k, i, j) = report.worst_at;
                let worst = report.max_rdm_deviation.max(report.max_concurrence_deviation);
                return Err(Error::OracleMismatch { worst, n, k, i, j });
            }
            let mut v = serde_json::to_value(&report).unwrap();
            v["tolerance"] = json!(CERTIFY_TOLERANCE);
            v["status"] = json!(format!("max RDM deviation < {CERTIFY_TOLERANCE:e}"));
            Ok(Output { data: serde_json::to_string_pretty(&v).unwrap() + "\n", sidecar: None })
        }
    }
}

fn run_scan(range: &ScanArgs, options: &ScanOptions) -> Result<ScanSeries> {
    let (lo, hi) = range.bounds()?;
    scan_over_k(range.n, lo..=hi, options)
}

pub fn error_json(kind: &str, message: &str) -> String {
    json!({"error": {"kind": kind, "message": message}}).to_string()
}

/// Where the sidecar of `path` goes.
pub fn sidecar_path(path: &Path) -> PathBuf {
    if path.extension().is_some_and(|e| e == "json") {
        let mut name = path.as_os_str().to_owned();
        name.push(".meta.json");
        PathBuf::from(name)
    } else {
        path.with_extension("json")
    }
}

fn write_output(out: Option<&Path>, output: &Output) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, &output.data)?;
            if let Some(side) = &output.sidecar {
                std::fs::write(sidecar_path(path), serde_json::to_string_pretty(side).unwrap() + "\n")?;
            }
        }
        None => print!("{}", output.data),
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_VAR}={value} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Parses arguments, runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprintln!("{}", error_json("usage", e.to_string().trim_end()));
            return 2;
        }
    };
    let result = configure_threads()
        .and_then(|()| execute(&cli.command))
        .and_then(|output| write_output(cli.out.as_deref(), &output));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            1
        }
    }
}
