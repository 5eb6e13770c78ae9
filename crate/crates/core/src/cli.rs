//! `coaodv-sim` command line.
//!
//! Exit codes: 0 on success (a missing route is a result, not a failure),
//! 1 on usage or parse errors, 2 when the scenario fails validation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classifier::{classify_network, neighbor_criteria, rank_candidates};
use crate::coopmath::normalize_criteria;
use crate::model::{
    validate_scenario, DistanceMetric, MobilityMetric, NodeId, Protocol, Scenario, WeightProfile,
};
use crate::protocol::{DiscoveryError, Topology};
use crate::scenario_file::{read_config, LoadError};
use crate::sim::{self, Flow, FlowReport, RunReport, SimRun};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_SCENARIO: i32 = 2;

/// Name of the environment variable selecting log verbosity.
pub const LOG_ENV: &str = "COAODV_SIM_LOG";

/// Exact CSV header written by `run` and `compare`.
pub const CSV_HEADER: &str =
    "scenario,protocol,seed,flow_src,flow_dst,hop_count,packets_sent,packets_delivered,pdr,route_discoveries";

#[derive(Debug, Parser)]
#[command(name = "coaodv-sim", version, about = "AODV and CO-AODV route discovery simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file.
    Validate {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Simulate one protocol.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        /// Flows as SRC:DST:COUNT.
        #[arg(long, required = true, num_args = 1..)]
        flows: Vec<FlowSpec>,
        /// Defaults to the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Simulate both protocols over consecutive seeds.
    Compare {
        scenario: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        flows: Vec<FlowSpec>,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// First seed; defaults to the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Map a weight profile to a network type.
    Classify {
        /// W1,W2,W3 for distance, mobility, energy.
        #[arg(long)]
        weights: WeightsArg,
        /// Also rank the neighbors of --node in this scenario.
        #[arg(long, requires = "node")]
        scenario: Option<PathBuf>,
        #[arg(long, requires = "scenario")]
        node: Option<u32>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Aodv,
    Coaodv,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Aodv => Protocol::Aodv,
            ProtocolArg::Coaodv => Protocol::CoAodv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistanceArg {
    Manhattan,
    Euclidean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MobilityArg {
    EuclideanRate,
    ManhattanRate,
}

#[derive(Debug, Default, Args)]
struct Overrides {
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long, value_enum)]
    distance_metric: Option<DistanceArg>,
    #[arg(long, value_enum)]
    mobility_metric: Option<MobilityArg>,
    /// Require energy strictly above the threshold.
    #[arg(long, conflicts_with = "no_strict")]
    strict: bool,
    /// Accept energy equal to the threshold.
    #[arg(long)]
    no_strict: bool,
    #[arg(long)]
    drop_prob: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FlowSpec(Flow);

impl FromStr for FlowSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [src, dst, count] = parts[..] else {
            return Err(format!("expected SRC:DST:COUNT, got {s:?}"));
        };
        let num = |v: &str| v.trim().parse::<u64>().map_err(|e| format!("{v:?} in {s:?}: {e}"));
        let id = |v: &str| {
            num(v).and_then(|n| u32::try_from(n).map_err(|_| format!("node id {n} out of range")))
        };
        let packets = num(count)?;
        if packets == 0 {
            return Err(format!("flow {s:?} must send at least one packet"));
        }
        Ok(FlowSpec(Flow {
            source: NodeId(id(src)?),
            destination: NodeId(id(dst)?),
            packets,
        }))
    }
}

#[derive(Debug, Clone, Copy)]
struct WeightsArg([f64; 3]);

impl FromStr for WeightsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ws = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        match ws[..] {
            [a, b, c] => Ok(WeightsArg([a, b, c])),
            _ => Err(format!("expected three comma-separated weights, got {s:?}")),
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        let code = match e {
            LoadError::Invalid { .. } => EXIT_INVALID_SCENARIO,
            LoadError::Io { .. } | LoadError::Parse { .. } => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<Scenario, Failure> {
    let mut cfg = read_config(path)?;
    if let Some(t) = overrides.threshold {
        cfg.energy_threshold = t;
    }
    if let Some(r) = overrides.range {
        cfg.transmission_range = r;
    }
    if let Some(m) = overrides.distance_metric {
        cfg.distance_metric = match m {
            DistanceArg::Manhattan => DistanceMetric::Manhattan,
            DistanceArg::Euclidean => DistanceMetric::Euclidean,
        };
    }
    if let Some(m) = overrides.mobility_metric {
        cfg.mobility_metric = match m {
            MobilityArg::EuclideanRate => MobilityMetric::EuclideanRate,
            MobilityArg::ManhattanRate => MobilityMetric::ManhattanRate,
        };
    }
    if overrides.strict {
        cfg.threshold_strict = true;
    }
    if overrides.no_strict {
        cfg.threshold_strict = false;
    }
    if let Some(p) = overrides.drop_prob {
        cfg.non_coop_drop_prob = p;
    }
    validate_scenario(cfg).map_err(|source| {
        LoadError::Invalid {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn scenario_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn protocol_tag(p: Protocol) -> &'static str {
    match p {
        Protocol::Aodv => "aodv",
        Protocol::CoAodv => "coaodv",
    }
}

#[derive(Debug, Serialize)]
struct ReportRow<'a> {
    scenario: &'a str,
    protocol: &'static str,
    seed: u64,
    flow_src: u32,
    flow_dst: u32,
    hop_count: Option<u32>,
    packets_sent: u64,
    packets_delivered: u64,
    pdr: Option<String>,
    route_discoveries: u64,
}

fn rows<'a>(scenario: &'a str, run: &'a RunReport) -> impl Iterator<Item = ReportRow<'a>> + 'a {
    run.flows.iter().map(move |f| ReportRow {
        scenario,
        protocol: protocol_tag(run.protocol),
        seed: run.seed,
        flow_src: f.flow.source.0,
        flow_dst: f.flow.destination.0,
        hop_count: f.metrics.hop_count,
        packets_sent: f.metrics.packets_sent,
        packets_delivered: f.metrics.packets_delivered,
        pdr: f.metrics.packet_delivery_ratio().map(|p| format!("{p:.6}")),
        route_discoveries: f.metrics.route_discoveries,
    })
}

/// Render runs as CSV, header first, one row per (protocol, seed, flow).
pub fn render_csv<'a>(scenario: &str, runs: impl IntoIterator<Item = &'a RunReport>) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for run in runs {
        for row in rows(scenario, run) {
            w.serialize(row).expect("in-memory csv write");
        }
    }
    let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv");
    format!("{CSV_HEADER}\n{body}")
}

fn write_csv(path: &Path, csv: &str) -> Result<(), Failure> {
    std::fs::write(path, csv)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn describe_flow(f: &FlowReport) -> String {
    let head = format!("{}->{}", f.flow.source, f.flow.destination);
    match (&f.route, &f.failure) {
        (Some(route), _) => {
            let pdr = f
                .metrics
                .packet_delivery_ratio()
                .map_or_else(|| "-".to_string(), |p| format!("{p:.6}"));
            let mut s = format!(
                "{head}: route {route} ({} hops), PDR {pdr} ({}/{})",
                route.hop_count(),
                f.metrics.packets_delivered,
                f.metrics.packets_sent
            );
            if !f.droppers.is_empty() {
                let ids: Vec<String> = f.droppers.iter().map(NodeId::to_string).collect();
                let _ = write!(s, ", non-cooperative relays {}", ids.join(","));
            }
            s
        }
        (None, Some(DiscoveryError::NoCooperativeRoute { .. })) => format!("{head}: no cooperative route"),
        (None, Some(e)) => format!("{head}: {e}"),
        (None, None) => format!("{head}: no route"),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

fn cmd_run(
    out: &mut dyn Write,
    path: &Path,
    protocol: Protocol,
    flows: Vec<Flow>,
    seed: Option<u64>,
    csv_out: Option<&Path>,
    overrides: &Overrides,
) -> Result<(), Failure> {
    let scenario = load(path, overrides)?;
    let seed = seed.unwrap_or(scenario.config().rng_seed);
    let report = sim::run(&SimRun {
        scenario: &scenario,
        protocol,
        flows,
        seed,
    })
    .map_err(Failure::usage)?;
    if let Some(p) = csv_out {
        write_csv(p, &render_csv(&scenario_name(path), [&report]))?;
    }
    for f in &report.flows {
        let _ = writeln!(out, "{protocol} seed {seed} {}", describe_flow(f));
    }
    Ok(())
}

fn cmd_compare(
    out: &mut dyn Write,
    path: &Path,
    flows: Vec<Flow>,
    seeds: u64,
    first_seed: Option<u64>,
    csv_out: Option<&Path>,
    overrides: &Overrides,
) -> Result<(), Failure> {
    if seeds == 0 {
        return Err(Failure::usage("--seeds must be at least 1"));
    }
    let scenario = load(path, overrides)?;
    let base = first_seed.unwrap_or(scenario.config().rng_seed);
    let seed_list: Vec<u64> = (0..seeds).map(|i| base.wrapping_add(i)).collect();
    let pairs = sim::compare(&scenario, &flows, &seed_list).map_err(Failure::usage)?;
    if let Some(p) = csv_out {
        let runs = pairs.iter().flat_map(|(a, c)| [a, c]);
        write_csv(p, &render_csv(&scenario_name(path), runs))?;
    }
    let aodv = sim::summarize(pairs.iter().map(|(a, _)| a));
    let co = sim::summarize(pairs.iter().map(|(_, c)| c));
    let _ = writeln!(out, "{} seed(s) starting at {base}", seed_list.len());
    let _ = writeln!(out, "{:<8} {:>14} {:>12} {:>8} {:>9}", "protocol", "mean_hop_count", "mean_pdr", "routed", "unrouted");
    for (name, s) in [("AODV", aodv), ("CO-AODV", co)] {
        let _ = writeln!(
            out,
            "{:<8} {:>14} {:>12} {:>8} {:>9}",
            name,
            fmt_opt(s.mean_hop_count),
            fmt_opt(s.mean_pdr),
            s.routed_flows,
            s.unrouted_flows
        );
    }
    if let Some((first_aodv, first_co)) = pairs.first() {
        for f in first_aodv.flows.iter().chain(&first_co.flows) {
            let _ = writeln!(out, "{} {}", f.metrics.protocol, describe_flow(f));
        }
    }
    Ok(())
}

fn cmd_classify(
    out: &mut dyn Write,
    weights: [f64; 3],
    scenario: Option<&Path>,
    node: Option<u32>,
) -> Result<(), Failure> {
    let w = WeightProfile {
        w_distance: weights[0],
        w_mobility: weights[1],
        w_energy: weights[2],
    };
    let result = classify_network(&w).map_err(Failure::usage)?;
    let _ = writeln!(out, "{}", result.network_type);
    let _ = writeln!(out, "dominant criterion: {}", result.dominant_weight);

    if let (Some(path), Some(node)) = (scenario, node) {
        let scenario = load(path, &Overrides::default())?;
        let topology = Topology::new(&scenario);
        let raw = neighbor_criteria(&topology, NodeId(node))
            .ok_or_else(|| Failure::usage(format!("unknown node {}", NodeId(node))))?;
        let ranked = rank_candidates(&normalize_criteria(&raw), &w).map_err(Failure::usage)?;
        let _ = writeln!(out, "neighbors of {} by composite score:", NodeId(node));
        for (id, score) in ranked {
            let _ = writeln!(out, "  {id} {score:.6}");
        }
    }
    Ok(())
}

fn init_logging() {
    let level = match std::env::var(LOG_ENV).as_deref() {
        Ok("info") => log::LevelFilter::Info,
        Ok("trace") => log::LevelFilter::Trace,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parse `args` (program name first) and execute. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { scenario, overrides } => load(&scenario, &overrides).map(|s| {
            let _ = writeln!(out, "{}: valid ({} nodes)", scenario.display(), s.len());
        }),
        Command::Run {
            scenario,
            protocol,
            flows,
            seed,
            out: csv_out,
            overrides,
        } => cmd_run(
            out,
            &scenario,
            protocol.into(),
            flows.into_iter().map(|f| f.0).collect(),
            seed,
            csv_out.as_deref(),
            &overrides,
        ),
        Command::Compare {
            scenario,
            flows,
            seeds,
            seed,
            out: csv_out,
            overrides,
        } => cmd_compare(
            out,
            &scenario,
            flows.into_iter().map(|f| f.0).collect(),
            seeds,
            seed,
            csv_out.as_deref(),
            &overrides,
        ),
        Command::Classify {
            weights,
            scenario,
            node,
        } => cmd_classify(out, weights.0, scenario.as_deref(), node),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
