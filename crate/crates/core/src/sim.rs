//! Round-based simulation: one route discovery per flow, then data packets
//! along the discovered route.
//!
//! Non-cooperative intermediates drop each packet with the scenario's
//! `non_coop_drop_prob`. Randomness comes from ChaCha8 seeded with
//! `seed_from_u64(seed)`; a drop decision takes one `next_u64`, maps its top
//! 53 bits to `u` in `[0, 1)` and drops when `u < p`. Draws happen only at
//! non-cooperative relays, in flow, packet and path order, and stop at the
//! first relay that drops the packet.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{NodeId, Protocol, Route, Scenario, SimMetrics};
use crate::protocol::{aodv_discover, coaodv_discover, DiscoveryError, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flow {
    pub source: NodeId,
    pub destination: NodeId,
    pub packets: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("flow {0}->{1} references unknown node {2}")]
    UnknownNode(NodeId, NodeId, NodeId),
    #[error("flow {0}->{1} must send at least one packet")]
    EmptyFlow(NodeId, NodeId),
    #[error("at least one seed is required")]
    NoSeeds,
}

#[derive(Debug, Clone)]
pub struct SimRun<'a> {
    pub scenario: &'a Scenario,
    pub protocol: Protocol,
    pub flows: Vec<Flow>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub flow: Flow,
    pub metrics: SimMetrics,
    pub route: Option<Route>,
    /// Relays on the route that fail the cooperative predicate.
    pub droppers: Vec<NodeId>,
    pub failure: Option<DiscoveryError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub protocol: Protocol,
    pub seed: u64,
    pub flows: Vec<FlowReport>,
    /// Totals over all flows; `hop_count` is the sum over routed flows.
    pub total: SimMetrics,
}

struct DropSampler {
    rng: ChaCha8Rng,
    prob: f64,
}

impl DropSampler {
    fn new(seed: u64, prob: f64) -> Self {
        DropSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            prob,
        }
    }

    fn drops(&mut self) -> bool {
        let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        u < self.prob
    }
}

fn check_flows(scenario: &Scenario, flows: &[Flow]) -> Result<(), SimError> {
    for f in flows {
        for id in [f.source, f.destination] {
            if !scenario.contains(id) {
                return Err(SimError::UnknownNode(f.source, f.destination, id));
            }
        }
        if f.packets == 0 {
            return Err(SimError::EmptyFlow(f.source, f.destination));
        }
    }
    Ok(())
}

pub fn discover(
    protocol: Protocol,
    source: NodeId,
    dest: NodeId,
    topology: &Topology,
) -> Result<Route, DiscoveryError> {
    let found = match protocol {
        Protocol::Aodv => aodv_discover(source, dest, topology),
        Protocol::CoAodv => coaodv_discover(source, dest, topology),
    };
    found.map(|d| d.route)
}

pub fn run(simrun: &SimRun) -> Result<RunReport, SimError> {
    let scenario = simrun.scenario;
    check_flows(scenario, &simrun.flows)?;
    let topology = Topology::new(scenario);
    let mut sampler = DropSampler::new(simrun.seed, scenario.config().non_coop_drop_prob);
    let mut total = SimMetrics::empty(simrun.protocol);
    let mut reports = Vec::with_capacity(simrun.flows.len());

    for &flow in &simrun.flows {
        let mut metrics = SimMetrics::empty(simrun.protocol);
        metrics.route_discoveries = 1;
        let report = match discover(simrun.protocol, flow.source, flow.destination, &topology) {
            Ok(route) => {
                let droppers: Vec<NodeId> = topology
                    .route_verdicts(&route)
                    .into_iter()
                    .filter(|(_, v)| !v.cooperative)
                    .map(|(id, _)| id)
                    .collect();
                metrics.hop_count = Some(route.hop_count());
                metrics.packets_sent = flow.packets;
                for _ in 0..flow.packets {
                    if !droppers.iter().any(|_| sampler.drops()) {
                        metrics.packets_delivered += 1;
                    }
                }
                log::info!(
                    "{} {}->{}: route {} ({} hops), {}/{} delivered",
                    simrun.protocol,
                    flow.source,
                    flow.destination,
                    route,
                    route.hop_count(),
                    metrics.packets_delivered,
                    metrics.packets_sent
                );
                FlowReport {
                    flow,
                    metrics,
                    route: Some(route),
                    droppers,
                    failure: None,
                }
            }
            Err(e) => {
                log::info!("{} {}->{}: {e}", simrun.protocol, flow.source, flow.destination);
                FlowReport {
                    flow,
                    metrics,
                    route: None,
                    droppers: Vec::new(),
                    failure: Some(e),
                }
            }
        };
        let m = &report.metrics;
        if let Some(h) = m.hop_count {
            total.hop_count = Some(total.hop_count.unwrap_or(0) + h);
        }
        total.packets_sent += m.packets_sent;
        total.packets_delivered += m.packets_delivered;
        total.route_discoveries += m.route_discoveries;
        reports.push(report);
    }

    Ok(RunReport {
        protocol: simrun.protocol,
        seed: simrun.seed,
        flows: reports,
        total,
    })
}

/// Run both protocols for every seed. Seeds run in parallel; the result is
/// in seed order.
pub fn compare(
    scenario: &Scenario,
    flows: &[Flow],
    seeds: &[u64],
) -> Result<Vec<(RunReport, RunReport)>, SimError> {
    if seeds.is_empty() {
        return Err(SimError::NoSeeds);
    }
    check_flows(scenario, flows)?;
    seeds
        .par_iter()
        .map(|&seed| {
            let mk = |protocol| SimRun {
                scenario,
                protocol,
                flows: flows.to_vec(),
                seed,
            };
            Ok((run(&mk(Protocol::Aodv))?, run(&mk(Protocol::CoAodv))?))
        })
        .collect()
}

/// Means over a set of runs of one protocol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProtocolSummary {
    /// Mean hop count over routed flows.
    pub mean_hop_count: Option<f64>,
    /// Mean of per-run PDR over runs that sent packets.
    pub mean_pdr: Option<f64>,
    pub routed_flows: usize,
    pub unrouted_flows: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn summarize<'a>(runs: impl IntoIterator<Item = &'a RunReport> + Clone) -> ProtocolSummary {
    let flows = || runs.clone().into_iter().flat_map(|r| r.flows.iter());
    ProtocolSummary {
        mean_hop_count: mean(flows().filter_map(|f| f.metrics.hop_count.map(f64::from))),
        mean_pdr: mean(runs.clone().into_iter().filter_map(|r| r.total.packet_delivery_ratio())),
        routed_flows: flows().filter(|f| f.route.is_some()).count(),
        unrouted_flows: flows().filter(|f| f.route.is_none()).count(),
    }
}
