//! HELLO exchange and route discovery for AODV and CO-AODV.
//!
//! Route requests are flooded level by level: every request held at hop
//! count `k` is rebroadcast to the holder's neighbors before any request at
//! hop count `k + 1` is. Each receiving relay evaluates its own cooperative
//! verdict against the sender's other candidate next hops and appends the
//! CO flag to the request.
//!
//! Ties are resolved by lowest node id, which for whole paths means
//! lexicographic order.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::coopmath::{self, CoopVerdict};
use crate::model::{NodeId, NodeState, Route, RouteRequest, Scenario};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscoveryError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no route from {from} to {to}")]
    NoRoute { from: NodeId, to: NodeId },
    #[error("no cooperative route from {from} to {to}")]
    NoCooperativeRoute { from: NodeId, to: NodeId },
    #[error("route {route} does not connect {from} to {to}")]
    EndpointMismatch {
        route: String,
        from: NodeId,
        to: NodeId,
    },
}

/// What a node learns about a neighbor from its HELLO.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborEntry {
    pub last_hello_round: u64,
    pub energy: f64,
    pub mobility: f64,
    /// Energy clause of the cooperative predicate as advertised by the neighbor.
    pub coop_status: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTable {
    pub owner: NodeId,
    pub entries: BTreeMap<NodeId, NeighborEntry>,
}

impl NeighborTable {
    pub fn neighbors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.keys().copied()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.entries.contains_key(&id)
    }
}

// Validation guarantees a positive elapsed time, so mobility cannot fail.
fn node_mobility(scenario: &Scenario, node: &NodeState) -> f64 {
    coopmath::mobility(&node.mobility_record, scenario.config().mobility_metric)
        .expect("validated scenario has positive elapsed times")
}

/// Every node beacons once; each table ends up holding exactly the nodes in
/// transmission range of its owner.
pub fn exchange_hello(scenario: &Scenario, round: u64) -> BTreeMap<NodeId, NeighborTable> {
    let cfg = scenario.config();
    let mut tables: BTreeMap<NodeId, NeighborTable> = scenario
        .ids()
        .map(|id| {
            (
                id,
                NeighborTable {
                    owner: id,
                    entries: BTreeMap::new(),
                },
            )
        })
        .collect();
    for sender in scenario.nodes() {
        let entry = NeighborEntry {
            last_hello_round: round,
            energy: sender.energy,
            mobility: node_mobility(scenario, sender),
            coop_status: coopmath::energy_ok(sender.energy, cfg.energy_threshold, cfg.threshold_strict),
        };
        for receiver in scenario.nodes() {
            if receiver.id == sender.id {
                continue;
            }
            if coopmath::has_comm_capability(
                sender.position(),
                receiver.position(),
                cfg.transmission_range,
                cfg.distance_metric,
            ) {
                tables
                    .get_mut(&receiver.id)
                    .expect("table for every node")
                    .entries
                    .insert(sender.id, entry);
            }
        }
    }
    tables
}

/// A scenario together with the neighbor tables from one HELLO round.
#[derive(Debug, Clone)]
pub struct Topology<'a> {
    scenario: &'a Scenario,
    tables: BTreeMap<NodeId, NeighborTable>,
}

impl<'a> Topology<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Topology {
            scenario,
            tables: exchange_hello(scenario, 0),
        }
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn table(&self, id: NodeId) -> Option<&NeighborTable> {
        self.tables.get(&id)
    }

    pub fn tables(&self) -> &BTreeMap<NodeId, NeighborTable> {
        &self.tables
    }

    fn neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.tables[&id].neighbors()
    }

    fn node(&self, id: NodeId) -> &'a NodeState {
        self.scenario.node(id).expect("node in topology")
    }

    /// Verdict of `candidate` receiving a request held by the last node of
    /// `path`. Rivals are the holder's neighbors not yet on the path.
    pub fn relay_verdict(&self, path: &[NodeId], candidate: NodeId) -> CoopVerdict {
        let prev = *path.last().expect("non-empty path");
        let peers: Vec<&NodeState> = self
            .neighbors(prev)
            .filter(|id| !path.contains(id))
            .map(|id| self.node(id))
            .collect();
        let peers = if peers.is_empty() {
            vec![self.node(candidate)]
        } else {
            peers
        };
        coopmath::is_cooperative(
            self.node(candidate),
            self.node(prev),
            &peers,
            self.scenario.config(),
        )
        .expect("validated scenario")
    }

    /// Verdicts of every intermediate on `route`, in path order.
    pub fn route_verdicts(&self, route: &Route) -> Vec<(NodeId, CoopVerdict)> {
        route
            .intermediates()
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, self.relay_verdict(&route.path[..=i], id)))
            .collect()
    }

    fn check_endpoints(&self, source: NodeId, dest: NodeId) -> Result<(), DiscoveryError> {
        for id in [source, dest] {
            if !self.scenario.contains(id) {
                return Err(DiscoveryError::UnknownNode(id));
            }
        }
        Ok(())
    }
}

/// The selected route and the request that carried it to the destination.
#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub route: Route,
    pub request: RouteRequest,
}

impl Discovery {
    fn trivial(source: NodeId) -> Self {
        Discovery {
            route: Route {
                path: vec![source],
                fully_cooperative: true,
            },
            request: RouteRequest::new(source, source),
        }
    }

    fn arrived(request: RouteRequest) -> Self {
        let mut path = request.path.clone();
        path.push(request.destination);
        Discovery {
            route: Route {
                path,
                fully_cooperative: request.all_cooperative(),
            },
            request,
        }
    }
}

/// Baseline AODV: the first request to arrive wins, i.e. the minimum-hop path.
///
/// Relays forward only the first copy they see. Processing each level in
/// path order makes that first copy the lexicographically smallest
/// shortest path to the relay.
pub fn aodv_discover(source: NodeId, dest: NodeId, topology: &Topology) -> Result<Discovery, DiscoveryError> {
    topology.check_endpoints(source, dest)?;
    if source == dest {
        return Ok(Discovery::trivial(source));
    }
    let mut seen = BTreeSet::from([source]);
    let mut frontier = vec![RouteRequest::new(source, dest)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for req in &frontier {
            let holder = req.holder();
            for w in topology.neighbors(holder) {
                if w == dest {
                    log::trace!("AODV RREQ reached {dest} via {:?}", req.path);
                    return Ok(Discovery::arrived(req.clone()));
                }
                if seen.insert(w) {
                    let verdict = topology.relay_verdict(&req.path, w);
                    next.push(req.relayed_by(w, verdict.cooperative));
                }
            }
        }
        frontier = next;
    }
    Err(DiscoveryError::NoRoute {
        from: source,
        to: dest,
    })
}

// Requests that are still fully cooperative are distinguished by holder and
// visited set, since later verdicts depend on both. Copies already carrying
// CO=0 can only tell the destination it is reachable, so one per holder is
// enough.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum FloodKey {
    Cooperative(NodeId, Vec<NodeId>),
    Tainted(NodeId),
}

fn flood_key(req: &RouteRequest) -> FloodKey {
    if req.all_cooperative() {
        let mut visited = req.path.clone();
        visited.sort_unstable();
        FloodKey::Cooperative(req.holder(), visited)
    } else {
        FloodKey::Tainted(req.holder())
    }
}

/// CO-AODV: the destination gathers every request arriving in a round,
/// drops those carrying a CO=0 relay, and picks the lowest-hop survivor.
pub fn coaodv_discover(source: NodeId, dest: NodeId, topology: &Topology) -> Result<Discovery, DiscoveryError> {
    topology.check_endpoints(source, dest)?;
    if source == dest {
        return Ok(Discovery::trivial(source));
    }
    let mut reached_dest = false;
    let mut tainted_seen = BTreeSet::new();
    let mut frontier = vec![RouteRequest::new(source, dest)];
    while !frontier.is_empty() {
        let mut arrivals: Vec<RouteRequest> = Vec::new();
        let mut next: BTreeMap<FloodKey, RouteRequest> = BTreeMap::new();
        for req in &frontier {
            for w in topology.neighbors(req.holder()) {
                if w == dest {
                    arrivals.push(req.clone());
                    continue;
                }
                if req.has_visited(w) {
                    continue;
                }
                let verdict = topology.relay_verdict(&req.path, w);
                let relayed = req.relayed_by(w, verdict.cooperative);
                let key = flood_key(&relayed);
                if let FloodKey::Tainted(holder) = key {
                    if tainted_seen.contains(&holder) {
                        continue;
                    }
                }
                match next.get(&key) {
                    Some(kept) if kept.path <= relayed.path => {}
                    _ => {
                        next.insert(key, relayed);
                    }
                }
            }
        }

        if !arrivals.is_empty() {
            reached_dest = true;
            let total = arrivals.len();
            let best = arrivals
                .into_iter()
                .filter(RouteRequest::all_cooperative)
                .min_by(|a, b| a.path.cmp(&b.path));
            if let Some(req) = best {
                log::trace!("CO-AODV: {dest} accepted {:?} out of {total} arrivals", req.path);
                return Ok(Discovery::arrived(req));
            }
            log::trace!("CO-AODV: {dest} dropped all {total} arrivals");
        }

        for key in next.keys() {
            if let FloodKey::Tainted(holder) = key {
                tainted_seen.insert(*holder);
            }
        }
        frontier = next.into_values().collect();
        frontier.sort_by(|a, b| a.path.cmp(&b.path));
    }
    if reached_dest {
        Err(DiscoveryError::NoCooperativeRoute {
            from: source,
            to: dest,
        })
    } else {
        Err(DiscoveryError::NoRoute {
            from: source,
            to: dest,
        })
    }
}

/// Route reply travelling back from the destination along the chosen path.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteReply {
    pub route: Route,
    /// Hops the reply visits, destination first.
    pub path: Vec<NodeId>,
}

pub fn build_route_reply(chosen: &Route, original: &RouteRequest) -> Result<RouteReply, DiscoveryError> {
    if chosen.source() != Some(original.source) || chosen.destination() != Some(original.destination) {
        return Err(DiscoveryError::EndpointMismatch {
            route: chosen.to_string(),
            from: original.source,
            to: original.destination,
        });
    }
    Ok(RouteReply {
        route: chosen.clone(),
        path: chosen.path.iter().rev().copied().collect(),
    })
}
