//! Domain types shared across the simulator: nodes, scenarios, packets,
//! routes, weight profiles and run metrics.
//!
//! Everything here is a plain value type. A [`ScenarioConfig`] is turned into
//! a [`Scenario`] by [`validate_scenario`]; the rest of the crate only ever
//! works on validated scenarios.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a node in a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Two recorded positions of a node and the time elapsed between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityRecord {
    pub pos_t1: Position,
    pub pos_t2: Position,
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: NodeId,
    pub mobility_record: MobilityRecord,
    pub energy: f64,
}

impl NodeState {
    /// Position used for range checks. Energies and neighbor relations are
    /// snapshots taken at T1, so the T1 position is the current one.
    pub fn position(&self) -> Position {
        self.mobility_record.pos_t1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    #[default]
    Manhattan,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobilityMetric {
    /// Straight-line displacement divided by elapsed time.
    #[default]
    EuclideanRate,
    /// `|dx| + |dy|` divided by elapsed time.
    ManhattanRate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub nodes: Vec<NodeState>,
    pub area: (f64, f64),
    pub transmission_range: f64,
    pub energy_threshold: f64,
    pub distance_metric: DistanceMetric,
    pub mobility_metric: MobilityMetric,
    /// `true` requires `energy > threshold`, `false` accepts `energy >= threshold`.
    pub threshold_strict: bool,
    pub non_coop_drop_prob: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            nodes: Vec::new(),
            area: (100.0, 100.0),
            transmission_range: 20.0,
            energy_threshold: 500.0,
            distance_metric: DistanceMetric::default(),
            mobility_metric: MobilityMetric::default(),
            threshold_strict: true,
            non_coop_drop_prob: 1.0,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("duplicate node id {0}")]
    DuplicateNodeId(NodeId),
    #[error("node {id} at ({x}, {y}) lies outside the {width}x{height} area")]
    NodeOutsideArea {
        id: NodeId,
        x: f64,
        y: f64,
        width: f64,
        height: f64,
    },
    #[error("transmission_range must be > 0, got {0}")]
    NonPositiveRange(f64),
    #[error("{field} must be a probability in [0, 1], got {value}")]
    InvalidProbability { field: &'static str, value: f64 },
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: String, value: f64 },
    #[error("area dimensions must be >= 0, got {0}x{1}")]
    InvalidArea(f64, f64),
    #[error("node {id}: energy must be >= 0, got {energy}")]
    NegativeEnergy { id: NodeId, energy: f64 },
    #[error("energy_threshold must be >= 0, got {0}")]
    NegativeThreshold(f64),
    #[error("node {id}: elapsed time must be > 0, got {elapsed}")]
    NonPositiveElapsed { id: NodeId, elapsed: f64 },
}

/// A scenario whose invariants have been checked.
///
/// Nodes keep the order they were given in; `index` maps ids to that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    config: ScenarioConfig,
    index: BTreeMap<NodeId, usize>,
}

impl Scenario {
    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn into_config(self) -> ScenarioConfig {
        self.config
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.config.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeState> {
        self.index.get(&id).map(|&i| &self.config.nodes[i])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    /// Node ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.index.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.config.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.config.nodes.is_empty()
    }
}

fn finite(field: impl Into<String>, value: f64) -> Result<(), ScenarioError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::NonFinite {
            field: field.into(),
            value,
        })
    }
}

/// Check every scenario invariant and return the validated scenario.
///
/// Nothing is normalized: the config comes back exactly as given.
pub fn validate_scenario(config: ScenarioConfig) -> Result<Scenario, ScenarioError> {
    let (width, height) = config.area;
    finite("area.width", width)?;
    finite("area.height", height)?;
    if width < 0.0 || height < 0.0 {
        return Err(ScenarioError::InvalidArea(width, height));
    }
    finite("transmission_range", config.transmission_range)?;
    if config.transmission_range <= 0.0 {
        return Err(ScenarioError::NonPositiveRange(config.transmission_range));
    }
    finite("energy_threshold", config.energy_threshold)?;
    if config.energy_threshold < 0.0 {
        return Err(ScenarioError::NegativeThreshold(config.energy_threshold));
    }
    let p = config.non_coop_drop_prob;
    if !(0.0..=1.0).contains(&p) {
        return Err(ScenarioError::InvalidProbability {
            field: "non_coop_drop_prob",
            value: p,
        });
    }

    let mut index = BTreeMap::new();
    for (i, node) in config.nodes.iter().enumerate() {
        if index.insert(node.id, i).is_some() {
            return Err(ScenarioError::DuplicateNodeId(node.id));
        }
        let rec = &node.mobility_record;
        for (label, pos) in [("pos_t1", rec.pos_t1), ("pos_t2", rec.pos_t2)] {
            finite(format!("node {}.{label}.x", node.id), pos.x)?;
            finite(format!("node {}.{label}.y", node.id), pos.y)?;
            if pos.x < 0.0 || pos.x > width || pos.y < 0.0 || pos.y > height {
                return Err(ScenarioError::NodeOutsideArea {
                    id: node.id,
                    x: pos.x,
                    y: pos.y,
                    width,
                    height,
                });
            }
        }
        finite(format!("node {}.elapsed", node.id), rec.elapsed)?;
        if rec.elapsed <= 0.0 {
            return Err(ScenarioError::NonPositiveElapsed {
                id: node.id,
                elapsed: rec.elapsed,
            });
        }
        finite(format!("node {}.energy", node.id), node.energy)?;
        if node.energy < 0.0 {
            return Err(ScenarioError::NegativeEnergy {
                id: node.id,
                energy: node.energy,
            });
        }
    }

    Ok(Scenario { config, index })
}

/// A route request in flight.
///
/// `path` runs from the source to the node currently holding the request.
/// Every node after the source appended one cooperative flag on receipt, so
/// `route_stability[i]` belongs to `path[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteRequest {
    pub source: NodeId,
    pub destination: NodeId,
    pub path: Vec<NodeId>,
    pub route_stability: Vec<bool>,
}

impl RouteRequest {
    pub fn new(source: NodeId, destination: NodeId) -> Self {
        RouteRequest {
            source,
            destination,
            path: vec![source],
            route_stability: Vec::new(),
        }
    }

    pub fn hop_count(&self) -> u32 {
        (self.path.len() - 1) as u32
    }

    pub fn holder(&self) -> NodeId {
        *self.path.last().expect("route request path is never empty")
    }

    pub fn has_visited(&self, id: NodeId) -> bool {
        self.path.contains(&id)
    }

    /// True when every relay so far reported CO=1.
    pub fn all_cooperative(&self) -> bool {
        self.route_stability.iter().all(|&co| co)
    }

    /// Copy of this request after `relay` received it and appended its flag.
    pub fn relayed_by(&self, relay: NodeId, cooperative: bool) -> Self {
        debug_assert!(!self.has_visited(relay));
        let mut next = self.clone();
        next.path.push(relay);
        next.route_stability.push(cooperative);
        next
    }

    /// Structural invariants: starts at the source, no repeats, one flag per relay.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.path.first() == Some(&self.source)
            && self.path.iter().all(|id| seen.insert(*id))
            && self.route_stability.len() == self.path.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub path: Vec<NodeId>,
    pub fully_cooperative: bool,
}

impl Route {
    pub fn hop_count(&self) -> u32 {
        self.path.len().saturating_sub(1) as u32
    }

    pub fn source(&self) -> Option<NodeId> {
        self.path.first().copied()
    }

    pub fn destination(&self) -> Option<NodeId> {
        self.path.last().copied()
    }

    /// Nodes strictly between source and destination.
    pub fn intermediates(&self) -> &[NodeId] {
        if self.path.len() <= 2 {
            &[]
        } else {
            &self.path[1..self.path.len() - 1]
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, id) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

/// Tolerance on `w1 + w2 + w3 = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightProfile {
    pub w_distance: f64,
    pub w_mobility: f64,
    pub w_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("weights ({0}, {1}, {2}) must each lie in [0, 1] and sum to 1")]
pub struct WeightsNotNormalized(pub f64, pub f64, pub f64);

impl WeightProfile {
    pub const DISTANCE_SENSITIVE: WeightProfile = WeightProfile::raw(0.5, 0.25, 0.25);
    pub const MOBILITY_SENSITIVE: WeightProfile = WeightProfile::raw(0.25, 0.5, 0.25);
    pub const ENERGY_SENSITIVE: WeightProfile = WeightProfile::raw(0.25, 0.25, 0.5);

    const fn raw(w_distance: f64, w_mobility: f64, w_energy: f64) -> Self {
        WeightProfile {
            w_distance,
            w_mobility,
            w_energy,
        }
    }

    pub fn new(w_distance: f64, w_mobility: f64, w_energy: f64) -> Result<Self, WeightsNotNormalized> {
        let w = WeightProfile::raw(w_distance, w_mobility, w_energy);
        w.check()?;
        Ok(w)
    }

    pub fn check(&self) -> Result<(), WeightsNotNormalized> {
        let ws = [self.w_distance, self.w_mobility, self.w_energy];
        let in_unit = ws.iter().all(|w| (0.0..=1.0).contains(w));
        let sum: f64 = ws.iter().sum();
        if in_unit && (sum - 1.0).abs() <= WEIGHT_SUM_TOLERANCE {
            Ok(())
        } else {
            Err(WeightsNotNormalized(ws[0], ws[1], ws[2]))
        }
    }

    /// One of the three fixed profiles (one weight 0.5, the others 0.25).
    pub fn is_canonical(&self) -> bool {
        [
            Self::DISTANCE_SENSITIVE,
            Self::MOBILITY_SENSITIVE,
            Self::ENERGY_SENSITIVE,
        ]
        .contains(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkType {
    DistanceSensitive,
    MobilitySensitive,
    EnergySensitive,
}

impl NetworkType {
    pub fn label(&self) -> &'static str {
        match self {
            NetworkType::DistanceSensitive => "Distance Sensitive Network",
            NetworkType::MobilitySensitive => "Mobility Sensitive Network",
            NetworkType::EnergySensitive => "Energy Sensitive Network",
        }
    }

    pub fn example(&self) -> &'static str {
        match self {
            NetworkType::DistanceSensitive => "Wireless Networks",
            NetworkType::MobilitySensitive => "MANETs, VANETs",
            NetworkType::EnergySensitive => "Sensor Networks",
        }
    }
}

impl fmt::Display for NetworkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (e.g. {})", self.label(), self.example())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    Aodv,
    CoAodv,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Aodv => "AODV",
            Protocol::CoAodv => "CO-AODV",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimMetrics {
    pub protocol: Protocol,
    pub hop_count: Option<u32>,
    pub packets_sent: u64,
    pub packets_delivered: u64,
    pub route_discoveries: u64,
}

impl SimMetrics {
    pub fn empty(protocol: Protocol) -> Self {
        SimMetrics {
            protocol,
            hop_count: None,
            packets_sent: 0,
            packets_delivered: 0,
            route_discoveries: 0,
        }
    }

    /// Delivered over sent; `None` when nothing was sent.
    pub fn packet_delivery_ratio(&self) -> Option<f64> {
        (self.packets_sent > 0).then(|| self.packets_delivered as f64 / self.packets_sent as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u32, x: f64, y: f64) -> NodeState {
        NodeState {
            id: NodeId(id),
            mobility_record: MobilityRecord {
                pos_t1: Position::new(x, y),
                pos_t2: Position::new(x, y),
                elapsed: 1.0,
            },
            energy: 100.0,
        }
    }

    #[test]
    fn empty_scenario_is_valid() {
        let s = validate_scenario(ScenarioConfig::default()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn duplicate_id_is_named() {
        let cfg = ScenarioConfig {
            nodes: vec![node(3, 1.0, 1.0), node(3, 2.0, 2.0)],
            ..Default::default()
        };
        assert_eq!(
            validate_scenario(cfg),
            Err(ScenarioError::DuplicateNodeId(NodeId(3)))
        );
    }

    #[test]
    fn outside_area_rejected() {
        let cfg = ScenarioConfig {
            nodes: vec![node(0, 101.0, 5.0)],
            ..Default::default()
        };
        assert!(matches!(
            validate_scenario(cfg),
            Err(ScenarioError::NodeOutsideArea { id: NodeId(0), .. })
        ));
    }

    #[test]
    fn area_boundary_is_inside() {
        let cfg = ScenarioConfig {
            nodes: vec![node(0, 100.0, 0.0)],
            ..Default::default()
        };
        assert!(validate_scenario(cfg).is_ok());
    }

    #[test]
    fn range_and_probability_checked() {
        let cfg = ScenarioConfig {
            transmission_range: 0.0,
            ..Default::default()
        };
        assert_eq!(validate_scenario(cfg), Err(ScenarioError::NonPositiveRange(0.0)));

        let cfg = ScenarioConfig {
            non_coop_drop_prob: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            validate_scenario(cfg),
            Err(ScenarioError::InvalidProbability { .. })
        ));

        let cfg = ScenarioConfig {
            non_coop_drop_prob: f64::NAN,
            ..Default::default()
        };
        assert!(validate_scenario(cfg).is_err());
    }

    #[test]
    fn zero_elapsed_and_negative_energy_rejected() {
        let mut n = node(1, 1.0, 1.0);
        n.mobility_record.elapsed = 0.0;
        let cfg = ScenarioConfig {
            nodes: vec![n],
            ..Default::default()
        };
        assert!(matches!(
            validate_scenario(cfg),
            Err(ScenarioError::NonPositiveElapsed { .. })
        ));

        let mut n = node(1, 1.0, 1.0);
        n.energy = -1.0;
        let cfg = ScenarioConfig {
            nodes: vec![n],
            ..Default::default()
        };
        assert!(matches!(
            validate_scenario(cfg),
            Err(ScenarioError::NegativeEnergy { .. })
        ));
    }

    #[test]
    fn route_request_relay_keeps_invariants() {
        let req = RouteRequest::new(NodeId(0), NodeId(9));
        assert_eq!(req.hop_count(), 0);
        assert!(req.is_well_formed());
        let req = req.relayed_by(NodeId(2), true).relayed_by(NodeId(1), false);
        assert_eq!(req.hop_count(), 2);
        assert_eq!(req.holder(), NodeId(1));
        assert!(req.is_well_formed());
        assert!(!req.all_cooperative());
    }

    #[test]
    fn route_intermediates() {
        let r = Route {
            path: vec![NodeId(0), NodeId(2), NodeId(1)],
            fully_cooperative: true,
        };
        assert_eq!(r.hop_count(), 2);
        assert_eq!(r.intermediates(), &[NodeId(2)]);
        assert_eq!(r.to_string(), "N0-N2-N1");
        let single = Route {
            path: vec![NodeId(4)],
            fully_cooperative: true,
        };
        assert_eq!(single.hop_count(), 0);
        assert!(single.intermediates().is_empty());
    }

    #[test]
    fn weight_profiles() {
        assert!(WeightProfile::new(0.5, 0.25, 0.25).unwrap().is_canonical());
        assert!(!WeightProfile::new(0.4, 0.35, 0.25).unwrap().is_canonical());
        assert!(WeightProfile::new(0.5, 0.5, 0.5).is_err());
        assert!(WeightProfile::new(1.2, -0.1, -0.1).is_err());
    }

    #[test]
    fn pdr_absent_without_traffic() {
        let mut m = SimMetrics::empty(Protocol::Aodv);
        assert_eq!(m.packet_delivery_ratio(), None);
        m.packets_sent = 4;
        m.packets_delivered = 1;
        assert_eq!(m.packet_delivery_ratio(), Some(0.25));
    }
}
