//! Distance, communication capability, mobility and the cooperative
//! predicate, plus the weighted composite score.
//!
//! All functions are pure.

use thiserror::Error;

use crate::model::{
    DistanceMetric, MobilityMetric, MobilityRecord, NodeId, NodeState, Position, ScenarioConfig,
    WeightProfile, WeightsNotNormalized,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoopError {
    #[error("mobility record has non-positive elapsed time {0}")]
    ZeroElapsedTime(f64),
    #[error("cooperative check for {0} needs at least one peer")]
    EmptyPeerSet(NodeId),
    #[error(transparent)]
    WeightsNotNormalized(#[from] WeightsNotNormalized),
}

pub fn manhattan_distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).abs() + (a.y - b.y).abs()
}

pub fn euclidean_distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

pub fn distance(a: Position, b: Position, metric: DistanceMetric) -> f64 {
    match metric {
        DistanceMetric::Manhattan => manhattan_distance(a, b),
        DistanceMetric::Euclidean => euclidean_distance(a, b),
    }
}

/// Potential communication capability: `distance(a, b) <= range`, boundary inclusive.
pub fn has_comm_capability(a: Position, b: Position, range: f64, metric: DistanceMetric) -> bool {
    distance(a, b, metric) <= range
}

/// Displacement rate between the two recorded positions.
pub fn mobility(rec: &MobilityRecord, metric: MobilityMetric) -> Result<f64, CoopError> {
    // Also rejects NaN.
    if rec.elapsed.is_nan() || rec.elapsed <= 0.0 {
        return Err(CoopError::ZeroElapsedTime(rec.elapsed));
    }
    let (a, b) = (rec.pos_t1, rec.pos_t2);
    let displacement = match metric {
        MobilityMetric::EuclideanRate => euclidean_distance(a, b),
        MobilityMetric::ManhattanRate => manhattan_distance(a, b),
    };
    Ok(displacement / rec.elapsed)
}

pub fn energy_ok(energy: f64, threshold: f64, strict: bool) -> bool {
    if strict {
        energy > threshold
    } else {
        energy >= threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoopVerdict {
    pub cooperative: bool,
    pub energy_ok: bool,
    pub range_ok: bool,
    pub mobility_ok: bool,
}

impl CoopVerdict {
    pub fn new(energy_ok: bool, range_ok: bool, mobility_ok: bool) -> Self {
        CoopVerdict {
            cooperative: energy_ok && range_ok && mobility_ok,
            energy_ok,
            range_ok,
            mobility_ok,
        }
    }
}

/// Evaluate whether `candidate` is a cooperative relay for traffic from `prev`.
///
/// `peers` are the rival next-hop candidates of `prev`. The mobility clause
/// passes when the candidate's mobility is no greater than any peer's; the
/// candidate is always counted among its own peers.
pub fn is_cooperative(
    candidate: &NodeState,
    prev: &NodeState,
    peers: &[&NodeState],
    config: &ScenarioConfig,
) -> Result<CoopVerdict, CoopError> {
    if peers.is_empty() {
        return Err(CoopError::EmptyPeerSet(candidate.id));
    }
    let own = mobility(&candidate.mobility_record, config.mobility_metric)?;
    let mut least = own;
    for peer in peers {
        least = least.min(mobility(&peer.mobility_record, config.mobility_metric)?);
    }
    let energy = energy_ok(
        candidate.energy,
        config.energy_threshold,
        config.threshold_strict,
    );
    let range = has_comm_capability(
        prev.position(),
        candidate.position(),
        config.transmission_range,
        config.distance_metric,
    );
    Ok(CoopVerdict::new(energy, range, own <= least))
}

/// `d*w1 + m*w2 + e*w3` over criteria normalized to `[0, 1]`.
pub fn composite_score(d_norm: f64, m_norm: f64, e_norm: f64, w: &WeightProfile) -> Result<f64, CoopError> {
    w.check()?;
    Ok(d_norm * w.w_distance + m_norm * w.w_mobility + e_norm * w.w_energy)
}

/// Raw criteria of one candidate, before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawCriteria {
    pub id: NodeId,
    pub distance: f64,
    pub mobility: f64,
    pub energy: f64,
}

/// Criteria after min-max normalization over a candidate set; higher is
/// better on every axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedCriteria {
    pub id: NodeId,
    pub distance: f64,
    pub mobility: f64,
    pub energy: f64,
}

fn min_max(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn scale(v: f64, (lo, hi): (f64, f64)) -> Option<f64> {
    (hi > lo).then(|| (v - lo) / (hi - lo))
}

/// Min-max normalize each criterion over `raw`.
///
/// Distance and mobility are inverted so that closer and steadier nodes
/// score higher. A criterion on which every candidate is equal maps to 1.0.
pub fn normalize_criteria(raw: &[RawCriteria]) -> Vec<NormalizedCriteria> {
    let d = min_max(raw.iter().map(|c| c.distance));
    let m = min_max(raw.iter().map(|c| c.mobility));
    let e = min_max(raw.iter().map(|c| c.energy));
    raw.iter()
        .map(|c| NormalizedCriteria {
            id: c.id,
            distance: scale(c.distance, d).map_or(1.0, |v| 1.0 - v),
            mobility: scale(c.mobility, m).map_or(1.0, |v| 1.0 - v),
            energy: scale(c.energy, e).unwrap_or(1.0),
        })
        .collect()
}
