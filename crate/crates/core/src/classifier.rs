//! Weighted network-type model: the dominant weight of a profile labels the
//! network, and the same profile ranks candidate relays by composite score.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::coopmath::{self, CoopError, NormalizedCriteria, RawCriteria};
use crate::model::{NetworkType, NodeId, WeightProfile, WeightsNotNormalized};
use crate::protocol::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Distance,
    Mobility,
    Energy,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Distance => "distance",
            Criterion::Mobility => "mobility",
            Criterion::Energy => "energy",
        })
    }
}

impl Criterion {
    pub fn network_type(&self) -> NetworkType {
        match self {
            Criterion::Distance => NetworkType::DistanceSensitive,
            Criterion::Mobility => NetworkType::MobilitySensitive,
            Criterion::Energy => NetworkType::EnergySensitive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationResult {
    pub network_type: NetworkType,
    pub dominant_weight: Criterion,
    pub profile: WeightProfile,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    WeightsNotNormalized(#[from] WeightsNotNormalized),
    #[error("weights ({0}, {1}, {2}) have no single largest weight")]
    AmbiguousProfile(f64, f64, f64),
}

impl From<CoopError> for ClassifyError {
    fn from(e: CoopError) -> Self {
        match e {
            CoopError::WeightsNotNormalized(w) => ClassifyError::WeightsNotNormalized(w),
            other => unreachable!("composite scoring only fails on weights: {other}"),
        }
    }
}

/// Label a profile by its strictly largest weight.
pub fn classify_network(w: &WeightProfile) -> Result<ClassificationResult, ClassifyError> {
    w.check()?;
    let weights = [
        (Criterion::Distance, w.w_distance),
        (Criterion::Mobility, w.w_mobility),
        (Criterion::Energy, w.w_energy),
    ];
    let top = weights.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
    let mut at_top = weights.iter().filter(|&&(_, v)| v == top);
    match (at_top.next(), at_top.next()) {
        (Some(&(criterion, _)), None) => Ok(ClassificationResult {
            network_type: criterion.network_type(),
            dominant_weight: criterion,
            profile: *w,
        }),
        _ => Err(ClassifyError::AmbiguousProfile(
            w.w_distance,
            w.w_mobility,
            w.w_energy,
        )),
    }
}

/// Score candidates under `w`, best first; equal scores go to the lower id.
pub fn rank_candidates(
    candidates: &[NormalizedCriteria],
    w: &WeightProfile,
) -> Result<Vec<(NodeId, f64)>, ClassifyError> {
    let mut scored = candidates
        .iter()
        .map(|c| Ok((c.id, coopmath::composite_score(c.distance, c.mobility, c.energy, w)?)))
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    Ok(scored)
}

/// Raw criteria of `owner`'s neighbors: distance from `owner`, mobility and
/// energy as advertised in their HELLOs.
pub fn neighbor_criteria(topology: &Topology, owner: NodeId) -> Option<Vec<RawCriteria>> {
    let scenario = topology.scenario();
    let me = scenario.node(owner)?;
    let table = topology.table(owner)?;
    let metric = scenario.config().distance_metric;
    Some(
        table
            .entries
            .iter()
            .map(|(&id, entry)| RawCriteria {
                id,
                distance: coopmath::distance(
                    me.position(),
                    scenario.node(id).expect("neighbor exists").position(),
                    metric,
                ),
                mobility: entry.mobility,
                energy: entry.energy,
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(id: u32, d: f64, m: f64, e: f64) -> NormalizedCriteria {
        NormalizedCriteria {
            id: NodeId(id),
            distance: d,
            mobility: m,
            energy: e,
        }
    }

    #[test]
    fn canonical_profiles() {
        let r = classify_network(&WeightProfile::DISTANCE_SENSITIVE).unwrap();
        assert_eq!(r.network_type, NetworkType::DistanceSensitive);
        assert_eq!(r.dominant_weight, Criterion::Distance);
        assert_eq!(
            classify_network(&WeightProfile::MOBILITY_SENSITIVE).unwrap().network_type,
            NetworkType::MobilitySensitive
        );
        assert_eq!(
            classify_network(&WeightProfile::ENERGY_SENSITIVE).unwrap().network_type,
            NetworkType::EnergySensitive
        );
    }

    #[test]
    fn non_canonical_uses_argmax() {
        let w = WeightProfile::new(0.4, 0.35, 0.25).unwrap();
        assert_eq!(classify_network(&w).unwrap().network_type, NetworkType::DistanceSensitive);
    }

    #[test]
    fn tied_top_is_ambiguous() {
        let w = WeightProfile::new(0.4, 0.4, 0.2).unwrap();
        assert_eq!(
            classify_network(&w),
            Err(ClassifyError::AmbiguousProfile(0.4, 0.4, 0.2))
        );
        // A tie below the top is fine.
        let w = WeightProfile::new(0.5, 0.25, 0.25).unwrap();
        assert!(classify_network(&w).is_ok());
    }

    #[test]
    fn invalid_weights_rejected() {
        let w = WeightProfile {
            w_distance: 0.6,
            w_mobility: 0.6,
            w_energy: 0.0,
        };
        assert!(matches!(
            classify_network(&w),
            Err(ClassifyError::WeightsNotNormalized(_))
        ));
        assert!(rank_candidates(&[cand(0, 1.0, 1.0, 1.0)], &w).is_err());
    }

    #[test]
    fn ranking_examples() {
        for w in [
            WeightProfile::DISTANCE_SENSITIVE,
            WeightProfile::MOBILITY_SENSITIVE,
            WeightProfile::ENERGY_SENSITIVE,
        ] {
            let r = rank_candidates(&[cand(2, 0.0, 0.0, 0.0), cand(1, 1.0, 1.0, 1.0)], &w).unwrap();
            assert_eq!(r, vec![(NodeId(1), 1.0), (NodeId(2), 0.0)]);
        }
        let single = rank_candidates(&[cand(5, 0.2, 0.4, 0.8)], &WeightProfile::ENERGY_SENSITIVE).unwrap();
        assert_eq!(single.len(), 1);
        assert!((single[0].1 - (0.2 * 0.25 + 0.4 * 0.25 + 0.8 * 0.5)).abs() < 1e-12);

        let r = rank_candidates(
            &[cand(1, 0.0, 1.0, 0.0), cand(0, 1.0, 0.0, 0.0)],
            &WeightProfile::DISTANCE_SENSITIVE,
        )
        .unwrap();
        assert_eq!(r, vec![(NodeId(0), 0.5), (NodeId(1), 0.25)]);
    }

    #[test]
    fn equal_scores_break_by_id() {
        let r = rank_candidates(
            &[cand(7, 0.5, 0.5, 0.5), cand(3, 0.5, 0.5, 0.5)],
            &WeightProfile::DISTANCE_SENSITIVE,
        )
        .unwrap();
        assert_eq!(r[0].0, NodeId(3));
    }
}
