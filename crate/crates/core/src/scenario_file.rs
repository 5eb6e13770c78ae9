//! JSON scenario files.
//!
//! ```json
//! {
//!   "nodes": [{"id": 0, "pos_t1": [10, 10], "pos_t2": [10, 10], "energy": 1000}],
//!   "area": [100, 100],
//!   "transmission_range": 20,
//!   "energy_threshold": 500,
//!   "distance_metric": "manhattan",
//!   "mobility_metric": "euclidean_rate",
//!   "threshold_strict": true,
//!   "non_coop_drop_prob": 1.0,
//!   "seed": 1,
//!   "elapsed_time": 1
//! }
//! ```
//!
//! `elapsed_time` applies to every node's mobility record.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_scenario, DistanceMetric, MobilityMetric, MobilityRecord, NodeId, NodeState,
    Position, Scenario, ScenarioConfig, ScenarioError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: NodeId,
    pub pos_t1: [f64; 2],
    pub pos_t2: [f64; 2],
    pub energy: f64,
}

fn default_true() -> bool {
    true
}

fn default_drop_prob() -> f64 {
    1.0
}

fn default_elapsed() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub nodes: Vec<NodeEntry>,
    pub area: [f64; 2],
    pub transmission_range: f64,
    pub energy_threshold: f64,
    #[serde(default)]
    pub distance_metric: DistanceMetric,
    #[serde(default)]
    pub mobility_metric: MobilityMetric,
    #[serde(default = "default_true")]
    pub threshold_strict: bool,
    #[serde(default = "default_drop_prob")]
    pub non_coop_drop_prob: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_elapsed")]
    pub elapsed_time: f64,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read scenario file {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse scenario file {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid scenario {}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        #[source]
        source: ScenarioError,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("nodes use different elapsed times ({0} and {1}); the file format has a single elapsed_time")]
pub struct MixedElapsedTime(pub f64, pub f64);

impl ScenarioFile {
    pub fn into_config(self) -> ScenarioConfig {
        let elapsed = self.elapsed_time;
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| NodeState {
                id: n.id,
                mobility_record: MobilityRecord {
                    pos_t1: Position::new(n.pos_t1[0], n.pos_t1[1]),
                    pos_t2: Position::new(n.pos_t2[0], n.pos_t2[1]),
                    elapsed,
                },
                energy: n.energy,
            })
            .collect();
        ScenarioConfig {
            nodes,
            area: (self.area[0], self.area[1]),
            transmission_range: self.transmission_range,
            energy_threshold: self.energy_threshold,
            distance_metric: self.distance_metric,
            mobility_metric: self.mobility_metric,
            threshold_strict: self.threshold_strict,
            non_coop_drop_prob: self.non_coop_drop_prob,
            rng_seed: self.seed,
        }
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self, MixedElapsedTime> {
        let elapsed = config
            .nodes
            .first()
            .map_or(1.0, |n| n.mobility_record.elapsed);
        if let Some(n) = config
            .nodes
            .iter()
            .find(|n| n.mobility_record.elapsed != elapsed)
        {
            return Err(MixedElapsedTime(elapsed, n.mobility_record.elapsed));
        }
        let nodes = config
            .nodes
            .iter()
            .map(|n| {
                let r = &n.mobility_record;
                NodeEntry {
                    id: n.id,
                    pos_t1: [r.pos_t1.x, r.pos_t1.y],
                    pos_t2: [r.pos_t2.x, r.pos_t2.y],
                    energy: n.energy,
                }
            })
            .collect();
        Ok(ScenarioFile {
            nodes,
            area: [config.area.0, config.area.1],
            transmission_range: config.transmission_range,
            energy_threshold: config.energy_threshold,
            distance_metric: config.distance_metric,
            mobility_metric: config.mobility_metric,
            threshold_strict: config.threshold_strict,
            non_coop_drop_prob: config.non_coop_drop_prob,
            seed: config.rng_seed,
            elapsed_time: elapsed,
        })
    }
}

pub fn parse_config(json: &str) -> Result<ScenarioConfig, serde_json::Error> {
    serde_json::from_str::<ScenarioFile>(json).map(ScenarioFile::into_config)
}

pub fn to_json(config: &ScenarioConfig) -> Result<String, MixedElapsedTime> {
    let file = ScenarioFile::from_config(config)?;
    Ok(serde_json::to_string_pretty(&file).expect("scenario file serializes"))
}

/// Read a scenario file without validating it.
pub fn read_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text).map_err(|source| LoadError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, LoadError> {
    let path = path.as_ref();
    let config = read_config(path)?;
    validate_scenario(config).map_err(|source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}
