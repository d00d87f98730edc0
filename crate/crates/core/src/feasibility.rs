//! Action reduction.
//!
//! Global actions are checked once against a [`FeasibilityOracle`]; an
//! infeasible verdict removes the action key from the action space of every
//! node in the tree. The default oracle is a reach-radius test around each
//! robot's fixed base, standing in for an inverse-kinematics solver.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::GroundAction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("action {key}: robot `{robot}` has a base but no reach radius")]
    MissingReach { key: String, robot: String },
    #[error("action {key}: {message}")]
    Oracle { key: String, message: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Workspace geometry in meters: robot bases, reach radii and named locations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeometryConfig {
    pub bases: BTreeMap<String, Point3>,
    pub locations: BTreeMap<String, Point3>,
    pub reach: BTreeMap<String, f64>,
}

impl GeometryConfig {
    pub fn is_empty(&self) -> bool {
        self.bases.is_empty() && self.locations.is_empty() && self.reach.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

/// A state-independent feasibility check. Implementations must return the same
/// verdict every time they are asked about the same action.
pub trait FeasibilityOracle {
    fn check(&self, action: &GroundAction, geometry: &GeometryConfig) -> Result<Verdict, FeasibilityError>;
}

/// Feasible iff every located object bound by the action lies within the reach
/// radius (closed ball) of every robot bound by the action.
///
/// Robots are the bound objects with a `base` entry, targets the bound objects
/// with a `loc` entry. An action binding no robot or no target carries no
/// geometric annotation and is feasible.
pub fn reach_check(action: &GroundAction, geometry: &GeometryConfig) -> Result<Verdict, FeasibilityError> {
    let robots: Vec<&str> = action
        .binding
        .iter()
        .filter(|o| geometry.bases.contains_key(o.as_str()))
        .map(String::as_str)
        .collect();
    let targets: Vec<&Point3> = action
        .binding
        .iter()
        .filter_map(|o| geometry.locations.get(o.as_str()))
        .collect();
    if robots.is_empty() || targets.is_empty() {
        return Ok(Verdict::Feasible);
    }
    for robot in robots {
        let base = &geometry.bases[robot];
        let radius = *geometry
            .reach
            .get(robot)
            .ok_or_else(|| FeasibilityError::MissingReach {
                key: action.key.clone(),
                robot: robot.to_string(),
            })?;
        if targets.iter().any(|t| base.distance(t) > radius) {
            return Ok(Verdict::Infeasible);
        }
    }
    Ok(Verdict::Feasible)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ReachOracle;

impl FeasibilityOracle for ReachOracle {
    fn check(&self, action: &GroundAction, geometry: &GeometryConfig) -> Result<Verdict, FeasibilityError> {
        reach_check(action, geometry)
    }
}

/// Verdicts shared by every node of one search.
#[derive(Clone, Debug, Default)]
pub struct InfeasibilityCache {
    infeasible: HashSet<String>,
    checked: HashSet<String>,
    oracle_calls: usize,
    oracle_time: Duration,
}

impl InfeasibilityCache {
    pub fn infeasible_keys(&self) -> &HashSet<String> {
        &self.infeasible
    }

    pub fn checked_keys(&self) -> &HashSet<String> {
        &self.checked
    }

    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls
    }

    pub fn oracle_time(&self) -> Duration {
        self.oracle_time
    }

    pub fn is_infeasible(&self, key: &str) -> bool {
        self.infeasible.contains(key)
    }
}

/// Drops globally infeasible actions, consulting the oracle at most once per key.
pub fn filter_global<'a>(
    actions: Vec<&'a GroundAction>,
    cache: &mut InfeasibilityCache,
    oracle: &dyn FeasibilityOracle,
    geometry: &GeometryConfig,
) -> Result<Vec<&'a GroundAction>, FeasibilityError> {
    let mut kept = Vec::with_capacity(actions.len());
    for action in actions {
        if !action.global {
            kept.push(action);
            continue;
        }
        if cache.infeasible.contains(&action.key) {
            continue;
        }
        if !cache.checked.contains(&action.key) {
            let started = Instant::now();
            let verdict = oracle.check(action, geometry);
            cache.oracle_time += started.elapsed();
            let verdict = verdict?;
            cache.oracle_calls += 1;
            cache.checked.insert(action.key.clone());
            if verdict == Verdict::Infeasible {
                cache.infeasible.insert(action.key.clone());
                continue;
            }
        }
        kept.push(action);
    }
    Ok(kept)
}

/// The action-reduction stage of a search: an optional filter plus the
/// bookkeeping of every distinct action key that reached it.
pub struct ActionReducer {
    enabled: bool,
    oracle: Box<dyn FeasibilityOracle>,
    geometry: GeometryConfig,
    cache: InfeasibilityCache,
    encountered: HashSet<String>,
}

impl ActionReducer {
    pub fn new(oracle: Box<dyn FeasibilityOracle>, geometry: GeometryConfig) -> Self {
        ActionReducer {
            enabled: true,
            oracle,
            geometry,
            cache: InfeasibilityCache::default(),
            encountered: HashSet::new(),
        }
    }

    pub fn reach(geometry: GeometryConfig) -> Self {
        Self::new(Box::new(ReachOracle), geometry)
    }

    /// Passes every action through unchanged, still counting distinct keys.
    pub fn disabled() -> Self {
        ActionReducer {
            enabled: false,
            ..Self::reach(GeometryConfig::default())
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn filter<'a>(&mut self, actions: Vec<&'a GroundAction>) -> Result<Vec<&'a GroundAction>, FeasibilityError> {
        for a in &actions {
            if !self.encountered.contains(&a.key) {
                self.encountered.insert(a.key.clone());
            }
        }
        if !self.enabled {
            return Ok(actions);
        }
        filter_global(actions, &mut self.cache, self.oracle.as_ref(), &self.geometry)
    }

    pub fn cache(&self) -> &InfeasibilityCache {
        &self.cache
    }

    pub fn infeasible_keys(&self) -> &HashSet<String> {
        self.cache.infeasible_keys()
    }

    /// Number of distinct action keys seen by the filter.
    pub fn distinct_actions(&self) -> usize {
        self.encountered.len()
    }

    pub fn infeasible_actions(&self) -> usize {
        self.cache.infeasible.len()
    }

    pub fn encountered_keys(&self) -> &HashSet<String> {
        &self.encountered
    }
}

impl Default for ActionReducer {
    fn default() -> Self {
        Self::disabled()
    }
}
