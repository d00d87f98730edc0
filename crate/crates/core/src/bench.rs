//! Plan validation, a breadth-first reference planner and the benchmark harness.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::domains::{bearing_task, BearingScenario, LoadTaskError};
use crate::feasibility::{reach_check, ActionReducer, Verdict};
use crate::model::{apply, is_applicable, ActionId, GoalSet, State, Task};
use crate::search::{Planner, SearchConfig, SearchError, SearchOutcome, SearchStats};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanVerdict {
    Valid,
    /// `step` is 0-based; `step == plan.len()` means the goals were not reached.
    Invalid {
        step: usize,
        reason: String,
    },
}

impl PlanVerdict {
    pub fn is_valid(&self) -> bool {
        *self == PlanVerdict::Valid
    }
}

impl fmt::Display for PlanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanVerdict::Valid => f.write_str("valid"),
            PlanVerdict::Invalid { step, reason } => write!(f, "invalid at step {}: {reason}", step + 1),
        }
    }
}

/// Replays action keys from the initial state. Valid iff every step is
/// applicable and every sub-goal is achieved at some point along the way.
pub fn validate_plan<S: AsRef<str>>(task: &Task, plan: &[S]) -> PlanVerdict {
    let mut state = task.init().clone();
    let mut achieved = task.initial_goal_set();
    for (step, key) in plan.iter().enumerate() {
        let key = key.as_ref();
        let Some(action) = task.action_by_key(key) else {
            return PlanVerdict::Invalid {
                step,
                reason: format!("unknown action {key}"),
            };
        };
        if !is_applicable(&state, action) {
            return PlanVerdict::Invalid {
                step,
                reason: format!("{key} is not applicable"),
            };
        }
        let next = match apply(&state, action) {
            Ok(s) => s,
            Err(e) => {
                return PlanVerdict::Invalid {
                    step,
                    reason: e.to_string(),
                }
            }
        };
        let new = achieved.new_subgoals(&state, &next);
        achieved.credit(&new);
        state = next;
    }
    if achieved.is_complete() {
        PlanVerdict::Valid
    } else {
        let missing: Vec<String> = achieved
            .desired()
            .iter()
            .filter(|a| !achieved.is_achieved(**a))
            .map(|a| task.atom(*a).to_string())
            .collect();
        PlanVerdict::Invalid {
            step: plan.len(),
            reason: format!("goals not reached: {}", missing.join(" ")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("state cap of {cap} exceeded before a plan was found")]
    Exhausted { cap: usize },
}

/// Shortest plan by breadth-first search over (state, achieved sub-goals),
/// using only actions that pass the reach test. `Ok(None)`: no plan exists.
pub fn bfs_oracle(task: &Task, cap: usize) -> Result<Option<Vec<ActionId>>, OracleError> {
    let feasible: Vec<_> = task
        .actions()
        .iter()
        .filter(|a| !a.global || reach_check(a, task.geometry()) != Ok(Verdict::Infeasible))
        .collect();
    let start = (task.init().clone(), task.initial_goal_set());
    if start.1.is_complete() {
        return Ok(Some(Vec::new()));
    }
    let mut seen: HashMap<(State, GoalSet), usize> = HashMap::new();
    let mut parents: Vec<Option<(usize, ActionId)>> = vec![None];
    let mut queue = VecDeque::new();
    seen.insert(start.clone(), 0);
    queue.push_back((start, 0usize));
    while let Some(((state, achieved), idx)) = queue.pop_front() {
        for action in &feasible {
            if !is_applicable(&state, action) {
                continue;
            }
            let next = apply(&state, action).expect("applicability checked");
            let mut next_achieved = achieved.clone();
            next_achieved.credit(&achieved.new_subgoals(&state, &next));
            let key = (next, next_achieved);
            if seen.contains_key(&key) {
                continue;
            }
            let id = parents.len();
            parents.push(Some((idx, action.id)));
            if key.1.is_complete() {
                let mut plan = Vec::new();
                let mut cursor = id;
                while let Some((p, a)) = parents[cursor] {
                    plan.push(a);
                    cursor = p;
                }
                plan.reverse();
                return Ok(Some(plan));
            }
            if seen.len() >= cap {
                return Err(OracleError::Exhausted { cap });
            }
            seen.insert(key.clone(), id);
            queue.push_back((key, id));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Uct,
    UctAr,
    UctArPne,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Uct, Method::UctAr, Method::UctArPne];

    pub fn label(self) -> &'static str {
        match self {
            Method::Uct => "uct",
            Method::UctAr => "uct+ar",
            Method::UctArPne => "uct+ar+pne",
        }
    }

    pub fn uses_pne(self) -> bool {
        self == Method::UctArPne
    }

    /// Search configuration and reducer for this method; `beta` only applies with PNE.
    pub fn configure(self, base: &SearchConfig, beta: usize, task: &Task) -> (SearchConfig, ActionReducer) {
        let config = SearchConfig {
            beta: if self.uses_pne() { beta } else { 0 },
            ..base.clone()
        };
        let reducer = match self {
            Method::Uct => ActionReducer::disabled(),
            Method::UctAr | Method::UctArPne => ActionReducer::reach(task.geometry().clone()),
        };
        (config, reducer)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown method `{0}` (expected uct, uct+ar or uct+ar+pne)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

/// One benchmark cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub b: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub method: String,
    pub beta: usize,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[serde(rename = "I")]
    pub i: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "T_L")]
    pub t_l: f64,
    #[serde(rename = "T_A")]
    pub t_a: f64,
    pub converged: bool,
}

impl BenchRecord {
    /// Equality on every column except the timings.
    pub fn same_counts(&self, other: &BenchRecord) -> bool {
        let strip = |r: &BenchRecord| BenchRecord {
            t_l: 0.0,
            t_a: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

pub const CSV_HEADER: &str = "b,N,method,beta,D,L,I,A,T_L,T_A,converged";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Load(#[from] LoadTaskError),
    #[error(transparent)]
    Search(SearchError),
    #[error("plan for b={b}, {method} failed validation: {verdict}")]
    InvalidPlan {
        b: usize,
        method: Method,
        verdict: PlanVerdict,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Runs one search and validates the plan it returns.
pub fn run_task(
    task: &Task,
    method: Method,
    beta: usize,
    base: &SearchConfig,
) -> Result<(Option<SearchOutcome>, SearchStats), SearchError> {
    let (config, reducer) = method.configure(base, beta, task);
    match Planner::new(task, config).with_reducer(reducer).run() {
        Ok(out) => {
            let stats = out.stats.clone();
            Ok((Some(out), stats))
        }
        Err(SearchError::BudgetExhausted(stats)) | Err(SearchError::SearchExhausted(stats)) => Ok((None, *stats)),
        Err(e) => Err(e),
    }
}

pub fn run_cell(b: usize, method: Method, beta: usize, base: &SearchConfig) -> Result<BenchRecord, BenchError> {
    let scenario = BearingScenario::new(b);
    let task = bearing_task(&scenario)?;
    let (outcome, stats) = run_task(&task, method, beta, base).map_err(BenchError::Search)?;
    let l = match &outcome {
        Some(out) => {
            let keys = out.plan.keys(&task);
            let verdict = validate_plan(&task, &keys);
            if !verdict.is_valid() {
                return Err(BenchError::InvalidPlan { b, method, verdict });
            }
            Some(out.plan.len())
        }
        None => None,
    };
    Ok(BenchRecord {
        b,
        n: scenario.goal_count(),
        method: method.label().to_string(),
        beta: if method.uses_pne() { beta } else { 0 },
        d: stats.expanded_nodes,
        l,
        i: stats.infeasible_actions,
        a: stats.distinct_actions,
        t_l: stats.search_time.as_secs_f64(),
        t_a: stats.oracle_time.as_secs_f64(),
        converged: l.is_some(),
    })
}

/// The cells of a benchmark grid. Methods without PNE ignore β and get one cell per `b`.
pub fn bench_cells(bearings: &[usize], betas: &[usize], methods: &[Method]) -> Vec<(usize, Method, usize)> {
    let mut cells = Vec::new();
    for &b in bearings {
        for &m in methods {
            if m.uses_pne() {
                cells.extend(betas.iter().map(|&beta| (b, m, beta)));
            } else {
                cells.push((b, m, 0));
            }
        }
    }
    cells
}

pub fn write_csv<W: io::Write>(out: W, records: &[BenchRecord]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_serialized_fields() {
        let mut buf = Vec::new();
        let r = BenchRecord {
            b: 1,
            n: 6,
            method: "uct".into(),
            beta: 0,
            d: 10,
            l: None,
            i: 0,
            a: 3,
            t_l: 0.5,
            t_a: 0.0,
            converged: false,
        };
        write_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("1,6,uct,0,10,,0,3,0.5,0.0,false"));
    }

    #[test]
    fn empty_csv_still_has_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), CSV_HEADER);
    }

    #[test]
    fn method_labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert!("ucb".parse::<Method>().is_err());
    }

    #[test]
    fn grid_gives_non_pne_methods_one_cell() {
        let cells = bench_cells(&[1, 2], &[2, 5], &Method::ALL);
        assert_eq!(cells.len(), 2 * (1 + 1 + 2));
        assert_eq!(cells[0], (1, Method::Uct, 0));
        assert_eq!(cells[3], (1, Method::UctArPne, 5));
    }
}
