//! MCTS with prioritized node expansion.
//!
//! Each iteration picks the best frontier node of the highest priority level,
//! expands every applicable action, rewards children that achieve a sub-goal
//! and moves them between levels according to the bridging factor β. With
//! β = 0 every node stays on one level and the search is plain UCT.

mod tree;
mod uct;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::feasibility::{ActionReducer, FeasibilityError};
use crate::model::{applicable, apply, ActionId, GroundAction, ModelError, State, Task};

pub use tree::{NodeId, SearchNode, SearchTree};
pub use uct::uct;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub c: f64,
    pub kappa: f64,
    pub beta: usize,
    pub reward: f64,
    pub max_nodes: usize,
    pub seed: u64,
    /// Stop expanding a node's remaining actions after the first sub-goal child.
    pub early_exit: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            c: std::f64::consts::SQRT_2,
            kappa: 3.0,
            beta: 5,
            reward: 1.0,
            max_nodes: 30_000,
            seed: 0,
            early_exit: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if !(self.c.is_finite() && self.c >= 0.0) {
            return bad("c must be a finite non-negative number");
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return bad("kappa must be a finite non-negative number");
        }
        if !(self.reward.is_finite() && self.reward > 0.0) {
            return bad("reward must be positive");
        }
        if self.max_nodes == 0 {
            return bad("max_nodes must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    /// Created tree nodes, excluding the root.
    pub expanded_nodes: usize,
    pub distinct_actions: usize,
    pub infeasible_actions: usize,
    pub oracle_calls: usize,
    /// Wall-clock search time without oracle time.
    pub search_time: Duration,
    pub oracle_time: Duration,
    pub iterations: usize,
    /// Largest applicable-action count over all expanded nodes.
    pub max_applicable: usize,
}

impl SearchStats {
    /// Equality ignoring the timing fields.
    pub fn same_counts(&self, other: &SearchStats) -> bool {
        SearchStats {
            search_time: Duration::ZERO,
            oracle_time: Duration::ZERO,
            ..self.clone()
        } == SearchStats {
            search_time: Duration::ZERO,
            oracle_time: Duration::ZERO,
            ..other.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("node budget exhausted after {} nodes", .0.expanded_nodes)]
    BudgetExhausted(Box<SearchStats>),
    #[error("frontier exhausted after {} nodes without reaching the goal", .0.expanded_nodes)]
    SearchExhausted(Box<SearchStats>),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl SearchError {
    pub fn stats(&self) -> Option<&SearchStats> {
        match self {
            SearchError::BudgetExhausted(s) | SearchError::SearchExhausted(s) => Some(s),
            _ => None,
        }
    }
}

/// The state transition used during expansion.
pub trait Simulator {
    fn simulate(&mut self, state: &State, action: &GroundAction) -> Result<State, ModelError>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Deterministic;

impl Simulator for Deterministic {
    fn simulate(&mut self, state: &State, action: &GroundAction) -> Result<State, ModelError> {
        apply(state, action)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<ActionId>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn keys<'t>(&self, task: &'t Task) -> Vec<&'t str> {
        self.steps.iter().map(|a| task.action(*a).key.as_str()).collect()
    }
}

/// One iteration of the main loop, recorded when tracing is on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub chosen: NodeId,
    /// Level the chosen node was selected from.
    pub level: usize,
    /// Whether sub-goal children went one level up.
    pub elevated: bool,
    pub children: Vec<NodeId>,
    pub p_after: usize,
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub plan: Plan,
    pub stats: SearchStats,
    pub terminal: NodeId,
    pub tree: SearchTree,
    pub trace: Vec<Expansion>,
}

impl SearchOutcome {
    /// Plan steps paired with whether the step changed the state. A failed
    /// stochastic attempt leaves the state as it was.
    pub fn steps_with_effect(&self) -> Vec<(ActionId, bool)> {
        let mut out = Vec::with_capacity(self.plan.len());
        let mut cursor = self.terminal;
        while let Some(parent) = self.tree.node(cursor).parent {
            let node = self.tree.node(cursor);
            let action = node.action.expect("non-root nodes carry an action");
            out.push((action, node.state != self.tree.node(parent).state));
            cursor = parent;
        }
        out.reverse();
        out
    }

    /// The plan without steps that left the state unchanged.
    pub fn effective_plan(&self) -> Plan {
        Plan {
            steps: self
                .steps_with_effect()
                .into_iter()
                .filter_map(|(a, changed)| changed.then_some(a))
                .collect(),
        }
    }
}

pub struct Planner<'t> {
    task: &'t Task,
    config: SearchConfig,
    reducer: ActionReducer,
    simulator: Box<dyn Simulator + 't>,
    trace: bool,
}

impl<'t> Planner<'t> {
    /// Deterministic transitions, no action reduction.
    pub fn new(task: &'t Task, config: SearchConfig) -> Self {
        Planner {
            task,
            config,
            reducer: ActionReducer::disabled(),
            simulator: Box::new(Deterministic),
            trace: false,
        }
    }

    pub fn with_reducer(mut self, reducer: ActionReducer) -> Self {
        self.reducer = reducer;
        self
    }

    pub fn with_simulator(mut self, simulator: impl Simulator + 't) -> Self {
        self.simulator = Box::new(simulator);
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn start(self) -> Result<Search<'t>, SearchError> {
        self.config.validate()?;
        let tree = SearchTree::new(self.task.init().clone(), self.task.initial_goal_set());
        Ok(Search {
            task: self.task,
            config: self.config,
            reducer: self.reducer,
            simulator: self.simulator,
            trace: self.trace.then(Vec::new),
            tree,
            stats: SearchStats::default(),
            elapsed: Duration::ZERO,
            terminal: None,
        })
    }

    pub fn run(self) -> Result<SearchOutcome, SearchError> {
        self.start()?.run()
    }
}

/// Runs the search with default settings and the given reducer.
pub fn pne_search(
    task: &Task,
    config: SearchConfig,
    reducer: ActionReducer,
) -> Result<(Plan, SearchStats), SearchError> {
    let out = Planner::new(task, config).with_reducer(reducer).run()?;
    Ok((out.plan, out.stats))
}

/// A search in progress; [`Search::step`] runs one iteration of the main loop.
pub struct Search<'t> {
    task: &'t Task,
    config: SearchConfig,
    reducer: ActionReducer,
    simulator: Box<dyn Simulator + 't>,
    trace: Option<Vec<Expansion>>,
    tree: SearchTree,
    stats: SearchStats,
    elapsed: Duration,
    terminal: Option<NodeId>,
}

impl<'t> Search<'t> {
    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn reducer(&self) -> &ActionReducer {
        &self.reducer
    }

    pub fn trace(&self) -> &[Expansion] {
        self.trace.as_deref().unwrap_or_default()
    }

    pub fn terminal(&self) -> Option<NodeId> {
        self.terminal
    }

    pub fn stats(&self) -> SearchStats {
        let mut s = self.stats.clone();
        let cache = self.reducer.cache();
        s.distinct_actions = self.reducer.distinct_actions();
        s.infeasible_actions = self.reducer.infeasible_actions();
        s.oracle_calls = cache.oracle_calls();
        s.oracle_time = cache.oracle_time();
        s.search_time = self.elapsed.saturating_sub(s.oracle_time);
        s
    }

    /// Runs until the goal is reached or the search fails.
    pub fn run(mut self) -> Result<SearchOutcome, SearchError> {
        while self.step()?.is_none() {}
        let terminal = self
            .terminal
            .ok_or_else(|| SearchError::Internal("no terminal node".into()))?;
        Ok(SearchOutcome {
            plan: self.path(terminal)?,
            stats: self.stats(),
            terminal,
            trace: self.trace.unwrap_or_default(),
            tree: self.tree,
        })
    }

    pub fn path(&self, terminal: NodeId) -> Result<Plan, SearchError> {
        if self.tree.get(terminal).is_none() {
            return Err(SearchError::Internal(format!("node {terminal} is not in the tree")));
        }
        Ok(Plan {
            steps: self.tree.path(terminal),
        })
    }

    /// One choose-and-expand iteration. Returns the terminal node once every
    /// sub-goal is achieved on its path.
    pub fn step(&mut self) -> Result<Option<NodeId>, SearchError> {
        if let Some(t) = self.terminal {
            return Ok(Some(t));
        }
        let started = Instant::now();
        let result = self.iterate();
        self.elapsed += started.elapsed();
        match result {
            Ok(Some(t)) => {
                self.terminal = Some(t);
                Ok(Some(t))
            }
            Ok(None) => Ok(None),
            Err(Failure::Budget) => Err(SearchError::BudgetExhausted(Box::new(self.stats()))),
            Err(Failure::Exhausted) => Err(SearchError::SearchExhausted(Box::new(self.stats()))),
            Err(Failure::Other(e)) => Err(e),
        }
    }

    fn iterate(&mut self) -> Result<Option<NodeId>, Failure> {
        let root = self.tree.root();
        if self.stats.iterations == 0 && self.tree.node(root).achieved.is_complete() {
            return Ok(Some(root));
        }
        let beta = self.config.beta;
        let chosen = self.tree.choose_node(&self.config).ok_or(Failure::Exhausted)?;
        let node = self.tree.node(chosen);
        let p_hat = node.level;
        let beta_parent = node.beta_n;
        let state = node.state.clone();
        let achieved = node.achieved.clone();
        // Decided once: sub-goal children move up unless that would leave level p̂ empty.
        let elevate = beta > 0 && (p_hat == 0 || self.tree.level_len(p_hat) > 0);

        let actions = applicable(&state, self.task.actions(), self.reducer.infeasible_keys());
        let actions = self.reducer.filter(actions).map_err(|e| Failure::Other(e.into()))?;
        self.stats.iterations += 1;
        self.stats.max_applicable = self.stats.max_applicable.max(actions.len());

        let mut children = Vec::with_capacity(actions.len());
        let mut outcome = None;
        for action in actions {
            if self.stats.expanded_nodes >= self.config.max_nodes {
                self.record(chosen, p_hat, elevate, children);
                return Err(Failure::Budget);
            }
            let next = self
                .simulator
                .simulate(&state, action)
                .map_err(|e| Failure::Other(e.into()))?;
            let new = achieved.new_subgoals(&state, &next);
            let mut child_achieved = achieved.clone();
            child_achieved.credit(&new);
            let complete = child_achieved.is_complete();
            let reward = if new.is_empty() { 0.0 } else { self.config.reward };
            let child = self.tree.add_child(chosen, action.id, next, child_achieved);
            self.stats.expanded_nodes += 1;
            self.tree.backpropagate(child, reward);
            children.push(child);
            if complete {
                outcome = Some(child);
                break;
            }

            let (level, beta_n) = if beta == 0 {
                (p_hat, 0)
            } else if !new.is_empty() {
                (if elevate { p_hat + 1 } else { p_hat }, 0)
            } else if beta_parent + 1 == beta {
                (p_hat.saturating_sub(1), 0)
            } else {
                (p_hat, beta_parent + 1)
            };
            self.tree.insert(child, level, beta_n);
            if self.config.early_exit && !new.is_empty() {
                break;
            }
        }
        self.tree.refresh_p();
        self.record(chosen, p_hat, elevate, children);
        Ok(outcome)
    }

    /// Appends to the trace, including expansions cut short by the budget.
    fn record(&mut self, chosen: NodeId, level: usize, elevated: bool, children: Vec<NodeId>) {
        if let Some(trace) = &mut self.trace {
            trace.push(Expansion {
                chosen,
                level,
                elevated,
                children,
                p_after: self.tree.p(),
            });
        }
    }
}

enum Failure {
    Budget,
    Exhausted,
    Other(SearchError),
}
