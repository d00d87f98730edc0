//! Multi-goal MCTS task planning with prioritized node expansion and action reduction.

pub mod bench;
pub mod domains;
pub mod feasibility;
pub mod model;
pub mod parser;
pub mod search;

pub use model::{Domain, GroundAction, Problem, State, Task};
pub use search::{pne_search, Plan, Planner, SearchConfig, SearchError, SearchStats};
