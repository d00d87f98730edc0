//! Benchmark and test domains.

pub mod bearing;
pub mod micro;
pub mod stochastic;

pub use bearing::{generate_bearing, BearingScenario, DomainError, Variant};
pub use micro::{generate_micro, MicroKind};
pub use stochastic::{stochastic_present, StochasticPresent};

use crate::model::{ModelError, Task};
use crate::parser::{parse_domain, parse_problem, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum LoadTaskError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Parses and grounds a domain/problem text pair.
pub fn task_from_text(domain: &str, problem: &str) -> Result<Task, LoadTaskError> {
    let d = parse_domain(domain)?;
    let p = parse_problem(problem, &d)?;
    Ok(Task::ground(&d, &p)?)
}

pub fn bearing_task(scenario: &BearingScenario) -> Result<Task, LoadTaskError> {
    let (d, p) = generate_bearing(scenario)?;
    task_from_text(&d, &p)
}

pub fn micro_task(kind: MicroKind) -> Task {
    let (d, p) = generate_micro(kind);
    task_from_text(&d, &p).expect("micro domains are well-formed")
}
