//! Camera shutter failures for `present*` actions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{apply, GroundAction, ModelError, State};
use crate::search::Simulator;

use super::bearing::DomainError;

fn check_f(f: f64) -> Result<(), DomainError> {
    if (0.0..1.0).contains(&f) {
        Ok(())
    } else {
        Err(DomainError::FailureProbability(f))
    }
}

pub fn is_present(action: &GroundAction) -> bool {
    action.name.starts_with("present")
}

/// Applies a present action with probability `1 - f`; otherwise returns the
/// state unchanged and `false`.
pub fn stochastic_present(
    state: &State,
    action: &GroundAction,
    f: f64,
    rng: &mut impl Rng,
) -> Result<(State, bool), StochasticError> {
    check_f(f)?;
    let next = apply(state, action)?;
    if f > 0.0 && rng.gen::<f64>() < f {
        Ok((state.clone(), false))
    } else {
        Ok((next, true))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StochasticError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A [`Simulator`] in which every present action fails with probability `f`.
#[derive(Clone, Debug)]
pub struct StochasticPresent {
    f: f64,
    rng: ChaCha8Rng,
}

impl StochasticPresent {
    pub fn new(f: f64, seed: u64) -> Result<Self, DomainError> {
        check_f(f)?;
        Ok(StochasticPresent {
            f,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn f(&self) -> f64 {
        self.f
    }
}

impl Simulator for StochasticPresent {
    fn simulate(&mut self, state: &State, action: &GroundAction) -> Result<State, ModelError> {
        if !is_present(action) {
            return apply(state, action);
        }
        match stochastic_present(state, action, self.f, &mut self.rng) {
            Ok((next, _)) => Ok(next),
            Err(StochasticError::Model(e)) => Err(e),
            Err(StochasticError::Domain(e)) => unreachable!("f checked at construction: {e}"),
        }
    }
}
