//! Agents, epsilon-greedy selection and the per-component SARSA rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::qtable::QTable;
use crate::controller::{ARITIES, PARAMETER_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub parameter_index: usize,
    pub arity: usize,
    pub seed: u64,
}

impl AgentSpec {
    /// One agent per controller parameter, seeded `base_seed + index`.
    pub fn all(base_seed: u64) -> [AgentSpec; PARAMETER_COUNT] {
        std::array::from_fn(|i| AgentSpec {
            parameter_index: i,
            arity: ARITIES[i],
            seed: base_seed.wrapping_add(i as u64),
        })
    }
}

/// A learning agent: its Q-table and private random stream.
#[derive(Debug, Clone)]
pub struct Agent {
    pub spec: AgentSpec,
    pub q: QTable,
    pub rng: ChaCha8Rng,
}

impl Agent {
    pub fn new(spec: AgentSpec) -> Self {
        Self { spec, q: QTable::new(spec.arity), rng: ChaCha8Rng::seed_from_u64(spec.seed) }
    }
}

/// How an action was picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Choice {
    Explored,
    Greedy,
}

/// Epsilon-greedy over component-summed Q values.
///
/// One uniform draw is always consumed for the explore test, plus one more for
/// the random action when exploring.
pub fn select_action<R: Rng>(q: &QTable, state: usize, epsilon: f64, rng: &mut R) -> (usize, Choice) {
    assert!(state < q.arity(), "state {state} out of range");
    if rng.gen::<f64>() < epsilon {
        (rng.gen_range(0..q.arity()), Choice::Explored)
    } else {
        (q.greedy_action(state), Choice::Greedy)
    }
}

/// Applies the SARSA rule to the single cell `(state, action, component)`.
#[allow(clippy::too_many_arguments)]
pub fn sarsa_update(
    q: &mut QTable,
    state: usize,
    action: usize,
    component: usize,
    reward: f64,
    next_state: usize,
    next_action: usize,
    alpha: f64,
    gamma: f64,
) {
    let current = q.get(state, action, component);
    let target = reward + gamma * q.get(next_state, next_action, component);
    q.set(state, action, component, current + alpha * (target - current));
}
