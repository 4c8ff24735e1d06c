//! Checks that the decomposed learner matches scalar SARSA on the summed reward.

use super::agent::sarsa_update;
use super::qtable::QTable;
use super::reward::{total_reward, RewardVector};
use crate::controller::METRIC_COUNT;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub rewards: RewardVector,
    pub next_state: usize,
    pub next_action: usize,
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Trains a decomposed table and a scalar table on the same trajectory and
/// compares every cell's component sum with the scalar value.
pub fn decomposed_to_scalar_equivalence_check(arity: usize, trajectory: &[Transition], alpha: f64, gamma: f64) -> bool {
    let mut decomposed = QTable::new(arity);
    let mut scalar = vec![0.0f64; arity * arity];
    for tr in trajectory {
        for c in 0..METRIC_COUNT {
            sarsa_update(&mut decomposed, tr.state, tr.action, c, tr.rewards.0[c], tr.next_state, tr.next_action, alpha, gamma);
        }
        let r = total_reward(&tr.rewards);
        let cell = tr.state * arity + tr.action;
        let next = scalar[tr.next_state * arity + tr.next_action];
        scalar[cell] += alpha * (r + gamma * next - scalar[cell]);
    }
    (0..arity).all(|s| (0..arity).all(|a| close(decomposed.summed(s, a), scalar[s * arity + a])))
}
