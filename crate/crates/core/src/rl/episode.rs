//! The online tuning loop.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::agent::{sarsa_update, select_action, Agent, AgentSpec, Choice};
use super::qtable::QTable;
use super::reward::{total_reward, RewardTargets, RewardVector, TargetOverrides};
use crate::controller::{
    simulate_partition, ControllerConfig, MemoryRequest, MetricsSnapshot, SimError, SimOptions, SimulationState,
    METRIC_COUNT, PARAMETER_COUNT,
};
use crate::dram::DeviceParams;
use crate::explain::{explain_decision, Explanation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub timesteps: usize,
    pub warmup: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_old: f64,
    pub epsilon_new: f64,
    pub seed: u64,
    pub targets: TargetOverrides,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            timesteps: 300,
            warmup: 200,
            alpha: 0.1,
            gamma: 0.9,
            epsilon_old: 1.0,
            epsilon_new: 0.001,
            seed: 42,
            targets: TargetOverrides::default(),
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self, errors: &mut Vec<String>) {
        self.validate_loop(errors);
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            errors.push("learner.alpha: must be in (0, 1]".into());
        }
    }

    /// Checks needed by the loop itself. A zero learning rate is allowed here.
    fn validate_loop(&self, errors: &mut Vec<String>) {
        if self.timesteps == 0 {
            errors.push("learner.timesteps: must be at least 1".into());
        }
        if self.warmup == 0 || self.warmup > self.timesteps {
            errors.push("learner.warmup: must satisfy 0 < warmup <= timesteps".into());
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            errors.push("learner.alpha: must be in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            errors.push("learner.gamma: must be in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.epsilon_old) {
            errors.push("learner.epsilon_old: must be in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.epsilon_new) {
            errors.push("learner.epsilon_new: must be in [0, 1]".into());
        }
        self.targets.validate(errors);
    }

    /// Exploration rate in force at step `t` (1-based).
    pub fn epsilon_at(&self, t: usize) -> f64 {
        if t < self.warmup {
            self.epsilon_old
        } else {
            self.epsilon_new
        }
    }
}

/// What the controller reports after running one partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub metrics: MetricsSnapshot,
    /// Ideal values for this partition, used wherever no target is overridden.
    pub ideal: RewardTargets,
}

pub trait Environment {
    type Error: std::error::Error + Send + Sync + 'static;

    fn step(&mut self, action: &ControllerConfig) -> Result<Observation, Self::Error>;
}

/// Replays trace partitions in order, wrapping around, with DRAM state
/// carried from one partition to the next.
pub struct ControllerEnvironment {
    device: DeviceParams,
    partitions: Vec<Vec<MemoryRequest>>,
    state: SimulationState,
    next: usize,
}

impl ControllerEnvironment {
    pub fn new(device: DeviceParams, partitions: Vec<Vec<MemoryRequest>>) -> Result<Self, SimError> {
        if partitions.is_empty() || partitions.iter().any(Vec::is_empty) {
            return Err(SimError::EmptyPartition);
        }
        let state = SimulationState::new(&device);
        Ok(Self { device, partitions, state, next: 0 })
    }

    pub fn partition_count(&self) -> usize {
        self.partitions.len()
    }
}

impl Environment for ControllerEnvironment {
    type Error = SimError;

    fn step(&mut self, action: &ControllerConfig) -> Result<Observation, SimError> {
        let requests = &self.partitions[self.next % self.partitions.len()];
        self.next += 1;
        let report = simulate_partition(requests, action, &mut self.state, SimOptions::default())?;
        Ok(Observation { metrics: report.metrics, ideal: RewardTargets::ideal(&self.device, requests.len()) })
    }
}

#[derive(Debug, Clone, Default)]
pub struct EpisodeOptions {
    /// Explain every greedy choice against the agent's other actions.
    pub explain: bool,
    /// Order in which agents choose and learn each step. Results do not depend on it.
    pub agent_order: Option<[usize; PARAMETER_COUNT]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub step: usize,
    pub epsilon: f64,
    /// The action vector applied this step.
    pub action: [usize; PARAMETER_COUNT],
    pub metrics: MetricsSnapshot,
    pub rewards: RewardVector,
    pub total_reward: f64,
    pub cumulative_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRecord {
    pub step: usize,
    pub agent: usize,
    pub state: usize,
    pub chosen: usize,
    pub explanations: Vec<Explanation>,
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub tables: Vec<QTable>,
    pub cumulative_reward: f64,
    pub log: Vec<StepLog>,
    pub decisions: Vec<DecisionRecord>,
    /// The action vector chosen for the step after the last one.
    pub next_action: [usize; PARAMETER_COUNT],
}

impl EpisodeResult {
    /// Each agent's greedy action from the last applied action vector.
    pub fn greedy_final(&self) -> [usize; PARAMETER_COUNT] {
        let state = self.log.last().map(|l| l.action).expect("an episode has at least one step");
        std::array::from_fn(|i| self.tables[i].greedy_action(state[i]))
    }
}

#[derive(Debug, Error)]
pub enum EpisodeError<E: std::error::Error + 'static> {
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
    #[error("step {step}: {source}")]
    Environment {
        step: usize,
        #[source]
        source: E,
    },
}

fn choose(agent: &mut Agent, state: usize, epsilon: f64) -> (usize, Choice) {
    select_action(&agent.q, state, epsilon, &mut agent.rng)
}

/// Runs `config.timesteps` steps starting from `initial` as both the current
/// state and the reference for the first epsilon-greedy choice.
pub fn run_episode<E: Environment>(
    env: &mut E,
    config: &LearnerConfig,
    initial: &ControllerConfig,
    options: &EpisodeOptions,
) -> Result<EpisodeResult, EpisodeError<E::Error>> {
    let mut errors = Vec::new();
    config.validate_loop(&mut errors);
    initial.validate("initial", &mut errors);
    let order = options.agent_order.unwrap_or(std::array::from_fn(|i| i));
    let mut seen = [false; PARAMETER_COUNT];
    for &i in &order {
        if i >= PARAMETER_COUNT || std::mem::replace(&mut seen[i], true) {
            errors.push("agent_order: must be a permutation of 0..10".into());
            break;
        }
    }
    if !errors.is_empty() {
        return Err(EpisodeError::InvalidConfig(errors.join("; ")));
    }

    let mut agents: Vec<Agent> = AgentSpec::all(config.seed).into_iter().map(Agent::new).collect();
    let mut s_old = initial.to_indices();
    let mut action = [0usize; PARAMETER_COUNT];
    for &i in &order {
        action[i] = choose(&mut agents[i], s_old[i], config.epsilon_old).0;
    }

    let mut cumulative = 0.0;
    let mut log = Vec::with_capacity(config.timesteps);
    let mut decisions = Vec::new();
    for t in 1..=config.timesteps {
        let applied = ControllerConfig::from_indices(&action).expect("agents stay inside their domains");
        let obs = env.step(&applied).map_err(|source| EpisodeError::Environment { step: t, source })?;
        let targets = config.targets.apply(obs.ideal);
        let rewards = targets.rewards(&obs.metrics);
        let r_t = total_reward(&rewards);
        let epsilon = config.epsilon_at(t);
        if t >= config.warmup {
            cumulative += r_t;
        }

        let mut next = [0usize; PARAMETER_COUNT];
        for &i in &order {
            let (a, how) = choose(&mut agents[i], s_old[i], epsilon);
            next[i] = a;
            if options.explain && how == Choice::Greedy {
                let q = &agents[i].q;
                let alternatives: Vec<usize> = (0..q.arity()).filter(|&b| b != a).collect();
                let explanations = explain_decision(q, s_old[i], a, &alternatives, |v| ControllerConfig::value_label(i, v))
                    .expect("greedy choice is an argmax");
                decisions.push(DecisionRecord { step: t, agent: i, state: s_old[i], chosen: a, explanations });
            }
        }
        let s_new = action;
        for &i in &order {
            for c in 0..METRIC_COUNT {
                sarsa_update(&mut agents[i].q, s_old[i], action[i], c, rewards.0[c], s_new[i], next[i], config.alpha, config.gamma);
            }
        }

        log.push(StepLog {
            step: t,
            epsilon,
            action,
            metrics: obs.metrics,
            rewards,
            total_reward: r_t,
            cumulative_reward: cumulative,
        });
        s_old = s_new;
        action = next;
    }

    Ok(EpisodeResult {
        tables: agents.into_iter().map(|a| a.q).collect(),
        cumulative_reward: cumulative,
        log,
        decisions,
        next_action: action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::Metric;
    use std::convert::Infallible;

    /// Rewards depend only on the page policy, so the learner has something to find.
    struct Toy {
        steps: usize,
    }

    impl Environment for Toy {
        type Error = Infallible;

        fn step(&mut self, action: &ControllerConfig) -> Result<Observation, Infallible> {
            self.steps += 1;
            let p = action.page_policy.index() as f64;
            let metrics = MetricsSnapshot {
                avg_latency_ps: 10.0 + p,
                avg_power_mw: 5.0,
                total_energy_pj: 100.0 + 10.0 * p,
                avg_bandwidth_bps: 1.0,
                bank_switches: action.scheduler.index() as u64,
                bank_group_switches: 2,
                row_hit_rate: 0.5,
            };
            Ok(Observation { metrics, ideal: RewardTargets([9.0, 4.0, 90.0, 2.0, 3.0, 1.0, 1.0]) })
        }
    }

    fn cfg(timesteps: usize, warmup: usize) -> LearnerConfig {
        LearnerConfig { timesteps, warmup, ..LearnerConfig::default() }
    }

    #[test]
    fn single_step_counts_toward_cumulative() {
        let out = run_episode(&mut Toy { steps: 0 }, &cfg(1, 1), &ControllerConfig::default(), &Default::default()).unwrap();
        assert_eq!(out.log.len(), 1);
        assert_eq!(out.cumulative_reward, out.log[0].total_reward);
        assert_eq!(out.log[0].epsilon, 0.001);
    }

    #[test]
    fn warmup_boundary() {
        let out = run_episode(&mut Toy { steps: 0 }, &cfg(6, 4), &ControllerConfig::default(), &Default::default()).unwrap();
        let expected: f64 = out.log[3..].iter().map(|l| l.total_reward).sum();
        assert_eq!(out.cumulative_reward, expected);
        assert_eq!(out.log.iter().map(|l| l.epsilon).collect::<Vec<_>>(), [1.0, 1.0, 1.0, 0.001, 0.001, 0.001]);

        let out = run_episode(&mut Toy { steps: 0 }, &cfg(5, 5), &ControllerConfig::default(), &Default::default()).unwrap();
        assert_eq!(out.cumulative_reward, out.log[4].total_reward);
    }

    #[test]
    fn frozen_learner_never_moves() {
        let config = LearnerConfig { alpha: 0.0, epsilon_old: 0.0, epsilon_new: 0.0, ..cfg(20, 5) };
        let out = run_episode(&mut Toy { steps: 0 }, &config, &ControllerConfig::default(), &Default::default()).unwrap();
        assert!(out.tables.iter().all(|q| q.values().iter().all(|&v| v == 0.0)));
        assert!(out.log.iter().all(|l| l.action == [0; PARAMETER_COUNT]));
    }

    #[test]
    fn first_step_applies_initial_choice_and_learns_on_it() {
        let config = LearnerConfig { epsilon_old: 0.0, epsilon_new: 0.0, ..cfg(1, 1) };
        let out = run_episode(&mut Toy { steps: 0 }, &config, &ControllerConfig::default(), &Default::default()).unwrap();
        let s0 = ControllerConfig::default().to_indices();
        // all-zero tables pick action 0 everywhere; the update lands on (s0, 0)
        let r = out.log[0].rewards;
        let q = &out.tables[0];
        for c in 0..METRIC_COUNT {
            assert!((q.get(s0[0], 0, c) - 0.1 * r.0[c]).abs() < 1e-12);
        }
        assert_eq!(r.get(Metric::Latency), 9.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let err = run_episode(&mut Toy { steps: 0 }, &cfg(3, 4), &ControllerConfig::default(), &Default::default()).unwrap_err();
        assert!(err.to_string().contains("learner.warmup"));
        let opts = EpisodeOptions { agent_order: Some([0; PARAMETER_COUNT]), ..Default::default() };
        assert!(run_episode(&mut Toy { steps: 0 }, &cfg(3, 1), &ControllerConfig::default(), &opts).is_err());
    }

    #[test]
    fn deterministic_and_order_independent() {
        let config = cfg(40, 20);
        let base = ControllerConfig::default();
        let a = run_episode(&mut Toy { steps: 0 }, &config, &base, &Default::default()).unwrap();
        let b = run_episode(&mut Toy { steps: 0 }, &config, &base, &Default::default()).unwrap();
        assert_eq!(a.log, b.log);
        let mut reversed: [usize; PARAMETER_COUNT] = std::array::from_fn(|i| i);
        reversed.reverse();
        let opts = EpisodeOptions { agent_order: Some(reversed), ..Default::default() };
        let c = run_episode(&mut Toy { steps: 0 }, &config, &base, &opts).unwrap();
        assert_eq!(a.tables, c.tables);
        assert_eq!(a.log, c.log);
    }

    #[test]
    fn explanations_cover_greedy_choices() {
        let config = LearnerConfig { epsilon_old: 0.0, epsilon_new: 0.0, ..cfg(5, 1) };
        let opts = EpisodeOptions { explain: true, ..Default::default() };
        let out = run_episode(&mut Toy { steps: 0 }, &config, &ControllerConfig::default(), &opts).unwrap();
        assert_eq!(out.decisions.len(), 5 * PARAMETER_COUNT);
        let d = &out.decisions[0];
        assert_eq!(d.explanations.len(), crate::controller::ARITIES[d.agent] - 1);
    }
}
