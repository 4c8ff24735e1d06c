//! Multi-agent SARSA over decomposed per-metric rewards.

pub mod agent;
pub mod episode;
pub mod equivalence;
pub mod qtable;
pub mod reward;

pub use agent::{sarsa_update, select_action, Agent, AgentSpec, Choice};
pub use episode::{
    run_episode, ControllerEnvironment, DecisionRecord, Environment, EpisodeError, EpisodeOptions, EpisodeResult,
    LearnerConfig, Observation, StepLog,
};
pub use equivalence::{decomposed_to_scalar_equivalence_check, Transition};
pub use qtable::{read_qtables, write_qtables, QTable, QTableFileError};
pub use reward::{compute_reward, total_reward, RewardTargets, RewardVector, TargetOverrides};
