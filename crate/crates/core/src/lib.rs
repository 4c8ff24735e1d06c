//! Trace-driven DRAM controller simulator with an online, explainable
//! multi-agent SARSA tuner for the controller's policy parameters.

pub mod config;
pub mod controller;
pub mod dram;
pub mod explain;
pub mod report;
pub mod rl;
pub mod trace;
