//! Configurable memory controller: every tunable policy axis plus the
//! partition simulator that turns a trace slice into a metrics observation.

pub mod config;
pub mod metrics;
pub mod page;
pub mod refresh;
pub mod scheduler;
pub mod sim;

pub use config::{
    ArbiterKind, ControllerConfig, PagePolicy, RefreshPolicy, RespQueueKind, SchedulerBuffer, SchedulerKind, ARITIES,
    PARAMETER_COUNT, PARAMETER_NAMES,
};
pub use metrics::{compute_metrics, Direction, Metric, MetricsSnapshot, PartitionTally, METRIC_COUNT};
pub use sim::{simulate_partition, MemoryRequest, PartitionReport, SimError, SimEvent, SimOptions, SimulationState};
