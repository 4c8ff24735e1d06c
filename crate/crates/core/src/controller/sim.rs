//! Runs one trace partition through the controller.
//!
//! Each bank has one bank machine slot. The scheduler moves buffered requests
//! into free slots; each occupied slot (plus pending auto-precharges and
//! refresh work) offers one command per cycle, and the arbiter picks which
//! command goes on the bus. Time skips ahead whenever nothing can issue.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{ArbiterKind, ControllerConfig, RefreshPolicy, RespQueueKind, SchedulerBuffer};
use super::metrics::{compute_metrics, MetricsError, MetricsSnapshot, PartitionTally};
use super::page::{apply_page_policy, PageAction};
use super::refresh::{refresh_step, RefreshDecision, RefreshState};
use super::scheduler::{schedule_next, Candidate};
use crate::dram::{AddressMapping, Command, DecodedAddress, DeviceParams, Dram, DramError};
use crate::trace::{Op, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryRequest {
    pub id: u64,
    pub arrival_cycle: u64,
    pub is_write: bool,
    pub address: u64,
}

impl MemoryRequest {
    /// Numbers `records` consecutively starting at `first_id`.
    pub fn from_records(records: &[TraceRecord], first_id: u64) -> Vec<MemoryRequest> {
        records
            .iter()
            .zip(first_id..)
            .map(|(r, id)| MemoryRequest {
                id,
                arrival_cycle: r.cycle,
                is_write: r.op == Op::Write,
                address: r.address,
            })
            .collect()
    }
}

/// Device and controller state carried from one partition to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationState {
    dram: Dram,
    mapping: AddressMapping,
    cycle: u64,
    refresh: RefreshState,
    /// Banks whose row must close, keyed by the request that triggered it.
    auto_precharge: Vec<Option<u64>>,
    /// (bank group, bank) of the most recent column access.
    last_column: Option<(u32, u32)>,
}

impl SimulationState {
    pub fn new(device: &DeviceParams) -> Self {
        Self {
            dram: Dram::new(device.topology, device.timing, device.energy),
            mapping: device.mapping,
            cycle: 0,
            refresh: RefreshState::new(device.timing.t_refi),
            auto_precharge: vec![None; device.topology.banks()],
            last_column: None,
        }
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn dram(&self) -> &Dram {
        &self.dram
    }

    pub fn refresh(&self) -> &RefreshState {
        &self.refresh
    }

    pub fn device(&self) -> DeviceParams {
        DeviceParams {
            topology: self.dram.topology,
            timing: self.dram.timing,
            energy: self.dram.energy,
            mapping: self.mapping,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimEvent {
    Command {
        cycle: u64,
        cmd: Command,
        bank: Option<usize>,
        request: Option<u64>,
    },
    Scheduled {
        cycle: u64,
        request: u64,
        bank: usize,
        row_hit: bool,
        /// Some other schedulable request was a row hit at this moment.
        hit_waiting: bool,
        /// Active transactions after this one was admitted.
        active: usize,
    },
    Response {
        cycle: u64,
        request: u64,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimOptions {
    pub record_events: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub metrics: MetricsSnapshot,
    pub tally: PartitionTally,
    pub elapsed_cycles: u64,
    /// All-bank REF commands issued during the partition.
    pub refreshes: u64,
    pub events: Vec<SimEvent>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("partition has no requests")]
    EmptyPartition,
    #[error("request {index} is out of order (arrival cycle or id decreases)")]
    Unordered { index: usize },
    #[error("invalid controller config: {0}")]
    InvalidConfig(String),
    #[error("controller bug at cycle {cycle}: {source}")]
    Dram {
        cycle: u64,
        #[source]
        source: DramError,
    },
    #[error("simulation stalled at cycle {cycle} with {outstanding} requests outstanding")]
    Stalled { cycle: u64, outstanding: usize },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    id: u64,
    arrival: u64,
    addr: DecodedAddress,
    bank: usize,
    is_write: bool,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    req: Pending,
    activated: bool,
}

#[derive(Debug, Clone, Copy)]
struct InFlight {
    arrival: u64,
    done: Option<u64>,
}

#[derive(Debug, Clone, Copy)]
struct CmdCandidate {
    cmd: Command,
    target: DecodedAddress,
    bank: Option<usize>,
    request: Option<u64>,
    /// Age key: id of the request the command serves (0 for refresh work).
    age: u64,
    /// Fixed priority class for the Simple arbiter.
    class: u8,
    earliest: u64,
}

enum Arbitration {
    Issue(usize),
    WaitUntil(u64),
    Nothing,
}

fn arbitrate(candidates: &[CmdCandidate], arbiter: ArbiterKind, now: u64) -> Arbitration {
    let bank_key = |c: &CmdCandidate| c.bank.unwrap_or(usize::MAX);
    let chosen = match arbiter {
        ArbiterKind::Simple => {
            let legal = candidates
                .iter()
                .enumerate()
                .filter(|(_, c)| c.earliest <= now)
                .min_by_key(|(_, c)| (c.class, bank_key(c), c.age));
            if let Some((i, _)) = legal {
                return Arbitration::Issue(i);
            }
            candidates.iter().enumerate().min_by_key(|(_, c)| c.earliest)
        }
        ArbiterKind::Fifo => candidates.iter().enumerate().min_by_key(|(_, c)| (c.age, c.class, bank_key(c))),
        ArbiterKind::Reorder => candidates.iter().enumerate().min_by_key(|(_, c)| (c.earliest, c.age, bank_key(c))),
    };
    match chosen {
        Some((i, c)) if c.earliest <= now => Arbitration::Issue(i),
        Some((_, c)) => Arbitration::WaitUntil(c.earliest),
        None => Arbitration::Nothing,
    }
}

fn queue_index(buffer: SchedulerBuffer, req: &Pending) -> usize {
    match buffer {
        SchedulerBuffer::Bankwise => req.bank,
        SchedulerBuffer::ReadWrite => usize::from(req.is_write),
        SchedulerBuffer::Shared => 0,
    }
}

/// Executes `requests` under `config`, continuing from `state`.
///
/// Arrival cycles are taken relative to the first request and rebased onto
/// the state's current cycle, so partitions can be replayed in any order.
/// Returns once every request has been answered.
pub fn simulate_partition(
    requests: &[MemoryRequest],
    config: &ControllerConfig,
    state: &mut SimulationState,
    options: SimOptions,
) -> Result<PartitionReport, SimError> {
    if requests.is_empty() {
        return Err(SimError::EmptyPartition);
    }
    if let Some(index) = (1..requests.len()).find(|&i| {
        requests[i].arrival_cycle < requests[i - 1].arrival_cycle || requests[i].id <= requests[i - 1].id
    }) {
        return Err(SimError::Unordered { index });
    }
    let mut problems = Vec::new();
    config.validate("config", &mut problems);
    if !problems.is_empty() {
        return Err(SimError::InvalidConfig(problems.join("; ")));
    }

    let device = state.device();
    let timing = device.timing;
    let banks = device.topology.banks();
    let banks_per_group = device.topology.banks_per_group;
    let queue_count = match config.scheduler_buffer {
        SchedulerBuffer::Bankwise => banks,
        SchedulerBuffer::ReadWrite => 2,
        SchedulerBuffer::Shared => 1,
    };
    let capacity = config.request_buffer_size as usize;
    let max_active = config.max_active_transactions as usize;
    let prefer_reads = config.scheduler_buffer == SchedulerBuffer::ReadWrite;

    let start = state.cycle;
    let base = requests[0].arrival_cycle;
    let ledger_before = *state.dram.ledger();
    let refreshes_before = state.dram.refresh_commands();

    let mut queues: Vec<VecDeque<Pending>> = vec![VecDeque::new(); queue_count];
    let mut slots: Vec<Option<Slot>> = vec![None; banks];
    let mut in_flight: BTreeMap<u64, InFlight> = BTreeMap::new();
    let mut buffered = 0usize;
    let mut next_inject = 0usize;
    let mut refresh_mode = false;
    let mut sched_dirty = true;
    let mut last_return = start;
    let mut tally = PartitionTally::default();
    let mut events = Vec::new();
    let mut candidates: Vec<CmdCandidate> = Vec::with_capacity(banks + 1);
    let mut now = start;

    loop {
        // Responses leave the controller.
        let mut released = Vec::new();
        match config.resp_queue {
            RespQueueKind::Reorder => {
                for (&id, f) in &in_flight {
                    if let Some(done) = f.done.filter(|&d| d <= now) {
                        released.push((id, done));
                    }
                }
            }
            RespQueueKind::Fifo => {
                for (&id, f) in &in_flight {
                    match f.done {
                        Some(done) if done <= now => {
                            last_return = last_return.max(done);
                            released.push((id, last_return));
                        }
                        _ => break,
                    }
                }
            }
        }
        for (id, at) in released {
            let f = in_flight.remove(&id).expect("released request is in flight");
            tally.requests += 1;
            tally.latency_cycles += at - f.arrival;
            sched_dirty = true;
            if options.record_events {
                events.push(SimEvent::Response { cycle: at, request: id });
            }
        }

        // Trace injection, stalled by a full buffer.
        while let Some(r) = requests.get(next_inject) {
            let arrival = start + (r.arrival_cycle - base);
            if arrival > now {
                break;
            }
            let addr = state.mapping.decode(r.address);
            let req = Pending {
                id: r.id,
                arrival,
                addr,
                bank: addr.flat_bank(&device.topology),
                is_write: r.is_write,
            };
            let q = queue_index(config.scheduler_buffer, &req);
            if queues[q].len() >= capacity {
                break;
            }
            queues[q].push_back(req);
            buffered += 1;
            next_inject += 1;
            sched_dirty = true;
        }

        // Refresh.
        let all_done = next_inject == requests.len() && buffered == 0 && in_flight.is_empty();
        if refresh_mode {
            state.refresh.advance(now, timing.t_refi, config.refresh_policy);
        } else {
            match refresh_step(now, &mut state.refresh, config, timing.t_refi, buffered + in_flight.len()) {
                Some(RefreshDecision::Forced) => refresh_mode = true,
                Some(_) if !all_done => refresh_mode = true,
                _ => {}
            }
            sched_dirty |= refresh_mode;
        }
        if all_done && !refresh_mode {
            break;
        }

        // Admit requests into free bank machines.
        if sched_dirty && !refresh_mode {
            sched_dirty = false;
            let mut eligible: Vec<(usize, usize)> = Vec::new();
            let mut cands: Vec<Candidate> = Vec::new();
            while in_flight.len() < max_active {
                eligible.clear();
                cands.clear();
                for (qi, queue) in queues.iter().enumerate() {
                    for (pos, p) in queue.iter().enumerate() {
                        if slots[p.bank].is_some() {
                            continue;
                        }
                        let row_hit = state.auto_precharge[p.bank].is_none()
                            && state.dram.bank(p.bank).open_row() == Some(p.addr.row);
                        eligible.push((qi, pos));
                        cands.push(Candidate {
                            id: p.id,
                            bank_group: p.addr.bank_group,
                            is_write: p.is_write,
                            row_hit,
                        });
                    }
                }
                let Some(pick) = schedule_next(&cands, config.scheduler, prefer_reads, state.last_column.map(|c| c.0))
                else {
                    break;
                };
                let (qi, pos) = eligible[pick];
                let req = queues[qi].remove(pos).expect("eligible entry exists");
                buffered -= 1;
                slots[req.bank] = Some(Slot { req, activated: false });
                in_flight.insert(req.id, InFlight { arrival: req.arrival, done: None });
                assert!(in_flight.len() <= max_active, "active transactions exceed the limit");
                if options.record_events {
                    events.push(SimEvent::Scheduled {
                        cycle: now,
                        request: req.id,
                        bank: req.bank,
                        row_hit: cands[pick].row_hit,
                        hit_waiting: cands.iter().any(|c| c.row_hit),
                        active: in_flight.len(),
                    });
                }
            }
        }

        // Every bank machine offers at most one command.
        candidates.clear();
        let mut any_open = false;
        #[allow(clippy::needless_range_loop)]
        for b in 0..banks {
            let open = state.dram.bank(b).open_row();
            if open.is_none() {
                state.auto_precharge[b] = None;
            }
            any_open |= open.is_some();
            let bank_addr = DecodedAddress {
                bank_group: b as u32 / banks_per_group,
                bank: b as u32 % banks_per_group,
                row: open.unwrap_or(0),
                column: 0,
            };
            let offer = if refresh_mode {
                open.map(|_| (Command::Precharge, bank_addr, None, 0, 0))
            } else if let Some(trigger) = state.auto_precharge[b] {
                Some((Command::Precharge, bank_addr, None, trigger, 0))
            } else if let Some(slot) = &slots[b] {
                let target = slot.req.addr;
                let cmd = match open {
                    Some(row) if row == target.row => {
                        if slot.req.is_write {
                            Command::Write
                        } else {
                            Command::Read
                        }
                    }
                    Some(_) => Command::Precharge,
                    None => Command::Activate,
                };
                let target = if cmd == Command::Precharge { bank_addr } else { target };
                Some((cmd, target, Some(slot.req.id), slot.req.id, 1 + u8::from(slot.req.is_write)))
            } else {
                None
            };
            if let Some((cmd, target, request, age, class)) = offer {
                let earliest = state
                    .dram
                    .earliest_issue_cycle(cmd, &target)
                    .map_err(|source| SimError::Dram { cycle: now, source })?;
                candidates.push(CmdCandidate { cmd, target, bank: Some(b), request, age, class, earliest });
            }
        }
        if refresh_mode && !any_open {
            let target = DecodedAddress { bank_group: 0, bank: 0, row: 0, column: 0 };
            let earliest = state
                .dram
                .earliest_issue_cycle(Command::Refresh, &target)
                .map_err(|source| SimError::Dram { cycle: now, source })?;
            candidates.push(CmdCandidate {
                cmd: Command::Refresh,
                target,
                bank: None,
                request: None,
                age: 0,
                class: 0,
                earliest,
            });
        }

        let wait_until = match arbitrate(&candidates, config.arbiter, now) {
            Arbitration::Issue(i) => {
                let c = candidates[i];
                state
                    .dram
                    .issue(c.cmd, &c.target, now)
                    .map_err(|source| SimError::Dram { cycle: now, source })?;
                sched_dirty = true;
                if options.record_events {
                    events.push(SimEvent::Command { cycle: now, cmd: c.cmd, bank: c.bank, request: c.request });
                }
                match c.cmd {
                    Command::Activate => {
                        if let Some(slot) = c.bank.and_then(|b| slots[b].as_mut()) {
                            slot.activated = true;
                        }
                    }
                    Command::Read | Command::Write => {
                        let b = c.bank.expect("column command targets a bank");
                        let slot = slots[b].take().expect("column command serves a slot");
                        if slot.activated {
                            tally.row_misses += 1;
                        } else {
                            tally.row_hits += 1;
                        }
                        let here = (c.target.bank_group, c.target.bank);
                        match state.last_column {
                            Some((bg, _)) if bg != here.0 => tally.bank_group_switches += 1,
                            Some((_, bank)) if bank != here.1 => tally.bank_switches += 1,
                            _ => {}
                        }
                        state.last_column = Some(here);
                        if let Some(f) = in_flight.get_mut(&slot.req.id) {
                            f.done = Some(now + timing.data_done());
                        }
                        let pending_rows = queues.iter().flatten().filter(|p| p.bank == b).map(|p| p.addr.row);
                        if apply_page_policy(config.page_policy, c.target.row, pending_rows) == PageAction::Precharge {
                            state.auto_precharge[b] = Some(slot.req.id);
                        }
                    }
                    Command::Precharge => {
                        if let Some(b) = c.bank {
                            state.auto_precharge[b] = None;
                        }
                    }
                    Command::Refresh => {
                        state.refresh.on_refresh_issued();
                        refresh_mode = false;
                    }
                }
                now += 1;
                continue;
            }
            Arbitration::WaitUntil(cycle) => Some(cycle),
            Arbitration::Nothing => None,
        };

        // Nothing issued: jump to the next cycle where something can change.
        let mut next = wait_until.unwrap_or(u64::MAX);
        if let Some(r) = requests.get(next_inject) {
            let arrival = start + (r.arrival_cycle - base);
            if arrival > now {
                next = next.min(arrival);
            }
        }
        for f in in_flight.values() {
            if let Some(done) = f.done.filter(|&d| d > now) {
                next = next.min(done);
            }
        }
        if config.refresh_policy == RefreshPolicy::AllBank {
            next = next.min(state.refresh.next_due());
        }
        if next == u64::MAX || next <= now {
            return Err(SimError::Stalled { cycle: now, outstanding: buffered + in_flight.len() });
        }
        now = next;
    }

    state.cycle = now;
    tally.commands = state.dram.ledger().since(&ledger_before);
    let elapsed_cycles = now - start;
    let metrics = compute_metrics(&tally, elapsed_cycles, &device)?;
    Ok(PartitionReport {
        metrics,
        tally,
        elapsed_cycles,
        refreshes: state.dram.refresh_commands() - refreshes_before,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::config::{PagePolicy, SchedulerKind};

    fn read(id: u64, cycle: u64, address: u64) -> MemoryRequest {
        MemoryRequest { id, arrival_cycle: cycle, is_write: false, address }
    }

    fn run(requests: &[MemoryRequest], config: ControllerConfig) -> PartitionReport {
        let mut state = SimulationState::new(&DeviceParams::default());
        simulate_partition(requests, &config, &mut state, SimOptions { record_events: true }).unwrap()
    }

    fn with_policy(page_policy: PagePolicy) -> ControllerConfig {
        ControllerConfig { page_policy, ..ControllerConfig::default() }
    }

    #[test]
    fn same_row_reads_open_vs_closed() {
        let reqs = [read(0, 0, 0x0), read(1, 4, 0x400)];
        let open = run(&reqs, with_policy(PagePolicy::Open));
        assert_eq!((open.tally.row_hits, open.tally.row_misses), (1, 1));
        let closed = run(&reqs, with_policy(PagePolicy::Closed));
        assert_eq!((closed.tally.row_hits, closed.tally.row_misses), (0, 2));
    }

    #[test]
    fn bank_group_switch_is_counted() {
        let reqs = [read(0, 0, 0x0), read(1, 0, 0x40)];
        let r = run(&reqs, ControllerConfig::default());
        assert_eq!(r.metrics.bank_group_switches, 1);
        assert_eq!(r.metrics.bank_switches, 0);
        let reqs = [read(0, 0, 0x0), read(1, 0, 0x100)];
        let r = run(&reqs, ControllerConfig::default());
        assert_eq!((r.metrics.bank_group_switches, r.metrics.bank_switches), (0, 1));
    }

    #[test]
    fn single_read_timeline() {
        let r = run(&[read(0, 0, 0x0)], ControllerConfig::default());
        let t = crate::dram::TimingParams::default();
        // ACT at 0, RD at tRCD, data done tCL + tBURST later
        let expected = t.t_rcd + t.t_cl + t.t_burst;
        assert_eq!(r.tally.latency_cycles, expected);
        assert_eq!(r.elapsed_cycles, expected);
        assert_eq!(r.metrics.avg_latency_ps, expected as f64 * 1250.0);
        let cmds: Vec<_> = r
            .events
            .iter()
            .filter_map(|e| match e {
                SimEvent::Command { cycle, cmd, .. } => Some((*cycle, *cmd)),
                _ => None,
            })
            .collect();
        assert_eq!(cmds, vec![(0, Command::Activate), (16, Command::Read)]);
    }

    #[test]
    fn fifo_response_queue_holds_back_younger_responses() {
        // req 0 misses in bank 0 (row 1 after row 0 open); req 1 hits quickly elsewhere
        let reqs = [read(0, 0, 0x0), read(1, 0, 0x20000), read(2, 1, 0x40)];
        let cfg = ControllerConfig { page_policy: PagePolicy::Open, ..ControllerConfig::default() };
        let fifo = run(&reqs, cfg);
        let reorder = run(&reqs, ControllerConfig { resp_queue: RespQueueKind::Reorder, ..cfg });
        let order = |r: &PartitionReport| -> Vec<u64> {
            r.events
                .iter()
                .filter_map(|e| match e {
                    SimEvent::Response { request, .. } => Some(*request),
                    _ => None,
                })
                .collect()
        };
        assert_eq!(order(&fifo), vec![0, 1, 2]);
        assert_eq!(order(&reorder), vec![0, 2, 1]);
        assert!(fifo.tally.latency_cycles > reorder.tally.latency_cycles);
    }

    #[test]
    fn max_active_one_serialises() {
        let reqs: Vec<_> = (0..8).map(|i| read(i, 0, i * 0x40)).collect();
        let wide = run(&reqs, ControllerConfig::default());
        let narrow = run(&reqs, ControllerConfig { max_active_transactions: 1, ..ControllerConfig::default() });
        assert!(narrow.elapsed_cycles > wide.elapsed_cycles);
        for e in &narrow.events {
            if let SimEvent::Scheduled { active, .. } = e {
                assert!(*active <= 1);
            }
        }
    }

    #[test]
    fn small_buffer_backpressure_keeps_every_request() {
        let reqs: Vec<_> = (0..64).map(|i| read(i, 0, (i % 4) * 0x20000)).collect();
        let cfg = ControllerConfig {
            request_buffer_size: 1,
            scheduler_buffer: SchedulerBuffer::Shared,
            ..ControllerConfig::default()
        };
        let r = run(&reqs, cfg);
        assert_eq!(r.tally.requests, 64);
    }

    #[test]
    fn frfcfs_reorders_hits_ahead() {
        // bank 0: row 0 opened by req 0, then a miss (row 1) and a hit (row 0) wait.
        let reqs = [read(0, 0, 0x0), read(1, 1, 0x20000), read(2, 2, 0x400)];
        let cfg = ControllerConfig {
            page_policy: PagePolicy::Open,
            scheduler: SchedulerKind::FrFcfs,
            scheduler_buffer: SchedulerBuffer::Shared,
            ..ControllerConfig::default()
        };
        let r = run(&reqs, cfg);
        let order: Vec<u64> = r
            .events
            .iter()
            .filter_map(|e| match e {
                SimEvent::Scheduled { request, .. } => Some(*request),
                _ => None,
            })
            .collect();
        assert_eq!(order, vec![0, 2, 1]);
        let fifo = run(&reqs, ControllerConfig { scheduler: SchedulerKind::Fifo, ..cfg });
        assert!(fifo.tally.row_hits < r.tally.row_hits);
    }

    #[test]
    fn rejects_bad_partitions() {
        let mut state = SimulationState::new(&DeviceParams::default());
        let cfg = ControllerConfig::default();
        assert!(matches!(
            simulate_partition(&[], &cfg, &mut state, SimOptions::default()),
            Err(SimError::EmptyPartition)
        ));
        let reqs = [read(0, 5, 0), read(1, 3, 0)];
        assert!(matches!(
            simulate_partition(&reqs, &cfg, &mut state, SimOptions::default()),
            Err(SimError::Unordered { index: 1 })
        ));
        let bad = ControllerConfig { request_buffer_size: 3, ..cfg };
        assert!(matches!(
            simulate_partition(&[read(0, 0, 0)], &bad, &mut state, SimOptions::default()),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn state_carries_over_between_partitions() {
        let mut state = SimulationState::new(&DeviceParams::default());
        let cfg = with_policy(PagePolicy::Open);
        let first = simulate_partition(&[read(0, 0, 0x0)], &cfg, &mut state, SimOptions::default()).unwrap();
        assert_eq!(state.cycle(), first.elapsed_cycles);
        // the row left open by partition one is a hit in partition two
        let second = simulate_partition(&[read(1, 100, 0x400)], &cfg, &mut state, SimOptions::default()).unwrap();
        assert_eq!(second.tally.row_hits, 1);
    }
}
