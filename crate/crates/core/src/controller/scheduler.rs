//! Request selection: which buffered request a free bank machine takes next.

use super::config::SchedulerKind;

/// A buffered request as the scheduler sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    /// Arrival sequence number; lower is older.
    pub id: u64,
    pub bank_group: u32,
    pub is_write: bool,
    /// The target row is open in the target bank and will stay open.
    pub row_hit: bool,
}

/// Picks the index of the next request to serve, or `None` for an empty buffer.
///
/// - FIFO: oldest request.
/// - FR-FCFS: oldest row hit, else oldest.
/// - FR-FCFS-Grp: FR-FCFS, but within each hit class requests to the bank group
///   of the last column command go first.
///
/// `prefer_reads` (ReadWrite buffers) ranks reads ahead of writes after row-hit
/// status and before everything else, so first-ready precedence is never broken.
pub fn schedule_next(
    candidates: &[Candidate],
    policy: SchedulerKind,
    prefer_reads: bool,
    last_bank_group: Option<u32>,
) -> Option<usize> {
    let key = |c: &Candidate| {
        let miss = match policy {
            SchedulerKind::Fifo => false,
            SchedulerKind::FrFcfs | SchedulerKind::FrFcfsGrp => !c.row_hit,
        };
        let write_penalty = prefer_reads && c.is_write;
        let group_switch = policy == SchedulerKind::FrFcfsGrp && last_bank_group.is_some_and(|bg| bg != c.bank_group);
        (miss, write_penalty, group_switch, c.id)
    };
    candidates
        .iter()
        .enumerate()
        .min_by_key(|(_, c)| key(c))
        .map(|(i, _)| i)
}
