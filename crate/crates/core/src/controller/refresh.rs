//! All-bank refresh bookkeeping with bounded postponement and pull-in.

use serde::{Deserialize, Serialize};

use super::config::{ControllerConfig, RefreshPolicy};

/// Outstanding refresh obligations.
///
/// One refresh falls due every tREFI. A due refresh either consumes a pulled-in
/// credit or adds to `owed`. Issuing a refresh pays off one owed refresh, or
/// banks a credit when nothing is owed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefreshState {
    next_due: u64,
    pub owed: u32,
    pub credit: u32,
    pub dues: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefreshDecision {
    /// The postponement window is exhausted.
    Forced,
    /// A refresh is owed and the controller is idle.
    Due,
    /// Nothing is owed; the idle controller refreshes ahead of time.
    PullIn,
}

impl RefreshState {
    pub fn new(t_refi: u64) -> Self {
        Self { next_due: t_refi, owed: 0, credit: 0, dues: 0 }
    }

    pub fn next_due(&self) -> u64 {
        self.next_due
    }

    /// Books every refresh that fell due at or before `now`.
    pub fn advance(&mut self, now: u64, t_refi: u64, policy: RefreshPolicy) {
        while self.next_due <= now {
            self.next_due += t_refi;
            if policy == RefreshPolicy::NoRefresh {
                continue;
            }
            self.dues += 1;
            if self.credit > 0 {
                self.credit -= 1;
            } else {
                self.owed += 1;
            }
        }
        if policy == RefreshPolicy::NoRefresh {
            self.owed = 0;
            self.credit = 0;
        }
    }

    pub fn on_refresh_issued(&mut self) {
        if self.owed > 0 {
            self.owed -= 1;
        } else {
            self.credit += 1;
        }
    }
}

/// Books refreshes due by `now` and decides whether to start one.
///
/// `occupancy` counts buffered plus in-flight requests; zero means idle.
pub fn refresh_step(
    now: u64,
    state: &mut RefreshState,
    config: &ControllerConfig,
    t_refi: u64,
    occupancy: usize,
) -> Option<RefreshDecision> {
    state.advance(now, t_refi, config.refresh_policy);
    if config.refresh_policy == RefreshPolicy::NoRefresh {
        return None;
    }
    let idle = occupancy == 0;
    if state.owed > u32::from(config.refresh_max_postponed) {
        Some(RefreshDecision::Forced)
    } else if state.owed > 0 && idle {
        Some(RefreshDecision::Due)
    } else if state.owed == 0 && idle && state.credit < u32::from(config.refresh_max_pulledin) {
        Some(RefreshDecision::PullIn)
    } else {
        None
    }
}
