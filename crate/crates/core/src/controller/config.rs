//! The joint action vector: one value per tunable controller parameter.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of tunable parameters (and therefore agents).
pub const PARAMETER_COUNT: usize = 10;

/// Domain size of each parameter, in [`ControllerConfig::to_indices`] order.
pub const ARITIES: [usize; PARAMETER_COUNT] = [4, 3, 3, 3, 2, 2, 8, 8, 8, 8];

pub const PARAMETER_NAMES: [&str; PARAMETER_COUNT] = [
    "page_policy",
    "scheduler",
    "scheduler_buffer",
    "arbiter",
    "resp_queue",
    "refresh_policy",
    "refresh_max_postponed",
    "refresh_max_pulledin",
    "request_buffer_size",
    "max_active_transactions",
];

macro_rules! domain_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn index(self) -> usize {
                Self::ALL.iter().position(|&v| v == self).unwrap()
            }

            pub fn from_index(index: usize) -> Option<Self> {
                Self::ALL.get(index).copied()
            }

            pub fn label(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
    };
}

domain_enum!(PagePolicy {
    Open => "Open",
    OpenAdaptive => "OpenAdaptive",
    Closed => "Closed",
    ClosedAdaptive => "ClosedAdaptive",
});

domain_enum!(SchedulerKind {
    Fifo => "FIFO",
    FrFcfs => "FR-FCFS",
    FrFcfsGrp => "FR-FCFS-Grp",
});

domain_enum!(SchedulerBuffer {
    Bankwise => "Bankwise",
    ReadWrite => "ReadWrite",
    Shared => "Shared",
});

domain_enum!(ArbiterKind {
    Simple => "Simple",
    Fifo => "FIFO",
    Reorder => "Reorder",
});

domain_enum!(RespQueueKind {
    Fifo => "FIFO",
    Reorder => "Reorder",
});

domain_enum!(RefreshPolicy {
    NoRefresh => "NoRefresh",
    AllBank => "AllBank",
});

/// Upper bound of the refresh postpone / pull-in domains.
pub const MAX_REFRESH_WINDOW: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    pub page_policy: PagePolicy,
    pub scheduler: SchedulerKind,
    pub scheduler_buffer: SchedulerBuffer,
    pub arbiter: ArbiterKind,
    pub resp_queue: RespQueueKind,
    pub refresh_policy: RefreshPolicy,
    pub refresh_max_postponed: u8,
    pub refresh_max_pulledin: u8,
    /// One of 1, 2, 4, ..., 128.
    pub request_buffer_size: u32,
    /// One of 1, 2, 4, ..., 128.
    pub max_active_transactions: u32,
}

impl Default for ControllerConfig {
    /// The baseline controller. The refresh windows are the top of the 0..=7 domain.
    fn default() -> Self {
        Self {
            page_policy: PagePolicy::OpenAdaptive,
            scheduler: SchedulerKind::FrFcfs,
            scheduler_buffer: SchedulerBuffer::Bankwise,
            arbiter: ArbiterKind::Reorder,
            resp_queue: RespQueueKind::Fifo,
            refresh_policy: RefreshPolicy::AllBank,
            refresh_max_postponed: MAX_REFRESH_WINDOW,
            refresh_max_pulledin: MAX_REFRESH_WINDOW,
            request_buffer_size: 8,
            max_active_transactions: 128,
        }
    }
}

fn pow2_index(value: u32) -> Option<usize> {
    (value.is_power_of_two() && value <= 128).then(|| value.trailing_zeros() as usize)
}

impl ControllerConfig {
    pub fn validate(&self, section: &str, errors: &mut Vec<String>) {
        if self.refresh_max_postponed > MAX_REFRESH_WINDOW {
            errors.push(format!("{section}.refresh_max_postponed: must be in 0..=7"));
        }
        if self.refresh_max_pulledin > MAX_REFRESH_WINDOW {
            errors.push(format!("{section}.refresh_max_pulledin: must be in 0..=7"));
        }
        if pow2_index(self.request_buffer_size).is_none() {
            errors.push(format!("{section}.request_buffer_size: must be one of 1, 2, 4, ..., 128"));
        }
        if pow2_index(self.max_active_transactions).is_none() {
            errors.push(format!("{section}.max_active_transactions: must be 2^x for x in 0..=7"));
        }
    }

    pub fn is_valid(&self) -> bool {
        let mut errors = Vec::new();
        self.validate("config", &mut errors);
        errors.is_empty()
    }

    /// Action index of every parameter.
    ///
    /// # Panics
    /// If the config is outside its domain.
    pub fn to_indices(&self) -> [usize; PARAMETER_COUNT] {
        assert!(self.is_valid(), "controller config outside its domain: {self:?}");
        [
            self.page_policy.index(),
            self.scheduler.index(),
            self.scheduler_buffer.index(),
            self.arbiter.index(),
            self.resp_queue.index(),
            self.refresh_policy.index(),
            self.refresh_max_postponed as usize,
            self.refresh_max_pulledin as usize,
            pow2_index(self.request_buffer_size).unwrap(),
            pow2_index(self.max_active_transactions).unwrap(),
        ]
    }

    pub fn from_indices(indices: &[usize; PARAMETER_COUNT]) -> Option<Self> {
        if indices.iter().zip(ARITIES).any(|(&i, arity)| i >= arity) {
            return None;
        }
        Some(Self {
            page_policy: PagePolicy::from_index(indices[0])?,
            scheduler: SchedulerKind::from_index(indices[1])?,
            scheduler_buffer: SchedulerBuffer::from_index(indices[2])?,
            arbiter: ArbiterKind::from_index(indices[3])?,
            resp_queue: RespQueueKind::from_index(indices[4])?,
            refresh_policy: RefreshPolicy::from_index(indices[5])?,
            refresh_max_postponed: indices[6] as u8,
            refresh_max_pulledin: indices[7] as u8,
            request_buffer_size: 1 << indices[8],
            max_active_transactions: 1 << indices[9],
        })
    }

    /// Human-readable value of action `index` of parameter `parameter`.
    pub fn value_label(parameter: usize, index: usize) -> String {
        match parameter {
            0 => PagePolicy::from_index(index).map(|v| v.label().to_string()),
            1 => SchedulerKind::from_index(index).map(|v| v.label().to_string()),
            2 => SchedulerBuffer::from_index(index).map(|v| v.label().to_string()),
            3 => ArbiterKind::from_index(index).map(|v| v.label().to_string()),
            4 => RespQueueKind::from_index(index).map(|v| v.label().to_string()),
            5 => RefreshPolicy::from_index(index).map(|v| v.label().to_string()),
            6 | 7 if index < 8 => Some(index.to_string()),
            8 | 9 if index < 8 => Some((1u32 << index).to_string()),
            _ => None,
        }
        .unwrap_or_else(|| format!("#{index}"))
    }
}
