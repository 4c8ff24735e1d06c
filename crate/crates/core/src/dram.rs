//! Single-channel, single-rank DDR4-style device model.
//!
//! Holds the topology and address mapping, one state machine per bank, the
//! command timing rules and a per-command energy ledger. The timing model is
//! deliberately small: per-bank ACT/PRE/RD/WR/REF spacing plus the rank-level
//! tRRD and tCCD constraints and data-bus occupancy. No tFAW, no bus
//! turnaround.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bytes moved by one column access (one trace record).
pub const ACCESS_BYTES: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DramTopology {
    pub channels: u32,
    pub ranks: u32,
    pub bank_groups: u32,
    pub banks_per_group: u32,
    pub rows: u32,
    pub columns: u32,
    pub column_width_bytes: u32,
    pub burst_length: u32,
}

impl Default for DramTopology {
    fn default() -> Self {
        Self {
            channels: 1,
            ranks: 1,
            bank_groups: 4,
            banks_per_group: 4,
            rows: 32768,
            columns: 1024,
            column_width_bytes: 8,
            burst_length: 8,
        }
    }
}

impl DramTopology {
    pub fn banks(&self) -> usize {
        (self.bank_groups * self.banks_per_group) as usize
    }

    /// Bytes delivered by one burst.
    pub fn burst_bytes(&self) -> u64 {
        u64::from(self.column_width_bytes) * u64::from(self.burst_length)
    }

    /// Number of 64-byte lines in one row.
    pub fn lines_per_row(&self) -> u32 {
        ((u64::from(self.columns) * u64::from(self.column_width_bytes)) / ACCESS_BYTES) as u32
    }

    pub fn validate(&self, errors: &mut Vec<String>) {
        let fields = [
            ("channels", self.channels),
            ("ranks", self.ranks),
            ("bank_groups", self.bank_groups),
            ("banks_per_group", self.banks_per_group),
            ("rows", self.rows),
            ("columns", self.columns),
            ("column_width_bytes", self.column_width_bytes),
            ("burst_length", self.burst_length),
        ];
        for (name, value) in fields {
            if value == 0 {
                errors.push(format!("topology.{name}: must be at least 1"));
            }
        }
        if self.channels != 1 {
            errors.push("topology.channels: only a single channel is modelled".into());
        }
        if self.ranks != 1 {
            errors.push("topology.ranks: only a single rank is modelled".into());
        }
        if u64::from(self.bank_groups) * u64::from(self.banks_per_group) > 64 {
            errors.push("topology: bank_groups * banks_per_group must not exceed 64".into());
        }
        for (name, value) in [("rows", self.rows), ("columns", self.columns)] {
            if value != 0 && !value.is_power_of_two() {
                errors.push(format!("topology.{name}: must be a power of two"));
            }
        }
        if self.column_width_bytes != 0 && self.burst_length != 0 && self.burst_bytes() != ACCESS_BYTES {
            errors.push(format!(
                "topology: column_width_bytes * burst_length must equal the {ACCESS_BYTES}-byte access size"
            ));
        }
        if self.columns != 0 && self.column_width_bytes != 0 && self.lines_per_row() == 0 {
            errors.push("topology: a row must hold at least one 64-byte line".into());
        }
    }
}

/// All values in controller clock cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingParams {
    pub t_rcd: u64,
    pub t_rp: u64,
    pub t_cl: u64,
    pub t_ras: u64,
    pub t_wr: u64,
    pub t_rtp: u64,
    pub t_ccd_s: u64,
    pub t_ccd_l: u64,
    pub t_rrd_s: u64,
    pub t_rrd_l: u64,
    pub t_refi: u64,
    pub t_rfc: u64,
    pub t_burst: u64,
}

impl Default for TimingParams {
    /// Representative DDR4-1600 values. Not normative.
    fn default() -> Self {
        Self {
            t_rcd: 16,
            t_rp: 16,
            t_cl: 16,
            t_ras: 39,
            t_wr: 18,
            t_rtp: 9,
            t_ccd_s: 4,
            t_ccd_l: 6,
            t_rrd_s: 4,
            t_rrd_l: 6,
            t_refi: 9360,
            t_rfc: 420,
            t_burst: 4,
        }
    }
}

impl TimingParams {
    pub fn validate(&self, errors: &mut Vec<String>) {
        let fields = [
            ("t_rcd", self.t_rcd),
            ("t_rp", self.t_rp),
            ("t_cl", self.t_cl),
            ("t_ras", self.t_ras),
            ("t_wr", self.t_wr),
            ("t_rtp", self.t_rtp),
            ("t_ccd_s", self.t_ccd_s),
            ("t_ccd_l", self.t_ccd_l),
            ("t_rrd_s", self.t_rrd_s),
            ("t_rrd_l", self.t_rrd_l),
            ("t_refi", self.t_refi),
            ("t_rfc", self.t_rfc),
            ("t_burst", self.t_burst),
        ];
        for (name, value) in fields {
            if value == 0 {
                errors.push(format!("timing.{name}: must be greater than 0"));
            }
        }
        if self.t_ras < self.t_rcd {
            errors.push("timing.t_ras: must be >= t_rcd".into());
        }
        if self.t_ccd_l < self.t_ccd_s {
            errors.push("timing.t_ccd_l: must be >= t_ccd_s".into());
        }
        if self.t_rrd_l < self.t_rrd_s {
            errors.push("timing.t_rrd_l: must be >= t_rrd_s".into());
        }
        // A refresh that outlasts its own interval can never keep up.
        if self.t_rfc >= self.t_refi {
            errors.push("timing.t_rfc: must be < t_refi".into());
        }
    }

    /// Cycles from a column command until its data burst has finished.
    pub fn data_done(&self) -> u64 {
        self.t_cl + self.t_burst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyParams {
    pub e_act_pj: f64,
    pub e_pre_pj: f64,
    pub e_rd_pj: f64,
    pub e_wr_pj: f64,
    pub e_ref_per_bank_pj: f64,
    pub p_background_mw: f64,
    pub clock_period_ps: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            e_act_pj: 909.0,
            e_pre_pj: 909.0,
            e_rd_pj: 940.0,
            e_wr_pj: 1020.0,
            e_ref_per_bank_pj: 2300.0,
            p_background_mw: 120.0,
            // 800 MHz controller clock, 1600 MT/s on the data bus.
            clock_period_ps: 1250.0,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self, errors: &mut Vec<String>) {
        let fields = [
            ("e_act_pj", self.e_act_pj),
            ("e_pre_pj", self.e_pre_pj),
            ("e_rd_pj", self.e_rd_pj),
            ("e_wr_pj", self.e_wr_pj),
            ("e_ref_per_bank_pj", self.e_ref_per_bank_pj),
            ("p_background_mw", self.p_background_mw),
            ("clock_period_ps", self.clock_period_ps),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                errors.push(format!("energy.{name}: must be finite and >= 0"));
            }
        }
        if self.clock_period_ps == 0.0 {
            errors.push("energy.clock_period_ps: must be greater than 0".into());
        }
    }

    /// Energy of one command on one bank.
    pub fn command_energy(&self, cmd: Command) -> f64 {
        match cmd {
            Command::Activate => self.e_act_pj,
            Command::Precharge => self.e_pre_pj,
            Command::Read => self.e_rd_pj,
            Command::Write => self.e_wr_pj,
            Command::Refresh => self.e_ref_per_bank_pj,
        }
    }
}

/// Background energy in picojoules for `elapsed_cycles` cycles.
///
/// 1 mW x 1 ps = 1e-15 J = 1e-3 pJ, so the result is
/// `p_background_mw * clock_period_ps * elapsed_cycles * 1e-3`.
pub fn background_energy(elapsed_cycles: u64, energy: &EnergyParams) -> f64 {
    const MW_PS_TO_PJ: f64 = 1e-3;
    energy.p_background_mw * energy.clock_period_ps * elapsed_cycles as f64 * MW_PS_TO_PJ
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecodedAddress {
    pub bank_group: u32,
    pub bank: u32,
    pub row: u32,
    pub column: u32,
}

impl DecodedAddress {
    /// Flat bank index in `0..topology.banks()`.
    pub fn flat_bank(&self, topology: &DramTopology) -> usize {
        (self.bank_group * topology.banks_per_group + self.bank) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BitField {
    pub shift: u32,
    pub width: u32,
}

impl BitField {
    fn mask(&self) -> u64 {
        if self.width >= 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    fn extract(&self, addr: u64) -> u32 {
        ((addr >> self.shift) & self.mask()) as u32
    }

    fn insert(&self, value: u32) -> u64 {
        (u64::from(value) & self.mask()) << self.shift
    }

    /// The address bits this field occupies.
    pub fn bits(&self) -> u64 {
        self.mask() << self.shift
    }
}

/// Bit-slice address mapping. Each field is `width` bits starting at `shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddressMapping {
    pub bank_group: BitField,
    pub bank: BitField,
    pub column: BitField,
    pub row: BitField,
}

impl AddressMapping {
    /// Default layout, low to high: byte offset, bank group, bank, column line, row.
    /// For the default topology that is [5:0], [7:6], [9:8], [16:10], [31:17].
    pub fn for_topology(topology: &DramTopology) -> Self {
        let offset = ACCESS_BYTES.trailing_zeros();
        let bg = BitField { shift: offset, width: log2(topology.bank_groups) };
        let bank = BitField { shift: bg.shift + bg.width, width: log2(topology.banks_per_group) };
        let column = BitField { shift: bank.shift + bank.width, width: log2(topology.lines_per_row()) };
        let row = BitField { shift: column.shift + column.width, width: log2(topology.rows) };
        Self { bank_group: bg, bank, column, row }
    }

    pub fn validate(&self, topology: &DramTopology, errors: &mut Vec<String>) {
        let fields = [
            ("bank_group", self.bank_group, topology.bank_groups),
            ("bank", self.bank, topology.banks_per_group),
            ("column", self.column, topology.lines_per_row()),
            ("row", self.row, topology.rows),
        ];
        let offset_bits = ACCESS_BYTES - 1;
        let mut used = 0u64;
        for (name, field, bound) in fields {
            if !bound.is_power_of_two() || field.width != bound.trailing_zeros() {
                errors.push(format!(
                    "mapping.{name}: width {} does not address exactly {bound} values",
                    field.width
                ));
            }
            if field.shift + field.width > 64 {
                errors.push(format!("mapping.{name}: bits exceed 64-bit addresses"));
                continue;
            }
            let bits = if field.width == 0 { 0 } else { field.bits() };
            if bits & offset_bits != 0 {
                errors.push(format!("mapping.{name}: overlaps the 64-byte line offset"));
            }
            if bits & used != 0 {
                errors.push(format!("mapping.{name}: overlaps another field"));
            }
            used |= bits;
        }
    }

    pub fn decode(&self, addr: u64) -> DecodedAddress {
        DecodedAddress {
            bank_group: self.bank_group.extract(addr),
            bank: self.bank.extract(addr),
            row: self.row.extract(addr),
            column: self.column.extract(addr),
        }
    }

    /// Inverse of [`decode`](Self::decode) on the consumed bits.
    pub fn encode(&self, decoded: &DecodedAddress) -> u64 {
        self.bank_group.insert(decoded.bank_group)
            | self.bank.insert(decoded.bank)
            | self.column.insert(decoded.column)
            | self.row.insert(decoded.row)
    }

    /// Union of all address bits the mapping reads.
    pub fn consumed_bits(&self) -> u64 {
        [self.bank_group, self.bank, self.column, self.row]
            .iter()
            .filter(|f| f.width > 0)
            .fold(0, |acc, f| acc | f.bits())
    }
}

fn log2(value: u32) -> u32 {
    if value <= 1 {
        0
    } else {
        value.next_power_of_two().trailing_zeros()
    }
}

/// Decodes with the default layout for `topology`.
pub fn decode_address(addr: u64, topology: &DramTopology) -> DecodedAddress {
    AddressMapping::for_topology(topology).decode(addr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Command {
    Activate,
    Precharge,
    Read,
    Write,
    Refresh,
}

impl Command {
    pub const ALL: [Command; 5] =
        [Command::Activate, Command::Precharge, Command::Read, Command::Write, Command::Refresh];

    pub fn mnemonic(self) -> &'static str {
        match self {
            Command::Activate => "ACT",
            Command::Precharge => "PRE",
            Command::Read => "RD",
            Command::Write => "WR",
            Command::Refresh => "REF",
        }
    }

    pub fn is_column(self) -> bool {
        matches!(self, Command::Read | Command::Write)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BankStatus {
    Idle,
    Active { row: u32 },
    Refreshing { until: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankState {
    pub status: BankStatus,
    pub last_activate: Option<u64>,
    pub last_precharge: Option<u64>,
    pub last_read: Option<u64>,
    pub last_write: Option<u64>,
}

impl Default for BankState {
    fn default() -> Self {
        Self {
            status: BankStatus::Idle,
            last_activate: None,
            last_precharge: None,
            last_read: None,
            last_write: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DramError {
    #[error("{cmd} is not legal while the bank is {status:?}")]
    Sequencing { cmd: Command, status: BankStatus },
    #[error("{cmd} targets row {requested} but row {open} is open")]
    RowMismatch { cmd: Command, requested: u32, open: u32 },
    #[error("{cmd} issued at cycle {cycle} but the earliest legal cycle is {earliest}")]
    TimingViolation { cmd: Command, cycle: u64, earliest: u64 },
}

fn after(stamp: Option<u64>, gap: u64) -> u64 {
    stamp.map_or(0, |c| c + gap)
}

impl BankState {
    /// Open row, if the bank is active.
    pub fn open_row(&self) -> Option<u32> {
        match self.status {
            BankStatus::Active { row } => Some(row),
            _ => None,
        }
    }

    /// Earliest cycle at which `cmd` to `row` satisfies this bank's timing.
    pub fn earliest_issue_cycle(&self, cmd: Command, row: u32, timing: &TimingParams) -> Result<u64, DramError> {
        let sequencing = || DramError::Sequencing { cmd, status: self.status };
        match (cmd, self.status) {
            (Command::Activate | Command::Refresh, BankStatus::Idle) => Ok(after(self.last_precharge, timing.t_rp)),
            (Command::Activate | Command::Refresh, BankStatus::Refreshing { until }) => {
                Ok(until.max(after(self.last_precharge, timing.t_rp)))
            }
            (Command::Precharge, BankStatus::Active { .. }) => Ok(after(self.last_activate, timing.t_ras)
                .max(after(self.last_read, timing.t_rtp))
                .max(after(self.last_write, timing.t_burst + timing.t_wr))),
            (Command::Read | Command::Write, BankStatus::Active { row: open }) => {
                if open != row {
                    return Err(DramError::RowMismatch { cmd, requested: row, open });
                }
                let ccd = timing.t_ccd_l.max(timing.t_burst);
                Ok(after(self.last_activate, timing.t_rcd)
                    .max(after(self.last_read, ccd))
                    .max(after(self.last_write, ccd)))
            }
            _ => Err(sequencing()),
        }
    }

    fn transition(&mut self, cmd: Command, row: u32, cycle: u64, timing: &TimingParams) {
        match cmd {
            Command::Activate => {
                self.status = BankStatus::Active { row };
                self.last_activate = Some(cycle);
            }
            Command::Precharge => {
                self.status = BankStatus::Idle;
                self.last_precharge = Some(cycle);
            }
            Command::Read => self.last_read = Some(cycle),
            Command::Write => self.last_write = Some(cycle),
            Command::Refresh => self.status = BankStatus::Refreshing { until: cycle + timing.t_rfc },
        }
    }
}

/// Per-bank timing check (the rank-level constraints live in [`Dram`]).
pub fn earliest_issue_cycle(
    cmd: Command,
    target: &DecodedAddress,
    state: &BankState,
    timing: &TimingParams,
) -> Result<u64, DramError> {
    state.earliest_issue_cycle(cmd, target.row, timing)
}

/// Command counts plus the energy accumulated command by command.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub activates: u64,
    pub precharges: u64,
    pub reads: u64,
    pub writes: u64,
    /// Per-bank refresh operations; an all-bank REF adds one per bank.
    pub bank_refreshes: u64,
    pub accumulated_pj: f64,
}

impl EnergyLedger {
    pub fn count(&self, cmd: Command) -> u64 {
        match cmd {
            Command::Activate => self.activates,
            Command::Precharge => self.precharges,
            Command::Read => self.reads,
            Command::Write => self.writes,
            Command::Refresh => self.bank_refreshes,
        }
    }

    fn bump(&mut self, cmd: Command) {
        let slot = match cmd {
            Command::Activate => &mut self.activates,
            Command::Precharge => &mut self.precharges,
            Command::Read => &mut self.reads,
            Command::Write => &mut self.writes,
            Command::Refresh => &mut self.bank_refreshes,
        };
        *slot += 1;
    }

    /// Energy recomputed from the counts alone.
    pub fn command_energy(&self, energy: &EnergyParams) -> f64 {
        Command::ALL
            .iter()
            .map(|&cmd| self.count(cmd) as f64 * energy.command_energy(cmd))
            .sum()
    }

    /// Counts accumulated since `earlier` (a snapshot of this ledger).
    pub fn since(&self, earlier: &EnergyLedger) -> EnergyLedger {
        EnergyLedger {
            activates: self.activates - earlier.activates,
            precharges: self.precharges - earlier.precharges,
            reads: self.reads - earlier.reads,
            writes: self.writes - earlier.writes,
            bank_refreshes: self.bank_refreshes - earlier.bank_refreshes,
            accumulated_pj: self.accumulated_pj - earlier.accumulated_pj,
        }
    }
}

/// Applies `cmd` to one bank at `cycle`, returning the energy it added.
///
/// Fails without touching `state` or `ledger` if the command is illegal in the
/// current state or issued before [`earliest_issue_cycle`].
pub fn issue_command(
    cmd: Command,
    target: &DecodedAddress,
    cycle: u64,
    state: &mut BankState,
    timing: &TimingParams,
    energy: &EnergyParams,
    ledger: &mut EnergyLedger,
) -> Result<f64, DramError> {
    let earliest = earliest_issue_cycle(cmd, target, state, timing)?;
    if cycle < earliest {
        return Err(DramError::TimingViolation { cmd, cycle, earliest });
    }
    state.transition(cmd, target.row, cycle, timing);
    let delta = energy.command_energy(cmd);
    ledger.bump(cmd);
    ledger.accumulated_pj += delta;
    Ok(delta)
}

/// The whole rank: every bank plus the shared command/data bus constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dram {
    pub topology: DramTopology,
    pub timing: TimingParams,
    pub energy: EnergyParams,
    banks: Vec<BankState>,
    last_activate: Option<(u64, u32)>,
    last_column: Option<(u64, u32)>,
    last_command: Option<u64>,
    ledger: EnergyLedger,
    refreshes: u64,
}

impl Dram {
    pub fn new(topology: DramTopology, timing: TimingParams, energy: EnergyParams) -> Self {
        Self {
            banks: vec![BankState::default(); topology.banks()],
            topology,
            timing,
            energy,
            last_activate: None,
            last_column: None,
            last_command: None,
            ledger: EnergyLedger::default(),
            refreshes: 0,
        }
    }

    pub fn bank(&self, flat: usize) -> &BankState {
        &self.banks[flat]
    }

    pub fn banks(&self) -> &[BankState] {
        &self.banks
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    /// All-bank REF commands issued so far.
    pub fn refresh_commands(&self) -> u64 {
        self.refreshes
    }

    /// Earliest legal cycle for `cmd`, combining bank and rank constraints.
    /// For `Refresh` the target is ignored and every bank must be precharged.
    pub fn earliest_issue_cycle(&self, cmd: Command, target: &DecodedAddress) -> Result<u64, DramError> {
        // One command per cycle on the command bus.
        let mut earliest = after(self.last_command, 1);
        match cmd {
            Command::Refresh => {
                for bank in &self.banks {
                    earliest = earliest.max(bank.earliest_issue_cycle(cmd, 0, &self.timing)?);
                }
            }
            _ => {
                let bank = &self.banks[target.flat_bank(&self.topology)];
                earliest = earliest.max(earliest_issue_cycle(cmd, target, bank, &self.timing)?);
            }
        }
        match cmd {
            Command::Activate => {
                if let Some((cycle, bg)) = self.last_activate {
                    let gap = if bg == target.bank_group { self.timing.t_rrd_l } else { self.timing.t_rrd_s };
                    earliest = earliest.max(cycle + gap);
                }
            }
            Command::Read | Command::Write => {
                if let Some((cycle, bg)) = self.last_column {
                    let ccd = if bg == target.bank_group { self.timing.t_ccd_l } else { self.timing.t_ccd_s };
                    earliest = earliest.max(cycle + ccd.max(self.timing.t_burst));
                }
            }
            _ => {}
        }
        Ok(earliest)
    }

    /// Issues `cmd`, returning the energy it added to the ledger.
    pub fn issue(&mut self, cmd: Command, target: &DecodedAddress, cycle: u64) -> Result<f64, DramError> {
        let earliest = self.earliest_issue_cycle(cmd, target)?;
        if cycle < earliest {
            return Err(DramError::TimingViolation { cmd, cycle, earliest });
        }
        let delta = match cmd {
            Command::Refresh => {
                let mut total = 0.0;
                for bank in &mut self.banks {
                    total += issue_command(cmd, target, cycle, bank, &self.timing, &self.energy, &mut self.ledger)?;
                }
                self.refreshes += 1;
                total
            }
            _ => {
                let flat = target.flat_bank(&self.topology);
                issue_command(cmd, target, cycle, &mut self.banks[flat], &self.timing, &self.energy, &mut self.ledger)?
            }
        };
        match cmd {
            Command::Activate => self.last_activate = Some((cycle, target.bank_group)),
            Command::Read | Command::Write => self.last_column = Some((cycle, target.bank_group)),
            _ => {}
        }
        self.last_command = Some(cycle);
        Ok(delta)
    }
}

/// Everything that describes the physical device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub topology: DramTopology,
    pub timing: TimingParams,
    pub energy: EnergyParams,
    pub mapping: AddressMapping,
}

impl Default for DeviceParams {
    fn default() -> Self {
        let topology = DramTopology::default();
        Self {
            topology,
            timing: TimingParams::default(),
            energy: EnergyParams::default(),
            mapping: AddressMapping::for_topology(&topology),
        }
    }
}

impl DeviceParams {
    pub fn validate(&self, errors: &mut Vec<String>) {
        let before = errors.len();
        self.topology.validate(errors);
        if errors.len() == before {
            self.mapping.validate(&self.topology, errors);
        }
        self.timing.validate(errors);
        self.energy.validate(errors);
    }

    /// Peak interface bandwidth: one burst every tBURST cycles.
    pub fn peak_bandwidth_bps(&self) -> f64 {
        let bits = (self.topology.burst_bytes() * 8) as f64;
        bits / (self.timing.t_burst as f64 * self.energy.clock_period_ps * 1e-12)
    }
}
