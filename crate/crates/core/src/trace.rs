//! Memory-access traces: the text format, partitioning and synthetic workloads.
//!
//! One record per line, `<cycle> <R|W> 0x<hex-address>`, `\n` terminated.
//! Lines starting with `#` are comments. Cycles never decrease.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dram::ACCESS_BYTES;

/// Default spacing between generated records, in cycles.
pub const DEFAULT_GAP: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    Read,
    Write,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceRecord {
    pub cycle: u64,
    pub op: Op,
    pub address: u64,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: cycle {cycle} is earlier than the previous record's {previous}")]
    NonMonotone { line: usize, cycle: u64, previous: u64 },
    #[error("reading trace: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}

fn parse_line(text: &str, line: usize) -> Result<TraceRecord, TraceError> {
    let bad = |reason: &str| TraceError::Malformed { line, reason: reason.to_string() };
    let mut fields = text.split(' ');
    let (Some(cycle), Some(op), Some(address), None) = (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err(bad("expected `<cycle> <R|W> 0x<hex-address>`"));
    };
    let cycle = cycle.parse::<u64>().map_err(|_| bad("cycle is not an unsigned integer"))?;
    let op = match op {
        "R" => Op::Read,
        "W" => Op::Write,
        _ => return Err(bad("operation must be R or W")),
    };
    let hex = address.strip_prefix("0x").ok_or_else(|| bad("address must start with 0x"))?;
    let address = u64::from_str_radix(hex, 16).map_err(|_| bad("address is not 64-bit hexadecimal"))?;
    Ok(TraceRecord { cycle, op, address })
}

/// Parses a whole trace. Empty lines are skipped along with comments.
pub fn parse_trace(reader: impl BufRead) -> Result<Vec<TraceRecord>, TraceError> {
    let mut records: Vec<TraceRecord> = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let number = index + 1;
        let text = line.strip_suffix('\r').unwrap_or(&line);
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let record = parse_line(text, number)?;
        if let Some(prev) = records.last() {
            if record.cycle < prev.cycle {
                return Err(TraceError::NonMonotone { line: number, cycle: record.cycle, previous: prev.cycle });
            }
        }
        records.push(record);
    }
    Ok(records)
}

pub fn parse_trace_str(text: &str) -> Result<Vec<TraceRecord>, TraceError> {
    parse_trace(text.as_bytes())
}

pub fn serialize_trace(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 20);
    for r in records {
        let op = match r.op {
            Op::Read => 'R',
            Op::Write => 'W',
        };
        writeln!(out, "{} {} 0x{:x}", r.cycle, op, r.address).unwrap();
    }
    out
}

/// A fixed-size slice of a trace; one learner timestep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub index: usize,
    pub records: Vec<TraceRecord>,
}

/// Cuts `records` into chunks of `trace_split` records; the last may be short.
///
/// # Panics
/// If `trace_split` is zero.
pub fn split(records: &[TraceRecord], trace_split: usize) -> Vec<Partition> {
    assert!(trace_split >= 1, "trace split must be at least 1");
    records
        .chunks(trace_split)
        .enumerate()
        .map(|(index, chunk)| Partition { index, records: chunk.to_vec() })
        .collect()
}

/// Sequential vector sweep: `start + i * stride`, three reads then one write.
pub fn gen_stream(count: usize, start: u64, stride: u64, gap: u64) -> Result<Vec<TraceRecord>, TraceError> {
    if count == 0 {
        return Err(TraceError::InvalidParameters("stream count must be at least 1".into()));
    }
    Ok((0..count as u64)
        .map(|i| TraceRecord {
            cycle: i * gap,
            op: if i % 4 == 3 { Op::Write } else { Op::Read },
            address: start.wrapping_add(i.wrapping_mul(stride)),
        })
        .collect())
}

/// Base addresses of A, B and C for an `n x n` GEMM of 8-byte elements.
pub fn gemm_bases(n: usize) -> [u64; 3] {
    let bytes = 8 * (n as u64) * (n as u64);
    let region = bytes.div_ceil(4096) * 4096;
    [0, region, 2 * region]
}

/// Blocked `C = A x B` over row-major `n x n` arrays of 8-byte elements.
///
/// For every `b x b` block of C and every k-block, each (i, j, k) reads
/// `A[i][k]` (walking a row of A) and `B[k][j]` (walking a column of B).
/// Each element of C is written once, after its last k-block.
pub fn gen_gemm(n: usize, b: usize, gap: u64) -> Result<Vec<TraceRecord>, TraceError> {
    if n == 0 || b == 0 || b > n {
        return Err(TraceError::InvalidParameters(format!("gemm needs 1 <= b <= n, got n={n} b={b}")));
    }
    let [base_a, base_b, base_c] = gemm_bases(n);
    let elem = |base: u64, row: usize, col: usize| base + 8 * (row * n + col) as u64;
    let mut addresses = Vec::with_capacity(2 * n * n * n + n * n);
    for ii in (0..n).step_by(b) {
        for jj in (0..n).step_by(b) {
            let (i_end, j_end) = ((ii + b).min(n), (jj + b).min(n));
            for kk in (0..n).step_by(b) {
                let k_end = (kk + b).min(n);
                for i in ii..i_end {
                    for j in jj..j_end {
                        for k in kk..k_end {
                            addresses.push((Op::Read, elem(base_a, i, k)));
                            addresses.push((Op::Read, elem(base_b, k, j)));
                        }
                    }
                }
            }
            for i in ii..i_end {
                for j in jj..j_end {
                    addresses.push((Op::Write, elem(base_c, i, j)));
                }
            }
        }
    }
    Ok(addresses
        .into_iter()
        .zip(0u64..)
        .map(|((op, address), i)| TraceRecord { cycle: i * gap, op, address })
        .collect())
}

/// Uniformly random 64-byte-aligned accesses below `address_space`, nine reads per write.
pub fn gen_irregular(count: usize, address_space: u64, seed: u64, gap: u64) -> Result<Vec<TraceRecord>, TraceError> {
    if count == 0 {
        return Err(TraceError::InvalidParameters("irregular count must be at least 1".into()));
    }
    if !address_space.is_power_of_two() || address_space < ACCESS_BYTES {
        return Err(TraceError::InvalidParameters(format!(
            "address space must be a power of two of at least {ACCESS_BYTES} bytes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines = address_space / ACCESS_BYTES;
    Ok((0..count as u64)
        .map(|i| {
            let address = rng.gen_range(0..lines) * ACCESS_BYTES;
            let op = if rng.gen_range(0..10) == 0 { Op::Write } else { Op::Read };
            TraceRecord { cycle: i * gap, op, address }
        })
        .collect())
}
