//! JSON run reports: one schema for every task and engine.

use anyhow::{Context, Result};
use qsemiring_core::exponents::Parameters;
use qsemiring_core::LedgerReport;
use serde::Serialize;

#[derive(Serialize)]
pub struct RunReport {
    pub task: String,
    pub n: usize,
    pub u: Option<usize>,
    pub v: Option<usize>,
    pub ell: Option<u32>,
    pub parameters: Parameters,
    pub engine: String,
    pub seed: u64,
    pub ledger: LedgerReport,
    /// FNV-1a 64 over the canonical JSON encoding of the result, in hex.
    pub result_checksum: String,
    /// True only when an oracle comparison ran and matched.
    pub verified: bool,
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn checksum<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value).context("serializing result for checksum")?;
    Ok(format!("{:016x}", fnv1a64(&bytes)))
}

pub fn write_report(path: &std::path::Path, report: &RunReport) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(report).context("serializing run report")?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
