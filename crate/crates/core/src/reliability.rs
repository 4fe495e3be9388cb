//! Markov-chain MTTF for redundancy sets and whole systems.
//!
//! A set of `n` members survives `n - k` losses. State `i` counts failed
//! members; from state `i` a further failure happens at rate `(n - i) λ` and
//! one repair completes at rate `μ` (a single repair in flight per set). State
//! `n - k + 1` is data loss. The set MTTF is the expected absorption time from
//! state 0. Sets are assumed to fail independently, so the system MTTF is the
//! set MTTF divided by the number of sets.

use std::fmt::Write as _;

use crate::scheme::Scheme;

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovParams {
    pub n: usize,
    pub k: usize,
    pub disk_mttf_hours: f64,
    pub repair_hours: f64,
    /// User bytes stored by the whole system.
    pub system_bytes: f64,
    pub chunk_size: f64,
    /// User-data chunks protected by one set.
    pub data_chunks_per_set: usize,
}

impl MarkovParams {
    pub fn failure_rate(&self) -> f64 {
        1.0 / self.disk_mttf_hours
    }

    /// Zero when `repair_hours` is infinite.
    pub fn repair_rate(&self) -> f64 {
        1.0 / self.repair_hours
    }

    pub fn set_count(&self) -> f64 {
        (self.system_bytes / (self.chunk_size * self.data_chunks_per_set as f64)).max(1.0)
    }
}

/// System-wide inputs shared by every scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityConfig {
    pub disk_mttf_hours: f64,
    pub system_bytes: f64,
    pub chunk_size: f64,
    pub replication_repair_hours: f64,
    pub src_repair_hours: f64,
    /// RS repair time at `k = rs_reference_k`; scaled linearly in k.
    pub rs_reference_hours: f64,
    pub rs_reference_k: usize,
    /// Measured repair times that take precedence over the defaults above.
    pub measured_repair_hours: Vec<(Scheme, f64)>,
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        ReliabilityConfig {
            disk_mttf_hours: 5.0 * HOURS_PER_YEAR,
            system_bytes: 1e15,
            chunk_size: (64u64 << 20) as f64,
            replication_repair_hours: 0.25,
            src_repair_hours: 0.5,
            rs_reference_hours: 0.5,
            rs_reference_k: 6,
            measured_repair_hours: Vec::new(),
        }
    }
}

impl ReliabilityConfig {
    pub fn repair_hours(&self, scheme: &Scheme) -> f64 {
        if let Some(&(_, h)) = self.measured_repair_hours.iter().find(|(s, _)| s == scheme) {
            return h;
        }
        match *scheme {
            Scheme::Replication { .. } => self.replication_repair_hours,
            Scheme::Src { .. } => self.src_repair_hours,
            Scheme::ReedSolomon { k, .. } => self.rs_reference_hours * k as f64 / self.rs_reference_k as f64,
        }
    }

    pub fn params_for(&self, scheme: &Scheme) -> MarkovParams {
        MarkovParams {
            n: scheme.width(),
            k: scheme.threshold(),
            disk_mttf_hours: self.disk_mttf_hours,
            repair_hours: self.repair_hours(scheme),
            system_bytes: self.system_bytes,
            chunk_size: self.chunk_size,
            data_chunks_per_set: scheme.data_chunks_per_set(),
        }
    }
}

/// Expected hours until a set loses data.
///
/// The absorption times `T_i` satisfy `(fail_i + repair_i) T_i - fail_i T_{i+1}
/// - repair_i T_{i-1} = 1`. Rewritten in gaps `D_i = T_i - T_{i+1}` the system
/// becomes lower bidiagonal, `fail_i D_i - repair_i D_{i-1} = 1`, whose forward
/// substitution only adds positive terms and so stays accurate when `μ >> λ`.
pub fn mttf_redundancy_set(p: &MarkovParams) -> f64 {
    assert!(p.k >= 1 && p.k <= p.n, "need 1 <= k <= n");
    let lambda = p.failure_rate();
    let mu = p.repair_rate();
    let mut gap = 0.0;
    let mut total = 0.0;
    for i in 0..=p.n - p.k {
        let fail = (p.n - i) as f64 * lambda;
        let repair = if i > 0 { mu } else { 0.0 };
        gap = (1.0 + repair * gap) / fail;
        total += gap;
    }
    total
}

pub fn mttf_system(p: &MarkovParams) -> f64 {
    mttf_redundancy_set(p) / p.set_count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MttfRow {
    pub scheme: Scheme,
    pub repair_hours: f64,
    pub set_mttf_hours: f64,
    pub set_count: f64,
    pub system_mttf_hours: f64,
}

pub fn mttf_table(config: &ReliabilityConfig, schemes: &[Scheme]) -> Vec<MttfRow> {
    schemes
        .iter()
        .map(|s| {
            let p = config.params_for(s);
            let set = mttf_redundancy_set(&p);
            MttfRow {
                scheme: *s,
                repair_hours: p.repair_hours,
                set_mttf_hours: set,
                set_count: p.set_count(),
                system_mttf_hours: set / p.set_count(),
            }
        })
        .collect()
}

pub fn render_table(rows: &[MttfRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<22}  {:>10}  {:>12}  {:>12}  {:>14}",
        "scheme", "repair(h)", "set MTTF(h)", "sets", "system MTTF(h)"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22}  {:>10.4}  {:>12.4e}  {:>12.4e}  {:>14.4e}",
            r.scheme.to_string(),
            r.repair_hours,
            r.set_mttf_hours,
            r.set_count,
            r.system_mttf_hours
        );
    }
    out
}

pub fn render_csv(rows: &[MttfRow]) -> String {
    let mut out = String::from("scheme,repair_hours,set_mttf_hours,set_count,system_mttf_hours\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.scheme, r.repair_hours, r.set_mttf_hours, r.set_count, r.system_mttf_hours
        );
    }
    out
}
