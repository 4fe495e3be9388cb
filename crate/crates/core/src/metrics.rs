//! Closed-form storage and repair metrics.
//!
//! Storage per node (`alpha`) and repair bandwidth (`gamma`) are expressed in
//! units of `M/k`, where `M` is the file size. Disk accesses count distinct
//! helper nodes per single-node repair.

use std::fmt::Write as _;

use crate::layout::SrcParams;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub scheme: String,
    /// Storage per node, in units of M/k.
    pub alpha: f64,
    /// Bandwidth to repair one node, in units of M/k.
    pub gamma: f64,
    pub disk_accesses: usize,
    pub rate: f64,
}

impl MetricRow {
    /// Bytes stored per useful byte, relative to 3-way replication.
    pub fn cost_vs_replication(&self) -> f64 {
        storage_cost_vs_replication(self.rate)
    }
}

/// `(1 / rate) / 3`.
pub fn storage_cost_vs_replication(rate: f64) -> f64 {
    (1.0 / rate) / 3.0
}

pub fn src_metrics(params: &SrcParams) -> MetricRow {
    let (n, k, f) = (params.n() as f64, params.k() as f64, params.f() as f64);
    MetricRow {
        scheme: format!("({},{},{})-SRC", params.n(), params.k(), params.f()),
        alpha: (f + 1.0) / f,
        gamma: f + 1.0,
        disk_accesses: (2 * params.f()).min(params.n() - 1),
        rate: f * k / ((f + 1.0) * n),
    }
}

/// Rate implied by storage per node: `M / (n * alpha * M/k) = k / (n * alpha)`.
fn rate_from_alpha(n: f64, k: f64, alpha: f64) -> f64 {
    k / (n * alpha)
}

/// MDS, MSR (d = n-1), MBR (d = k), MBR (d = n-1) and SRC rows.
///
/// Requires `1 <= k < n` and `f >= 1`.
pub fn comparison_table(n: usize, k: usize, f: usize) -> Vec<MetricRow> {
    assert!(k >= 1 && k < n && f >= 1, "comparison_table needs 1 <= k < n and f >= 1");
    let (nf, kf, ff) = (n as f64, k as f64, f as f64);

    let mbr_k = 2.0 * kf / (kf + 1.0);
    let mbr_n1 = 2.0 * (nf - 1.0) / (2.0 * (nf - 1.0) - kf + 1.0);

    vec![
        MetricRow {
            scheme: format!("({n},{k})-MDS"),
            alpha: 1.0,
            gamma: kf,
            disk_accesses: k,
            rate: kf / nf,
        },
        MetricRow {
            scheme: format!("({n},{k},d={})-MSR", n - 1),
            alpha: 1.0,
            gamma: (nf - 1.0) / (nf - kf),
            disk_accesses: n - 1,
            rate: kf / nf,
        },
        MetricRow {
            scheme: format!("({n},{k},d={k})-MBR"),
            alpha: mbr_k,
            gamma: mbr_k,
            disk_accesses: k,
            rate: rate_from_alpha(nf, kf, mbr_k),
        },
        MetricRow {
            scheme: format!("({n},{k},d={})-MBR", n - 1),
            alpha: mbr_n1,
            gamma: mbr_n1,
            disk_accesses: n - 1,
            rate: rate_from_alpha(nf, kf, mbr_n1),
        },
        MetricRow {
            scheme: format!("({n},{k},{f})-SRC"),
            alpha: (ff + 1.0) / ff,
            gamma: ff + 1.0,
            disk_accesses: (2 * f).min(n - 1),
            rate: ff * kf / ((ff + 1.0) * nf),
        },
    ]
}

/// Aligned text table.
pub fn render_table(rows: &[MetricRow]) -> String {
    let width = rows.iter().map(|r| r.scheme.len()).max().unwrap_or(6).max(6);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>10}  {:>10}  {:>5}  {:>8}  {:>10}",
        "scheme", "alpha(M/k)", "gamma(M/k)", "d", "rate", "cost/3rep"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>10.4}  {:>10.4}  {:>5}  {:>8.4}  {:>10.4}",
            r.scheme,
            r.alpha,
            r.gamma,
            r.disk_accesses,
            r.rate,
            r.cost_vs_replication()
        );
    }
    out
}

pub fn render_csv(rows: &[MetricRow]) -> String {
    let mut out = String::from("scheme,alpha,gamma,disk_accesses,rate,cost_vs_replication\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scheme,
            r.alpha,
            r.gamma,
            r.disk_accesses,
            r.rate,
            r.cost_vs_replication()
        );
    }
    out
}

/// How the parity degree grows with k in [`asymptotic_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeRule {
    /// f = log2 k, unrounded.
    Log2,
    /// f = ceil(log2 k), at least 1.
    CeilLog2,
    /// f = ln k, unrounded.
    Ln,
}

impl DegreeRule {
    pub fn degree(self, k: f64) -> f64 {
        match self {
            DegreeRule::Log2 => k.log2(),
            DegreeRule::CeilLog2 => k.log2().ceil().max(1.0),
            DegreeRule::Ln => k.ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DegreeRule::Log2 => "log2(k)",
            DegreeRule::CeilLog2 => "ceil(log2(k))",
            DegreeRule::Ln => "ln(k)",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticRow {
    pub k: f64,
    pub f: f64,
    /// gamma_SRC / gamma_MSR at n = k / R.
    pub bandwidth_ratio: f64,
    pub src_rate: f64,
}

/// SRC versus MSR at a fixed MDS rate `rate = k/n` as k grows, with f tied to k.
pub fn asymptotic_report(ks: &[f64], rate: f64, rule: DegreeRule) -> Vec<AsymptoticRow> {
    assert!(rate > 0.0 && rate < 1.0, "rate must lie in (0, 1)");
    ks.iter()
        .map(|&k| {
            let f = rule.degree(k);
            // (n - 1) / (n - k) with n = k / R
            let msr = (k / rate - 1.0) / ((1.0 / rate - 1.0) * k);
            AsymptoticRow {
                k,
                f,
                bandwidth_ratio: (f + 1.0) / msr,
                src_rate: f / (f + 1.0) * rate,
            }
        })
        .collect()
}

pub fn render_asymptotic_csv(rows: &[AsymptoticRow], rule: DegreeRule) -> String {
    let mut out = format!("# f = {}\nk,f,gamma_src_over_gamma_msr,src_rate\n", rule.name());
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.k, r.f, r.bandwidth_ratio, r.src_rate);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn src_4_2_2() {
        let m = src_metrics(&SrcParams::new(4, 2, 2, 1).unwrap());
        assert!((m.rate - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.alpha, 1.5);
        assert_eq!(m.gamma, 3.0);
        assert_eq!(m.disk_accesses, 3);
    }

    #[test]
    fn src_20_16_2_rate() {
        let m = src_metrics(&SrcParams::new(20, 16, 2, 1).unwrap());
        assert!((m.rate - 8.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_cost_50_46() {
        let m = src_metrics(&SrcParams::new(50, 46, 2, 1).unwrap());
        assert!((m.cost_vs_replication() - 0.5435).abs() < 0.005);
        let rs = storage_cost_vs_replication(46.0 / 50.0);
        assert!((rs - 0.3623).abs() < 0.005);
    }

    #[test]
    fn mbr_rate_at_most_half() {
        for n in 2..40 {
            for k in 1..n {
                let rows = comparison_table(n, k, 1);
                assert!(rows[2].rate <= 0.5 + 1e-12);
                assert!(rows[3].rate <= 0.5 + 1e-12);
                assert!((rows[2].rate - 0.5 * (k as f64 + 1.0) / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn msr_equals_mds_when_one_parity() {
        for k in 1..30 {
            let rows = comparison_table(k + 1, k, 2);
            assert!((rows[1].gamma - rows[0].gamma).abs() < 1e-12);
        }
    }

    #[test]
    fn row_invariants() {
        for n in 2..20 {
            for k in 1..n {
                for f in 1..n {
                    for r in comparison_table(n, k, f) {
                        assert!(r.rate > 0.0 && r.rate <= 1.0, "{r:?}");
                        assert!(r.alpha >= 1.0 - 1e-12, "{r:?}");
                        assert!(r.disk_accesses >= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn asymptotics() {
        let ks: Vec<f64> = (1..=20).map(|e| 2f64.powi(e)).collect();
        let rows = asymptotic_report(&ks, 0.8, DegreeRule::Log2);
        for w in rows.windows(2) {
            assert!(w[1].bandwidth_ratio > w[0].bandwidth_ratio);
            assert!(w[1].src_rate > w[0].src_rate);
        }
        let last = rows.last().unwrap();
        assert!((last.src_rate - 0.8).abs() / 0.8 < 0.05);
        assert!(last.bandwidth_ratio > 3.0);
    }

    #[test]
    fn rate_fraction_monotone_in_f() {
        let mut prev = 0.0;
        for f in 1..60 {
            let p = SrcParams::new(64, 40, f, 1).unwrap();
            let frac = src_metrics(&p).rate / (40.0 / 64.0);
            assert!(frac > prev && frac < 1.0);
            prev = frac;
        }
    }
}
