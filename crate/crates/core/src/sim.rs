//! Discrete-event simulator for repairing one failed machine in a cluster.
//!
//! Chunks are grouped into redundancy sets whose members sit on distinct
//! machines. When a machine fails, the master queues one job per lost chunk.
//! A job streams its helper chunks to a destination machine as one pipelined
//! flow: at rate `r` every helper spends `r` of its uplink and disk, the
//! destination spends `h * r` of its downlink for `h` helpers and `r` of its
//! disk for the write-back. Rates come from weighted max-min fair sharing and
//! are recomputed whenever a job starts or finishes.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{ChunkId, SrcParams};
use crate::repair::node_repair_plan;
use crate::scheme::Scheme;

pub const MIB: u64 = 1 << 20;
pub const GIB: u64 = 1 << 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterConfig {
    pub machines: usize,
    pub data_per_machine: u64,
    pub chunk_size: u64,
    /// Per direction, bits per second.
    pub network_bps: f64,
    /// Shared by reads and writes, bytes per second.
    pub disk_bytes_per_sec: f64,
    pub scheme: Scheme,
    /// Concurrent inbound rebuilds per destination machine.
    pub repair_parallelism: usize,
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            machines: 100,
            data_per_machine: 4 * GIB,
            chunk_size: 64 * MIB,
            network_bps: 1e9,
            disk_bytes_per_sec: 400e6,
            scheme: Scheme::replication3(),
            repair_parallelism: 2,
            seed: 1,
        }
    }
}

impl ClusterConfig {
    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn chunks_per_machine(&self) -> usize {
        (self.data_per_machine as f64 / self.chunk_size as f64).round() as usize
    }

    pub fn link_bytes_per_sec(&self) -> f64 {
        self.network_bps / 8.0
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        if self.chunk_size == 0 {
            return Err(Error::params("chunk_size must be positive"));
        }
        if !(self.network_bps > 0.0 && self.disk_bytes_per_sec > 0.0) {
            return Err(Error::params("bandwidths must be positive"));
        }
        if self.repair_parallelism == 0 {
            return Err(Error::params("repair_parallelism must be at least 1"));
        }
        if self.machines <= self.scheme.width() {
            return Err(Error::Placement(format!(
                "{} needs more than {} machines to place a set and a repair destination, got {}",
                self.scheme,
                self.scheme.width(),
                self.machines
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundancySet {
    /// Machine of each member, indexed by member (node - 1 for SRC).
    pub machines: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Cluster {
    config: ClusterConfig,
    sets: Vec<RedundancySet>,
    /// (set, member) pairs stored on each machine.
    by_machine: Vec<Vec<(usize, usize)>>,
}

impl Cluster {
    pub fn config(&self) -> &ClusterConfig {
        &self.config
    }

    pub fn sets(&self) -> &[RedundancySet] {
        &self.sets
    }

    pub fn members_on(&self, machine: usize) -> &[(usize, usize)] {
        &self.by_machine[machine]
    }

    /// Chunk slots stored on `machine`.
    pub fn chunk_slots(&self, machine: usize) -> usize {
        self.by_machine[machine].len() * self.config.scheme.chunks_per_member()
    }
}

/// Places enough sets to give every machine about `chunks_per_machine` chunks.
///
/// Each set picks the least-loaded machines, breaking ties by a seeded shuffle,
/// so loads differ by at most one member's worth of chunks.
pub fn build_cluster(config: &ClusterConfig) -> Result<Cluster> {
    config.validate()?;
    let width = config.scheme.width();
    let per_member = config.scheme.chunks_per_member();
    let total = config.machines * config.chunks_per_machine();
    let set_count = (total as f64 / (width * per_member) as f64).round() as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut load = vec![0usize; config.machines];
    let mut order: Vec<usize> = (0..config.machines).collect();
    let mut sets = Vec::with_capacity(set_count);
    let mut by_machine = vec![Vec::new(); config.machines];
    for s in 0..set_count {
        order.shuffle(&mut rng);
        order.sort_by_key(|&m| load[m]);
        let machines: Vec<usize> = order[..width].to_vec();
        for (member, &m) in machines.iter().enumerate() {
            load[m] += 1;
            by_machine[m].push((s, member));
        }
        sets.push(RedundancySet { machines });
    }
    Ok(Cluster {
        config: config.clone(),
        sets,
        by_machine,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    Repair,
    DegradedRead,
}

/// Which lost chunks a degraded-read run fetches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReadWorkload {
    /// Every chunk the failed machine held.
    #[default]
    AllLost,
    /// Only chunks that carry user data verbatim.
    DataOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scheme: Scheme,
    pub mode: SimMode,
    pub seed: u64,
    pub failed_machine: usize,
    pub chunk_size: u64,
    pub jobs: usize,
    pub elapsed_seconds: f64,
    /// Bytes rebuilt (repair) or served (degraded read).
    pub lost_bytes: u64,
    pub throughput_bytes_per_sec: f64,
    pub bytes_read: u64,
    pub bytes_transferred: u64,
    pub bytes_written: u64,
    /// Helper chunk reads, one disk access each.
    pub disk_accesses: u64,
    pub data_loss: bool,
    pub unrecoverable_chunks: usize,
    /// Dispatch to completion, per job in dispatch-queue order.
    pub durations: Vec<f64>,
    pub helper_counts: Vec<usize>,
}

impl SimReport {
    pub fn throughput_mb_per_sec(&self) -> f64 {
        self.throughput_bytes_per_sec / 1e6
    }
}

struct PendingJob {
    set: usize,
    /// Members that may serve as helpers; the job takes `needed` of them.
    candidates: Vec<usize>,
    needed: usize,
}

struct ActiveJob {
    index: usize,
    dest: usize,
    helpers: Vec<usize>,
    start: f64,
    remaining: f64,
    rate: f64,
}

/// Seeded choice of the machine to fail.
pub fn random_failed_machine(config: &ClusterConfig) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX);
    rng.gen_range(0..config.machines)
}

pub fn run_node_failure(cluster: &Cluster, failed: usize) -> Result<SimReport> {
    simulate(cluster, failed, SimMode::Repair, ReadWorkload::AllLost)
}

pub fn run_degraded_read(cluster: &Cluster, failed: usize, workload: ReadWorkload) -> Result<SimReport> {
    simulate(cluster, failed, SimMode::DegradedRead, workload)
}

fn lost_jobs(cluster: &Cluster, failed: usize, workload: ReadWorkload) -> Result<(Vec<PendingJob>, usize)> {
    let scheme = cluster.config.scheme;
    let mut jobs = Vec::new();
    let mut unrecoverable = 0;
    for &(set, member) in cluster.members_on(failed) {
        let machines = &cluster.sets[set].machines;
        let survivors = machines.iter().filter(|&&m| m != failed).count();
        if survivors < scheme.threshold() {
            unrecoverable += scheme.chunks_per_member();
            continue;
        }
        match scheme {
            Scheme::Replication { .. } | Scheme::ReedSolomon { .. } => {
                if workload == ReadWorkload::DataOnly {
                    if let Scheme::ReedSolomon { k, .. } = scheme {
                        if member >= k {
                            continue;
                        }
                    }
                }
                jobs.push(PendingJob {
                    set,
                    candidates: (0..machines.len()).filter(|&i| i != member).collect(),
                    needed: scheme.helpers_per_chunk(),
                });
            }
            Scheme::Src { n, k, f } => {
                let params = SrcParams::new(n, k, f, 1)?;
                let plan = node_repair_plan(&params, member + 1)?;
                for step in plan.steps() {
                    if workload == ReadWorkload::DataOnly && !carries_data(&params, step.target) {
                        continue;
                    }
                    jobs.push(PendingJob {
                        set,
                        candidates: step.reads.iter().map(|r| r.node - 1).collect(),
                        needed: f,
                    });
                }
            }
        }
    }
    Ok((jobs, unrecoverable))
}

fn carries_data(params: &SrcParams, id: ChunkId) -> bool {
    !params.is_parity(id) && id.subscript <= params.k()
}

struct Resources {
    capacity: Vec<f64>,
}

impl Resources {
    fn uplink(m: usize) -> usize {
        3 * m
    }
    fn downlink(m: usize) -> usize {
        3 * m + 1
    }
    fn disk(m: usize) -> usize {
        3 * m + 2
    }
}

fn job_usage(job: &ActiveJob, write: bool) -> Vec<(usize, f64)> {
    let mut usage = Vec::with_capacity(2 * job.helpers.len() + 2);
    for &h in &job.helpers {
        usage.push((Resources::uplink(h), 1.0));
        usage.push((Resources::disk(h), 1.0));
    }
    usage.push((Resources::downlink(job.dest), job.helpers.len() as f64));
    if write {
        usage.push((Resources::disk(job.dest), 1.0));
    }
    usage
}

/// Weighted max-min fair rates by progressive filling.
fn allocate(res: &Resources, jobs: &mut [ActiveJob], write: bool) {
    let usage: Vec<Vec<(usize, f64)>> = jobs.iter().map(|j| job_usage(j, write)).collect();
    let mut residual = res.capacity.clone();
    let mut frozen = vec![false; jobs.len()];
    for j in jobs.iter_mut() {
        j.rate = 0.0;
    }
    let mut load = vec![0.0f64; residual.len()];
    loop {
        load.iter_mut().for_each(|l| *l = 0.0);
        for (u, _) in usage.iter().zip(&frozen).filter(|(_, &fz)| !fz) {
            for &(r, w) in u {
                load[r] += w;
            }
        }
        let step = load
            .iter()
            .zip(&residual)
            .filter(|(&l, _)| l > 0.0)
            .map(|(&l, &c)| c / l)
            .fold(f64::INFINITY, f64::min);
        if !step.is_finite() {
            break;
        }
        for (r, l) in load.iter().enumerate() {
            residual[r] -= step * l;
        }
        let saturated: Vec<bool> = residual
            .iter()
            .zip(&res.capacity)
            .map(|(&left, &cap)| left <= cap * 1e-12)
            .collect();
        for (i, j) in jobs.iter_mut().enumerate() {
            if frozen[i] {
                continue;
            }
            j.rate += step;
            if usage[i].iter().any(|&(r, _)| saturated[r]) {
                frozen[i] = true;
            }
        }
    }
}

fn pick_min<R: Rng>(rng: &mut R, items: &[usize], key: impl Fn(usize) -> usize) -> Option<usize> {
    let best = items.iter().map(|&i| key(i)).min()?;
    let ties: Vec<usize> = items.iter().copied().filter(|&i| key(i) == best).collect();
    Some(ties[rng.gen_range(0..ties.len())])
}

fn simulate(cluster: &Cluster, failed: usize, mode: SimMode, workload: ReadWorkload) -> Result<SimReport> {
    let cfg = &cluster.config;
    if failed >= cfg.machines {
        return Err(Error::params(format!("failed machine {failed} out of range 0..{}", cfg.machines)));
    }
    let write = mode == SimMode::Repair;
    let chunk = cfg.chunk_size as f64;
    let (pending, unrecoverable) = lost_jobs(cluster, failed, workload)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1 + failed as u64);

    let mut capacity = Vec::with_capacity(3 * cfg.machines);
    for _ in 0..cfg.machines {
        capacity.extend([cfg.link_bytes_per_sec(), cfg.link_bytes_per_sec(), cfg.disk_bytes_per_sec]);
    }
    let res = Resources { capacity };

    let mut inbound = vec![0usize; cfg.machines];
    let mut outbound = vec![0usize; cfg.machines];
    let mut queue: Vec<usize> = (0..pending.len()).collect();
    let mut active: Vec<ActiveJob> = Vec::new();
    let mut durations = vec![0.0; pending.len()];
    let mut helper_counts = vec![0usize; pending.len()];
    let mut now = 0.0f64;
    let machines: Vec<usize> = (0..cfg.machines).collect();

    loop {
        // FIFO dispatch; a job waits only if no destination has a free slot.
        let mut waiting = Vec::new();
        for &index in &queue {
            let job = &pending[index];
            let members = &cluster.sets[job.set].machines;
            let open: Vec<usize> = machines
                .iter()
                .copied()
                .filter(|&m| m != failed && inbound[m] < cfg.repair_parallelism && !members.contains(&m))
                .collect();
            let Some(dest) = pick_min(&mut rng, &open, |m| inbound[m]) else {
                waiting.push(index);
                continue;
            };
            let helpers: Vec<usize> = if job.needed == job.candidates.len() {
                job.candidates.iter().map(|&i| members[i]).collect()
            } else {
                let mut pool: Vec<usize> = job.candidates.iter().map(|&i| members[i]).collect();
                pool.shuffle(&mut rng);
                pool.sort_by_key(|&m| outbound[m]);
                pool.truncate(job.needed);
                pool
            };
            inbound[dest] += 1;
            for &h in &helpers {
                outbound[h] += 1;
            }
            active.push(ActiveJob {
                index,
                dest,
                helpers,
                start: now,
                remaining: chunk,
                rate: 0.0,
            });
        }
        queue = waiting;
        if active.is_empty() {
            if queue.is_empty() {
                break;
            }
            return Err(Error::Placement("repair jobs cannot be scheduled on any live machine".into()));
        }

        allocate(&res, &mut active, write);
        let dt = active
            .iter()
            .map(|j| j.remaining / j.rate)
            .fold(f64::INFINITY, f64::min);
        now += dt;
        let mut still = Vec::with_capacity(active.len());
        for mut j in active.drain(..) {
            j.remaining -= j.rate * dt;
            if j.remaining <= chunk * 1e-9 {
                durations[j.index] = now - j.start;
                helper_counts[j.index] = j.helpers.len();
                inbound[j.dest] -= 1;
                for &h in &j.helpers {
                    outbound[h] -= 1;
                }
            } else {
                still.push(j);
            }
        }
        active = still;
    }

    let helper_reads: u64 = helper_counts.iter().map(|&h| h as u64).sum();
    let lost_bytes = pending.len() as u64 * cfg.chunk_size;
    Ok(SimReport {
        scheme: cfg.scheme,
        mode,
        seed: cfg.seed,
        failed_machine: failed,
        chunk_size: cfg.chunk_size,
        jobs: pending.len(),
        elapsed_seconds: now,
        lost_bytes,
        throughput_bytes_per_sec: if now > 0.0 { lost_bytes as f64 / now } else { 0.0 },
        bytes_read: helper_reads * cfg.chunk_size,
        bytes_transferred: helper_reads * cfg.chunk_size,
        bytes_written: if write { lost_bytes } else { 0 },
        disk_accesses: helper_reads,
        data_loss: unrecoverable > 0,
        unrecoverable_chunks: unrecoverable,
        durations,
        helper_counts,
    })
}

/// Empirical CDF of per-job durations as `(seconds, fraction <= seconds)`.
pub fn repair_time_cdf(report: &SimReport) -> Vec<(f64, f64)> {
    let mut d = report.durations.clone();
    d.sort_by(f64::total_cmp);
    let total = d.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &t) in d.iter().enumerate() {
        let p = (i + 1) as f64 / total;
        match out.last_mut() {
            Some(last) if last.0 == t => last.1 = p,
            _ => out.push((t, p)),
        }
    }
    out
}

pub fn render_cdf_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("seconds,fraction\n");
    for (t, p) in points {
        let _ = writeln!(out, "{t},{p}");
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub repair: SimReport,
    pub degraded: SimReport,
}

/// Repair and degraded-read runs for each scheme on otherwise equal configs.
pub fn sweep(base: &ClusterConfig, schemes: &[Scheme], failed: usize) -> Result<Vec<SweepRow>> {
    schemes
        .iter()
        .map(|&scheme| {
            let cluster = build_cluster(&base.clone().with_scheme(scheme))?;
            Ok(SweepRow {
                scheme,
                repair: run_node_failure(&cluster, failed)?,
                degraded: run_degraded_read(&cluster, failed, ReadWorkload::AllLost)?,
            })
        })
        .collect()
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("scheme,repair_mb_per_sec,degraded_read_mb_per_sec,repair_bytes_read,repair_elapsed_seconds\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.scheme,
            r.repair.throughput_mb_per_sec(),
            r.degraded.throughput_mb_per_sec(),
            r.repair.bytes_read,
            r.repair.elapsed_seconds
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scheme: Scheme) -> ClusterConfig {
        ClusterConfig {
            machines: 30,
            data_per_machine: 16 * 64 * MIB,
            ..ClusterConfig::default()
        }
        .with_scheme(scheme)
    }

    #[test]
    fn replication_on_four_machines() {
        let cfg = ClusterConfig {
            machines: 4,
            data_per_machine: 64 * MIB,
            ..ClusterConfig::default()
        };
        // 4 slots / 3 per set rounds to one set.
        let c = build_cluster(&cfg).unwrap();
        assert_eq!(c.sets().len(), 1);
        let mut m = c.sets()[0].machines.clone();
        m.sort();
        m.dedup();
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn placement_infeasible() {
        let cfg = ClusterConfig {
            machines: 10,
            ..ClusterConfig::default()
        }
        .with_scheme(Scheme::Src { n: 10, k: 6, f: 2 });
        assert!(matches!(build_cluster(&cfg), Err(Error::Placement(_))));
    }

    #[test]
    fn placement_distinct_and_balanced() {
        for scheme in [
            Scheme::replication3(),
            Scheme::ReedSolomon { n: 10, k: 6 },
            Scheme::Src { n: 10, k: 6, f: 2 },
        ] {
            let c = build_cluster(&small(scheme)).unwrap();
            for s in c.sets() {
                let mut m = s.machines.clone();
                m.sort();
                m.dedup();
                assert_eq!(m.len(), scheme.width());
            }
            let slots: Vec<usize> = (0..30).map(|m| c.chunk_slots(m)).collect();
            let (lo, hi) = (*slots.iter().min().unwrap(), *slots.iter().max().unwrap());
            assert!(hi - lo <= scheme.chunks_per_member(), "{scheme}: {lo}..{hi}");
        }
    }

    #[test]
    fn full_scale_slot_count() {
        let cfg = ClusterConfig {
            data_per_machine: 410 * 1_000_000_000,
            ..ClusterConfig::default()
        }
        .with_scheme(Scheme::Src { n: 10, k: 6, f: 2 });
        let c = build_cluster(&cfg).unwrap();
        let slots = c.chunk_slots(0) as f64;
        assert!((slots - 6100.0).abs() < 100.0, "{slots}");
    }

    #[test]
    fn single_chunk_transfer_time() {
        let cfg = ClusterConfig {
            machines: 4,
            data_per_machine: 64 * MIB,
            ..ClusterConfig::default()
        };
        let c = build_cluster(&cfg).unwrap();
        let failed = c.sets()[0].machines[0];
        let r = run_node_failure(&c, failed).unwrap();
        assert_eq!(r.jobs, 1);
        let expect = (64 * MIB * 8) as f64 / 1e9;
        assert!((r.elapsed_seconds - expect).abs() < 1e-9, "{}", r.elapsed_seconds);
        let d = run_degraded_read(&c, failed, ReadWorkload::AllLost).unwrap();
        assert!((d.elapsed_seconds - expect).abs() < 1e-9);
        assert_eq!(d.bytes_written, 0);
    }

    #[test]
    fn conservation_and_helper_counts() {
        for (scheme, helpers) in [
            (Scheme::replication3(), 1),
            (Scheme::ReedSolomon { n: 10, k: 6 }, 6),
            (Scheme::Src { n: 10, k: 6, f: 2 }, 2),
            (Scheme::Src { n: 12, k: 8, f: 3 }, 3),
        ] {
            let c = build_cluster(&small(scheme)).unwrap();
            for mode in [SimMode::Repair, SimMode::DegradedRead] {
                let r = simulate(&c, 3, mode, ReadWorkload::AllLost).unwrap();
                assert_eq!(r.jobs, c.chunk_slots(3));
                assert!(r.helper_counts.iter().all(|&h| h == helpers));
                let sum: u64 = r.helper_counts.iter().map(|&h| h as u64 * r.chunk_size).sum();
                assert_eq!(r.bytes_read, sum);
                assert_eq!(r.bytes_transferred, sum);
                let written = if mode == SimMode::Repair { r.lost_bytes } else { 0 };
                assert_eq!(r.bytes_written, written);
                assert_eq!(r.lost_bytes, r.jobs as u64 * r.chunk_size);
                assert!((r.throughput_bytes_per_sec - r.lost_bytes as f64 / r.elapsed_seconds).abs() < 1e-6);
                assert!(r.durations.iter().all(|&d| d > 0.0 && d <= r.elapsed_seconds + 1e-9));
                assert!(!r.data_loss);
            }
        }
    }

    #[test]
    fn deterministic() {
        let c = build_cluster(&small(Scheme::Src { n: 10, k: 6, f: 2 })).unwrap();
        let a = run_node_failure(&c, 5).unwrap();
        let c2 = build_cluster(&small(Scheme::Src { n: 10, k: 6, f: 2 })).unwrap();
        let b = run_node_failure(&c2, 5).unwrap();
        assert_eq!(toml::to_string(&a).unwrap(), toml::to_string(&b).unwrap());
        let mut other = small(Scheme::Src { n: 10, k: 6, f: 2 });
        other.seed = 2;
        let c3 = build_cluster(&other).unwrap();
        assert_ne!(c.sets(), c3.sets());
    }

    #[test]
    fn single_copy_loses_data() {
        let c = build_cluster(&small(Scheme::Replication { copies: 1 })).unwrap();
        let r = run_node_failure(&c, 0).unwrap();
        assert!(r.data_loss);
        assert_eq!(r.jobs, 0);
        assert_eq!(r.unrecoverable_chunks, c.chunk_slots(0));
    }

    #[test]
    fn data_only_workload_skips_parity() {
        let scheme = Scheme::Src { n: 10, k: 6, f: 2 };
        let c = build_cluster(&small(scheme)).unwrap();
        let all = run_degraded_read(&c, 2, ReadWorkload::AllLost).unwrap();
        let data = run_degraded_read(&c, 2, ReadWorkload::DataOnly).unwrap();
        assert!(data.jobs < all.jobs && data.jobs > 0);
    }

    fn report_with(durations: Vec<f64>) -> SimReport {
        SimReport {
            scheme: Scheme::replication3(),
            mode: SimMode::Repair,
            seed: 0,
            failed_machine: 0,
            chunk_size: 1,
            jobs: durations.len(),
            elapsed_seconds: 0.0,
            lost_bytes: 0,
            throughput_bytes_per_sec: 0.0,
            bytes_read: 0,
            bytes_transferred: 0,
            bytes_written: 0,
            disk_accesses: 0,
            data_loss: false,
            unrecoverable_chunks: 0,
            helper_counts: vec![1; durations.len()],
            durations,
        }
    }

    #[test]
    fn cdf_points() {
        assert_eq!(repair_time_cdf(&report_with(vec![3.0, 1.0])), vec![(1.0, 0.5), (3.0, 1.0)]);
        assert_eq!(repair_time_cdf(&report_with(vec![2.0; 4])), vec![(2.0, 1.0)]);
        assert!(repair_time_cdf(&report_with(vec![])).is_empty());
        let r = report_with(vec![0.5, 4.0, 2.0, 2.0, 1.0]);
        let cdf = repair_time_cdf(&r);
        assert!(cdf.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        assert_eq!(*cdf.last().unwrap(), (4.0, 1.0));
    }
}
