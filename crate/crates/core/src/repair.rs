//! Look-up repair.
//!
//! Every chunk shares its subscript with exactly `f` other chunks (the other
//! coded parts and the parity, or all coded parts for a parity chunk), and the
//! XOR of all `f + 1` of them is zero. A lost chunk is therefore the XOR of
//! its `f` siblings, each of which sits on a different node.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::codec::StripeDecoder;
use crate::error::{Error, Result};
use crate::gf::xor_into;
use crate::layout::{layout, ChunkId, SrcParams};
use crate::store::ChunkSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairTarget {
    Chunk(ChunkId),
    Node(usize),
}

/// One helper read: fetch `chunk` from `node`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HelperRead {
    pub node: usize,
    pub chunk: ChunkId,
}

/// Restores `target` as the XOR of its `reads`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkRepair {
    pub target: ChunkId,
    pub reads: Vec<HelperRead>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairPlan {
    params: SrcParams,
    target: RepairTarget,
    failed_node: usize,
    steps: Vec<ChunkRepair>,
    disk_access_set: BTreeSet<usize>,
}

impl RepairPlan {
    pub fn params(&self) -> &SrcParams {
        &self.params
    }

    pub fn target(&self) -> RepairTarget {
        self.target
    }

    pub fn failed_node(&self) -> usize {
        self.failed_node
    }

    pub fn steps(&self) -> &[ChunkRepair] {
        &self.steps
    }

    pub fn reads(&self) -> impl Iterator<Item = &HelperRead> {
        self.steps.iter().flat_map(|s| s.reads.iter())
    }

    /// Distinct helper nodes touched.
    pub fn disk_access_set(&self) -> &BTreeSet<usize> {
        &self.disk_access_set
    }

    pub fn disk_accesses(&self) -> usize {
        self.disk_access_set.len()
    }

    /// Chunk reads per stripe.
    pub fn chunk_reads(&self) -> usize {
        self.steps.iter().map(|s| s.reads.len()).sum()
    }

    pub fn chunks_restored(&self) -> usize {
        self.steps.len()
    }

    /// Plain-text report of the plan over `stripe_count` stripes.
    pub fn report(&self, stripe_count: usize) -> String {
        let p = &self.params;
        let mut out = String::new();
        let target = match self.target {
            RepairTarget::Chunk(id) => format!("chunk {}", p.label(id)),
            RepairTarget::Node(node) => format!("node {node}"),
        };
        let helpers: Vec<String> = self.disk_access_set.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "target = \"{target}\"");
        let _ = writeln!(out, "code = \"{p}\"");
        let _ = writeln!(out, "chunk_size = {}", p.chunk_size());
        let _ = writeln!(out, "stripes = {stripe_count}");
        let _ = writeln!(out, "disk_accesses = {}", self.disk_accesses());
        let _ = writeln!(out, "helper_nodes = [{}]", helpers.join(", "));
        let _ = writeln!(out, "chunk_reads_per_stripe = {}", self.chunk_reads());
        let _ = writeln!(out, "chunks_restored = {}", self.chunks_restored() * stripe_count);
        let _ = writeln!(out, "chunk_reads = {}", self.chunk_reads() * stripe_count);
        let _ = writeln!(
            out,
            "bytes_moved = {}",
            self.chunk_reads() * stripe_count * p.chunk_size()
        );
        // one stripe's M/k equals f chunks
        let _ = writeln!(
            out,
            "repair_bandwidth_stripe_fraction = \"{}/{}\"",
            self.chunk_reads(),
            p.f() * p.k()
        );
        for step in &self.steps {
            let reads: Vec<String> = step
                .reads
                .iter()
                .map(|r| format!("{}@node{}", p.label(r.chunk), r.node))
                .collect();
            let _ = writeln!(out, "step {} = xor({})", p.label(step.target), reads.join(", "));
        }
        out
    }
}

fn sibling_reads(params: &SrcParams, target: ChunkId) -> Vec<HelperRead> {
    let l = layout(params);
    (1..=params.parity_part())
        .filter(|&part| part != target.part)
        .map(|part| {
            let chunk = ChunkId::new(part, target.subscript);
            HelperRead {
                node: l.chunk_location(chunk),
                chunk,
            }
        })
        .collect()
}

/// Plan for restoring a single chunk from its `f` same-subscript siblings.
pub fn chunk_repair_plan(params: &SrcParams, target: ChunkId) -> Result<RepairPlan> {
    params.check_chunk(target)?;
    let failed_node = layout(params).chunk_location(target);
    let reads = sibling_reads(params, target);
    debug_assert!(reads.iter().all(|r| r.node != failed_node));
    let disk_access_set = reads.iter().map(|r| r.node).collect();
    Ok(RepairPlan {
        params: *params,
        target: RepairTarget::Chunk(target),
        failed_node,
        steps: vec![ChunkRepair { target, reads }],
        disk_access_set,
    })
}

/// Plan for restoring every chunk of `failed`.
pub fn node_repair_plan(params: &SrcParams, failed: usize) -> Result<RepairPlan> {
    params.check_node(failed)?;
    let l = layout(params);
    let steps: Vec<ChunkRepair> = l
        .node_chunks(failed)
        .iter()
        .map(|&target| ChunkRepair {
            target,
            reads: sibling_reads(params, target),
        })
        .collect();
    let disk_access_set: BTreeSet<usize> = steps.iter().flat_map(|s| s.reads.iter().map(|r| r.node)).collect();
    debug_assert!(!disk_access_set.contains(&failed));
    Ok(RepairPlan {
        params: *params,
        target: RepairTarget::Node(failed),
        failed_node: failed,
        steps,
        disk_access_set,
    })
}

/// What a repair actually read.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairStats {
    pub chunk_reads: usize,
    pub bytes_read: usize,
    pub disks: BTreeSet<usize>,
}

impl RepairStats {
    fn record(&mut self, node: usize, bytes: usize) {
        self.chunk_reads += 1;
        self.bytes_read += bytes;
        self.disks.insert(node);
    }
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    /// `[stripe]` -> restored `(chunk, bytes)` in plan order.
    pub restored: Vec<Vec<(ChunkId, Vec<u8>)>>,
    pub stats: RepairStats,
}

impl RepairOutcome {
    /// Concatenates restored chunks stripe by stripe. For a node plan this is
    /// the node's shard.
    pub fn into_shard(self) -> Vec<u8> {
        self.restored
            .into_iter()
            .flat_map(|stripe| stripe.into_iter().flat_map(|(_, bytes)| bytes))
            .collect()
    }
}

/// Runs `plan` over every stripe in `store`.
pub fn execute_repair(plan: &RepairPlan, store: &impl ChunkSource) -> Result<RepairOutcome> {
    let cs = plan.params.chunk_size();
    let mut stats = RepairStats::default();
    let mut restored = Vec::with_capacity(store.stripe_count());
    for stripe in 0..store.stripe_count() {
        let mut chunks = Vec::with_capacity(plan.steps.len());
        for step in &plan.steps {
            chunks.push((step.target, restore_chunk(step, store, stripe, cs, &mut stats)?));
        }
        restored.push(chunks);
    }
    Ok(RepairOutcome { restored, stats })
}

fn restore_chunk(
    step: &ChunkRepair,
    store: &impl ChunkSource,
    stripe: usize,
    cs: usize,
    stats: &mut RepairStats,
) -> Result<Vec<u8>> {
    let mut buf = vec![0u8; cs];
    for read in &step.reads {
        let bytes = store.chunk(read.node, stripe, read.chunk).ok_or(Error::RepairFailed {
            missing: read.chunk,
            node: read.node,
        })?;
        xor_into(&mut buf, bytes);
        stats.record(read.node, cs);
    }
    Ok(buf)
}

/// Result of rebuilding a whole node.
#[derive(Clone, Debug)]
pub struct NodeRepair {
    pub shard: Vec<u8>,
    /// True when look-up repair was blocked and the node was re-encoded from
    /// k live nodes instead.
    pub fallback_used: bool,
    pub stats: RepairStats,
}

/// Rebuilds the shard of `failed`, preferring look-up repair and falling back
/// to decoding from any k live nodes when a helper is unavailable.
pub fn repair_node(store: &impl ChunkSource, failed: usize) -> Result<NodeRepair> {
    let params = *store.params();
    let plan = node_repair_plan(&params, failed)?;
    if plan.disk_access_set.iter().all(|&n| store.is_available(n)) {
        let outcome = execute_repair(&plan, store)?;
        let stats = outcome.stats.clone();
        return Ok(NodeRepair {
            shard: outcome.into_shard(),
            fallback_used: false,
            stats,
        });
    }
    let live: Vec<usize> = store.live_nodes().into_iter().filter(|&n| n != failed).collect();
    let decoder = StripeDecoder::new(&params, &live)?;
    let l = layout(&params);
    let mut stats = RepairStats::default();
    let mut shard = Vec::with_capacity(params.shard_len(store.stripe_count()));
    for stripe in 0..store.stripe_count() {
        let parts = decoder.decode_stripe(store, stripe)?;
        for &node in decoder.nodes() {
            for _ in 0..params.f() {
                stats.record(node, params.chunk_size());
            }
        }
        for &id in l.node_chunks(failed) {
            shard.extend_from_slice(&decoder.chunk_from_parts(&parts, id));
        }
    }
    Ok(NodeRepair {
        shard,
        fallback_used: true,
        stats,
    })
}

/// Bytes served for a read of an unavailable chunk. Nothing is persisted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegradedRead {
    pub bytes: Vec<u8>,
    /// Chunks read from nodes other than the target's.
    pub helper_reads: usize,
    pub fallback_used: bool,
}

/// Reads chunk `target` of `stripe`, repairing it in memory if its node is down.
pub fn degraded_read(store: &impl ChunkSource, stripe: usize, target: ChunkId) -> Result<DegradedRead> {
    let params = *store.params();
    params.check_chunk(target)?;
    if stripe >= store.stripe_count() {
        return Err(Error::params(format!(
            "stripe {stripe} out of range ({} stripes)",
            store.stripe_count()
        )));
    }
    let home = layout(&params).chunk_location(target);
    if let Some(bytes) = store.chunk(home, stripe, target) {
        return Ok(DegradedRead {
            bytes: bytes.to_vec(),
            helper_reads: 0,
            fallback_used: false,
        });
    }
    let plan = chunk_repair_plan(&params, target)?;
    if plan.disk_access_set.iter().all(|&n| store.is_available(n)) {
        let mut stats = RepairStats::default();
        let bytes = restore_chunk(&plan.steps[0], store, stripe, params.chunk_size(), &mut stats)?;
        return Ok(DegradedRead {
            bytes,
            helper_reads: stats.chunk_reads,
            fallback_used: false,
        });
    }
    let decoder = StripeDecoder::new(&params, &store.live_nodes())?;
    let parts = decoder.decode_stripe(store, stripe)?;
    Ok(DegradedRead {
        bytes: decoder.chunk_from_parts(&parts, target),
        helper_reads: params.k() * params.f(),
        fallback_used: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode, reconstruct};
    use crate::store::ShardStore;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_file(seed: u64, len: usize) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.gen()).collect()
    }

    fn store_without<'a>(coded: &'a crate::codec::CodedArray, down: &[usize]) -> ShardStore<&'a [u8]> {
        let mut store = ShardStore::new(*coded.params(), coded.stripe_count());
        for (node, shard) in coded.shards() {
            if !down.contains(&node) {
                store.insert(node, shard);
            }
        }
        store
    }

    #[test]
    fn fig3_chunk_plan() {
        let p = SrcParams::new(4, 2, 2, 1).unwrap();
        let plan = chunk_repair_plan(&p, ChunkId::new(1, 1)).unwrap();
        let reads: Vec<(usize, String)> = plan.reads().map(|r| (r.node, p.label(r.chunk))).collect();
        assert_eq!(reads, [(4, "x2_1".to_string()), (3, "s_1".to_string())]);
        assert_eq!(plan.failed_node(), 1);
    }

    #[test]
    fn parity_plan_reads_all_coded_parts() {
        let p = SrcParams::new(9, 5, 4, 1).unwrap();
        let plan = chunk_repair_plan(&p, ChunkId::new(5, 7)).unwrap();
        let parts: Vec<usize> = plan.reads().map(|r| r.chunk.part).collect();
        assert_eq!(parts, [1, 2, 3, 4]);
        assert!(plan.reads().all(|r| r.chunk.subscript == 7));
    }

    #[test]
    fn general_f_coded_plan_matches_ring_offsets() {
        // x(1)_i is restored from x(l)_i on node i ⊖ (l-1) and s_i on node i ⊖ f
        let p = SrcParams::new(11, 6, 4, 1).unwrap();
        for i in 1..=11 {
            let plan = chunk_repair_plan(&p, ChunkId::new(1, i)).unwrap();
            let nodes: Vec<usize> = plan.reads().map(|r| r.node).collect();
            let expect: Vec<usize> = (1..=4).map(|d| crate::layout::ring_sub(i, d, 11)).collect();
            assert_eq!(nodes, expect);
        }
    }

    #[test]
    fn node_plan_counts() {
        let p = SrcParams::new(4, 2, 2, 1).unwrap();
        let plan = node_repair_plan(&p, 1).unwrap();
        assert_eq!(plan.chunk_reads(), 6);
        assert_eq!(plan.disk_access_set().iter().copied().collect::<Vec<_>>(), [2, 3, 4]);

        let p = SrcParams::new(10, 6, 2, 1).unwrap();
        for node in 1..=10 {
            let plan = node_repair_plan(&p, node).unwrap();
            assert_eq!(plan.chunk_reads(), 6);
            assert_eq!(plan.disk_accesses(), 4);
        }
    }

    #[test]
    fn disk_accesses_min_2f_n_minus_1() {
        for n in 2..=12 {
            for f in 1..n {
                let p = SrcParams::new(n, 1, f, 1).unwrap();
                for node in 1..=n {
                    let plan = node_repair_plan(&p, node).unwrap();
                    // brute force: union of every step's helper nodes
                    let mut brute = BTreeSet::new();
                    for step in plan.steps() {
                        assert_eq!(step.reads.len(), f);
                        for r in &step.reads {
                            assert_eq!(r.chunk.subscript, step.target.subscript);
                            assert_ne!(r.node, node);
                            brute.insert(r.node);
                        }
                    }
                    assert_eq!(brute.len(), (2 * f).min(n - 1), "n={n} f={f} node={node}");
                    assert_eq!(plan.chunk_reads(), f * (f + 1));
                }
            }
        }
    }

    #[test]
    fn fig3_node_repair_restores_shard() {
        let p = SrcParams::new(4, 2, 2, 64).unwrap();
        let coded = encode(&random_file(4, 3000), &p);
        let store = store_without(&coded, &[1]);
        let plan = node_repair_plan(&p, 1).unwrap();
        let outcome = execute_repair(&plan, &store).unwrap();
        assert_eq!(outcome.stats.chunk_reads, 6 * coded.stripe_count());
        assert_eq!(outcome.stats.disks.len(), 3);
        assert_eq!(outcome.into_shard(), coded.shard(1));
    }

    #[test]
    fn zero_file_repairs_to_zero() {
        let p = SrcParams::new(5, 3, 2, 16).unwrap();
        let coded = encode(&[0u8; 200], &p);
        let store = store_without(&coded, &[2]);
        let shard = repair_node(&store, 2).unwrap().shard;
        assert!(shard.iter().all(|&b| b == 0));
    }

    #[test]
    fn every_chunk_repair_6_4_3() {
        let p = SrcParams::new(6, 4, 3, 32).unwrap();
        let coded = encode(&random_file(8, 5000), &p);
        let l = layout(&p);
        for node in 1..=6 {
            let store = store_without(&coded, &[node]);
            for &id in l.node_chunks(node) {
                let plan = chunk_repair_plan(&p, id).unwrap();
                let outcome = execute_repair(&plan, &store).unwrap();
                for (stripe, chunks) in outcome.restored.iter().enumerate() {
                    assert_eq!(chunks[0].1.as_slice(), coded.chunk_by_id(stripe, id));
                }
            }
        }
    }

    #[test]
    fn missing_helper_is_named() {
        let p = SrcParams::new(4, 2, 2, 8).unwrap();
        let coded = encode(&random_file(1, 64), &p);
        let store = store_without(&coded, &[1, 4]);
        let plan = chunk_repair_plan(&p, ChunkId::new(1, 1)).unwrap();
        match execute_repair(&plan, &store).unwrap_err() {
            Error::RepairFailed { missing, node } => {
                assert_eq!(missing, ChunkId::new(2, 1));
                assert_eq!(node, 4);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn repair_node_falls_back_with_two_down() {
        let p = SrcParams::new(6, 3, 2, 16).unwrap();
        let coded = encode(&random_file(9, 4000), &p);
        let store = store_without(&coded, &[2, 3]);
        let r = repair_node(&store, 2).unwrap();
        assert!(r.fallback_used);
        assert_eq!(r.shard, coded.shard(2));

        let store = store_without(&coded, &[1, 2, 3, 4]);
        assert!(matches!(repair_node(&store, 1), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn degraded_read_paths() {
        let p = SrcParams::new(4, 2, 2, 16).unwrap();
        let file = random_file(12, 500);
        let coded = encode(&file, &p);
        let target = ChunkId::new(1, 1);

        // live target: direct read
        let all = store_without(&coded, &[]);
        let r = degraded_read(&all, 0, target).unwrap();
        assert_eq!(r.helper_reads, 0);
        assert_eq!(r.bytes, coded.chunk_by_id(0, target));

        // node 1 down: look-up repair
        let one_down = store_without(&coded, &[1]);
        let r = degraded_read(&one_down, 1, target).unwrap();
        assert_eq!(r.helper_reads, 2);
        assert!(!r.fallback_used);
        assert_eq!(r.bytes, coded.chunk_by_id(1, target));
        assert_eq!(one_down.shard(1), None);

        // node 1 and helper node 4 down: compare against full reconstruction
        let two_down = store_without(&coded, &[1, 4]);
        let r = degraded_read(&two_down, 2, target).unwrap();
        assert!(r.fallback_used);
        let rebuilt = reconstruct(&p, file.len() as u64, &[(2, coded.shard(2)), (3, coded.shard(3))]).unwrap();
        let again = encode(&rebuilt, &p);
        assert_eq!(r.bytes, again.chunk_by_id(2, target));

        let three_down = store_without(&coded, &[1, 3, 4]);
        assert!(matches!(degraded_read(&three_down, 0, target), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn report_mentions_counts() {
        let p = SrcParams::new(10, 6, 2, 1024).unwrap();
        let plan = node_repair_plan(&p, 3).unwrap();
        let text = plan.report(5);
        assert!(text.contains("disk_accesses = 4"));
        assert!(text.contains("chunks_restored = 15"));
        assert!(text.contains("chunk_reads = 30"));
    }
}
