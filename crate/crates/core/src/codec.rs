//! Encoding a byte stream into per-node shards, and rebuilding it from any k nodes.
//!
//! A file is zero-padded to a whole number of stripes. Each stripe holds
//! `f * k` chunks split into `f` parts of `k` chunks; every part goes through
//! the same outer (n, k) MDS code, and the parity vector is the XOR of the `f`
//! coded vectors. Node `i`'s shard is its `f + 1` chunks, stripe after stripe.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::xor_into;
use crate::layout::{layout, ChunkId, SrcParams, StripeLayout};
use crate::mds::{make_generator, Decoder, GeneratorMatrix};
use crate::store::{chunk_in_shard, ChunkSource};

/// The n shards produced by [`encode`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedArray {
    params: SrcParams,
    file_size: u64,
    stripe_count: usize,
    shards: Vec<Vec<u8>>,
}

impl CodedArray {
    pub fn params(&self) -> &SrcParams {
        &self.params
    }

    pub fn file_size(&self) -> u64 {
        self.file_size
    }

    pub fn stripe_count(&self) -> usize {
        self.stripe_count
    }

    /// Shard of `node` (1-based).
    pub fn shard(&self, node: usize) -> &[u8] {
        &self.shards[node - 1]
    }

    pub fn shards(&self) -> impl Iterator<Item = (usize, &[u8])> {
        self.shards.iter().enumerate().map(|(i, s)| (i + 1, s.as_slice()))
    }

    pub fn into_shards(self) -> Vec<Vec<u8>> {
        self.shards
    }

    /// Bytes of chunk `id` in `stripe`, wherever it is placed.
    pub fn chunk_by_id(&self, stripe: usize, id: ChunkId) -> &[u8] {
        let l = layout(&self.params);
        let node = l.chunk_location(id);
        chunk_in_shard(&self.params, &l, &self.shards[node - 1], node, stripe, id)
            .expect("chunk id within layout")
    }

    /// `(chunk id, bytes)` pairs held by `node` in `stripe`, in slot order.
    pub fn node_chunks(&self, node: usize, stripe: usize) -> Vec<(ChunkId, &[u8])> {
        let l = layout(&self.params);
        l.node_chunks(node)
            .iter()
            .map(|&id| {
                let bytes = chunk_in_shard(&self.params, &l, &self.shards[node - 1], node, stripe, id)
                    .expect("chunk id within layout");
                (id, bytes)
            })
            .collect()
    }

    pub fn total_stored_bytes(&self) -> usize {
        self.shards.iter().map(|s| s.len()).sum()
    }
}

impl ChunkSource for CodedArray {
    fn params(&self) -> &SrcParams {
        &self.params
    }

    fn stripe_count(&self) -> usize {
        self.stripe_count
    }

    fn is_available(&self, node: usize) -> bool {
        (1..=self.params.n()).contains(&node)
    }

    fn chunk(&self, node: usize, stripe: usize, id: ChunkId) -> Option<&[u8]> {
        let shard = self.shards.get(node.checked_sub(1)?)?;
        chunk_in_shard(&self.params, &layout(&self.params), shard, node, stripe, id)
    }
}

/// Encodes `file` into n shards.
pub fn encode(file: &[u8], params: &SrcParams) -> CodedArray {
    let g = make_generator(params.k(), params.n()).expect("SrcParams guarantees a valid (n, k)");
    let l = layout(params);
    let (n, k, f, cs) = (params.n(), params.k(), params.f(), params.chunk_size());
    let stripe_count = params.stripe_count(file.len() as u64);
    let stripe_len = params.stripe_data_len();
    let mut shards = vec![vec![0u8; params.shard_len(stripe_count)]; n];
    let mut padded = vec![0u8; stripe_len];
    let mut coded = vec![vec![0u8; cs]; n];
    let mut parity = vec![vec![0u8; cs]; n];

    for stripe in 0..stripe_count {
        let start = stripe * stripe_len;
        let end = (start + stripe_len).min(file.len());
        padded.fill(0);
        padded[..end - start].copy_from_slice(&file[start..end]);
        for p in parity.iter_mut() {
            p.fill(0);
        }
        for part in 1..=f {
            let base = (part - 1) * k * cs;
            let data: Vec<&[u8]> = (0..k).map(|j| &padded[base + j * cs..base + (j + 1) * cs]).collect();
            for (col, out) in coded.iter_mut().enumerate() {
                g.encode_column_into(&data, col, out);
            }
            for (m, chunk) in coded.iter().enumerate() {
                let id = ChunkId::new(part, m + 1);
                place(params, &l, &mut shards, stripe, id, chunk);
                xor_into(&mut parity[m], chunk);
            }
        }
        for (m, chunk) in parity.iter().enumerate() {
            place(params, &l, &mut shards, stripe, ChunkId::new(f + 1, m + 1), chunk);
        }
    }

    CodedArray {
        params: *params,
        file_size: file.len() as u64,
        stripe_count,
        shards,
    }
}

fn place(params: &SrcParams, l: &StripeLayout, shards: &mut [Vec<u8>], stripe: usize, id: ChunkId, bytes: &[u8]) {
    let node = l.chunk_location(id);
    let cs = params.chunk_size();
    let start = stripe * params.node_stripe_len() + l.slot_of(id) * cs;
    shards[node - 1][start..start + cs].copy_from_slice(bytes);
}

/// Rebuilds the original file from the shards of any k distinct nodes.
///
/// Extra shards beyond k are ignored; the k lowest node ids are used. Parity
/// chunks are never read.
pub fn reconstruct(params: &SrcParams, file_size: u64, shards: &[(usize, &[u8])]) -> Result<Vec<u8>> {
    let mut seen = BTreeSet::new();
    for &(node, _) in shards {
        params.check_node(node)?;
        if !seen.insert(node) {
            return Err(Error::params(format!("node {node} given twice")));
        }
    }
    if seen.len() < params.k() {
        return Err(Error::InsufficientData(format!(
            "{} shard(s) given, {} needed",
            seen.len(),
            params.k()
        )));
    }
    let stripe_count = params.stripe_count(file_size);
    let expected = params.shard_len(stripe_count);
    for &(node, bytes) in shards {
        if bytes.len() != expected {
            return Err(Error::shape(format!(
                "shard {node} is {} bytes, expected {expected}",
                bytes.len()
            )));
        }
    }
    let mut store = crate::store::ShardStore::<&[u8]>::new(*params, stripe_count);
    for &(node, bytes) in shards {
        store.insert(node, bytes);
    }
    let nodes: Vec<usize> = seen.into_iter().collect();
    let decoder = StripeDecoder::new(params, &nodes)?;
    let stripe_len = params.stripe_data_len();
    let mut out = Vec::with_capacity(stripe_count * stripe_len);
    for stripe in 0..stripe_count {
        for part in decoder.decode_stripe(&store, stripe)? {
            for chunk in part {
                out.extend_from_slice(&chunk);
            }
        }
    }
    out.truncate(file_size as usize);
    Ok(out)
}

/// Decodes whole stripes from a fixed set of k nodes.
#[derive(Clone, Debug)]
pub struct StripeDecoder {
    params: SrcParams,
    layout: StripeLayout,
    generator: GeneratorMatrix,
    nodes: Vec<usize>,
    // one per coded part: the subscripts visible on `nodes` differ by part
    decoders: Vec<Decoder>,
}

impl StripeDecoder {
    /// Uses the first k of `nodes`.
    pub fn new(params: &SrcParams, nodes: &[usize]) -> Result<Self> {
        let k = params.k();
        if nodes.len() < k {
            return Err(Error::InsufficientData(format!(
                "{} live node(s), {k} needed",
                nodes.len()
            )));
        }
        let nodes = nodes[..k].to_vec();
        let l = layout(params);
        let generator = make_generator(k, params.n())?;
        let decoders = (1..=params.f())
            .map(|part| {
                let cols: Vec<usize> = nodes
                    .iter()
                    .map(|&node| l.chunk_on_node(node, part).subscript - 1)
                    .collect();
                generator.decoder(&cols)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StripeDecoder {
            params: *params,
            layout: l,
            generator,
            nodes,
            decoders,
        })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Data chunks of one stripe, indexed `[part - 1][j]`.
    pub fn decode_stripe(&self, src: &impl ChunkSource, stripe: usize) -> Result<Vec<Vec<Vec<u8>>>> {
        let mut parts = Vec::with_capacity(self.params.f());
        for (idx, decoder) in self.decoders.iter().enumerate() {
            let part = idx + 1;
            let shares = self
                .nodes
                .iter()
                .map(|&node| {
                    let id = self.layout.chunk_on_node(node, part);
                    src.chunk(node, stripe, id).ok_or_else(|| {
                        Error::InsufficientData(format!("chunk {} on node {node} unavailable", self.params.label(id)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            parts.push(decoder.decode(&shares)?);
        }
        Ok(parts)
    }

    /// Re-encodes chunk `id` from decoded stripe data.
    pub fn chunk_from_parts(&self, parts: &[Vec<Vec<u8>>], id: ChunkId) -> Vec<u8> {
        let cs = self.params.chunk_size();
        let col = id.subscript - 1;
        let mut out = vec![0u8; cs];
        let mut tmp = vec![0u8; cs];
        let wanted: Vec<usize> = if self.params.is_parity(id) {
            (1..=self.params.f()).collect()
        } else {
            vec![id.part]
        };
        for part in wanted {
            let data: Vec<&[u8]> = parts[part - 1].iter().map(|c| c.as_slice()).collect();
            self.generator.encode_column_into(&data, col, &mut tmp);
            xor_into(&mut out, &tmp);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_file(seed: u64, len: usize) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.gen()).collect()
    }

    #[test]
    fn fig1_single_stripe_contents() {
        // f1..f4 are one byte each; x = [f1 f2]G, y = [f3 f4]G, s = x + y
        let p = SrcParams::new(4, 2, 2, 1).unwrap();
        let file = [0x11u8, 0x22, 0x33, 0x44];
        let coded = encode(&file, &p);
        assert_eq!(coded.stripe_count(), 1);
        let g = make_generator(2, 4).unwrap();
        let x = crate::mds::mds_encode(&[&file[0..1], &file[1..2]], &g).unwrap();
        let y = crate::mds::mds_encode(&[&file[2..3], &file[3..4]], &g).unwrap();
        let s: Vec<u8> = (0..4).map(|i| x[i][0] ^ y[i][0]).collect();
        // node 1 = [x1, y2, s3], node 2 = [x2, y3, s4], ...
        for node in 1..=4usize {
            let i = node - 1;
            let expect = [x[i][0], y[(i + 1) % 4][0], s[(i + 2) % 4]];
            assert_eq!(coded.shard(node), &expect, "node {node}");
        }
        assert_eq!(coded.shard(1)[0], 0x11);
        assert_eq!(coded.shard(2)[0], 0x22);
    }

    #[test]
    fn empty_file_has_no_stripes() {
        let p = SrcParams::new(5, 3, 2, 16).unwrap();
        let coded = encode(&[], &p);
        assert_eq!(coded.stripe_count(), 0);
        assert!(coded.shards().all(|(_, s)| s.is_empty()));
        let shards: Vec<(usize, &[u8])> = coded.shards().take(3).collect();
        assert_eq!(reconstruct(&p, 0, &shards).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn zero_file_zero_shards() {
        let p = SrcParams::new(6, 4, 3, 8).unwrap();
        let coded = encode(&vec![0u8; 1000], &p);
        assert!(coded.shards().all(|(_, s)| s.iter().all(|&b| b == 0)));
    }

    #[test]
    fn parity_identity_every_stripe() {
        let p = SrcParams::new(6, 3, 3, 7).unwrap();
        let coded = encode(&random_file(3, 2000), &p);
        for stripe in 0..coded.stripe_count() {
            for m in 1..=6 {
                let mut sum = vec![0u8; 7];
                for part in 1..=3 {
                    xor_into(&mut sum, coded.chunk_by_id(stripe, ChunkId::new(part, m)));
                }
                assert_eq!(coded.chunk_by_id(stripe, ChunkId::new(4, m)), sum.as_slice());
            }
        }
    }

    #[test]
    fn reconstruct_fig2_nodes_2_and_3() {
        let p = SrcParams::new(4, 2, 2, 32).unwrap();
        let file = random_file(11, 1000);
        let coded = encode(&file, &p);
        let shards = [(2, coded.shard(2)), (3, coded.shard(3))];
        assert_eq!(reconstruct(&p, file.len() as u64, &shards).unwrap(), file);
    }

    #[test]
    fn reconstruct_all_subsets_5_3_2() {
        let p = SrcParams::new(5, 3, 2, 4096).unwrap();
        let file = random_file(5, 1 << 20);
        let coded = encode(&file, &p);
        let mut count = 0;
        for a in 1..=5 {
            for b in a + 1..=5 {
                for c in b + 1..=5 {
                    let shards = [(a, coded.shard(a)), (b, coded.shard(b)), (c, coded.shard(c))];
                    assert_eq!(reconstruct(&p, file.len() as u64, &shards).unwrap(), file);
                    count += 1;
                }
            }
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn reconstruct_errors() {
        let p = SrcParams::new(4, 2, 2, 8).unwrap();
        let file = random_file(1, 100);
        let coded = encode(&file, &p);
        let err = reconstruct(&p, 100, &[(1, coded.shard(1))]).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
        let err = reconstruct(&p, 100, &[(1, coded.shard(1)), (1, coded.shard(1))]).unwrap_err();
        assert!(matches!(err, Error::InvalidParams(_)));
        let short = &coded.shard(2)[1..];
        let err = reconstruct(&p, 100, &[(1, coded.shard(1)), (2, short)]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn f1_mirrors_coded_vector() {
        let p = SrcParams::new(4, 2, 1, 8).unwrap();
        let file = random_file(2, 64);
        let coded = encode(&file, &p);
        for m in 1..=4 {
            assert_eq!(coded.chunk_by_id(0, ChunkId::new(1, m)), coded.chunk_by_id(0, ChunkId::new(2, m)));
        }
        let shards = [(3, coded.shard(3)), (4, coded.shard(4))];
        assert_eq!(reconstruct(&p, 64, &shards).unwrap(), file);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn storage_accounting(n in 3usize..10, seed: u64, len in 0usize..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..n);
            let f = rng.gen_range(1..n);
            let p = SrcParams::new(n, k, f, rng.gen_range(1..64)).unwrap();
            let coded = encode(&random_file(seed, len), &p);
            let padded = coded.stripe_count() * p.stripe_data_len();
            // stored / padded file == (f+1) n / (f k)
            proptest::prop_assert_eq!(coded.total_stored_bytes() * f * k, padded * (f + 1) * n);
        }
    }
}
