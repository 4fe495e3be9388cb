//! Code parameters, chunk coordinates and circular placement.
//!
//! Nodes and subscripts are 1-based throughout, matching the ring `{1, ..., n}`
//! on which placement is defined. Node `i` stores, in slot order,
//! `x(1)_i, x(2)_{i+1}, ..., x(f)_{i+f-1}, s_{i+f}` with indices taken on the ring.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mds::MAX_N;

/// `i ⊕ delta` on the ring `{1, ..., n}`.
pub fn ring_add(i: usize, delta: isize, n: usize) -> usize {
    debug_assert!(n >= 1 && (1..=n).contains(&i), "index {i} outside ring 1..={n}");
    let n = n as isize;
    ((i as isize - 1 + delta).rem_euclid(n) + 1) as usize
}

/// `i ⊖ delta` on the ring `{1, ..., n}`.
pub fn ring_sub(i: usize, delta: isize, n: usize) -> usize {
    ring_add(i, -delta, n)
}

/// The `(n, k, f)` triple plus the chunk size in bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SrcParams {
    n: usize,
    k: usize,
    f: usize,
    chunk_size: usize,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n: usize,
    k: usize,
    f: usize,
    chunk_size: usize,
}

impl TryFrom<RawParams> for SrcParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        SrcParams::new(r.n, r.k, r.f, r.chunk_size)
    }
}

impl From<SrcParams> for RawParams {
    fn from(p: SrcParams) -> Self {
        RawParams {
            n: p.n,
            k: p.k,
            f: p.f,
            chunk_size: p.chunk_size,
        }
    }
}

impl SrcParams {
    pub fn new(n: usize, k: usize, f: usize, chunk_size: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::params("k must be at least 1"));
        }
        if k >= n {
            return Err(Error::params(format!("k = {k} must be less than n = {n}")));
        }
        if n > MAX_N {
            return Err(Error::params(format!("n = {n} exceeds {MAX_N}")));
        }
        if f < 1 {
            return Err(Error::params("f must be at least 1"));
        }
        // A node's f+1 chunks need pairwise distinct subscripts.
        if f + 1 > n {
            return Err(Error::params(format!("f + 1 = {} must not exceed n = {n}", f + 1)));
        }
        if chunk_size < 1 {
            return Err(Error::params("chunk_size must be at least 1"));
        }
        Ok(SrcParams { n, k, f, chunk_size })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    /// Chunks stored per node per stripe.
    pub fn chunks_per_node(&self) -> usize {
        self.f + 1
    }

    /// Payload bytes carried by one stripe (`f * k` chunks).
    pub fn stripe_data_len(&self) -> usize {
        self.f * self.k * self.chunk_size
    }

    /// Bytes one node stores per stripe.
    pub fn node_stripe_len(&self) -> usize {
        self.chunks_per_node() * self.chunk_size
    }

    pub fn stripe_count(&self, file_size: u64) -> usize {
        file_size.div_ceil(self.stripe_data_len() as u64) as usize
    }

    pub fn shard_len(&self, stripe_count: usize) -> usize {
        stripe_count * self.node_stripe_len()
    }

    pub fn parity_part(&self) -> usize {
        self.f + 1
    }

    /// Human label: `x{l}_{m}` for coded chunks, `s_{m}` for parity.
    pub fn label(&self, id: ChunkId) -> String {
        if id.part == self.parity_part() {
            format!("s_{}", id.subscript)
        } else {
            format!("x{}_{}", id.part, id.subscript)
        }
    }

    pub fn is_parity(&self, id: ChunkId) -> bool {
        id.part == self.parity_part()
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<()> {
        if (1..=self.n).contains(&node) {
            Ok(())
        } else {
            Err(Error::params(format!("node {node} outside 1..={}", self.n)))
        }
    }

    pub(crate) fn check_chunk(&self, id: ChunkId) -> Result<()> {
        if (1..=self.parity_part()).contains(&id.part) && (1..=self.n).contains(&id.subscript) {
            Ok(())
        } else {
            Err(Error::params(format!("chunk {id} outside the ({}, {}, {}) layout", self.n, self.k, self.f)))
        }
    }
}

impl fmt::Display for SrcParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, self.f)
    }
}

/// Coordinate of one chunk: `part` in `1..=f` for coded vectors, `f+1` for
/// the parity vector; `subscript` in `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChunkId {
    pub part: usize,
    pub subscript: usize,
}

impl ChunkId {
    pub fn new(part: usize, subscript: usize) -> Self {
        ChunkId { part, subscript }
    }
}

impl fmt::Display for ChunkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.part, self.subscript)
    }
}

/// Per-stripe placement: which chunks each node holds, and where each chunk lives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripeLayout {
    params: SrcParams,
    by_node: Vec<Vec<ChunkId>>,
    by_chunk: Vec<usize>,
}

/// Builds the circular placement for `params`.
pub fn layout(params: &SrcParams) -> StripeLayout {
    let (n, parts) = (params.n(), params.chunks_per_node());
    let mut by_node = Vec::with_capacity(n);
    let mut by_chunk = vec![0usize; parts * n];
    for node in 1..=n {
        let chunks: Vec<ChunkId> = (1..=parts)
            .map(|part| ChunkId::new(part, ring_add(node, part as isize - 1, n)))
            .collect();
        for c in &chunks {
            by_chunk[(c.part - 1) * n + (c.subscript - 1)] = node;
        }
        by_node.push(chunks);
    }
    StripeLayout {
        params: *params,
        by_node,
        by_chunk,
    }
}

impl StripeLayout {
    pub fn params(&self) -> &SrcParams {
        &self.params
    }

    /// Chunks on `node`, in slot order.
    pub fn node_chunks(&self, node: usize) -> &[ChunkId] {
        &self.by_node[node - 1]
    }

    /// Node holding `id`.
    pub fn chunk_location(&self, id: ChunkId) -> usize {
        self.by_chunk[(id.part - 1) * self.params.n() + (id.subscript - 1)]
    }

    /// Slot index of `id` within its node (`part - 1`).
    pub fn slot_of(&self, id: ChunkId) -> usize {
        id.part - 1
    }

    /// The chunk stored on `node` for coded part / parity `part`.
    pub fn chunk_on_node(&self, node: usize, part: usize) -> ChunkId {
        self.by_node[node - 1][part - 1]
    }
}
