//! Read access to stored chunks, with per-node availability.

use crate::layout::{layout, ChunkId, SrcParams, StripeLayout};

/// Anything that can serve chunks by `(node, stripe, chunk id)`.
///
/// Implementations must return identical bytes for repeated reads while a
/// repair is in progress.
pub trait ChunkSource {
    fn params(&self) -> &SrcParams;

    fn stripe_count(&self) -> usize;

    fn is_available(&self, node: usize) -> bool;

    /// `None` if the node is unavailable or does not hold `id`.
    fn chunk(&self, node: usize, stripe: usize, id: ChunkId) -> Option<&[u8]>;

    fn live_nodes(&self) -> Vec<usize> {
        (1..=self.params().n()).filter(|&i| self.is_available(i)).collect()
    }
}

/// Whole-node shards, some of which may be missing.
#[derive(Clone, Debug)]
pub struct ShardStore<B = Vec<u8>> {
    params: SrcParams,
    layout: StripeLayout,
    stripe_count: usize,
    shards: Vec<Option<B>>,
}

impl<B: AsRef<[u8]>> ShardStore<B> {
    /// Empty store: every node unavailable.
    pub fn new(params: SrcParams, stripe_count: usize) -> Self {
        ShardStore {
            params,
            layout: layout(&params),
            stripe_count,
            shards: (0..params.n()).map(|_| None).collect(),
        }
    }

    /// Installs a shard for `node`. Panics if the length does not match the layout.
    pub fn insert(&mut self, node: usize, shard: B) {
        assert_eq!(
            shard.as_ref().len(),
            self.params.shard_len(self.stripe_count),
            "shard {node} has the wrong length"
        );
        self.shards[node - 1] = Some(shard);
    }

    pub fn remove(&mut self, node: usize) -> Option<B> {
        self.shards[node - 1].take()
    }

    pub fn shard(&self, node: usize) -> Option<&[u8]> {
        self.shards[node - 1].as_ref().map(|s| s.as_ref())
    }

    pub fn layout(&self) -> &StripeLayout {
        &self.layout
    }
}

impl<B: AsRef<[u8]>> ChunkSource for ShardStore<B> {
    fn params(&self) -> &SrcParams {
        &self.params
    }

    fn stripe_count(&self) -> usize {
        self.stripe_count
    }

    fn is_available(&self, node: usize) -> bool {
        (1..=self.params.n()).contains(&node) && self.shards[node - 1].is_some()
    }

    fn chunk(&self, node: usize, stripe: usize, id: ChunkId) -> Option<&[u8]> {
        let shard = self.shards.get(node.checked_sub(1)?)?.as_ref()?.as_ref();
        chunk_in_shard(&self.params, &self.layout, shard, node, stripe, id)
    }
}

pub(crate) fn chunk_in_shard<'a>(
    params: &SrcParams,
    layout: &StripeLayout,
    shard: &'a [u8],
    node: usize,
    stripe: usize,
    id: ChunkId,
) -> Option<&'a [u8]> {
    if params.check_chunk(id).is_err() || layout.chunk_location(id) != node {
        return None;
    }
    let cs = params.chunk_size();
    let start = stripe * params.node_stripe_len() + layout.slot_of(id) * cs;
    shard.get(start..start + cs)
}
