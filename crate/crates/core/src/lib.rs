//! Simple regenerating codes.
//!
//! An `(n, k, f)` code splits a file into `f` parts, encodes each with the
//! same `(n, k)` MDS code, adds one XOR parity vector across the parts and
//! places the `(f + 1) n` chunks circularly on `n` nodes. Any `k` nodes
//! rebuild the file, and any single chunk is rebuilt by XORing `f` others.
//!
//! Besides the codec this crate carries the shard/manifest file formats, a
//! discrete-event cluster repair simulator and a Markov reliability model.

pub mod codec;
pub mod error;
pub mod format;
pub mod gf;
pub mod layout;
pub mod mds;
pub mod metrics;
pub mod reliability;
pub mod repair;
pub mod scheme;
pub mod sim;
pub mod store;

pub mod cli;

pub use codec::{encode, reconstruct, CodedArray, StripeDecoder};
pub use error::{Error, Result};
pub use layout::{layout, ring_add, ring_sub, ChunkId, SrcParams, StripeLayout};
pub use repair::{
    chunk_repair_plan, degraded_read, execute_repair, node_repair_plan, repair_node, RepairPlan,
};
pub use scheme::Scheme;
pub use store::{ChunkSource, ShardStore};
