//! On-disk shard files and the TOML manifest that ties them together.
//!
//! A shard file is a fixed little-endian header, one SHA-256 digest per chunk,
//! then the chunk bytes in the node's layout order. See `docs/FORMAT.md`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::layout::SrcParams;
use crate::mds::CONSTRUCTION_ID;

pub const SHARD_MAGIC: [u8; 8] = *b"SRCSHARD";
pub const SHARD_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 52;
pub const DIGEST_LEN: usize = 32;

pub const MANIFEST_VERSION: u32 = 1;
pub const DIGEST_ALGORITHM: &str = "sha256";

pub fn sha256(data: &[u8]) -> [u8; DIGEST_LEN] {
    Sha256::digest(data).into()
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(sha256(data))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardHeader {
    pub node: usize,
    pub params: SrcParams,
    pub stripe_count: usize,
    pub file_size: u64,
}

impl ShardHeader {
    pub fn chunk_count(&self) -> usize {
        self.stripe_count * self.params.chunks_per_node()
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.chunk_count() * (DIGEST_LEN + self.params.chunk_size())
    }
}

fn to_u16(v: usize, what: &str) -> Result<u16> {
    u16::try_from(v).map_err(|_| Error::params(format!("{what} = {v} does not fit the shard header")))
}

/// Serializes `shard` (the node's chunks, stripe after stripe) with its header.
pub fn encode_shard(header: &ShardHeader, shard: &[u8]) -> Result<Vec<u8>> {
    let p = &header.params;
    let cs = p.chunk_size();
    if shard.len() != header.chunk_count() * cs {
        return Err(Error::shape(format!(
            "shard holds {} bytes, header describes {} chunks of {cs}",
            shard.len(),
            header.chunk_count()
        )));
    }
    let mut out = Vec::with_capacity(header.encoded_len());
    out.extend_from_slice(&SHARD_MAGIC);
    for v in [SHARD_VERSION, to_u16(header.node, "node")?, to_u16(p.n(), "n")?, to_u16(p.k(), "k")?, to_u16(p.f(), "f")?, 0] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in [cs as u64, header.stripe_count as u64, header.file_size, header.chunk_count() as u64] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    debug_assert_eq!(out.len(), HEADER_LEN);
    for chunk in shard.chunks(cs) {
        out.extend_from_slice(&sha256(chunk));
    }
    out.extend_from_slice(shard);
    Ok(out)
}

fn malformed(reason: impl Into<String>) -> Error {
    Error::Format {
        what: "shard",
        reason: reason.into(),
    }
}

/// Parses a shard file and checks every chunk digest.
pub fn decode_shard(bytes: &[u8]) -> Result<(ShardHeader, Vec<u8>)> {
    if bytes.len() < HEADER_LEN {
        return Err(malformed(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if bytes[..8] != SHARD_MAGIC {
        return Err(malformed("bad magic"));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]) as usize;
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u16_at(8) as u16;
    if version != SHARD_VERSION {
        return Err(malformed(format!("unsupported version {version}")));
    }
    let (node, n, k, f) = (u16_at(10), u16_at(12), u16_at(14), u16_at(16));
    if u16_at(18) != 0 {
        return Err(malformed("reserved header field is nonzero"));
    }
    let cs = usize::try_from(u64_at(20)).map_err(|_| malformed("chunk size overflows"))?;
    let stripe_count = usize::try_from(u64_at(28)).map_err(|_| malformed("stripe count overflows"))?;
    let file_size = u64_at(36);
    let chunk_count = u64_at(44);
    let params = SrcParams::new(n, k, f, cs).map_err(|e| malformed(e.to_string()))?;
    if node == 0 || node > n {
        return Err(malformed(format!("node {node} outside 1..={n}")));
    }
    let header = ShardHeader {
        node,
        params,
        stripe_count,
        file_size,
    };
    if chunk_count != header.chunk_count() as u64 {
        return Err(malformed(format!("chunk count {chunk_count} disagrees with stripe count {stripe_count}")));
    }
    if bytes.len() != header.encoded_len() {
        return Err(malformed(format!("length {} but header implies {}", bytes.len(), header.encoded_len())));
    }
    let digests_end = HEADER_LEN + header.chunk_count() * DIGEST_LEN;
    let data = &bytes[digests_end..];
    for (i, (chunk, want)) in data.chunks(cs).zip(bytes[HEADER_LEN..digests_end].chunks(DIGEST_LEN)).enumerate() {
        if sha256(chunk)[..] != *want {
            let per = params.chunks_per_node();
            return Err(Error::Integrity(format!(
                "node {node} stripe {} slot {} fails its chunk digest",
                i / per,
                i % per
            )));
        }
    }
    Ok((header, data.to_vec()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardEntry {
    pub node: usize,
    /// Relative to the manifest's directory.
    pub file: String,
    /// Of the whole shard file.
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub digest_algorithm: String,
    pub construction_id: String,
    pub params: SrcParams,
    pub file_size: u64,
    pub stripe_count: usize,
    pub file_digest: String,
    pub shards: Vec<ShardEntry>,
}

pub fn shard_file_name(node: usize) -> String {
    format!("node_{node:03}.shard")
}

impl Manifest {
    pub fn new(params: SrcParams, file_size: u64, stripe_count: usize, file_digest: String) -> Self {
        Manifest {
            format_version: MANIFEST_VERSION,
            digest_algorithm: DIGEST_ALGORITHM.to_string(),
            construction_id: CONSTRUCTION_ID.to_string(),
            params,
            file_size,
            stripe_count,
            file_digest,
            shards: Vec::new(),
        }
    }

    pub fn entry(&self, node: usize) -> Option<&ShardEntry> {
        self.shards.iter().find(|e| e.node == node)
    }

    pub fn header_for(&self, node: usize) -> ShardHeader {
        ShardHeader {
            node,
            params: self.params,
            stripe_count: self.stripe_count,
            file_size: self.file_size,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::Format { what: "manifest", reason };
        if self.format_version != MANIFEST_VERSION {
            return Err(bad(format!("unsupported format_version {}", self.format_version)));
        }
        if self.digest_algorithm != DIGEST_ALGORITHM {
            return Err(bad(format!("unsupported digest algorithm {:?}", self.digest_algorithm)));
        }
        if self.construction_id != CONSTRUCTION_ID {
            return Err(bad(format!("unknown generator construction {:?}", self.construction_id)));
        }
        if self.params.stripe_count(self.file_size) != self.stripe_count {
            return Err(bad(format!("stripe_count {} does not fit file_size {}", self.stripe_count, self.file_size)));
        }
        let mut nodes: Vec<usize> = self.shards.iter().map(|e| e.node).collect();
        nodes.sort_unstable();
        if nodes != (1..=self.params.n()).collect::<Vec<_>>() {
            return Err(bad(format!("shard list must name nodes 1..={} once each", self.params.n())));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| Error::Format {
            what: "manifest",
            reason: e.to_string(),
        })?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode;

    fn sample() -> (crate::codec::CodedArray, Vec<u8>) {
        let params = SrcParams::new(5, 3, 2, 16).unwrap();
        let file: Vec<u8> = (0..500u32).map(|i| (i * 7 + 3) as u8).collect();
        (encode(&file, &params), file)
    }

    #[test]
    fn shard_round_trip() {
        let (coded, _) = sample();
        for node in 1..=5 {
            let h = ShardHeader {
                node,
                params: *coded.params(),
                stripe_count: coded.stripe_count(),
                file_size: coded.file_size(),
            };
            let bytes = encode_shard(&h, coded.shard(node)).unwrap();
            assert_eq!(bytes.len(), h.encoded_len());
            assert_eq!(&bytes[..8], b"SRCSHARD");
            let (h2, data) = decode_shard(&bytes).unwrap();
            assert_eq!(h2, h);
            assert_eq!(data, coded.shard(node));
        }
    }

    #[test]
    fn header_layout_is_fixed() {
        let h = ShardHeader {
            node: 2,
            params: SrcParams::new(4, 2, 2, 3).unwrap(),
            stripe_count: 1,
            file_size: 10,
        };
        let bytes = encode_shard(&h, &[0u8; 9]).unwrap();
        let expect_prefix: Vec<u8> = [
            &b"SRCSHARD"[..],
            &[1, 0, 2, 0, 4, 0, 2, 0, 2, 0, 0, 0],
            &3u64.to_le_bytes(),
            &1u64.to_le_bytes(),
            &10u64.to_le_bytes(),
            &3u64.to_le_bytes(),
        ]
        .concat();
        assert_eq!(&bytes[..HEADER_LEN], &expect_prefix[..]);
        assert_eq!(bytes.len(), HEADER_LEN + 3 * 32 + 9);
    }

    #[test]
    fn corruption_detected() {
        let (coded, _) = sample();
        let h = ShardHeader {
            node: 3,
            params: *coded.params(),
            stripe_count: coded.stripe_count(),
            file_size: coded.file_size(),
        };
        let mut bytes = encode_shard(&h, coded.shard(3)).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        assert!(matches!(decode_shard(&bytes), Err(Error::Integrity(_))));
        assert!(matches!(decode_shard(&bytes[..40]), Err(Error::Format { .. })));
        let mut wrong = encode_shard(&h, coded.shard(3)).unwrap();
        wrong[0] = b'X';
        assert!(matches!(decode_shard(&wrong), Err(Error::Format { .. })));
        wrong = encode_shard(&h, coded.shard(3)).unwrap();
        wrong.pop();
        assert!(matches!(decode_shard(&wrong), Err(Error::Format { .. })));
        wrong = encode_shard(&h, coded.shard(3)).unwrap();
        wrong[18] = 1;
        assert!(matches!(decode_shard(&wrong), Err(Error::Format { .. })));
    }

    #[test]
    fn manifest_round_trip_and_checks() {
        let (coded, file) = sample();
        let mut m = Manifest::new(*coded.params(), coded.file_size(), coded.stripe_count(), sha256_hex(&file));
        for node in 1..=5 {
            m.shards.push(ShardEntry {
                node,
                file: shard_file_name(node),
                digest: "00".into(),
            });
        }
        let text = m.to_toml();
        assert_eq!(Manifest::from_toml(&text).unwrap(), m);

        let mut bad = m.clone();
        bad.construction_id = "vandermonde".into();
        assert!(Manifest::from_toml(&bad.to_toml()).is_err());
        let mut bad = m.clone();
        bad.shards.pop();
        assert!(Manifest::from_toml(&bad.to_toml()).is_err());
        let mut bad = m.clone();
        bad.stripe_count += 1;
        assert!(Manifest::from_toml(&bad.to_toml()).is_err());
        assert!(Manifest::from_toml(&text.replace("k = 3", "k = 5")).is_err());
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
