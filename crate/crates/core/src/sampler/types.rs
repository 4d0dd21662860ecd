use std::str::FromStr;

use super::id_map::{check_distinct, IdMap};
use crate::error::{Error, Result};
use crate::hash::Fnv64;

/// Per-hop fanouts. Entry 0 applies to the hop that expands the seed
/// batch, entry 1 to the next expansion, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FanoutSpec {
    per_hop: Vec<usize>,
}

impl FanoutSpec {
    pub fn new(per_hop: Vec<usize>) -> Result<Self> {
        if per_hop.is_empty() {
            return Err(Error::invalid("at least one fanout is required"));
        }
        Ok(FanoutSpec { per_hop })
    }

    pub fn per_hop(&self) -> &[usize] {
        &self.per_hop
    }

    pub fn num_hops(&self) -> usize {
        self.per_hop.len()
    }

    /// Upper bound on the node count of an MFG grown from `seeds` nodes.
    pub fn max_nodes(&self, seeds: usize) -> usize {
        let mut frontier = seeds;
        let mut total = seeds;
        for &d in &self.per_hop {
            frontier = frontier.saturating_mul(d);
            total = total.saturating_add(frontier);
        }
        total
    }
}

impl Default for FanoutSpec {
    fn default() -> Self {
        FanoutSpec {
            per_hop: vec![15, 10, 5],
        }
    }
}

impl FromStr for FanoutSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let per_hop = s
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| {
                    Error::invalid(format!("fanout {t:?} is not a non-negative integer"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FanoutSpec::new(per_hop)
    }
}

/// The destination nodes of one mini-batch.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeedBatch {
    pub batch_id: u64,
    dst_ids: Vec<u32>,
}

impl SeedBatch {
    pub fn new(batch_id: u64, dst_ids: Vec<u32>) -> Result<Self> {
        check_distinct(&dst_ids)?;
        Ok(SeedBatch { batch_id, dst_ids })
    }

    pub(crate) fn new_unchecked(batch_id: u64, dst_ids: Vec<u32>) -> Self {
        SeedBatch { batch_id, dst_ids }
    }

    pub fn dst_ids(&self) -> &[u32] {
        &self.dst_ids
    }

    pub fn len(&self) -> usize {
        self.dst_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dst_ids.is_empty()
    }
}

/// One bipartite hop of an MFG in CSR-by-destination form over local IDs.
///
/// Destinations are the locals `0..num_dst`, sources `0..num_src`; the
/// sampled sources of destination `j` are `src[indptr[j]..indptr[j + 1]]`
/// in acceptance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MfgLayer {
    pub num_dst: usize,
    pub num_src: usize,
    pub fanout: usize,
    pub indptr: Vec<u32>,
    pub src: Vec<u32>,
}

impl MfgLayer {
    pub fn num_edges(&self) -> usize {
        self.src.len()
    }

    pub fn in_degree(&self, dst: usize) -> usize {
        (self.indptr[dst + 1] - self.indptr[dst]) as usize
    }

    pub fn sources_of(&self, dst: usize) -> &[u32] {
        &self.src[self.indptr[dst] as usize..self.indptr[dst + 1] as usize]
    }

    /// `(src_local, dst_local)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_dst).flat_map(move |d| self.sources_of(d).iter().map(move |&s| (s, d as u32)))
    }

    /// Bytes of the CSR arrays as handed to the device (u32 entries).
    pub fn byte_size(&self) -> usize {
        (self.indptr.len() + self.src.len()) * 4
    }
}

/// Message-flow graph of one mini-batch.
///
/// `layers[0]` is the outermost hop (its sources are every node in
/// `id_map`) and `layers[L - 1]` has the seed batch as destinations, so a
/// model consumes the layers in order. Destinations of every layer are a
/// prefix of its sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mfg {
    pub layers: Vec<MfgLayer>,
    pub id_map: IdMap,
    pub seeds: SeedBatch,
}

impl Mfg {
    pub fn num_nodes(&self) -> usize {
        self.id_map.len()
    }

    pub fn num_edges(&self) -> usize {
        self.layers.iter().map(MfgLayer::num_edges).sum()
    }

    /// `(num_src, num_edges)` per layer, outermost first.
    pub fn layer_stats(&self) -> Vec<(usize, usize)> {
        self.layers
            .iter()
            .map(|l| (l.num_src, l.num_edges()))
            .collect()
    }

    /// Structural digest over globals and every layer.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv64::new();
        self.feed_digest(&mut h);
        h.finish()
    }

    pub(crate) fn feed_digest(&self, h: &mut Fnv64) {
        h.write_u64(self.seeds.batch_id);
        h.write_u64(self.id_map.len() as u64);
        for &g in self.id_map.globals() {
            h.write_u32(g);
        }
        for layer in &self.layers {
            feed_layer(h, layer);
        }
    }
}

pub(crate) fn feed_layer(h: &mut Fnv64, layer: &MfgLayer) {
    h.write_u64(layer.num_dst as u64);
    h.write_u64(layer.num_src as u64);
    for &p in &layer.indptr {
        h.write_u32(p);
    }
    for &s in &layer.src {
        h.write_u32(s);
    }
}
