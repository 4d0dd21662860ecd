//! Fanout-bounded node-wise neighborhood sampling and MFG construction.
//!
//! Every [`SamplerVariant`] runs the same algorithm with different data
//! structures, so all variants produce identical MFGs for identical
//! inputs:
//!
//! * a node with `degree <= fanout` contributes all of its edge slots in
//!   CSR order and consumes no randomness;
//! * otherwise slot offsets are drawn uniformly from the node's own stream
//!   and rejected when already accepted, until `fanout` distinct slots are
//!   accepted. The accepted sequence depends only on the stream, the
//!   degree and the fanout.
//!
//! Sampled neighbors enter the [`IdMap`] on first sight, in destination
//! order and then acceptance order.

mod flat_map;
mod id_map;
mod sets;
mod types;
mod variant;

pub use flat_map::FlatMap;
pub use id_map::IdMap;
pub use types::{FanoutSpec, Mfg, MfgLayer, SeedBatch};
pub use variant::{list_variants, parse_variant_list, MapImpl, SamplerVariant, SetImpl};

pub(crate) use id_map::check_distinct;
pub(crate) use types::feed_layer;

use id_map::{IndexImpl, LocalIndex};
use sets::{BitSlotSet, HashSlotSet, SlotSet, VecSlotSet};

use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::rng::{CounterRng, HopStreams};

/// Calls `accept` with each sampled slot offset in `0..degree`.
#[inline]
fn sample_offsets<S: SlotSet>(
    degree: usize,
    fanout: usize,
    rng: &mut CounterRng,
    set: &mut S,
    mut accept: impl FnMut(usize),
) {
    if degree <= fanout {
        (0..degree).for_each(accept);
        return;
    }
    set.reset(degree);
    let mut accepted = 0;
    while accepted < fanout {
        let off = rng.below(degree as u64) as u32;
        if set.insert(off) {
            accept(off as usize);
            accepted += 1;
        }
    }
}

/// Samples up to `fanout` edge slots of `v` without replacement.
///
/// Returns absolute positions into `g.indices()`, in acceptance order. The
/// result is the same for every `set_impl`.
pub fn sample_neighbors(
    g: &CsrGraph,
    v: u32,
    fanout: usize,
    rng: &mut CounterRng,
    set_impl: SetImpl,
) -> Vec<usize> {
    fn run<S: SlotSet>(g: &CsrGraph, v: u32, fanout: usize, rng: &mut CounterRng) -> Vec<usize> {
        let slots = g.slots(v);
        let mut out = Vec::with_capacity(fanout.min(slots.len()));
        sample_offsets(slots.len(), fanout, rng, &mut S::default(), |off| {
            out.push(slots.start + off)
        });
        out
    }
    match set_impl {
        SetImpl::HashSet => run::<HashSlotSet>(g, v, fanout, rng),
        SetImpl::VectorSet => run::<VecSlotSet>(g, v, fanout, rng),
        SetImpl::BitSet => run::<BitSlotSet>(g, v, fanout, rng),
    }
}

fn hop<M: LocalIndex, S: SlotSet, const FUSED: bool>(
    g: &CsrGraph,
    globals: &mut Vec<u32>,
    index: &mut M,
    num_dst: usize,
    fanout: usize,
    streams: HopStreams,
) -> MfgLayer {
    let indices = g.indices();
    let mut set = S::default();
    let mut indptr = Vec::with_capacity(num_dst + 1);
    indptr.push(0u32);
    let mut src = Vec::with_capacity(num_dst.saturating_mul(fanout.min(64)));

    if FUSED {
        for j in 0..num_dst {
            let slots = g.slots(globals[j]);
            let mut rng = streams.stream(j as u64);
            sample_offsets(slots.len(), fanout, &mut rng, &mut set, |off| {
                let u = indices[slots.start + off];
                let (local, fresh) = index.get_or_insert(u, globals.len() as u32);
                if fresh {
                    globals.push(u);
                }
                src.push(local);
            });
            indptr.push(src.len() as u32);
        }
    } else {
        let mut sampled = Vec::with_capacity(src.capacity());
        for (j, &v) in globals[..num_dst].iter().enumerate() {
            let slots = g.slots(v);
            let mut rng = streams.stream(j as u64);
            sample_offsets(slots.len(), fanout, &mut rng, &mut set, |off| {
                sampled.push(indices[slots.start + off])
            });
            indptr.push(sampled.len() as u32);
        }
        for u in sampled {
            let (local, fresh) = index.get_or_insert(u, globals.len() as u32);
            if fresh {
                globals.push(u);
            }
            src.push(local);
        }
    }

    MfgLayer {
        num_dst,
        num_src: globals.len(),
        fanout,
        indptr,
        src,
    }
}

fn hop_with_set<M: LocalIndex>(
    g: &CsrGraph,
    globals: &mut Vec<u32>,
    index: &mut M,
    num_dst: usize,
    fanout: usize,
    streams: HopStreams,
    variant: SamplerVariant,
) -> MfgLayer {
    use SetImpl::*;
    match (variant.set_impl, variant.fuse) {
        (HashSet, false) => {
            hop::<M, HashSlotSet, false>(g, globals, index, num_dst, fanout, streams)
        }
        (HashSet, true) => hop::<M, HashSlotSet, true>(g, globals, index, num_dst, fanout, streams),
        (VectorSet, false) => {
            hop::<M, VecSlotSet, false>(g, globals, index, num_dst, fanout, streams)
        }
        (VectorSet, true) => {
            hop::<M, VecSlotSet, true>(g, globals, index, num_dst, fanout, streams)
        }
        (BitSet, false) => hop::<M, BitSlotSet, false>(g, globals, index, num_dst, fanout, streams),
        (BitSet, true) => hop::<M, BitSlotSet, true>(g, globals, index, num_dst, fanout, streams),
    }
}

/// Expands the first `num_dst` locals of `id_map` by one sampled hop.
///
/// Destination `j` samples from `streams.stream(j)`. The map implementation
/// is whatever `id_map` was built with; `variant.map_impl` is not
/// consulted. Panics if a destination is not a node of `g`.
pub fn one_hop_mfg(
    g: &CsrGraph,
    id_map: &mut IdMap,
    num_dst: usize,
    fanout: usize,
    streams: HopStreams,
    variant: SamplerVariant,
) -> MfgLayer {
    assert!(
        num_dst <= id_map.len(),
        "destinations must already be mapped"
    );
    id_map.reserve(num_dst.saturating_mul(fanout).min(g.num_nodes()));
    let IdMap { globals, index, .. } = id_map;
    match index {
        IndexImpl::Std(m) => hop_with_set(g, globals, m, num_dst, fanout, streams, variant),
        IndexImpl::Flat(m) => hop_with_set(g, globals, m, num_dst, fanout, streams, variant),
    }
}

/// Samples an `L`-hop MFG around `seeds`.
///
/// Hop `h` (0-based) uses `fanouts.per_hop()[h]` and draws from the streams
/// keyed by `(global_seed, seeds.batch_id, h, dst_position)`.
pub fn multihop_mfg(
    g: &CsrGraph,
    seeds: &SeedBatch,
    fanouts: &FanoutSpec,
    global_seed: u64,
    variant: SamplerVariant,
) -> Result<Mfg> {
    let n = g.num_nodes();
    if let Some(&bad) = seeds.dst_ids().iter().find(|&&v| v as usize >= n) {
        return Err(Error::invalid(format!(
            "seed {bad} is not a node of a {n}-node graph"
        )));
    }
    let hint = fanouts.max_nodes(seeds.len()).min(n);
    let mut id_map = IdMap::with_destinations(variant.map_impl, seeds.dst_ids(), hint)?;
    let mut layers = Vec::with_capacity(fanouts.num_hops());
    let mut num_dst = seeds.len();
    for (h, &fanout) in fanouts.per_hop().iter().enumerate() {
        let streams = HopStreams::new(global_seed, seeds.batch_id, h as u32);
        let layer = one_hop_mfg(g, &mut id_map, num_dst, fanout, streams, variant);
        num_dst = layer.num_src;
        layers.push(layer);
    }
    layers.reverse();
    Ok(Mfg {
        layers,
        id_map,
        seeds: seeds.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    fn g7() -> CsrGraph {
        // N(7) = {2, 9}
        CsrGraph::from_edge_list(&[(7, 2), (7, 9)], 10, false).unwrap()
    }

    #[test]
    fn take_all_consumes_no_randomness() {
        let g = CsrGraph::from_edge_list(&[(0, 1), (0, 2), (0, 3)], 4, false).unwrap();
        for set in SetImpl::ALL {
            let mut rng = StreamKey::new(1, 0, 0, 0).stream();
            assert_eq!(sample_neighbors(&g, 0, 5, &mut rng, set), vec![0, 1, 2]);
            assert_eq!(rng.consumed(), 0);
            assert!(sample_neighbors(&g, 0, 0, &mut rng, set).is_empty());
        }
    }

    #[test]
    fn tiny_one_hop() {
        let g = g7();
        for v in list_variants() {
            let mut m = IdMap::with_destinations(v.map_impl, &[7], 0).unwrap();
            let layer = one_hop_mfg(&g, &mut m, 1, 5, HopStreams::new(0, 0, 0), v);
            assert_eq!(m.globals(), &[7, 2, 9]);
            assert_eq!(layer.edges().collect::<Vec<_>>(), vec![(1, 0), (2, 0)]);
            assert_eq!((layer.num_dst, layer.num_src), (1, 3));
        }
    }

    #[test]
    fn isolated_destination() {
        let g = g7();
        let mut m = IdMap::with_destinations(MapImpl::StdHash, &[3, 7], 0).unwrap();
        let layer = one_hop_mfg(
            &g,
            &mut m,
            2,
            5,
            HopStreams::new(0, 0, 0),
            SamplerVariant::fast(),
        );
        assert_eq!(layer.in_degree(0), 0);
        assert_eq!(layer.in_degree(1), 2);
    }

    #[test]
    fn single_hop_chain_matches_one_hop() {
        let g = crate::graph::synth_graph(300, 8.0, 2.5, 1).unwrap();
        let seeds = SeedBatch::new(4, vec![5, 17, 42]).unwrap();
        let fan = FanoutSpec::new(vec![3]).unwrap();
        let v = SamplerVariant::baseline();
        let mfg = multihop_mfg(&g, &seeds, &fan, 9, v).unwrap();
        let mut m = IdMap::with_destinations(v.map_impl, seeds.dst_ids(), 0).unwrap();
        let layer = one_hop_mfg(&g, &mut m, 3, 3, HopStreams::new(9, 4, 0), v);
        assert_eq!(mfg.layers, vec![layer]);
        assert_eq!(mfg.id_map, m);
    }

    #[test]
    fn layers_shrink_to_seeds() {
        let g = crate::graph::synth_graph(2000, 12.0, 2.2, 3).unwrap();
        let seeds = SeedBatch::new(0, (0..32).collect()).unwrap();
        let mfg = multihop_mfg(
            &g,
            &seeds,
            &FanoutSpec::default(),
            1,
            SamplerVariant::fast(),
        )
        .unwrap();
        assert_eq!(mfg.layers.len(), 3);
        assert_eq!(mfg.layers[0].num_src, mfg.num_nodes());
        for w in mfg.layers.windows(2) {
            assert_eq!(w[0].num_dst, w[1].num_src);
        }
        assert_eq!(mfg.layers[2].num_dst, 32);
        assert_eq!(mfg.layers[2].fanout, 15);
        assert_eq!(mfg.layers[0].fanout, 5);
    }

    #[test]
    fn rejects_out_of_range_seed() {
        let g = g7();
        let seeds = SeedBatch::new(0, vec![10]).unwrap();
        assert!(multihop_mfg(
            &g,
            &seeds,
            &FanoutSpec::default(),
            0,
            SamplerVariant::fast()
        )
        .is_err());
    }
}
