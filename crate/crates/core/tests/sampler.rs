mod common;

use std::collections::HashSet;

use mfgprep::graph::synth_graph;
use mfgprep::rng::{HopStreams, StreamKey};
use mfgprep::sampler::{
    list_variants, multihop_mfg, one_hop_mfg, parse_variant_list, sample_neighbors, SetImpl,
};
use mfgprep::{CsrGraph, FanoutSpec, IdMap, SamplerVariant, SeedBatch};
use proptest::prelude::*;

#[test]
fn take_all_in_csr_order() {
    let g = CsrGraph::from_edge_list(&[(4, 1), (4, 0), (4, 3)], 5, false).unwrap();
    let mut rng = StreamKey::new(0, 0, 0, 0).stream();
    let slots = sample_neighbors(&g, 4, 5, &mut rng, SetImpl::BitSet);
    assert_eq!(
        slots.iter().map(|&s| g.indices()[s]).collect::<Vec<_>>(),
        vec![1, 0, 3]
    );
    assert_eq!(rng.consumed(), 0);
    assert!(sample_neighbors(&g, 4, 0, &mut rng, SetImpl::HashSet).is_empty());
}

#[test]
fn rejection_sampling_matches_scalar_oracle() {
    let edges: Vec<(u32, u32)> = (1..=10).map(|u| (0, u)).collect();
    let g = CsrGraph::from_edge_list(&edges, 11, false).unwrap();
    let key = StreamKey::new(42, 0, 0, 0);
    let expect = common::rejection_oracle(10, 3, &mut key.stream());
    for set in SetImpl::ALL {
        let got = sample_neighbors(&g, 0, 3, &mut key.stream(), set);
        assert_eq!(got, expect, "{set:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sampling_oracle_any_degree(deg in 0usize..80, d in 0usize..90, seed in any::<u64>(), pos in 0u64..1000) {
        let edges: Vec<(u32, u32)> = (0..deg as u32).map(|i| (0, 1 + i % 7)).collect();
        let g = CsrGraph::from_edge_list(&edges, 8, false).unwrap();
        let key = StreamKey::new(seed, 1, 2, pos);
        let expect = common::rejection_oracle(deg, d, &mut key.stream());
        for set in SetImpl::ALL {
            let got = sample_neighbors(&g, 0, d, &mut key.stream(), set);
            prop_assert_eq!(&got, &expect);
            prop_assert_eq!(got.len(), d.min(deg));
            prop_assert_eq!(got.iter().collect::<HashSet<_>>().len(), got.len());
        }
    }
}

#[test]
fn tiny_one_hop_example() {
    let g = CsrGraph::from_edge_list(&[(7, 2), (7, 9)], 10, false).unwrap();
    let mut m = IdMap::with_destinations(SamplerVariant::fast().map_impl, &[7], 0).unwrap();
    let layer = one_hop_mfg(
        &g,
        &mut m,
        1,
        5,
        HopStreams::new(0, 0, 0),
        SamplerVariant::fast(),
    );
    assert_eq!(m.globals(), &[7, 2, 9]);
    assert_eq!(layer.edges().collect::<Vec<_>>(), vec![(1, 0), (2, 0)]);
}

#[test]
fn all_variants_identical_on_1e4_node_graph() {
    let g = synth_graph(10_000, 12.0, 2.3, 5).unwrap();
    let variants = list_variants();
    for b in 0..3u64 {
        let seeds =
            SeedBatch::new(b, (0..10_000).step_by(37 + b as usize).take(128).collect()).unwrap();
        let base = multihop_mfg(&g, &seeds, &FanoutSpec::default(), 3, variants[0]).unwrap();
        common::check_mfg(&g, &base).unwrap();
        for &v in &variants {
            let m = multihop_mfg(&g, &seeds, &FanoutSpec::default(), 3, v).unwrap();
            assert_eq!(m.id_map.globals(), base.id_map.globals(), "{v}");
            assert_eq!(m.layers, base.layers, "{v}");
        }
    }
}

#[test]
fn zero_degree_destination() {
    let g = CsrGraph::from_edge_list(&[(0, 1)], 3, true).unwrap();
    let seeds = SeedBatch::new(0, vec![2, 0]).unwrap();
    let m = multihop_mfg(
        &g,
        &seeds,
        &FanoutSpec::new(vec![4]).unwrap(),
        0,
        SamplerVariant::baseline(),
    )
    .unwrap();
    assert_eq!(m.layers[0].in_degree(0), 0);
    assert_eq!(m.layers[0].in_degree(1), 1);
    assert_eq!(m.id_map.globals(), &[2, 0, 1]);
}

#[test]
fn unbounded_fanout_equals_bfs() {
    for seed in 0..5 {
        let g = synth_graph(3000, 5.0, 2.5, seed).unwrap();
        let fan = FanoutSpec::new(vec![g.max_degree(); 3]).unwrap();
        let seeds = SeedBatch::new(0, vec![1, 10, 100, 1000]).unwrap();
        let m = multihop_mfg(&g, &seeds, &fan, seed, SamplerVariant::fast()).unwrap();
        let bfs = common::bfs_neighborhoods(&g, seeds.dst_ids(), 3);
        let globals = m.id_map.globals();
        for (h, layer) in m.layers.iter().rev().enumerate() {
            let got: HashSet<u32> = globals[..layer.num_src].iter().copied().collect();
            assert_eq!(got, bfs[h + 1], "hop {h}");
            assert_eq!(layer.num_src, bfs[h + 1].len());
        }
    }
}

#[test]
fn single_layer_chain_is_one_hop() {
    let g = synth_graph(500, 6.0, 2.5, 1).unwrap();
    let seeds = SeedBatch::new(9, vec![3, 4, 5]).unwrap();
    for v in list_variants() {
        let m = multihop_mfg(&g, &seeds, &FanoutSpec::new(vec![2]).unwrap(), 8, v).unwrap();
        let mut id_map = IdMap::with_destinations(v.map_impl, seeds.dst_ids(), 0).unwrap();
        let layer = one_hop_mfg(&g, &mut id_map, 3, 2, HopStreams::new(8, 9, 0), v);
        assert_eq!(m.layers, vec![layer]);
        assert_eq!(m.id_map.globals(), id_map.globals());
    }
}

#[test]
fn deterministic_and_seed_sensitive() {
    let g = synth_graph(2000, 10.0, 2.5, 2).unwrap();
    let seeds = SeedBatch::new(0, (0..64).collect()).unwrap();
    let a = multihop_mfg(
        &g,
        &seeds,
        &FanoutSpec::default(),
        1,
        SamplerVariant::fast(),
    )
    .unwrap();
    let b = multihop_mfg(
        &g,
        &seeds,
        &FanoutSpec::default(),
        1,
        SamplerVariant::fast(),
    )
    .unwrap();
    let c = multihop_mfg(
        &g,
        &seeds,
        &FanoutSpec::default(),
        2,
        SamplerVariant::fast(),
    )
    .unwrap();
    assert_eq!(a, b);
    assert_eq!(a.digest(), b.digest());
    assert_ne!(a.digest(), c.digest());
}

#[test]
fn variant_catalogue() {
    let vs = list_variants();
    assert_eq!(vs.len(), 18);
    let names: HashSet<String> = vs.iter().map(|v| v.to_string()).collect();
    assert_eq!(names.len(), 18);
    assert!(names.contains("flat_probing/vector_set/fused"));
    for v in &vs {
        assert_eq!(v.to_string().parse::<SamplerVariant>().unwrap(), *v);
    }
    assert_eq!(parse_variant_list("all").unwrap(), vs);
    assert_eq!(
        parse_variant_list("std_hash/hash_set/twopass,flat_probing/bit_set/fused")
            .unwrap()
            .len(),
        2
    );
    assert!("flat/vector_set/fused".parse::<SamplerVariant>().is_err());
}

#[test]
fn multi_edges_are_distinct_slots() {
    // three parallel edges 0-1
    let g = CsrGraph::from_edge_list(&[(0, 1), (0, 1), (0, 1), (0, 2)], 3, false).unwrap();
    let seeds = SeedBatch::new(0, vec![0]).unwrap();
    for seed in 0..20 {
        let m = multihop_mfg(
            &g,
            &seeds,
            &FanoutSpec::new(vec![3]).unwrap(),
            seed,
            SamplerVariant::fast(),
        )
        .unwrap();
        assert_eq!(m.layers[0].in_degree(0), 3);
        common::check_mfg(&g, &m).unwrap();
    }
}
