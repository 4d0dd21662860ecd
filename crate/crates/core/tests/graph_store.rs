mod common;

use std::collections::HashMap;

use half::f16;
use mfgprep::graph::io::{
    read_csr, read_features, read_labels, write_csr, write_features, write_labels,
};
use mfgprep::graph::{
    generate_features, generate_labels, load_csr, parse_edge_list, save_csr, synth_graph, CsrGraph,
    Dtype, FeatureData,
};
use mfgprep::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_edges(m: usize, n: u32, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect()
}

#[test]
fn path_graph_csr() {
    let g = CsrGraph::from_edge_list(&[(0, 1), (1, 2)], 3, true).unwrap();
    assert_eq!(g.indptr(), &[0, 1, 3, 4]);
    assert_eq!(g.indices(), &[1, 0, 2, 1]);
}

#[test]
fn empty_graph() {
    let g = CsrGraph::from_edge_list(&[], 2, true).unwrap();
    assert_eq!(g.indptr(), &[0, 0, 0]);
    assert!(g.indices().is_empty());
}

#[test]
fn out_of_range_endpoint_names_the_edge() {
    match CsrGraph::from_edge_list(&[(0, 1), (1, 5), (2, 0)], 3, false) {
        Err(Error::EdgeOutOfRange { index, .. }) => assert_eq!(index, 1),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn random_graph_file_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = CsrGraph::from_edge_list(&random_edges(10_000, 3000, 1), 3000, true).unwrap();
    let p = dir.path().join("g.csr");
    save_csr(&g, &p).unwrap();
    let back = load_csr(&p).unwrap();
    assert_eq!(back, g);
    let p2 = dir.path().join("g2.csr");
    save_csr(&back, &p2).unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn synthetic_1e5_edges_round_trip() {
    let g = synth_graph(20_000, 10.0, 2.5, 3).unwrap();
    assert!(g.num_edges() >= 100_000);
    let bytes = write_csr(&g, Vec::new()).unwrap();
    assert_eq!(read_csr(&bytes[..], Some(bytes.len() as u64)).unwrap(), g);
}

#[test]
fn corrupt_files_are_reported_distinctly() {
    let g = CsrGraph::from_edge_list(&[(0, 1), (1, 2)], 3, true).unwrap();
    let bytes = write_csr(&g, Vec::new()).unwrap();
    let len = |b: &[u8]| Some(b.len() as u64);

    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(
        read_csr(&bad[..], len(&bad)),
        Err(Error::BadMagic { .. })
    ));

    let mut bad = bytes.clone();
    bad[4] = 2;
    assert!(matches!(
        read_csr(&bad[..], len(&bad)),
        Err(Error::VersionMismatch { found: 2, .. })
    ));

    let short = &bytes[..bytes.len() - 3];
    assert!(matches!(
        read_csr(short, len(short)),
        Err(Error::Truncated { .. })
    ));
    assert!(matches!(
        read_csr(short, None),
        Err(Error::Truncated { .. })
    ));

    let mut long = bytes.clone();
    long.push(0);
    assert!(matches!(
        read_csr(&long[..], len(&long)),
        Err(Error::Malformed { .. })
    ));

    // indices pointing outside the graph
    let mut bad = bytes.clone();
    let last = bad.len() - 4;
    bad[last..].copy_from_slice(&7u32.to_le_bytes());
    assert!(matches!(
        read_csr(&bad[..], len(&bad)),
        Err(Error::Malformed { .. })
    ));
}

#[test]
fn synth_is_deterministic() {
    let a = synth_graph(1000, 10.0, 2.5, 7).unwrap();
    let b = synth_graph(1000, 10.0, 2.5, 7).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, synth_graph(1000, 10.0, 2.5, 8).unwrap());
}

#[test]
fn synth_edge_count_within_five_percent() {
    for seed in 0..5 {
        let g = synth_graph(1000, 10.0, 2.5, seed).unwrap();
        let pairs = g.num_edges() as f64 / 2.0;
        assert!(
            (pairs - 5000.0).abs() <= 250.0,
            "seed {seed}: {pairs} pairs"
        );
    }
}

#[test]
fn uniform_limit_has_bounded_max_degree() {
    let g = synth_graph(1000, 10.0, f64::INFINITY, 7).unwrap();
    assert!(
        g.max_degree() as f64 <= 20.0,
        "max degree {}",
        g.max_degree()
    );
}

#[test]
fn synth_rejects_bad_parameters() {
    assert!(synth_graph(0, 1.0, 2.5, 0).is_err());
    assert!(synth_graph(10, -1.0, 2.5, 0).is_err());
    assert!(synth_graph(10, 1.0, 1.0, 0).is_err());
}

#[test]
fn features_deterministic_and_bounded() {
    let a = generate_features(3, 2, Dtype::F32, 0);
    assert_eq!(a, generate_features(3, 2, Dtype::F32, 0));
    let big = generate_features(500, 8, Dtype::F32, 1);
    assert!(big.to_f32_vec().iter().all(|x| (-1.0..=1.0).contains(x)));
    let empty = generate_features(0, 4, Dtype::F16, 0);
    assert_eq!((empty.rows(), empty.cols()), (0, 4));
}

#[test]
fn f16_storage_is_round_to_nearest_even_of_f32_source() {
    let src = generate_features(300, 16, Dtype::F32, 11);
    let half = generate_features(300, 16, Dtype::F16, 11);
    let (FeatureData::F32(a), FeatureData::F16(h)) = (src.data(), half.data()) else {
        panic!("unexpected storage");
    };
    for (x, y) in a.iter().zip(h) {
        assert_eq!(y.to_bits(), common::f16_bits_rne(*x), "value {x}");
    }
}

#[test]
fn f16_oracle_agrees_on_edge_cases() {
    let cases = [
        0.0f32,
        -0.0,
        1.0,
        -2.5,
        65504.0,
        65520.0,
        1e-8,
        5.960_464_5e-8,
        2.980_232_2e-8,
        6.1e-5,
        1.0 + 1.0 / 2048.0,
        1.0 + 3.0 / 2048.0,
        f32::INFINITY,
        1e6,
    ];
    for x in cases {
        assert_eq!(
            common::f16_bits_rne(x),
            f16::from_f32(x).to_bits(),
            "value {x}"
        );
    }
    assert_eq!(
        common::f16_bits_rne(1.0 + 1.0 / 2048.0),
        0x3c00,
        "tie rounds to even"
    );
    assert_eq!(common::f16_bits_rne(1.0 + 3.0 / 2048.0), 0x3c02);
    assert_eq!(
        common::f16_bits_to_f32(0x3555),
        f16::from_bits(0x3555).to_f32()
    );
}

#[test]
fn feature_and_label_files_round_trip() {
    for dtype in [Dtype::F16, Dtype::F32] {
        let fm = generate_features(50, 7, dtype, 2);
        let bytes = write_features(&fm, Vec::new()).unwrap();
        assert_eq!(
            bytes.len(),
            4 + 4 + 8 + 4 + 1 + 3 + 50 * 7 * dtype.size_of()
        );
        assert_eq!(
            read_features(&bytes[..], Some(bytes.len() as u64)).unwrap(),
            fm
        );
    }
    let y = generate_labels(50, 5, 3).unwrap();
    assert!(y.values().iter().all(|&v| v < 5));
    let bytes = write_labels(&y, Vec::new()).unwrap();
    assert_eq!(
        read_labels(&bytes[..], Some(bytes.len() as u64)).unwrap(),
        y
    );
}

#[test]
fn star_histogram() {
    let edges: Vec<(u32, u32)> = (1..=5).map(|i| (0, i)).collect();
    let g = CsrGraph::from_edge_list(&edges, 6, true).unwrap();
    let h = g.degree_histogram();
    assert_eq!(
        h.buckets.into_iter().collect::<Vec<_>>(),
        vec![(1, 5), (5, 1)]
    );
}

#[test]
fn histogram_conservation_and_csv() {
    let g = synth_graph(3000, 6.0, 2.2, 5).unwrap();
    let h = g.degree_histogram();
    assert_eq!(h.num_nodes(), g.num_nodes());
    assert_eq!(h.num_edges(), g.num_edges());
    let mut out = Vec::new();
    h.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("degree,count\n"));
    assert_eq!(text.lines().count(), h.buckets.len() + 1);
}

/// The products graph has 2.4M nodes and 62M edges; after adding both
/// directions its mean degree is 2 * 62M / 2.4M. A 1/100 scale synthetic
/// graph with that mean degree must report it.
#[test]
fn products_shaped_mean_degree() {
    let expected = 2.0 * 62e6 / 2.4e6;
    let g = synth_graph(24_000, expected, 2.5, 1).unwrap();
    let mean = g.degree_histogram().mean_degree();
    assert!(
        (mean - expected).abs() / expected < 0.05,
        "mean degree {mean}, expected {expected}"
    );
}

#[test]
fn edge_list_ingestion() {
    let text = "# comment\n0 1\n\n1\t2\n  2 3  \n";
    let (edges, n) = parse_edge_list(text.as_bytes()).unwrap();
    assert_eq!(edges, vec![(0, 1), (1, 2), (2, 3)]);
    assert_eq!(n, 4);
    assert!(parse_edge_list("0 1\n1 x\n".as_bytes()).is_err());
    assert!(parse_edge_list("0 1 2\n".as_bytes()).is_err());
}

fn adjacency_multiset(edges: &[(u32, u32)], undirected: bool) -> HashMap<u32, HashMap<u32, usize>> {
    let mut adj: HashMap<u32, HashMap<u32, usize>> = HashMap::new();
    for &(s, d) in edges {
        *adj.entry(s).or_default().entry(d).or_default() += 1;
        if undirected {
            *adj.entry(d).or_default().entry(s).or_default() += 1;
        }
    }
    adj
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighbor_multisets_match_input(
        n in 1u32..60,
        raw in prop::collection::vec((0u32..1000, 0u32..1000), 0..400),
        undirected in any::<bool>(),
    ) {
        let edges: Vec<(u32, u32)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let g = CsrGraph::from_edge_list(&edges, n as usize, undirected).unwrap();
        prop_assert_eq!(g.indptr()[0], 0);
        prop_assert!(g.indptr().windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*g.indptr().last().unwrap() as usize, g.num_edges());
        let expect = adjacency_multiset(&edges, undirected);
        for v in 0..n {
            let mut got: HashMap<u32, usize> = HashMap::new();
            for &u in g.neighbors(v) {
                *got.entry(u).or_default() += 1;
            }
            let empty = HashMap::new();
            prop_assert_eq!(&got, expect.get(&v).unwrap_or(&empty));
        }
        let h = g.degree_histogram();
        prop_assert_eq!(h.num_nodes(), n as usize);
        prop_assert_eq!(h.num_edges(), g.num_edges());
    }
}
