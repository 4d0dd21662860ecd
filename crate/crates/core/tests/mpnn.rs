use mfgprep::graph::{generate_features, generate_labels, synth_graph, Dtype};
use mfgprep::mpnn::{
    full_forward, init_weights, mfg_forward, sampled_reference_forward, LayerWeights,
};
use mfgprep::prep::{prepare_batch, PrepInputs};
use mfgprep::{CsrGraph, FanoutSpec, FeatureMatrix, SamplerVariant, SeedBatch};

#[test]
fn single_edge_by_hand() {
    let g = CsrGraph::from_edge_list(&[(0, 1)], 2, false).unwrap();
    let x = FeatureMatrix::from_f32(2, 1, vec![2.0, 5.0]).unwrap();
    let w = [LayerWeights::new(1, 1, vec![3.0], vec![0.5]).unwrap()];
    let seeds = SeedBatch::new(0, vec![0]).unwrap();
    let mfg = multihop(&g, &seeds, vec![1]);
    let out = sampled_reference_forward(&mfg, &x, &w).unwrap();
    assert_eq!(out.data, vec![3.0 * 2.0 + 0.5 * 5.0]);
}

fn multihop(g: &CsrGraph, seeds: &SeedBatch, fan: Vec<usize>) -> mfgprep::Mfg {
    mfgprep::sampler::multihop_mfg(
        g,
        seeds,
        &FanoutSpec::new(fan).unwrap(),
        0,
        SamplerVariant::fast(),
    )
    .unwrap()
}

#[test]
fn zero_weights_give_zero_outputs() {
    let g = synth_graph(300, 5.0, 2.5, 1).unwrap();
    let x = generate_features(300, 6, Dtype::F32, 1);
    let w: Vec<LayerWeights> = vec![LayerWeights::zeros(6, 4), LayerWeights::zeros(4, 4)];
    let out = full_forward(&g, &x, &w, &[0, 5, 9], 2).unwrap();
    assert!(out.data.iter().all(|&v| v == 0.0));
}

fn instance(seed: u64, n: usize) -> (CsrGraph, FeatureMatrix, mfgprep::LabelVector) {
    (
        synth_graph(n, 6.0, 2.5, seed).unwrap(),
        generate_features(n, 8, Dtype::F16, seed),
        generate_labels(n, 3, seed).unwrap(),
    )
}

#[test]
fn unbounded_fanout_matches_full_graph() {
    for seed in 0..5 {
        let (g, x, y) = instance(seed, 1000);
        let inputs = PrepInputs::new(&g, &x, &y).unwrap();
        let w = init_weights(8, 16, 2, seed);
        let seeds = SeedBatch::new(seed, vec![3, 30, 300, 999]).unwrap();
        let fan = FanoutSpec::new(vec![g.max_degree(); 2]).unwrap();
        let b = prepare_batch(&inputs, &seeds, &fan, SamplerVariant::baseline(), seed).unwrap();
        let local = mfg_forward(&b.mfg, &b.features, 8, &w).unwrap();
        let full = full_forward(&g, &x, &w, seeds.dst_ids(), 2).unwrap();
        assert!(local.max_abs_diff(&full) <= 1e-5);
    }
}

#[test]
fn sampled_forward_matches_global_reference() {
    for seed in 0..5 {
        let (g, x, y) = instance(seed, 1000);
        let inputs = PrepInputs::new(&g, &x, &y).unwrap();
        let w = init_weights(8, 16, 3, seed);
        let seeds = SeedBatch::new(seed, (0..1000).step_by(17).collect()).unwrap();
        let b = prepare_batch(
            &inputs,
            &seeds,
            &FanoutSpec::new(vec![4, 3, 2]).unwrap(),
            SamplerVariant::fast(),
            1,
        )
        .unwrap();
        let local = mfg_forward(&b.mfg, &b.features, 8, &w).unwrap();
        let reference = sampled_reference_forward(&b.mfg, &x, &w).unwrap();
        assert_eq!((local.rows, local.cols), (seeds.len(), 16));
        assert!(local.max_abs_diff(&reference) <= 1e-6);
    }
}

/// Unbounded fanout makes the MFG independent of seed order, so permuting
/// the seeds permutes the output rows.
#[test]
fn permutation_equivariance() {
    let (g, x, y) = instance(3, 800);
    let inputs = PrepInputs::new(&g, &x, &y).unwrap();
    let w = init_weights(8, 8, 2, 3);
    let fan = FanoutSpec::new(vec![g.max_degree(); 2]).unwrap();
    let ids = vec![5u32, 50, 500, 7];
    let perm = [2usize, 0, 3, 1];
    let a = prepare_batch(
        &inputs,
        &SeedBatch::new(0, ids.clone()).unwrap(),
        &fan,
        SamplerVariant::fast(),
        0,
    )
    .unwrap();
    let permuted: Vec<u32> = perm.iter().map(|&i| ids[i]).collect();
    let b = prepare_batch(
        &inputs,
        &SeedBatch::new(0, permuted).unwrap(),
        &fan,
        SamplerVariant::fast(),
        0,
    )
    .unwrap();
    let oa = mfg_forward(&a.mfg, &a.features, 8, &w).unwrap();
    let ob = mfg_forward(&b.mfg, &b.features, 8, &w).unwrap();
    for (r, &i) in perm.iter().enumerate() {
        let diff = ob
            .row(r)
            .iter()
            .zip(oa.row(i))
            .map(|(p, q)| (p - q).abs())
            .fold(0.0f32, f32::max);
        assert!(diff <= 1e-6);
    }
}

#[test]
fn mismatched_shapes_are_rejected() {
    let (g, x, y) = instance(1, 200);
    let inputs = PrepInputs::new(&g, &x, &y).unwrap();
    let seeds = SeedBatch::new(0, vec![1, 2]).unwrap();
    let b = prepare_batch(
        &inputs,
        &seeds,
        &FanoutSpec::new(vec![2, 2]).unwrap(),
        SamplerVariant::fast(),
        0,
    )
    .unwrap();
    assert!(mfg_forward(&b.mfg, &b.features, 8, &init_weights(8, 4, 3, 0)).is_err());
    assert!(mfg_forward(&b.mfg, &b.features, 8, &init_weights(7, 4, 2, 0)).is_err());
    assert!(mfg_forward(&b.mfg, &b.features[1..], 8, &init_weights(8, 4, 2, 0)).is_err());
}
