//! Runs a small message-passing network on a prepared batch and compares
//! it with a full-graph evaluation.

use mfgprep::graph::{generate_features, generate_labels, synth_graph, Dtype};
use mfgprep::mpnn::{full_forward, init_weights, mfg_forward, sampled_reference_forward};
use mfgprep::prep::{prepare_batch, PrepInputs};
use mfgprep::{FanoutSpec, SamplerVariant, SeedBatch};

pub fn run_example() -> mfgprep::Result<()> {
    let n = 2_000;
    let g = synth_graph(n, 6.0, 2.5, 9)?;
    let x = generate_features(n, 16, Dtype::F32, 9);
    let y = generate_labels(n, 4, 9)?;
    let inputs = PrepInputs::new(&g, &x, &y)?;
    let weights = init_weights(16, 32, 2, 9);
    let seeds = SeedBatch::new(0, vec![0, 17, 256, 1999])?;

    // fanout at least the max degree keeps every neighbor
    let all = FanoutSpec::new(vec![g.max_degree(); 2])?;
    let b = prepare_batch(&inputs, &seeds, &all, SamplerVariant::fast(), 0)?;
    let local = mfg_forward(&b.mfg, &b.features, 16, &weights)?;
    let full = full_forward(&g, &x, &weights, seeds.dst_ids(), 2)?;
    println!(
        "full neighborhood: max diff {:.2e}",
        local.max_abs_diff(&full)
    );

    let b = prepare_batch(
        &inputs,
        &seeds,
        &FanoutSpec::new(vec![5, 3])?,
        SamplerVariant::fast(),
        0,
    )?;
    let local = mfg_forward(&b.mfg, &b.features, 16, &weights)?;
    let reference = sampled_reference_forward(&b.mfg, &x, &weights)?;
    println!(
        "sampled: max diff {:.2e}, first output {:?}",
        local.max_abs_diff(&reference),
        &local.row(0)[..4]
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> mfgprep::Result<()> {
    run_example()
}
