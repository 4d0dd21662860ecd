//! Epoch time as each optimization is switched on in turn.

use mfgprep::graph::{generate_features, generate_labels, synth_graph, Dtype};
use mfgprep::pipeline::{
    ablation_report, standard_configs, write_ablation_csv, ComputeModel, PrepCostModel, PrepTiming,
    TransferModel,
};
use mfgprep::prep::{make_epoch_plan, PrepInputs};
use mfgprep::FanoutSpec;

pub fn run_example() -> mfgprep::Result<()> {
    let n = 5_000;
    let g = synth_graph(n, 12.0, 2.5, 4)?;
    let x = generate_features(n, 100, Dtype::F16, 4);
    let y = generate_labels(n, 47, 4)?;
    let inputs = PrepInputs::new(&g, &x, &y)?;
    let plan = make_epoch_plan(&(0..n as u32).collect::<Vec<_>>(), 256, 0)?;
    let rows = ablation_report(
        &inputs,
        &plan,
        &FanoutSpec::default(),
        0,
        &standard_configs(20),
        &TransferModel::default(),
        &ComputeModel::default(),
        PrepTiming::Modeled(PrepCostModel::default()),
    )?;
    write_ablation_csv(&rows, std::io::stdout())?;
    assert!(rows.windows(2).all(|w| w[1].epoch_s <= w[0].epoch_s));
    Ok(())
}

#[allow(dead_code)]
fn main() -> mfgprep::Result<()> {
    run_example()
}
