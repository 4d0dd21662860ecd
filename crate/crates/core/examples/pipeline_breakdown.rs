//! Serial versus pipelined transfer/compute on a virtual clock, then a
//! short live run of the same loop.

use mfgprep::graph::{generate_features, generate_labels, synth_graph, Dtype};
use mfgprep::pipeline::{
    list_schedule, run_live_epoch, run_pipelined, run_serial, write_breakdown_csv, BatchWork,
    ComputeModel, ExecMode, PrepCostModel, TransferModel,
};
use mfgprep::prep::{make_epoch_plan, prepare_batch, PrepConfig, PrepInputs};
use mfgprep::{FanoutSpec, SamplerVariant};

pub fn run_example() -> mfgprep::Result<()> {
    let n = 4_000;
    let g = synth_graph(n, 10.0, 2.5, 2)?;
    let x = generate_features(n, 64, Dtype::F16, 2);
    let y = generate_labels(n, 10, 2)?;
    let inputs = PrepInputs::new(&g, &x, &y)?;
    let plan = make_epoch_plan(&(0..n as u32).collect::<Vec<_>>(), 256, 0)?;
    let fanouts = FanoutSpec::default();
    let variant = SamplerVariant::fast();

    let cost = PrepCostModel::default();
    let mut shapes = Vec::new();
    for seeds in &plan.batches {
        let b = prepare_batch(&inputs, seeds, &fanouts, variant, 0)?;
        shapes.push(BatchWork::from_prepared(&b, 0.0));
    }
    let durations: Vec<f64> = shapes
        .iter()
        .map(|w| cost.batch_time(variant, w.num_edges, w.bytes))
        .collect();
    for (w, r) in shapes.iter_mut().zip(list_schedule(&durations, 4)) {
        w.ready_s = r;
    }

    let tm = TransferModel::default();
    let cm = ComputeModel::default();
    let serial = run_serial(&shapes, &tm.with_validation(true), &cm);
    let piped = run_pipelined(&shapes, &tm, &cm, 1)?;
    write_breakdown_csv(
        &[
            ("serial".into(), serial.breakdown()),
            ("pipelined".into(), piped.breakdown()),
        ],
        std::io::stdout(),
    )?;

    let cfg = PrepConfig::new(1, FanoutSpec::new(vec![5, 5])?, variant);
    let live_tm = TransferModel {
        base_latency: 2e-3,
        ..TransferModel::default()
    };
    let (run, _) = run_live_epoch(
        &inputs,
        &plan,
        &cfg,
        0,
        &live_tm,
        &ComputeModel::constant(3e-3),
        ExecMode::default(),
    )?;
    println!(
        "live pipelined epoch: {:.1} ms",
        run.timeline.makespan * 1e3
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> mfgprep::Result<()> {
    run_example()
}
