//! Records a sampling trace and replays it under every sampler variant.

use mfgprep::bench::{record_trace, sweep};
use mfgprep::graph::synth_graph;
use mfgprep::prep::make_epoch_plan;
use mfgprep::sampler::list_variants;
use mfgprep::{FanoutSpec, SamplerVariant};

pub fn run_example() -> mfgprep::Result<()> {
    let g = synth_graph(4_000, 10.0, 2.5, 3)?;
    let train: Vec<u32> = (0..1_000).collect();
    let plan = make_epoch_plan(&train, 128, 0)?;
    let trace = record_trace(&g, &plan, &FanoutSpec::default(), 0)?;
    println!(
        "trace: {} records over {} hops",
        trace.records.len(),
        trace.num_hops()
    );

    let result = sweep(&trace, &g, &list_variants(), SamplerVariant::baseline(), 2)?;
    let mut totals = result.totals();
    totals.sort_by(|a, b| a.1.total_cmp(&b.1));
    for (v, t) in totals.iter().take(5) {
        println!("{:<45} {:.3} ms", v.descriptor(), t * 1e3);
    }
    result.write_csv(std::io::sink())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> mfgprep::Result<()> {
    run_example()
}
