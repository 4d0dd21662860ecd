//! Prepares one epoch of batches on several worker threads and checks the
//! result does not depend on the thread count.

use mfgprep::graph::{generate_features, generate_labels, synth_graph, Dtype};
use mfgprep::prep::{
    make_epoch_plan, run_epoch_prep, write_throughput_csv, PrepConfig, PrepInputs,
};
use mfgprep::{FanoutSpec, SamplerVariant};

pub fn run_example() -> mfgprep::Result<()> {
    let n = 6_000;
    let g = synth_graph(n, 10.0, 2.5, 1)?;
    let x = generate_features(n, 32, Dtype::F16, 1);
    let y = generate_labels(n, 10, 1)?;
    let inputs = PrepInputs::new(&g, &x, &y)?;
    let plan = make_epoch_plan(&(0..n as u32).collect::<Vec<_>>(), 256, 5)?;

    let mut rows = Vec::new();
    let mut digests = Vec::new();
    for workers in [1, 2, 4] {
        let cfg = PrepConfig::new(workers, FanoutSpec::default(), SamplerVariant::fast());
        let (digest, report) = run_epoch_prep(&inputs, &plan, &cfg, 0, |batches| {
            batches
                .map(|b| b.map(|b| b.digest()))
                .collect::<mfgprep::Result<Vec<u64>>>()
        })?;
        digests.push(digest?);
        println!(
            "{workers} workers: {:.1} ms, peak {} buffers",
            report.wall_s * 1e3,
            report.peak_resident
        );
        rows.push(report.throughput_row());
    }
    assert!(digests.windows(2).all(|w| w[0] == w[1]));
    write_throughput_csv(&rows, std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> mfgprep::Result<()> {
    run_example()
}
