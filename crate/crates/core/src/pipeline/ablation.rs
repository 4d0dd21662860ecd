//! Per-epoch time as optimizations are switched on one after another.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use super::models::{ComputeModel, TransferModel};
use super::sim::{list_schedule, run_pipelined, run_serial, BatchWork};
use crate::error::Result;
use crate::prep::{prepare_batch, EpochPlan, PrepInputs};
use crate::sampler::{FanoutSpec, MapImpl, SamplerVariant};

#[derive(Debug, Clone, PartialEq)]
pub struct AblationConfig {
    pub label: String,
    pub variant: SamplerVariant,
    pub prep_workers: usize,
    pub pipelined: bool,
    pub validate_on_transfer: bool,
}

/// The four cumulative configurations: baseline, fast sampler, parallel
/// batch prep on `workers` threads, then pipelined transfers without
/// validation round trips.
pub fn standard_configs(workers: usize) -> Vec<AblationConfig> {
    let row =
        |label: &str, variant, prep_workers, pipelined, validate_on_transfer| AblationConfig {
            label: label.into(),
            variant,
            prep_workers,
            pipelined,
            validate_on_transfer,
        };
    vec![
        row("None (PyG)", SamplerVariant::baseline(), 1, false, true),
        row("+ Fast sampling", SamplerVariant::fast(), 1, false, true),
        row(
            "+ Shared-memory batch prep.",
            SamplerVariant::fast(),
            workers,
            false,
            true,
        ),
        row(
            "+ Pipelined data transfers",
            SamplerVariant::fast(),
            workers,
            true,
            false,
        ),
    ]
}

/// Fixed prep costs, so that ablation rows are reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepCostModel {
    /// Seconds per sampled MFG edge with the standard-library hash map.
    pub std_hash_s_per_edge: f64,
    /// Seconds per sampled MFG edge with an open-addressing map.
    pub flat_s_per_edge: f64,
    /// Seconds per sliced feature byte.
    pub slicing_s_per_byte: f64,
}

impl Default for PrepCostModel {
    fn default() -> Self {
        PrepCostModel {
            std_hash_s_per_edge: 250e-9,
            flat_s_per_edge: 100e-9,
            slicing_s_per_byte: 0.25e-9,
        }
    }
}

impl PrepCostModel {
    pub fn batch_time(&self, variant: SamplerVariant, num_edges: u64, bytes: u64) -> f64 {
        let per_edge = match variant.map_impl {
            MapImpl::StdHash => self.std_hash_s_per_edge,
            _ => self.flat_s_per_edge,
        };
        per_edge * num_edges as f64 + self.slicing_s_per_byte * bytes as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrepTiming {
    Modeled(PrepCostModel),
    /// Prepare every batch with each row's variant and use the measured
    /// durations.
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub optimization: String,
    pub epoch_s: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn ablation_report(
    inputs: &PrepInputs<'_>,
    plan: &EpochPlan,
    fanouts: &FanoutSpec,
    global_seed: u64,
    configs: &[AblationConfig],
    tm: &TransferModel,
    cm: &ComputeModel,
    timing: PrepTiming,
) -> Result<Vec<AblationRow>> {
    // Every variant yields the same batches, so the shapes are computed once.
    let shapes: Vec<BatchWork> = plan
        .batches
        .iter()
        .map(|seeds| {
            let b = prepare_batch(inputs, seeds, fanouts, SamplerVariant::fast(), global_seed)?;
            Ok(BatchWork::from_prepared(&b, 0.0))
        })
        .collect::<Result<_>>()?;

    configs
        .iter()
        .map(|cfg| {
            let durations: Vec<f64> = match timing {
                PrepTiming::Modeled(m) => shapes
                    .iter()
                    .map(|w| m.batch_time(cfg.variant, w.num_edges, w.bytes))
                    .collect(),
                PrepTiming::Measured => plan
                    .batches
                    .iter()
                    .map(|seeds| {
                        let t = Instant::now();
                        prepare_batch(inputs, seeds, fanouts, cfg.variant, global_seed)?;
                        Ok(t.elapsed().as_secs_f64())
                    })
                    .collect::<Result<_>>()?,
            };
            let ready = list_schedule(&durations, cfg.prep_workers);
            let work: Vec<BatchWork> = shapes
                .iter()
                .zip(ready)
                .map(|(w, ready_s)| BatchWork { ready_s, ..*w })
                .collect();
            let tm = tm.with_validation(cfg.validate_on_transfer);
            let timeline = if cfg.pipelined {
                run_pipelined(&work, &tm, cm, 1)?
            } else {
                run_serial(&work, &tm, cm)
            };
            Ok(AblationRow {
                optimization: cfg.label.clone(),
                epoch_s: timeline.makespan,
            })
        })
        .collect()
}

pub fn write_ablation_csv<W: Write>(rows: &[AblationRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["optimization", "epoch_s"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
