use std::time::Instant;

use super::pool::PinnedBuffer;
use super::slice::{slice_features, slice_labels};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, FeatureMatrix, LabelVector};
use crate::hash::Fnv64;
use crate::sampler::{multihop_mfg, FanoutSpec, Mfg, SamplerVariant, SeedBatch};

/// The immutable inputs every prep worker reads.
#[derive(Debug, Clone, Copy)]
pub struct PrepInputs<'a> {
    pub graph: &'a CsrGraph,
    pub features: &'a FeatureMatrix,
    pub labels: &'a LabelVector,
}

impl<'a> PrepInputs<'a> {
    pub fn new(
        graph: &'a CsrGraph,
        features: &'a FeatureMatrix,
        labels: &'a LabelVector,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        if features.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows for a {n}-node graph",
                features.rows()
            )));
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for a {n}-node graph",
                labels.len()
            )));
        }
        Ok(PrepInputs {
            graph,
            features,
            labels,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BatchTiming {
    pub batch_id: u64,
    pub worker: usize,
    pub sampling_s: f64,
    pub slicing_s: f64,
    /// Completion time relative to the start of the epoch's preparation.
    pub finished_at_s: f64,
}

/// An MFG together with its sliced features and labels.
#[derive(Debug)]
pub struct PreparedBatch {
    pub mfg: Mfg,
    /// `mfg.num_nodes() x feature_dim` values, row `i` belonging to local
    /// node `i`.
    pub features: PinnedBuffer,
    /// Labels of the seed nodes, in seed order.
    pub labels: Vec<u32>,
    pub feature_dim: usize,
    pub byte_size: usize,
    pub timing: BatchTiming,
}

impl PreparedBatch {
    pub fn batch_id(&self) -> u64 {
        self.mfg.seeds.batch_id
    }

    pub fn num_nodes(&self) -> usize {
        self.mfg.num_nodes()
    }

    pub fn num_edges(&self) -> usize {
        self.mfg.num_edges()
    }

    /// `(num_src, num_edges)` per MFG layer.
    pub fn stats(&self) -> Vec<(usize, usize)> {
        self.mfg.layer_stats()
    }

    pub fn feature_row(&self, local: usize) -> &[f32] {
        &self.features[local * self.feature_dim..(local + 1) * self.feature_dim]
    }

    /// Digest over the MFG, feature bits and labels; timings excluded.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv64::new();
        self.mfg.feed_digest(&mut h);
        for x in self.features.iter() {
            h.write_u32(x.to_bits());
        }
        for &y in &self.labels {
            h.write_u32(y);
        }
        h.finish()
    }
}

pub(crate) fn prepare_into(
    inputs: &PrepInputs<'_>,
    seeds: &SeedBatch,
    fanouts: &FanoutSpec,
    variant: SamplerVariant,
    global_seed: u64,
    mut buffer: PinnedBuffer,
) -> Result<PreparedBatch> {
    let t0 = Instant::now();
    let mfg = multihop_mfg(inputs.graph, seeds, fanouts, global_seed, variant)?;
    let t1 = Instant::now();
    let f = inputs.features.cols();
    buffer.set_len(mfg.num_nodes() * f);
    slice_features(inputs.features, &mfg.id_map, &mut buffer)?;
    let labels = slice_labels(inputs.labels, seeds);
    let t2 = Instant::now();
    let byte_size = buffer.len() * 4
        + labels.len() * 4
        + mfg.layers.iter().map(|l| l.byte_size()).sum::<usize>();
    Ok(PreparedBatch {
        timing: BatchTiming {
            batch_id: seeds.batch_id,
            worker: 0,
            sampling_s: (t1 - t0).as_secs_f64(),
            slicing_s: (t2 - t1).as_secs_f64(),
            finished_at_s: 0.0,
        },
        mfg,
        features: buffer,
        labels,
        feature_dim: f,
        byte_size,
    })
}

/// Samples the MFG of `seeds` and slices its features and labels into a
/// freshly allocated buffer.
///
/// `byte_size` counts the sliced features (f32), the labels (u32) and every
/// layer's CSR arrays (u32).
pub fn prepare_batch(
    inputs: &PrepInputs<'_>,
    seeds: &SeedBatch,
    fanouts: &FanoutSpec,
    variant: SamplerVariant,
    global_seed: u64,
) -> Result<PreparedBatch> {
    prepare_into(
        inputs,
        seeds,
        fanouts,
        variant,
        global_seed,
        PinnedBuffer::unpooled(Vec::new()),
    )
}
