use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, LabelVector};
use crate::sampler::{IdMap, SeedBatch};

/// Gathers the feature rows of every node in `id_map`, in local-ID order,
/// into the front of `out` (widening f16 to f32). Returns the number of
/// values written. Never truncates: a short buffer is an error.
pub fn slice_features(fm: &FeatureMatrix, id_map: &IdMap, out: &mut [f32]) -> Result<usize> {
    let f = fm.cols();
    let needed = id_map.len() * f;
    if out.len() < needed {
        return Err(Error::Capacity {
            needed,
            available: out.len(),
        });
    }
    if f == 0 {
        return Ok(0);
    }
    for (&g, row) in id_map.globals().iter().zip(out.chunks_exact_mut(f)) {
        if g as usize >= fm.rows() {
            return Err(Error::DimensionMismatch(format!(
                "node {g} has no feature row ({} rows)",
                fm.rows()
            )));
        }
        fm.read_row(g as usize, row);
    }
    Ok(needed)
}

/// Labels of the seed nodes, in seed order.
pub fn slice_labels(y: &LabelVector, seeds: &SeedBatch) -> Vec<u32> {
    let values = y.values();
    seeds
        .dst_ids()
        .iter()
        .map(|&v| values[v as usize])
        .collect()
}
