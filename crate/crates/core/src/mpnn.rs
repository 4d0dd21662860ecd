//! Mean-aggregation message passing with fixed weights, used to check that
//! MFGs and sliced buffers compute the same thing as full-graph evaluation.
//!
//! Layer rule: `h_v = W_self h_v' + W_neigh mean(h_u' for sampled u)`, with
//! the mean of an empty neighborhood taken as zero. Neighbor sums run in
//! edge order.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, FeatureMatrix};
use crate::sampler::Mfg;

/// Two `f_out x f_in` row-major matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    f_in: usize,
    f_out: usize,
    w_self: Vec<f32>,
    w_neigh: Vec<f32>,
}

impl LayerWeights {
    pub fn new(f_in: usize, f_out: usize, w_self: Vec<f32>, w_neigh: Vec<f32>) -> Result<Self> {
        if w_self.len() != f_in * f_out || w_neigh.len() != f_in * f_out {
            return Err(Error::DimensionMismatch(format!(
                "weights of a {f_out}x{f_in} layer need {} entries each, got {} and {}",
                f_in * f_out,
                w_self.len(),
                w_neigh.len()
            )));
        }
        Ok(LayerWeights {
            f_in,
            f_out,
            w_self,
            w_neigh,
        })
    }

    pub fn zeros(f_in: usize, f_out: usize) -> Self {
        LayerWeights {
            f_in,
            f_out,
            w_self: vec![0.0; f_in * f_out],
            w_neigh: vec![0.0; f_in * f_out],
        }
    }

    pub fn f_in(&self) -> usize {
        self.f_in
    }

    pub fn f_out(&self) -> usize {
        self.f_out
    }

    pub fn w_self(&self) -> &[f32] {
        &self.w_self
    }

    pub fn w_neigh(&self) -> &[f32] {
        &self.w_neigh
    }

    /// `out = W_self h + W_neigh m`.
    pub fn apply(&self, h: &[f32], m: &[f32], out: &mut [f32]) {
        for (o, y) in out.iter_mut().enumerate() {
            let ws = &self.w_self[o * self.f_in..(o + 1) * self.f_in];
            let wn = &self.w_neigh[o * self.f_in..(o + 1) * self.f_in];
            let mut acc = 0.0f32;
            for i in 0..self.f_in {
                acc += ws[i] * h[i];
            }
            for i in 0..self.f_in {
                acc += wn[i] * m[i];
            }
            *y = acc;
        }
    }
}

/// `L` layers with entries uniform in `[-0.1, 0.1]`; the first maps
/// `f_in -> f_hidden`, the rest `f_hidden -> f_hidden`.
pub fn init_weights(
    f_in: usize,
    f_hidden: usize,
    num_layers: usize,
    seed: u64,
) -> Vec<LayerWeights> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_layers)
        .map(|l| {
            let fi = if l == 0 { f_in } else { f_hidden };
            let mut draw = || {
                (0..fi * f_hidden)
                    .map(|_| rng.random_range(-0.1f32..=0.1))
                    .collect()
            };
            let w_self = draw();
            let w_neigh = draw();
            LayerWeights {
                f_in: fi,
                f_out: f_hidden,
                w_self,
                w_neigh,
            }
        })
        .collect()
}

/// Dense row-major node embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl Embeddings {
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs_diff(&self, other: &Embeddings) -> f32 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max)
    }
}

fn check_chain(weights: &[LayerWeights], f: usize) -> Result<()> {
    let mut dim = f;
    for (l, w) in weights.iter().enumerate() {
        if w.f_in != dim {
            return Err(Error::DimensionMismatch(format!(
                "layer {l} expects {} inputs but receives {dim}",
                w.f_in
            )));
        }
        dim = w.f_out;
    }
    Ok(())
}

fn mean_into(acc: &mut [f32], count: usize) {
    if count > 0 {
        let inv = count as f32;
        acc.iter_mut().for_each(|x| *x /= inv);
    }
}

/// Evaluates the MFG on `features`, which holds one `feature_dim` row per
/// local node. Returns one row per seed.
pub fn mfg_forward(
    mfg: &Mfg,
    features: &[f32],
    feature_dim: usize,
    weights: &[LayerWeights],
) -> Result<Embeddings> {
    if weights.len() != mfg.layers.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weight layers for a {}-layer MFG",
            weights.len(),
            mfg.layers.len()
        )));
    }
    if features.len() != mfg.num_nodes() * feature_dim {
        return Err(Error::DimensionMismatch(format!(
            "feature buffer has {} values, expected {} x {feature_dim}",
            features.len(),
            mfg.num_nodes()
        )));
    }
    check_chain(weights, feature_dim)?;

    let mut h = features.to_vec();
    let mut dim = feature_dim;
    let mut mean = vec![0.0f32; dim];
    for (layer, w) in mfg.layers.iter().zip(weights) {
        let mut next = vec![0.0f32; layer.num_dst * w.f_out];
        mean.resize(dim, 0.0);
        for j in 0..layer.num_dst {
            mean.fill(0.0);
            let srcs = layer.sources_of(j);
            for &s in srcs {
                let row = &h[s as usize * dim..(s as usize + 1) * dim];
                mean.iter_mut().zip(row).for_each(|(m, x)| *m += x);
            }
            mean_into(&mut mean, srcs.len());
            w.apply(
                &h[j * dim..(j + 1) * dim],
                &mean,
                &mut next[j * w.f_out..(j + 1) * w.f_out],
            );
        }
        h = next;
        dim = w.f_out;
    }
    Ok(Embeddings {
        rows: mfg.seeds.len(),
        cols: dim,
        data: h,
    })
}

/// Full-neighborhood evaluation of `num_layers` layers at `dsts`.
pub fn full_forward(
    g: &CsrGraph,
    x: &FeatureMatrix,
    weights: &[LayerWeights],
    dsts: &[u32],
    num_layers: usize,
) -> Result<Embeddings> {
    if num_layers == 0 {
        return Err(Error::invalid("at least one layer is required"));
    }
    if num_layers > weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{num_layers} layers requested but only {} weight layers given",
            weights.len()
        )));
    }
    if x.rows() != g.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows for a {}-node graph",
            x.rows(),
            g.num_nodes()
        )));
    }
    if let Some(&bad) = dsts.iter().find(|&&v| v as usize >= g.num_nodes()) {
        return Err(Error::invalid(format!("node {bad} is not in the graph")));
    }
    let weights = &weights[..num_layers];
    check_chain(weights, x.cols())?;

    // needed[l]: nodes whose layer-l embedding is required
    let mut needed: Vec<Vec<u32>> = vec![Vec::new(); num_layers + 1];
    needed[num_layers] = dsts.to_vec();
    for l in (0..num_layers).rev() {
        let mut seen: HashMap<u32, ()> = HashMap::new();
        let mut list = Vec::new();
        for &v in &needed[l + 1] {
            for &u in std::iter::once(&v).chain(g.neighbors(v)) {
                if seen.insert(u, ()).is_none() {
                    list.push(u);
                }
            }
        }
        needed[l] = list;
    }

    let mut prev: HashMap<u32, Vec<f32>> = needed[0]
        .iter()
        .map(|&v| (v, x.row_f32(v as usize)))
        .collect();
    for (l, w) in weights.iter().enumerate() {
        let mut mean = vec![0.0f32; w.f_in];
        let mut cur = HashMap::with_capacity(needed[l + 1].len());
        for &v in &needed[l + 1] {
            mean.fill(0.0);
            let nb = g.neighbors(v);
            for u in nb {
                mean.iter_mut().zip(&prev[u]).for_each(|(m, x)| *m += x);
            }
            mean_into(&mut mean, nb.len());
            let mut out = vec![0.0f32; w.f_out];
            w.apply(&prev[&v], &mean, &mut out);
            cur.insert(v, out);
        }
        prev = cur;
    }
    let cols = weights.last().map_or(x.cols(), |w| w.f_out);
    Ok(Embeddings {
        rows: dsts.len(),
        cols,
        data: dsts.iter().flat_map(|v| prev[v].iter().copied()).collect(),
    })
}

/// Same rule as [`mfg_forward`] but every value is looked up by global ID
/// in `x`, never through a sliced buffer.
pub fn sampled_reference_forward(
    mfg: &Mfg,
    x: &FeatureMatrix,
    weights: &[LayerWeights],
) -> Result<Embeddings> {
    if weights.len() != mfg.layers.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weight layers for a {}-layer MFG",
            weights.len(),
            mfg.layers.len()
        )));
    }
    check_chain(weights, x.cols())?;
    let globals = mfg.id_map.globals();
    let mut prev: HashMap<u32, Vec<f32>> = globals
        .iter()
        .map(|&v| (v, x.row_f32(v as usize)))
        .collect();
    for (layer, w) in mfg.layers.iter().zip(weights) {
        let mut cur = HashMap::with_capacity(layer.num_dst);
        let mut mean = vec![0.0f32; w.f_in];
        for (j, &v) in globals[..layer.num_dst].iter().enumerate() {
            mean.fill(0.0);
            let srcs = layer.sources_of(j);
            for &s in srcs {
                let u = globals[s as usize];
                mean.iter_mut().zip(&prev[&u]).for_each(|(m, x)| *m += x);
            }
            mean_into(&mut mean, srcs.len());
            let mut out = vec![0.0f32; w.f_out];
            w.apply(&prev[&v], &mean, &mut out);
            cur.insert(v, out);
        }
        prev = cur;
    }
    let cols = weights.last().map_or(x.cols(), |w| w.f_out);
    Ok(Embeddings {
        rows: mfg.seeds.len(),
        cols,
        data: mfg
            .seeds
            .dst_ids()
            .iter()
            .flat_map(|v| prev[v].iter().copied())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_features, synth_graph, Dtype};
    use crate::sampler::{multihop_mfg, FanoutSpec, SamplerVariant, SeedBatch};

    fn scalar(ws: f32, wn: f32) -> LayerWeights {
        LayerWeights::new(1, 1, vec![ws], vec![wn]).unwrap()
    }

    #[test]
    fn shapes_and_determinism() {
        let w = init_weights(8, 16, 3, 1);
        let shapes: Vec<_> = w.iter().map(|l| (l.f_out(), l.f_in())).collect();
        assert_eq!(shapes, [(16, 8), (16, 16), (16, 16)]);
        assert_eq!(w, init_weights(8, 16, 3, 1));
        assert!(w
            .iter()
            .flat_map(|l| l.w_self().iter().chain(l.w_neigh()))
            .all(|x| x.abs() <= 0.1));
    }

    #[test]
    fn mean_of_two_neighbors() {
        // dst 0 with neighbors 1 and 2
        let g = CsrGraph::from_edge_list(&[(0, 1), (0, 2)], 3, false).unwrap();
        let x = FeatureMatrix::from_f32(3, 1, vec![10.0, 1.0, 3.0]).unwrap();
        let seeds = SeedBatch::new(0, vec![0]).unwrap();
        let mfg = multihop_mfg(
            &g,
            &seeds,
            &FanoutSpec::new(vec![5]).unwrap(),
            0,
            SamplerVariant::fast(),
        )
        .unwrap();
        let buf: Vec<f32> = mfg
            .id_map
            .globals()
            .iter()
            .map(|&v| x.get(v as usize, 0))
            .collect();
        let out = mfg_forward(&mfg, &buf, 1, &[scalar(0.0, 1.0)]).unwrap();
        assert_eq!(out.data, vec![2.0]);
        let full = full_forward(&g, &x, &[scalar(0.0, 1.0)], &[0], 1).unwrap();
        assert_eq!(full.data, vec![2.0]);
    }

    #[test]
    fn isolated_node_keeps_own_feature() {
        let g = CsrGraph::from_edge_list(&[], 2, false).unwrap();
        let x = FeatureMatrix::from_f32(2, 1, vec![4.0, 7.0]).unwrap();
        let seeds = SeedBatch::new(0, vec![1]).unwrap();
        let mfg = multihop_mfg(
            &g,
            &seeds,
            &FanoutSpec::new(vec![3]).unwrap(),
            0,
            SamplerVariant::fast(),
        )
        .unwrap();
        let out = mfg_forward(&mfg, &[7.0], 1, &[scalar(1.0, 1.0)]).unwrap();
        assert_eq!(out.data, vec![7.0]);
        let full = full_forward(&g, &x, &[scalar(1.0, 1.0)], &[1], 1).unwrap();
        assert_eq!(full.data, vec![7.0]);
    }

    #[test]
    fn path_graph_by_hand() {
        // 0 - 1 - 2, h = x + mean(neighbors)
        let g = CsrGraph::from_edge_list(&[(0, 1), (1, 2)], 3, true).unwrap();
        let x = FeatureMatrix::from_f32(3, 1, vec![1.0, 2.0, 4.0]).unwrap();
        let out = full_forward(&g, &x, &[scalar(1.0, 1.0)], &[0, 1, 2], 1).unwrap();
        assert_eq!(out.data, vec![3.0, 4.5, 6.0]);
        assert!(full_forward(&g, &x, &[scalar(1.0, 1.0)], &[0], 0).is_err());
    }

    #[test]
    fn zero_weights_zero_output() {
        let g = synth_graph(200, 6.0, 2.5, 2).unwrap();
        let x = generate_features(200, 4, Dtype::F32, 3);
        let w: Vec<_> = (0..2)
            .map(|l| LayerWeights::zeros(if l == 0 { 4 } else { 5 }, 5))
            .collect();
        let seeds = SeedBatch::new(0, vec![1, 2, 3]).unwrap();
        let mfg = multihop_mfg(
            &g,
            &seeds,
            &FanoutSpec::new(vec![3, 3]).unwrap(),
            0,
            SamplerVariant::fast(),
        )
        .unwrap();
        let out = sampled_reference_forward(&mfg, &x, &w).unwrap();
        assert!(out.data.iter().all(|&v| v == 0.0));
        assert_eq!((out.rows, out.cols), (3, 5));
    }

    #[test]
    fn dimension_checks() {
        let g = synth_graph(50, 4.0, 2.5, 2).unwrap();
        let x = generate_features(50, 4, Dtype::F32, 3);
        let w = init_weights(3, 8, 1, 0);
        assert!(matches!(
            full_forward(&g, &x, &w, &[0], 1),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
