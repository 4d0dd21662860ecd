use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CsrGraph;
use crate::error::{Error, Result};

/// Undirected multigraph with a power-law-like degree sequence.
///
/// Node `i` (before a random relabelling) gets expected degree proportional
/// to `(i + 1)^(-1 / (exponent - 1))`, scaled so the mean is `avg_degree`;
/// fractional targets are rounded stochastically and the resulting stubs
/// are paired uniformly at random (configuration model). Self-loops and
/// multi-edges may occur. `exponent = f64::INFINITY` gives every node the
/// same target degree.
pub fn synth_graph(n: usize, avg_degree: f64, exponent: f64, seed: u64) -> Result<CsrGraph> {
    if n == 0 {
        return Err(Error::invalid("synth_graph needs at least one node"));
    }
    if n > u32::MAX as usize {
        return Err(Error::invalid("node IDs must fit in 32 bits"));
    }
    if !(avg_degree.is_finite() && avg_degree >= 0.0) {
        return Err(Error::invalid(format!(
            "avg_degree must be >= 0, got {avg_degree}"
        )));
    }
    if exponent.is_nan() || exponent <= 1.0 {
        return Err(Error::invalid(format!(
            "exponent must be > 1, got {exponent}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = if exponent.is_infinite() {
        vec![1.0; n]
    } else {
        let power = -1.0 / (exponent - 1.0);
        (0..n).map(|i| ((i + 1) as f64).powf(power)).collect()
    };
    let mean_w = weights.iter().sum::<f64>() / n as f64;

    let mut labels: Vec<u32> = (0..n as u32).collect();
    labels.shuffle(&mut rng);

    let mut stubs = Vec::with_capacity((avg_degree * n as f64) as usize + n);
    for (rank, w) in weights.iter().enumerate() {
        let target = avg_degree * w / mean_w;
        let mut k = target.floor();
        if rng.random::<f64>() < target - k {
            k += 1.0;
        }
        let v = labels[rank];
        stubs.extend(std::iter::repeat_n(v, k as usize));
    }
    stubs.shuffle(&mut rng);
    let edges: Vec<(u32, u32)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    CsrGraph::from_edge_list(&edges, n, true)
}
