use std::collections::BTreeMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::hash::Fnv64;

/// Immutable compressed-sparse-row adjacency.
///
/// Neighbors of a node keep insertion order. Multi-edges and self-loops are
/// kept as separate edge slots; sampling operates on slots, not on distinct
/// neighbor IDs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    indptr: Vec<u64>,
    indices: Vec<u32>,
}

impl CsrGraph {
    /// Builds a graph from raw CSR arrays, checking every structural
    /// invariant.
    pub fn from_parts(indptr: Vec<u64>, indices: Vec<u32>) -> Result<Self> {
        if indptr.is_empty() {
            return Err(Error::invalid("indptr must have num_nodes + 1 entries"));
        }
        if indptr[0] != 0 {
            return Err(Error::invalid("indptr[0] must be 0"));
        }
        if let Some(w) = indptr.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::invalid(format!("indptr decreases at node {w}")));
        }
        let last = *indptr.last().unwrap();
        if last != indices.len() as u64 {
            return Err(Error::invalid(format!(
                "indptr ends at {last} but there are {} indices",
                indices.len()
            )));
        }
        let num_nodes = indptr.len() - 1;
        if num_nodes > u32::MAX as usize {
            return Err(Error::invalid("node IDs must fit in 32 bits"));
        }
        if let Some(pos) = indices.iter().position(|&v| v as usize >= num_nodes) {
            return Err(Error::invalid(format!(
                "indices[{pos}] = {} is not a node of a {num_nodes}-node graph",
                indices[pos]
            )));
        }
        Ok(CsrGraph { indptr, indices })
    }

    /// One directed slot per input edge, plus the reverse slot when
    /// `make_undirected` is set. Reverse edges already present in the input
    /// are not deduplicated.
    pub fn from_edge_list(
        edges: &[(u32, u32)],
        num_nodes: usize,
        make_undirected: bool,
    ) -> Result<Self> {
        if num_nodes > u32::MAX as usize {
            return Err(Error::invalid("node IDs must fit in 32 bits"));
        }
        let mut degree = vec![0u64; num_nodes + 1];
        for (index, &(src, dst)) in edges.iter().enumerate() {
            if src as usize >= num_nodes || dst as usize >= num_nodes {
                return Err(Error::EdgeOutOfRange {
                    index,
                    src: src.into(),
                    dst: dst.into(),
                    num_nodes,
                });
            }
            degree[src as usize + 1] += 1;
            if make_undirected {
                degree[dst as usize + 1] += 1;
            }
        }
        for v in 0..num_nodes {
            degree[v + 1] += degree[v];
        }
        let indptr = degree;
        let mut cursor: Vec<u64> = indptr[..num_nodes].to_vec();
        let mut indices = vec![0u32; indptr[num_nodes] as usize];
        for &(src, dst) in edges {
            let c = &mut cursor[src as usize];
            indices[*c as usize] = dst;
            *c += 1;
            if make_undirected {
                let c = &mut cursor[dst as usize];
                indices[*c as usize] = src;
                *c += 1;
            }
        }
        Ok(CsrGraph { indptr, indices })
    }

    pub fn num_nodes(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.indices.len()
    }

    pub fn indptr(&self) -> &[u64] {
        &self.indptr
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        (self.indptr[v + 1] - self.indptr[v]) as usize
    }

    /// Edge-slot positions of `v` in the `indices` array.
    #[inline]
    pub fn slots(&self, v: u32) -> Range<usize> {
        let v = v as usize;
        self.indptr[v] as usize..self.indptr[v + 1] as usize
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.indices[self.slots(v)]
    }

    pub fn max_degree(&self) -> usize {
        self.indptr
            .windows(2)
            .map(|w| (w[1] - w[0]) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Stable 64-bit checksum over the CSR arrays.
    pub fn checksum(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(self.num_nodes() as u64);
        h.write_u64(self.num_edges() as u64);
        for &p in &self.indptr {
            h.write_u64(p);
        }
        for &v in &self.indices {
            h.write_u32(v);
        }
        h.finish()
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut buckets = BTreeMap::new();
        for w in self.indptr.windows(2) {
            *buckets.entry((w[1] - w[0]) as usize).or_insert(0) += 1;
        }
        DegreeHistogram { buckets }
    }
}

/// Number of nodes per out-degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    pub buckets: BTreeMap<usize, usize>,
}

impl DegreeHistogram {
    pub fn num_nodes(&self) -> usize {
        self.buckets.values().sum()
    }

    pub fn num_edges(&self) -> usize {
        self.buckets.iter().map(|(d, c)| d * c).sum()
    }

    pub fn mean_degree(&self) -> f64 {
        let n = self.num_nodes();
        if n == 0 {
            0.0
        } else {
            self.num_edges() as f64 / n as f64
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["degree", "count"])?;
        for (d, c) in &self.buckets {
            w.write_record([d.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
