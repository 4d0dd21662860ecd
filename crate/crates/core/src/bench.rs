//! Hop-by-hop reference traces and sampler-variant sweeps.
//!
//! A trace stores, for every batch and hop, the destination list that hop
//! expanded. Replaying a record runs a single [`one_hop_mfg`] with the
//! recorded stream, so each variant is timed on exactly the same work.
//! Timings are noisy; pin the process to one core for stable numbers.
//!
//! Trace file layout (little-endian): `"TRCE"`, version u32 = 1, graph
//! checksum u64, global seed u64, record count u64, then per record
//! batch_id u64, hop u32, fanout u32, num_dst u64, num_dst x u32.

use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::binio::{LeReader, LeWriter};
use crate::error::{Error, Result};
use crate::graph::io::{create, open};
use crate::graph::CsrGraph;
use crate::hash::Fnv64;
use crate::prep::EpochPlan;
use crate::rng::HopStreams;
use crate::sampler::{feed_layer, multihop_mfg, one_hop_mfg, FanoutSpec, IdMap, SamplerVariant};

pub const TRACE_MAGIC: [u8; 4] = *b"TRCE";
pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub batch_id: u64,
    pub hop: u32,
    pub fanout: u32,
    pub dst: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub graph_checksum: u64,
    pub global_seed: u64,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn num_hops(&self) -> usize {
        self.records
            .iter()
            .map(|r| r.hop as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<W> {
        let mut w = LeWriter::new(out);
        w.bytes(&TRACE_MAGIC)?;
        w.u32(TRACE_VERSION)?;
        w.u64(self.graph_checksum)?;
        w.u64(self.global_seed)?;
        w.u64(self.records.len() as u64)?;
        for r in &self.records {
            w.u64(r.batch_id)?;
            w.u32(r.hop)?;
            w.u32(r.fanout)?;
            w.u64(r.dst.len() as u64)?;
            w.u32_slice(&r.dst)?;
        }
        w.finish()
    }

    pub fn read_from<R: Read>(input: R, len: Option<u64>) -> Result<Trace> {
        let mut r = LeReader::new(input, "trace file", len);
        r.expect_magic(TRACE_MAGIC)?;
        r.expect_version(TRACE_VERSION)?;
        let graph_checksum = r.u64()?;
        let global_seed = r.u64()?;
        let count = r.u64()?;
        // Each record takes at least 24 bytes.
        if let Some(len) = len {
            if count > len / 24 {
                return Err(Error::Truncated {
                    context: "trace file",
                });
            }
        }
        let mut records = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let batch_id = r.u64()?;
            let hop = r.u32()?;
            let fanout = r.u32()?;
            let n = r.u64()?;
            let dst = r.u32_array(n)?;
            records.push(TraceRecord {
                batch_id,
                hop,
                fanout,
                dst,
            });
        }
        r.expect_end()?;
        Ok(Trace {
            graph_checksum,
            global_seed,
            records,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.write_to(create(path)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Trace> {
        let (r, len) = open(path.as_ref())?;
        Trace::read_from(r, Some(len))
    }
}

/// Samples every batch of `plan` and records each hop's destinations.
pub fn record_trace(
    g: &CsrGraph,
    plan: &EpochPlan,
    fanouts: &FanoutSpec,
    global_seed: u64,
) -> Result<Trace> {
    let mut records = Vec::with_capacity(plan.len() * fanouts.num_hops());
    for seeds in &plan.batches {
        let mfg = multihop_mfg(g, seeds, fanouts, global_seed, SamplerVariant::fast())?;
        let globals = mfg.id_map.globals();
        // layers are outermost first; hop h is layers[L - 1 - h]
        for (h, layer) in mfg.layers.iter().rev().enumerate() {
            records.push(TraceRecord {
                batch_id: seeds.batch_id,
                hop: h as u32,
                fanout: u32::try_from(layer.fanout).map_err(|_| {
                    Error::invalid(format!("fanout {} does not fit in a trace", layer.fanout))
                })?,
                dst: globals[..layer.num_dst].to_vec(),
            });
        }
    }
    Ok(Trace {
        graph_checksum: g.checksum(),
        global_seed,
        records,
    })
}

/// [`record_trace`] followed by [`Trace::save`].
pub fn record_trace_to(
    g: &CsrGraph,
    plan: &EpochPlan,
    fanouts: &FanoutSpec,
    global_seed: u64,
    path: impl AsRef<Path>,
) -> Result<Trace> {
    let trace = record_trace(g, plan, fanouts, global_seed)?;
    trace.save(path)?;
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopTiming {
    pub hop: u32,
    pub min_s: f64,
    pub mean_s: f64,
    /// Total time of this hop in each timed repetition.
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayResult {
    pub variant: SamplerVariant,
    pub hops: Vec<HopTiming>,
    /// `None` for an empty trace.
    pub digest: Option<u64>,
}

fn check_trace(trace: &Trace, g: &CsrGraph) -> Result<()> {
    let found = g.checksum();
    if trace.graph_checksum != found {
        return Err(Error::ChecksumMismatch {
            expected: trace.graph_checksum,
            found,
        });
    }
    let n = g.num_nodes();
    for r in &trace.records {
        if let Some(&bad) = r.dst.iter().find(|&&v| v as usize >= n) {
            return Err(Error::Malformed {
                context: "trace file",
                detail: format!(
                    "node {bad} in batch {} hop {} is outside the graph",
                    r.batch_id, r.hop
                ),
            });
        }
    }
    Ok(())
}

fn replay_pass(
    trace: &Trace,
    g: &CsrGraph,
    variant: SamplerVariant,
    per_hop: &mut [f64],
) -> Result<u64> {
    let mut h = Fnv64::new();
    for r in &trace.records {
        let fanout = r.fanout as usize;
        let t = Instant::now();
        let hint = r.dst.len().saturating_mul(fanout + 1).min(g.num_nodes());
        let mut id_map = IdMap::with_destinations(variant.map_impl, &r.dst, hint)?;
        let streams = HopStreams::new(trace.global_seed, r.batch_id, r.hop);
        let layer = one_hop_mfg(g, &mut id_map, r.dst.len(), fanout, streams, variant);
        per_hop[r.hop as usize] += t.elapsed().as_secs_f64();

        h.write_u64(r.batch_id);
        h.write_u32(r.hop);
        for &u in &id_map.globals()[r.dst.len()..] {
            h.write_u32(u);
        }
        feed_layer(&mut h, &layer);
    }
    Ok(h.finish())
}

/// Replays every record with `variant`: one untimed warm-up pass, then
/// `repetitions` timed passes.
pub fn replay_variant(
    trace: &Trace,
    g: &CsrGraph,
    variant: SamplerVariant,
    repetitions: usize,
) -> Result<ReplayResult> {
    if repetitions == 0 {
        return Err(Error::invalid("at least one repetition is required"));
    }
    check_trace(trace, g)?;
    let num_hops = trace.num_hops();
    if num_hops == 0 {
        return Ok(ReplayResult {
            variant,
            hops: Vec::new(),
            digest: None,
        });
    }
    let mut scratch = vec![0.0; num_hops];
    let digest = replay_pass(trace, g, variant, &mut scratch)?;
    let mut samples = vec![Vec::with_capacity(repetitions); num_hops];
    for _ in 0..repetitions {
        let mut per_hop = vec![0.0; num_hops];
        let d = replay_pass(trace, g, variant, &mut per_hop)?;
        debug_assert_eq!(d, digest);
        for (s, t) in samples.iter_mut().zip(per_hop) {
            s.push(t);
        }
    }
    let hops = samples
        .into_iter()
        .enumerate()
        .map(|(hop, samples)| HopTiming {
            hop: hop as u32,
            min_s: samples.iter().copied().fold(f64::INFINITY, f64::min),
            mean_s: samples.iter().sum::<f64>() / samples.len() as f64,
            samples,
        })
        .collect();
    Ok(ReplayResult {
        variant,
        hops,
        digest: Some(digest),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub variant: String,
    pub hop: u32,
    pub time_s: f64,
    pub speedup_vs_baseline: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub baseline: SamplerVariant,
    pub results: Vec<ReplayResult>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Columns `variant,hop,time_s,speedup_vs_baseline`, one row per
    /// variant and hop.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(["variant", "hop", "time_s", "speedup_vs_baseline"])?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.write_csv(create(path)?)
    }

    /// Per-variant total of the min-of-R hop times.
    pub fn totals(&self) -> Vec<(SamplerVariant, f64)> {
        self.results
            .iter()
            .map(|r| (r.variant, r.hops.iter().map(|h| h.min_s).sum()))
            .collect()
    }
}

fn speedup(base: f64, t: f64) -> f64 {
    if t > 0.0 {
        base / t
    } else if base > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Replays `trace` with every variant and compares each against `baseline`.
///
/// Fails with [`Error::DigestMismatch`] if any variant's output differs
/// from the baseline's.
pub fn sweep(
    trace: &Trace,
    g: &CsrGraph,
    variants: &[SamplerVariant],
    baseline: SamplerVariant,
    repetitions: usize,
) -> Result<SweepResult> {
    if !variants.contains(&baseline) {
        return Err(Error::invalid(format!(
            "baseline {baseline} is not among the swept variants"
        )));
    }
    let base = replay_variant(trace, g, baseline, repetitions)?;
    let mut results = Vec::with_capacity(variants.len());
    for &v in variants {
        let r = if v == baseline {
            base.clone()
        } else {
            replay_variant(trace, g, v, repetitions)?
        };
        if r.digest != base.digest {
            let show =
                |d: Option<u64>| d.map_or_else(|| "none".to_string(), |d| format!("{d:#018x}"));
            return Err(Error::DigestMismatch {
                variant: v.to_string(),
                expected: show(base.digest),
                found: show(r.digest),
            });
        }
        results.push(r);
    }
    let rows = results
        .iter()
        .flat_map(|r| {
            r.hops.iter().zip(&base.hops).map(|(h, b)| SweepRow {
                variant: r.variant.to_string(),
                hop: h.hop,
                time_s: h.min_s,
                speedup_vs_baseline: if r.variant == baseline {
                    1.0
                } else {
                    speedup(b.min_s, h.min_s)
                },
            })
        })
        .collect();
    Ok(SweepResult {
        baseline,
        results,
        rows,
    })
}
