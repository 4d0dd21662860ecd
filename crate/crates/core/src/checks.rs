//! The self-check suite behind `mfgprep validate`.
//!
//! Each check compares a library path against a brute-force oracle on a
//! freshly generated graph and reports pass/fail with a short detail.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::{record_trace, sweep};
use crate::error::Result;
use crate::graph::{
    generate_features, generate_labels, io, synth_graph, CsrGraph, Dtype, FeatureMatrix,
};
use crate::mpnn::{full_forward, init_weights, mfg_forward, sampled_reference_forward};
use crate::pipeline::{
    run_pipelined, run_serial, BatchWork, ComputeModel, Timeline, TransferModel,
};
use crate::prep::{make_epoch_plan, prepare_batch, run_epoch_prep, PrepConfig, PrepInputs};
use crate::rng::StreamKey;
use crate::sampler::{
    list_variants, multihop_mfg, sample_neighbors, FanoutSpec, SamplerVariant, SeedBatch, SetImpl,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateConfig {
    pub nodes: usize,
    pub avg_degree: f64,
    pub exponent: f64,
    pub feature_dim: usize,
    pub hidden: usize,
    pub fanouts: FanoutSpec,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            nodes: 2000,
            avg_degree: 8.0,
            exponent: 2.5,
            feature_dim: 16,
            hidden: 256,
            fanouts: FanoutSpec::default(),
            batch_size: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Check = std::result::Result<String, String>;

struct Ctx {
    g: CsrGraph,
    x: FeatureMatrix,
    cfg: ValidateConfig,
}

impl Ctx {
    fn seeds(&self, batch_id: u64, k: usize) -> SeedBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ batch_id.wrapping_mul(0x9e37));
        let mut ids: Vec<u32> = (0..self.g.num_nodes() as u32).collect();
        for i in 0..k.min(ids.len()) {
            let j = rng.random_range(i..ids.len());
            ids.swap(i, j);
        }
        ids.truncate(k);
        SeedBatch::new(batch_id, ids).expect("distinct by construction")
    }

    /// The configured batch size, shrunk so that `n` seeds make at least
    /// eight batches.
    fn small_batch(&self, n: usize) -> usize {
        self.cfg.batch_size.min(n / 8).max(1)
    }

    fn unbounded(&self) -> FanoutSpec {
        let d = self.g.max_degree().max(1);
        FanoutSpec::new(vec![d; self.cfg.fanouts.num_hops()]).expect("non-empty")
    }
}

fn cross_variant(ctx: &Ctx) -> Check {
    let variants = list_variants();
    let mut batches = 0;
    for b in 0..4 {
        let seeds = ctx.seeds(b, ctx.cfg.batch_size);
        let reference = multihop_mfg(&ctx.g, &seeds, &ctx.cfg.fanouts, ctx.cfg.seed, variants[0])
            .map_err(|e| e.to_string())?;
        for &v in &variants[1..] {
            let m = multihop_mfg(&ctx.g, &seeds, &ctx.cfg.fanouts, ctx.cfg.seed, v)
                .map_err(|e| e.to_string())?;
            if m != reference {
                return Err(format!("{v} differs from {} on batch {b}", variants[0]));
            }
        }
        batches += 1;
    }
    Ok(format!(
        "{} variants agree on {batches} batches",
        variants.len()
    ))
}

fn fanout_invariants(ctx: &Ctx) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let n = ctx.g.num_nodes() as u32;
    let probes = 2000;
    for p in 0..probes {
        let v = rng.random_range(0..n);
        let d = rng.random_range(0..=2 * ctx.g.degree(v) + 1);
        let set = SetImpl::ALL[p % 3];
        let slots = sample_neighbors(
            &ctx.g,
            v,
            d,
            &mut StreamKey::new(ctx.cfg.seed, p as u64, 0, 0).stream(),
            set,
        );
        let expect = d.min(ctx.g.degree(v));
        if slots.len() != expect {
            return Err(format!(
                "node {v}, fanout {d}: {} slots, expected {expect}",
                slots.len()
            ));
        }
        let range = ctx.g.slots(v);
        if slots.iter().any(|s| !range.contains(s))
            || slots.iter().collect::<HashSet<_>>().len() != slots.len()
        {
            return Err(format!(
                "node {v}, fanout {d}: slots out of range or repeated"
            ));
        }
    }
    let seeds = ctx.seeds(100, ctx.cfg.batch_size);
    let mfg = multihop_mfg(
        &ctx.g,
        &seeds,
        &ctx.cfg.fanouts,
        ctx.cfg.seed,
        SamplerVariant::fast(),
    )
    .map_err(|e| e.to_string())?;
    for layer in &mfg.layers {
        for j in 0..layer.num_dst {
            let deg = ctx.g.degree(mfg.id_map.global(j as u32));
            if layer.in_degree(j) != layer.fanout.min(deg) {
                return Err(format!(
                    "MFG in-degree {} for degree {deg}, fanout {}",
                    layer.in_degree(j),
                    layer.fanout
                ));
            }
        }
    }
    Ok(format!(
        "{probes} probes plus one {}-layer MFG",
        mfg.layers.len()
    ))
}

fn bfs_expansion(ctx: &Ctx) -> Check {
    let fan = ctx.unbounded();
    let seeds = ctx.seeds(200, 8);
    let mfg = multihop_mfg(
        &ctx.g,
        &seeds,
        &fan,
        ctx.cfg.seed,
        SamplerVariant::baseline(),
    )
    .map_err(|e| e.to_string())?;
    let mut frontier: HashSet<u32> = seeds.dst_ids().iter().copied().collect();
    let globals = mfg.id_map.globals();
    for (h, layer) in mfg.layers.iter().rev().enumerate() {
        let next: HashSet<u32> = frontier
            .iter()
            .flat_map(|&v| std::iter::once(v).chain(ctx.g.neighbors(v).iter().copied()))
            .collect();
        let got: HashSet<u32> = globals[..layer.num_src].iter().copied().collect();
        if got != next || layer.num_src != next.len() {
            return Err(format!(
                "hop {h}: {} sources, BFS gives {}",
                layer.num_src,
                next.len()
            ));
        }
        frontier = next;
    }
    Ok(format!(
        "{} nodes reached in {} hops",
        frontier.len(),
        mfg.layers.len()
    ))
}

fn forward_equivalence(ctx: &Ctx) -> Check {
    let f = ctx.x.cols();
    let weights = init_weights(f, ctx.cfg.hidden, ctx.cfg.fanouts.num_hops(), ctx.cfg.seed);
    let y = generate_labels(ctx.g.num_nodes(), 4, ctx.cfg.seed).map_err(|e| e.to_string())?;
    let inputs = PrepInputs::new(&ctx.g, &ctx.x, &y).map_err(|e| e.to_string())?;
    let seeds = ctx.seeds(300, 8);

    let full_fan = ctx.unbounded();
    let b = prepare_batch(
        &inputs,
        &seeds,
        &full_fan,
        SamplerVariant::fast(),
        ctx.cfg.seed,
    )
    .map_err(|e| e.to_string())?;
    let local = mfg_forward(&b.mfg, &b.features, f, &weights).map_err(|e| e.to_string())?;
    let full = full_forward(&ctx.g, &ctx.x, &weights, seeds.dst_ids(), weights.len())
        .map_err(|e| e.to_string())?;
    let e_full = local.max_abs_diff(&full);
    if e_full > 1e-5 {
        return Err(format!(
            "unbounded fanout: max-abs {e_full:e} vs full-graph evaluation"
        ));
    }

    let b = prepare_batch(
        &inputs,
        &seeds,
        &ctx.cfg.fanouts,
        SamplerVariant::fast(),
        ctx.cfg.seed,
    )
    .map_err(|e| e.to_string())?;
    let local = mfg_forward(&b.mfg, &b.features, f, &weights).map_err(|e| e.to_string())?;
    let reference =
        sampled_reference_forward(&b.mfg, &ctx.x, &weights).map_err(|e| e.to_string())?;
    let e_ref = local.max_abs_diff(&reference);
    if e_ref > 1e-6 {
        return Err(format!(
            "sampled fanout: max-abs {e_ref:e} vs global-index evaluation"
        ));
    }
    Ok(format!(
        "max-abs {e_full:.1e} (full), {e_ref:.1e} (sampled)"
    ))
}

fn slicing(ctx: &Ctx) -> Check {
    let y = generate_labels(ctx.g.num_nodes(), 7, ctx.cfg.seed).map_err(|e| e.to_string())?;
    let inputs = PrepInputs::new(&ctx.g, &ctx.x, &y).map_err(|e| e.to_string())?;
    let seeds = ctx.seeds(400, ctx.cfg.batch_size);
    let b = prepare_batch(
        &inputs,
        &seeds,
        &ctx.cfg.fanouts,
        SamplerVariant::fast(),
        ctx.cfg.seed,
    )
    .map_err(|e| e.to_string())?;
    for (i, &v) in b.mfg.id_map.globals().iter().enumerate() {
        if b.feature_row(i) != ctx.x.row_f32(v as usize).as_slice() {
            return Err(format!("feature row {i} (node {v}) differs"));
        }
    }
    for (j, &v) in seeds.dst_ids().iter().enumerate() {
        if b.labels[j] != y.values()[v as usize] {
            return Err(format!("label {j} (node {v}) differs"));
        }
    }
    Ok(format!("{} rows, {} labels", b.num_nodes(), b.labels.len()))
}

fn schedule_independence(ctx: &Ctx) -> Check {
    let y = generate_labels(ctx.g.num_nodes(), 4, ctx.cfg.seed).map_err(|e| e.to_string())?;
    let inputs = PrepInputs::new(&ctx.g, &ctx.x, &y).map_err(|e| e.to_string())?;
    let train: Vec<u32> = (0..ctx.g.num_nodes() as u32).step_by(3).collect();
    let plan = make_epoch_plan(&train, ctx.small_batch(train.len()), ctx.cfg.seed)
        .map_err(|e| e.to_string())?;
    let mut reference: Option<Vec<u64>> = None;
    for p in [1, 2, 8] {
        let cfg = PrepConfig::new(p, ctx.cfg.fanouts.clone(), SamplerVariant::fast());
        let (digests, _) = run_epoch_prep(&inputs, &plan, &cfg, ctx.cfg.seed, |it| {
            it.map(|b| b.map(|b| b.digest()))
                .collect::<Result<Vec<_>>>()
        })
        .map_err(|e| e.to_string())?;
        let digests = digests.map_err(|e| e.to_string())?;
        match &reference {
            None => reference = Some(digests),
            Some(r) if *r != digests => {
                return Err(format!("P={p} produced different batches than P=1"))
            }
            Some(_) => {}
        }
    }
    Ok(format!(
        "{} batches identical for P in {{1, 2, 8}}",
        plan.len()
    ))
}

/// Events replayed one at a time: whichever stage can start earliest goes
/// next. Returns `(transfer_start, transfer_end, compute_start, compute_end)`.
fn event_replay(
    work: &[BatchWork],
    tm: &TransferModel,
    cm: &ComputeModel,
    depth: Option<usize>,
) -> Vec<[f64; 4]> {
    let n = work.len();
    let mut ev = vec![[f64::NAN; 4]; n];
    let (mut nt, mut nc) = (0usize, 0usize);
    let (mut t_free, mut c_free) = (0.0f64, 0.0f64);
    while nc < n {
        let transfer_ok = nt < n
            && match depth {
                None => nt == nc,
                Some(d) => nt < nc + d,
            };
        let t_start = transfer_ok.then(|| {
            let gate = match depth {
                None => c_free,
                Some(d) if nt >= d => ev[nt - d][2],
                Some(_) => 0.0,
            };
            work[nt].ready_s.max(t_free).max(gate)
        });
        let c_start = (nc < nt).then(|| ev[nc][1].max(c_free));
        match (t_start, c_start) {
            (Some(t), c) if c.is_none_or(|c| t < c) => {
                let end = t + tm.time(work[nt].bytes);
                ev[nt][0] = t;
                ev[nt][1] = end;
                t_free = end;
                nt += 1;
            }
            (_, Some(c)) => {
                let w = &work[nc];
                let end = c + cm.time(w.num_nodes, w.num_edges);
                ev[nc][2] = c;
                ev[nc][3] = end;
                c_free = end;
                nc += 1;
            }
            _ => unreachable!("some stage can always make progress"),
        }
    }
    ev
}

fn same_events(t: &Timeline, ev: &[[f64; 4]]) -> bool {
    t.events.len() == ev.len()
        && t.events.iter().zip(ev).all(|(e, o)| {
            [
                e.transfer_start,
                e.transfer_end,
                e.compute_start,
                e.compute_end,
            ]
            .iter()
            .zip(o)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + b.abs()))
        })
}

fn pipeline_laws(ctx: &Ctx) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let cases = 100;
    for case in 0..cases {
        let n = rng.random_range(1..40);
        let depth = rng.random_range(1..4);
        let tm = TransferModel {
            bandwidth: rng.random_range(1e8..1e10),
            base_latency: rng.random_range(0.0..1e-3),
            validate_on_transfer: rng.random_bool(0.5),
            ..TransferModel::default()
        };
        let cm = ComputeModel {
            alpha: rng.random_range(0.0..2e-3),
            beta: rng.random_range(0.0..1e-7),
            gamma: rng.random_range(0.0..1e-8),
        };
        let mut ready = 0.0;
        let work: Vec<BatchWork> = (0..n)
            .map(|i| {
                ready += rng.random_range(0.0..3e-3);
                BatchWork {
                    batch_id: i as u64,
                    ready_s: ready,
                    bytes: rng.random_range(0..5_000_000),
                    num_nodes: rng.random_range(0..20_000),
                    num_edges: rng.random_range(0..200_000),
                }
            })
            .collect();
        let serial = run_serial(&work, &tm, &cm);
        let piped = run_pipelined(&work, &tm, &cm, depth).map_err(|e| e.to_string())?;
        if !same_events(&serial, &event_replay(&work, &tm, &cm, None)) {
            return Err(format!(
                "case {case}: serial schedule differs from event replay"
            ));
        }
        if !same_events(&piped, &event_replay(&work, &tm, &cm, Some(depth))) {
            return Err(format!(
                "case {case}: pipelined schedule differs from event replay"
            ));
        }
        let eps = 1e-9 * serial.makespan.max(1.0);
        if piped.makespan > serial.makespan + eps {
            return Err(format!("case {case}: pipelined slower than serial"));
        }
        if piped.makespan + eps < piped.total_transfer().max(piped.total_compute()) {
            return Err(format!("case {case}: makespan below channel bound"));
        }
        piped.check(0.0).map_err(|e| format!("case {case}: {e}"))?;
        serial.check(0.0).map_err(|e| format!("case {case}: {e}"))?;
    }
    // constant stage times: t + (n - 1) max(t, c) + c
    for (t, c) in [(2.0f64, 3.0f64), (3.0, 2.0), (1.0, 1.0)] {
        let n = 7;
        let tm = TransferModel {
            bandwidth: 1.0,
            ..TransferModel::default()
        };
        let work: Vec<BatchWork> = (0..n)
            .map(|i| BatchWork {
                batch_id: i,
                bytes: t as u64,
                ..BatchWork::default()
            })
            .collect();
        let piped =
            run_pipelined(&work, &tm, &ComputeModel::constant(c), 1).map_err(|e| e.to_string())?;
        let expect = t + (n - 1) as f64 * t.max(c) + c;
        if (piped.makespan - expect).abs() > 1e-9 {
            return Err(format!(
                "t={t}, c={c}: makespan {} != {expect}",
                piped.makespan
            ));
        }
    }
    Ok(format!("{cases} random cases plus closed forms"))
}

fn trace_sweep(ctx: &Ctx) -> Check {
    let train: Vec<u32> = (0..ctx.g.num_nodes() as u32).step_by(7).collect();
    let plan = make_epoch_plan(&train, ctx.small_batch(train.len()), ctx.cfg.seed)
        .map_err(|e| e.to_string())?;
    let trace =
        record_trace(&ctx.g, &plan, &ctx.cfg.fanouts, ctx.cfg.seed).map_err(|e| e.to_string())?;
    let s = sweep(
        &trace,
        &ctx.g,
        &list_variants(),
        SamplerVariant::baseline(),
        1,
    )
    .map_err(|e| e.to_string())?;
    Ok(format!(
        "{} variants replay {} trace records identically",
        s.results.len(),
        trace.records.len()
    ))
}

fn io_round_trip(ctx: &Ctx) -> Check {
    let bytes = io::write_csr(&ctx.g, Vec::new()).map_err(|e| e.to_string())?;
    let back = io::read_csr(&bytes[..], Some(bytes.len() as u64)).map_err(|e| e.to_string())?;
    if back != ctx.g {
        return Err("graph differs after a save/load round trip".into());
    }
    let bytes = io::write_features(&ctx.x, Vec::new()).map_err(|e| e.to_string())?;
    let back =
        io::read_features(&bytes[..], Some(bytes.len() as u64)).map_err(|e| e.to_string())?;
    if back != ctx.x {
        return Err("features differ after a save/load round trip".into());
    }
    Ok(format!(
        "{} graph bytes",
        io::write_csr(&ctx.g, Vec::new()).map_or(0, |b| b.len())
    ))
}

type CheckFn = fn(&Ctx) -> Check;

/// Runs every check on a synthetic graph built from `cfg`.
pub fn run_validation(cfg: &ValidateConfig) -> Result<ValidationReport> {
    let g = synth_graph(cfg.nodes, cfg.avg_degree, cfg.exponent, cfg.seed)?;
    let x = generate_features(cfg.nodes, cfg.feature_dim, Dtype::F16, cfg.seed);
    let ctx = Ctx {
        g,
        x,
        cfg: cfg.clone(),
    };
    let suite: [(&'static str, CheckFn); 9] = [
        ("cross_variant_equality", cross_variant),
        ("fanout_invariants", fanout_invariants),
        ("bfs_expansion", bfs_expansion),
        ("forward_equivalence", forward_equivalence),
        ("slicing", slicing),
        ("schedule_independence", schedule_independence),
        ("pipeline_laws", pipeline_laws),
        ("trace_sweep", trace_sweep),
        ("io_round_trip", io_round_trip),
    ];
    let checks = suite
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f(&ctx) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
            }
        })
        .collect();
    Ok(ValidationReport { checks })
}
