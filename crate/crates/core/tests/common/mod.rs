//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use mfgprep::graph::{CsrGraph, FeatureMatrix};
use mfgprep::pipeline::{BatchWork, ComputeModel, Timeline, TransferModel};
use mfgprep::rng::CounterRng;
use mfgprep::{IdMap, Mfg};

/// Closed `hops`-hop neighborhoods of `seeds`: entry `h` holds every node
/// within `h` hops.
pub fn bfs_neighborhoods(g: &CsrGraph, seeds: &[u32], hops: usize) -> Vec<HashSet<u32>> {
    let mut out = vec![seeds.iter().copied().collect::<HashSet<u32>>()];
    for _ in 0..hops {
        let prev = out.last().unwrap();
        let mut next = prev.clone();
        for &v in prev {
            next.extend(g.neighbors(v));
        }
        out.push(next);
    }
    out
}

/// Plain rejection sampling of `d` slot offsets out of `deg`.
pub fn rejection_oracle(deg: usize, d: usize, rng: &mut CounterRng) -> Vec<usize> {
    if deg <= d {
        return (0..deg).collect();
    }
    let mut accepted: Vec<usize> = Vec::new();
    while accepted.len() < d {
        let x = rng.below(deg as u64) as usize;
        if !accepted.contains(&x) {
            accepted.push(x);
        }
    }
    accepted
}

/// IEEE 754 binary16 bits of `x`, rounded to nearest with ties to even.
pub fn f16_bits_rne(x: f32) -> u16 {
    let b = x.to_bits();
    let sign = ((b >> 16) & 0x8000) as u16;
    let exp = ((b >> 23) & 0xff) as i32;
    let man = b & 0x7f_ffff;
    if exp == 255 {
        return sign
            | 0x7c00
            | if man != 0 {
                0x200 | (man >> 13) as u16
            } else {
                0
            };
    }
    let round = |q: u32, rem: u32, half: u32| -> u32 {
        if rem > half || (rem == half && q & 1 == 1) {
            q + 1
        } else {
            q
        }
    };
    let e = exp - 127 + 15;
    if e >= 31 {
        return sign | 0x7c00;
    }
    if e <= 0 {
        let m = if exp == 0 { man } else { man | 0x80_0000 };
        let shift = (14 - e) as u32;
        if shift > 24 {
            return sign;
        }
        let q = m >> shift;
        let rem = m & ((1 << shift) - 1);
        return sign | round(q, rem, 1 << (shift - 1)) as u16;
    }
    let q = ((e as u32) << 10) | (man >> 13);
    let r = round(q, man & 0x1fff, 0x1000);
    sign | if r >= 0x7c00 { 0x7c00 } else { r as u16 }
}

/// Binary16 bits back to f32, by hand.
pub fn f16_bits_to_f32(h: u16) -> f32 {
    let sign = if h & 0x8000 != 0 { -1.0f32 } else { 1.0 };
    let exp = ((h >> 10) & 0x1f) as i32;
    let man = (h & 0x3ff) as f32;
    match exp {
        0 => sign * man * 2f32.powi(-24),
        31 if man == 0.0 => sign * f32::INFINITY,
        31 => f32::NAN,
        _ => sign * (1.0 + man / 1024.0) * 2f32.powi(exp - 15),
    }
}

/// Row-by-row gather of `fm` in local-ID order.
pub fn gather_oracle(fm: &FeatureMatrix, id_map: &IdMap) -> Vec<f32> {
    let mut out = Vec::new();
    for &v in id_map.globals() {
        for c in 0..fm.cols() {
            out.push(fm.get(v as usize, c));
        }
    }
    out
}

/// Structural checks every MFG must pass.
pub fn check_mfg(g: &CsrGraph, mfg: &Mfg) -> Result<(), String> {
    let globals = mfg.id_map.globals();
    if globals.iter().collect::<HashSet<_>>().len() != globals.len() {
        return Err("duplicate global IDs in the map".into());
    }
    for (i, &v) in globals.iter().enumerate() {
        if mfg.id_map.local(v) != Some(i as u32) {
            return Err(format!("local of {v} is not {i}"));
        }
    }
    if &globals[..mfg.seeds.len()] != mfg.seeds.dst_ids() {
        return Err("seeds are not the local prefix".into());
    }
    let last = mfg.layers.last().ok_or("no layers")?;
    if last.num_dst != mfg.seeds.len() {
        return Err("innermost layer does not end at the seeds".into());
    }
    if mfg.layers[0].num_src != globals.len() {
        return Err("outermost layer does not cover the map".into());
    }
    for w in mfg.layers.windows(2) {
        if w[0].num_dst != w[1].num_src {
            return Err("layers do not chain".into());
        }
    }
    for (l, layer) in mfg.layers.iter().enumerate() {
        if layer.num_src < layer.num_dst || layer.indptr.len() != layer.num_dst + 1 {
            return Err(format!("layer {l}: bad shape"));
        }
        for j in 0..layer.num_dst {
            let v = globals[j];
            let deg = g.degree(v);
            if layer.in_degree(j) != layer.fanout.min(deg) {
                return Err(format!(
                    "layer {l}: node {v} has in-degree {}, expected min({}, {deg})",
                    layer.in_degree(j),
                    layer.fanout
                ));
            }
            let mut avail: HashMap<u32, usize> = HashMap::new();
            for &u in g.neighbors(v) {
                *avail.entry(u).or_default() += 1;
            }
            for &s in layer.sources_of(j) {
                if s as usize >= layer.num_src {
                    return Err(format!("layer {l}: source {s} out of range"));
                }
                let u = globals[s as usize];
                match avail.get_mut(&u) {
                    Some(c) if *c > 0 => *c -= 1,
                    _ => {
                        return Err(format!(
                            "layer {l}: edge {u} -> {v} used more often than it exists"
                        ))
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ev {
    Ready(usize),
    TransferDone(usize),
    ComputeDone(usize),
}

/// Discrete-event simulation of the transfer and compute stages.
///
/// `depth = None` is the serial loop; `Some(d)` lets transfers run `d`
/// batches ahead of the batch being computed. Returns per batch
/// `[transfer_start, transfer_end, compute_start, compute_end]`.
pub fn des_oracle(
    work: &[BatchWork],
    tm: &TransferModel,
    cm: &ComputeModel,
    depth: Option<usize>,
) -> Vec<[f64; 4]> {
    let n = work.len();
    let mut out = vec![[f64::NAN; 4]; n];
    let mut heap: BinaryHeap<Reverse<(u64, Ev)>> = BinaryHeap::new();
    // f64 times ordered through their bit patterns (all non-negative)
    let key = |t: f64| t.to_bits();
    for (i, w) in work.iter().enumerate() {
        heap.push(Reverse((key(w.ready_s), Ev::Ready(i))));
    }
    let mut ready = vec![false; n];
    let mut transferred = vec![false; n];
    let mut computed = vec![false; n];
    let mut compute_started = vec![false; n];
    let (mut next_t, mut next_c) = (0usize, 0usize);
    let (mut t_busy, mut c_busy) = (false, false);
    while let Some(Reverse((tk, ev))) = heap.pop() {
        let now = f64::from_bits(tk);
        match ev {
            Ev::Ready(i) => ready[i] = true,
            Ev::TransferDone(i) => {
                transferred[i] = true;
                t_busy = false;
            }
            Ev::ComputeDone(i) => {
                computed[i] = true;
                c_busy = false;
            }
        }
        loop {
            let mut progressed = false;
            if !c_busy && next_c < n && transferred[next_c] {
                let w = &work[next_c];
                let end = now + cm.time(w.num_nodes, w.num_edges);
                out[next_c][2] = now;
                out[next_c][3] = end;
                compute_started[next_c] = true;
                c_busy = true;
                heap.push(Reverse((key(end), Ev::ComputeDone(next_c))));
                next_c += 1;
                progressed = true;
            }
            if !t_busy && next_t < n && ready[next_t] {
                let gate = match depth {
                    None => next_t == 0 || computed[next_t - 1],
                    Some(d) => next_t < d || compute_started[next_t - d],
                };
                if gate {
                    let end = now + tm.time(work[next_t].bytes);
                    out[next_t][0] = now;
                    out[next_t][1] = end;
                    t_busy = true;
                    heap.push(Reverse((key(end), Ev::TransferDone(next_t))));
                    next_t += 1;
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
    }
    out
}

pub fn matches_oracle(t: &Timeline, oracle: &[[f64; 4]]) -> bool {
    t.events.len() == oracle.len()
        && t.events.iter().zip(oracle).all(|(e, o)| {
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
