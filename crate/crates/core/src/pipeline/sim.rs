//! Virtual-clock schedules of the transfer and compute stages.

use super::models::{ComputeModel, TransferModel};
use super::timeline::{BatchEvents, Timeline};
use crate::error::{Error, Result};
use crate::prep::PreparedBatch;

/// What the pipeline needs to know about one prepared batch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BatchWork {
    pub batch_id: u64,
    /// When the batch leaves batch preparation, in seconds.
    pub ready_s: f64,
    pub bytes: u64,
    pub num_nodes: u64,
    pub num_edges: u64,
}

impl BatchWork {
    pub fn from_prepared(b: &PreparedBatch, ready_s: f64) -> Self {
        BatchWork {
            batch_id: b.batch_id(),
            ready_s,
            bytes: b.byte_size as u64,
            num_nodes: b.num_nodes() as u64,
            num_edges: b.num_edges() as u64,
        }
    }
}

/// Completion times of jobs with the given durations on `workers`
/// identical workers, each job taken in order by the earliest-free worker.
pub fn list_schedule(durations: &[f64], workers: usize) -> Vec<f64> {
    let mut free = vec![0.0f64; workers.max(1)];
    durations
        .iter()
        .map(|&d| {
            let (slot, _) = free
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("at least one worker");
            free[slot] += d;
            free[slot]
        })
        .collect()
}

/// Transfer then compute for one batch at a time, as in a plain training
/// loop: batch `i + 1` is not touched before compute `i` finishes.
pub fn run_serial(batches: &[BatchWork], tm: &TransferModel, cm: &ComputeModel) -> Timeline {
    let mut now = 0.0f64;
    let events = batches
        .iter()
        .map(|b| {
            let transfer_start = now.max(b.ready_s);
            let transfer_end = transfer_start + tm.time(b.bytes);
            let compute_end = transfer_end + cm.time(b.num_nodes, b.num_edges);
            now = compute_end;
            BatchEvents {
                batch_id: b.batch_id,
                prep_ready: b.ready_s,
                transfer_start,
                transfer_end,
                compute_start: transfer_end,
                compute_end,
            }
        })
        .collect();
    Timeline::from_events(events)
}

/// Separate transfer and compute channels.
///
/// Transfer `i` starts once the batch is ready, the transfer channel is
/// free and compute `i - prefetch_depth` has started (at most
/// `prefetch_depth` transfers run ahead of the batch being computed).
/// Compute `i` starts once transfer `i` and compute `i - 1` are done.
pub fn run_pipelined(
    batches: &[BatchWork],
    tm: &TransferModel,
    cm: &ComputeModel,
    prefetch_depth: usize,
) -> Result<Timeline> {
    if prefetch_depth == 0 {
        return Err(Error::invalid("prefetch_depth must be at least 1"));
    }
    let mut events: Vec<BatchEvents> = Vec::with_capacity(batches.len());
    let mut transfer_free = 0.0f64;
    let mut compute_free = 0.0f64;
    for (i, b) in batches.iter().enumerate() {
        let gate = if i >= prefetch_depth {
            events[i - prefetch_depth].compute_start
        } else {
            0.0
        };
        let transfer_start = b.ready_s.max(transfer_free).max(gate);
        let transfer_end = transfer_start + tm.time(b.bytes);
        let compute_start = transfer_end.max(compute_free);
        let compute_end = compute_start + cm.time(b.num_nodes, b.num_edges);
        transfer_free = transfer_end;
        compute_free = compute_end;
        events.push(BatchEvents {
            batch_id: b.batch_id,
            prep_ready: b.ready_s,
            transfer_start,
            transfer_end,
            compute_start,
            compute_end,
        });
    }
    Ok(Timeline::from_events(events))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(n: usize, t: f64, c: f64) -> (Vec<BatchWork>, TransferModel, ComputeModel) {
        let batches = (0..n as u64)
            .map(|i| BatchWork {
                batch_id: i,
                bytes: 1,
                ..BatchWork::default()
            })
            .collect();
        let tm = TransferModel {
            bandwidth: 1.0,
            efficiency: 1.0,
            base_latency: t - 1.0,
            ..TransferModel::default()
        };
        (batches, tm, ComputeModel::constant(c))
    }

    #[test]
    fn serial_sum() {
        let (b, tm, cm) = constant(3, 2.0, 3.0);
        let t = run_serial(&b, &tm, &cm);
        assert_eq!(t.makespan, 15.0);
        assert_eq!(t.blocking.transfer, 6.0);
        assert_eq!(t.blocking.compute, 9.0);
    }

    #[test]
    fn serial_single_batch_includes_prep_latency() {
        let (mut b, tm, cm) = constant(1, 2.0, 3.0);
        b[0].ready_s = 4.0;
        let t = run_serial(&b, &tm, &cm);
        assert_eq!(t.makespan, 9.0);
        assert_eq!(t.blocking.prep, 4.0);
    }

    #[test]
    fn pipelined_closed_form() {
        for (n, t, c) in [(5, 2.0, 3.0), (4, 3.0, 2.0), (1, 1.0, 1.0), (6, 2.0, 2.0)] {
            let (b, tm, cm) = constant(n, t, c);
            let tl = run_pipelined(&b, &tm, &cm, 1).unwrap();
            assert_eq!(tl.makespan, t + (n as f64 - 1.0) * f64::max(t, c) + c);
            assert!(tl.check(0.0).is_ok());
        }
    }

    #[test]
    fn pipelining_hides_transfers_when_compute_dominates() {
        let (b, tm, cm) = constant(10, 1.0, 3.0);
        let tl = run_pipelined(&b, &tm, &cm, 1).unwrap();
        // Only the first transfer is exposed.
        assert_eq!(tl.blocking.transfer, 1.0);
    }

    #[test]
    fn zero_depth_rejected() {
        let (b, tm, cm) = constant(2, 1.0, 1.0);
        assert!(run_pipelined(&b, &tm, &cm, 0).is_err());
    }

    #[test]
    fn list_schedule_balances() {
        assert_eq!(
            list_schedule(&[3.0, 1.0, 1.0, 1.0], 2),
            vec![3.0, 1.0, 2.0, 3.0]
        );
        assert_eq!(list_schedule(&[1.0, 1.0], 1), vec![1.0, 2.0]);
        assert!(list_schedule(&[], 4).is_empty());
    }
}
