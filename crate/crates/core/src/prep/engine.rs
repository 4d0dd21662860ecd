//! Parallel epoch preparation.
//!
//! `P` workers pop batch indices from a pre-filled lock-free queue, prepare
//! each batch end to end (sampling, then serial slicing into a pooled
//! buffer) and push it into a bounded output channel. A worker takes a
//! buffer from the pool *before* popping an index, so the lowest
//! unfinished batch always owns a buffer and in-order delivery cannot
//! starve. The pool holds `queue_capacity + P` buffers, which bounds how
//! many prepared batches exist at once.
//!
//! Batches handed to the consumer keep their buffer until dropped. A
//! consumer that retains more than `queue_capacity` batches will stall
//! the workers; copy out with [`PinnedBuffer::into_vec`] instead.
//!
//! [`PinnedBuffer::into_vec`]: super::PinnedBuffer::into_vec

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use crossbeam::channel::{bounded, Receiver};
use crossbeam::queue::ArrayQueue;
use serde::Serialize;

use super::batch::{prepare_into, BatchTiming, PrepInputs, PreparedBatch};
use super::plan::EpochPlan;
use super::pool::BufferPool;
use crate::error::{Error, Result};
use crate::sampler::{FanoutSpec, SamplerVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delivery {
    /// Plan order, via a reorder buffer.
    #[default]
    InOrder,
    CompletionOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepConfig {
    pub num_workers: usize,
    pub queue_capacity: usize,
    pub fanouts: FanoutSpec,
    pub variant: SamplerVariant,
    pub delivery: Delivery,
    /// Test hook: the worker preparing this batch ID panics.
    #[doc(hidden)]
    pub inject_panic_at: Option<u64>,
}

impl PrepConfig {
    /// `queue_capacity` defaults to `4 * num_workers`.
    pub fn new(num_workers: usize, fanouts: FanoutSpec, variant: SamplerVariant) -> Self {
        PrepConfig {
            num_workers,
            queue_capacity: 4 * num_workers.max(1),
            fanouts,
            variant,
            delivery: Delivery::InOrder,
            inject_panic_at: None,
        }
    }

    pub fn with_queue_capacity(mut self, capacity: usize) -> Self {
        self.queue_capacity = capacity;
        self
    }

    pub fn with_delivery(mut self, delivery: Delivery) -> Self {
        self.delivery = delivery;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_workers == 0 {
            return Err(Error::invalid("num_workers must be at least 1"));
        }
        if self.queue_capacity == 0 {
            return Err(Error::invalid("queue_capacity must be at least 1"));
        }
        Ok(())
    }
}

/// Per-batch timings of one epoch's preparation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrepReport {
    pub threads: usize,
    /// In arrival order at the consumer.
    pub batches: Vec<BatchTiming>,
    /// Start of preparation to arrival of the last batch.
    pub wall_s: f64,
    /// Most prepared batches alive at once.
    pub peak_resident: usize,
}

impl PrepReport {
    /// Total sampling time divided over the worker threads.
    pub fn sampling_s(&self) -> f64 {
        self.batches.iter().map(|b| b.sampling_s).sum::<f64>() / self.threads.max(1) as f64
    }

    /// Total slicing time divided over the worker threads.
    pub fn slicing_s(&self) -> f64 {
        self.batches.iter().map(|b| b.slicing_s).sum::<f64>() / self.threads.max(1) as f64
    }

    pub fn throughput_row(&self) -> ThroughputRow {
        ThroughputRow {
            threads: self.threads,
            sampling_s: self.sampling_s(),
            slicing_s: self.slicing_s(),
            both_s: self.wall_s,
        }
    }
}

/// One line of the thread-scaling table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThroughputRow {
    pub threads: usize,
    pub sampling_s: f64,
    pub slicing_s: f64,
    pub both_s: f64,
}

/// CSV with columns `threads,sampling_s,slicing_s,both_s`.
pub fn write_throughput_csv<W: Write>(rows: &[ThroughputRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["threads", "sampling_s", "slicing_s", "both_s"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

type WorkerMsg = (usize, Result<PreparedBatch>);

/// Iterator over the prepared batches of an epoch, handed to the consumer
/// of [`run_epoch_prep`].
pub struct PreparedBatches<'r> {
    rx: Receiver<WorkerMsg>,
    delivery: Delivery,
    total: usize,
    received: usize,
    next_index: usize,
    pending: BTreeMap<usize, PreparedBatch>,
    failed: bool,
    started: Instant,
    report: &'r mut PrepReport,
}

impl PreparedBatches<'_> {
    fn record(&mut self, batch: &mut PreparedBatch) {
        batch.timing.finished_at_s = batch.timing.finished_at_s.max(0.0);
        self.report.batches.push(batch.timing);
        self.received += 1;
        if self.received == self.total {
            self.report.wall_s = self.started.elapsed().as_secs_f64();
        }
    }

    /// Batches not yet delivered.
    pub fn remaining(&self) -> usize {
        self.total - self.next_index
    }
}

impl Iterator for PreparedBatches<'_> {
    type Item = Result<PreparedBatch>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.next_index == self.total {
            return None;
        }
        loop {
            if self.delivery == Delivery::InOrder {
                if let Some(b) = self.pending.remove(&self.next_index) {
                    self.next_index += 1;
                    return Some(Ok(b));
                }
            }
            let (idx, msg) = match self.rx.recv() {
                Ok(m) => m,
                Err(_) => {
                    self.failed = true;
                    return Some(Err(Error::WorkerPanic(
                        "workers exited before the epoch was complete".into(),
                    )));
                }
            };
            let mut batch = match msg {
                Ok(b) => b,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            };
            self.record(&mut batch);
            match self.delivery {
                Delivery::CompletionOrder => {
                    self.next_index += 1;
                    return Some(Ok(batch));
                }
                Delivery::InOrder => {
                    self.pending.insert(idx, batch);
                }
            }
        }
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "worker panicked".into()
    }
}

/// Prepares every batch of `plan` on `cfg.num_workers` threads and feeds
/// them to `consume`.
///
/// The batches produced depend only on the inputs, the plan, the fanouts,
/// the variant and `global_seed`, never on the worker count or queue
/// sizes. A failing or panicking worker yields one `Err` item, after which
/// the iterator ends. When `consume` returns, remaining work is cancelled.
pub fn run_epoch_prep<R>(
    inputs: &PrepInputs<'_>,
    plan: &EpochPlan,
    cfg: &PrepConfig,
    global_seed: u64,
    consume: impl FnOnce(&mut PreparedBatches<'_>) -> R,
) -> Result<(R, PrepReport)> {
    cfg.validate()?;
    let total = plan.len();
    let queue = ArrayQueue::new(total.max(1));
    for i in 0..total {
        queue.push(i).expect("queue sized to the plan");
    }
    let pool = BufferPool::new(cfg.queue_capacity + cfg.num_workers);
    let stop = AtomicBool::new(false);
    let (tx, rx) = bounded::<WorkerMsg>(cfg.queue_capacity);
    let started = Instant::now();
    let mut report = PrepReport {
        threads: cfg.num_workers,
        ..PrepReport::default()
    };

    let out = std::thread::scope(|s| {
        for worker in 0..cfg.num_workers {
            let tx = tx.clone();
            let (queue, pool, stop) = (&queue, &pool, &stop);
            s.spawn(move || {
                while let Some(buffer) = pool.acquire(stop) {
                    let Some(idx) = queue.pop() else { break };
                    let seeds = &plan.batches[idx];
                    let result = catch_unwind(AssertUnwindSafe(|| {
                        if cfg.inject_panic_at == Some(seeds.batch_id) {
                            panic!("injected failure in batch {}", seeds.batch_id);
                        }
                        prepare_into(
                            inputs,
                            seeds,
                            &cfg.fanouts,
                            cfg.variant,
                            global_seed,
                            buffer,
                        )
                    }));
                    let msg = match result {
                        Ok(Ok(mut b)) => {
                            b.timing.worker = worker;
                            b.timing.finished_at_s = started.elapsed().as_secs_f64();
                            Ok(b)
                        }
                        Ok(Err(e)) => Err(e),
                        Err(p) => Err(Error::WorkerPanic(panic_message(p))),
                    };
                    let fatal = msg.is_err();
                    if tx.send((idx, msg)).is_err() || fatal {
                        break;
                    }
                }
            });
        }
        drop(tx);

        let mut batches = PreparedBatches {
            rx,
            delivery: cfg.delivery,
            total,
            received: 0,
            next_index: 0,
            pending: BTreeMap::new(),
            failed: false,
            started,
            report: &mut report,
        };
        let out = consume(&mut batches);
        if batches.received < total {
            batches.report.wall_s = started.elapsed().as_secs_f64();
        }
        stop.store(true, Ordering::Release);
        drop(batches);
        out
    });
    report.peak_resident = pool.peak();
    Ok((out, report))
}
