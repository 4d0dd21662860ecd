//! Wall-clock execution of the pipeline against real batch preparation.
//!
//! Device work is emulated by holding for the modeled duration (sleep for
//! the bulk, spin for the final stretch). The training loop runs on the
//! calling thread and holds for compute itself; in pipelined mode a
//! separate thread holds for transfers.

use std::thread;
use std::time::{Duration, Instant};

use crossbeam::channel::bounded;

use super::models::{ComputeModel, TransferModel};
use super::sim::BatchWork;
use super::timeline::{BatchEvents, Timeline};
use crate::error::{Error, Result};
use crate::prep::{run_epoch_prep, EpochPlan, PrepConfig, PrepInputs, PrepReport, PreparedBatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Transfer and compute one batch at a time.
    Serial,
    /// Transfers run up to `prefetch_depth` batches ahead of compute.
    Pipelined { prefetch_depth: usize },
}

impl Default for ExecMode {
    fn default() -> Self {
        ExecMode::Pipelined { prefetch_depth: 1 }
    }
}

/// Holds the calling thread for `seconds`.
pub fn hold_for(seconds: f64) {
    if seconds <= 0.0 {
        return;
    }
    let deadline = Instant::now() + Duration::from_secs_f64(seconds);
    const SPIN: f64 = 1e-3;
    if seconds > 2.0 * SPIN {
        thread::sleep(Duration::from_secs_f64(seconds - SPIN));
    }
    while Instant::now() < deadline {
        std::hint::spin_loop();
    }
}

/// Holds for `seconds` and returns the busy interval.
fn timed_hold(seconds: f64) -> (Instant, Instant) {
    let start = Instant::now();
    hold_for(seconds);
    (start, Instant::now())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiveRun {
    pub timeline: Timeline,
    /// What each batch looked like to the pipeline, with observed ready
    /// times; feed it to the virtual-clock schedules to replay the run.
    pub work: Vec<BatchWork>,
}

/// Runs the training loop over `batches` in real time.
pub fn run_live<I>(
    batches: I,
    tm: &TransferModel,
    cm: &ComputeModel,
    mode: ExecMode,
) -> Result<LiveRun>
where
    I: Iterator<Item = Result<PreparedBatch>> + Send,
{
    tm.validate()?;
    if let ExecMode::Pipelined { prefetch_depth: 0 } = mode {
        return Err(Error::invalid("prefetch_depth must be at least 1"));
    }
    let origin = Instant::now();
    let secs = |t: Instant| (t - origin).as_secs_f64();

    thread::scope(|s| {
        let mut events = Vec::new();
        let mut work = Vec::new();
        match mode {
            ExecMode::Serial => {
                for item in batches {
                    let batch = item?;
                    let w = BatchWork::from_prepared(&batch, secs(Instant::now()));
                    let (ts, te) = timed_hold(tm.time(w.bytes));
                    drop(batch);
                    let (cs, ce) = timed_hold(cm.time(w.num_nodes, w.num_edges));
                    events.push(BatchEvents {
                        batch_id: w.batch_id,
                        prep_ready: w.ready_s,
                        transfer_start: secs(ts),
                        transfer_end: secs(te),
                        compute_start: secs(cs),
                        compute_end: secs(ce),
                    });
                    work.push(w);
                }
            }
            ExecMode::Pipelined { prefetch_depth } => {
                let (tx, rx) = bounded::<Result<(BatchWork, Instant, Instant)>>(prefetch_depth - 1);
                s.spawn(move || {
                    for item in batches {
                        let msg = item.map(|batch| {
                            let w = BatchWork::from_prepared(&batch, secs(Instant::now()));
                            let (ts, te) = timed_hold(tm.time(w.bytes));
                            (w, ts, te)
                        });
                        let failed = msg.is_err();
                        if tx.send(msg).is_err() || failed {
                            break;
                        }
                    }
                });
                for msg in rx {
                    let (w, ts, te) = msg?;
                    let (cs, ce) = timed_hold(cm.time(w.num_nodes, w.num_edges));
                    events.push(BatchEvents {
                        batch_id: w.batch_id,
                        prep_ready: w.ready_s,
                        transfer_start: secs(ts),
                        transfer_end: secs(te),
                        compute_start: secs(cs),
                        compute_end: secs(ce),
                    });
                    work.push(w);
                }
            }
        }
        Ok(LiveRun {
            timeline: Timeline::from_events(events),
            work,
        })
    })
}

/// Batch preparation and the live training loop for one epoch.
pub fn run_live_epoch(
    inputs: &PrepInputs<'_>,
    plan: &EpochPlan,
    cfg: &PrepConfig,
    global_seed: u64,
    tm: &TransferModel,
    cm: &ComputeModel,
    mode: ExecMode,
) -> Result<(LiveRun, PrepReport)> {
    let (run, report) = run_epoch_prep(inputs, plan, cfg, global_seed, |batches| {
        run_live(batches, tm, cm, mode)
    })?;
    Ok((run?, report))
}
