use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Event times of one batch, in seconds from the start of the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BatchEvents {
    pub batch_id: u64,
    pub prep_ready: f64,
    pub transfer_start: f64,
    pub transfer_end: f64,
    pub compute_start: f64,
    pub compute_end: f64,
}

/// Time the training loop spent waiting on each stage. Work that overlaps
/// with something the loop is already waiting for does not show up here.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Blocking {
    pub prep: f64,
    pub transfer: f64,
    pub compute: f64,
}

/// Per-stage blocking times as shares of the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Breakdown {
    pub epoch_s: f64,
    pub prep_block_s: f64,
    pub prep_pct: f64,
    pub transfer_block_s: f64,
    pub transfer_pct: f64,
    pub compute_s: f64,
    pub compute_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Utilization {
    pub transfer_channel: f64,
    pub compute_channel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineSummary {
    pub makespan_s: f64,
    pub blocking: Blocking,
    pub utilization: Utilization,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeline {
    pub events: Vec<BatchEvents>,
    pub makespan: f64,
    pub blocking: Blocking,
}

impl Timeline {
    /// Derives blocking times from the event log, as seen by a loop that
    /// finishes compute `i - 1` and then waits for compute `i` to become
    /// possible. The part of a wait before the batch was prepared counts
    /// as prep, the rest as transfer.
    pub fn from_events(events: Vec<BatchEvents>) -> Self {
        let mut blocking = Blocking::default();
        let mut now = 0.0f64;
        for e in &events {
            let wait = (e.compute_start - now).max(0.0);
            let prep = (e.prep_ready - now).clamp(0.0, wait);
            blocking.prep += prep;
            blocking.transfer += wait - prep;
            blocking.compute += e.compute_end - e.compute_start;
            now = e.compute_end.max(now);
        }
        Timeline {
            makespan: events.last().map_or(0.0, |e| e.compute_end),
            events,
            blocking,
        }
    }

    pub fn breakdown(&self) -> Breakdown {
        let b = &self.blocking;
        let total = b.prep + b.transfer + b.compute;
        let pct = |x: f64| if total > 0.0 { 100.0 * x / total } else { 0.0 };
        Breakdown {
            epoch_s: self.makespan,
            prep_block_s: b.prep,
            prep_pct: pct(b.prep),
            transfer_block_s: b.transfer,
            transfer_pct: pct(b.transfer),
            compute_s: b.compute,
            compute_pct: pct(b.compute),
        }
    }

    pub fn total_transfer(&self) -> f64 {
        self.events
            .iter()
            .map(|e| e.transfer_end - e.transfer_start)
            .sum()
    }

    pub fn total_compute(&self) -> f64 {
        self.events
            .iter()
            .map(|e| e.compute_end - e.compute_start)
            .sum()
    }

    pub fn utilization(&self) -> Utilization {
        if self.makespan <= 0.0 {
            return Utilization::default();
        }
        Utilization {
            transfer_channel: self.total_transfer() / self.makespan,
            compute_channel: self.total_compute() / self.makespan,
        }
    }

    pub fn summary(&self) -> TimelineSummary {
        TimelineSummary {
            makespan_s: self.makespan,
            blocking: self.blocking,
            utilization: self.utilization(),
        }
    }

    /// Checks channel exclusivity and stage ordering, allowing `tol`
    /// seconds of slack for wall-clock timelines.
    pub fn check(&self, tol: f64) -> std::result::Result<(), String> {
        for (i, e) in self.events.iter().enumerate() {
            let id = e.batch_id;
            if e.transfer_start + tol < e.prep_ready {
                return Err(format!("batch {id}: transfer starts before prep is ready"));
            }
            if e.transfer_end + tol < e.transfer_start || e.compute_end + tol < e.compute_start {
                return Err(format!("batch {id}: interval ends before it starts"));
            }
            if e.compute_start + tol < e.transfer_end {
                return Err(format!(
                    "batch {id}: compute starts before its transfer ends"
                ));
            }
            if i > 0 {
                let p = &self.events[i - 1];
                if e.transfer_start + tol < p.transfer_end {
                    return Err(format!("batch {id}: transfer channel overlaps"));
                }
                if e.compute_start + tol < p.compute_end {
                    return Err(format!("batch {id}: compute channel overlaps"));
                }
            }
        }
        Ok(())
    }

    /// CSV rows `batch_id,stage,start_s,end_s`, stages `transfer` and
    /// `compute`.
    pub fn write_events_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["batch_id", "stage", "start_s", "end_s"])?;
        for e in &self.events {
            for (stage, s, t) in [
                ("transfer", e.transfer_start, e.transfer_end),
                ("compute", e.compute_start, e.compute_end),
            ] {
                w.write_record([
                    e.batch_id.to_string(),
                    stage.into(),
                    s.to_string(),
                    t.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.summary())?;
        Ok(())
    }
}

/// CSV of one or more breakdowns, with a leading label column.
pub fn write_breakdown_csv<W: Write>(rows: &[(String, Breakdown)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "config",
        "epoch_s",
        "prep_block_s",
        "prep_pct",
        "transfer_block_s",
        "transfer_pct",
        "compute_s",
        "compute_pct",
    ])?;
    for (label, b) in rows {
        w.write_record([
            label.clone(),
            b.epoch_s.to_string(),
            b.prep_block_s.to_string(),
            b.prep_pct.to_string(),
            b.transfer_block_s.to_string(),
            b.transfer_pct.to_string(),
            b.compute_s.to_string(),
            b.compute_pct.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
