//! Turning an epoch's seed batches into prepared batches.

mod batch;
mod engine;
mod plan;
mod pool;
mod slice;

pub use batch::{prepare_batch, BatchTiming, PrepInputs, PreparedBatch};
pub use engine::{
    run_epoch_prep, write_throughput_csv, Delivery, PrepConfig, PrepReport, PreparedBatches,
    ThroughputRow,
};
pub use plan::{make_epoch_plan, EpochPlan};
pub use pool::{BufferPool, PinnedBuffer};
pub use slice::{slice_features, slice_labels};
