//! Transfer/compute pipeline: cost models, virtual-clock schedules, live
//! execution and the blocking-time breakdown.

mod ablation;
mod live;
mod models;
mod sim;
mod timeline;

pub use ablation::{
    ablation_report, standard_configs, write_ablation_csv, AblationConfig, AblationRow,
    PrepCostModel, PrepTiming,
};
pub use live::{hold_for, run_live, run_live_epoch, ExecMode, LiveRun};
pub use models::{transfer_time, ComputeModel, TransferModel};
pub use sim::{list_schedule, run_pipelined, run_serial, BatchWork};
pub use timeline::{
    write_breakdown_csv, BatchEvents, Blocking, Breakdown, Timeline, TimelineSummary, Utilization,
};
