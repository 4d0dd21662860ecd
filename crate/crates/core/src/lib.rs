//! Mini-batch preparation for sampled GNN training.
//!
//! The crate covers the CPU side of a sampled-training loop: CSR graph
//! storage, fanout-bounded neighborhood sampling into message-flow graphs
//! (MFGs), multi-threaded batch preparation that slices features straight
//! into reusable buffers, and a transfer/compute pipeline model that
//! reports how long the training loop blocks on each stage.
//!
//! * [`graph`]: CSR graphs, features, labels, synthetic data, file formats.
//! * [`sampler`]: sampling, MFG construction and the 18 sampler variants.
//! * [`prep`]: epoch plans, slicing and the parallel batch-prep engine.
//! * [`pipeline`]: transfer/compute cost models, serial and pipelined
//!   schedules on a virtual clock, live execution and ablation tables.
//! * [`bench`]: hop-by-hop traces and the sampler-variant sweep.
//! * [`mpnn`]: a mean-aggregation message-passing evaluator used to check
//!   that MFGs preserve full-neighborhood semantics.
//! * [`checks`]: the oracle suite behind `mfgprep validate`.

pub mod bench;
mod binio;
pub mod checks;
pub mod cli;
pub mod error;
pub mod graph;
pub mod hash;
pub mod mpnn;
pub mod pipeline;
pub mod prep;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use graph::{CsrGraph, Dtype, FeatureMatrix, LabelVector};
pub use sampler::{FanoutSpec, IdMap, Mfg, MfgLayer, SamplerVariant, SeedBatch};
