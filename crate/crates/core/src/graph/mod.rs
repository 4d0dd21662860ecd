//! Immutable graphs, node features and labels.

mod csr;
mod edgelist;
mod features;
pub mod io;
mod synth;

pub use csr::{CsrGraph, DegreeHistogram};
pub use edgelist::parse_edge_list;
pub use features::{
    generate_features, generate_labels, Dtype, FeatureData, FeatureMatrix, LabelVector,
};
pub use io::{load_csr, load_features, load_labels, save_csr, save_features, save_labels};
pub use synth::synth_graph;
