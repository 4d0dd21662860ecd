//! Builds a graph from an edge list, stores it with features and labels,
//! reloads everything and prints the degree distribution.

use mfgprep::graph::{
    generate_features, generate_labels, load_csr, load_features, load_labels, parse_edge_list,
    save_csr, save_features, save_labels, Dtype,
};
use mfgprep::CsrGraph;

pub fn run_example() -> mfgprep::Result<()> {
    let text = "# tiny social graph\n0 1\n0 2\n1 2\n2 3\n3 4\n4 0\n4 5\n";
    let (edges, n) = parse_edge_list(text.as_bytes())?;
    let g = CsrGraph::from_edge_list(&edges, n, false)?;

    let dir = std::env::temp_dir().join(format!("mfgprep-ingest-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    save_csr(&g, dir.join("graph.csr"))?;
    save_features(
        &generate_features(n, 4, Dtype::F16, 0),
        dir.join("features.feat"),
    )?;
    save_labels(&generate_labels(n, 3, 0)?, dir.join("labels.labl"))?;

    let back = load_csr(dir.join("graph.csr"))?;
    assert_eq!(back.checksum(), g.checksum());
    let x = load_features(dir.join("features.feat"))?;
    let y = load_labels(dir.join("labels.labl"))?;
    println!(
        "{} nodes, {} directed edges, {}-dim {:?} features, {} classes",
        back.num_nodes(),
        back.num_edges(),
        x.cols(),
        x.dtype(),
        y.num_classes()
    );

    let hist = back.degree_histogram();
    println!("mean degree {:.2}", hist.mean_degree());
    hist.write_csv(std::io::stdout())?;
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> mfgprep::Result<()> {
    run_example()
}
