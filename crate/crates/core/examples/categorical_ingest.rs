//! Turn a categorical table into a hypergraph: one edge per (column, category) pair.

use std::path::Path;

use hypersparse::experiments::{ingest_categorical_csv, ingest_categorical_reader, IngestSpec};

fn main() -> hypersparse::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/lenses.csv");
    let spec = IngestSpec { id_column: Some("id".into()), ..IngestSpec::new("class") };
    let data = ingest_categorical_csv(&path, &spec)?;
    println!("{}: n = {}, m = {}", data.hypergraph.name().unwrap_or("?"), data.hypergraph.n(), data.hypergraph.m());
    for (e, src) in data.hypergraph.edges().iter().zip(&data.edge_sources) {
        println!("  {:>10} = {:<14} {} rows", src.column, src.category, e.len());
    }

    // Text labels need ordinal encoding; "?" cells join no edge.
    let csv = "colour,size,grade\nred,S,low\nred,?,high\nblue,S,mid\nblue,L,low\n";
    let spec = IngestSpec { ordinal: true, ..IngestSpec::new("grade") };
    let small = ingest_categorical_reader(csv.as_bytes(), &spec)?;
    println!("levels {:?} -> labels {:?}", small.label_levels.unwrap(), small.labels);
    println!("skipped single-row categories: {:?}", small.skipped.iter().map(|s| format!("{}={}", s.column, s.category)).collect::<Vec<_>>());
    Ok(())
}
