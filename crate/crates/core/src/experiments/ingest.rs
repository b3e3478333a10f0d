use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSpec {
    pub label_column: String,
    #[serde(default)]
    pub drop_columns: Vec<String>,
    /// Column naming each row; row numbers (0-based) are used when absent.
    #[serde(default)]
    pub id_column: Option<String>,
    /// Encode a categorical label column as `0..k−1` over its sorted distinct values.
    #[serde(default)]
    pub ordinal: bool,
}

impl IngestSpec {
    pub fn new(label_column: impl Into<String>) -> Self {
        Self { label_column: label_column.into(), drop_columns: Vec::new(), id_column: None, ordinal: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSource {
    pub column: String,
    pub category: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ingested {
    pub hypergraph: Hypergraph,
    pub labels: Vec<f64>,
    /// Node id → row identifier.
    pub node_ids: Vec<String>,
    /// Origin of each hyperedge, in edge order.
    pub edge_sources: Vec<EdgeSource>,
    /// `(column, category)` pairs seen in fewer than two rows.
    pub skipped: Vec<EdgeSource>,
    /// Category names in code order when the label was ordinal-encoded.
    pub label_levels: Option<Vec<String>>,
}

/// Cells treated as missing: they join no hyperedge.
fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

pub fn ingest_categorical_csv(path: &Path, spec: &IngestSpec) -> Result<Ingested> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = ingest_categorical_reader(file, spec)?;
    if out.hypergraph.name().is_none() {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            out.hypergraph = out.hypergraph.with_name(stem);
        }
    }
    Ok(out)
}

/// One node per row, one hyperedge per `(column, category)` pair shared by at least two rows.
/// Edges are ordered by column, then by category.
pub fn ingest_categorical_reader<R: Read>(reader: R, spec: &IngestSpec) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.iter().map(str::to_string).collect();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let label_col = position(&spec.label_column).ok_or_else(|| Error::MissingLabelColumn(spec.label_column.clone()))?;
    let id_col = match &spec.id_column {
        Some(c) => Some(position(c).ok_or_else(|| Error::Parse(format!("id column `{c}` not in header")))?),
        None => None,
    };
    for c in &spec.drop_columns {
        if position(c).is_none() {
            log::warn!("drop column `{c}` not in header");
        }
    }
    let features: Vec<usize> = (0..headers.len())
        .filter(|&j| j != label_col && Some(j) != id_col && !spec.drop_columns.contains(&headers[j]))
        .collect();

    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {e}", r + 1)))?;
        rows.push(rec.iter().map(str::to_string).collect::<Vec<String>>());
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = rows.len();

    let raw_labels: Vec<&str> = rows.iter().map(|r| r[label_col].as_str()).collect();
    let (labels, label_levels) = if spec.ordinal {
        let mut levels: Vec<String> = raw_labels.iter().map(|s| s.to_string()).collect();
        levels.sort();
        levels.dedup();
        let y = raw_labels.iter().map(|s| levels.binary_search_by(|l| l.as_str().cmp(s)).unwrap() as f64).collect();
        (y, Some(levels))
    } else {
        let y = raw_labels
            .iter()
            .enumerate()
            .map(|(r, s)| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("row {}: label `{s}` is not numeric (use ordinal encoding)", r + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        (y, None)
    };

    let mut edges = Vec::new();
    let mut edge_sources = Vec::new();
    let mut skipped = Vec::new();
    for &j in &features {
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            if !is_missing(&row[j]) {
                groups.entry(row[j].as_str()).or_default().push(i);
            }
        }
        for (category, members) in groups {
            let src = EdgeSource { column: headers[j].clone(), category: category.to_string(), rows: members.len() };
            if members.len() < 2 {
                log::warn!("skipping {}={}: only one row", src.column, src.category);
                skipped.push(src);
            } else {
                edges.push(Hyperedge::unweighted(members));
                edge_sources.push(src);
            }
        }
    }
    let node_ids = match id_col {
        Some(c) => rows.iter().map(|r| r[c].clone()).collect(),
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    Ok(Ingested { hypergraph: Hypergraph::new(n, edges)?, labels, node_ids, edge_sources, skipped, label_levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_categories_two_edges() {
        let csv = "x,y\na,1\na,2\nb,3\nb,4\n";
        let out = ingest_categorical_reader(csv.as_bytes(), &IngestSpec::new("y")).unwrap();
        assert_eq!(out.hypergraph.n(), 4);
        assert_eq!(out.hypergraph.m(), 2);
        assert!(out.hypergraph.edges().iter().all(|e| e.len() == 2));
        assert_eq!(out.labels, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn singleton_category_skipped() {
        let csv = "x,y\na,1\na,2\nb,3\n";
        let out = ingest_categorical_reader(csv.as_bytes(), &IngestSpec::new("y")).unwrap();
        assert_eq!(out.hypergraph.m(), 1);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].category, "b");
    }

    #[test]
    fn missing_label_column() {
        let err = ingest_categorical_reader("x,z\na,1\n".as_bytes(), &IngestSpec::new("y")).unwrap_err();
        assert_eq!(err, Error::MissingLabelColumn("y".into()));
    }

    #[test]
    fn header_only_is_empty() {
        assert_eq!(ingest_categorical_reader("x,y\n".as_bytes(), &IngestSpec::new("y")).unwrap_err(), Error::EmptyData);
    }

    #[test]
    fn non_numeric_label_needs_ordinal() {
        let csv = "x,y\na,lo\na,hi\nb,mid\n";
        assert!(matches!(ingest_categorical_reader(csv.as_bytes(), &IngestSpec::new("y")), Err(Error::Parse(_))));
        let spec = IngestSpec { ordinal: true, ..IngestSpec::new("y") };
        let out = ingest_categorical_reader(csv.as_bytes(), &spec).unwrap();
        assert_eq!(out.labels, vec![1.0, 0.0, 2.0]);
        assert_eq!(out.label_levels.unwrap(), vec!["hi", "lo", "mid"]);
    }

    #[test]
    fn quoted_fields_and_dropped_columns() {
        let csv = "id,x,noise,y\nr1,\"a, b\",1,0.5\nr2,\"a, b\",2,1.5\nr3,c,3,2.5\nr4,c,3,2.5\n";
        let spec = IngestSpec { drop_columns: vec!["noise".into()], id_column: Some("id".into()), ..IngestSpec::new("y") };
        let out = ingest_categorical_reader(csv.as_bytes(), &spec).unwrap();
        assert_eq!(out.hypergraph.m(), 2);
        assert_eq!(out.edge_sources[0].category, "a, b");
        assert_eq!(out.node_ids, vec!["r1", "r2", "r3", "r4"]);
    }
}
