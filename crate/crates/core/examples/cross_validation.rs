//! Transductive 10-fold cross-validation of all four models on the Lenses data.

use std::path::Path;

use hypersparse::experiments::{cross_validate, ingest_categorical_csv, CvSpec, IngestSpec};
use hypersparse::learners::{LearnerConfig, ModelKind};

fn main() -> hypersparse::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/lenses.csv");
    let data = ingest_categorical_csv(&path, &IngestSpec { id_column: Some("id".into()), ..IngestSpec::new("class") })?;
    let cv = CvSpec { repeats: 5, ..CvSpec::default() };
    println!("grid {:?}", cv.grid);
    for model in ModelKind::ALL {
        let out = cross_validate(&data.hypergraph, &data.labels, &LearnerConfig::new(model, 0.0), &cv)?;
        let s = &out.summary;
        let curve: Vec<String> = s.mean_rmse.iter().map(|r| format!("{r:.3}")).collect();
        println!("{model:>5}: best {:.3} ± {:.3} at lambda {:.0e}   [{}]", s.best_rmse, s.best_std, s.best_lambda, curve.join(" "));
    }
    Ok(())
}
