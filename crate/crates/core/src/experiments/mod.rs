//! Simulation generators, cross-validation, the support-gap experiment, Monte Carlo checks of
//! the noise bounds, and categorical-data ingestion.

pub mod cv;
pub mod gap;
pub mod ingest;
pub mod montecarlo;
pub mod sim;

pub use cv::{
    cross_validate, fold_assignment, rmse, run_study, CvOutcome, CvRecord, CvSpec, CvSummary, SettingSummary, SimStudy,
    StudyOutcome, SweepAxis,
};
pub use gap::{lambda_gap_experiment, support_gap, GapTable};
pub use ingest::{ingest_categorical_csv, ingest_categorical_reader, Ingested, IngestSpec};
pub use montecarlo::{monte_carlo_lemmas, MonteCarloReport};
pub use sim::{derive_seed, gen_simulation, SimSpec, Simulation};
