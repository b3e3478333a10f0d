//! Command-line front end: `train`, `predict`, `simulate`, `sparsistency`, `ingest`.
//!
//! Every command resolves a [`RunConfig`] from an optional JSON file plus flags (flags win),
//! writes it as `config.json` next to its outputs, and produces byte-identical files for an
//! identical config.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::admm::AdmmConfig;
use crate::error::{Error, Result};
use crate::experiments::gap::lambda_gap_experiment;
use crate::experiments::ingest::{ingest_categorical_csv, IngestSpec};
use crate::experiments::{gen_simulation, run_study, SimSpec, SimStudy};
use crate::hypergraph::{Hypergraph, WeightScheme};
use crate::learners::{
    classify_support, default_lambda_grid, fit, fit_grid, predict_out_of_sample, sparsistency_certificate, FitResult, Gamma,
    LearnerConfig, ModelKind, SupportReport,
};
use crate::smoothness::restrict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Irrelevant edges 1..10, no noisy nodes.
    Fig2,
    /// Noisy nodes 1..10, no irrelevant edges.
    Fig3,
    /// Five irrelevant edges, noisy nodes 1..10.
    Fig4,
}

impl Preset {
    pub fn study(self) -> SimStudy {
        match self {
            Preset::Fig2 => SimStudy::irrelevant_sweep(),
            Preset::Fig3 => SimStudy::noisy_sweep(),
            Preset::Fig4 => SimStudy::mixed_sweep(),
        }
    }
}

/// Generated instance used in place of input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedInput {
    pub spec: SimSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsistencySettings {
    /// Generated instance; the five-relevant/five-irrelevant design by default.
    pub spec: SimSpec,
    /// Derived from the noise-free labels of the instance when absent.
    pub gamma_relevant: Option<f64>,
    pub gamma_irrelevant: Option<f64>,
    /// Defaults to the instance's label noise.
    pub noise_sd: Option<f64>,
}

impl Default for SparsistencySettings {
    fn default() -> Self {
        Self { spec: SimSpec::five_by_five(), gamma_relevant: None, gamma_irrelevant: None, noise_sd: None }
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub model: ModelKind,
    pub lambda: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub weights: Option<WeightScheme>,
    pub solver: AdmmConfig,
    pub pin_unlabeled_components: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub hypergraph: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub generated: Option<GeneratedInput>,
    pub fit: Option<PathBuf>,
    pub memberships: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub ingest: Option<IngestSpec>,
    pub preset: Option<Preset>,
    pub study: Option<SimStudy>,
    pub sparsistency: Option<SparsistencySettings>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            seed: 0,
            model: ModelKind::JointSelection,
            lambda: None,
            grid: None,
            weights: None,
            solver: AdmmConfig::default(),
            pin_unlabeled_components: false,
            format: Format::Csv,
            out: None,
            hypergraph: None,
            labels: None,
            generated: None,
            fit: None,
            memberships: None,
            input: None,
            ingest: None,
            preset: None,
            study: None,
            sparsistency: None,
        }
    }
}

impl RunConfig {
    pub fn learner(&self) -> LearnerConfig {
        LearnerConfig {
            model: self.model,
            lambda: self.lambda.unwrap_or(1.0),
            weights: self.weights,
            solver: self.solver,
            pin_unlabeled_components: self.pin_unlabeled_components,
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        match (&self.grid, self.lambda) {
            (Some(g), _) => g.clone(),
            (None, Some(l)) => vec![l],
            (None, None) => vec![1.0],
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hypersparse", version, about = "Sparsely smooth learning on hypergraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// JSON run config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// dense | edge | node | joint
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long, conflicts_with = "grid")]
    pub lambda: Option<f64>,
    /// `LO..HI:logN` or a comma list.
    #[arg(long)]
    pub grid: Option<String>,
    /// unit | invcard | explicit
    #[arg(long)]
    pub weights: Option<WeightScheme>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub adaptive_rho: bool,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on a hypergraph and (partial) labels.
    Train {
        #[arg(long)]
        hypergraph: Option<PathBuf>,
        /// CSV with columns node_id,value; missing rows are unlabeled.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Pin label-free components to the mean label instead of failing.
        #[arg(long)]
        pin_unlabeled: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Predict new nodes from their edge memberships with a fitted model.
    Predict {
        /// `fit.json` written by `train`.
        #[arg(long)]
        fit: Option<PathBuf>,
        /// CSV with columns id,edges where edges is a `;`-separated list of edge indices.
        #[arg(long)]
        memberships: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-validated simulation study.
    Simulate {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        folds: Option<usize>,
        /// Comma-separated sweep values.
        #[arg(long)]
        values: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Sparsistency certificate and the per-λ support gap table.
    Sparsistency {
        #[arg(long)]
        gamma_r: Option<f64>,
        #[arg(long)]
        gamma_i: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Build a hypergraph from categorical CSV data.
    Ingest {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        label_column: Option<String>,
        /// Comma-separated columns to ignore.
        #[arg(long)]
        drop: Option<String>,
        #[arg(long)]
        id_column: Option<String>,
        #[arg(long)]
        ordinal: bool,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `1e-4..1e2:log7` (log-spaced, endpoints included), `0..1:lin5`, or `0.1,1,10`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad grid `{s}`"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let grid = if let Some((range, spacing)) = s.split_once(':') {
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let (lo, hi) = (num(lo)?, num(hi)?);
        let (log, count) = if let Some(c) = spacing.strip_prefix("log") {
            (true, c)
        } else if let Some(c) = spacing.strip_prefix("lin") {
            (false, c)
        } else {
            return Err(bad());
        };
        let count: usize = count.parse().map_err(|_| bad())?;
        if count == 0 || (log && !(lo > 0.0 && hi > 0.0)) {
            return Err(bad());
        }
        if count == 1 {
            vec![lo]
        } else if log {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count).map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)).map(round_sig).collect()
        } else {
            (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
        }
    } else {
        s.split(',').map(num).collect::<Result<Vec<f64>>>()?
    };
    if grid.is_empty() || grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(bad());
    }
    Ok(grid)
}

/// Rounds to 12 significant digits so that `10^(−4)` prints as `0.0001`.
fn round_sig(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn apply_common(cfg: &mut RunConfig, c: &Common) -> Result<()> {
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(m) = c.model {
        cfg.model = m;
    }
    if let Some(l) = c.lambda {
        cfg.lambda = Some(l);
        cfg.grid = None;
    }
    if let Some(g) = &c.grid {
        cfg.grid = Some(parse_grid(g)?);
        cfg.lambda = None;
    }
    if let Some(w) = c.weights {
        cfg.weights = Some(w);
    }
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    if let Some(f) = c.format {
        cfg.format = f;
    }
    if c.adaptive_rho {
        cfg.solver.adaptive_rho = true;
    }
    if let Some(m) = c.max_iter {
        cfg.solver.max_iter = m;
    }
    cfg.solver.validate()
}

/// Merges the config file and flags into a fully resolved config.
pub fn resolve(command: &Command) -> Result<RunConfig> {
    let common = match command {
        Command::Train { common, .. }
        | Command::Predict { common, .. }
        | Command::Simulate { common, .. }
        | Command::Sparsistency { common, .. }
        | Command::Ingest { common, .. } => common,
    };
    let mut cfg = match &common.config {
        Some(p) => read_config(p)?,
        None => RunConfig::default(),
    };
    apply_common(&mut cfg, common)?;
    match command {
        Command::Train { hypergraph, labels, pin_unlabeled, .. } => {
            cfg.command = "train".into();
            if hypergraph.is_some() {
                cfg.hypergraph = hypergraph.clone();
            }
            if labels.is_some() {
                cfg.labels = labels.clone();
            }
            cfg.pin_unlabeled_components |= pin_unlabeled;
        }
        Command::Predict { fit, memberships, .. } => {
            cfg.command = "predict".into();
            if fit.is_some() {
                cfg.fit = fit.clone();
            }
            if memberships.is_some() {
                cfg.memberships = memberships.clone();
            }
        }
        Command::Simulate { preset, repeats, folds, values, common } => {
            cfg.command = "simulate".into();
            if let Some(p) = preset {
                cfg.preset = Some(*p);
                cfg.study = Some(p.study());
            }
            let mut study = cfg.study.clone().unwrap_or_else(|| cfg.preset.unwrap_or(Preset::Fig2).study());
            if let Some(r) = repeats {
                study.cv.repeats = *r;
            }
            if let Some(f) = folds {
                study.cv.folds = *f;
            }
            if let Some(v) = values {
                study.values = v
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad sweep value `{t}`"))))
                    .collect::<Result<_>>()?;
            }
            if let Some(g) = &cfg.grid {
                study.cv.grid = g.clone();
            }
            if common.seed.is_some() || common.config.is_some() {
                study.cv.seed = cfg.seed;
            }
            if common.model.is_some() {
                study.models = vec![cfg.model];
            }
            if let Some(w) = common.weights {
                study.learner.weights = Some(w);
            }
            if common.adaptive_rho {
                study.learner.solver.adaptive_rho = true;
            }
            if let Some(m) = common.max_iter {
                study.learner.solver.max_iter = m;
            }
            study.validate()?;
            cfg.study = Some(study);
        }
        Command::Sparsistency { gamma_r, gamma_i, delta, .. } => {
            cfg.command = "sparsistency".into();
            let mut s = cfg.sparsistency.clone().unwrap_or_default();
            if gamma_r.is_some() {
                s.gamma_relevant = *gamma_r;
            }
            if gamma_i.is_some() {
                s.gamma_irrelevant = *gamma_i;
            }
            if delta.is_some() {
                s.noise_sd = *delta;
            }
            cfg.sparsistency = Some(s);
            if cfg.grid.is_none() && cfg.lambda.is_none() {
                cfg.grid = Some(default_lambda_grid());
            }
        }
        Command::Ingest { input, label_column, drop, id_column, ordinal, .. } => {
            cfg.command = "ingest".into();
            if input.is_some() {
                cfg.input = input.clone();
            }
            let mut spec = cfg.ingest.clone().unwrap_or_else(|| IngestSpec::new(""));
            if let Some(l) = label_column {
                spec.label_column = l.clone();
            }
            if let Some(d) = drop {
                spec.drop_columns = d.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            }
            if id_column.is_some() {
                spec.id_column = id_column.clone();
            }
            spec.ordinal |= ordinal;
            if spec.label_column.is_empty() {
                return Err(Error::InvalidArgument("--label-column is required".into()));
            }
            cfg.ingest = Some(spec);
        }
    }
    Ok(cfg)
}

/// Collects output files and writes them at the end, so that a failed run leaves nothing
/// half-written.
struct Output {
    dir: Option<PathBuf>,
    files: Vec<(String, Vec<u8>)>,
}

impl Output {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let mut out = Self { dir: cfg.out.clone(), files: Vec::new() };
        out.add("config.json", json(cfg)?);
        Ok(out)
    }

    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    /// Writes every file into the output directory, or the primary file to stdout and the
    /// config to stderr.
    fn flush(self, primary: &str) -> Result<()> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                for (name, bytes) in &self.files {
                    fs::write(dir.join(name), bytes)?;
                }
            }
            None => {
                for (name, bytes) in &self.files {
                    if name == primary {
                        std::io::stdout().write_all(bytes)?;
                    } else if name == "config.json" {
                        std::io::stderr().write_all(bytes)?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_bytes<F>(header: &[&str], fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Reads `node_id,value` rows; nodes without a row (or with an empty value) are unlabeled.
pub fn read_labels(path: &Path, n: usize) -> Result<(Vec<f64>, Vec<bool>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut labels = vec![0.0; n];
    let mut mask = vec![false; n];
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = || Error::Parse(format!("{} row {}: expected node_id,value", path.display(), r + 1));
        let id: usize = rec.get(0).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let value = rec.get(1).unwrap_or("");
        if id >= n {
            return Err(Error::OutOfRangeNode { edge: 0, node: id, n });
        }
        if value.is_empty() {
            continue;
        }
        let y: f64 = value.parse().map_err(|_| bad())?;
        if !y.is_finite() {
            return Err(bad());
        }
        if mask[id] {
            return Err(Error::Parse(format!("{}: node {id} labeled twice", path.display())));
        }
        labels[id] = y;
        mask[id] = true;
    }
    Ok((labels, mask))
}

pub fn write_labels_csv(labels: &[f64]) -> Result<Vec<u8>> {
    csv_bytes(&["node_id", "value"], |w| {
        for (i, y) in labels.iter().enumerate() {
            w.write_record([i.to_string(), y.to_string()])?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainRecord {
    pub fit: FitResult,
    pub support: SupportReport,
}

fn train_inputs(cfg: &RunConfig) -> Result<(Hypergraph, Vec<f64>, Vec<bool>)> {
    if let Some(g) = &cfg.generated {
        let sim = gen_simulation(&g.spec, g.seed)?;
        let n = sim.hypergraph.n();
        return Ok((sim.hypergraph, sim.labels, vec![true; n]));
    }
    let hp = cfg.hypergraph.as_ref().ok_or_else(|| Error::InvalidArgument("--hypergraph is required".into()))?;
    let lp = cfg.labels.as_ref().ok_or_else(|| Error::InvalidArgument("--labels is required".into()))?;
    let h = Hypergraph::read_json(hp)?;
    let (labels, mask) = read_labels(lp, h.n())?;
    Ok((h, labels, mask))
}

/// Returns whether every fit converged.
fn cmd_train(cfg: &RunConfig, out: &mut Output) -> Result<bool> {
    let (h, labels, mask) = train_inputs(cfg)?;
    let grid = cfg.lambdas();
    let fits: Vec<FitResult> = if grid.len() == 1 {
        vec![fit(&h, &labels, &mask, &LearnerConfig { lambda: grid[0], ..cfg.learner() })?]
    } else {
        fit_grid(&h, &labels, &mask, &cfg.learner(), &grid).into_iter().collect::<Result<_>>()?
    };
    let records: Vec<TrainRecord> =
        fits.into_iter().map(|f| TrainRecord { support: classify_support(&f, Gamma::Auto), fit: f }).collect();
    let all_converged = records.iter().all(|r| r.fit.converged());

    if records.len() == 1 {
        out.add("fit.json", json(&records[0])?);
    } else {
        out.add("fit.json", json(&records)?);
    }
    out.add(
        "nodes.csv",
        csv_bytes(&["lambda", "node_id", "labeled", "f_hat"], |w| {
            for r in &records {
                for (i, f) in r.fit.f_hat.iter().enumerate() {
                    w.write_record([r.fit.lambda.to_string(), i.to_string(), mask[i].to_string(), f.to_string()])?;
                }
            }
            Ok(())
        })?,
    );
    out.add(
        "edges.csv",
        csv_bytes(&["lambda", "edge", "weight", "mu_hat", "delta_hat", "smoothness", "relevant"], |w| {
            for r in &records {
                let ss = r.fit.edge_smoothness();
                for k in 0..ss.len() {
                    w.write_record([
                        r.fit.lambda.to_string(),
                        k.to_string(),
                        r.fit.weights[k].to_string(),
                        r.fit.mu_hat[k].to_string(),
                        r.fit.delta_hat[k].to_string(),
                        ss[k].to_string(),
                        r.support.relevant.contains(&k).to_string(),
                    ])?;
                }
            }
            Ok(())
        })?,
    );
    Ok(all_converged)
}

fn cmd_predict(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let fp = cfg.fit.as_ref().ok_or_else(|| Error::InvalidArgument("--fit is required".into()))?;
    let mp = cfg.memberships.as_ref().ok_or_else(|| Error::InvalidArgument("--memberships is required".into()))?;
    let text = fs::read_to_string(fp).map_err(|e| Error::Io(format!("{}: {e}", fp.display())))?;
    let record: TrainRecord = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: expected a single-λ fit ({e})", fp.display())))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(mp)
        .map_err(|e| Error::Io(format!("{}: {e}", mp.display())))?;
    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = || Error::Parse(format!("{} row {}: expected id,edges", mp.display(), r + 1));
        let id = rec.get(0).ok_or_else(bad)?.to_string();
        let edges: Vec<usize> = rec
            .get(1)
            .ok_or_else(bad)?
            .split(';')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        rows.push((id, predict_out_of_sample(&record.fit, &edges)?));
    }
    match cfg.format {
        Format::Csv => out.add(
            "predictions.csv",
            csv_bytes(&["id", "prediction"], |w| {
                for (id, p) in &rows {
                    w.write_record([id.clone(), p.to_string()])?;
                }
                Ok(())
            })?,
        ),
        Format::Json => out.add("predictions.json", json(&rows)?),
    }
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let study = cfg.study.as_ref().expect("resolved study");
    let outcome = run_study(study)?;
    out.add(
        "results.csv",
        csv_bytes(&["model", "setting", "lambda", "fold", "repeat", "rmse"], |w| {
            for r in &outcome.records {
                w.write_record([
                    r.model.to_string(),
                    r.setting.to_string(),
                    r.lambda.to_string(),
                    r.fold.to_string(),
                    r.repeat.to_string(),
                    r.rmse.to_string(),
                ])?;
            }
            Ok(())
        })?,
    );
    out.add("summary.json", json(&outcome.settings)?);
    out.add(
        "best.csv",
        csv_bytes(&["setting", "model", "best_lambda", "best_rmse", "best_std"], |w| {
            for s in &outcome.settings {
                for m in &s.models {
                    w.write_record([
                        s.setting.to_string(),
                        m.model.to_string(),
                        m.best_lambda.to_string(),
                        m.best_rmse.to_string(),
                        m.best_std.to_string(),
                    ])?;
                }
            }
            Ok(())
        })?,
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SparsistencyOutput {
    certificate: crate::learners::SparsistencyCertificate,
    lambda: Vec<f64>,
    gap: Vec<f64>,
    recovered: Vec<bool>,
}

fn cmd_sparsistency(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let s = cfg.sparsistency.clone().unwrap_or_default();
    let learner = cfg.learner();
    let ws = learner.weight_scheme();
    let sim = gen_simulation(&s.spec, cfg.seed)?;
    let weights = sim.hypergraph.resolve_weights(ws)?;
    let truth_ss: Vec<f64> = sim
        .hypergraph
        .edges()
        .iter()
        .zip(&weights)
        .map(|(e, &w)| w * learner.model.edge_measure(&restrict(&sim.truth, &e.nodes)).value)
        .collect();
    let pick = |relevant: bool| truth_ss.iter().zip(&sim.relevant).filter(move |(_, &r)| r == relevant).map(|(s, _)| *s);
    let gamma_r = s.gamma_relevant.unwrap_or_else(|| pick(true).fold(0.0, f64::max));
    let gamma_i = s.gamma_irrelevant.unwrap_or_else(|| pick(false).fold(f64::INFINITY, f64::min));
    let noise = s.noise_sd.unwrap_or(s.spec.label_noise);
    let certificate = sparsistency_certificate(&sim.hypergraph, learner.model, gamma_r, gamma_i, noise, ws)?;
    let table = lambda_gap_experiment(&s.spec, &learner, &cfg.lambdas(), cfg.seed)?;
    out.add(
        "gap.csv",
        csv_bytes(&["lambda", "edge", "relevant", "smoothness"], |w| {
            for (l, row) in table.grid.iter().zip(&table.smoothness) {
                for (k, ss) in row.iter().enumerate() {
                    w.write_record([l.to_string(), k.to_string(), table.relevant[k].to_string(), ss.to_string()])?;
                }
            }
            Ok(())
        })?,
    );
    let summary = SparsistencyOutput { certificate, lambda: table.grid, gap: table.gap, recovered: table.recovered };
    out.add("certificate.json", json(&summary)?);
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IngestSummary {
    n: usize,
    m: usize,
    edges: Vec<crate::experiments::ingest::EdgeSource>,
    skipped: Vec<crate::experiments::ingest::EdgeSource>,
    label_levels: Option<Vec<String>>,
    node_ids: Vec<String>,
}

fn cmd_ingest(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let input = cfg.input.as_ref().ok_or_else(|| Error::InvalidArgument("--input is required".into()))?;
    let spec = cfg.ingest.as_ref().expect("resolved ingest spec");
    let data = ingest_categorical_csv(input, spec)?;
    out.add("hypergraph.json", data.hypergraph.to_json_string() + "\n");
    out.add("labels.csv", write_labels_csv(&data.labels)?);
    let summary = IngestSummary {
        n: data.hypergraph.n(),
        m: data.hypergraph.m(),
        edges: data.edge_sources,
        skipped: data.skipped,
        label_levels: data.label_levels,
        node_ids: data.node_ids,
    };
    eprintln!("n = {}, m = {}, skipped categories = {}", summary.n, summary.m, summary.skipped.len());
    out.add("summary.json", json(&summary)?);
    Ok(())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SingularSystem { .. } => EXIT_SINGULAR,
        Error::MaxIterExceeded { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_INPUT,
    }
}

/// Runs a resolved config; returns the process exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let result = (|| -> Result<i32> {
        let mut out = Output::new(cfg)?;
        let (primary, code) = match cfg.command.as_str() {
            "train" => {
                let converged = cmd_train(cfg, &mut out)?;
                let primary = if cfg.format == Format::Json { "fit.json" } else { "nodes.csv" };
                (primary, if converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
            }
            "predict" => {
                cmd_predict(cfg, &mut out)?;
                (if cfg.format == Format::Json { "predictions.json" } else { "predictions.csv" }, EXIT_OK)
            }
            "simulate" => {
                cmd_simulate(cfg, &mut out)?;
                (if cfg.format == Format::Json { "summary.json" } else { "results.csv" }, EXIT_OK)
            }
            "sparsistency" => {
                cmd_sparsistency(cfg, &mut out)?;
                (if cfg.format == Format::Json { "certificate.json" } else { "gap.csv" }, EXIT_OK)
            }
            "ingest" => {
                cmd_ingest(cfg, &mut out)?;
                (if cfg.format == Format::Json { "hypergraph.json" } else { "labels.csv" }, EXIT_OK)
            }
            other => return Err(Error::InvalidArgument(format!("unknown command `{other}`"))),
        };
        if code == EXIT_NOT_CONVERGED {
            eprintln!("error: solver did not converge (best iterate written)");
        }
        out.flush(primary)?;
        Ok(code)
    })();
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}

/// Parses arguments, resolves the config, and runs it.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match resolve(&cli.command) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_log_spec() {
        assert_eq!(parse_grid("1e-4..1e2:log7").unwrap(), vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0]);
        assert_eq!(parse_grid("0.5,2").unwrap(), vec![0.5, 2.0]);
        assert_eq!(parse_grid("0..1:lin3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("10..1:log2").unwrap(), vec![10.0, 1.0]);
        assert!(parse_grid("0..1:log3").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig { command: "train".into(), lambda: Some(0.5), ..RunConfig::default() };
        let back: RunConfig = serde_json::from_str(&json(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
