//! Batch front end: load fact files, run a command, emit a result document.
//!
//! Exit codes: 0 on success (empty results included), 1 for argument or
//! validation errors, 2 for runtime and data errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dataset::{assemble_dataset, Dataset, DatasetError, FacetDims, FacetRef, Level};
use crate::facts::{parse_facts, FactSet, PredicateRenames};
use crate::masks::Mask;
use crate::miner::{mine, ItemFilter, MiningConfig, MiningError, Mode};
use crate::prediction::{
    build_predictors, classify, coverage_metrics, cross_validate, predict, read_predictors, sweep,
    write_predictors, PredictionError, PredictorConfig, PredictorSet, SweepCell,
};
use crate::utility::UtilitySpec;

#[derive(Debug, Parser)]
#[command(
    name = "ehupm",
    version,
    about = "Extended high-utility pattern mining over layered fact databases"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Rename an input predicate before loading, as OLD=NEW (repeatable).
    #[arg(long = "rename", value_name = "OLD=NEW", global = true)]
    pub renames: Vec<String>,
    /// Output format. For `sweep`, csv emits long-format plot data.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Write the document to a file instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,
    /// Seed for fold assignment.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads; 0 uses one per core.
    #[arg(long, env = "EHUPM_THREADS", default_value_t = 0, global = true)]
    pub threads: usize,
    /// Leave timing out of the diagnostics, for byte-stable output.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset statistics and facet labels.
    Stats(InputArgs),
    /// Mine extended high-utility patterns.
    Mine(MineArgs),
    /// Fit pattern predictors and predict every transaction.
    Predict(PredictArgs),
    /// Cross-validate the pattern predictors with folds over objects.
    Cv(CvArgs),
    /// Transaction and combination coverage of the predictor patterns.
    Coverage(CoverageArgs),
    /// Coverage and cross-validation over a grid of thresholds.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Fact files; their facts are merged.
    #[arg(required = true, value_name = "FACTS")]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Occurrence threshold th_f.
    #[arg(long, default_value_t = 1)]
    pub min_occ: usize,
    /// Utility threshold th_u; patterns need u(P) > th_u. Unbounded below when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub min_util: Option<f64>,
    /// Pattern size range: MIN..MAX, MIN.. or N.
    #[arg(long, value_parser = parse_size, default_value = "1..")]
    pub size: SizeRange,
    /// Pattern kind: itemset or sequence.
    #[arg(long, value_parser = parse_mode, default_value = "itemset")]
    pub mode: Mode,
    /// Sequence occurrences must be contiguous.
    #[arg(long)]
    pub contiguous: bool,
    /// Item pre-filter: all, nonzero:FACET, or cond:CONDITION.
    #[arg(long, value_parser = parse_filter, default_value = "all")]
    pub filter: ItemFilter,
    /// Utility function, e.g. `hfirst:filter(obj.0):max`.
    #[arg(long, value_parser = parse_utility)]
    pub utility: UtilitySpec,
    /// Pattern mask, e.g. `size:2..4` or `cover:noun,verb,adj@3` (repeatable).
    #[arg(long = "mask", value_parser = parse_mask)]
    pub masks: Vec<Mask>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub min: usize,
    pub max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Target transaction facets as tx.N, N or labels, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub targets: Vec<String>,
    /// Object facet to predict, as obj.N, N or a label.
    #[arg(long, default_value = "obj.0")]
    pub object_facet: String,
    /// Maximum pattern length.
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Pattern kind: itemset or sequence.
    #[arg(long, value_parser = parse_mode, default_value = "itemset")]
    pub mode: Mode,
    /// Sequence occurrences must be contiguous.
    #[arg(long)]
    pub contiguous: bool,
    /// Item pre-filter: all, nonzero:FACET, or cond:CONDITION.
    #[arg(long, value_parser = parse_filter, default_value = "all")]
    pub filter: ItemFilter,
}

#[derive(Debug, Args)]
pub struct Thresholds {
    /// Occurrence threshold.
    #[arg(long, default_value_t = 10)]
    pub min_occ: usize,
    /// Minimum absolute Pearson correlation.
    #[arg(long, default_value_t = 0.5)]
    pub pearson: f64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thresholds: Thresholds,
    /// Load predictors from a file instead of fitting them.
    #[arg(long, value_name = "PATH")]
    pub load: Option<PathBuf>,
    /// Save the fitted predictors.
    #[arg(long, value_name = "PATH")]
    pub save: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thresholds: Thresholds,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thresholds: Thresholds,
    /// Use the patterns of a saved predictor file.
    #[arg(long, value_name = "PATH")]
    pub load: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Occurrence thresholds: a list (5,10,15) or a range (5..25:5).
    #[arg(long, value_parser = parse_usize_grid, default_value = "5,10,15,20,25")]
    pub min_occ: ::std::vec::Vec<usize>,
    /// Correlation thresholds: a list (0.5,0.7) or a range (0.5..1.0:0.1).
    #[arg(long, value_parser = parse_f64_grid, default_value = "0.5..1.0:0.1")]
    pub pearson: ::std::vec::Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Skip cross-validation and report coverage only.
    #[arg(long)]
    pub no_cv: bool,
}

fn parse_size(s: &str) -> Result<SizeRange, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad size `{s}`"));
    let range = match s.split_once("..") {
        Some((a, "")) => SizeRange { min: num(a)?, max: None },
        Some((a, b)) => SizeRange { min: num(a)?, max: Some(num(b)?) },
        None => {
            let n = num(s)?;
            SizeRange { min: n, max: Some(n) }
        }
    };
    if range.min == 0 || range.max.is_some_and(|m| m < range.min) {
        return Err(format!("size range `{s}` needs 1 <= MIN <= MAX"));
    }
    Ok(range)
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_filter(s: &str) -> Result<ItemFilter, String> {
    s.parse()
}

fn parse_utility(s: &str) -> Result<UtilitySpec, String> {
    s.parse().map_err(|e: crate::utility::SpecParseError| e.to_string())
}

fn parse_mask(s: &str) -> Result<Mask, String> {
    s.parse().map_err(|e: crate::masks::MaskError| e.to_string())
}

/// `a,b,c` or `lo..hi:step` (inclusive). Range values are rounded to 12
/// decimals so that `0.5..1.0:0.1` yields exactly 0.5, 0.6, ..., 1.0.
fn parse_f64_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad number `{t}` in `{s}`"))
    };
    if let Some((range, step)) = s.split_once(':') {
        let (lo, hi) = range.split_once("..").ok_or_else(|| format!("bad range `{s}`"))?;
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if step <= 0.0 || hi < lo {
            return Err(format!("range `{s}` needs LO <= HI and STEP > 0"));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        return Ok((0..=n)
            .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
            .collect());
    }
    s.split(',').map(num).collect()
}

fn parse_usize_grid(s: &str) -> Result<Vec<usize>, String> {
    parse_f64_grid(s)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(format!("`{s}` must list non-negative integers"))
            }
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: crate::facts::ParseError,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Mining(#[from] MiningError),
    #[error(transparent)]
    Prediction(#[from] PredictionError),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Mining(_) => 1,
            CliError::Prediction(PredictionError::Config(_)) => 1,
            _ => 2,
        }
    }
}

/// Runs the command line with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok(doc) => match deliver(&cli.global, &doc, out) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Reads, merges, renames and assembles the fact files.
pub fn load_dataset(inputs: &[PathBuf], renames: &[String]) -> Result<Dataset, CliError> {
    let renames = PredicateRenames::from_pairs(renames).map_err(CliError::Usage)?;
    let mut facts = FactSet::new();
    for path in inputs {
        let shown = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: shown.clone(),
            source,
        })?;
        let set = parse_facts(&text).map_err(|source| CliError::Parse { path: shown, source })?;
        facts.merge(set);
    }
    facts.rename(&renames);
    Ok(assemble_dataset(&facts)?)
}

/// A rectangular result whose rows serialize as JSON objects in column order.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [&'static str], &'a [Value]);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0.iter().zip(self.1) {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(&Row(&self.columns, row))?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetStats {
    pub containers: usize,
    pub objects: usize,
    pub transactions: usize,
    pub items: usize,
    pub facet_dims: FacetDims,
}

impl DatasetStats {
    pub fn of(d: &Dataset) -> Self {
        DatasetStats {
            containers: d.containers().len(),
            objects: d.objects().len(),
            transactions: d.transactions().len(),
            items: d.items().len(),
            facet_dims: d.dims(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub command: &'static str,
    pub config: Value,
    pub dataset: DatasetStats,
    pub rows: Table,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
    pub diagnostics: serde_json::Map<String, Value>,
    /// Sweep cells, kept for the plot-data CSV.
    #[serde(skip)]
    pub sweep: Option<Vec<SweepCell>>,
}

fn resolve_facet(dataset: &Dataset, text: &str, level: Level) -> Result<usize, CliError> {
    let text = text.trim();
    let facet = if let Ok(n) = text.parse::<usize>() {
        FacetRef::new(level, n)
    } else if let Ok(f) = text.parse::<FacetRef>() {
        f
    } else {
        dataset
            .facet_by_label(text)
            .ok_or_else(|| CliError::Usage(format!("unknown facet `{text}`")))?
    };
    if facet.level != level {
        return Err(CliError::Usage(format!(
            "facet `{text}` is not a {} facet",
            level.short_name()
        )));
    }
    dataset
        .dims()
        .check(facet)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(facet.index)
}

fn predictor_config(
    dataset: &Dataset,
    model: &ModelArgs,
    min_occ: usize,
    pearson: f64,
    threads: usize,
) -> Result<PredictorConfig, CliError> {
    let targets = model
        .targets
        .iter()
        .map(|t| resolve_facet(dataset, t, Level::Transaction))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PredictorConfig {
        targets,
        object_facet: resolve_facet(dataset, &model.object_facet, Level::Object)?,
        min_support: min_occ,
        min_abs_gamma: pearson,
        max_len: model.max_len,
        mode: model.mode,
        contiguous: model.contiguous,
        item_filter: model.filter.clone(),
        threads,
    })
}

fn model_echo(cfg: &PredictorConfig) -> Value {
    json!({
        "targets": cfg.targets,
        "object_facet": cfg.object_facet,
        "min_occ": cfg.min_support,
        "pearson": cfg.min_abs_gamma,
        "max_len": cfg.max_len,
        "mode": cfg.mode,
        "contiguous": cfg.contiguous,
        "filter": cfg.item_filter.to_string(),
    })
}

fn names(dataset: &Dataset, tids: &[crate::dataset::TransactionId]) -> Value {
    tids.iter()
        .map(|&t| Value::from(dataset.transaction(t).name.as_str()))
        .collect()
}

fn load_or_build(
    dataset: &Dataset,
    cfg: &PredictorConfig,
    load: Option<&PathBuf>,
    diagnostics: &mut serde_json::Map<String, Value>,
) -> Result<PredictorSet, CliError> {
    match load {
        Some(path) => {
            let file = fs::File::open(path).map_err(|source| CliError::Read {
                path: path.display().to_string(),
                source,
            })?;
            let loaded = read_predictors(BufReader::new(file), dataset)?;
            diagnostics.insert("dropped_predictors".into(), loaded.dropped.into());
            Ok(loaded.set)
        }
        None => Ok(build_predictors(dataset, cfg)?),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Stats(_) => "stats",
        Command::Mine(_) => "mine",
        Command::Predict(_) => "predict",
        Command::Cv(_) => "cv",
        Command::Coverage(_) => "coverage",
        Command::Sweep(_) => "sweep",
    }
}

/// Executes the parsed command and returns its result document.
pub fn execute(cli: &Cli) -> Result<ResultDocument, CliError> {
    let g = &cli.global;
    let inputs = match &cli.command {
        Command::Stats(a) => &a.inputs,
        Command::Mine(a) => &a.input.inputs,
        Command::Predict(a) => &a.input.inputs,
        Command::Cv(a) => &a.input.inputs,
        Command::Coverage(a) => &a.input.inputs,
        Command::Sweep(a) => &a.input.inputs,
    };
    let started = Instant::now();
    let dataset = load_dataset(inputs, &g.renames)?;
    let load_ms = started.elapsed().as_secs_f64() * 1e3;
    let started = Instant::now();

    let mut diagnostics = serde_json::Map::new();
    let mut summary = None;
    let mut sweep_cells = None;
    let input_names: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
    let mut config = json!({ "inputs": input_names, "renames": g.renames, "seed": g.seed });

    let rows = match &cli.command {
        Command::Stats(_) => {
            let mut t = Table::new(&["level", "index", "label"]);
            for level in Level::ALL {
                for index in 0..dataset.dims().of(level) {
                    let label = dataset.label(FacetRef::new(level, index));
                    t.push(vec![level.short_name().into(), index.into(), label.into()]);
                }
            }
            diagnostics.insert("categories".into(), dataset.has_categories().into());
            t
        }
        Command::Mine(a) => {
            let mut cfg = MiningConfig::new(a.utility.clone());
            cfg.min_support = a.min_occ;
            cfg.min_utility = a.min_util.unwrap_or(f64::NEG_INFINITY);
            cfg.min_len = a.size.min;
            cfg.max_len = a.size.max;
            cfg.mode = a.mode;
            cfg.contiguous = a.contiguous;
            cfg.item_filter = a.filter.clone();
            cfg.masks = a.masks.clone();
            cfg.threads = g.threads;
            config["mining"] = json!({
                "min_occ": a.min_occ,
                "min_util": a.min_util,
                "size": { "min": a.size.min, "max": a.size.max },
                "mode": a.mode,
                "contiguous": a.contiguous,
                "filter": a.filter.to_string(),
                "utility": a.utility.to_string(),
                "masks": a.masks.iter().map(Mask::to_string).collect::<Vec<_>>(),
            });
            let result = mine(&dataset, &cfg)?;
            let mut t = Table::new(&["pattern", "size", "support", "utility", "transactions"]);
            for e in &result.entries {
                t.push(vec![
                    e.pattern.names(&dataset).into(),
                    e.pattern.len().into(),
                    e.support.into(),
                    e.utility.into(),
                    names(&dataset, &e.tids),
                ]);
            }
            let d = result.diagnostics;
            diagnostics.insert("useful_items".into(), d.useful_items.into());
            diagnostics.insert("frequent".into(), d.frequent.into());
            diagnostics.insert("evaluated".into(), d.evaluated.into());
            diagnostics.insert("undefined_utility".into(), d.undefined_utility.into());
            t
        }
        Command::Predict(a) => {
            let cfg = predictor_config(&dataset, &a.model, a.thresholds.min_occ, a.thresholds.pearson, g.threads)?;
            config["model"] = model_echo(&cfg);
            let set = load_or_build(&dataset, &cfg, a.load.as_ref(), &mut diagnostics)?;
            if let Some(path) = &a.save {
                let file = fs::File::create(path)?;
                let mut w = io::BufWriter::new(file);
                write_predictors(&set, &dataset, &mut w)?;
                w.flush()?;
            }
            let object = FacetRef::obj(set.object_facet);
            let mut t = Table::new(&["transaction", "object", "estimate", "class", "truth"]);
            let (mut attempted, mut correct) = (0usize, 0usize);
            for tx in dataset.transactions() {
                let estimate = predict(&set, &dataset, tx.id);
                let truth = dataset.layer_value(tx.id, object).map(classify);
                if let Some(e) = estimate {
                    attempted += 1;
                    correct += usize::from(Some(classify(e)) == truth);
                }
                t.push(vec![
                    tx.name.as_str().into(),
                    dataset.object(tx.object).name.as_str().into(),
                    estimate.into(),
                    estimate.map(classify).into(),
                    truth.into(),
                ]);
            }
            let total = dataset.transactions().len();
            diagnostics.insert("predictors".into(), set.len().into());
            summary = Some(json!({
                "predictors": set.len(),
                "attempted": attempted,
                "missing": total - attempted,
                "in_sample_accuracy": if attempted == 0 { 0.0 } else { correct as f64 / attempted as f64 },
            }));
            t
        }
        Command::Cv(a) => {
            let cfg = predictor_config(&dataset, &a.model, a.thresholds.min_occ, a.thresholds.pearson, g.threads)?;
            config["model"] = model_echo(&cfg);
            config["folds"] = a.folds.into();
            let r = cross_validate(&dataset, &cfg, a.folds, g.seed)?;
            let mut t = Table::new(&[
                "fold", "test_objects", "test_transactions", "predictors", "attempted", "correct", "missing",
                "accuracy", "no_attempts",
            ]);
            for f in &r.folds {
                t.push(vec![
                    f.fold.into(),
                    f.test_objects.into(),
                    f.test_transactions.into(),
                    f.predictors.into(),
                    f.attempted.into(),
                    f.correct.into(),
                    f.missing.into(),
                    f.accuracy.into(),
                    f.no_attempts.into(),
                ]);
            }
            summary = Some(json!({
                "mean_accuracy": r.mean_accuracy,
                "accuracy_variance": r.accuracy_variance,
                "missing_rate": r.missing_rate,
            }));
            t
        }
        Command::Coverage(a) => {
            let cfg = predictor_config(&dataset, &a.model, a.thresholds.min_occ, a.thresholds.pearson, g.threads)?;
            config["model"] = model_echo(&cfg);
            let set = load_or_build(&dataset, &cfg, a.load.as_ref(), &mut diagnostics)?;
            let patterns = set.patterns();
            let c = coverage_metrics(&dataset, &patterns, set.contiguous);
            let mut t = Table::new(&[
                "patterns", "predictors", "transaction_coverage", "combination_coverage", "covered_transactions",
                "transactions", "covered_combinations", "combinations",
            ]);
            t.push(vec![
                patterns.len().into(),
                set.len().into(),
                c.transaction.into(),
                c.combination.into(),
                c.covered_transactions.into(),
                c.transactions.into(),
                c.covered_combinations.into(),
                c.combinations.into(),
            ]);
            t
        }
        Command::Sweep(a) => {
            let cfg = predictor_config(&dataset, &a.model, 1, 0.0, g.threads)?;
            let mut echo = model_echo(&cfg);
            echo["min_occ"] = json!(a.min_occ);
            echo["pearson"] = json!(a.pearson);
            config["model"] = echo;
            config["folds"] = if a.no_cv { Value::Null } else { a.folds.into() };
            if let Some(bad) = a.pearson.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(CliError::Usage(format!("correlation threshold {bad} is outside [0, 1]")));
            }
            if a.min_occ.contains(&0) {
                return Err(CliError::Usage("occurrence thresholds must be at least 1".into()));
            }
            let cv = (!a.no_cv).then_some((a.folds, g.seed));
            let cells = sweep(&dataset, &cfg, &a.min_occ, &a.pearson, cv)?;
            let mut t = Table::new(&[
                "min_occ", "threshold", "predictors", "patterns", "transaction_coverage", "combination_coverage",
                "accuracy", "accuracy_variance", "missing_rate",
            ]);
            for c in &cells {
                let cv = c.cv.as_ref();
                t.push(vec![
                    c.min_support.into(),
                    c.min_abs_gamma.into(),
                    c.predictors.into(),
                    c.patterns.into(),
                    c.coverage.transaction.into(),
                    c.coverage.combination.into(),
                    cv.map(|r| r.mean_accuracy).into(),
                    cv.map(|r| r.accuracy_variance).into(),
                    cv.map(|r| r.missing_rate).into(),
                ]);
            }
            sweep_cells = Some(cells);
            t
        }
    };
    if !g.no_timing {
        diagnostics.insert(
            "timing_ms".into(),
            json!({ "load": load_ms, "run": started.elapsed().as_secs_f64() * 1e3 }),
        );
    }
    Ok(ResultDocument {
        command: command_name(&cli.command),
        config,
        dataset: DatasetStats::of(&dataset),
        rows,
        summary,
        diagnostics,
        sweep: sweep_cells,
    })
}

/// Long-format plot data for a sweep: one `(min_occ, threshold, metric, value)`
/// line per cell and metric.
pub fn emit_plot_data(cells: &[SweepCell]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["min_occ", "threshold", "metric", "value"]);
    for c in cells {
        let mut metrics = vec![
            ("transaction_coverage", c.coverage.transaction),
            ("combination_coverage", c.coverage.combination),
        ];
        if let Some(r) = &c.cv {
            metrics.push(("accuracy", r.mean_accuracy));
            metrics.push(("accuracy_variance", r.accuracy_variance));
            metrics.push(("missing_rate", r.missing_rate));
        }
        for (name, value) in metrics {
            let _ = w.write_record([
                c.min_support.to_string(),
                c.min_abs_gamma.to_string(),
                name.to_string(),
                value.to_string(),
            ]);
        }
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell_text).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Renders a document in the requested format.
pub fn render(doc: &ResultDocument, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).map_err(io::Error::other)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            if let Some(cells) = &doc.sweep {
                return Ok(emit_plot_data(cells));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&doc.rows.columns).map_err(io::Error::other)?;
            for row in &doc.rows.rows {
                w.write_record(row.iter().map(cell_text)).map_err(io::Error::other)?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| io::Error::other(e.to_string()))?)
                .unwrap_or_default())
        }
        Format::Table => {
            let mut s = String::new();
            let d = &doc.dataset;
            let (l, m, n, o) = d.facet_dims.as_tuple();
            let _ = writeln!(
                s,
                "# {}: {} containers, {} objects, {} transactions, {} items; facets (l, m, n, o) = ({l}, {m}, {n}, {o})",
                doc.command, d.containers, d.objects, d.transactions, d.items
            );
            let cells: Vec<Vec<String>> = doc.rows.rows.iter().map(|r| r.iter().map(cell_text).collect()).collect();
            let widths: Vec<usize> = doc
                .rows
                .columns
                .iter()
                .enumerate()
                .map(|(j, c)| cells.iter().map(|r| r[j].chars().count()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let line = |fields: Vec<&str>| {
                fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, w)| format!("{f:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(s, "{}", line(doc.rows.columns.to_vec()));
            for r in &cells {
                let _ = writeln!(s, "{}", line(r.iter().map(String::as_str).collect()));
            }
            if let Some(Value::Object(summary)) = &doc.summary {
                for (k, v) in summary {
                    let _ = writeln!(s, "# {k}: {}", cell_text(v));
                }
            }
            for (k, v) in &doc.diagnostics {
                let _ = writeln!(s, "# {k}: {}", cell_text(v));
            }
            Ok(s)
        }
    }
}

fn deliver(g: &GlobalArgs, doc: &ResultDocument, out: &mut dyn Write) -> Result<(), CliError> {
    let text = render(doc, g.format)?;
    match &g.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Format as ValueEnum>::from_str(s, true)
    }
}
