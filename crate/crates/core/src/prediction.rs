//! Pattern-based prediction of a binary object facet.
//!
//! For every frequent pattern `p` and target transaction facet `π`, the
//! supporting transactions give pairs (facet value, object facet value). Pairs
//! with `|γ| >= threshold` become predictors carrying a least-squares line
//! clamped to `[0, 1]`. A transaction's estimate is the `|γ|·ν` weighted mean
//! of the lines of the predictors whose pattern it supports.

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Dataset, DatasetError, ItemId, ObjectId, TransactionId};
use crate::miner::{enumerate_frequent, supports, useful_items, Enumeration, ItemFilter, Mode, Pattern};
use crate::utility::{fit_line, pearson, LineFit, UtilityError};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternPredictor {
    pub pattern: Pattern,
    /// Transaction facet index.
    pub facet: usize,
    /// `ν`: support count.
    pub support: usize,
    /// `γ`: Pearson between the facet and the object facet.
    pub gamma: f64,
    pub fit: LineFit,
}

impl PatternPredictor {
    /// `μ(v)`, clamped to `[0, 1]`.
    pub fn estimate(&self, value: f64) -> f64 {
        self.fit.at(value).clamp(0.0, 1.0)
    }

    pub fn weight(&self) -> f64 {
        self.gamma.abs() * self.support as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictorSet {
    pub predictors: Vec<PatternPredictor>,
    pub object_facet: usize,
    pub min_support: usize,
    pub min_abs_gamma: f64,
    pub mode: Mode,
    pub contiguous: bool,
}

impl PredictorSet {
    pub fn len(&self) -> usize {
        self.predictors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictors.is_empty()
    }

    /// Distinct patterns, in canonical order.
    pub fn patterns(&self) -> Vec<Pattern> {
        let set: BTreeSet<&Pattern> = self.predictors.iter().map(|p| &p.pattern).collect();
        set.into_iter().cloned().collect()
    }

    /// The subset admitted by a stricter correlation threshold.
    pub fn with_min_abs_gamma(&self, threshold: f64) -> PredictorSet {
        PredictorSet {
            predictors: self
                .predictors
                .iter()
                .filter(|p| p.gamma.abs() >= threshold)
                .cloned()
                .collect(),
            min_abs_gamma: threshold,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct PredictorConfig {
    /// Transaction facet indices; empty means all of them.
    pub targets: Vec<usize>,
    pub object_facet: usize,
    pub min_support: usize,
    pub min_abs_gamma: f64,
    pub max_len: Option<usize>,
    pub mode: Mode,
    pub contiguous: bool,
    pub item_filter: ItemFilter,
    /// 0 uses the default rayon pool size.
    pub threads: usize,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            targets: Vec::new(),
            object_facet: 0,
            min_support: 10,
            min_abs_gamma: 0.5,
            max_len: None,
            mode: Mode::Itemset,
            contiguous: false,
            item_filter: ItemFilter::All,
            threads: 0,
        }
    }
}

impl PredictorConfig {
    fn targets(&self, dataset: &Dataset) -> Vec<usize> {
        if self.targets.is_empty() {
            (0..dataset.dims().transaction).collect()
        } else {
            self.targets.clone()
        }
    }

    pub fn validate(&self, dataset: &Dataset) -> Result<(), PredictionError> {
        let dims = dataset.dims();
        if self.object_facet >= dims.object {
            return Err(PredictionError::Config(format!(
                "object facet {} does not exist ({} object facets)",
                self.object_facet, dims.object
            )));
        }
        if let Some(t) = self.targets.iter().find(|t| **t >= dims.transaction) {
            return Err(PredictionError::Config(format!(
                "transaction facet {t} does not exist ({} transaction facets)",
                dims.transaction
            )));
        }
        if self.min_support == 0 {
            return Err(PredictionError::Config("occurrence threshold must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.min_abs_gamma) {
            return Err(PredictionError::Config(format!(
                "correlation threshold {} is outside [0, 1]",
                self.min_abs_gamma
            )));
        }
        if self.max_len == Some(0) {
            return Err(PredictionError::Config("maximum pattern length must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PredictionError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("predictor file line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Fits one predictor per (frequent pattern, target facet) pair whose Pearson
/// correlation with the object facet is defined and at least the threshold in
/// absolute value.
pub fn build_predictors(dataset: &Dataset, config: &PredictorConfig) -> Result<PredictorSet, PredictionError> {
    config.validate(dataset)?;
    let targets = config.targets(dataset);
    let useful = useful_items(dataset, &config.item_filter)?;
    let params = Enumeration {
        min_support: config.min_support,
        max_len: config.max_len,
        mode: config.mode,
        contiguous: config.contiguous,
        threads: config.threads,
    };
    let object = crate::dataset::FacetRef::obj(config.object_facet);
    let found = enumerate_frequent(dataset, &useful, params, |pattern, tids| {
        let y: Vec<f64> = tids
            .iter()
            .map(|&t| dataset.layer_value(t, object).unwrap_or(f64::NAN))
            .collect();
        let mut out = Vec::new();
        for &facet in &targets {
            let x: Vec<f64> = tids.iter().map(|&t| dataset.transaction(t).facets[facet]).collect();
            let Ok(gamma) = pearson(&x, &y) else { continue };
            if gamma.abs() < config.min_abs_gamma {
                continue;
            }
            let Ok(fit) = fit_line(&x, &y) else { continue };
            out.push(PatternPredictor {
                pattern: pattern.clone(),
                facet,
                support: tids.len(),
                gamma,
                fit,
            });
        }
        Ok::<_, PredictionError>((!out.is_empty()).then_some(out))
    })?;
    let mut predictors: Vec<PatternPredictor> = found.into_iter().flatten().collect();
    predictors.sort_by(|a, b| a.pattern.cmp(&b.pattern).then(a.facet.cmp(&b.facet)));
    Ok(PredictorSet {
        predictors,
        object_facet: config.object_facet,
        min_support: config.min_support,
        min_abs_gamma: config.min_abs_gamma,
        mode: config.mode,
        contiguous: config.contiguous,
    })
}

/// Weighted mean of `(μ, γ, ν)` terms with weights `|γ|·ν`; `None` when the
/// total weight is zero.
pub fn ensemble(terms: impl IntoIterator<Item = (f64, f64, f64)>) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (mu, gamma, nu) in terms {
        let w = gamma.abs() * nu;
        if w > 0.0 {
            num += mu * w;
            den += w;
            lo = lo.min(mu);
            hi = hi.max(mu);
        }
    }
    (den > 0.0).then(|| (num / den).clamp(lo, hi))
}

/// The ensemble estimate for transaction `tid`, or `None` when no predictor's
/// pattern occurs in it.
pub fn predict(set: &PredictorSet, dataset: &Dataset, tid: TransactionId) -> Option<f64> {
    let facets = &dataset.transaction(tid).facets;
    let mut last: Option<(&Pattern, bool)> = None;
    let mut terms = Vec::new();
    for p in &set.predictors {
        let hit = match last {
            Some((pat, hit)) if pat == &p.pattern => hit,
            _ => supports(dataset, tid, &p.pattern, set.contiguous),
        };
        last = Some((&p.pattern, hit));
        if hit {
            if let Some(&v) = facets.get(p.facet) {
                terms.push((p.estimate(v), p.gamma, p.support as f64));
            }
        }
    }
    ensemble(terms)
}

/// 1 iff the estimate is at least 0.5.
pub fn classify(estimate: f64) -> u8 {
    u8::from(estimate >= 0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldReport {
    pub fold: usize,
    pub test_objects: usize,
    pub test_transactions: usize,
    pub predictors: usize,
    pub attempted: usize,
    pub correct: usize,
    pub missing: usize,
    pub accuracy: f64,
    /// Set when the fold made no prediction at all; its accuracy is then 0.
    pub no_attempts: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub min_abs_gamma: f64,
    pub folds: Vec<FoldReport>,
    /// Mean of the per-fold accuracies.
    pub mean_accuracy: f64,
    /// Population variance of the per-fold accuracies.
    pub accuracy_variance: f64,
    /// Transactions without a prediction over all test transactions.
    pub missing_rate: f64,
}

/// Fold index of every object: a seeded shuffle dealt round-robin.
pub fn fold_assignment(dataset: &Dataset, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dataset.objects().len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; order.len()];
    for (pos, obj) in order.into_iter().enumerate() {
        fold[obj] = pos % k;
    }
    fold
}

/// k-fold cross-validation with folds over objects.
pub fn cross_validate(
    dataset: &Dataset,
    config: &PredictorConfig,
    k: usize,
    seed: u64,
) -> Result<CvReport, PredictionError> {
    let mut reports = cross_validate_thresholds(dataset, config, &[config.min_abs_gamma], k, seed)?;
    Ok(reports.remove(0))
}

/// Cross-validation at several correlation thresholds over the same folds.
/// Predictors are fitted once per fold at the lowest threshold and filtered.
pub fn cross_validate_thresholds(
    dataset: &Dataset,
    config: &PredictorConfig,
    thresholds: &[f64],
    k: usize,
    seed: u64,
) -> Result<Vec<CvReport>, PredictionError> {
    config.validate(dataset)?;
    let objects = dataset.objects().len();
    if k < 2 || k > objects {
        return Err(PredictionError::Config(format!(
            "fold count must be between 2 and the number of objects ({objects}), got {k}"
        )));
    }
    let Some(lowest) = thresholds.iter().copied().reduce(f64::min) else {
        return Ok(Vec::new());
    };
    let base = PredictorConfig {
        min_abs_gamma: lowest,
        ..config.clone()
    };
    let assignment = fold_assignment(dataset, k, seed);
    let object_facet = crate::dataset::FacetRef::obj(config.object_facet);
    let mut per_threshold: Vec<Vec<FoldReport>> = vec![Vec::new(); thresholds.len()];
    for fold in 0..k {
        let train = dataset.restrict_to_objects(|o: ObjectId| assignment[o.index()] != fold)?;
        let full = build_predictors(&train, &base)?;
        let test: Vec<TransactionId> = dataset
            .transactions()
            .iter()
            .filter(|t| assignment[t.object.index()] == fold)
            .map(|t| t.id)
            .collect();
        let test_objects = assignment.iter().filter(|f| **f == fold).count();
        for (slot, &threshold) in thresholds.iter().enumerate() {
            let set = full.with_min_abs_gamma(threshold);
            let (mut attempted, mut correct) = (0, 0);
            for &tid in &test {
                if let Some(e) = predict(&set, dataset, tid) {
                    attempted += 1;
                    let truth = dataset.layer_value(tid, object_facet).unwrap_or(f64::NAN);
                    correct += usize::from(classify(e) == classify(truth));
                }
            }
            per_threshold[slot].push(FoldReport {
                fold,
                test_objects,
                test_transactions: test.len(),
                predictors: set.len(),
                attempted,
                correct,
                missing: test.len() - attempted,
                accuracy: if attempted == 0 { 0.0 } else { correct as f64 / attempted as f64 },
                no_attempts: attempted == 0,
            });
        }
    }
    Ok(thresholds
        .iter()
        .zip(per_threshold)
        .map(|(&threshold, folds)| summarize(k, seed, threshold, folds))
        .collect())
}

fn summarize(k: usize, seed: u64, min_abs_gamma: f64, folds: Vec<FoldReport>) -> CvReport {
    let n = folds.len() as f64;
    let mean_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / n;
    let accuracy_variance = folds
        .iter()
        .map(|f| (f.accuracy - mean_accuracy).powi(2))
        .sum::<f64>()
        / n;
    let total: usize = folds.iter().map(|f| f.test_transactions).sum();
    let missing: usize = folds.iter().map(|f| f.missing).sum();
    CvReport {
        k,
        seed,
        min_abs_gamma,
        folds,
        mean_accuracy,
        accuracy_variance,
        missing_rate: if total == 0 { 0.0 } else { missing as f64 / total as f64 },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coverage {
    /// Fraction of transactions supporting at least one pattern.
    pub transaction: f64,
    /// Fraction of distinct transaction item-sets containing at least one
    /// pattern's items.
    pub combination: f64,
    pub covered_transactions: usize,
    pub transactions: usize,
    pub covered_combinations: usize,
    pub combinations: usize,
}

pub fn coverage_metrics(dataset: &Dataset, patterns: &[Pattern], contiguous: bool) -> Coverage {
    let transactions = dataset.transactions().len();
    let covered_transactions = dataset
        .transactions()
        .iter()
        .filter(|t| patterns.iter().any(|p| supports(dataset, t.id, p, contiguous)))
        .count();
    let combos: BTreeSet<&[ItemId]> = dataset.transactions().iter().map(|t| t.items()).collect();
    let pattern_sets: Vec<Vec<ItemId>> = patterns
        .iter()
        .map(|p| {
            let mut items = p.items().to_vec();
            items.sort_unstable();
            items.dedup();
            items
        })
        .collect();
    let covered_combinations = combos
        .iter()
        .filter(|combo| {
            pattern_sets
                .iter()
                .any(|p| p.iter().all(|i| combo.binary_search(i).is_ok()))
        })
        .count();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Coverage {
        transaction: ratio(covered_transactions, transactions),
        combination: ratio(covered_combinations, combos.len()),
        covered_transactions,
        transactions,
        covered_combinations,
        combinations: combos.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub min_support: usize,
    pub min_abs_gamma: f64,
    pub predictors: usize,
    pub patterns: usize,
    pub coverage: Coverage,
    pub cv: Option<CvReport>,
}

/// Evaluates every (occurrence threshold, correlation threshold) pair:
/// coverage of the predictors fitted on the whole dataset and, when `cv` is
/// `Some((k, seed))`, cross-validated accuracy and missing rate.
pub fn sweep(
    dataset: &Dataset,
    config: &PredictorConfig,
    min_supports: &[usize],
    thresholds: &[f64],
    cv: Option<(usize, u64)>,
) -> Result<Vec<SweepCell>, PredictionError> {
    let mut cells = Vec::new();
    let Some(lowest) = thresholds.iter().copied().reduce(f64::min) else {
        return Ok(cells);
    };
    for &min_support in min_supports {
        let cfg = PredictorConfig {
            min_support,
            min_abs_gamma: lowest,
            ..config.clone()
        };
        let full = build_predictors(dataset, &cfg)?;
        let reports = match cv {
            Some((k, seed)) => Some(cross_validate_thresholds(dataset, &cfg, thresholds, k, seed)?),
            None => None,
        };
        for (i, &threshold) in thresholds.iter().enumerate() {
            let set = full.with_min_abs_gamma(threshold);
            let patterns = set.patterns();
            cells.push(SweepCell {
                min_support,
                min_abs_gamma: threshold,
                predictors: set.len(),
                patterns: patterns.len(),
                coverage: coverage_metrics(dataset, &patterns, set.contiguous),
                cv: reports.as_ref().map(|r| r[i].clone()),
            });
        }
    }
    Ok(cells)
}

const HEADER: &str = "# ehupm predictors";

/// Writes the predictor set in its line-oriented text form: a header line
/// with the build parameters, then one tab-separated line per predictor
/// holding the item names (JSON array), facet, support, γ, slope and intercept.
pub fn write_predictors(set: &PredictorSet, dataset: &Dataset, mut out: impl Write) -> io::Result<()> {
    writeln!(
        out,
        "{HEADER} object_facet={} min_support={} min_abs_gamma={} mode={} contiguous={}",
        set.object_facet, set.min_support, set.min_abs_gamma, set.mode, set.contiguous
    )?;
    for p in &set.predictors {
        let names = serde_json::to_string(&p.pattern.names(dataset)).map_err(io::Error::other)?;
        writeln!(
            out,
            "{names}\t{}\t{}\t{}\t{}\t{}",
            p.facet, p.support, p.gamma, p.fit.slope, p.fit.intercept
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedPredictors {
    pub set: PredictorSet,
    /// Predictors dropped because one of their items is unknown to the dataset.
    pub dropped: usize,
}

/// Reads predictors written by [`write_predictors`], resolving item names
/// against `dataset`.
pub fn read_predictors(input: impl BufRead, dataset: &Dataset) -> Result<LoadedPredictors, PredictionError> {
    let mut set = PredictorSet {
        predictors: Vec::new(),
        object_facet: 0,
        min_support: 1,
        min_abs_gamma: 0.0,
        mode: Mode::Itemset,
        contiguous: false,
    };
    let mut dropped = 0;
    let mut seen_header = false;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = n + 1;
        let fail = |message: String| PredictionError::Format {
            line: line_no,
            message,
        };
        if let Some(rest) = line.strip_prefix(HEADER) {
            for kv in rest.split_whitespace() {
                let (k, v) = kv.split_once('=').ok_or_else(|| fail(format!("bad header field `{kv}`")))?;
                let bad = |_| fail(format!("bad value for `{k}`"));
                match k {
                    "object_facet" => set.object_facet = v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                    "min_support" => set.min_support = v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                    "min_abs_gamma" => set.min_abs_gamma = v.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                    "mode" => set.mode = v.parse().map_err(bad)?,
                    "contiguous" => set.contiguous = v.parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
                    _ => return Err(fail(format!("unknown header field `{k}`"))),
                }
            }
            seen_header = true;
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            return Err(fail("missing header line".into()));
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(fail(format!("expected 6 tab-separated fields, found {}", fields.len())));
        }
        let names: Vec<String> =
            serde_json::from_str(fields[0]).map_err(|e| fail(format!("bad item list: {e}")))?;
        let num = |i: usize| -> Result<f64, PredictionError> {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| fail(format!("bad number `{}`", fields[i])))
        };
        let facet: usize = fields[1].parse().map_err(|_| fail(format!("bad facet `{}`", fields[1])))?;
        let support: usize = fields[2].parse().map_err(|_| fail(format!("bad support `{}`", fields[2])))?;
        let (gamma, slope, intercept) = (num(3)?, num(4)?, num(5)?);
        let items: Option<Vec<ItemId>> = names.iter().map(|n| dataset.item_by_name(n)).collect();
        match items {
            Some(items) if !items.is_empty() => set.predictors.push(PatternPredictor {
                pattern: Pattern::new(set.mode, items),
                facet,
                support,
                gamma,
                fit: LineFit { slope, intercept },
            }),
            _ => dropped += 1,
        }
    }
    if !seen_header {
        return Err(PredictionError::Format {
            line: 0,
            message: "missing header line".into(),
        });
    }
    set.predictors.sort_by(|a, b| a.pattern.cmp(&b.pattern).then(a.facet.cmp(&b.facet)));
    Ok(LoadedPredictors { set, dropped })
}
