//! Candidate enumeration and the valid-pattern search.
//!
//! Frequent candidates are enumerated depth first over the useful items with
//! vertical tid-list intersection (itemsets) or suffix extension with
//! subsequence matching (sequences). Support is anti-monotone and prunes the
//! search; utility is not and never does. Masks prune only through their size
//! upper bound.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Dataset, DatasetError, FacetRef, ItemId, Level, TransactionId};
use crate::masks::{check_mask, Mask, MaskError};
use crate::utility::{pattern_utility_matrix, RowCondition, UtilityError, UtilitySpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Itemset,
    Sequence,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "itemset" => Ok(Mode::Itemset),
            "sequence" => Ok(Mode::Sequence),
            _ => Err(format!("unknown mode `{s}` (itemset or sequence)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Itemset => "itemset",
            Mode::Sequence => "sequence",
        })
    }
}

/// An itemset (distinct, sorted items) or a sequence (ordered, repeats allowed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    items: Vec<ItemId>,
    mode: Mode,
}

impl Pattern {
    pub fn itemset(mut items: Vec<ItemId>) -> Self {
        items.sort_unstable();
        items.dedup();
        Pattern {
            items,
            mode: Mode::Itemset,
        }
    }

    pub fn sequence(items: Vec<ItemId>) -> Self {
        Pattern {
            items,
            mode: Mode::Sequence,
        }
    }

    pub fn new(mode: Mode, items: Vec<ItemId>) -> Self {
        match mode {
            Mode::Itemset => Pattern::itemset(items),
            Mode::Sequence => Pattern::sequence(items),
        }
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn names<'d>(&self, dataset: &'d Dataset) -> Vec<&'d str> {
        self.items.iter().map(|&i| dataset.item_name(i)).collect()
    }

    /// `{a, b}` for itemsets, `<a, b>` for sequences.
    pub fn display(&self, dataset: &Dataset) -> String {
        let inner = self.names(dataset).join(", ");
        match self.mode {
            Mode::Itemset => format!("{{{inner}}}"),
            Mode::Sequence => format!("<{inner}>"),
        }
    }
}

/// Canonical order: mode, then size, then item ids (lexicographic by name,
/// since ids are interned in name order).
impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.mode
            .cmp(&other.mode)
            .then(self.items.len().cmp(&other.items.len()))
            .then_with(|| self.items.cmp(&other.items))
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which items may appear in candidate patterns.
#[derive(Clone, Default)]
pub enum ItemFilter {
    #[default]
    All,
    /// Items with at least one occurrence where the facet is nonzero. For an
    /// item-level facet the value is `IU_i[k] * q(i, T)`.
    NonzeroFacet(FacetRef),
    /// Items with at least one occurrence whose enclosing layers satisfy the
    /// condition (e.g. `tx.0>0, cont.0=0`).
    Condition(RowCondition),
    Custom(Arc<dyn Fn(&Dataset, ItemId) -> bool + Send + Sync>),
}

impl fmt::Debug for ItemFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string())
    }
}

impl fmt::Display for ItemFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ItemFilter::All => f.write_str("all"),
            ItemFilter::NonzeroFacet(facet) => write!(f, "nonzero:{facet}"),
            ItemFilter::Condition(c) => write!(f, "cond:{c}"),
            ItemFilter::Custom(_) => f.write_str("custom"),
        }
    }
}

impl FromStr for ItemFilter {
    type Err = String;

    /// `all`, `nonzero:tx.2`, or `cond:tx.0>0, cont.0=0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "all" {
            return Ok(ItemFilter::All);
        }
        if let Some(rest) = s.strip_prefix("nonzero:") {
            return rest
                .trim()
                .parse()
                .map(ItemFilter::NonzeroFacet);
        }
        if let Some(rest) = s.strip_prefix("cond:") {
            // Reuse the utility grammar for conditions.
            let spec: UtilitySpec = format!("hfirst:disagree({rest})")
                .parse()
                .map_err(|e: crate::utility::SpecParseError| e.message)?;
            if let crate::utility::UtilityFunction::HorizontalFirst {
                row: crate::utility::RowFn::Condition(c),
                ..
            } = spec.function
            {
                return Ok(ItemFilter::Condition(c));
            }
        }
        Err(format!("bad item filter `{s}` (all, nonzero:FACET or cond:CONDITION)"))
    }
}

impl ItemFilter {
    fn validate(&self, dataset: &Dataset) -> Result<(), DatasetError> {
        let dims = dataset.dims();
        match self {
            ItemFilter::NonzeroFacet(f) => dims.check(*f),
            ItemFilter::Condition(c) => c.facets().try_for_each(|f| dims.check(f)),
            _ => Ok(()),
        }
    }

    fn keeps(&self, dataset: &Dataset, item: ItemId) -> bool {
        let value = |tid: TransactionId, facet: FacetRef| -> Option<f64> {
            match facet.level {
                Level::Item => {
                    let q = dataset.transaction(tid).quantity(item)?;
                    Some(dataset.item(item).facets.get(facet.index)? * q)
                }
                _ => dataset.layer_value(tid, facet),
            }
        };
        match self {
            ItemFilter::All => true,
            ItemFilter::NonzeroFacet(facet) => dataset
                .tid_list(item)
                .iter()
                .any(|&t| value(t, *facet).is_some_and(|v| v != 0.0)),
            ItemFilter::Condition(c) => dataset
                .tid_list(item)
                .iter()
                .any(|&t| c.holds_with(|f| value(t, f))),
            ItemFilter::Custom(pred) => pred(dataset, item),
        }
    }
}

/// Items passing the pre-filter, in id order.
pub fn useful_items(dataset: &Dataset, filter: &ItemFilter) -> Result<Vec<ItemId>, DatasetError> {
    filter.validate(dataset)?;
    Ok(dataset
        .items()
        .iter()
        .map(|i| i.id)
        .filter(|&i| filter.keeps(dataset, i))
        .collect())
}

/// Whether transaction `tid` supports `pattern`. In sequence mode the items
/// must appear in order in the position-sorted occurrences, with gaps allowed
/// unless `contiguous` is set. `contiguous` has no effect on itemsets.
pub fn supports(dataset: &Dataset, tid: TransactionId, pattern: &Pattern, contiguous: bool) -> bool {
    let t = dataset.transaction(tid);
    match pattern.mode {
        Mode::Itemset => pattern.items.iter().all(|&i| t.contains(i)),
        Mode::Sequence => {
            let seq: Vec<ItemId> = t.occurrences.iter().map(|o| o.item).collect();
            !match_ends(&seq, &pattern.items, contiguous).is_empty()
        }
    }
}

/// Occurrence indices at which a match of `pattern` ends. For gap-allowing
/// matches only the earliest end is kept, which is all suffix extension needs.
fn match_ends(seq: &[ItemId], pattern: &[ItemId], contiguous: bool) -> Vec<usize> {
    let Some((&first, rest)) = pattern.split_first() else {
        return Vec::new();
    };
    let mut ends: Vec<usize> = seq
        .iter()
        .enumerate()
        .filter(|(_, &i)| i == first)
        .map(|(k, _)| k)
        .collect();
    if !contiguous {
        ends.truncate(1);
    }
    for &item in rest {
        ends = extend_ends(seq, &ends, item, contiguous);
        if ends.is_empty() {
            break;
        }
    }
    ends
}

fn extend_ends(seq: &[ItemId], ends: &[usize], item: ItemId, contiguous: bool) -> Vec<usize> {
    if contiguous {
        ends.iter()
            .filter(|&&e| seq.get(e + 1) == Some(&item))
            .map(|&e| e + 1)
            .collect()
    } else {
        ends.first()
            .and_then(|&e| seq[e + 1..].iter().position(|&i| i == item).map(|k| e + 1 + k))
            .into_iter()
            .collect()
    }
}

/// Supporting transactions of `pattern`, in id order.
pub fn support_set(dataset: &Dataset, pattern: &Pattern, contiguous: bool) -> Vec<TransactionId> {
    let Some(&first) = pattern.items.first() else {
        return Vec::new();
    };
    dataset
        .tid_list(first)
        .iter()
        .copied()
        .filter(|&t| supports(dataset, t, pattern, contiguous))
        .collect()
}

/// Parameters of the frequent-candidate enumeration shared by mining and
/// predictor construction.
#[derive(Clone, Copy, Debug)]
pub struct Enumeration {
    pub min_support: usize,
    /// `None` leaves the length unbounded.
    pub max_len: Option<usize>,
    pub mode: Mode,
    pub contiguous: bool,
    /// 0 uses the default rayon pool size.
    pub threads: usize,
}

/// Calls `visit` on every pattern over `useful` with support at least
/// `min_support` and length at most `max_len`, passing its sorted support
/// set. Subtrees rooted at each first item run in parallel; results are
/// returned in no particular order.
pub fn enumerate_frequent<T, E, F>(
    dataset: &Dataset,
    useful: &[ItemId],
    params: Enumeration,
    visit: F,
) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(&Pattern, &[TransactionId]) -> Result<Option<T>, E> + Sync,
{
    let max_len = params.max_len.unwrap_or(usize::MAX);
    if max_len == 0 || params.min_support == 0 {
        return Ok(Vec::new());
    }
    let run = || {
        useful
            .par_iter()
            .enumerate()
            .map(|(k, &root)| {
                let mut out = Vec::new();
                let mut walker = Walker {
                    dataset,
                    useful,
                    params,
                    max_len,
                    visit: &visit,
                    out: &mut out,
                };
                match params.mode {
                    Mode::Itemset => {
                        let tids = dataset.tid_list(root).to_vec();
                        walker.itemset(&mut vec![root], tids, k + 1)?;
                    }
                    Mode::Sequence => {
                        let states = dataset
                            .tid_list(root)
                            .iter()
                            .filter_map(|&t| {
                                let seq = walker.sequence_of(t);
                                let ends = match_ends(&seq, &[root], params.contiguous);
                                (!ends.is_empty()).then_some((t, ends))
                            })
                            .collect();
                        walker.sequence(&mut vec![root], states)?;
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<Vec<T>>, E>>()
            .map(|v| v.into_iter().flatten().collect())
    };
    match rayon::ThreadPoolBuilder::new().num_threads(params.threads).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

struct Walker<'a, T, F> {
    dataset: &'a Dataset,
    useful: &'a [ItemId],
    params: Enumeration,
    max_len: usize,
    visit: &'a F,
    out: &'a mut Vec<T>,
}

impl<T, E, F> Walker<'_, T, F>
where
    F: Fn(&Pattern, &[TransactionId]) -> Result<Option<T>, E>,
{
    fn emit(&mut self, pattern: Pattern, tids: &[TransactionId]) -> Result<(), E> {
        if let Some(v) = (self.visit)(&pattern, tids)? {
            self.out.push(v);
        }
        Ok(())
    }

    fn itemset(&mut self, items: &mut Vec<ItemId>, tids: Vec<TransactionId>, next: usize) -> Result<(), E> {
        if tids.len() < self.params.min_support {
            return Ok(());
        }
        self.emit(Pattern::itemset(items.clone()), &tids)?;
        if items.len() >= self.max_len {
            return Ok(());
        }
        for k in next..self.useful.len() {
            let item = self.useful[k];
            let joined = intersect(&tids, self.dataset.tid_list(item));
            if joined.len() >= self.params.min_support {
                items.push(item);
                self.itemset(items, joined, k + 1)?;
                items.pop();
            }
        }
        Ok(())
    }

    fn sequence_of(&self, tid: TransactionId) -> Vec<ItemId> {
        self.dataset
            .transaction(tid)
            .occurrences
            .iter()
            .map(|o| o.item)
            .collect()
    }

    fn sequence(&mut self, items: &mut Vec<ItemId>, states: Vec<(TransactionId, Vec<usize>)>) -> Result<(), E> {
        if states.len() < self.params.min_support {
            return Ok(());
        }
        let tids: Vec<TransactionId> = states.iter().map(|(t, _)| *t).collect();
        self.emit(Pattern::sequence(items.clone()), &tids)?;
        if items.len() >= self.max_len {
            return Ok(());
        }
        let seqs: Vec<Vec<ItemId>> = tids.iter().map(|&t| self.sequence_of(t)).collect();
        for &item in self.useful {
            let next: Vec<(TransactionId, Vec<usize>)> = states
                .iter()
                .zip(&seqs)
                .filter_map(|((t, ends), seq)| {
                    let e = extend_ends(seq, ends, item, self.params.contiguous);
                    (!e.is_empty()).then_some((*t, e))
                })
                .collect();
            if next.len() >= self.params.min_support {
                items.push(item);
                self.sequence(items, next)?;
                items.pop();
            }
        }
        Ok(())
    }
}

fn intersect(a: &[TransactionId], b: &[TransactionId]) -> Vec<TransactionId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct MiningConfig {
    /// `th_f`, at least 1.
    pub min_support: usize,
    /// `th_u`; a pattern is kept when `u(P) > min_utility`.
    pub min_utility: f64,
    pub min_len: usize,
    /// `None` leaves the length unbounded.
    pub max_len: Option<usize>,
    pub mode: Mode,
    pub contiguous: bool,
    pub item_filter: ItemFilter,
    pub utility: UtilitySpec,
    pub masks: Vec<Mask>,
    /// 0 uses the default rayon pool size.
    pub threads: usize,
}

impl MiningConfig {
    pub fn new(utility: UtilitySpec) -> Self {
        MiningConfig {
            min_support: 1,
            min_utility: f64::NEG_INFINITY,
            min_len: 1,
            max_len: None,
            mode: Mode::Itemset,
            contiguous: false,
            item_filter: ItemFilter::All,
            utility,
            masks: Vec::new(),
            threads: 0,
        }
    }

    pub fn validate(&self, dataset: &Dataset) -> Result<(), MiningError> {
        if self.min_support == 0 {
            return Err(MiningError::Config("occurrence threshold must be at least 1".into()));
        }
        if self.min_len == 0 || self.max_len.is_some_and(|m| m < self.min_len) {
            return Err(MiningError::Config(format!(
                "size range needs 1 <= min <= max, got {}..{}",
                self.min_len,
                self.max_len.map_or("".into(), |m| m.to_string())
            )));
        }
        if self.min_utility.is_nan() {
            return Err(MiningError::Config("utility threshold is NaN".into()));
        }
        self.utility.validate(dataset.dims())?;
        for mask in &self.masks {
            mask.validate()?;
            if mask.needs_categories() && !dataset.has_categories() {
                return Err(MaskError::MissingCategoryMap.into());
            }
        }
        self.item_filter.validate(dataset)?;
        Ok(())
    }

    /// Length bound used to cut the enumeration.
    pub fn effective_max_len(&self) -> Option<usize> {
        let masks = self.masks.iter().filter_map(Mask::max_size).min();
        match (self.max_len, masks) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error(transparent)]
    Mask(#[from] MaskError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MiningEntry {
    pub pattern: Pattern,
    pub support: usize,
    pub tids: Vec<TransactionId>,
    pub utility: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MiningDiagnostics {
    pub useful_items: usize,
    /// Frequent candidates within the size bounds.
    pub frequent: usize,
    /// Frequent candidates passing every mask, i.e. whose utility was evaluated.
    pub evaluated: usize,
    /// Evaluated candidates whose utility is undefined on their matrix.
    pub undefined_utility: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MiningResult {
    pub entries: Vec<MiningEntry>,
    pub diagnostics: MiningDiagnostics,
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.items.iter().map(|i| i.index()).collect::<Vec<_>>().serialize(s)
    }
}

enum Visited {
    Kept(MiningEntry),
    Rejected { masked: bool },
    Undefined,
}

/// Finds every pattern over the useful items with size in range, support at
/// least `th_f`, all masks satisfied and `u(P) > th_u`, sorted canonically.
pub fn mine(dataset: &Dataset, config: &MiningConfig) -> Result<MiningResult, MiningError> {
    config.validate(dataset)?;
    let useful = useful_items(dataset, &config.item_filter)?;
    let params = Enumeration {
        min_support: config.min_support,
        max_len: config.effective_max_len(),
        mode: config.mode,
        contiguous: config.contiguous,
        threads: config.threads,
    };
    let visited = enumerate_frequent(dataset, &useful, params, |pattern, tids| {
        if pattern.len() < config.min_len {
            return Ok(None);
        }
        for mask in &config.masks {
            if !check_mask(pattern, dataset, mask)? {
                return Ok(Some(Visited::Rejected { masked: true }));
            }
        }
        let matrix = pattern_utility_matrix(dataset, pattern.items(), tids, config.utility.intra)?;
        match config.utility.evaluate(&matrix) {
            Ok(u) if u > config.min_utility => Ok(Some(Visited::Kept(MiningEntry {
                pattern: pattern.clone(),
                support: tids.len(),
                tids: tids.to_vec(),
                utility: u,
            }))),
            Ok(_) => Ok(Some(Visited::Rejected { masked: false })),
            Err(e) if e.is_undefined() => Ok(Some(Visited::Undefined)),
            Err(e) => Err(MiningError::from(e)),
        }
    })?;
    let mut diagnostics = MiningDiagnostics {
        useful_items: useful.len(),
        frequent: visited.len(),
        ..Default::default()
    };
    let mut entries = Vec::new();
    for v in visited {
        match v {
            Visited::Kept(e) => {
                diagnostics.evaluated += 1;
                entries.push(e);
            }
            Visited::Rejected { masked } => diagnostics.evaluated += usize::from(!masked),
            Visited::Undefined => {
                diagnostics.evaluated += 1;
                diagnostics.undefined_utility += 1;
            }
        }
    }
    entries.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    Ok(MiningResult {
        entries,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::assemble_dataset;
    use crate::facts::parse_facts;

    fn running() -> Dataset {
        assemble_dataset(&parse_facts(include_str!("../data/running_example.lp")).unwrap()).unwrap()
    }

    fn ids(d: &Dataset, names: &[&str]) -> Vec<ItemId> {
        names.iter().map(|n| d.item_by_name(n).unwrap()).collect()
    }

    fn tid_names(d: &Dataset, tids: &[TransactionId]) -> Vec<String> {
        tids.iter().map(|&t| d.transaction(t).name.clone()).collect()
    }

    #[test]
    fn support_examples() {
        let d = running();
        let p = Pattern::itemset(ids(&d, &["paper", "reproducibility"]));
        let s2 = d.transaction_by_name("s2").unwrap();
        let s3 = d.transaction_by_name("s3").unwrap();
        assert!(supports(&d, s2, &p, false));
        assert!(!supports(&d, s3, &p, false));
        assert_eq!(tid_names(&d, &support_set(&d, &p, false)), ["s2", "s4"]);
        let paper = Pattern::itemset(ids(&d, &["paper"]));
        assert_eq!(support_set(&d, &paper, false).len(), 4);
        assert!(support_set(&d, &Pattern::itemset(ids(&d, &["narrow", "readable"])), false).is_empty());
    }

    #[test]
    fn sequence_support() {
        let d = running();
        let s2 = d.transaction_by_name("s2").unwrap();
        let fwd = Pattern::sequence(ids(&d, &["paper", "reproducibility"]));
        let back = Pattern::sequence(ids(&d, &["reproducibility", "paper"]));
        assert!(supports(&d, s2, &fwd, false));
        assert!(!supports(&d, s2, &back, false));
        // paper and reproducibility are separated by `concern` in s2
        assert!(!supports(&d, s2, &fwd, true));
        let adj = Pattern::sequence(ids(&d, &["paper", "concern"]));
        assert!(supports(&d, s2, &adj, true));
        let twice = Pattern::sequence(ids(&d, &["paper", "paper"]));
        assert!(!supports(&d, s2, &twice, false));
    }

    #[test]
    fn filter_max_example() {
        let d = running();
        let mut cfg = MiningConfig::new("hfirst:filter(obj.0):max".parse().unwrap());
        cfg.min_support = 2;
        cfg.min_len = 2;
        cfg.max_len = Some(2);
        cfg.min_utility = 8.0;
        let r = mine(&d, &cfg).unwrap();
        let found: Vec<(String, f64)> = r
            .entries
            .iter()
            .map(|e| (e.pattern.display(&d), e.utility))
            .collect();
        assert_eq!(found, [("{paper, reproducibility}".to_string(), 9.0)]);
    }

    #[test]
    fn unsatisfiable_support_gives_empty_result() {
        let d = running();
        let mut cfg = MiningConfig::new("hfirst:filter(obj.0):max".parse().unwrap());
        cfg.min_support = 5;
        assert!(mine(&d, &cfg).unwrap().entries.is_empty());
    }

    #[test]
    fn undefined_utilities_are_counted() {
        let d = running();
        let mut cfg = MiningConfig::new("mixed:pearson(tx.1, obj.0)".parse().unwrap());
        cfg.min_support = 1;
        let r = mine(&d, &cfg).unwrap();
        // single-transaction patterns cannot be correlated
        assert!(r.diagnostics.undefined_utility > 0);
        assert!(r.entries.iter().all(|e| e.support >= 2));
        assert_eq!(r.diagnostics.frequent, r.diagnostics.evaluated);
    }

    #[test]
    fn useful_item_filters() {
        let d = running();
        let names = |f: &str| -> Vec<String> {
            useful_items(&d, &f.parse().unwrap())
                .unwrap()
                .into_iter()
                .map(|i| d.item_name(i).to_string())
                .collect()
        };
        assert_eq!(names("all").len(), d.items().len());
        // originality is nonzero in s2, s3, s4
        assert_eq!(
            names("nonzero:tx.2"),
            ["concern", "experiment", "good", "paper", "problem", "readable", "reproducibility"]
        );
        // positive appropriateness within a rejected paper: only s2
        assert_eq!(names("cond:tx.0>0, cont.0=0"), ["concern", "paper", "problem", "reproducibility"]);
        assert!(useful_items(&d, &ItemFilter::NonzeroFacet(FacetRef::tx(8))).is_err());
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let d = running();
        let mut cfg = MiningConfig::new("vfirst:max(obj.0, obj.1):sum".parse().unwrap());
        cfg.threads = 1;
        let one = mine(&d, &cfg).unwrap();
        cfg.threads = 4;
        assert_eq!(one, mine(&d, &cfg).unwrap());
        cfg.mode = Mode::Sequence;
        cfg.threads = 1;
        let one = mine(&d, &cfg).unwrap();
        cfg.threads = 3;
        assert_eq!(one, mine(&d, &cfg).unwrap());
    }

    #[test]
    fn config_validation() {
        let d = running();
        let mut cfg = MiningConfig::new("hfirst:filter(obj.0):max".parse().unwrap());
        cfg.min_support = 0;
        assert!(matches!(mine(&d, &cfg), Err(MiningError::Config(_))));
        cfg.min_support = 1;
        cfg.min_len = 3;
        cfg.max_len = Some(2);
        assert!(matches!(mine(&d, &cfg), Err(MiningError::Config(_))));
        cfg.min_len = 1;
        cfg.max_len = None;
        cfg.masks = vec![Mask::cover(["noun"], 2)];
        assert!(matches!(mine(&d, &cfg), Err(MiningError::Mask(_))));
        cfg.masks.clear();
        cfg.utility = "hfirst:filter(obj.5):max".parse().unwrap();
        assert!(matches!(mine(&d, &cfg), Err(MiningError::Utility(_))));
    }

    #[test]
    fn size_mask_caps_enumeration() {
        let d = running();
        let mut cfg = MiningConfig::new("hfirst:filter(tx.0):sum".parse().unwrap());
        cfg.masks = vec!["size:2..2".parse().unwrap()];
        let r = mine(&d, &cfg).unwrap();
        assert!(r.entries.iter().all(|e| e.pattern.len() == 2));
        assert_eq!(cfg.effective_max_len(), Some(2));
    }
}
