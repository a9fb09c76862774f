//! Pattern utility: occurrence utility vectors, the pattern utility matrix and
//! the evaluation of `u(P)` under the horizontal-first, vertical-first and
//! mixed classes.

mod functions;
mod spec;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Dataset, FacetDims, FacetRef, ItemId, Level, TransactionId};

pub use functions::{
    coherence_degree, disagreement_degree, filter_sum, filter_times, fit_line, max_sum, mean,
    mixed_coherence_degree, multiple_correlation, pearson, std_dev, std_max, LineFit,
};
pub use spec::{
    evaluate, Aggregate, CmpOp, Combine, Comparison, MatrixFn, Polarity, RowCondition, RowFn, SpecParseError,
    StdKind, UtilityFunction, UtilitySpec,
};

/// Why a utility value does not exist for a given matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UndefinedReason {
    TooFewRows { needed: usize, got: usize },
    ZeroVariance,
    RankDeficient,
    NotFinite,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndefinedReason::TooFewRows { needed, got } => {
                write!(f, "needs at least {needed} rows, got {got}")
            }
            UndefinedReason::ZeroVariance => f.write_str("a column has zero variance"),
            UndefinedReason::RankDeficient => f.write_str("predictor columns are linearly dependent"),
            UndefinedReason::NotFinite => f.write_str("the value is not finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UtilityError {
    #[error("utility is undefined: {0}")]
    Undefined(UndefinedReason),
    #[error("facet {facet} does not exist ({available} facets at that level)")]
    ColumnOutOfRange { facet: FacetRef, available: usize },
    #[error("{0}")]
    BadSelection(String),
    #[error("item `{item}` does not occur in transaction `{transaction}`")]
    ItemNotInTransaction { item: String, transaction: String },
    #[error("pattern utility matrix requested for a pattern with no supporting transactions")]
    EmptySupport,
    #[error("columns have different lengths")]
    LengthMismatch,
}

impl UtilityError {
    pub fn is_undefined(&self) -> bool {
        matches!(self, UtilityError::Undefined(_))
    }
}

pub(crate) fn undefined<T>(reason: UndefinedReason) -> Result<T, UtilityError> {
    Err(UtilityError::Undefined(reason))
}

/// How the item utility vectors of a pattern's items are merged within one
/// transaction. Each item's facet is first multiplied by its internal utility.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntraAggregator {
    #[default]
    Sum,
    Max,
    Min,
    Avg,
}

impl IntraAggregator {
    pub fn name(self) -> &'static str {
        match self {
            IntraAggregator::Sum => "sum",
            IntraAggregator::Max => "max",
            IntraAggregator::Min => "min",
            IntraAggregator::Avg => "avg",
        }
    }
}

impl std::str::FromStr for IntraAggregator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Self::Sum),
            "max" => Ok(Self::Max),
            "min" => Ok(Self::Min),
            "avg" => Ok(Self::Avg),
            _ => Err(format!("unknown intra-pattern aggregator `{s}`")),
        }
    }
}

/// Merges `(item vector, quantity)` pairs into one vector of length `l`.
pub fn combine_item_vectors(parts: &[(&[f64], f64)], l: usize, aggregator: IntraAggregator) -> Vec<f64> {
    (0..l)
        .map(|k| {
            let products = parts.iter().map(|(v, q)| v[k] * q);
            match aggregator {
                IntraAggregator::Sum => products.sum(),
                IntraAggregator::Max => products.fold(f64::NEG_INFINITY, f64::max),
                IntraAggregator::Min => products.fold(f64::INFINITY, f64::min),
                IntraAggregator::Avg => products.sum::<f64>() / parts.len() as f64,
            }
        })
        .collect()
}

/// The intra-pattern item utility vector `IU_T` of `items` in transaction `tid`.
pub fn intra_pattern_utility(
    dataset: &Dataset,
    items: &[ItemId],
    tid: TransactionId,
    aggregator: IntraAggregator,
) -> Result<Vec<f64>, UtilityError> {
    let l = dataset.dims().item;
    if l == 0 {
        return Ok(Vec::new());
    }
    let transaction = dataset.transaction(tid);
    let mut seen: Vec<ItemId> = Vec::with_capacity(items.len());
    let mut parts = Vec::with_capacity(items.len());
    for &item in items {
        if seen.contains(&item) {
            continue;
        }
        seen.push(item);
        let q = transaction
            .quantity(item)
            .ok_or_else(|| UtilityError::ItemNotInTransaction {
                item: dataset.item_name(item).to_string(),
                transaction: transaction.name.clone(),
            })?;
        parts.push((dataset.item(item).facets.as_slice(), q));
    }
    Ok(combine_item_vectors(&parts, l, aggregator))
}

/// `[IU, TU, OU, CU]` for one supporting transaction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OccurrenceUtilityVector {
    pub transaction: TransactionId,
    pub values: Vec<f64>,
    #[serde(skip)]
    dims: FacetDims,
}

impl OccurrenceUtilityVector {
    pub fn segment(&self, level: Level) -> &[f64] {
        let start = self.dims.offset(level);
        &self.values[start..start + self.dims.of(level)]
    }

    pub fn dims(&self) -> FacetDims {
        self.dims
    }
}

pub fn occurrence_utility_vector(
    dataset: &Dataset,
    items: &[ItemId],
    tid: TransactionId,
    aggregator: IntraAggregator,
) -> Result<OccurrenceUtilityVector, UtilityError> {
    let dims = dataset.dims();
    let mut values = intra_pattern_utility(dataset, items, tid, aggregator)?;
    values.reserve(dims.total() - values.len());
    values.extend_from_slice(&dataset.transaction(tid).facets);
    values.extend_from_slice(&dataset.object_of(tid).facets);
    values.extend_from_slice(&dataset.container_of(tid).facets);
    Ok(OccurrenceUtilityVector {
        transaction: tid,
        values,
        dims,
    })
}

/// `U_P`: one occurrence utility vector per supporting transaction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternUtilityMatrix {
    rows: Vec<OccurrenceUtilityVector>,
    #[serde(skip)]
    dims: FacetDims,
}

impl PatternUtilityMatrix {
    /// Builds a matrix from raw rows; every row must have `dims.total()` values.
    pub fn from_rows(dims: FacetDims, rows: Vec<Vec<f64>>) -> Result<Self, UtilityError> {
        if rows.is_empty() {
            return Err(UtilityError::EmptySupport);
        }
        if rows.iter().any(|r| r.len() != dims.total()) {
            return Err(UtilityError::LengthMismatch);
        }
        Ok(PatternUtilityMatrix {
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, values)| OccurrenceUtilityVector {
                    transaction: TransactionId(i as u32),
                    values,
                    dims,
                })
                .collect(),
            dims,
        })
    }

    pub fn rows(&self) -> &[OccurrenceUtilityVector] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.dims.total()
    }

    pub fn dims(&self) -> FacetDims {
        self.dims
    }

    /// Level and facet index of column `j`.
    pub fn column_meta(&self, j: usize) -> FacetRef {
        let mut rest = j;
        for level in Level::ALL {
            let n = self.dims.of(level);
            if rest < n {
                return FacetRef::new(level, rest);
            }
            rest -= n;
        }
        panic!("column {j} out of range for width {}", self.width())
    }

    pub fn column_index(&self, facet: FacetRef) -> Result<usize, UtilityError> {
        let available = self.dims.of(facet.level);
        if facet.index >= available {
            return Err(UtilityError::ColumnOutOfRange { facet, available });
        }
        Ok(self.dims.offset(facet.level) + facet.index)
    }

    pub fn column(&self, facet: FacetRef) -> Result<Vec<f64>, UtilityError> {
        let j = self.column_index(facet)?;
        Ok(self.rows.iter().map(|r| r.values[j]).collect())
    }
}

/// Builds `U_P` from the supporting transactions `tids` (rows in the given order,
/// which callers keep sorted).
pub fn pattern_utility_matrix(
    dataset: &Dataset,
    items: &[ItemId],
    tids: &[TransactionId],
    aggregator: IntraAggregator,
) -> Result<PatternUtilityMatrix, UtilityError> {
    if tids.is_empty() {
        return Err(UtilityError::EmptySupport);
    }
    let rows = tids
        .iter()
        .map(|&tid| occurrence_utility_vector(dataset, items, tid, aggregator))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PatternUtilityMatrix {
        rows,
        dims: dataset.dims(),
    })
}
