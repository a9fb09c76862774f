//! The catalogue of built-in utility functions, each usable on its own, plus
//! the small amount of statistics they need.

use super::spec::{Polarity, RowCondition, StdKind};
use super::{undefined, PatternUtilityMatrix, UndefinedReason, UtilityError};
use crate::dataset::FacetRef;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn all_equal(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Standard deviation; undefined on fewer than two values.
pub fn std_dev(values: &[f64], kind: StdKind) -> Result<f64, UtilityError> {
    let n = values.len();
    if n < 2 {
        return undefined(UndefinedReason::TooFewRows { needed: 2, got: n });
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    let denom = match kind {
        StdKind::Population => n as f64,
        StdKind::Sample => (n - 1) as f64,
    };
    Ok((ss / denom).sqrt())
}

/// Pearson product-moment correlation of two equally long columns.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, UtilityError> {
    if x.len() != y.len() {
        return Err(UtilityError::LengthMismatch);
    }
    let n = x.len();
    if n < 2 {
        return undefined(UndefinedReason::TooFewRows { needed: 2, got: n });
    }
    if all_equal(x) || all_equal(y) {
        return undefined(UndefinedReason::ZeroVariance);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = sxy / (sxx * syy).sqrt();
    if !r.is_finite() {
        return undefined(UndefinedReason::NotFinite);
    }
    Ok(r.clamp(-1.0, 1.0))
}

/// Least-squares line `y ≈ slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LineFit {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit, UtilityError> {
    if x.len() != y.len() {
        return Err(UtilityError::LengthMismatch);
    }
    if x.len() < 2 {
        return undefined(UndefinedReason::TooFewRows { needed: 2, got: x.len() });
    }
    if all_equal(x) {
        return undefined(UndefinedReason::ZeroVariance);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Multiple correlation coefficient `R` of `y` on the predictor columns `xs`
/// (least squares with intercept), computed through a Householder QR of the
/// centred design matrix.
pub fn multiple_correlation(xs: &[Vec<f64>], y: &[f64]) -> Result<f64, UtilityError> {
    let p = xs.len();
    if p == 0 {
        return Err(UtilityError::BadSelection(
            "multiple correlation needs at least one predictor".into(),
        ));
    }
    let n = y.len();
    if xs.iter().any(|c| c.len() != n) {
        return Err(UtilityError::LengthMismatch);
    }
    if n <= p {
        return undefined(UndefinedReason::TooFewRows { needed: p + 1, got: n });
    }
    if all_equal(y) {
        return undefined(UndefinedReason::ZeroVariance);
    }

    // Column-major centred copy of X, and centred y.
    let mut a: Vec<Vec<f64>> = xs
        .iter()
        .map(|c| {
            let m = mean(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let my = mean(y);
    let mut b: Vec<f64> = y.iter().map(|v| v - my).collect();
    let ss_tot: f64 = b.iter().map(|v| v * v).sum();

    let scale = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return undefined(UndefinedReason::RankDeficient);
    }
    let tol = 1e-10 * scale;

    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= tol {
            return undefined(UndefinedReason::RankDeficient);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(k) {
            reflect(&mut col[k..]);
        }
        reflect(&mut b[k..]);
    }

    let ss_reg: f64 = b[..p].iter().map(|v| v * v).sum();
    let r2 = (ss_reg / ss_tot).clamp(0.0, 1.0);
    if !r2.is_finite() {
        return undefined(UndefinedReason::NotFinite);
    }
    Ok(r2.sqrt())
}

fn require_columns(columns: &[FacetRef], what: &str) -> Result<(), UtilityError> {
    if columns.is_empty() {
        Err(UtilityError::BadSelection(format!("{what} needs at least one column")))
    } else {
        Ok(())
    }
}

/// Filter & Sum: the sum of one facet over all occurrences.
pub fn filter_sum(m: &PatternUtilityMatrix, column: FacetRef) -> Result<f64, UtilityError> {
    Ok(m.column(column)?.iter().sum())
}

/// Filter & Times: the product of one facet over all occurrences.
pub fn filter_times(m: &PatternUtilityMatrix, column: FacetRef) -> Result<f64, UtilityError> {
    Ok(m.column(column)?.iter().product())
}

fn percentage(hits: usize, rows: usize) -> f64 {
    100.0 * hits as f64 / rows as f64
}

/// Percentage (0..=100) of occurrences whose selected facets share the polarity.
pub fn coherence_degree(
    m: &PatternUtilityMatrix,
    columns: &[FacetRef],
    polarity: Polarity,
) -> Result<f64, UtilityError> {
    require_columns(columns, "coherence degree")?;
    let idx = columns
        .iter()
        .map(|c| m.column_index(*c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut values = Vec::with_capacity(idx.len());
    let hits = m
        .rows()
        .iter()
        .filter(|r| {
            values.clear();
            values.extend(idx.iter().map(|&j| r.values[j]));
            polarity.coherent(&values)
        })
        .count();
    Ok(percentage(hits, m.row_count()))
}

/// Percentage (0..=100) of occurrences satisfying `condition`, typically a
/// transaction facet set against an object or container facet such as
/// `tx.2 > 0, cont.0 = 0`.
pub fn disagreement_degree(m: &PatternUtilityMatrix, condition: &RowCondition) -> Result<f64, UtilityError> {
    let bound = condition.bind(m)?;
    let hits = m.rows().iter().filter(|r| bound.holds(&r.values)).count();
    Ok(percentage(hits, m.row_count()))
}

/// Max & Sum: per-facet maximum over occurrences, summed over facets.
pub fn max_sum(m: &PatternUtilityMatrix, columns: &[FacetRef]) -> Result<f64, UtilityError> {
    require_columns(columns, "max & sum")?;
    let mut total = 0.0;
    for c in columns {
        total += m.column(*c)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
    }
    Ok(total)
}

/// Std & Max: per-facet standard deviation, then the largest one.
pub fn std_max(m: &PatternUtilityMatrix, columns: &[FacetRef], kind: StdKind) -> Result<f64, UtilityError> {
    require_columns(columns, "std & max")?;
    let mut best = f64::NEG_INFINITY;
    for c in columns {
        best = best.max(std_dev(&m.column(*c)?, kind)?);
    }
    Ok(best)
}

/// Fraction of occurrences with the requested polarity on `a`, times the same
/// fraction on `b`. The result is a product of fractions, in `[0, 1]`.
pub fn mixed_coherence_degree(
    m: &PatternUtilityMatrix,
    a: FacetRef,
    b: FacetRef,
    polarity: (Polarity, Polarity),
) -> Result<f64, UtilityError> {
    let fraction = |column: FacetRef, p: Polarity| -> Result<f64, UtilityError> {
        let col = m.column(column)?;
        Ok(col.iter().filter(|v| p.holds(**v)).count() as f64 / col.len() as f64)
    };
    Ok(fraction(a, polarity.0)? * fraction(b, polarity.1)?)
}
