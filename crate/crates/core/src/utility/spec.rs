//! Utility specifications: which class (horizontal-first, vertical-first,
//! mixed) and which parts make up a concrete `u(P)`, plus the textual form
//! accepted on the command line.
//!
//! ```text
//! spec      := class ":" body (";" "intra=" intra)*
//! hfirst    := "hfirst:" rowfn [":" agg]        (agg defaults to percent for coherent/disagree)
//! rowfn     := "filter(" facet ")" | agg "(" facets ")"
//!            | "coherent(" facets ["," polarity] ")" | "disagree(" condition ")"
//! vfirst    := "vfirst:" agg "(" facets ")" ("+" agg "(" facets ")")* ":" ("filter" | agg)
//! mixed     := "mixed:" ("pearson" | "abspearson") "(" facet "," facet ")"
//!            | "mixed:multicorr(" facet ("," facet)+ ")"   (the last facet is the response)
//! condition := comparison ("," comparison)* ("|" comparison ("," comparison)*)*
//! comparison:= facet (">" | ">=" | "<" | "<=" | "=" | "!=") number
//! agg       := sum | times | max | min | avg | std | sstd | percent | fracpos | fracneg
//! polarity  := pos | neg | either
//! facet     := ("item" | "tx" | "obj" | "cont") "." index
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::functions::{multiple_correlation, pearson, std_dev};
use super::{undefined, IntraAggregator, PatternUtilityMatrix, UndefinedReason, UtilityError};
use crate::dataset::{FacetDims, FacetRef, Level};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StdKind {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n - 1.
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Either,
}

impl Polarity {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Polarity::Positive => v > 0.0,
            Polarity::Negative => v < 0.0,
            Polarity::Either => v != 0.0,
        }
    }

    /// All values positive, all negative, or (for `Either`) one of the two.
    pub fn coherent(self, values: &[f64]) -> bool {
        match self {
            Polarity::Positive => values.iter().all(|v| *v > 0.0),
            Polarity::Negative => values.iter().all(|v| *v < 0.0),
            Polarity::Either => {
                values.iter().all(|v| *v > 0.0) || values.iter().all(|v| *v < 0.0)
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            Polarity::Positive => "pos",
            Polarity::Negative => "neg",
            Polarity::Either => "either",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn apply(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub facet: FacetRef,
    pub op: CmpOp,
    pub value: f64,
}

impl Comparison {
    pub fn new(facet: FacetRef, op: CmpOp, value: f64) -> Self {
        Comparison { facet, op, value }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.facet, self.op.symbol(), self.value)
    }
}

/// A disjunction of conjunctions of facet comparisons, checked per occurrence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowCondition {
    pub alternatives: Vec<Vec<Comparison>>,
}

/// A condition with facets resolved to matrix columns.
pub(crate) struct BoundCondition(Vec<Vec<(usize, CmpOp, f64)>>);

impl BoundCondition {
    pub(crate) fn holds(&self, row: &[f64]) -> bool {
        self.0
            .iter()
            .any(|conj| conj.iter().all(|(j, op, v)| op.apply(row[*j], *v)))
    }
}

impl RowCondition {
    pub fn all(comparisons: Vec<Comparison>) -> Self {
        RowCondition {
            alternatives: vec![comparisons],
        }
    }

    pub fn any_of(alternatives: Vec<Vec<Comparison>>) -> Self {
        RowCondition { alternatives }
    }

    pub fn facets(&self) -> impl Iterator<Item = FacetRef> + '_ {
        self.alternatives.iter().flatten().map(|c| c.facet)
    }

    /// Evaluates the condition with facet values supplied by `value`; a facet
    /// for which `value` returns `None` fails its comparison.
    pub fn holds_with(&self, value: impl Fn(FacetRef) -> Option<f64>) -> bool {
        self.alternatives.iter().any(|conj| {
            conj.iter()
                .all(|c| value(c.facet).is_some_and(|v| c.op.apply(v, c.value)))
        })
    }

    pub(crate) fn bind(&self, m: &PatternUtilityMatrix) -> Result<BoundCondition, UtilityError> {
        if self.alternatives.is_empty() || self.alternatives.iter().any(Vec::is_empty) {
            return Err(UtilityError::BadSelection("empty condition".into()));
        }
        self.alternatives
            .iter()
            .map(|conj| {
                conj.iter()
                    .map(|c| Ok((m.column_index(c.facet)?, c.op, c.value)))
                    .collect()
            })
            .collect::<Result<_, _>>()
            .map(BoundCondition)
    }
}

impl fmt::Display for RowCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, conj) in self.alternatives.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            for (k, c) in conj.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// Reduces a list of numbers (a column, or the facets of a row) to one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    Sum,
    Times,
    Max,
    Min,
    Avg,
    Std(StdKind),
    /// Mean times 100; the percentage of ones in an indicator column.
    Percent,
    FractionPositive,
    FractionNegative,
}

impl Aggregate {
    pub fn apply(self, values: &[f64]) -> Result<f64, UtilityError> {
        if values.is_empty() {
            return Err(UtilityError::BadSelection("aggregate over no values".into()));
        }
        let n = values.len() as f64;
        Ok(match self {
            Aggregate::Sum => values.iter().sum(),
            Aggregate::Times => values.iter().product(),
            Aggregate::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregate::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregate::Avg => values.iter().sum::<f64>() / n,
            Aggregate::Std(kind) => std_dev(values, kind)?,
            Aggregate::Percent => 100.0 * values.iter().sum::<f64>() / n,
            Aggregate::FractionPositive => values.iter().filter(|v| **v > 0.0).count() as f64 / n,
            Aggregate::FractionNegative => values.iter().filter(|v| **v < 0.0).count() as f64 / n,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Aggregate::Sum => "sum",
            Aggregate::Times => "times",
            Aggregate::Max => "max",
            Aggregate::Min => "min",
            Aggregate::Avg => "avg",
            Aggregate::Std(StdKind::Population) => "std",
            Aggregate::Std(StdKind::Sample) => "sstd",
            Aggregate::Percent => "percent",
            Aggregate::FractionPositive => "fracpos",
            Aggregate::FractionNegative => "fracneg",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sum" => Aggregate::Sum,
            "times" => Aggregate::Times,
            "max" => Aggregate::Max,
            "min" => Aggregate::Min,
            "avg" => Aggregate::Avg,
            "std" => Aggregate::Std(StdKind::Population),
            "sstd" => Aggregate::Std(StdKind::Sample),
            "percent" => Aggregate::Percent,
            "fracpos" => Aggregate::FractionPositive,
            "fracneg" => Aggregate::FractionNegative,
            _ => return None,
        })
    }
}

/// `f_h` of a horizontal-first function: one number per occurrence.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFn {
    /// Keeps a single facet.
    Filter(FacetRef),
    Reduce(Aggregate, Vec<FacetRef>),
    /// 1 when the selected facets share the polarity, else 0.
    Coherent(Vec<FacetRef>, Polarity),
    /// 1 when the condition holds, else 0.
    Condition(RowCondition),
}

/// Second stage of a vertical-first function, over the per-column values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    /// Requires exactly one column and returns its value.
    Filter,
    Reduce(Aggregate),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixFn {
    Pearson { x: FacetRef, y: FacetRef },
    AbsPearson { x: FacetRef, y: FacetRef },
    MultipleCorrelation { predictors: Vec<FacetRef>, response: FacetRef },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityFunction {
    /// `u(P) = f_v(f_h(U_P))`.
    HorizontalFirst { row: RowFn, column: Aggregate },
    /// `u(P) = f_h(f_v(U_P))`; each group applies its aggregate to each of its columns.
    VerticalFirst {
        groups: Vec<(Aggregate, Vec<FacetRef>)>,
        combine: Combine,
    },
    /// `u(P) = f(U_P)`.
    Mixed(MatrixFn),
}

/// A complete, concrete pattern utility function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UtilitySpec {
    pub function: UtilityFunction,
    pub intra: IntraAggregator,
}

impl UtilitySpec {
    pub fn new(function: UtilityFunction) -> Self {
        UtilitySpec {
            function,
            intra: IntraAggregator::Sum,
        }
    }

    pub fn with_intra(mut self, intra: IntraAggregator) -> Self {
        self.intra = intra;
        self
    }

    pub fn hfirst(row: RowFn, column: Aggregate) -> Self {
        Self::new(UtilityFunction::HorizontalFirst { row, column })
    }

    pub fn vfirst(groups: Vec<(Aggregate, Vec<FacetRef>)>, combine: Combine) -> Self {
        Self::new(UtilityFunction::VerticalFirst { groups, combine })
    }

    /// Filter & Sum (the classical utility when applied to an item facet).
    pub fn filter_sum(facet: FacetRef) -> Self {
        Self::hfirst(RowFn::Filter(facet), Aggregate::Sum)
    }

    pub fn filter_times(facet: FacetRef) -> Self {
        Self::hfirst(RowFn::Filter(facet), Aggregate::Times)
    }

    pub fn coherence(facets: Vec<FacetRef>, polarity: Polarity) -> Self {
        Self::hfirst(RowFn::Coherent(facets, polarity), Aggregate::Percent)
    }

    pub fn disagreement(condition: RowCondition) -> Self {
        Self::hfirst(RowFn::Condition(condition), Aggregate::Percent)
    }

    pub fn max_sum(facets: Vec<FacetRef>) -> Self {
        Self::vfirst(vec![(Aggregate::Max, facets)], Combine::Reduce(Aggregate::Sum))
    }

    pub fn std_max(facets: Vec<FacetRef>, kind: StdKind) -> Self {
        Self::vfirst(vec![(Aggregate::Std(kind), facets)], Combine::Reduce(Aggregate::Max))
    }

    pub fn mixed_coherence(a: FacetRef, pa: Polarity, b: FacetRef, pb: Polarity) -> Self {
        let fraction = |p: Polarity| match p {
            Polarity::Negative => Aggregate::FractionNegative,
            _ => Aggregate::FractionPositive,
        };
        Self::vfirst(
            vec![(fraction(pa), vec![a]), (fraction(pb), vec![b])],
            Combine::Reduce(Aggregate::Times),
        )
    }

    pub fn pearson(x: FacetRef, y: FacetRef) -> Self {
        Self::new(UtilityFunction::Mixed(MatrixFn::Pearson { x, y }))
    }

    pub fn abs_pearson(x: FacetRef, y: FacetRef) -> Self {
        Self::new(UtilityFunction::Mixed(MatrixFn::AbsPearson { x, y }))
    }

    pub fn multiple_correlation(predictors: Vec<FacetRef>, response: FacetRef) -> Self {
        Self::new(UtilityFunction::Mixed(MatrixFn::MultipleCorrelation {
            predictors,
            response,
        }))
    }

    /// Every facet the function reads.
    pub fn facets(&self) -> Vec<FacetRef> {
        match &self.function {
            UtilityFunction::HorizontalFirst { row, .. } => match row {
                RowFn::Filter(f) => vec![*f],
                RowFn::Reduce(_, fs) | RowFn::Coherent(fs, _) => fs.clone(),
                RowFn::Condition(c) => c.facets().collect(),
            },
            UtilityFunction::VerticalFirst { groups, .. } => {
                groups.iter().flat_map(|(_, fs)| fs.iter().copied()).collect()
            }
            UtilityFunction::Mixed(f) => match f {
                MatrixFn::Pearson { x, y } | MatrixFn::AbsPearson { x, y } => vec![*x, *y],
                MatrixFn::MultipleCorrelation {
                    predictors,
                    response,
                } => predictors.iter().chain(Some(response)).copied().collect(),
            },
        }
    }

    /// Checks that the required parts are present and every facet exists.
    pub fn validate(&self, dims: FacetDims) -> Result<(), UtilityError> {
        let bad = |m: &str| Err(UtilityError::BadSelection(m.to_string()));
        match &self.function {
            UtilityFunction::HorizontalFirst { row, .. } => match row {
                RowFn::Reduce(_, fs) | RowFn::Coherent(fs, _) if fs.is_empty() => {
                    return bad("row function needs at least one facet")
                }
                RowFn::Condition(c)
                    if c.alternatives.is_empty() || c.alternatives.iter().any(Vec::is_empty) =>
                {
                    return bad("empty condition")
                }
                _ => {}
            },
            UtilityFunction::VerticalFirst { groups, combine } => {
                let columns: usize = groups.iter().map(|(_, fs)| fs.len()).sum();
                if groups.is_empty() || groups.iter().any(|(_, fs)| fs.is_empty()) {
                    return bad("vertical-first groups need at least one facet each");
                }
                if *combine == Combine::Filter && columns != 1 {
                    return bad("filter as the final step needs exactly one column");
                }
            }
            UtilityFunction::Mixed(MatrixFn::MultipleCorrelation { predictors, .. })
                if predictors.is_empty() =>
            {
                return bad("multiple correlation needs at least one predictor")
            }
            UtilityFunction::Mixed(_) => {}
        }
        for facet in self.facets() {
            let available = dims.of(facet.level);
            if facet.index >= available {
                return Err(UtilityError::ColumnOutOfRange { facet, available });
            }
        }
        Ok(())
    }

    /// Evaluates `u(P)` on a pattern utility matrix.
    pub fn evaluate(&self, m: &PatternUtilityMatrix) -> Result<f64, UtilityError> {
        let value = match &self.function {
            UtilityFunction::HorizontalFirst { row, column } => {
                let per_row = row_values(row, m)?;
                column.apply(&per_row)?
            }
            UtilityFunction::VerticalFirst { groups, combine } => {
                let mut per_column = Vec::new();
                for (agg, facets) in groups {
                    for facet in facets {
                        per_column.push(agg.apply(&m.column(*facet)?)?);
                    }
                }
                match combine {
                    Combine::Filter if per_column.len() == 1 => per_column[0],
                    Combine::Filter => {
                        return Err(UtilityError::BadSelection(
                            "filter as the final step needs exactly one column".into(),
                        ))
                    }
                    Combine::Reduce(agg) => agg.apply(&per_column)?,
                }
            }
            UtilityFunction::Mixed(f) => match f {
                MatrixFn::Pearson { x, y } => pearson(&m.column(*x)?, &m.column(*y)?)?,
                MatrixFn::AbsPearson { x, y } => pearson(&m.column(*x)?, &m.column(*y)?)?.abs(),
                MatrixFn::MultipleCorrelation {
                    predictors,
                    response,
                } => {
                    let xs = predictors
                        .iter()
                        .map(|p| m.column(*p))
                        .collect::<Result<Vec<_>, _>>()?;
                    multiple_correlation(&xs, &m.column(*response)?)?
                }
            },
        };
        if value.is_finite() {
            Ok(value)
        } else {
            undefined(UndefinedReason::NotFinite)
        }
    }
}

fn row_values(row: &RowFn, m: &PatternUtilityMatrix) -> Result<Vec<f64>, UtilityError> {
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    match row {
        RowFn::Filter(f) => m.column(*f),
        RowFn::Reduce(agg, facets) => {
            let idx = facets
                .iter()
                .map(|f| m.column_index(*f))
                .collect::<Result<Vec<_>, _>>()?;
            let mut buf = Vec::with_capacity(idx.len());
            m.rows()
                .iter()
                .map(|r| {
                    buf.clear();
                    buf.extend(idx.iter().map(|&j| r.values[j]));
                    agg.apply(&buf)
                })
                .collect()
        }
        RowFn::Coherent(facets, polarity) => {
            let idx = facets
                .iter()
                .map(|f| m.column_index(*f))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(m.rows()
                .iter()
                .map(|r| {
                    let vals: Vec<f64> = idx.iter().map(|&j| r.values[j]).collect();
                    indicator(polarity.coherent(&vals))
                })
                .collect())
        }
        RowFn::Condition(c) => {
            let bound = c.bind(m)?;
            Ok(m.rows().iter().map(|r| indicator(bound.holds(&r.values))).collect())
        }
    }
}

/// Free-function form of [`UtilitySpec::evaluate`].
pub fn evaluate(m: &PatternUtilityMatrix, spec: &UtilitySpec) -> Result<f64, UtilityError> {
    spec.evaluate(m)
}

fn write_facets(f: &mut fmt::Formatter<'_>, facets: &[FacetRef]) -> fmt::Result {
    for (i, x) in facets.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.function {
            UtilityFunction::HorizontalFirst { row, column } => {
                f.write_str("hfirst:")?;
                match row {
                    RowFn::Filter(x) => write!(f, "filter({x})")?,
                    RowFn::Reduce(agg, xs) => {
                        write!(f, "{}(", agg.name())?;
                        write_facets(f, xs)?;
                        f.write_str(")")?;
                    }
                    RowFn::Coherent(xs, p) => {
                        f.write_str("coherent(")?;
                        write_facets(f, xs)?;
                        write!(f, ", {})", p.name())?;
                    }
                    RowFn::Condition(c) => write!(f, "disagree({c})")?,
                }
                write!(f, ":{}", column.name())?;
            }
            UtilityFunction::VerticalFirst { groups, combine } => {
                f.write_str("vfirst:")?;
                for (i, (agg, xs)) in groups.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{}(", agg.name())?;
                    write_facets(f, xs)?;
                    f.write_str(")")?;
                }
                match combine {
                    Combine::Filter => f.write_str(":filter")?,
                    Combine::Reduce(agg) => write!(f, ":{}", agg.name())?,
                }
            }
            UtilityFunction::Mixed(m) => match m {
                MatrixFn::Pearson { x, y } => write!(f, "mixed:pearson({x}, {y})")?,
                MatrixFn::AbsPearson { x, y } => write!(f, "mixed:abspearson({x}, {y})")?,
                MatrixFn::MultipleCorrelation {
                    predictors,
                    response,
                } => {
                    f.write_str("mixed:multicorr(")?;
                    write_facets(f, predictors)?;
                    write!(f, ", {response})")?;
                }
            },
        }
        if self.intra != IntraAggregator::Sum {
            write!(f, ";intra={}", self.intra.name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("bad utility spec `{input}` at offset {offset}: {message}")]
pub struct SpecParseError {
    pub input: String,
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

type PResult<T> = Result<T, SpecParseError>;

impl<'a> Parser<'a> {
    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SpecParseError {
            input: self.input.to_string(),
            offset: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.input.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> PResult<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.fail(format!("expected `{token}`"))
        }
    }

    fn word(&mut self) -> PResult<&'a str> {
        self.ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return self.fail("expected a name");
        }
        let w = &self.rest()[..len];
        self.pos += len;
        Ok(w)
    }

    fn peek_word(&mut self) -> Option<&'a str> {
        let save = self.pos;
        let w = self.word().ok();
        self.pos = save;
        w
    }

    fn facet(&mut self) -> PResult<FacetRef> {
        let start = self.pos;
        let level = self.word()?;
        let level: Level = match level.parse() {
            Ok(l) => l,
            Err(e) => {
                self.pos = start;
                return self.fail(e);
            }
        };
        self.expect(".")?;
        let idx = self.word()?;
        match idx.parse() {
            Ok(i) => Ok(FacetRef::new(level, i)),
            Err(_) => self.fail(format!("bad facet index `{idx}`")),
        }
    }

    fn facets(&mut self) -> PResult<Vec<FacetRef>> {
        let mut out = vec![self.facet()?];
        while self.eat(",") {
            out.push(self.facet()?);
        }
        Ok(out)
    }

    fn number(&mut self) -> PResult<f64> {
        self.ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+' || c == 'e'))
            .unwrap_or(self.rest().len());
        let text = &self.rest()[..len];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += len;
                Ok(v)
            }
            _ => self.fail(format!("bad number `{text}`")),
        }
    }

    fn comparison(&mut self) -> PResult<Comparison> {
        let facet = self.facet()?;
        let op = if self.eat(">=") {
            CmpOp::Ge
        } else if self.eat("<=") {
            CmpOp::Le
        } else if self.eat("!=") {
            CmpOp::Ne
        } else if self.eat(">") {
            CmpOp::Gt
        } else if self.eat("<") {
            CmpOp::Lt
        } else if self.eat("=") {
            CmpOp::Eq
        } else {
            return self.fail("expected a comparison operator");
        };
        Ok(Comparison::new(facet, op, self.number()?))
    }

    fn condition(&mut self) -> PResult<RowCondition> {
        let mut alternatives = Vec::new();
        loop {
            let mut conj = vec![self.comparison()?];
            while self.eat(",") {
                conj.push(self.comparison()?);
            }
            alternatives.push(conj);
            if !self.eat("|") {
                return Ok(RowCondition { alternatives });
            }
        }
    }

    fn aggregate(&mut self) -> PResult<Aggregate> {
        let w = self.word()?;
        match Aggregate::from_name(w) {
            Some(a) => Ok(a),
            None => self.fail(format!("unknown aggregate `{w}`")),
        }
    }

    fn hfirst(&mut self) -> PResult<UtilityFunction> {
        let name = self.word()?;
        self.expect("(")?;
        let (row, default) = match name {
            "filter" => (RowFn::Filter(self.facet()?), None),
            "coherent" => {
                let mut facets = vec![self.facet()?];
                let mut polarity = Polarity::Either;
                while self.eat(",") {
                    match self.peek_word() {
                        Some("pos") | Some("neg") | Some("either") => {
                            polarity = match self.word()? {
                                "pos" => Polarity::Positive,
                                "neg" => Polarity::Negative,
                                _ => Polarity::Either,
                            };
                            break;
                        }
                        _ => facets.push(self.facet()?),
                    }
                }
                (RowFn::Coherent(facets, polarity), Some(Aggregate::Percent))
            }
            "disagree" => (RowFn::Condition(self.condition()?), Some(Aggregate::Percent)),
            other => match Aggregate::from_name(other) {
                Some(agg) => (RowFn::Reduce(agg, self.facets()?), None),
                None => return self.fail(format!("unknown row function `{other}`")),
            },
        };
        self.expect(")")?;
        let column = if self.eat(":") {
            self.aggregate()?
        } else if let Some(d) = default {
            d
        } else {
            return self.fail("expected `:` and a column aggregate");
        };
        Ok(UtilityFunction::HorizontalFirst { row, column })
    }

    fn vfirst(&mut self) -> PResult<UtilityFunction> {
        let mut groups = Vec::new();
        loop {
            let agg = self.aggregate()?;
            self.expect("(")?;
            groups.push((agg, self.facets()?));
            self.expect(")")?;
            if !self.eat("+") {
                break;
            }
        }
        self.expect(":")?;
        let combine = if self.peek_word() == Some("filter") {
            self.word()?;
            Combine::Filter
        } else {
            Combine::Reduce(self.aggregate()?)
        };
        Ok(UtilityFunction::VerticalFirst { groups, combine })
    }

    fn mixed(&mut self) -> PResult<UtilityFunction> {
        let name = self.word()?;
        self.expect("(")?;
        let f = match name {
            "pearson" | "abspearson" => {
                let x = self.facet()?;
                self.expect(",")?;
                let y = self.facet()?;
                if name == "pearson" {
                    MatrixFn::Pearson { x, y }
                } else {
                    MatrixFn::AbsPearson { x, y }
                }
            }
            "multicorr" => {
                let mut facets = self.facets()?;
                if facets.len() < 2 {
                    return self.fail("multicorr needs predictors and a response");
                }
                let response = facets.pop().unwrap();
                MatrixFn::MultipleCorrelation {
                    predictors: facets,
                    response,
                }
            }
            other => return self.fail(format!("unknown mixed function `{other}`")),
        };
        self.expect(")")?;
        Ok(UtilityFunction::Mixed(f))
    }

    fn spec(&mut self) -> PResult<UtilitySpec> {
        let class = self.word()?;
        self.expect(":")?;
        let function = match class {
            "hfirst" => self.hfirst()?,
            "vfirst" => self.vfirst()?,
            "mixed" => self.mixed()?,
            other => return self.fail(format!("unknown class `{other}` (hfirst, vfirst or mixed)")),
        };
        let mut spec = UtilitySpec::new(function);
        while self.eat(";") {
            let key = self.word()?;
            self.expect("=")?;
            let value = self.word()?;
            match key {
                "intra" => match value.parse() {
                    Ok(a) => spec.intra = a,
                    Err(e) => return self.fail(e),
                },
                _ => return self.fail(format!("unknown option `{key}`")),
            }
        }
        self.ws();
        if !self.rest().is_empty() {
            return self.fail("trailing input");
        }
        Ok(spec)
    }
}

impl FromStr for UtilitySpec {
    type Err = SpecParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser { input: s, pos: 0 }.spec()
    }
}
