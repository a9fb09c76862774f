//! Pattern masks: structural and semantic validity predicates on candidates.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::miner::Pattern;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mask {
    /// `min <= |P| <= max`.
    Size { min: usize, max: usize },
    /// Once `|P| >= trigger`, every required category needs an item in `P`.
    CategoryCoverage {
        required: BTreeSet<String>,
        trigger: usize,
    },
    All(Vec<Mask>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaskError {
    #[error("size mask needs 1 <= min <= max, got {min}..{max}")]
    BadSize { min: usize, max: usize },
    #[error("category coverage mask needs at least one category")]
    NoCategories,
    #[error("category coverage mask used but the dataset has no itemCategory facts")]
    MissingCategoryMap,
    #[error("bad mask `{0}`: expected size:MIN..MAX or cover:CAT,CAT@TRIGGER")]
    Syntax(String),
}

impl Mask {
    pub fn size(min: usize, max: usize) -> Self {
        Mask::Size { min, max }
    }

    pub fn cover<S: Into<String>>(required: impl IntoIterator<Item = S>, trigger: usize) -> Self {
        Mask::CategoryCoverage {
            required: required.into_iter().map(Into::into).collect(),
            trigger,
        }
    }

    pub fn validate(&self) -> Result<(), MaskError> {
        match self {
            Mask::Size { min, max } if *min == 0 || min > max => Err(MaskError::BadSize {
                min: *min,
                max: *max,
            }),
            Mask::CategoryCoverage { required, .. } if required.is_empty() => {
                Err(MaskError::NoCategories)
            }
            Mask::All(parts) => parts.iter().try_for_each(Mask::validate),
            _ => Ok(()),
        }
    }

    pub fn needs_categories(&self) -> bool {
        match self {
            Mask::Size { .. } => false,
            Mask::CategoryCoverage { .. } => true,
            Mask::All(parts) => parts.iter().any(Mask::needs_categories),
        }
    }

    /// The tightest size upper bound implied by the mask, if any.
    pub fn max_size(&self) -> Option<usize> {
        match self {
            Mask::Size { max, .. } => Some(*max),
            Mask::CategoryCoverage { .. } => None,
            Mask::All(parts) => parts.iter().filter_map(Mask::max_size).min(),
        }
    }
}

/// Checks `mask` on `pattern`.
pub fn check_mask(pattern: &Pattern, dataset: &Dataset, mask: &Mask) -> Result<bool, MaskError> {
    match mask {
        Mask::Size { min, max } => Ok((*min..=*max).contains(&pattern.len())),
        Mask::CategoryCoverage { required, trigger } => {
            if !dataset.has_categories() {
                return Err(MaskError::MissingCategoryMap);
            }
            if pattern.len() < *trigger {
                return Ok(true);
            }
            Ok(required.iter().all(|cat| {
                pattern
                    .items()
                    .iter()
                    .any(|&i| dataset.categories(i).any(|c| c == cat))
            }))
        }
        Mask::All(parts) => {
            for part in parts {
                if !check_mask(pattern, dataset, part)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mask::Size { min, max } => write!(f, "size:{min}..{max}"),
            Mask::CategoryCoverage { required, trigger } => {
                let cats: Vec<&str> = required.iter().map(String::as_str).collect();
                write!(f, "cover:{}@{trigger}", cats.join(","))
            }
            Mask::All(parts) => {
                let parts: Vec<String> = parts.iter().map(Mask::to_string).collect();
                f.write_str(&parts.join(" & "))
            }
        }
    }
}

impl FromStr for Mask {
    type Err = MaskError;

    /// `size:2..4`, `size:3`, `cover:noun,verb,adj@3`, `cover:noun` (trigger 1),
    /// or several of those joined with `&`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || MaskError::Syntax(s.to_string());
        if s.contains('&') {
            let parts = s.split('&').map(str::parse).collect::<Result<Vec<Mask>, _>>()?;
            let mask = Mask::All(parts);
            mask.validate()?;
            return Ok(mask);
        }
        let (kind, body) = s.trim().split_once(':').ok_or_else(syntax)?;
        let mask = match kind.trim() {
            "size" => {
                let num = |t: &str| t.trim().parse::<usize>().map_err(|_| syntax());
                match body.split_once("..") {
                    Some((a, b)) => Mask::size(num(a)?, num(b)?),
                    None => {
                        let n = num(body)?;
                        Mask::size(n, n)
                    }
                }
            }
            "cover" => {
                let (cats, trigger) = match body.rsplit_once('@') {
                    Some((c, t)) => (c, t.trim().parse().map_err(|_| syntax())?),
                    None => (body, 1),
                };
                let cats: BTreeSet<String> = cats
                    .split(',')
                    .map(|c| c.trim().to_string())
                    .filter(|c| !c.is_empty())
                    .collect();
                Mask::CategoryCoverage {
                    required: cats,
                    trigger,
                }
            }
            _ => return Err(syntax()),
        };
        mask.validate()?;
        Ok(mask)
    }
}
