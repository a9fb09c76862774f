//! Extended high-utility pattern mining over layered transaction databases.

pub mod cli;
pub mod dataset;
pub mod facts;
pub mod masks;
pub mod miner;
pub mod prediction;
pub mod utility;

pub use dataset::{assemble_dataset, facet_dims, Dataset, DatasetError, FacetDims, FacetRef, ItemId, Level, ObjectId, TransactionId};
pub use facts::{parse_facts, FactSet, ParseError};
pub use utility::{PatternUtilityMatrix, UtilityError, UtilitySpec};
