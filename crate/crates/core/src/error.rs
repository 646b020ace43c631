use thiserror::Error;

use crate::category::{MorphId, ObjId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("structures do not share a signature")]
    SignatureMismatch,
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid category: {0}")]
    InvalidCategory(String),
    #[error("no isomorphism data for object {0}")]
    MissingIsoData(ObjId),
    #[error("hom({a}, {b}) is empty; the arrow relation is vacuous")]
    EmptyHom { a: ObjId, b: ObjId },
    #[error("search space of {needed} colorings exceeds the budget of {budget}")]
    BudgetExceeded { needed: f64, budget: u64 },
    #[error("coloring uses fewer than two colors (t = {0})")]
    TrivialColoring(usize),
    #[error("the arrow relation required by the construction does not hold")]
    ArrowDoesNotHold,
    #[error("factorization search failed: {0}")]
    FactorSearchFailed(String),
    #[error("transformations have different source or target sequences")]
    ShapeMismatch,
    #[error("composite index {index} overflows a sequence of length {len}")]
    TruncationOverflow { index: usize, len: usize },
    #[error("morphism {0} is not in the expected hom-set")]
    NotInHom(MorphId),
    #[error("invalid degree assignment: {0}")]
    InvalidDegree(String),
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),
    #[error("expansion count {0} exceeds the budget")]
    Overflow(f64),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("corrupt certificate: {0}")]
    CorruptCertificate(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
