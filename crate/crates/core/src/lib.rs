//! Finite categories, structural Ramsey theory checkers and the sequence
//! constructions used to build weak Fraïssé limits.

pub mod amalgam;
pub mod arrows;
pub mod catalog;
pub mod category;
pub mod degrees;
pub mod error;
pub mod expansion;
pub mod report;
pub mod sequences;
pub mod structures;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{Budget, Status};
