//! Exact computations around parenthesized braids, infinitesimal (cyclotomic)
//! braid Lie algebras, chord diagrams, associators and Grothendieck-Teichmüller
//! type groups, all over the rationals and truncated by degree.

pub mod assoc_solver;
pub mod braid_engine;
pub mod chord_categories;
pub mod graded_lie;
pub mod gt_torsors;
pub mod linalg;
pub mod lyndon;
pub mod par_groupoids;
pub mod rational;
pub mod report;
pub mod uea;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("algebra handles differ: {0} vs {1}")]
    HandleMismatch(String, String),
    #[error("relation not preserved: {0}")]
    RelationNotPreserved(String),
    #[error("not group-like: {0}")]
    NotGroupLike(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("obstruction at degree {degree}: {details}")]
    Obstruction { degree: usize, details: String },
    #[error("missing reference: {0}")]
    MissingReference(String),
}
