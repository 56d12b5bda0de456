//! Bundled example models.

use crate::format::parse_model;
use crate::model::DecisionProblem;

/// Diabetes diagnosis: observe blue toe and glucose, then treat or not.
pub const DIABETES_SRC: &str = include_str!("../fixtures/diabetes.vbs");

/// Medical diagnosis chain D -> P -> S with one treatment decision.
/// Structure only; the numbers are synthetic.
pub const MEDICAL_SRC: &str = include_str!("../fixtures/medical.vbs");

pub fn diabetes() -> DecisionProblem {
    parse_model(DIABETES_SRC).expect("bundled diabetes model parses")
}

pub fn medical() -> DecisionProblem {
    parse_model(MEDICAL_SRC).expect("bundled medical model parses")
}
