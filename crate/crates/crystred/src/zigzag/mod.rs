//! Invariants, the case tables for exceptional weights, and the mod-p
//! local Langlands correspondence on descriptors.

mod classify;
mod invariants;
mod llc;
mod ninepart;

use crate::padic::PadicError;

pub use classify::{check_llc_consistency, classify, Classification, Scope};
pub use invariants::{
    compute_invariants, compute_slope_invariants, ImplicationCheck, InvariantBundle, Regime, Slope, Valuation,
};
pub use llc::{
    llc_forward, llc_inverse, llc_map, same_galois, same_smooth, Direction, Lambda, LlcImage, ReductionDescriptor,
    SmoothRepDescriptor, Twist,
};
pub use ninepart::{
    assemble_llc, ninepart_expectation, Assembly, FactorStatus, HeckeRelation, NinePart, PresentationConstants,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZigzagError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("precision insufficient: {0}")]
    Precision(String),
    #[error("tau/tau~ consistency violated: {0}")]
    Lemma51(String),
    #[error("malformed descriptor: {0}")]
    Malformed(String),
    #[error("not in the image of the correspondence: {0}")]
    NotInImage(String),
}
