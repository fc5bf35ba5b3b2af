use thiserror::Error;

use crate::moebius::Category;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the crate. Messages are prefixed with the module
/// that produced them so the CLI can surface them verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("moebius: degenerate map, ad - bc = 0")]
    Degenerate,
    #[error("moebius: the identity map has no isolated fixed points")]
    IdentityMap,
    #[error("moebius: derivative undefined at {0}")]
    DerivativeUndefined(&'static str),
    #[error("moebius: pole lies on the unit circle, image of the circle is a line")]
    PoleOnCircle,
    #[error("moebius: not a self-map of the unit disk ({0})")]
    NotSelfMap(String),
    #[error("moebius: fixed point locations contradict the self-map constraints ({0})")]
    Consistency(String),
    #[error("moebius: operation requires a {expected} map, got {got:?}")]
    WrongCategory { expected: &'static str, got: Category },
    #[error("{what}: no convergence after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("weighted: mismatched weights nu={left} and nu={right}")]
    MismatchedNu { left: f64, right: f64 },
    #[error("weighted: point must lie in the open unit disk, |w| = {0}")]
    OutsideDisk(f64),
    #[error("weighted: {samples} samples is too few, need at least {required}")]
    TooFewSamples { samples: usize, required: usize },
    #[error("weighted: growth estimate requires nu < 1/2, got {0}")]
    GrowthWeightOutOfRange(f64),
    #[error("composition: pole of the symbol must lie outside the closed disk, |pole| = {0}")]
    PoleInClosedDisk(f64),
    #[error("composition: dimension {0} outside the supported range 1..=512")]
    Dimension(usize),
    #[error("oracle: lambda must be nonzero")]
    ZeroLambda,
    #[error("oracle: spectrum formula not available for {0:?}")]
    UnsupportedCategory(Category),
    #[error("parse: {message} at position {position}")]
    Parse { position: usize, message: String },
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code: 3 for numerical failures, 2 for everything the
    /// caller could have validated up front.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } | Error::Consistency(_) => 3,
            _ => 2,
        }
    }
}
