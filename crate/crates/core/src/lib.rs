//! Linear fractional composition operators on weighted Dirichlet spaces:
//! symbol classification, truncated series and operator sections, and the
//! recurrence decision table for `λ C_φ` on `S_ν`.

pub mod cli;
pub mod composition;
pub mod error;
pub mod moebius;
pub mod oracle;
pub mod weighted;

pub use error::{Error, Result};
pub use moebius::{classify, Category, ExtendedPoint, MoebiusMap};
pub use oracle::{decide, RecurrenceVerdict, Rule};
pub use weighted::WeightedSeries;
