//! Closed-form constants, feasibility, bounds and expectation enclosures.

mod bounds;
mod constants;
mod deadline;
mod expectations;
mod persistent;

use serde::{Deserialize, Serialize};

pub use bounds::{
    bound_report, delta_bound, k1_truncation_factor, min_truncation_k1, min_truncation_k2, y1_upper, y30_upper,
    BoundReport,
};
pub use constants::{derive_constants, feasibility, DerivedConstants, FeasibilityReport, Threshold, Thresholds};
pub use deadline::{deadline_comparison, default_z_grid, DeadlineComparison, TruncatedLowerBound};
pub use expectations::{solve_expectations, ExpectationInterval, ExpectationTable, DEFAULT_TRUNCATION_K};
pub use persistent::{persistent_distribution, persistent_expectation, DivergenceCertificate, PersistentDistribution};

/// What a lone pending player does after the last non-trivial time.
///
/// `Literal` follows the protocol as stated: the next slot is trivial, so a
/// lone player transmits with probability 1 and finishes at once.
/// `PaperSeries` counts only non-trivial times as success opportunities,
/// `E[Y_{1,k}] = sum_{l >= k} (s_l - s_{k-1}) p (1-p)^(l-k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    PaperSeries,
    Literal,
}

impl std::str::FromStr for Semantics {
    type Err = crate::error::ContentionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper-series" => Ok(Semantics::PaperSeries),
            "literal" => Ok(Semantics::Literal),
            other => Err(crate::error::ContentionError::InvalidArguments(format!(
                "unknown semantics {other:?} (expected paper-series or literal)"
            ))),
        }
    }
}
