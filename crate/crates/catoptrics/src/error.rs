//! Crate-wide error type.
//!
//! Error payloads are plain `f64` regardless of the working scalar so that
//! the type stays object-safe to match on and cheap to thread through the
//! CLI layer.

use thiserror::Error;

/// Everything that can go wrong in chart arithmetic and root searches.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    /// The direction falls outside the single stereographic chart in use
    /// (its image would exceed the chart cap).
    #[error("direction too close to the excluded chart point")]
    ChartExcluded,

    /// Input fails a validity precondition; the message names the check.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// The supplied point does not lie on the supplied line.
    #[error("point is not incident with the line")]
    NotIncident,

    /// A query parameter lies outside the surface's parameter rectangle.
    #[error("parameter outside the surface domain")]
    OutOfDomain,

    /// The multistart search neither converged nor certified emptiness.
    #[error("root search failed (best residual {best_residual:.3e})")]
    SolverFailure { best_residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_name_the_failure() {
        assert_eq!(
            Error::ChartExcluded.to_string(),
            "direction too close to the excluded chart point"
        );
        assert_eq!(
            Error::DegenerateInput("zero direction").to_string(),
            "degenerate input: zero direction"
        );
        let e = Error::SolverFailure {
            best_residual: 2.5e-4,
        };
        assert!(e.to_string().contains("2.500e-4"));
    }
}
