//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("breakpoints must be strictly increasing with at least two entries")]
    InvalidBreakpoints,

    #[error("expected {expected} interval values for {breakpoints} breakpoints, got {got}")]
    ValueCountMismatch {
        breakpoints: usize,
        expected: usize,
        got: usize,
    },

    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    AlphaOutOfRange(f64),

    #[error("kernel is singular at x = s = t = {0}")]
    SingularKernelPoint(f64),

    #[error("operation requires distinct anchors, got s = t = {0}")]
    CoincidentAnchors(f64),

    #[error("the transform has a non-integrable singularity at xi = 0")]
    SingularFrequency,

    #[error("truncation radius {radius} must exceed the support radius {support}")]
    RadiusTooSmall { radius: f64, support: f64 },

    #[error("gamma function requires a positive argument, got {0}")]
    GammaDomain(f64),

    #[error("invalid integration box: require c1 < d1 and c2 < d2")]
    InvalidBox,

    #[error("tolerance must be strictly positive, got {0}")]
    NonPositiveTolerance(f64),

    #[error(
        "quadrature budget of {budget} evaluations exhausted; \
         best estimate {value:.6e} with error estimate {error_estimate:.3e}"
    )]
    BudgetExceeded {
        value: f64,
        error_estimate: f64,
        budget: usize,
    },

    #[error(
        "integral identity requires a vanishing zeroth moment on at least one factor; \
         got {m1:.3e} and {m2:.3e}"
    )]
    MomentHypothesis { m1: f64, m2: f64 },

    #[error("maximal profile covers [{lo}, {hi}], which does not contain [-{radius}, {radius}]")]
    ProfileCoverage { lo: f64, hi: f64, radius: f64 },

    #[error("dilation grid requires k_min < k_max, got [{k_min}, {k_max}]")]
    InvalidDilationRange { k_min: i32, k_max: i32 },
}

pub type Result<T> = std::result::Result<T, Error>;
