//! Quantile estimation when the outcome is missing at random.
//!
//! The estimators reweight or augment the observed outcomes to compensate
//! for missingness: inverse-probability weighting (IPW), a regression
//! pseudo-sample method (SY), and doubly protected combinations of the two
//! (DP-*) that remain consistent when either the propensity model or the
//! outcome-regression model is correctly specified. The robust variants fit
//! the regression with a high-breakdown MM-estimator so that outliers in the
//! observed responses cannot carry the estimate away.
//!
//! Every estimated distribution is a finite signed mixture of point masses
//! ([`signedmix::AtomMixture`]), optionally augmented with Gaussian
//! components for the plug-in estimators. Quantiles are read off by a
//! first-crossing rule that stays well defined when the mixture is locally
//! non-monotone.
//!
//! The [`simulate`] module generates a configurable benchmark data-generating
//! process with model misspecification and outlier contamination, and
//! aggregates Monte Carlo error metrics over seeded, schedule-independent
//! replicate streams.

pub mod estimators;
pub mod linmod;
pub mod robust;
pub mod signedmix;
pub mod simulate;

/// Errors produced by model fitting, mixture construction, and estimation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A non-finite value reached a constructor or numeric routine.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    /// A convolution would enumerate more atom pairs than allowed.
    #[error("convolution needs {required} atom pairs, over the budget of {budget}")]
    ConvolutionBudget { required: u128, budget: u128 },
    /// The running cumulative sum never reaches the requested level.
    #[error("no quantile: the cumulative sum never reaches p = {p}")]
    NoQuantile { p: f64 },
    /// A probability argument lies outside (0, 1).
    #[error("p must be strictly between 0 and 1, got {0}")]
    InvalidProbability(f64),
    /// A design spec referenced columns that do not exist or repeat.
    #[error("invalid design: {0}")]
    BadDesign(String),
    /// Input dimensions disagree.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// The design matrix does not have full column rank.
    #[error("design matrix is rank deficient")]
    SingularDesign,
    /// The logistic likelihood diverged, indicating separated classes.
    #[error("complete separation: coefficient norm exceeded {0}")]
    Separation(f64),
    /// An iterative fit exhausted its iteration limit.
    #[error("{0} did not converge within {1} iterations")]
    NoConvergence(&'static str, usize),
    /// Every candidate subsample produced a singular system.
    #[error("all {0} subsamples were singular")]
    DegenerateSubsamples(usize),
    /// A sample contains no observed responses.
    #[error("no observed responses in the sample")]
    NoObserved,
    /// The residual scale is zero, so the Gaussian component is degenerate.
    #[error("residual scale is zero")]
    ZeroScale,
    /// A fitted propensity fell below the trust floor on an observed row.
    #[error("fitted propensity {pi:.3e} below the floor {floor:.1e} on an observed row")]
    PropensityFloor { pi: f64, floor: f64 },
    /// A method name did not match any known estimator.
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
