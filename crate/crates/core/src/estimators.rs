//! Estimators of the outcome distribution under missingness at random.
//!
//! Every estimator returns its distribution estimate as a signed atomic
//! mixture; the Gaussian plug-in variants additionally carry analytic
//! Gaussian CDF components. The doubly protected (DP) estimators combine an
//! inverse-probability-weighted term with regression-based terms so that the
//! estimate stays consistent when either the propensity model or the outcome
//! regression is correctly specified; the ROB variants fit the regression
//! with an MM-estimator.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::linmod::{self, DesignSpec, LinearFit, PropensityFit};
use crate::robust::{self, MmConfig, RobustRegressionFit};
use crate::signedmix::AtomMixture;
use crate::{Error, Result};

/// Smallest trusted fitted propensity on an observed row; anything below
/// fails the estimate rather than being clamped.
pub const PROPENSITY_FLOOR: f64 = 1e-6;

/// A sample of covariates, response indicators, and partially observed
/// outcomes.
#[derive(Debug, Clone)]
pub struct ObservedSample {
    /// Covariate rows, n×p; by convention the first column is the constant 1.
    pub covariates: DMatrix<f64>,
    /// Response indicators; `y[i]` is meaningful only where `a[i]` is true.
    pub a: Vec<bool>,
    /// Outcomes; entries with `a[i]` false are never read.
    pub y: Vec<f64>,
}

impl ObservedSample {
    /// Validates row counts, requires at least one observed response, and
    /// requires finite outcomes on observed rows.
    pub fn new(covariates: DMatrix<f64>, a: Vec<bool>, y: Vec<f64>) -> Result<Self> {
        let n = covariates.nrows();
        if a.len() != n || y.len() != n {
            return Err(Error::Shape(format!(
                "{n} covariate rows, {} indicators, {} outcomes",
                a.len(),
                y.len()
            )));
        }
        if !a.iter().any(|&ai| ai) {
            return Err(Error::NoObserved);
        }
        for i in 0..n {
            if a[i] && !y[i].is_finite() {
                return Err(Error::NonFinite("observed outcome"));
            }
            for j in 0..covariates.ncols() {
                if !covariates[(i, j)].is_finite() {
                    return Err(Error::NonFinite("covariate"));
                }
            }
        }
        Ok(Self { covariates, a, y })
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Number of observed responses.
    pub fn m(&self) -> usize {
        self.a.iter().filter(|&&ai| ai).count()
    }

    /// Indices of the observed rows, ascending.
    pub fn observed_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.a[i]).collect()
    }

    /// Covariate matrix restricted to the observed rows.
    pub fn observed_covariates(&self) -> DMatrix<f64> {
        self.covariates.select_rows(self.observed_indices().iter())
    }

    /// Outcomes on the observed rows.
    pub fn observed_y(&self) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.observed_indices().into_iter().map(|i| self.y[i]))
    }
}

/// The estimators this crate implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Inverse-probability weighting of the observed outcomes.
    Ipw,
    /// Regression pseudo-sample estimator with an MM fit.
    Sy,
    /// Classical semiparametric doubly protected estimator (least squares).
    DpS,
    /// Normalized robust semiparametric doubly protected estimator.
    DpSRob,
    /// Gaussian plug-in doubly protected estimator (least squares).
    DpG,
    /// Gaussian plug-in doubly protected estimator with an MM fit.
    DpGRob,
}

impl Method {
    /// All methods, in report order.
    pub const ALL: [Method; 6] =
        [Method::Ipw, Method::Sy, Method::DpS, Method::DpSRob, Method::DpG, Method::DpGRob];

    /// Canonical display name.
    pub fn name(self) -> &'static str {
        match self {
            Method::Ipw => "IPW",
            Method::Sy => "SY",
            Method::DpS => "DP-S",
            Method::DpSRob => "DP-S-ROB",
            Method::DpG => "DP-G",
            Method::DpGRob => "DP-G-ROB",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let canon = s.trim().to_ascii_uppercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == canon)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// One weighted Gaussian CDF term `coefficient·Φ((y − mean)/scale)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianComponent {
    /// Signed weight of the component.
    pub coefficient: f64,
    /// Location of the Gaussian.
    pub mean: f64,
    /// Standard deviation, strictly positive.
    pub scale: f64,
}

/// A signed atomic mixture augmented with Gaussian CDF components.
#[derive(Debug, Clone)]
pub struct HybridMixture {
    /// The atomic part.
    pub atoms: AtomMixture,
    /// The smooth part; components with coefficient exactly 0 are dropped
    /// at construction.
    pub gaussians: Vec<GaussianComponent>,
}

impl HybridMixture {
    /// Evaluates the combined function `F_atoms(y) + Σ cᵢ·Φ((y−μᵢ)/sᵢ)`.
    pub fn evaluate(&self, y: f64) -> f64 {
        let mut v = self.atoms.evaluate(y);
        for g in &self.gaussians {
            v += g.coefficient * linmod::std_normal_cdf((y - g.mean) / g.scale);
        }
        v
    }

    /// Sum of the atom mass and the Gaussian coefficients.
    pub fn total_mass(&self) -> f64 {
        self.atoms.total_mass() + self.gaussians.iter().map(|g| g.coefficient).sum::<f64>()
    }

    /// Quantile of the combined function by bisection to tolerance 1e-10,
    /// starting from a bracket spanning all atoms and Gaussian means plus
    /// ten scale units on each side.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        if self.gaussians.is_empty() {
            return self.atoms.quantile(p);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut spread = 0.0_f64;
        for &(x, _) in self.atoms.atoms() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        for g in &self.gaussians {
            lo = lo.min(g.mean);
            hi = hi.max(g.mean);
            spread = spread.max(g.scale);
        }
        lo -= 10.0 * spread;
        hi += 10.0 * spread;
        let mut expansions = 0;
        while self.evaluate(hi) < p {
            let width = (hi - lo).max(1.0);
            hi += width;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::NoQuantile { p });
            }
        }
        while self.evaluate(lo) >= p {
            let width = (hi - lo).max(1.0);
            lo -= width;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::NoQuantile { p });
            }
        }
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if self.evaluate(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// A fitted distribution estimate: atoms only, or atoms plus Gaussians.
#[derive(Debug, Clone)]
pub enum FittedDistribution {
    /// Pure signed atomic mixture.
    Atoms(AtomMixture),
    /// Atomic mixture with Gaussian components.
    Hybrid(HybridMixture),
}

impl FittedDistribution {
    /// Evaluates the estimated function at `y`.
    pub fn evaluate(&self, y: f64) -> f64 {
        match self {
            FittedDistribution::Atoms(m) => m.evaluate(y),
            FittedDistribution::Hybrid(h) => h.evaluate(y),
        }
    }

    /// Total mass of the estimate.
    pub fn total_mass(&self) -> f64 {
        match self {
            FittedDistribution::Atoms(m) => m.total_mass(),
            FittedDistribution::Hybrid(h) => h.total_mass(),
        }
    }

    /// Quantile of the estimate.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            FittedDistribution::Atoms(m) => m.quantile(p),
            FittedDistribution::Hybrid(h) => h.quantile(p),
        }
    }

    /// The atomic part when the estimate has no Gaussian components.
    pub fn as_atoms(&self) -> Option<&AtomMixture> {
        match self {
            FittedDistribution::Atoms(m) => Some(m),
            FittedDistribution::Hybrid(h) if h.gaussians.is_empty() => Some(&h.atoms),
            FittedDistribution::Hybrid(_) => None,
        }
    }
}

/// The regression fit attached to an estimate.
#[derive(Debug, Clone)]
pub enum RegressionKind {
    /// Least-squares fit with classical scale.
    Classical(LinearFit),
    /// MM fit with robust scale.
    Robust(RobustRegressionFit),
}

/// A quantile estimate with its distribution estimate and fit diagnostics.
#[derive(Debug, Clone)]
pub struct EstimateResult {
    /// Which estimator produced this result.
    pub method: Method,
    /// The estimated distribution function.
    pub distribution: FittedDistribution,
    /// The requested quantile of the estimated distribution.
    pub quantile_p: f64,
    /// Propensity fit, when the method uses one.
    pub propensity: Option<PropensityFit>,
    /// Regression fit, when the method uses one.
    pub regression: Option<RegressionKind>,
}

/// Fits the propensity by logistic maximum likelihood, or short-circuits to
/// `π̂ ≡ 1` with an empty coefficient vector when every response is observed.
///
/// Fails when a fitted propensity on an observed row is below
/// [`PROPENSITY_FLOOR`].
pub fn fit_propensity(sample: &ObservedSample, ps_spec: &DesignSpec) -> Result<PropensityFit> {
    let n = sample.n();
    if sample.m() == n {
        return Ok(PropensityFit {
            gamma: DVector::zeros(0),
            pi_hat: vec![1.0; n],
            loglik_trace: Vec::new(),
        });
    }
    let fit = linmod::logistic_mle(&sample.covariates, &sample.a, ps_spec)?;
    check_floor(&sample.a, &fit.pi_hat)?;
    Ok(fit)
}

/// Rejects fitted propensities below [`PROPENSITY_FLOOR`] on observed rows.
fn check_floor(a: &[bool], pi_hat: &[f64]) -> Result<()> {
    for (&ai, &pi) in a.iter().zip(pi_hat) {
        if ai && pi < PROPENSITY_FLOOR {
            return Err(Error::PropensityFloor { pi, floor: PROPENSITY_FLOOR });
        }
    }
    Ok(())
}

/// IPW atoms `(Yᵢ, 1/(n·π̂ᵢ))` over the observed rows for given fitted
/// propensities, or `(Yᵢ, 1/(Cₙ·π̂ᵢ))` with `Cₙ = Σ 1/π̂ᵢ` when normalized.
pub fn ipw_mixture(
    y_obs: &[f64],
    pi_obs: &[f64],
    n: usize,
    normalized: bool,
) -> Result<AtomMixture> {
    if y_obs.len() != pi_obs.len() {
        return Err(Error::Shape(format!(
            "{} outcomes but {} propensities",
            y_obs.len(),
            pi_obs.len()
        )));
    }
    let denom = if normalized {
        pi_obs.iter().map(|&p| 1.0 / p).sum::<f64>()
    } else {
        n as f64
    };
    let atoms: Vec<(f64, f64)> =
        y_obs.iter().zip(pi_obs).map(|(&yi, &pi)| (yi, 1.0 / (denom * pi))).collect();
    AtomMixture::from_atoms(&atoms)
}

/// Inverse-probability-weighted estimate of the outcome distribution.
pub fn f_ipw(sample: &ObservedSample, ps_spec: &DesignSpec, normalized: bool) -> Result<AtomMixture> {
    let propensity = fit_propensity(sample, ps_spec)?;
    let obs = sample.observed_indices();
    let y_obs: Vec<f64> = obs.iter().map(|&i| sample.y[i]).collect();
    let pi_obs: Vec<f64> = obs.iter().map(|&i| propensity.pi_hat[i]).collect();
    ipw_mixture(&y_obs, &pi_obs, sample.n(), normalized)
}

/// Pseudo-sample mixture: atoms `ĝ(Xᵢ) + ûⱼ` over all prediction rows i and
/// residual indices j, each with weight `1/(nm)`.
pub fn pseudo_sample(predictions: &DVector<f64>, residuals: &DVector<f64>) -> Result<AtomMixture> {
    let (n, m) = (predictions.len(), residuals.len());
    if n == 0 || m == 0 {
        return Err(Error::Shape("pseudo-sample needs predictions and residuals".into()));
    }
    let w = (1.0 / n as f64) * (1.0 / m as f64);
    let mut atoms = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            atoms.push((predictions[i] + residuals[j], w));
        }
    }
    AtomMixture::from_atoms(&atoms)
}

/// Regression pseudo-sample estimator: MM fit of the outcome regression on
/// the observed rows, then the pseudo-sample of predictions plus residuals.
pub fn f_sy(sample: &ObservedSample, or_spec: &DesignSpec, seed: u64) -> Result<AtomMixture> {
    let fit = fit_mm(sample, or_spec, seed)?;
    let predictions = fit.predict(&sample.covariates, or_spec)?;
    pseudo_sample(&predictions, &fit.residuals)
}

/// Classical semiparametric doubly protected estimator, least-squares fit.
///
/// Unnormalized weights `1/(n·π̂ᵢ)` by default; the normalized variant
/// replaces them with `1/(Cₙ·π̂ᵢ)`.
pub fn f_dp_s(
    sample: &ObservedSample,
    ps_spec: &DesignSpec,
    or_spec: &DesignSpec,
    normalized: bool,
) -> Result<AtomMixture> {
    let propensity = fit_propensity(sample, ps_spec)?;
    let fit = fit_ls(sample, or_spec)?;
    let predictions = fit.predict(&sample.covariates, or_spec)?;
    dp_s_mixture(sample, &propensity, &predictions, &fit.residuals, normalized)
}

/// Normalized robust semiparametric doubly protected estimator: the same
/// three-term combination with an MM fit and weights normalized by `Cₙ`.
pub fn f_dp_s_rob(
    sample: &ObservedSample,
    ps_spec: &DesignSpec,
    or_spec: &DesignSpec,
    seed: u64,
) -> Result<AtomMixture> {
    let propensity = fit_propensity(sample, ps_spec)?;
    let fit = fit_mm(sample, or_spec, seed)?;
    let predictions = fit.predict(&sample.covariates, or_spec)?;
    dp_s_mixture(sample, &propensity, &predictions, &fit.residuals, true)
}

/// Shared three-term construction of the semiparametric DP estimators:
/// observed-outcome atoms, minus the observed-row pseudo-sample weighted by
/// the same inverse probabilities, plus the all-row pseudo-sample.
fn dp_s_mixture(
    sample: &ObservedSample,
    propensity: &PropensityFit,
    predictions: &DVector<f64>,
    residuals: &DVector<f64>,
    normalized: bool,
) -> Result<AtomMixture> {
    let n = sample.n();
    let obs = sample.observed_indices();
    let m = obs.len();
    let denom = if normalized {
        obs.iter().map(|&i| 1.0 / propensity.pi_hat[i]).sum::<f64>()
    } else {
        n as f64
    };
    let w3 = 1.0 / (n as f64 * m as f64);
    let mut atoms = Vec::with_capacity(m + m * m + n * m);
    for &i in &obs {
        atoms.push((sample.y[i], 1.0 / (denom * propensity.pi_hat[i])));
    }
    for &i in &obs {
        let w2 = -1.0 / (denom * propensity.pi_hat[i] * m as f64);
        for j in 0..m {
            atoms.push((predictions[i] + residuals[j], w2));
        }
    }
    for i in 0..n {
        for j in 0..m {
            atoms.push((predictions[i] + residuals[j], w3));
        }
    }
    AtomMixture::from_atoms(&atoms)
}

/// Gaussian plug-in doubly protected estimator: observed-outcome atoms
/// weighted by `1/(n·π̂ᵢ)` minus Gaussian CDF terms with coefficients
/// `(aᵢ/π̂ᵢ − 1)/n`, centered at the fitted values with the fitted scale.
///
/// `robust = false` uses least squares with the classical scale σ̂;
/// `robust = true` uses the MM fit with the robust scale ŝ.
pub fn f_dp_g(
    sample: &ObservedSample,
    ps_spec: &DesignSpec,
    or_spec: &DesignSpec,
    robust: bool,
    seed: u64,
) -> Result<HybridMixture> {
    let propensity = fit_propensity(sample, ps_spec)?;
    let (predictions, scale) = if robust {
        let fit = fit_mm(sample, or_spec, seed)?;
        (fit.predict(&sample.covariates, or_spec)?, fit.scale)
    } else {
        let fit = fit_ls(sample, or_spec)?;
        (fit.predict(&sample.covariates, or_spec)?, fit.sigma_hat)
    };
    dp_g_mixture(sample, &propensity, &predictions, scale)
}

fn dp_g_mixture(
    sample: &ObservedSample,
    propensity: &PropensityFit,
    predictions: &DVector<f64>,
    scale: f64,
) -> Result<HybridMixture> {
    if scale <= 0.0 {
        return Err(Error::ZeroScale);
    }
    let n = sample.n();
    let nf = n as f64;
    let mut atom_pairs = Vec::with_capacity(sample.m());
    let mut gaussians = Vec::new();
    for i in 0..n {
        let a_over_pi = if sample.a[i] {
            let pi = propensity.pi_hat[i];
            atom_pairs.push((sample.y[i], 1.0 / (nf * pi)));
            1.0 / pi
        } else {
            0.0
        };
        let coefficient = -(a_over_pi - 1.0) / nf;
        if coefficient != 0.0 {
            gaussians.push(GaussianComponent { coefficient, mean: predictions[i], scale });
        }
    }
    Ok(HybridMixture { atoms: AtomMixture::from_atoms(&atom_pairs)?, gaussians })
}

/// Computes one estimator's distribution estimate and its `p`-quantile.
pub fn estimate_quantile(
    sample: &ObservedSample,
    method: Method,
    p: f64,
    ps_spec: &DesignSpec,
    or_spec: &DesignSpec,
    seed: u64,
) -> Result<EstimateResult> {
    estimate_quantiles(sample, &[method], p, ps_spec, or_spec, seed)
        .pop()
        .expect("one method requested")
}

/// Computes several estimators on the same sample, sharing the propensity
/// and regression fits across methods; each method fails independently.
pub fn estimate_quantiles(
    sample: &ObservedSample,
    methods: &[Method],
    p: f64,
    ps_spec: &DesignSpec,
    or_spec: &DesignSpec,
    seed: u64,
) -> Vec<Result<EstimateResult>> {
    let needs_propensity = methods.iter().any(|&m| m != Method::Sy);
    let needs_ls = methods.iter().any(|&m| matches!(m, Method::DpS | Method::DpG));
    let needs_mm =
        methods.iter().any(|&m| matches!(m, Method::Sy | Method::DpSRob | Method::DpGRob));

    let propensity = if needs_propensity { Some(fit_propensity(sample, ps_spec)) } else { None };
    let ls = if needs_ls { Some(fit_ls(sample, or_spec)) } else { None };
    let mm = if needs_mm { Some(fit_mm(sample, or_spec, seed)) } else { None };

    let ls_pred = match &ls {
        Some(Ok(fit)) => Some(fit.predict(&sample.covariates, or_spec)),
        _ => None,
    };
    let mm_pred = match &mm {
        Some(Ok(fit)) => Some(fit.predict(&sample.covariates, or_spec)),
        _ => None,
    };

    methods
        .iter()
        .map(|&method| {
            one_estimate(
                sample,
                method,
                p,
                propensity.as_ref(),
                ls.as_ref(),
                ls_pred.as_ref(),
                mm.as_ref(),
                mm_pred.as_ref(),
            )
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn one_estimate(
    sample: &ObservedSample,
    method: Method,
    p: f64,
    propensity: Option<&Result<PropensityFit>>,
    ls: Option<&Result<LinearFit>>,
    ls_pred: Option<&Result<DVector<f64>>>,
    mm: Option<&Result<RobustRegressionFit>>,
    mm_pred: Option<&Result<DVector<f64>>>,
) -> Result<EstimateResult> {
    let propensity_fit = || result_ref(propensity.expect("propensity fit requested"));

    let obs = sample.observed_indices();
    let n = sample.n();

    let distribution = match method {
        Method::Ipw => {
            let prop = propensity_fit()?;
            let y_obs: Vec<f64> = obs.iter().map(|&i| sample.y[i]).collect();
            let pi_obs: Vec<f64> = obs.iter().map(|&i| prop.pi_hat[i]).collect();
            FittedDistribution::Atoms(ipw_mixture(&y_obs, &pi_obs, n, false)?)
        }
        Method::Sy => {
            let fit = result_ref(mm.expect("mm fit requested"))?;
            let pred = result_ref(mm_pred.expect("mm predictions"))?;
            FittedDistribution::Atoms(pseudo_sample(pred, &fit.residuals)?)
        }
        Method::DpS => {
            let prop = propensity_fit()?;
            let fit = result_ref(ls.expect("ls fit requested"))?;
            let pred = result_ref(ls_pred.expect("ls predictions"))?;
            FittedDistribution::Atoms(dp_s_mixture(sample, prop, pred, &fit.residuals, false)?)
        }
        Method::DpSRob => {
            let prop = propensity_fit()?;
            let fit = result_ref(mm.expect("mm fit requested"))?;
            let pred = result_ref(mm_pred.expect("mm predictions"))?;
            FittedDistribution::Atoms(dp_s_mixture(sample, prop, pred, &fit.residuals, true)?)
        }
        Method::DpG => {
            let prop = propensity_fit()?;
            let fit = result_ref(ls.expect("ls fit requested"))?;
            let pred = result_ref(ls_pred.expect("ls predictions"))?;
            FittedDistribution::Hybrid(dp_g_mixture(sample, prop, pred, fit.sigma_hat)?)
        }
        Method::DpGRob => {
            let prop = propensity_fit()?;
            let fit = result_ref(mm.expect("mm fit requested"))?;
            let pred = result_ref(mm_pred.expect("mm predictions"))?;
            FittedDistribution::Hybrid(dp_g_mixture(sample, prop, pred, fit.scale)?)
        }
    };

    let quantile_p = distribution.quantile(p)?;
    Ok(EstimateResult {
        method,
        distribution,
        quantile_p,
        propensity: match (method, propensity) {
            (Method::Sy, _) => None,
            (_, Some(Ok(fit))) => Some(fit.clone()),
            _ => None,
        },
        regression: match method {
            Method::Ipw => None,
            Method::Sy | Method::DpSRob | Method::DpGRob => match mm {
                Some(Ok(fit)) => Some(RegressionKind::Robust(fit.clone())),
                _ => None,
            },
            Method::DpS | Method::DpG => match ls {
                Some(Ok(fit)) => Some(RegressionKind::Classical(fit.clone())),
                _ => None,
            },
        },
    })
}

fn fit_ls(sample: &ObservedSample, or_spec: &DesignSpec) -> Result<LinearFit> {
    linmod::least_squares(&sample.observed_covariates(), &sample.observed_y(), or_spec)
}

fn fit_mm(sample: &ObservedSample, or_spec: &DesignSpec, seed: u64) -> Result<RobustRegressionFit> {
    robust::mm_regression(
        &sample.observed_covariates(),
        &sample.observed_y(),
        or_spec,
        &MmConfig::default(),
        seed,
    )
}

fn result_ref<T>(r: &Result<T>) -> Result<&T> {
    r.as_ref().map_err(clone_mapped)
}

/// Rebuilds an error value for shared-fit failures reported per method.
fn clone_mapped(e: &Error) -> Error {
    match e {
        Error::NonFinite(w) => Error::NonFinite(w),
        Error::ConvolutionBudget { required, budget } => {
            Error::ConvolutionBudget { required: *required, budget: *budget }
        }
        Error::NoQuantile { p } => Error::NoQuantile { p: *p },
        Error::InvalidProbability(p) => Error::InvalidProbability(*p),
        Error::BadDesign(s) => Error::BadDesign(s.clone()),
        Error::Shape(s) => Error::Shape(s.clone()),
        Error::SingularDesign => Error::SingularDesign,
        Error::Separation(v) => Error::Separation(*v),
        Error::NoConvergence(w, i) => Error::NoConvergence(w, *i),
        Error::DegenerateSubsamples(c) => Error::DegenerateSubsamples(*c),
        Error::NoObserved => Error::NoObserved,
        Error::ZeroScale => Error::ZeroScale,
        Error::PropensityFloor { pi, floor } => Error::PropensityFloor { pi: *pi, floor: *floor },
        Error::UnknownMethod(s) => Error::UnknownMethod(s.clone()),
    }
}
