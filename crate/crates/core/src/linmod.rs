//! Classical model fitting: least-squares regression, logistic maximum
//! likelihood for the propensity score, and the standard normal CDF used by
//! the Gaussian plug-in estimators.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Coefficient norm beyond which the logistic fit is declared separated.
pub const SEPARATION_NORM: f64 = 1e3;

/// Iteration cap shared by the iterative fitters in this module.
pub const MAX_ITER: usize = 100;

const SCORE_TOL: f64 = 1e-10;

/// Which covariate columns enter a fitted model, plus an optional intercept.
///
/// Misspecified models are expressed by listing a strict subset of the
/// covariate columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignSpec {
    /// Indices into the covariate matrix, in the order they enter the design.
    pub column_indices: Vec<usize>,
    /// Prepend a constant-1 column when set.
    pub include_intercept: bool,
}

impl DesignSpec {
    /// Spec selecting the given columns without an extra intercept.
    pub fn columns(column_indices: &[usize]) -> Self {
        Self { column_indices: column_indices.to_vec(), include_intercept: false }
    }

    /// Spec selecting the given columns after a constant-1 column.
    pub fn with_intercept(column_indices: &[usize]) -> Self {
        Self { column_indices: column_indices.to_vec(), include_intercept: true }
    }

    /// Number of columns in the built design matrix.
    pub fn width(&self) -> usize {
        self.column_indices.len() + usize::from(self.include_intercept)
    }

    /// Builds the design matrix from the covariate matrix.
    pub fn build(&self, covariates: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        for (pos, &idx) in self.column_indices.iter().enumerate() {
            if idx >= covariates.ncols() {
                return Err(Error::BadDesign(format!(
                    "column index {idx} out of range for {} covariates",
                    covariates.ncols()
                )));
            }
            if self.column_indices[..pos].contains(&idx) {
                return Err(Error::BadDesign(format!("column index {idx} repeats")));
            }
        }
        let n = covariates.nrows();
        let mut design = DMatrix::zeros(n, self.width());
        let mut col = 0;
        if self.include_intercept {
            design.column_mut(0).fill(1.0);
            col = 1;
        }
        for &idx in &self.column_indices {
            design.set_column(col, &covariates.column(idx));
            col += 1;
        }
        Ok(design)
    }
}

/// A least-squares fit over the observed rows.
#[derive(Debug, Clone)]
pub struct LinearFit {
    /// Fitted coefficients, intercept first when the spec includes one.
    pub beta: DVector<f64>,
    /// Residuals over the fitted rows.
    pub residuals: DVector<f64>,
    /// Unbiased error scale `sqrt(RSS / (m − r))`.
    pub sigma_hat: f64,
    /// Number of fitted rows.
    pub m: usize,
}

impl LinearFit {
    /// Fitted values `x̃ᵢᵀβ̂` for every row of `covariates`.
    pub fn predict(&self, covariates: &DMatrix<f64>, spec: &DesignSpec) -> Result<DVector<f64>> {
        Ok(spec.build(covariates)? * &self.beta)
    }
}

/// A logistic maximum-likelihood fit of the response indicator.
#[derive(Debug, Clone)]
pub struct PropensityFit {
    /// Fitted coefficients, intercept first when the spec includes one.
    pub gamma: DVector<f64>,
    /// Fitted probabilities `expit(x̃ᵢᵀγ̂)` for every row, strictly in (0,1).
    pub pi_hat: Vec<f64>,
    /// Log-likelihood after each accepted Newton step; starting value first.
    pub loglik_trace: Vec<f64>,
}

/// `expit(z) = e^z / (1 + e^z)`, computed without overflow.
pub fn expit(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Standard normal CDF `Φ(z)`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Least-squares fit of `y` on the selected columns of `covariates`.
///
/// `covariates` must already be restricted to the rows being fitted. The
/// solve uses a singular value decomposition and rejects rank-deficient
/// designs.
pub fn least_squares(
    covariates: &DMatrix<f64>,
    y: &DVector<f64>,
    spec: &DesignSpec,
) -> Result<LinearFit> {
    let design = spec.build(covariates)?;
    let (m, r) = (design.nrows(), design.ncols());
    if y.len() != m {
        return Err(Error::Shape(format!("{m} design rows but {} responses", y.len())));
    }
    if m <= r {
        return Err(Error::Shape(format!("{m} rows cannot identify {r} coefficients")));
    }
    let svd = design.clone().svd(true, true);
    let eps = svd.singular_values.max() * m.max(r) as f64 * f64::EPSILON;
    if svd.rank(eps) < r {
        return Err(Error::SingularDesign);
    }
    let beta = svd.solve(y, eps).map_err(|_| Error::SingularDesign)?;
    let residuals = y - &design * &beta;
    let sigma_hat = (residuals.norm_squared() / (m - r) as f64).sqrt();
    Ok(LinearFit { beta, residuals, sigma_hat, m })
}

/// Logistic maximum-likelihood fit of the indicator `a` on the selected
/// columns of `covariates`, by Newton iteration with step-halving. Steps
/// are halved while they lower the log-likelihood by more than a rounding
/// allowance; the allowance keeps full Newton steps available once the
/// log-likelihood has saturated at machine precision, which the final
/// approach to score tolerance relies on.
///
/// Fails with [`Error::Separation`] when the coefficient norm passes
/// [`SEPARATION_NORM`] during iteration, and with [`Error::NoConvergence`]
/// when the score max-norm has not reached tolerance after [`MAX_ITER`]
/// iterations.
pub fn logistic_mle(
    covariates: &DMatrix<f64>,
    a: &[bool],
    spec: &DesignSpec,
) -> Result<PropensityFit> {
    let design = spec.build(covariates)?;
    let (n, r) = (design.nrows(), design.ncols());
    if a.len() != n {
        return Err(Error::Shape(format!("{n} design rows but {} indicators", a.len())));
    }
    let svd = design.clone().svd(false, false);
    let eps = svd.singular_values.max() * n.max(r) as f64 * f64::EPSILON;
    if svd.rank(eps) < r {
        return Err(Error::SingularDesign);
    }

    let av = DVector::from_iterator(n, a.iter().map(|&ai| f64::from(u8::from(ai))));
    let mut gamma = DVector::zeros(r);
    let mut loglik = loglik_at(&design, &av, &gamma);
    let mut trace = vec![loglik];

    for _ in 0..MAX_ITER {
        let z = &design * &gamma;
        let pi = z.map(expit);
        let score = design.transpose() * (&av - &pi);
        if score.amax() <= SCORE_TOL {
            let pi_hat = z.iter().map(|&zi| clamp_open_unit(expit(zi))).collect();
            return Ok(PropensityFit { gamma, pi_hat, loglik_trace: trace });
        }
        let w = pi.map(|p| p * (1.0 - p));
        let mut weighted = design.clone();
        for i in 0..n {
            weighted.row_mut(i).scale_mut(w[i]);
        }
        let hess = design.transpose() * weighted;
        let direction = hess
            .lu()
            .solve(&score)
            .ok_or(Error::Separation(SEPARATION_NORM))?;

        let slack = 16.0 * f64::EPSILON * (1.0 + loglik.abs());
        let mut step = 1.0;
        loop {
            let candidate = &gamma + step * &direction;
            if candidate.norm() > SEPARATION_NORM {
                return Err(Error::Separation(SEPARATION_NORM));
            }
            let cand_loglik = loglik_at(&design, &av, &candidate);
            if cand_loglik >= loglik - slack {
                gamma = candidate;
                loglik = cand_loglik;
                trace.push(loglik);
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                return Err(Error::NoConvergence("logistic step-halving", MAX_ITER));
            }
        }
    }
    Err(Error::NoConvergence("logistic fit", MAX_ITER))
}

/// Log-likelihood `Σ aᵢ·log πᵢ + (1−aᵢ)·log(1−πᵢ)` in a saturation-safe form.
fn loglik_at(design: &DMatrix<f64>, av: &DVector<f64>, gamma: &DVector<f64>) -> f64 {
    let z = design * gamma;
    let mut ll = 0.0;
    for i in 0..z.len() {
        ll += av[i] * z[i] - softplus(z[i]);
    }
    ll
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Pulls a probability strictly inside (0, 1).
fn clamp_open_unit(p: f64) -> f64 {
    p.clamp(1e-300, 1.0 - 1e-16)
}
