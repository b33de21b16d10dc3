//! High-breakdown robust regression: the Tukey bisquare ρ-family, the
//! M-scale, a subsampling S-estimator, and the MM-estimator used by the
//! robust estimator variants.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linmod::DesignSpec;
use crate::{Error, Result};

/// Bisquare tuning constant for the S-stage ρ₀ (breakdown point 1/2).
pub const K0: f64 = 1.57;

/// Bisquare tuning constant for the M-stage ρ₁ (tuned for efficiency).
pub const K1: f64 = 3.44;

/// Target value of the M-scale equation `mean ρ₀(r/s) = δ`.
pub const DELTA: f64 = 0.5;

const M_SCALE_REL_TOL: f64 = 1e-10;

/// Tuning for the S-stage subsampling and the MM iteration.
#[derive(Debug, Clone)]
pub struct MmConfig {
    /// ρ₀ tuning constant.
    pub k0: f64,
    /// ρ₁ tuning constant.
    pub k1: f64,
    /// M-scale target.
    pub delta: f64,
    /// Number of random size-r subsamples tried by the S-stage.
    pub n_subsamples: usize,
    /// Weighted refinement steps applied to the best S-candidate.
    pub refine_steps: usize,
    /// Iteration cap for the MM stage.
    pub max_iter: usize,
    /// MM stopping rule: maximum absolute coefficient change.
    pub tol: f64,
}

impl Default for MmConfig {
    fn default() -> Self {
        Self {
            k0: K0,
            k1: K1,
            delta: DELTA,
            n_subsamples: 500,
            refine_steps: 5,
            max_iter: 200,
            tol: 1e-9,
        }
    }
}

/// An MM-regression fit over the observed rows.
#[derive(Debug, Clone)]
pub struct RobustRegressionFit {
    /// Fitted coefficients, intercept first when the spec includes one.
    pub beta: DVector<f64>,
    /// Residuals over the fitted rows at `beta`.
    pub residuals: DVector<f64>,
    /// M-scale of the S-stage residuals; zero only for a degenerate exact fit.
    pub scale: f64,
    /// Whether the MM iteration met its tolerance within the iteration cap.
    pub converged: bool,
    /// `mean ρ₁(residual/scale)` at the returned coefficients.
    pub objective: f64,
    /// Objective after each MM iteration; S-stage starting value first.
    pub objective_trace: Vec<f64>,
}

impl RobustRegressionFit {
    /// Fitted values `x̃ᵢᵀβ̂` for every row of `covariates`.
    pub fn predict(&self, covariates: &DMatrix<f64>, spec: &DesignSpec) -> Result<DVector<f64>> {
        Ok(spec.build(covariates)? * &self.beta)
    }
}

/// Bisquare ρ normalized to supremum 1: `1 − (1 − (t/k)²)³` capped at 1.
pub fn rho(t: f64, k: f64) -> f64 {
    let u = t / k;
    if u.abs() >= 1.0 {
        1.0
    } else {
        1.0 - (1.0 - u * u).powi(3)
    }
}

/// Derivative of [`rho`]: `6t/k²·(1 − (t/k)²)²` inside the window, else 0.
pub fn psi(t: f64, k: f64) -> f64 {
    let u = t / k;
    if u.abs() >= 1.0 {
        0.0
    } else {
        let v = 1.0 - u * u;
        6.0 * t / (k * k) * v * v
    }
}

/// IRLS weight `ψ(t)/t`, extended by continuity to `6/k²` at 0.
pub fn weight(t: f64, k: f64) -> f64 {
    let u = t / k;
    if u.abs() >= 1.0 {
        0.0
    } else {
        let v = 1.0 - u * u;
        6.0 / (k * k) * v * v
    }
}

fn mean_rho(residuals: &DVector<f64>, s: f64, k: f64) -> f64 {
    residuals.iter().map(|&r| rho(r / s, k)).sum::<f64>() / residuals.len() as f64
}

/// M-scale of the residuals: the `s` solving `mean ρ₀(rᵢ/s) = δ`, by
/// bisection to relative tolerance 1e-10.
///
/// Returns 0 when the fraction of exactly-zero residuals reaches `1 − δ`,
/// where the equation has no positive solution.
pub fn m_scale(residuals: &DVector<f64>, k0: f64, delta: f64) -> f64 {
    assert!(!residuals.is_empty(), "m_scale needs at least one residual");
    let m = residuals.len() as f64;
    let zero_frac = residuals.iter().filter(|&&r| r == 0.0).count() as f64 / m;
    if zero_frac >= 1.0 - delta {
        return 0.0;
    }
    let max_abs = residuals.amax();
    let mut hi = max_abs;
    while mean_rho(residuals, hi, k0) > delta {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while mean_rho(residuals, lo, k0) < delta {
        hi = lo;
        lo /= 2.0;
        if lo < f64::MIN_POSITIVE {
            return 0.0;
        }
    }
    while hi - lo > M_SCALE_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mean_rho(residuals, mid, k0) >= delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// S-estimator of regression: random size-r subsamples solved exactly, the
/// candidate with the smallest residual M-scale kept (ties broken by the
/// earliest subsample), then refined with weighted least-squares steps that
/// are reverted if they increase the scale.
///
/// Candidates whose `mean ρ₀(r/s_best)` already reaches `δ` are discarded
/// without a bisection: the M-scale equation is monotone in `s`, so their
/// scale cannot beat the current best.
pub fn s_estimator(
    covariates: &DMatrix<f64>,
    y: &DVector<f64>,
    spec: &DesignSpec,
    config: &MmConfig,
    seed: u64,
) -> Result<(DVector<f64>, f64)> {
    let design = spec.build(covariates)?;
    let (m, r) = (design.nrows(), design.ncols());
    if y.len() != m {
        return Err(Error::Shape(format!("{m} design rows but {} responses", y.len())));
    }
    if m <= r {
        return Err(Error::Shape(format!("{m} rows cannot identify {r} coefficients")));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
    for _ in 0..config.n_subsamples {
        let idx = rand::seq::index::sample(&mut rng, m, r);
        let mut a = DMatrix::zeros(r, r);
        let mut b = DVector::zeros(r);
        for (row, i) in idx.iter().enumerate() {
            a.row_mut(row).copy_from(&design.row(i));
            b[row] = y[i];
        }
        let Some(candidate) = a.lu().solve(&b) else {
            continue;
        };
        let residuals = y - &design * &candidate;
        match &best {
            Some((s_best, _, _)) if *s_best == 0.0 => break,
            Some((s_best, _, _)) if mean_rho(&residuals, *s_best, config.k0) >= config.delta => {
                continue;
            }
            _ => {}
        }
        let s = m_scale(&residuals, config.k0, config.delta);
        match &best {
            Some((s_best, _, _)) if s >= *s_best => {}
            _ => best = Some((s, candidate, residuals)),
        }
    }
    let Some((mut scale, mut beta, mut residuals)) = best else {
        return Err(Error::DegenerateSubsamples(config.n_subsamples));
    };

    for _ in 0..config.refine_steps {
        if scale == 0.0 {
            break;
        }
        let w = residuals.map(|ri| weight(ri / scale, config.k0));
        let Some(candidate) = weighted_ls(&design, y, &w) else {
            break;
        };
        let cand_residuals = y - &design * &candidate;
        let cand_scale = m_scale(&cand_residuals, config.k0, config.delta);
        if cand_scale > scale {
            break;
        }
        scale = cand_scale;
        beta = candidate;
        residuals = cand_residuals;
    }
    Ok((beta, scale))
}

/// MM-regression: an S-stage for the coefficients' starting point and the
/// residual scale, then iterated reweighted least squares under ρ₁ with the
/// scale held fixed, until the maximum coefficient change meets `tol` or the
/// iteration cap is reached.
pub fn mm_regression(
    covariates: &DMatrix<f64>,
    y: &DVector<f64>,
    spec: &DesignSpec,
    config: &MmConfig,
    seed: u64,
) -> Result<RobustRegressionFit> {
    let (mut beta, scale) = s_estimator(covariates, y, spec, config, seed)?;
    let design = spec.build(covariates)?;
    let mut residuals = y - &design * &beta;

    if scale == 0.0 {
        let objective =
            residuals.iter().filter(|&&r| r != 0.0).count() as f64 / residuals.len() as f64;
        return Ok(RobustRegressionFit {
            beta,
            residuals,
            scale,
            converged: true,
            objective,
            objective_trace: vec![objective],
        });
    }

    let mut objective = mean_rho(&residuals, scale, config.k1);
    let mut trace = vec![objective];
    let mut converged = false;
    for _ in 0..config.max_iter {
        let w = residuals.map(|ri| weight(ri / scale, config.k1));
        let Some(candidate) = weighted_ls(&design, y, &w) else {
            break;
        };
        let change = (&candidate - &beta).amax();
        residuals = y - &design * &candidate;
        beta = candidate;
        objective = mean_rho(&residuals, scale, config.k1);
        trace.push(objective);
        if change <= config.tol {
            converged = true;
            break;
        }
    }
    Ok(RobustRegressionFit {
        beta,
        residuals,
        scale,
        converged,
        objective,
        objective_trace: trace,
    })
}

/// Weighted least squares via rows scaled by √wᵢ; `None` when the weighted
/// design loses rank.
fn weighted_ls(design: &DMatrix<f64>, y: &DVector<f64>, w: &DVector<f64>) -> Option<DVector<f64>> {
    let (m, r) = (design.nrows(), design.ncols());
    let mut dw = design.clone();
    let mut yw = y.clone();
    for i in 0..m {
        let sw = w[i].sqrt();
        dw.row_mut(i).scale_mut(sw);
        yw[i] *= sw;
    }
    let svd = dw.svd(true, true);
    let eps = svd.singular_values.max() * m.max(r) as f64 * f64::EPSILON;
    if svd.rank(eps) < r {
        return None;
    }
    svd.solve(&yw, eps).ok()
}
