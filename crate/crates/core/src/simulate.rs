//! Monte Carlo study of the estimators under missingness at random.
//!
//! Samples follow a linear outcome model with covariate-dependent response
//! probability. Each replicate draws from its own counter-based RNG stream,
//! so results are identical whether replicates run in parallel or
//! sequentially, and contaminated runs stay paired with clean ones.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::estimators::{self, Method, ObservedSample};
use crate::linmod::{expit, DesignSpec};
use crate::{Error, Result};

/// True median of the outcome under the default designs: the intercept is
/// zero and both the covariate effects and the error laws are symmetric.
pub const TRUE_MEDIAN: f64 = 0.0;

/// A family of reproducible RNG streams derived from one seed.
///
/// Stream `k` is an independent ChaCha12 stream of the seeded generator;
/// replicate `r` of a study uses streams `3r` (generation), `3r + 1`
/// (contamination), and `3r + 2` (resampling seed for the robust fits).
#[derive(Debug, Clone, Copy)]
pub struct RngStream {
    /// Seed shared by every stream of the family.
    pub seed: u64,
}

impl RngStream {
    /// Creates the family.
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Returns generator number `stream_id` of the family.
    pub fn stream(&self, stream_id: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(stream_id);
        rng
    }
}

/// Error law for the outcome regression noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorLaw {
    /// Standard normal.
    Normal,
    /// Student t with 3 degrees of freedom, drawn as a normal over the
    /// square root of an independent mean-of-squares of three normals.
    T3,
    /// Standard Cauchy, drawn as `tan(π(U − 1/2))`.
    Cauchy,
}

impl ErrorLaw {
    /// All laws, in report order.
    pub const ALL: [ErrorLaw; 3] = [ErrorLaw::Normal, ErrorLaw::T3, ErrorLaw::Cauchy];

    /// Canonical lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            ErrorLaw::Normal => "normal",
            ErrorLaw::T3 => "t3",
            ErrorLaw::Cauchy => "cauchy",
        }
    }

    /// Draws one error term.
    pub fn draw(self, rng: &mut impl Rng) -> f64 {
        match self {
            ErrorLaw::Normal => rng.sample(StandardNormal),
            ErrorLaw::T3 => {
                let z: f64 = rng.sample(StandardNormal);
                let mut ss = 0.0;
                for _ in 0..3 {
                    let w: f64 = rng.sample(StandardNormal);
                    ss += w * w;
                }
                z / (ss / 3.0).sqrt()
            }
            ErrorLaw::Cauchy => {
                let u: f64 = rng.random();
                (std::f64::consts::PI * (u - 0.5)).tan()
            }
        }
    }
}

impl fmt::Display for ErrorLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let canon = s.trim().to_ascii_lowercase();
        ErrorLaw::ALL
            .into_iter()
            .find(|law| law.name() == canon)
            .ok_or_else(|| Error::BadDesign(format!("unknown error law {s:?}")))
    }
}

/// The four model-specification scenarios of the study: each working model
/// is either the data-generating design or the design with the second
/// covariate dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Propensity correct, outcome regression correct.
    S1,
    /// Propensity correct, outcome regression misspecified.
    S2,
    /// Propensity misspecified, outcome regression correct.
    S3,
    /// Both misspecified.
    S4,
}

impl Scenario {
    /// All scenarios, in report order.
    pub const ALL: [Scenario; 4] = [Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4];

    /// Canonical lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S3 => "s3",
            Scenario::S4 => "s4",
        }
    }

    /// Whether the propensity working model matches the generator.
    pub fn ps_correct(self) -> bool {
        matches!(self, Scenario::S1 | Scenario::S2)
    }

    /// Whether the outcome working model matches the generator.
    pub fn or_correct(self) -> bool {
        matches!(self, Scenario::S1 | Scenario::S3)
    }

    /// Design for the propensity fit over the covariates `(1, X₁, X₂)`.
    pub fn ps_spec(self) -> DesignSpec {
        if self.ps_correct() {
            DesignSpec::columns(&[0, 1, 2])
        } else {
            DesignSpec::columns(&[0, 1])
        }
    }

    /// Design for the outcome regression fit over `(1, X₁, X₂)`.
    pub fn or_spec(self) -> DesignSpec {
        if self.or_correct() {
            DesignSpec::columns(&[0, 1, 2])
        } else {
            DesignSpec::columns(&[0, 1])
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let canon = s.trim().to_ascii_lowercase();
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == canon)
            .ok_or_else(|| Error::BadDesign(format!("unknown scenario {s:?}")))
    }
}

/// Row contamination: a fixed fraction of rows has its covariates replaced
/// by `x0`, its response indicator redrawn from the same propensity formula
/// at `x0`, and its observed outcome set to `y0`.
#[derive(Debug, Clone)]
pub struct Contamination {
    /// Fraction of rows to contaminate; `⌊fraction·n⌋` rows are chosen
    /// uniformly without replacement.
    pub fraction: f64,
    /// Covariate row of the contaminated points, including the leading 1.
    pub x0: Vec<f64>,
    /// Observed outcome value at the contaminated points.
    pub y0: f64,
}

/// Full description of one simulation setting.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    /// Sample size per replicate.
    pub n: usize,
    /// True propensity coefficients over `(1, X₁, X₂)`.
    pub gamma0: Vec<f64>,
    /// True outcome coefficients over `(1, X₁, X₂)`.
    pub beta0: Vec<f64>,
    /// Error law of the outcome noise.
    pub error_law: ErrorLaw,
    /// Working design for the propensity fit.
    pub ps_fit_spec: DesignSpec,
    /// Working design for the outcome regression fit.
    pub or_fit_spec: DesignSpec,
    /// Optional row contamination applied after generation.
    pub contamination: Option<Contamination>,
}

impl ScenarioSpec {
    /// The study's default setting: `γ₀ = (0, 0.1, −1.1)`,
    /// `β₀ = (0, −3, 2)`, working models per `scenario`, no contamination.
    pub fn table_default(scenario: Scenario, error_law: ErrorLaw, n: usize) -> Self {
        Self {
            n,
            gamma0: vec![0.0, 0.1, -1.1],
            beta0: vec![0.0, -3.0, 2.0],
            error_law,
            ps_fit_spec: scenario.ps_spec(),
            or_fit_spec: scenario.or_spec(),
            contamination: None,
        }
    }
}

/// A generated sample together with the complete outcome vector the
/// estimators never see.
#[derive(Debug, Clone)]
pub struct GeneratedSample {
    /// The partially observed sample handed to the estimators.
    pub sample: ObservedSample,
    /// Every outcome, observed or not.
    pub full_y: Vec<f64>,
}

/// Draws one sample: covariate rows `(1, X₁, X₂)` with independent standard
/// normal coordinates, response indicators from the logistic propensity at
/// `γ₀`, and outcomes from the linear model at `β₀` plus noise.
pub fn gen_sample(spec: &ScenarioSpec, rng: &mut impl Rng) -> Result<GeneratedSample> {
    if spec.gamma0.len() != 3 || spec.beta0.len() != 3 {
        return Err(Error::Shape("gamma0 and beta0 must have length 3".into()));
    }
    let n = spec.n;
    let mut covariates = DMatrix::zeros(n, 3);
    let mut a = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut full_y = Vec::with_capacity(n);
    for i in 0..n {
        let x1: f64 = rng.sample(StandardNormal);
        let x2: f64 = rng.sample(StandardNormal);
        covariates[(i, 0)] = 1.0;
        covariates[(i, 1)] = x1;
        covariates[(i, 2)] = x2;
        let logit = spec.gamma0[0] + spec.gamma0[1] * x1 + spec.gamma0[2] * x2;
        let observed = rng.random::<f64>() < expit(logit);
        let noise = spec.error_law.draw(rng);
        let outcome = spec.beta0[0] + spec.beta0[1] * x1 + spec.beta0[2] * x2 + noise;
        a.push(observed);
        full_y.push(outcome);
        y.push(if observed { outcome } else { f64::NAN });
    }
    Ok(GeneratedSample { sample: ObservedSample::new(covariates, a, y)?, full_y })
}

/// Contaminates `⌊fraction·n⌋` uniformly chosen rows in place: covariates
/// become `x0`, the response indicator is redrawn from the propensity
/// formula at `x0`, and observed outcomes become `y0`.
pub fn contaminate(
    generated: &mut GeneratedSample,
    gamma0: &[f64],
    contamination: &Contamination,
    rng: &mut impl Rng,
) -> Result<()> {
    let n = generated.sample.n();
    if contamination.x0.len() != generated.sample.covariates.ncols() {
        return Err(Error::Shape(format!(
            "contamination row has {} entries for {} covariate columns",
            contamination.x0.len(),
            generated.sample.covariates.ncols()
        )));
    }
    if !(0.0..=1.0).contains(&contamination.fraction) {
        return Err(Error::Shape(format!(
            "contamination fraction {} outside [0, 1]",
            contamination.fraction
        )));
    }
    let k = (contamination.fraction * n as f64).floor() as usize;
    let logit: f64 =
        contamination.x0.iter().zip(gamma0).map(|(&x, &g)| x * g).sum();
    for i in rand::seq::index::sample(rng, n, k) {
        for (j, &xj) in contamination.x0.iter().enumerate() {
            generated.sample.covariates[(i, j)] = xj;
        }
        let observed = rng.random::<f64>() < expit(logit);
        generated.sample.a[i] = observed;
        generated.sample.y[i] = if observed { contamination.y0 } else { f64::NAN };
        generated.full_y[i] = contamination.y0;
    }
    Ok(())
}

/// One estimate from one replicate of a study.
#[derive(Debug, Clone)]
pub struct StudyRow {
    /// Which estimator.
    pub method: Method,
    /// Replicate index, 0-based.
    pub replicate: usize,
    /// The quantile estimate, or the failure message.
    pub outcome: std::result::Result<f64, String>,
}

fn one_replicate(
    spec: &ScenarioSpec,
    methods: &[Method],
    p: f64,
    streams: &RngStream,
    r: usize,
) -> Vec<StudyRow> {
    let run = || -> Result<Vec<crate::Result<f64>>> {
        let mut rng = streams.stream(3 * r as u64);
        let mut generated = gen_sample(spec, &mut rng)?;
        if let Some(c) = &spec.contamination {
            let mut rng_c = streams.stream(3 * r as u64 + 1);
            contaminate(&mut generated, &spec.gamma0, c, &mut rng_c)?;
        }
        let mm_seed = streams.stream(3 * r as u64 + 2).random::<u64>();
        Ok(estimators::estimate_quantiles(
            &generated.sample,
            methods,
            p,
            &spec.ps_fit_spec,
            &spec.or_fit_spec,
            mm_seed,
        )
        .into_iter()
        .map(|res| res.map(|est| est.quantile_p))
        .collect())
    };
    match run() {
        Ok(per_method) => methods
            .iter()
            .zip(per_method)
            .map(|(&method, res)| StudyRow {
                method,
                replicate: r,
                outcome: res.map_err(|e| e.to_string()),
            })
            .collect(),
        Err(e) => methods
            .iter()
            .map(|&method| StudyRow { method, replicate: r, outcome: Err(e.to_string()) })
            .collect(),
    }
}

/// Runs `reps` replicates sequentially. Output is identical to
/// [`run_study`], row for row.
pub fn run_study_sequential(
    spec: &ScenarioSpec,
    methods: &[Method],
    p: f64,
    reps: usize,
    streams: &RngStream,
) -> Vec<StudyRow> {
    (0..reps).flat_map(|r| one_replicate(spec, methods, p, streams, r)).collect()
}

/// Runs `reps` replicates across the rayon thread pool. Replicates own
/// disjoint RNG streams, so the output does not depend on scheduling.
#[cfg(feature = "parallel")]
pub fn run_study(
    spec: &ScenarioSpec,
    methods: &[Method],
    p: f64,
    reps: usize,
    streams: &RngStream,
) -> Vec<StudyRow> {
    (0..reps)
        .into_par_iter()
        .flat_map_iter(|r| one_replicate(spec, methods, p, streams, r))
        .collect()
}

/// Sequential stand-in used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn run_study(
    spec: &ScenarioSpec,
    methods: &[Method],
    p: f64,
    reps: usize,
    streams: &RngStream,
) -> Vec<StudyRow> {
    run_study_sequential(spec, methods, p, reps, streams)
}

/// Per-method mean squared error about `truth`, with failed replicates
/// excluded from the average and counted separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseSummary {
    /// Which estimator.
    pub method: Method,
    /// Mean squared error over the successful replicates; NaN when none
    /// succeeded.
    pub mse: f64,
    /// Number of successful replicates.
    pub successes: usize,
    /// Number of failed replicates.
    pub failures: usize,
}

/// Summarizes study rows into per-method mean squared errors about `truth`.
/// Methods appear in the order they first occur in `rows`.
pub fn mse(rows: &[StudyRow], truth: f64) -> Vec<MseSummary> {
    let mut order: Vec<Method> = Vec::new();
    for row in rows {
        if !order.contains(&row.method) {
            order.push(row.method);
        }
    }
    order
        .into_iter()
        .map(|method| {
            let mut sum = 0.0;
            let mut successes = 0usize;
            let mut failures = 0usize;
            for row in rows.iter().filter(|row| row.method == method) {
                match &row.outcome {
                    Ok(est) => {
                        let d = est - truth;
                        sum += d * d;
                        successes += 1;
                    }
                    Err(_) => failures += 1,
                }
            }
            let mse = if successes > 0 { sum / successes as f64 } else { f64::NAN };
            MseSummary { method, mse, successes, failures }
        })
        .collect()
}

/// One grid point of a contamination sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// The contaminated outcome value at this grid point.
    pub y0: f64,
    /// Per-method summaries at this grid point.
    pub summaries: Vec<MseSummary>,
}

/// Reruns the study once per `y0` in `y0_grid`, holding everything else
/// fixed, including the RNG streams, so grid points stay paired.
///
/// `spec.contamination` must be present; its `y0` is replaced per point.
pub fn contamination_sweep(
    spec: &ScenarioSpec,
    methods: &[Method],
    p: f64,
    reps: usize,
    y0_grid: &[f64],
    streams: &RngStream,
) -> Result<Vec<SweepPoint>> {
    let base = spec
        .contamination
        .clone()
        .ok_or_else(|| Error::Shape("contamination_sweep needs a contaminated spec".into()))?;
    Ok(y0_grid
        .iter()
        .map(|&y0| {
            let mut point_spec = spec.clone();
            point_spec.contamination = Some(Contamination { y0, ..base.clone() });
            let rows = run_study(&point_spec, methods, p, reps, streams);
            SweepPoint { y0, summaries: mse(&rows, TRUE_MEDIAN) }
        })
        .collect())
}
