//! Seeded Monte Carlo evaluation of pointwise and Bayes risk.
//!
//! Replication `i` draws from a ChaCha8 generator seeded with `seed` and
//! switched to stream `i`, so every replication is reproducible in
//! isolation. Replications are grouped into fixed chunks of [`CHUNK`]; each
//! chunk yields an [`Accumulator`] and chunks are merged in index order.
//! Results are therefore bit-identical however the chunks are scheduled.
//! Normal variates use the ziggurat sampler of `rand_distr`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::estimators::{Estimator, PointEstimator};
use crate::linalg::{self, Matrix};
use crate::model::{check_gamma, check_variances, EstimatorSpec};
use crate::special::chi2_quantile;
use crate::{Error, Result};

pub const CHUNK: usize = 1024;
pub const DEFAULT_N_REP: usize = 100_000;

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise combination of two disjoint samples.
    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_err(&self) -> f64 {
        libm::sqrt(self.variance() / self.n as f64)
    }

    pub fn estimate(&self) -> McEstimate {
        McEstimate {
            mean: self.mean,
            std_err: self.std_err(),
            n_rep: self.n as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_rep: usize,
}

/// One random replication of an experiment.
pub trait Replicate: Sync {
    fn replicate(&self, rng: &mut ChaCha8Rng) -> f64;
}

/// Any `Fn(&mut ChaCha8Rng) -> f64` is an experiment.
pub struct FnExperiment<F>(pub F);

impl<F: Fn(&mut ChaCha8Rng) -> f64 + Sync> Replicate for FnExperiment<F> {
    fn replicate(&self, rng: &mut ChaCha8Rng) -> f64 {
        (self.0)(rng)
    }
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Half-open replication ranges of the fixed chunking.
pub fn chunk_ranges(n_rep: usize) -> Vec<(usize, usize)> {
    (0..n_rep.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(n_rep)))
        .collect()
}

/// Runs replications `start..end`.
pub fn run_chunk(exp: &dyn Replicate, seed: u64, (start, end): (usize, usize)) -> Accumulator {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Accumulator::default();
    for i in start..end {
        let mut rng = base.clone();
        rng.set_stream(i as u64);
        acc.push(exp.replicate(&mut rng));
    }
    acc
}

/// Merges per-chunk accumulators in chunk order.
pub fn merge_in_order(chunks: &[Accumulator]) -> Accumulator {
    let mut acc = Accumulator::default();
    for c in chunks {
        acc.merge(c);
    }
    acc
}

/// Strategy for evaluating the chunks of an experiment.
pub trait Runner: Sync {
    fn run(&self, exp: &dyn Replicate, n_rep: usize, seed: u64) -> Accumulator;
}

/// Evaluates chunks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Runner for Sequential {
    fn run(&self, exp: &dyn Replicate, n_rep: usize, seed: u64) -> Accumulator {
        let chunks: Vec<Accumulator> = chunk_ranges(n_rep)
            .into_iter()
            .map(|r| run_chunk(exp, seed, r))
            .collect();
        merge_in_order(&chunks)
    }
}

fn check_n_rep(n_rep: usize) -> Result<()> {
    if n_rep < 2 {
        return Err(Error::param("n_rep", "at least 2 replications are needed"));
    }
    Ok(())
}

/// `||delta(X) - theta||^2` with `X ~ N(theta, diag(d))`.
pub struct PointwiseExperiment<'a> {
    pub estimator: &'a dyn PointEstimator,
    pub theta: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Replicate for PointwiseExperiment<'_> {
    fn replicate(&self, rng: &mut ChaCha8Rng) -> f64 {
        let x: Vec<f64> = self
            .theta
            .iter()
            .zip(&self.sd)
            .map(|(t, s)| t + s * standard_normal(rng))
            .collect();
        let est = self.estimator.estimate(&x);
        est.value
            .iter()
            .zip(&self.theta)
            .map(|(e, t)| (e - t) * (e - t))
            .sum()
    }
}

/// `||delta(X) - theta||^2` with `theta ~ N(0, diag(gamma))` and
/// `X | theta ~ N(theta, diag(d))`. The `p` prior draws precede the `p`
/// noise draws.
pub struct BayesExperiment<'a> {
    pub estimator: &'a dyn PointEstimator,
    pub prior_sd: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Replicate for BayesExperiment<'_> {
    fn replicate(&self, rng: &mut ChaCha8Rng) -> f64 {
        let theta: Vec<f64> = self
            .prior_sd
            .iter()
            .map(|s| s * standard_normal(rng))
            .collect();
        let x: Vec<f64> = theta
            .iter()
            .zip(&self.sd)
            .map(|(t, s)| t + s * standard_normal(rng))
            .collect();
        let est = self.estimator.estimate(&x);
        est.value
            .iter()
            .zip(&theta)
            .map(|(e, t)| (e - t) * (e - t))
            .sum()
    }
}

/// `(delta(X) - theta)^T Q (delta(X) - theta)` with `X ~ N(theta, Sigma)`.
pub struct GeneralPointwiseExperiment<'a> {
    pub estimator: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
    pub theta: DVector<f64>,
    /// Lower Cholesky factor of `Sigma`.
    pub chol: Matrix,
    pub q: Matrix,
}

impl<'a> GeneralPointwiseExperiment<'a> {
    pub fn new(
        estimator: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
        theta: &[f64],
        sigma: &Matrix,
        q: &Matrix,
    ) -> Result<Self> {
        linalg::check_spd(sigma, "sigma")?;
        linalg::check_spd(q, "q")?;
        let chol = nalgebra::Cholesky::new(linalg::symmetrize(sigma))
            .ok_or(Error::NotPositiveDefinite { which: "sigma" })?
            .l();
        Ok(GeneralPointwiseExperiment {
            estimator,
            theta: DVector::from_column_slice(theta),
            chol,
            q: q.clone(),
        })
    }
}

fn correlated_draw(theta: &DVector<f64>, chol: &Matrix, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let z = DVector::from_iterator(theta.len(), (0..theta.len()).map(|_| standard_normal(rng)));
    theta + chol * z
}

impl Replicate for GeneralPointwiseExperiment<'_> {
    fn replicate(&self, rng: &mut ChaCha8Rng) -> f64 {
        let x = correlated_draw(&self.theta, &self.chol, rng);
        let e = DVector::from_vec((self.estimator)(x.as_slice())) - &self.theta;
        (&self.q * &e).dot(&e)
    }
}

fn sqrt_all(v: &[f64]) -> Vec<f64> {
    v.iter().map(|v| libm::sqrt(*v)).collect()
}

/// Pointwise risk of a compiled estimator with a custom runner.
pub fn pointwise_risk_with(
    runner: &dyn Runner,
    est: &dyn PointEstimator,
    theta: &[f64],
    d: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_variances(d)?;
    check_n_rep(n_rep)?;
    if theta.len() != d.len() || est.dim() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: theta.len(),
        });
    }
    let exp = PointwiseExperiment {
        estimator: est,
        theta: theta.to_vec(),
        sd: sqrt_all(d),
    };
    Ok(runner.run(&exp, n_rep, seed).estimate())
}

/// Bayes risk of a compiled estimator under `N(0, diag(gamma))`.
pub fn bayes_risk_with(
    runner: &dyn Runner,
    est: &dyn PointEstimator,
    gamma: &[f64],
    d: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_variances(d)?;
    check_gamma(gamma)?;
    check_n_rep(n_rep)?;
    if gamma.len() != d.len() || est.dim() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: gamma.len(),
        });
    }
    let exp = BayesExperiment {
        estimator: est,
        prior_sd: sqrt_all(gamma),
        sd: sqrt_all(d),
    };
    Ok(runner.run(&exp, n_rep, seed).estimate())
}

/// Mean and standard error of `||delta(X) - theta||^2`, `X ~ N(theta, D)`.
pub fn pointwise_risk(
    spec: &EstimatorSpec,
    theta: &[f64],
    d: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<McEstimate> {
    pointwise_risk_with(
        &Sequential,
        &Estimator::new(spec, d)?,
        theta,
        d,
        n_rep,
        seed,
    )
}

/// Mean and standard error of the loss under `theta ~ N(0, Gamma)`.
pub fn bayes_risk(
    spec: &EstimatorSpec,
    gamma: &[f64],
    d: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<McEstimate> {
    bayes_risk_with(
        &Sequential,
        &Estimator::new(spec, d)?,
        gamma,
        d,
        n_rep,
        seed,
    )
}

/// Paths along which risk curves are traced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DirectionKind {
    /// `theta_j = eta / sqrt(p)`.
    Homoscedastic,
    /// `theta_j = eta sqrt(d_j / tr D)`.
    Heteroscedastic,
    /// `theta = eta e_j` (zero-based `j`).
    Axis(usize),
    /// Bayes risk under `N(0, eta^2 I / p)`.
    BayesHomoscedastic,
    /// Bayes risk under `N(0, eta^2 D / tr D)`.
    BayesHeteroscedastic,
}

impl DirectionKind {
    /// `"homoscedastic"`, `"heteroscedastic"`, `"axis1"` (one-based),
    /// `"bayes_homoscedastic"` or `"bayes_heteroscedastic"`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "homoscedastic" => Ok(DirectionKind::Homoscedastic),
            "heteroscedastic" => Ok(DirectionKind::Heteroscedastic),
            "bayes_homoscedastic" => Ok(DirectionKind::BayesHomoscedastic),
            "bayes_heteroscedastic" => Ok(DirectionKind::BayesHeteroscedastic),
            other => match other
                .strip_prefix("axis")
                .and_then(|j| j.parse::<usize>().ok())
            {
                Some(j) if j >= 1 => Ok(DirectionKind::Axis(j - 1)),
                _ => Err(Error::param(
                    "kind",
                    &format!("unknown curve kind `{other}`"),
                )),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            DirectionKind::Homoscedastic => "homoscedastic".into(),
            DirectionKind::Heteroscedastic => "heteroscedastic".into(),
            DirectionKind::Axis(j) => format!("axis{}", j + 1),
            DirectionKind::BayesHomoscedastic => "bayes_homoscedastic".into(),
            DirectionKind::BayesHeteroscedastic => "bayes_heteroscedastic".into(),
        }
    }

    pub fn is_bayes(&self) -> bool {
        matches!(
            self,
            DirectionKind::BayesHomoscedastic | DirectionKind::BayesHeteroscedastic
        )
    }
}

impl TryFrom<String> for DirectionKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        DirectionKind::parse(&s)
    }
}

impl From<DirectionKind> for String {
    fn from(k: DirectionKind) -> String {
        k.name()
    }
}

/// Point at distance `eta` along a pointwise direction.
pub fn theta_path(kind: DirectionKind, d: &[f64], eta: f64) -> Result<Vec<f64>> {
    check_variances(d)?;
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::param("eta", "must be finite and >= 0"));
    }
    let p = d.len();
    match kind {
        DirectionKind::Homoscedastic => Ok(vec![eta / libm::sqrt(p as f64); p]),
        DirectionKind::Heteroscedastic => {
            let tr: f64 = d.iter().sum();
            Ok(d.iter().map(|v| eta * libm::sqrt(v / tr)).collect())
        }
        DirectionKind::Axis(j) => {
            if j >= p {
                return Err(Error::param("kind", "axis index exceeds the dimension"));
            }
            let mut t = vec![0.0; p];
            t[j] = eta;
            Ok(t)
        }
        _ => Err(Error::param(
            "kind",
            "Bayes kinds define a prior, not a point",
        )),
    }
}

/// Prior variances at scale `eta` for the Bayes kinds.
pub fn prior_path(kind: DirectionKind, d: &[f64], eta: f64) -> Result<Vec<f64>> {
    check_variances(d)?;
    let p = d.len();
    match kind {
        DirectionKind::BayesHomoscedastic => Ok(vec![eta * eta / p as f64; p]),
        DirectionKind::BayesHeteroscedastic => {
            let tr: f64 = d.iter().sum();
            Ok(d.iter().map(|v| eta * eta * v / tr).collect())
        }
        _ => Err(Error::param(
            "kind",
            "pointwise kinds define a point, not a prior",
        )),
    }
}

/// `steps` equally spaced values from 0 to `eta_max`.
pub fn eta_grid(eta_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(eta_max > 0.0 && eta_max.is_finite()) || steps < 2 {
        return Err(Error::param(
            "curve",
            "eta_max must be positive and eta_steps at least 2",
        ));
    }
    Ok((0..steps)
        .map(|i| eta_max * i as f64 / (steps - 1) as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub estimator: String,
    pub direction_kind: DirectionKind,
    pub eta_grid: Vec<f64>,
    pub risk: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_rep: usize,
    pub seed: u64,
}

/// Risk curve of a compiled estimator. The same seed is used at every
/// `eta`, so neighbouring points share random numbers.
pub fn risk_curve_with(
    runner: &dyn Runner,
    est: &Estimator,
    kind: DirectionKind,
    d: &[f64],
    eta_grid: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<RiskCurve> {
    let mut risk = Vec::with_capacity(eta_grid.len());
    let mut std_err = Vec::with_capacity(eta_grid.len());
    for &eta in eta_grid {
        let r = if kind.is_bayes() {
            bayes_risk_with(runner, est, &prior_path(kind, d, eta)?, d, n_rep, seed)?
        } else {
            pointwise_risk_with(runner, est, &theta_path(kind, d, eta)?, d, n_rep, seed)?
        };
        risk.push(r.mean);
        std_err.push(r.std_err);
    }
    Ok(RiskCurve {
        estimator: est.label(),
        direction_kind: kind,
        eta_grid: eta_grid.to_vec(),
        risk,
        std_err,
        n_rep,
        seed,
    })
}

pub fn risk_curve(
    spec: &EstimatorSpec,
    kind: DirectionKind,
    d: &[f64],
    eta_grid: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<RiskCurve> {
    risk_curve_with(
        &Sequential,
        &Estimator::new(spec, d)?,
        kind,
        d,
        eta_grid,
        n_rep,
        seed,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceConfig {
    pub name: String,
    pub d: Vec<f64>,
}

pub const CONFIG_NAMES: [&str; 5] = ["eq5", "group3", "group22", "invchisq8df3", "invchisq24df5"];

/// Levels 5%, 15%, ..., 95% of `scale / chi2_k`, via the complementary
/// chi-squared quantile.
pub fn inverse_chi2_quantiles(scale: f64, k: f64) -> Result<Vec<f64>> {
    (0..10)
        .map(|i| Ok(scale / chi2_quantile(k, 1.0 - (0.05 + 0.1 * i as f64))?))
        .collect()
}

/// Named variance configurations of the simulation study.
pub fn variance_config(name: &str) -> Result<VarianceConfig> {
    let d = match name {
        "eq5" => vec![40.0, 20.0, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        "group3" => vec![40.0, 20.0, 10.0, 5.0, 5.0, 5.0, 1.0, 1.0, 1.0, 1.0],
        "group22" => vec![40.0, 20.0, 10.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0],
        "invchisq8df3" => inverse_chi2_quantiles(8.0, 3.0)?,
        "invchisq24df5" => inverse_chi2_quantiles(24.0, 5.0)?,
        other => return Err(Error::UnknownConfig(other.to_string())),
    };
    Ok(VarianceConfig {
        name: name.to_string(),
        d,
    })
}

impl VarianceConfig {
    pub fn explicit(d: Vec<f64>) -> Result<Self> {
        check_variances(&d)?;
        Ok(VarianceConfig {
            name: "explicit".into(),
            d,
        })
    }
}

/// Smooth vector field with analytic Jacobian, for the Stein identity.
pub trait VectorField: Sync {
    fn value(&self, x: &[f64]) -> Vec<f64>;
    /// `J_{ij} = d g_i / d x_j`.
    fn jacobian(&self, x: &[f64]) -> Matrix;
}

pub struct IdentityField;

impl VectorField for IdentityField {
    fn value(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn jacobian(&self, x: &[f64]) -> Matrix {
        Matrix::identity(x.len(), x.len())
    }
}

/// `g(x) = A x`.
pub struct LinearField(pub Matrix);

impl VectorField for LinearField {
    fn value(&self, x: &[f64]) -> Vec<f64> {
        (&self.0 * DVector::from_column_slice(x))
            .as_slice()
            .to_vec()
    }
    fn jacobian(&self, _x: &[f64]) -> Matrix {
        self.0.clone()
    }
}

/// `g(x) = x / ||x||^2`, with Jacobian `(I ||x||^2 - 2 x x^T) / ||x||^4`.
pub struct InverseNormField;

impl VectorField for InverseNormField {
    fn value(&self, x: &[f64]) -> Vec<f64> {
        let n2: f64 = x.iter().map(|v| v * v).sum();
        x.iter().map(|v| v / n2).collect()
    }
    fn jacobian(&self, x: &[f64]) -> Matrix {
        let n2: f64 = x.iter().map(|v| v * v).sum();
        let v = DVector::from_column_slice(x);
        (Matrix::identity(x.len(), x.len()) * n2 - (&v * v.transpose()) * 2.0) / (n2 * n2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinReport {
    /// Estimate of `E{(X - theta)^T g(X)}`.
    pub lhs: f64,
    /// Estimate of `tr[Sigma E{grad g(X)}]`.
    pub rhs: f64,
    /// Mean and standard error of the paired difference.
    pub diff: f64,
    pub diff_se: f64,
    /// `diff / diff_se`.
    pub z: f64,
    pub n_rep: usize,
}

impl SteinReport {
    pub fn passes(&self, z_max: f64) -> bool {
        self.z.abs() <= z_max
    }
}

/// Checks `E{(X - theta)^T g(X)} = tr[Sigma E{grad g(X)}]` for
/// `X ~ N(theta, Sigma)` by paired Monte Carlo differences.
pub fn stein_identity_check_with(
    runner: &dyn Runner,
    g: &dyn VectorField,
    sigma: &Matrix,
    theta: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<SteinReport> {
    check_n_rep(n_rep)?;
    if sigma.nrows() != theta.len() {
        return Err(Error::LengthMismatch {
            expected: sigma.nrows(),
            got: theta.len(),
        });
    }
    linalg::check_spd(sigma, "sigma")?;
    let chol = nalgebra::Cholesky::new(linalg::symmetrize(sigma))
        .ok_or(Error::NotPositiveDefinite { which: "sigma" })?
        .l();
    let th = DVector::from_column_slice(theta);
    let sides = |rng: &mut ChaCha8Rng| {
        let x = correlated_draw(&th, &chol, rng);
        let gx = DVector::from_vec(g.value(x.as_slice()));
        let lhs = (&x - &th).dot(&gx);
        let rhs = linalg::trace(&(sigma * g.jacobian(x.as_slice())));
        (lhs, rhs)
    };
    let lhs = runner.run(
        &FnExperiment(|rng: &mut ChaCha8Rng| sides(rng).0),
        n_rep,
        seed,
    );
    let rhs = runner.run(
        &FnExperiment(|rng: &mut ChaCha8Rng| sides(rng).1),
        n_rep,
        seed,
    );
    let diff = runner.run(
        &FnExperiment(|rng: &mut ChaCha8Rng| {
            let (l, r) = sides(rng);
            l - r
        }),
        n_rep,
        seed,
    );
    let se = diff.std_err();
    let z = if se > 0.0 {
        diff.mean / se
    } else if diff.mean == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SteinReport {
        lhs: lhs.mean,
        rhs: rhs.mean,
        diff: diff.mean,
        diff_se: se,
        z,
        n_rep,
    })
}

pub fn stein_identity_check(
    g: &dyn VectorField,
    sigma: &Matrix,
    theta: &[f64],
    n_rep: usize,
    seed: u64,
) -> Result<SteinReport> {
    stein_identity_check_with(&Sequential, g, sigma, theta, n_rep, seed)
}
