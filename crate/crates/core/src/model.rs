//! Shared domain types: the known variance structure, the normal prior,
//! shrinkage directions and estimator descriptions.
//!
//! Every type serializes to JSON with the field names used throughout the
//! crate; matrices are lists of rows. Deserialization goes through the same
//! validation as the constructors.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Canonical,
    General,
}

/// Known variance structure of `X ~ N(theta, Sigma)` with loss
/// `(delta - theta)^T Q (delta - theta)`.
///
/// In canonical mode `Sigma = diag(d)` and `Q = I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemRepr", into = "ProblemRepr")]
pub enum ProblemSpec {
    Canonical { d: Vec<f64> },
    General { sigma: Matrix, q: Matrix },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "mode")]
enum ProblemRepr {
    Canonical {
        d: Vec<f64>,
    },
    General {
        sigma: Vec<Vec<f64>>,
        q: Vec<Vec<f64>>,
    },
}

impl TryFrom<ProblemRepr> for ProblemSpec {
    type Error = Error;
    fn try_from(r: ProblemRepr) -> Result<Self> {
        match r {
            ProblemRepr::Canonical { d } => ProblemSpec::canonical(d),
            ProblemRepr::General { sigma, q } => ProblemSpec::general(
                linalg::from_rows(&sigma, "sigma")?,
                linalg::from_rows(&q, "q")?,
            ),
        }
    }
}

impl From<ProblemSpec> for ProblemRepr {
    fn from(p: ProblemSpec) -> Self {
        match p {
            ProblemSpec::Canonical { d } => ProblemRepr::Canonical { d },
            ProblemSpec::General { sigma, q } => ProblemRepr::General {
                sigma: linalg::to_rows(&sigma),
                q: linalg::to_rows(&q),
            },
        }
    }
}

/// Outcome of [`validate_problem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub mode: Mode,
    pub p: usize,
    /// Smallest variance (canonical) or smallest eigenvalue of `Sigma`.
    pub sigma_min_eigenvalue: f64,
    pub q_min_eigenvalue: f64,
}

pub(crate) fn check_variances(d: &[f64]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::EmptyDimension);
    }
    match d.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        Some(index) => Err(Error::NonPositiveVariance {
            index,
            value: d[index],
        }),
        None => Ok(()),
    }
}

pub fn validate_problem(spec: &ProblemSpec) -> Result<ValidationReport> {
    match spec {
        ProblemSpec::Canonical { d } => {
            check_variances(d)?;
            Ok(ValidationReport {
                mode: Mode::Canonical,
                p: d.len(),
                sigma_min_eigenvalue: d.iter().copied().fold(f64::INFINITY, f64::min),
                q_min_eigenvalue: 1.0,
            })
        }
        ProblemSpec::General { sigma, q } => {
            linalg::check_spd(sigma, "sigma")?;
            linalg::check_spd(q, "q")?;
            if sigma.nrows() != q.nrows() {
                return Err(Error::LengthMismatch {
                    expected: sigma.nrows(),
                    got: q.nrows(),
                });
            }
            Ok(ValidationReport {
                mode: Mode::General,
                p: sigma.nrows(),
                sigma_min_eigenvalue: linalg::lambda_min_sym(sigma),
                q_min_eigenvalue: linalg::lambda_min_sym(q),
            })
        }
    }
}

impl ProblemSpec {
    pub fn canonical(d: Vec<f64>) -> Result<Self> {
        let spec = ProblemSpec::Canonical { d };
        validate_problem(&spec)?;
        Ok(spec)
    }

    pub fn general(sigma: Matrix, q: Matrix) -> Result<Self> {
        let spec = ProblemSpec::General { sigma, q };
        validate_problem(&spec)?;
        Ok(spec)
    }

    pub fn mode(&self) -> Mode {
        match self {
            ProblemSpec::Canonical { .. } => Mode::Canonical,
            ProblemSpec::General { .. } => Mode::General,
        }
    }

    pub fn p(&self) -> usize {
        match self {
            ProblemSpec::Canonical { d } => d.len(),
            ProblemSpec::General { sigma, .. } => sigma.nrows(),
        }
    }

    pub fn variances(&self) -> Option<&[f64]> {
        match self {
            ProblemSpec::Canonical { d } => Some(d),
            ProblemSpec::General { .. } => None,
        }
    }

    pub fn sigma(&self) -> Matrix {
        match self {
            ProblemSpec::Canonical { d } => {
                Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
            }
            ProblemSpec::General { sigma, .. } => sigma.clone(),
        }
    }

    pub fn q(&self) -> Matrix {
        match self {
            ProblemSpec::Canonical { d } => Matrix::identity(d.len(), d.len()),
            ProblemSpec::General { q, .. } => q.clone(),
        }
    }
}

/// Diagonal prior variance `Gamma` of `theta ~ N(0, Gamma)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PriorRepr", into = "PriorRepr")]
pub enum PriorSpec {
    /// `Gamma = 0`.
    Zero,
    /// `Gamma = gamma I` in the limit `gamma -> infinity`. Kept symbolic.
    HomoscedasticInfinity,
    Explicit(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
enum PriorTag {
    Zero,
    HomoscedasticInfinity,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PriorRepr {
    Tag(PriorTag),
    Explicit { gamma: Vec<f64> },
}

impl TryFrom<PriorRepr> for PriorSpec {
    type Error = Error;
    fn try_from(r: PriorRepr) -> Result<Self> {
        match r {
            PriorRepr::Tag(PriorTag::Zero) => Ok(PriorSpec::Zero),
            PriorRepr::Tag(PriorTag::HomoscedasticInfinity) => Ok(PriorSpec::HomoscedasticInfinity),
            PriorRepr::Explicit { gamma } => PriorSpec::explicit(gamma),
        }
    }
}

impl From<PriorSpec> for PriorRepr {
    fn from(p: PriorSpec) -> Self {
        match p {
            PriorSpec::Zero => PriorRepr::Tag(PriorTag::Zero),
            PriorSpec::HomoscedasticInfinity => PriorRepr::Tag(PriorTag::HomoscedasticInfinity),
            PriorSpec::Explicit(gamma) => PriorRepr::Explicit { gamma },
        }
    }
}

pub(crate) fn check_gamma(gamma: &[f64]) -> Result<()> {
    match gamma.iter().position(|g| !(*g >= 0.0 && g.is_finite())) {
        Some(index) => Err(Error::InvalidPriorVariance {
            index,
            value: gamma[index],
        }),
        None => Ok(()),
    }
}

impl PriorSpec {
    pub fn explicit(gamma: Vec<f64>) -> Result<Self> {
        check_gamma(&gamma)?;
        Ok(PriorSpec::Explicit(gamma))
    }

    /// `Gamma = gamma I`.
    pub fn homoscedastic(gamma: f64, p: usize) -> Result<Self> {
        Self::explicit(alloc::vec![gamma; p])
    }

    /// `Gamma = gamma D`.
    pub fn proportional(gamma: f64, d: &[f64]) -> Result<Self> {
        Self::explicit(d.iter().map(|v| gamma * v).collect())
    }
}

/// A prior resolved against a concrete dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum EffectiveGamma {
    Finite(Vec<f64>),
    HomoscedasticInfinity,
}

impl EffectiveGamma {
    /// Bayes importance `d_j^2 / (d_j + gamma_j)`.
    ///
    /// For the homoscedastic-infinity limit this is `d_j^2`, i.e. the finite
    /// importance multiplied by `gamma`; every quantity built from it is
    /// scale invariant or rescaled accordingly.
    pub fn importance(&self, d: &[f64]) -> Vec<f64> {
        match self {
            EffectiveGamma::Finite(g) => d.iter().zip(g).map(|(d, g)| d * d / (d + g)).collect(),
            EffectiveGamma::HomoscedasticInfinity => d.iter().map(|d| d * d).collect(),
        }
    }

    pub fn as_finite(&self) -> Option<&[f64]> {
        match self {
            EffectiveGamma::Finite(g) => Some(g),
            EffectiveGamma::HomoscedasticInfinity => None,
        }
    }
}

pub fn effective_gamma(prior: &PriorSpec, d: &[f64]) -> Result<EffectiveGamma> {
    match prior {
        PriorSpec::Zero => Ok(EffectiveGamma::Finite(alloc::vec![0.0; d.len()])),
        PriorSpec::HomoscedasticInfinity => Ok(EffectiveGamma::HomoscedasticInfinity),
        PriorSpec::Explicit(g) => {
            if g.len() != d.len() {
                return Err(Error::LengthMismatch {
                    expected: d.len(),
                    got: g.len(),
                });
            }
            check_gamma(g)?;
            Ok(EffectiveGamma::Finite(g.clone()))
        }
    }
}

/// Shrinkage direction `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DirectionRepr", into = "DirectionRepr")]
pub enum Direction {
    Diagonal(Vec<f64>),
    General(Matrix),
}

#[derive(Serialize, Deserialize)]
enum DirectionRepr {
    #[serde(rename = "diag_a")]
    Diagonal(Vec<f64>),
    #[serde(rename = "general_a")]
    General(Vec<Vec<f64>>),
}

impl TryFrom<DirectionRepr> for Direction {
    type Error = Error;
    fn try_from(r: DirectionRepr) -> Result<Self> {
        match r {
            DirectionRepr::Diagonal(a) => Direction::diagonal(a),
            DirectionRepr::General(rows) => {
                Direction::general(linalg::from_rows(&rows, "general_a")?)
            }
        }
    }
}

impl From<Direction> for DirectionRepr {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Diagonal(a) => DirectionRepr::Diagonal(a),
            Direction::General(m) => DirectionRepr::General(linalg::to_rows(&m)),
        }
    }
}

impl Direction {
    pub fn diagonal(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if let Some(index) = a.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::NegativeDirection {
                index,
                value: a[index],
            });
        }
        Ok(Direction::Diagonal(a))
    }

    /// A general square direction. Conditions involving `Sigma` and `Q` are
    /// checked where the direction is used.
    pub fn general(a: Matrix) -> Result<Self> {
        if a.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if !a.is_square() {
            return Err(Error::NotSquare { which: "general_a" });
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("general_a", "entries must be finite"));
        }
        Ok(Direction::General(a))
    }

    pub fn p(&self) -> usize {
        match self {
            Direction::Diagonal(a) => a.len(),
            Direction::General(m) => m.nrows(),
        }
    }

    pub fn as_diagonal(&self) -> Option<&[f64]> {
        match self {
            Direction::Diagonal(a) => Some(a),
            Direction::General(_) => None,
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        match self {
            Direction::Diagonal(a) => {
                Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(a))
            }
            Direction::General(m) => m.clone(),
        }
    }
}

/// Usual factors (`p - 2`, `(k - 2)_+`, `c*`) or their doubled alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorVersion {
    #[default]
    Usual,
    Alternative,
}

impl FactorVersion {
    pub fn multiplier(self) -> f64 {
        match self {
            FactorVersion::Usual => 1.0,
            FactorVersion::Alternative => 2.0,
        }
    }
}

macro_rules! estimator_kinds {
    ($($variant:ident => $name:literal),+ $(,)?) => {
        /// Registry of estimators, keyed by stable names.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum EstimatorKind {
            $(#[serde(rename = $name)] $variant),+
        }

        impl EstimatorKind {
            pub const ALL: &'static [EstimatorKind] = &[$(EstimatorKind::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $(EstimatorKind::$variant => $name),+ }
            }

            pub fn from_name(name: &str) -> Result<Self> {
                match name {
                    $($name => Ok(EstimatorKind::$variant),)+
                    other => Err(Error::UnknownEstimator(other.to_string())),
                }
            }
        }
    };
}

estimator_kinds! {
    Identity => "X",
    Bayes => "Bayes",
    JamesStein => "JS",
    JamesSteinPlus => "JS+",
    Spherical => "S",
    Berger => "B",
    BergerPlus => "B+",
    RobustBayes => "RB",
    MinimaxBerger => "MB",
    MinimaxBergerSimplified => "MB2",
    EmpiricalBayes => "EB",
    Sure => "XKB",
    Dagger => "Adag",
    DaggerPlus => "A+",
    DaggerPlusZero => "A+dag0",
    DaggerPlusInfinity => "A+dagInf",
    Block => "block",
}

impl EstimatorKind {
    pub fn supports_alternative(self) -> bool {
        use EstimatorKind::*;
        matches!(
            self,
            BergerPlus
                | RobustBayes
                | MinimaxBerger
                | DaggerPlus
                | DaggerPlusZero
                | DaggerPlusInfinity
        )
    }

    fn allowed_params(self) -> &'static [&'static str] {
        use EstimatorKind::*;
        match self {
            JamesStein | JamesSteinPlus => &["c", "sigma2"],
            Spherical | Berger | BergerPlus => &["c"],
            _ => &[],
        }
    }

    pub fn uses_prior(self) -> bool {
        use EstimatorKind::*;
        matches!(
            self,
            Bayes
                | RobustBayes
                | MinimaxBerger
                | MinimaxBergerSimplified
                | Dagger
                | DaggerPlus
                | Block
        )
    }
}

/// A registry estimator together with its scalar parameters and prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EstimatorSpecRepr", into = "EstimatorSpecRepr")]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub parameters: BTreeMap<String, f64>,
    pub prior: Option<PriorSpec>,
    pub factor_version: FactorVersion,
}

#[derive(Serialize, Deserialize)]
struct EstimatorSpecRepr {
    kind: EstimatorKind,
    #[serde(default)]
    parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prior: Option<PriorSpec>,
    #[serde(default)]
    factor_version: FactorVersion,
}

impl TryFrom<EstimatorSpecRepr> for EstimatorSpec {
    type Error = Error;
    fn try_from(r: EstimatorSpecRepr) -> Result<Self> {
        let spec = EstimatorSpec {
            kind: r.kind,
            parameters: r.parameters,
            prior: r.prior,
            factor_version: r.factor_version,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<EstimatorSpec> for EstimatorSpecRepr {
    fn from(s: EstimatorSpec) -> Self {
        EstimatorSpecRepr {
            kind: s.kind,
            parameters: s.parameters,
            prior: s.prior,
            factor_version: s.factor_version,
        }
    }
}

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind) -> Self {
        EstimatorSpec {
            kind,
            parameters: BTreeMap::new(),
            prior: None,
            factor_version: FactorVersion::Usual,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self> {
        self.parameters.insert(name.to_string(), value);
        self.validate()?;
        Ok(self)
    }

    pub fn with_prior(mut self, prior: PriorSpec) -> Result<Self> {
        self.prior = Some(prior);
        self.validate()?;
        Ok(self)
    }

    pub fn with_version(mut self, version: FactorVersion) -> Result<Self> {
        self.factor_version = version;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.factor_version == FactorVersion::Alternative && !self.kind.supports_alternative() {
            return Err(Error::param(
                "factor_version",
                "the alternative version exists only for B+, RB, MB and A+",
            ));
        }
        let allowed = self.kind.allowed_params();
        for (name, value) in &self.parameters {
            if !allowed.contains(&name.as_str()) {
                return Err(Error::InvalidParameter {
                    name: name.clone(),
                    reason: alloc::format!("not a parameter of `{}`", self.kind.name()),
                });
            }
            if !(value.is_finite() && *value >= 0.0) || (name == "sigma2" && *value <= 0.0) {
                return Err(Error::InvalidParameter {
                    name: name.clone(),
                    reason: "must be finite and >= 0".into(),
                });
            }
        }
        if self.prior.is_some() && !self.kind.uses_prior() {
            return Err(Error::param(
                "prior",
                "this estimator does not take a prior",
            ));
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }

    /// Display label, e.g. `"B+"` or `"MB[alt]"`.
    pub fn label(&self) -> String {
        match self.factor_version {
            FactorVersion::Usual => self.kind.name().to_string(),
            FactorVersion::Alternative => alloc::format!("{}[alt]", self.kind.name()),
        }
    }
}
