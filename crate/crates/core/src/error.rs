use thiserror::Error;

/// Errors produced by the geometric constructions, the weight machinery and
/// the certificate checker.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input vectors span the whole space; the orthogonal complement is {{0}}")]
    FullSpan,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid set size k = {0}")]
    InvalidK(usize),

    #[error("invalid dimension n = {0}")]
    InvalidN(usize),

    #[error("a standard equilateral set in R^{n} has at most {max} points, requested {k}", max = n + 1)]
    TooLarge { n: usize, k: usize },

    #[error("invalid equilateral set: {0}")]
    InvalidSet(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("radius {rho} outside [{lo}, {hi}]")]
    RadiusOutOfRange { rho: f64, lo: f64, hi: f64 },

    #[error("target {t} outside [{lo}, {hi}]")]
    TargetOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("norm {found} does not match required {expected}")]
    NormMismatch { expected: f64, found: f64 },

    #[error("rejection sampling gave up after {attempts} attempts")]
    SamplingFailure { attempts: u64 },

    #[error("set of size {k} in R^{n} is already maximal")]
    AlreadyMaximal { n: usize, k: usize },

    #[error("point {index} has norm {norm} > 1")]
    NotInBall { index: usize, norm: f64 },

    #[error("point lies outside the unit ball (norm {norm})")]
    OutsideBall { norm: f64 },

    #[error("set is not centred at the origin (centre norm {norm})")]
    NotCentered { norm: f64 },

    #[error("the subspace meets (b-a)^perp only in {{0}}")]
    EmptyIntersection,

    #[error("|b - a| = {found}, gamma1 link needs 2*alpha = {expected}")]
    PreconditionDistance { expected: f64, found: f64 },

    #[error("clearance gamma = {gamma} below beta_n = {required}")]
    PreconditionClearance { gamma: f64, required: f64 },

    #[error("circuit move {index} fails clearance: gamma = {gamma} < {required}")]
    ClearanceFailure { index: usize, gamma: f64, required: f64 },

    #[error("matrix is not symmetric (max asymmetry {0})")]
    NotSymmetric(f64),

    #[error("weight function is not finite at a sampled point: {0}")]
    EvaluationFailure(String),

    #[error("added point has norm {norm} below the window floor {floor}")]
    NormWindowViolation { norm: f64, floor: f64 },

    #[error("cannot bracket radius for target {target}")]
    RadiusSolveFailure { target: f64 },

    #[error("certificate generation failed at stage `{stage}`: {detail}")]
    GenerationFailure { stage: &'static str, detail: String },

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("set {index} is not a standard equilateral set in the ball (worst violation {violation:e})")]
    SetInvalid { index: usize, violation: f64 },

    #[error("claim not implied by the set equations (residual {residual:e})")]
    ClaimNotImplied { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
