use thiserror::Error;

/// Failures raised by the model, dynamics and analysis routines.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("threshold undefined: parameters are outside the inversion regime 1-alpha < gamma < 1+alpha")]
    ThresholdUndefined,
    #[error("parameters are outside the rational regime")]
    RegimeViolation,
    #[error("Jellett value must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("normal force denominator is non-positive ({0})")]
    NonPositiveDenominator(f64),
    #[error("normal force became negative ({0} N): the top leaves the surface")]
    NegativeNormalForce(f64),
    #[error("sin(theta) = {0} is below the Euler-angle chart limit")]
    SinThetaUnderflow(f64),
    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("maximum number of integration steps exceeded at t = {0}")]
    TooManySteps(f64),
    #[error("potential has a pole at z = {0}")]
    PoleAtBoundary(f64),
    #[error("polynomial is not square-free")]
    NotSquareFree,
    #[error("derivative numerator has no sign change on [-1, 1]")]
    NoSignChange,
    #[error("right-hand side of the delta equation is non-positive ({0})")]
    NonPositiveRhs(f64),
    #[error("parameter b vanishes")]
    DegenerateB,
    #[error("energy {energy} is below the potential minimum {minimum}")]
    BelowMinimum { energy: f64, minimum: f64 },
    #[error("companion quadratic has complex roots (discriminant {0})")]
    ComplexRoots(f64),
    #[error("elliptic parameter k^2 = {0} is outside [0, 1)")]
    OutOfDomain(f64),
    #[error("denominator 1 + w^2 + 2 w z1 vanishes")]
    DegenerateDenominator,
    #[error("period quadrature did not converge (last relative change {0})")]
    QuadratureNonConvergence(f64),
    #[error("epsilon = {0} is not below 0.9")]
    EpsilonTooLarge(f64),
    #[error("w = {0} is outside [-0.9999, 0.9999]")]
    WOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
