use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole at s = {0}")]
    Pole(Complex64),
    #[error("evaluation budget exceeded at s = {0}")]
    BudgetExceeded(Complex64),
    #[error("character is not primitive")]
    NonPrimitiveCharacter,
    #[error("modulus {0} out of range")]
    ModulusOutOfRange(u64),
    #[error("character index {index} out of range for modulus {modulus}")]
    IndexOutOfRange { modulus: u64, index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero of h on the axis near tau = {0}")]
    LineZeroEncountered(f64),
    #[error("step size underflow near tau = {0}")]
    StepUnderflow(f64),
    #[error("contour passes too close to a zero or pole near {0}")]
    BoundaryTooClose(Complex64),
    #[error("no sign change in bracket [{0}, {1}]")]
    NoSignChange(f64, f64),
    #[error("Newton iteration left its box near {0}")]
    NewtonEscaped(Complex64),
    #[error("subdivision depth cap reached near {0}")]
    DepthCap(Complex64),
    #[error("ratio F undefined at s = {0}")]
    DivisionByNearZero(Complex64),
    #[error("no abscissa with envelope below one up to sigma = {0}")]
    EnvelopeUnavailable(f64),
    #[error("inventory inconsistent: {0}")]
    InconsistentInventory(String),
    #[error("degree {0} exceeds the cap")]
    DegreeTooLarge(usize),
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
