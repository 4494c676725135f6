use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the forward or inverse pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("evaluation at a pole of P (x = {x})")]
    PoleAt { x: Complex64 },

    #[error("base potential fails the residual test: {0}")]
    ResidualTest(String),

    #[error("Wronskian depends on x: {at_a} at x = {a} vs {at_b} at x = {b}")]
    XDependence {
        a: f64,
        b: f64,
        at_a: Complex64,
        at_b: Complex64,
    },

    #[error("declared contact order {declared} does not match the perturbation ({detail})")]
    ContactOrderMismatch { declared: usize, detail: String },

    #[error("Neumann series did not reach tolerance within {terms} terms (tail bound {tail_bound:e})")]
    NonConvergence { terms: usize, tail_bound: f64 },

    #[error("ODE step too large: |z| h = {product} exceeds 0.1")]
    StepTooLarge { product: f64 },

    #[error("denominator vanishes near z = {z} (distance {distance:e} to a zero)")]
    NearZeroDenominator { z: Complex64, distance: f64 },

    #[error("contour passes through a zero near {near}")]
    ContourThroughZero { near: Complex64 },

    #[error("winding number is not an integer (raw {raw})")]
    NonIntegerWinding { raw: f64 },

    #[error("subdivision depth exceeded for box [{re_min}, {re_max}] x [{im_min}, {im_max}]")]
    MaxDepth {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
    },

    #[error("perturbation has vanishing derivative of order {order} at R")]
    ZeroContactDerivative { order: usize },

    #[error("zero set contains the origin")]
    ZeroAtOrigin,

    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),

    #[error("reconstructed psi(-z_j, 0) vanishes for zero index {index}")]
    PsiMinusZeroVanishes { index: usize },

    #[error("zero z = {z} collides with a zero of W")]
    WZeroCollision { z: Complex64 },

    #[error("evaluation at a pole z = {z}")]
    EvaluationAtPole { z: Complex64 },

    #[error("insufficient zeros: {0}")]
    InsufficientZeros(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by invalid user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::ResidualTest(_)
                | Error::ContactOrderMismatch { .. }
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
