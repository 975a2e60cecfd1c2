use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("order {order} with argument {argument} is outside the validated envelope")]
    DomainExceeded { order: usize, argument: Complex64 },

    #[error("cylinder function evaluated at a singular argument ({0})")]
    SingularArgument(Complex64),

    #[error("argument {0} lies below the real axis; the outgoing Hankel branch needs Im z >= 0")]
    LowerHalfPlane(Complex64),

    #[error("value of order {order} at {argument} is not representable without scaling")]
    Overflow { order: usize, argument: Complex64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("interface matrix is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("scattering coefficient denominator vanishes (|D| = {magnitude:.3e})")]
    VanishingDenominator { magnitude: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound:.3e}")]
    NonConvergence {
        estimate: Complex64,
        error_bound: f64,
    },

    #[error("pole {pole} is outside the integration window [{lower}, {upper}]")]
    PoleOutsideWindow { pole: f64, lower: f64, upper: f64 },

    #[error("amplitudes violate the norm bound: |c+|^2 + |c-|^2 = {norm}")]
    NormViolation { norm: f64 },

    #[error("state is not of the single-excitation Markovian family: {0}")]
    FamilyMismatch(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical engines, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::IllConditioned { .. }
                | Error::VanishingDenominator { .. }
                | Error::Overflow { .. }
                | Error::InvariantViolation(_)
        )
    }
}
