use thiserror::Error;

/// Errors raised by the wave-construction and stability routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("roots of a = phi(c - phi)^2 coalesce near a = {a} (c = {c})")]
    DegenerateRoots { a: f64, c: f64 },

    #[error("a = {a} is outside (0, 4c^3/27) for c = {c}")]
    OutsideCubicRange { a: f64, c: f64 },

    #[error("(a, b, c) = ({a}, {b}, {c}) is not inside the existence region")]
    NotInRegion { a: f64, b: f64, c: f64 },

    #[error("potential U has a pole at phi = c")]
    Pole,

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("root finding failed: {0}")]
    RootFailure(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("finite-difference derivative failed: {0}")]
    DerivativeFailure(String),

    #[error("fixed-period family is singular in b (|d_a L| = {0:e})")]
    SingularFamily(f64),

    #[error("profile is under-resolved on the collocation grid (trailing Fourier ratio {0:e})")]
    Resolution(f64),

    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by the caller's arguments rather than by a
    /// numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::DegenerateRoots { .. }
                | Error::OutsideCubicRange { .. }
                | Error::NotInRegion { .. }
                | Error::Pole
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
