use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("argument {z} is not in the open upper half-plane")]
    LowerHalfPlane { z: Complex64 },

    #[error(
        "quadrature did not reach tolerance {requested:e} (estimated error {estimated:e}) \
         after {intervals} intervals"
    )]
    QuadratureNotConverged {
        requested: f64,
        estimated: f64,
        intervals: usize,
    },

    #[error(
        "grid refinement failed: relative change {change:e} between n={coarse} and n={fine} \
         exceeds {tol:e}"
    )]
    Refinement {
        coarse: usize,
        fine: usize,
        change: f64,
        tol: f64,
    },

    #[error("ill-conditioned coefficient fit: |reference| = {0:e}")]
    IllConditioned(f64),

    #[error("dimensionless point inconsistent with physical parameters: {0}")]
    Inconsistent(String),

    #[error("cross-check `{what}` failed: residual {residual:e} exceeds {tol:e}")]
    CrossCheck {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(z: Complex64, what: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}
