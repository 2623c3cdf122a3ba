//! Transverse electric conductivity and dielectric permittivity of a quantum
//! collisional Maxwellian plasma.

pub mod conductivity;
pub mod degeneracy;
pub mod dispersion;
pub mod error;
pub mod oracle;
pub mod params;
pub mod quad;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use params::{
    Backend, ComplexValue, Constants, DimensionlessPoint, EvalSettings, PhysicalParams,
    SigmaBreakdown,
};
