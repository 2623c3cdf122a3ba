//! Physical and dimensionless plasma parameters.
//!
//! Everything is in Gaussian (CGS) units: charge in statcoulomb, mass in
//! grams, lengths in centimetres, energies in erg. The dielectric function
//! is then `eps = 1 + 4 pi i sigma / omega`.
//!
//! All formulas are evaluated at a [`DimensionlessPoint`] `(x, y, q)` with
//! `x = omega / (k_T v_T)`, `y = nu / (k_T v_T)`, `q = k / k_T` and the
//! complex frequency `z = x + i y`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for conductivities and dispersion-function values.
pub type ComplexValue = Complex64;

/// Fundamental constants in CGS units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Elementary charge [statC].
    pub e: f64,
    /// Electron mass [g].
    pub m: f64,
    /// Reduced Planck constant [erg s].
    pub hbar: f64,
    /// Boltzmann constant [erg/K].
    pub k_b: f64,
    /// Speed of light [cm/s].
    pub c: f64,
}

impl Constants {
    /// CODATA 2018 values.
    pub const CODATA: Constants = Constants {
        e: 4.803_204_712_570_263e-10,
        m: 9.109_383_701_5e-28,
        hbar: 1.054_571_817e-27,
        k_b: 1.380_649e-16,
        c: 2.997_924_58e10,
    };
}

impl Default for Constants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Dimensional plasma inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Field angular frequency [rad/s].
    pub omega: f64,
    /// Effective collision frequency [1/s].
    pub nu: f64,
    /// Wavenumber [1/cm].
    pub k: f64,
    /// Temperature [K].
    pub temperature: f64,
    /// Electron number density [1/cm^3].
    pub density_n0: f64,
    pub constants: Constants,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        positive("omega", self.omega)?;
        positive("nu", self.nu)?;
        positive("temperature", self.temperature)?;
        positive("density_n0", self.density_n0)?;
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                value: self.k,
                reason: "must be finite and non-negative",
            });
        }
        let c = &self.constants;
        positive("e", c.e)?;
        positive("m", c.m)?;
        positive("hbar", c.hbar)?;
        positive("k_b", c.k_b)?;
        positive("c", c.c)?;
        Ok(())
    }

    /// `v_T = sqrt(2 k_B T / m)`.
    pub fn thermal_velocity(&self) -> f64 {
        (2.0 * self.constants.k_b * self.temperature / self.constants.m).sqrt()
    }

    /// `p_T = m v_T`.
    pub fn thermal_momentum(&self) -> f64 {
        self.constants.m * self.thermal_velocity()
    }

    /// `k_T = m v_T / hbar`.
    pub fn thermal_wavenumber(&self) -> f64 {
        self.thermal_momentum() / self.constants.hbar
    }

    /// `tau = 1 / nu`.
    pub fn relaxation_time(&self) -> f64 {
        1.0 / self.nu
    }

    /// `l = v_T tau`.
    pub fn mean_free_path(&self) -> f64 {
        self.thermal_velocity() * self.relaxation_time()
    }

    /// `E_T = m v_T^2 / 2`.
    pub fn thermal_energy(&self) -> f64 {
        let v = self.thermal_velocity();
        0.5 * self.constants.m * v * v
    }

    /// Reconstructs physical frequencies and wavenumber from a dimensionless
    /// point, keeping temperature, density and constants.
    pub fn from_dimensionless(
        pt: &DimensionlessPoint,
        temperature: f64,
        density_n0: f64,
        constants: Constants,
    ) -> Result<Self> {
        let mut p = PhysicalParams {
            omega: 1.0,
            nu: 1.0,
            k: 0.0,
            temperature,
            density_n0,
            constants,
        };
        p.validate()?;
        let k_t = p.thermal_wavenumber();
        let scale = k_t * p.thermal_velocity();
        p.omega = pt.x * scale;
        p.nu = pt.y * scale;
        p.k = pt.q * k_t;
        p.validate()?;
        Ok(p)
    }
}

/// Maps physical inputs to `(x, y, q)`.
pub fn to_dimensionless(p: &PhysicalParams) -> Result<DimensionlessPoint> {
    p.validate()?;
    let k_t = p.thermal_wavenumber();
    let scale = k_t * p.thermal_velocity();
    if p.k == 0.0 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: p.k,
            reason: "k = 0 has no dimensionless point; use the k = 0 limit",
        });
    }
    DimensionlessPoint::new(p.omega / scale, p.nu / scale, p.k / k_t)
}

/// Static conductivity `sigma_0 = e^2 N_0 / (m nu)` [1/s in CGS].
pub fn static_conductivity(p: &PhysicalParams) -> Result<f64> {
    positive("nu", p.nu)?;
    positive("density_n0", p.density_n0)?;
    let c = &p.constants;
    Ok(c.e * c.e * p.density_n0 / (c.m * p.nu))
}

/// Plasma frequency `omega_p = sqrt(4 pi e^2 N_0 / m)`.
pub fn plasma_frequency(p: &PhysicalParams) -> Result<f64> {
    positive("density_n0", p.density_n0)?;
    let c = &p.constants;
    Ok((4.0 * PI * c.e * c.e * p.density_n0 / c.m).sqrt())
}

/// Smallest `|x|` accepted by the quantum terms, which carry a `1/x` prefactor.
pub const MIN_ABS_X: f64 = 1e-8;

/// The evaluation coordinate `(x, y, q)`.
///
/// `y > 0` and `q > 0` always hold. `x` may be negative (used for the
/// reality symmetry `sigma(-x) = conj(sigma(x))`) but never zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessPoint {
    x: f64,
    y: f64,
    q: f64,
}

impl DimensionlessPoint {
    pub fn new(x: f64, y: f64, q: f64) -> Result<Self> {
        if !x.is_finite() || x == 0.0 {
            return Err(Error::InvalidParameter {
                name: "x",
                value: x,
                reason: "must be finite and non-zero",
            });
        }
        positive("y", y)?;
        positive("q", q)?;
        Ok(Self { x, y, q })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `z = x + i y`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// `omega tau = x / y`.
    pub fn omega_tau(&self) -> f64 {
        self.x / self.y
    }

    /// `l k = q / y`.
    pub fn lk(&self) -> f64 {
        self.q / self.y
    }

    /// Pole of the reduced integrals, `z / q`.
    pub fn pole(&self) -> Complex64 {
        self.z() / self.q
    }

    /// Same point with `x -> -x`.
    pub fn mirrored(&self) -> Self {
        Self {
            x: -self.x,
            ..*self
        }
    }

    /// Same point with a different `q`.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.x, self.y, q)
    }

    pub(crate) fn require_quantum_x(&self) -> Result<()> {
        if self.x.abs() < MIN_ABS_X {
            Err(Error::InvalidParameter {
                name: "x",
                value: self.x,
                reason: "quantum terms diverge like 1/x; |x| must be at least 1e-8",
            })
        } else {
            Ok(())
        }
    }
}

/// How the dispersion functions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Adaptive Gauss-Kronrod integration of the defining integrals.
    Quadrature,
    /// Rational approximation and continued fraction for the Faddeeva function.
    #[default]
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    /// Relative tolerance for quadrature and cross-checks.
    pub tol_rel: f64,
    /// Fixed truncation radius for 1-D quadrature; `None` picks
    /// `max(8, |Re a| + 8 (1 + b))` per integral.
    pub truncation_radius: Option<f64>,
    pub backend: Backend,
    /// Nodes per axis of the 3-D tensor grids.
    pub grid_n_3d: usize,
    /// Prefactor `c` of the pole-pair term `sigma_2 = c i (y/x) T(z, q)`.
    /// The correct value is 0.5; other values exist for mutation testing.
    pub sigma2_coefficient: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            tol_rel: 1e-10,
            truncation_radius: None,
            backend: Backend::Rational,
            grid_n_3d: 96,
            sigma2_coefficient: 0.5,
        }
    }
}

impl EvalSettings {
    pub fn validate(&self) -> Result<()> {
        positive("tol_rel", self.tol_rel)?;
        if let Some(r) = self.truncation_radius {
            positive("truncation_radius", r)?;
        }
        if self.grid_n_3d < 16 {
            return Err(Error::InvalidParameter {
                name: "grid_n_3d",
                value: self.grid_n_3d as f64,
                reason: "must be at least 16",
            });
        }
        if !self.sigma2_coefficient.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sigma2_coefficient",
                value: self.sigma2_coefficient,
                reason: "must be finite",
            });
        }
        Ok(())
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid_n_3d = n;
        self
    }

    /// Truncation radius for a Gaussian integral with poles near `a +- b`.
    pub fn radius_for(&self, a: Complex64, b: f64) -> f64 {
        self.truncation_radius
            .unwrap_or_else(|| 8.0f64.max(a.re.abs() + 8.0 * (1.0 + b.abs())))
    }
}

/// Conductivity components in units of `sigma_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaBreakdown {
    pub classic: ComplexValue,
    pub sigma1: ComplexValue,
    pub sigma2: ComplexValue,
    pub full: ComplexValue,
    pub lindhard: ComplexValue,
    pub difference: ComplexValue,
}

impl SigmaBreakdown {
    /// `|full - (classic + sigma1 + sigma2)| / |full|`.
    pub fn additivity_residual(&self) -> f64 {
        (self.full - (self.classic + self.sigma1 + self.sigma2)).norm() / self.full.norm()
    }

    /// `|difference - (full - lindhard)| / |difference|`.
    pub fn difference_residual(&self) -> f64 {
        (self.difference - (self.full - self.lindhard)).norm() / self.difference.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_constants() -> Constants {
        Constants {
            e: 1.0,
            m: 1.0,
            hbar: 1.0,
            k_b: 1.0,
            c: 1.0,
        }
    }

    fn unit_params() -> PhysicalParams {
        PhysicalParams {
            omega: 1.0,
            nu: 1.0,
            k: 1.0,
            temperature: 0.5,
            density_n0: 1.0,
            constants: unit_constants(),
        }
    }

    #[test]
    fn identity_ratios() {
        // k_B T = 1/2, m = 1: v_T = 1, k_T = 1, k_T v_T = 1.
        let p = unit_params();
        assert_eq!(p.thermal_velocity(), 1.0);
        assert_eq!(p.thermal_wavenumber(), 1.0);
        let pt = to_dimensionless(&p).unwrap();
        assert_eq!((pt.x(), pt.y(), pt.q()), (1.0, 1.0, 1.0));
    }

    #[test]
    fn figure_five_point() {
        let mut p = PhysicalParams {
            constants: Constants::CODATA,
            temperature: 1e4,
            density_n0: 1e22,
            ..unit_params()
        };
        let k_t = p.thermal_wavenumber();
        let s = k_t * p.thermal_velocity();
        p.omega = 0.1 * s;
        p.nu = 0.01 * s;
        p.k = 0.5 * k_t;
        let pt = to_dimensionless(&p).unwrap();
        assert!((pt.x() - 0.1).abs() < 1e-15);
        assert!((pt.y() - 0.01).abs() < 1e-16);
        assert!((pt.q() - 0.5).abs() < 1e-15);
        assert!((pt.omega_tau() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn omega_tau_from_definitions() {
        let pt = DimensionlessPoint::new(0.1, 0.01, 0.5).unwrap();
        assert!((pt.omega_tau() - 10.0).abs() < 1e-14);
        assert!((pt.lk() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_physical_inputs() {
        for f in [
            |p: &mut PhysicalParams| p.omega = 0.0,
            |p: &mut PhysicalParams| p.nu = -1.0,
            |p: &mut PhysicalParams| p.temperature = 0.0,
            |p: &mut PhysicalParams| p.density_n0 = f64::NAN,
        ] {
            let mut p = unit_params();
            f(&mut p);
            assert!(to_dimensionless(&p).is_err());
        }
        let mut p = unit_params();
        p.k = 0.0;
        assert!(to_dimensionless(&p).is_err());
    }

    #[test]
    fn rejects_bad_points() {
        assert!(DimensionlessPoint::new(0.0, 0.01, 0.5).is_err());
        assert!(DimensionlessPoint::new(0.1, 0.0, 0.5).is_err());
        assert!(DimensionlessPoint::new(0.1, 0.01, 0.0).is_err());
        assert!(DimensionlessPoint::new(-0.1, 0.01, 0.5).is_ok());
    }

    #[test]
    fn static_conductivity_unit_and_linear() {
        let p = unit_params();
        assert_eq!(static_conductivity(&p).unwrap(), 1.0);
        let p2 = PhysicalParams {
            density_n0: 2.0,
            ..p
        };
        assert_eq!(static_conductivity(&p2).unwrap(), 2.0);
        let p0 = PhysicalParams { nu: 0.0, ..p };
        assert!(static_conductivity(&p0).is_err());
    }

    #[test]
    fn static_conductivity_codata() {
        let p = PhysicalParams {
            omega: 1e15,
            nu: 1e13,
            k: 1e7,
            temperature: 1e4,
            density_n0: 1e22,
            constants: Constants::CODATA,
        };
        // e^2 = 2.307077...e-19, / m = 2.53264...e8, * 1e22 / 1e13.
        let e2 = 4.803_204_712_570_263e-10f64.powi(2);
        let expected = e2 / 9.109_383_701_5e-28 * 1e9;
        let got = static_conductivity(&p).unwrap();
        assert!((got - expected).abs() / expected < 1e-14);
        assert!((got - 2.532_638_9e17).abs() / got < 1e-6);
    }

    #[test]
    fn plasma_frequency_cases() {
        let p = PhysicalParams {
            density_n0: 1.0 / (4.0 * PI),
            ..unit_params()
        };
        assert!((plasma_frequency(&p).unwrap() - 1.0).abs() < 1e-15);
        let p4 = PhysicalParams {
            density_n0: 4.0 / (4.0 * PI),
            ..p
        };
        assert!((plasma_frequency(&p4).unwrap() - 2.0).abs() < 1e-15);

        let codata = PhysicalParams {
            density_n0: 1e22,
            constants: Constants::CODATA,
            ..unit_params()
        };
        // 5.64146e4 * sqrt(n) rad/s is the textbook value.
        let wp = plasma_frequency(&codata).unwrap();
        assert!((wp - 5.641_460e4 * 1e11).abs() / wp < 1e-5);
    }

    #[test]
    fn round_trip_through_physical() {
        let pt = DimensionlessPoint::new(0.37, 0.021, 1.7).unwrap();
        let p = PhysicalParams::from_dimensionless(&pt, 3e4, 1e21, Constants::CODATA).unwrap();
        let back = to_dimensionless(&p).unwrap();
        assert!((back.x() - pt.x()).abs() / pt.x() < 1e-14);
        assert!((back.y() - pt.y()).abs() / pt.y() < 1e-14);
        assert!((back.q() - pt.q()).abs() / pt.q() < 1e-14);
    }

    #[test]
    fn settings_validation() {
        assert!(EvalSettings::default().validate().is_ok());
        assert!(EvalSettings::default().with_grid(8).validate().is_err());
        let s = EvalSettings {
            tol_rel: 0.0,
            ..Default::default()
        };
        assert!(s.validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scale_invariance(scale in 0.1f64..10.0, x in 0.01f64..10.0, y in 0.001f64..1.0) {
                // Multiplying omega, nu and k_T v_T by the same factor leaves (x, y) fixed.
                let base = PhysicalParams { temperature: 1e4, density_n0: 1e21, constants: Constants::CODATA, ..unit_params() };
                let kt = base.thermal_wavenumber();
                let s = kt * base.thermal_velocity();
                let p1 = PhysicalParams { omega: x * s, nu: y * s, k: 0.5 * kt, ..base };
                // k_T v_T scales with T (v_T^2 ~ T, k_T ~ v_T).
                let p2 = PhysicalParams { omega: x * s * scale, nu: y * s * scale, temperature: base.temperature * scale, k: 0.5 * kt * scale.sqrt(), ..base };
                let a = to_dimensionless(&p1).unwrap();
                let b = to_dimensionless(&p2).unwrap();
                prop_assert!((a.x() - b.x()).abs() <= 1e-13 * a.x());
                prop_assert!((a.y() - b.y()).abs() <= 1e-13 * a.y());
                prop_assert!((a.q() - b.q()).abs() <= 1e-13 * a.q());
            }

            #[test]
            fn round_trip(x in 1e-3f64..30.0, y in 1e-3f64..1.0, q in 1e-3f64..20.0, t in 1e2f64..1e7) {
                let pt = DimensionlessPoint::new(x, y, q).unwrap();
                let p = PhysicalParams::from_dimensionless(&pt, t, 1e20, Constants::CODATA).unwrap();
                let back = to_dimensionless(&p).unwrap();
                prop_assert!((back.x() - x).abs() <= 1e-14 * x);
                prop_assert!((back.y() - y).abs() <= 1e-14 * y);
                prop_assert!((back.q() - q).abs() <= 1e-14 * q);
            }
        }
    }
}
