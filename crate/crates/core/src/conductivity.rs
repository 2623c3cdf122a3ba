//! Transverse conductivity `sigma / sigma_0` in closed form.
//!
//! With `a = z/q` and `b = q/2`:
//!
//! ```text
//! classic    = -i (y/q) t(a)
//! sigma_1    =  i (y/x) lambda_C(a)
//! sigma_2    =  i (y/(2x)) T(a, b)
//! full       =  classic + sigma_1 + sigma_2
//! lindhard   =  i (y/x) + sigma_2
//! difference =  full - lindhard = -(y^2/(x q)) t(a)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{cubic_moment, lambda_c, quantum_kernel, t_fn, t_pole_pair, PolePairArgs};
use crate::error::{finite, Error, Result};
use crate::params::{
    plasma_frequency, static_conductivity, to_dimensionless, DimensionlessPoint, EvalSettings,
    PhysicalParams, SigmaBreakdown,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn pole_pair(pt: &DimensionlessPoint) -> Result<PolePairArgs> {
    PolePairArgs::from_zq(pt.z(), pt.q())
}

/// Classical (`hbar -> 0`) conductivity `-i (y/q) t(z/q)`.
pub fn sigma_classical(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    let t = t_fn(pt.pole(), settings)?;
    finite(-I * (pt.y() / pt.q()) * t, "sigma_classical")
}

/// The two quantum terms `(sigma_1, sigma_2)`.
pub fn sigma_quantum_parts(
    pt: &DimensionlessPoint,
    settings: &EvalSettings,
) -> Result<(Complex64, Complex64)> {
    pt.require_quantum_x()?;
    let pre = I * (pt.y() / pt.x());
    let s1 = pre * lambda_c(pt.pole(), settings)?;
    let s2 = pre * settings.sigma2_coefficient * t_pole_pair(pole_pair(pt)?, settings)?;
    Ok((finite(s1, "sigma_1")?, finite(s2, "sigma_2")?))
}

/// `sigma_1 + sigma_2`, evaluated without the leading-order cancellation
/// between the two terms at small `q`.
pub fn sigma_quantum(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let k = quantum_kernel(pole_pair(pt)?, settings.sigma2_coefficient, settings)?;
    finite(I * (pt.y() / pt.x()) * k, "sigma_quantum")
}

/// All components at one point.
pub fn sigma_full(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<SigmaBreakdown> {
    let classic = sigma_classical(pt, settings)?;
    let (sigma1, sigma2) = sigma_quantum_parts(pt, settings)?;
    let full = finite(classic + sigma_quantum(pt, settings)?, "sigma_full")?;
    let lindhard = lindhard_from(pt, sigma2);
    let difference = sigma_difference(pt, settings)?;
    Ok(SigmaBreakdown {
        classic,
        sigma1,
        sigma2,
        full,
        lindhard,
        difference,
    })
}

/// [`sigma_full`] plus an independent 1-D quadrature of the single reduced
/// integral; fails if the two disagree by more than `settings.tol_rel`.
pub fn sigma_full_verified(
    pt: &DimensionlessPoint,
    settings: &EvalSettings,
) -> Result<(SigmaBreakdown, f64)> {
    let breakdown = sigma_full(pt, settings)?;
    let quad = crate::oracle::sigma_reduced_quadrature(pt, settings)?;
    let residual = (breakdown.full - quad).norm() / quad.norm();
    if residual > settings.tol_rel {
        return Err(Error::CrossCheck {
            what: "closed form vs reduced quadrature",
            residual,
            tol: settings.tol_rel,
        });
    }
    Ok((breakdown, residual))
}

/// Small-`q` approximant: the classical term plus the cubic-moment correction
/// `-i (y/x) (q^2/6) [1/2 + (a^2 - 3/2) lambda_C(a)]`.
pub fn sigma_smallq(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let classic = sigma_classical(pt, settings)?;
    let q = pt.q();
    let m = cubic_moment(pt.pole(), settings)?;
    finite(
        classic - I * (pt.y() / pt.x()) * (q * q / 6.0) * m,
        "sigma_smallq",
    )
}

/// Lindhard conductivity with collisions inserted as `omega -> omega + i nu`.
pub fn sigma_lindhard(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    let (_, s2) = sigma_quantum_parts(pt, settings)?;
    finite(lindhard_from(pt, s2), "sigma_lindhard")
}

fn lindhard_from(pt: &DimensionlessPoint, sigma2: Complex64) -> Complex64 {
    I * (pt.y() / pt.x()) + sigma2
}

/// `sigma_full - sigma_lindhard = -(y^2 / (x q)) t(z/q)`.
pub fn sigma_difference(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let t = t_fn(pt.pole(), settings)?;
    let y = pt.y();
    finite(-(y * y / (pt.x() * pt.q())) * t, "sigma_difference")
}

/// `eps_tr = 1 + (4 pi i / omega) sigma_tr` for the physical parameters `p`.
///
/// `pt` must be the dimensionless image of `p` to 1e-12 relative.
pub fn epsilon_tr(
    pt: &DimensionlessPoint,
    p: &PhysicalParams,
    settings: &EvalSettings,
) -> Result<Complex64> {
    check_consistent(pt, p)?;
    let sigma0 = static_conductivity(p)?;
    let s = sigma_full(pt, settings)?.full;
    finite(1.0 + (4.0 * PI * I / p.omega) * sigma0 * s, "epsilon_tr")
}

/// `eps - 1` for a given normalized conductivity, `(i omega_p^2 tau / omega) sigma/sigma_0`.
pub fn epsilon_from_sigma(p: &PhysicalParams, sigma_over_sigma0: Complex64) -> Result<Complex64> {
    let wp = plasma_frequency(p)?;
    Ok(1.0 + I * wp * wp / (p.omega * p.nu) * sigma_over_sigma0)
}

pub(crate) fn check_consistent(pt: &DimensionlessPoint, p: &PhysicalParams) -> Result<()> {
    let image = to_dimensionless(p)?;
    let close = |u: f64, v: f64| (u - v).abs() <= 1e-12 * v.abs();
    if close(image.x(), pt.x()) && close(image.y(), pt.y()) && close(image.q(), pt.q()) {
        Ok(())
    } else {
        Err(Error::Inconsistent(format!(
            "physical parameters map to ({}, {}, {}), point is ({}, {}, {})",
            image.x(),
            image.y(),
            image.q(),
            pt.x(),
            pt.y(),
            pt.q()
        )))
    }
}

/// `k = 0` conductivity `1 / (1 - i x/y)`.
pub fn k0_limit(x: f64, y: f64) -> Complex64 {
    1.0 / Complex64::new(1.0, -x / y)
}

/// Coefficients `C_0, C_2, ..., C_{2(count-1)}` of the small-`q` expansion
/// `sigma/sigma_0 = sum_k C_{2k} q^{2k}` at fixed `(x, y)`.
///
/// The classical part contributes `i y m_{2k} / z^{2k+1}`; the quantum
/// correction starts at `q^6` with `i y / (8 x z^4)`.
pub fn small_q_coefficients(x: f64, y: f64, count: usize) -> Result<Vec<Complex64>> {
    let pt = DimensionlessPoint::new(x, y, 1.0)?;
    pt.require_quantum_x()?;
    let z = pt.z();
    let max = 2 * count + 2;
    let mut m = vec![0.0; max + 1];
    m[0] = 1.0;
    for k in (2..=max).step_by(2) {
        m[k] = m[k - 2] * (k - 1) as f64 / 2.0;
    }
    let mut out = vec![Complex64::new(0.0, 0.0); count];
    for (k, c) in out.iter_mut().enumerate() {
        *c += I * y * m[2 * k] / z.powu(2 * k as u32 + 1);
    }
    // Quantum kernel: (1/2) sum_{p even >= 4} a^-p sum_{j odd >= 3} C(p-1, j) b^{j-1} m_{p-1-j}
    // with a = z/q, b = q/2, giving q^{p+j-1}.
    let pre = I * (y / x) * 0.5;
    let mut p = 4;
    while p + 2 <= 2 * count {
        let n = p - 1;
        let mut binom = 1.0;
        for j in 1..=n {
            binom *= (n - j + 1) as f64 / j as f64;
            let power = p + j - 1;
            if j % 2 == 1 && j >= 3 && power < 2 * count {
                out[power / 2] +=
                    pre * binom * 0.5f64.powi(j as i32 - 1) * m[n - j] / z.powu(p as u32);
            }
        }
        p += 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Constants;

    fn s() -> EvalSettings {
        EvalSettings::default()
    }

    fn pt(x: f64, y: f64, q: f64) -> DimensionlessPoint {
        DimensionlessPoint::new(x, y, q).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn classical_k0_closed_form() {
        let c = sigma_classical(&pt(0.1, 0.01, 1e-6), &s()).unwrap();
        let expect = Complex64::new(0.009_900_990_099_009_901, 0.099_009_900_990_099_01);
        assert!(rel(c, expect) < 1e-8);
        assert!(rel(c, k0_limit(0.1, 0.01)) < 1e-8);
    }

    #[test]
    fn classical_real_part_positive() {
        assert!(sigma_classical(&pt(1.0, 0.1, 1.0), &s()).unwrap().re > 0.0);
    }

    #[test]
    fn quantum_parts_reject_tiny_x() {
        let p = pt(1e-9, 0.01, 0.5);
        assert!(sigma_quantum_parts(&p, &s()).is_err());
        assert!(sigma_full(&p, &s()).is_err());
        assert!(sigma_classical(&p, &s()).is_ok());
    }

    #[test]
    fn quantum_correction_vanishes_with_q() {
        let mut last = f64::INFINITY;
        for q in [0.3, 0.1, 0.03, 0.01] {
            let (s1, s2) = sigma_quantum_parts(&pt(0.1, 0.01, q), &s()).unwrap();
            let total = (s1 + s2).norm();
            assert!(total < last);
            last = total;
        }
        // Leading behaviour is i y q^6 / (8 x z^4), about 1.2e-10 here.
        assert!(last < 1e-9);
    }

    #[test]
    fn breakdown_additivity_and_difference() {
        for &(x, y, q) in &[
            (0.1, 0.01, 0.5),
            (0.001, 0.01, 0.5),
            (1.0, 0.05, 2.0),
            (3.0, 0.005, 0.01),
        ] {
            let b = sigma_full(&pt(x, y, q), &s()).unwrap();
            assert!(b.additivity_residual() < 1e-12, "{x} {y} {q}");
            assert!(b.difference_residual() < 1e-10, "{x} {y} {q}");
        }
    }

    #[test]
    fn stable_quantum_sum_matches_parts_where_no_cancellation() {
        let p = pt(0.1, 0.01, 0.5);
        let (s1, s2) = sigma_quantum_parts(&p, &s()).unwrap();
        let q = sigma_quantum(&p, &s()).unwrap();
        assert!(rel(q, s1 + s2) < 1e-13);
    }

    #[test]
    fn smallq_reduces_to_classical() {
        let mut last = f64::INFINITY;
        for q in [0.2, 0.05, 0.01, 1e-3] {
            let p = pt(0.1, 0.01, q);
            let d = (sigma_smallq(&p, &s()).unwrap() - sigma_classical(&p, &s()).unwrap()).norm();
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn lindhard_does_not_reduce_to_classical() {
        let p = pt(0.1, 0.01, 1e-4);
        let l = sigma_lindhard(&p, &s()).unwrap();
        let classical = k0_limit(0.1, 0.01);
        // i y/x against i y/z: off by y/x.
        assert!((rel(l, classical) - 0.1).abs() < 1e-4);
        // i y/x plus a pole-pair term that tends to i (y/(2x)) T with T ~ q^2/z^2 -> 0.
        assert!((l - Complex64::new(0.0, 0.1)).norm() < 1e-6);
    }

    #[test]
    fn difference_decays_with_q() {
        let mut last = f64::INFINITY;
        for q in [2.0, 4.0, 8.0, 16.0] {
            let d = sigma_difference(&pt(0.1, 0.01, q), &s()).unwrap().norm();
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn mirrored_x_conjugates() {
        let p = pt(0.37, 0.02, 0.8);
        let a = sigma_full(&p, &s()).unwrap();
        let b = sigma_full(&p.mirrored(), &s()).unwrap();
        assert!(rel(b.full, a.full.conj()) < 1e-12);
        assert!(rel(b.classic, a.classic.conj()) < 1e-12);
        assert!(rel(b.lindhard, a.lindhard.conj()) < 1e-12);
    }

    #[test]
    fn small_q_series_matches_full() {
        let (x, y) = (1.0, 0.1);
        let c = small_q_coefficients(x, y, 5).unwrap();
        assert!(rel(c[0], k0_limit(x, y)) < 1e-15);
        let z = Complex64::new(x, y);
        assert!(
            rel(
                c[3],
                I * y * 1.875 / z.powu(7) + I * y / (8.0 * x * z.powu(4))
            ) < 1e-14
        );
        let q: f64 = 0.02;
        let series: Complex64 = c
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * q.powi(2 * k as i32))
            .sum();
        let full = sigma_full(&pt(x, y, q), &s()).unwrap().full;
        assert!(rel(series, full) < 1e-14);
        // The quantum q^6 coefficient on its own.
        let q: f64 = 0.01;
        let quantum = sigma_quantum(&pt(x, y, q), &s()).unwrap();
        let lead = I * y / (8.0 * x * z.powu(4)) * q.powi(6);
        assert!(rel(quantum, lead) < 1e-3);
    }

    #[test]
    fn epsilon_vacuum_and_scaling() {
        let p =
            PhysicalParams::from_dimensionless(&pt(0.1, 0.01, 0.5), 1e4, 1e22, Constants::CODATA)
                .unwrap();
        assert_eq!(
            epsilon_from_sigma(&p, Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );

        let p_pt = to_dimensionless(&p).unwrap();
        let e1 = epsilon_tr(&p_pt, &p, &s()).unwrap() - 1.0;
        let p2 = PhysicalParams {
            density_n0: 3e22,
            ..p
        };
        let e2 = epsilon_tr(&p_pt, &p2, &s()).unwrap() - 1.0;
        // eps - 1 is proportional to omega_p^2, i.e. to N_0.
        assert!(rel(e2, 3.0 * e1) < 1e-13);
        let direct = epsilon_from_sigma(&p, sigma_full(&p_pt, &s()).unwrap().full).unwrap() - 1.0;
        assert!(rel(e1, direct) < 1e-13);
    }

    #[test]
    fn epsilon_rejects_inconsistent_point() {
        let p =
            PhysicalParams::from_dimensionless(&pt(0.1, 0.01, 0.5), 1e4, 1e22, Constants::CODATA)
                .unwrap();
        let err = epsilon_tr(&pt(0.2, 0.01, 0.5), &p, &s()).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)));
    }
}
