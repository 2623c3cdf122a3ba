//! Independent evaluations used to cross-check the closed forms.
//!
//! The 1-D oracles integrate the reduced single integrals directly with the
//! adaptive Gauss-Kronrod integrator. The 3-D oracles integrate the
//! unreduced momentum-space integrals on a tensor grid: Gauss-Hermite in the
//! two transverse directions, and a composite Gauss-Legendre rule graded
//! around the pole in the direction of `k`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{gaussian_cauchy, t_pole_pair, PolePairArgs};
use crate::error::{finite, Error, Result};
use crate::params::{plasma_frequency, DimensionlessPoint, EvalSettings, PhysicalParams};
use crate::quad::{gauss_hermite, graded_rule, pairwise_sum, Rule};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Widest panel of the longitudinal rule.
const MAX_PANEL: f64 = 0.5;

fn pi_32() -> f64 {
    PI * PI.sqrt()
}

// ---------------------------------------------------------------------------
// 1-D oracles

/// The denominator `1 - i omega tau + i l k mu` in dimensionless form.
fn collision_denominator(pt: &DimensionlessPoint, mu: f64) -> Complex64 {
    Complex64::new(1.0, pt.lk() * mu - pt.omega_tau())
}

fn reduced<F>(pt: &DimensionlessPoint, settings: &EvalSettings, f: F) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
{
    let a = pt.pole();
    gaussian_cauchy(
        |mu| f(mu) / collision_denominator(pt, mu),
        &[a],
        a,
        0.5 * pt.q(),
        settings,
    )
}

/// Classical conductivity by quadrature of
/// `pi^{-1/2} int exp(-mu^2) / (1 - i omega tau + i l k mu) dmu`.
pub fn sigma_classical_quadrature(
    pt: &DimensionlessPoint,
    settings: &EvalSettings,
) -> Result<Complex64> {
    reduced(pt, settings, |mu| (-mu * mu).exp())
}

/// Drift term `-(q/x) mu exp(-mu^2)` integrated against the collision denominator.
pub fn sigma1_quadrature(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let r = pt.q() / pt.x();
    reduced(pt, settings, |mu| -r * mu * (-mu * mu).exp())
}

/// Pole-pair term through the sinh kernel
/// `(e^{-q^2/4} / (2x)) (e^{q mu} - e^{-q mu}) exp(-mu^2)`, evaluated as the
/// difference of shifted Gaussians so large `q mu` cannot overflow.
pub fn sigma2_sinh_quadrature(
    pt: &DimensionlessPoint,
    settings: &EvalSettings,
) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let b = 0.5 * pt.q();
    let pre = 1.0 / (2.0 * pt.x());
    reduced(pt, settings, |mu| pre * shifted_gaussians(mu, b))
}

/// Full conductivity from the single reduced integral
/// `-(i y / q) pi^{-1/2} int [1 - (q/x) t + e^{-q^2/4} (e^{qt} - e^{-qt}) / (2x)] e^{-t^2} / (t - z/q) dt`.
pub fn sigma_reduced_quadrature(
    pt: &DimensionlessPoint,
    settings: &EvalSettings,
) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let (x, y, q) = (pt.x(), pt.y(), pt.q());
    let a = pt.pole();
    let v = gaussian_cauchy(
        |t| {
            let gauss = (1.0 - (q / x) * t) * (-t * t).exp();
            (gauss + shifted_gaussians(t, 0.5 * q) / (2.0 * x)) / (t - a)
        },
        &[a],
        a,
        0.5 * q,
        settings,
    )?;
    finite(-I * (y / q) * v, "reduced quadrature")
}

/// `pi^{-1/2} int t (t^2 - 3/2) exp(-t^2) / (t - a) dt`.
pub fn cubic_moment_quadrature(a: Complex64, settings: &EvalSettings) -> Result<Complex64> {
    if a.im.is_nan() || a.im <= 0.0 {
        return Err(Error::LowerHalfPlane { z: a });
    }
    gaussian_cauchy(
        |t| Complex64::new(t * (t * t - 1.5) * (-t * t).exp(), 0.0) / (t - a),
        &[a],
        a,
        0.0,
        settings,
    )
}

// ---------------------------------------------------------------------------
// 3-D oracles

/// Tensor grid over `[-L, L]^3`, `L = 8 + q/2`.
///
/// The transverse Gauss-Hermite weights already contain `exp(-P_perp^2)`,
/// so integrands passed to [`Grid3::integrate`] omit that factor.
struct Grid3 {
    longitudinal: Rule,
    transverse: Vec<(f64, f64)>,
}

impl Grid3 {
    fn new(pt: &DimensionlessPoint, n: usize) -> Self {
        let l = 8.0 + 0.5 * pt.q();
        let a = pt.pole();
        let longitudinal = graded_rule(-l, l, a.re, a.im, MAX_PANEL, (n / 8).max(2));
        let gh = gauss_hermite(n);
        let mut transverse = Vec::with_capacity(n * n);
        for (py, wy) in gh.iter() {
            for (pz, wz) in gh.iter() {
                transverse.push((py * py + pz * pz, wy * wz));
            }
        }
        Self {
            longitudinal,
            transverse,
        }
    }

    /// `sum w f(P_n, P_perp^2) P_perp^2` over the grid.
    fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let rows: Vec<Complex64> = self
            .longitudinal
            .nodes
            .par_iter()
            .zip(self.longitudinal.weights.par_iter())
            .map(|(&pn, &wn)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(perp_sq, w) in &self.transverse {
                    acc += w * perp_sq * f(pn, perp_sq);
                }
                wn * acc
            })
            .collect();
        pairwise_sum(&rows)
    }
}

fn check_grid(settings: &EvalSettings) -> Result<usize> {
    settings.validate()?;
    Ok(settings.grid_n_3d)
}

/// Evaluates `eval(n)` and `eval(2n)`; fails if they differ by more than `tol` relative.
pub fn refined<F>(n: usize, tol: f64, eval: F) -> Result<Complex64>
where
    F: Fn(usize) -> Result<Complex64>,
{
    let coarse = eval(n)?;
    let fine = eval(2 * n)?;
    let change = (fine - coarse).norm() / fine.norm();
    if change > tol {
        return Err(Error::Refinement {
            coarse: n,
            fine: 2 * n,
            change,
            tol,
        });
    }
    Ok(fine)
}

fn shifted_gaussians(pn: f64, b: f64) -> f64 {
    (-(pn - b) * (pn - b)).exp() - (-(pn + b) * (pn + b)).exp()
}

fn sigma_3d_on(pt: &DimensionlessPoint, n: usize) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let (x, q) = (pt.x(), pt.q());
    let b = 0.5 * q;
    let v = Grid3::new(pt, n).integrate(|pn, _| {
        let num = (1.0 - (q / x) * pn) * (-pn * pn).exp() + shifted_gaussians(pn, b) / (2.0 * x);
        num / collision_denominator(pt, pn)
    });
    finite(v / pi_32(), "sigma_3d_bruteforce")
}

/// Conductivity from the unreduced 3-D momentum integral on a grid with
/// `settings.grid_n_3d` points per direction.
pub fn sigma_3d_bruteforce(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    sigma_3d_on(pt, check_grid(settings)?)
}

/// [`sigma_3d_bruteforce`] evaluated at `n` and `2n`; fails if the change exceeds `tol`.
pub fn sigma_3d_checked(
    pt: &DimensionlessPoint,
    settings: &EvalSettings,
    tol: f64,
) -> Result<Complex64> {
    refined(check_grid(settings)?, tol, |n| sigma_3d_on(pt, n))
}

fn quantum_3d_on(pt: &DimensionlessPoint, n: usize) -> Result<Complex64> {
    pt.require_quantum_x()?;
    let b = 0.5 * pt.q();
    let pre = 1.0 / (2.0 * pt.x());
    let v = Grid3::new(pt, n)
        .integrate(|pn, _| pre * shifted_gaussians(pn, b) / collision_denominator(pt, pn));
    finite(v / pi_32(), "quantum_term_3d")
}

/// The pole-pair (shifted Gaussian) term of the 3-D integral on its own.
pub fn quantum_term_3d(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
    quantum_3d_on(pt, check_grid(settings)?)
}

/// `(1/pi^{3/2}) sum w exp(-P^2) P_perp^2` on the grid; should be 1.
pub fn transverse_weight_norm(pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<f64> {
    let n = check_grid(settings)?;
    let v = Grid3::new(pt, n).integrate(|pn, _| Complex64::new((-pn * pn).exp(), 0.0));
    Ok(v.re / pi_32())
}

/// `eps_tr` from its own momentum integral
/// `1 + (i w_p^2 / (w^2 pi^{3/2})) int [(w tau - k_1 P) e^{-P^2} + (1/(2y)) (e^{-P_+^2} - e^{-P_-^2})] P_perp^2 / D`.
pub fn epsilon_3d_bruteforce(
    pt: &DimensionlessPoint,
    p: &PhysicalParams,
    settings: &EvalSettings,
) -> Result<Complex64> {
    crate::conductivity::check_consistent(pt, p)?;
    let n = check_grid(settings)?;
    let wp = plasma_frequency(p)?;
    let (y, q) = (pt.y(), pt.q());
    let (wt, lk) = (pt.omega_tau(), pt.lk());
    let b = 0.5 * q;
    let v = Grid3::new(pt, n).integrate(|pn, _| {
        let num = (wt - lk * pn) * (-pn * pn).exp() + shifted_gaussians(pn, b) / (2.0 * y);
        num / collision_denominator(pt, pn)
    });
    finite(
        1.0 + I * wp * wp / (p.omega * p.omega * pi_32()) * v,
        "epsilon_3d_bruteforce",
    )
}

/// Least-squares fit of the pole-pair prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientFit {
    pub x: f64,
    pub y: f64,
    pub q: f64,
    pub grid_n_3d: usize,
    /// Fitted `c` in `quantum_term_3d ~ c * i (y/x) T(z, q)`.
    pub coefficient: f64,
    /// `|Q - c B| / |Q|` at the fitted `c`.
    pub residual: f64,
    /// `|Q - B| / |Q|`: the misfit of the `c = 1` reading.
    pub unit_misfit: f64,
}

impl fmt::Display for CoefficientFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sigma2 coefficient at (x={}, y={}, q={}), grid {}: c = {:.10}, fit residual {:.3e}, c=1 misfit {:.3e}",
            self.x, self.y, self.q, self.grid_n_3d, self.coefficient, self.residual, self.unit_misfit
        )
    }
}

/// Fits the real `c` minimizing `|quantum_term_3d - c i (y/x) T(z, q)|`.
pub fn resolve_sigma2_coefficient(
    pt: &DimensionlessPoint,
    settings: &EvalSettings,
) -> Result<CoefficientFit> {
    if pt.q() < 0.3 {
        return Err(Error::InvalidParameter {
            name: "q",
            value: pt.q(),
            reason: "coefficient fit needs q >= 0.3",
        });
    }
    pt.require_quantum_x()?;
    let t = t_pole_pair(PolePairArgs::from_zq(pt.z(), pt.q())?, settings)?;
    if t.norm() < 1e-12 {
        return Err(Error::IllConditioned(t.norm()));
    }
    let reference = I * (pt.y() / pt.x()) * t;
    let quantum = quantum_term_3d(pt, settings)?;
    let coefficient = (reference.conj() * quantum).re / reference.norm_sqr();
    Ok(CoefficientFit {
        x: pt.x(),
        y: pt.y(),
        q: pt.q(),
        grid_n_3d: settings.grid_n_3d,
        coefficient,
        residual: (quantum - coefficient * reference).norm() / quantum.norm(),
        unit_misfit: (quantum - reference).norm() / quantum.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{cubic_moment, lambda_c};

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
    fn transverse_weights_normalized() {
        let v = transverse_weight_norm(&pt(0.1, 0.01, 0.5), &s()).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn three_d_matches_k0_form() {
        let p = pt(0.1, 0.01, 1e-6);
        let v = sigma_3d_bruteforce(&p, &s()).unwrap();
        assert!(rel(v, 1.0 / Complex64::new(1.0, -10.0)) < 1e-4);
    }

    #[test]
    fn quantum_term_vanishes_with_q() {
        let v = quantum_term_3d(&pt(0.1, 0.01, 1e-6), &s()).unwrap();
        assert!(v.norm() < 1e-5, "{v}");
    }

    #[test]
    fn sinh_and_drift_terms_match_dispersion_forms() {
        let p = pt(0.1, 0.01, 0.5);
        let s1 = sigma1_quadrature(&p, &s()).unwrap();
        assert!(rel(s1, I * 0.1 * lambda_c(p.pole(), &s()).unwrap()) < 1e-9);
    }

    #[test]
    fn sinh_kernel_stays_finite_at_large_q() {
        let p = pt(0.1, 0.01, 40.0);
        let v = sigma2_sinh_quadrature(&p, &s()).unwrap();
        let closed = crate::conductivity::sigma_quantum_parts(&p, &s())
            .unwrap()
            .1;
        assert!(rel(v, closed) < 1e-8, "{v} vs {closed}");
    }

    #[test]
    fn cubic_moment_identity() {
        let a = Complex64::new(0.1, 0.01) / 0.05;
        let q = cubic_moment_quadrature(a, &s()).unwrap();
        assert!(rel(q, cubic_moment(a, &s()).unwrap()) < 1e-10);
    }

    #[test]
    fn coefficient_fit_rejects_small_q() {
        assert!(resolve_sigma2_coefficient(&pt(0.1, 0.01, 0.1), &s()).is_err());
    }

    #[test]
    fn refinement_reports_large_change() {
        let err = refined(16, 1e-3, |n| Ok(Complex64::new(n as f64, 0.0))).unwrap_err();
        assert!(matches!(
            err,
            Error::Refinement {
                coarse: 16,
                fine: 32,
                ..
            }
        ));
    }
}
