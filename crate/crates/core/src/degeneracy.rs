//! Conductivity at arbitrary degeneracy (Fermi-Dirac equilibrium).
//!
//! ```text
//! sigma/sigma_0 = 1/(4 pi f_2(alpha)) int { (1 - (q/x) P_n) g(P) + (1/(2x)) (f^+ - f^-) }
//!                 P_perp^2 d^3P / (1 - i x/y + i (q/y) P_n)
//! ```
//!
//! with `g = e^{P^2-alpha} / (1 + e^{P^2-alpha})^2`,
//! `f^{+-} = 1 / (1 + exp((P_n -+ q/2)^2 + P_perp^2 - alpha))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::quad_tolerance;
use crate::error::{finite, Error, Result};
use crate::oracle::refined;
use crate::params::{DimensionlessPoint, EvalSettings};
use crate::quad::{graded_rule, integrate, pairwise_sum, trapezoid, Rule, Tolerance};

/// Relative change allowed between the `n` and `2n` grids.
pub const REFINEMENT_TOL: f64 = 1e-3;

/// Smallest grid accepted by [`sigma_degenerate`].
pub const MIN_GRID: usize = 48;

const MAX_PANEL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyParams {
    alpha: f64,
}

impl DegeneracyParams {
    /// `alpha = mu / (k_B T)`, accepted in `[-40, 40]`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(-40.0..=40.0).contains(&alpha) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must be finite and within [-40, 40]",
            });
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Momentum radius beyond which the Fermi weight is negligible.
    fn radius(&self) -> f64 {
        self.alpha.max(0.0).sqrt() + 10.0
    }
}

/// Fermi-Dirac occupation `1 / (1 + u)` for `u = exp(E - alpha)`.
fn occupation(u: f64) -> f64 {
    1.0 / (1.0 + u)
}

/// `u / (1 + u)^2`, safe for `u` up to infinity.
fn occupation_derivative(u: f64) -> f64 {
    if u > 1e150 {
        1.0 / u
    } else {
        u / ((1.0 + u) * (1.0 + u))
    }
}

/// `f_2(alpha) = int_0^inf x^2 / (1 + e^{x^2 - alpha}) dx`.
pub fn fermi_f2(d: &DegeneracyParams, settings: &EvalSettings) -> Result<f64> {
    let alpha = d.alpha;
    let hi = alpha.max(0.0).sqrt() + 12.0;
    let mut pts = vec![0.0, hi];
    if alpha > 0.0 {
        pts.push(alpha.sqrt());
    }
    let tol = Tolerance {
        abs: 0.0,
        ..Tolerance::relative(quad_tolerance(settings))
    };
    let out = integrate(
        |x| Complex64::new(x * x * occupation((x * x - alpha).exp()), 0.0),
        &pts,
        tol,
    )?;
    Ok(out.value.re)
}

/// `g(P)` with `P^2` given.
pub fn fermi_weight_derivative(p_sq: f64, d: &DegeneracyParams) -> f64 {
    occupation_derivative((p_sq - d.alpha).exp())
}

struct FermiGrid {
    longitudinal: Rule,
    /// `(P_perp^2, weight, exp(P_perp^2))`
    transverse: Vec<(f64, f64, f64)>,
}

impl FermiGrid {
    fn new(pt: &DimensionlessPoint, d: &DegeneracyParams, n: usize) -> Self {
        let lp = d.radius();
        let ln = lp + 0.5 * pt.q();
        let a = pt.pole();
        let longitudinal = graded_rule(-ln, ln, a.re, a.im, MAX_PANEL, (n / 8).max(2));
        let tr = trapezoid(-lp, lp, n);
        let mut transverse = Vec::with_capacity(n * n);
        for (py, wy) in tr.iter() {
            for (pz, wz) in tr.iter() {
                let perp_sq = py * py + pz * pz;
                transverse.push((perp_sq, wy * wz, perp_sq.exp()));
            }
        }
        Self {
            longitudinal,
            transverse,
        }
    }

    /// `sum w f(P_n, P_perp^2, e^{P_perp^2})` over the grid.
    fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(f64, f64, f64) -> Complex64 + Sync,
    {
        let rows: Vec<Complex64> = self
            .longitudinal
            .nodes
            .par_iter()
            .zip(self.longitudinal.weights.par_iter())
            .map(|(&pn, &wn)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(perp_sq, w, e_perp) in &self.transverse {
                    acc += w * f(pn, perp_sq, e_perp);
                }
                wn * acc
            })
            .collect();
        pairwise_sum(&rows)
    }
}

fn sigma_degenerate_on(
    pt: &DimensionlessPoint,
    d: &DegeneracyParams,
    f2: f64,
    n: usize,
) -> Result<Complex64> {
    let (x, y, q) = (pt.x(), pt.y(), pt.q());
    let b = 0.5 * q;
    let alpha = d.alpha;
    let wt = x / y;
    let lk = q / y;
    let v = FermiGrid::new(pt, d, n).integrate(|pn, perp_sq, e_perp| {
        // exp(P^2 - alpha) factored so only the longitudinal part needs an exp per node.
        let u = (pn * pn - alpha).exp() * e_perp;
        let up = ((pn - b) * (pn - b) - alpha).exp() * e_perp;
        let um = ((pn + b) * (pn + b) - alpha).exp() * e_perp;
        let num = (1.0 - (q / x) * pn) * occupation_derivative(u)
            + (occupation(up) - occupation(um)) / (2.0 * x);
        num * perp_sq / Complex64::new(1.0, lk * pn - wt)
    });
    finite(v / (4.0 * PI * f2), "sigma_degenerate")
}

/// Conductivity for a Fermi-Dirac equilibrium with chemical potential `alpha`.
///
/// Evaluated at `settings.grid_n_3d` and twice that; returns the finer value
/// or a refinement error if they differ by more than [`REFINEMENT_TOL`].
pub fn sigma_degenerate(
    pt: &DimensionlessPoint,
    d: &DegeneracyParams,
    settings: &EvalSettings,
) -> Result<Complex64> {
    settings.validate()?;
    pt.require_quantum_x()?;
    if settings.grid_n_3d < MIN_GRID {
        return Err(Error::InvalidParameter {
            name: "grid_n_3d",
            value: settings.grid_n_3d as f64,
            reason: "degenerate conductivity needs at least 48 points per direction",
        });
    }
    let f2 = fermi_f2(d, settings)?;
    refined(settings.grid_n_3d, REFINEMENT_TOL, |n| {
        sigma_degenerate_on(pt, d, f2, n)
    })
}

/// `int f_F(P) d^3P` on the same grid [`sigma_degenerate`] uses; equals `4 pi f_2(alpha)`.
pub fn fermi_density_3d(pt: &DimensionlessPoint, d: &DegeneracyParams, n: usize) -> f64 {
    let alpha = d.alpha;
    FermiGrid::new(pt, d, n)
        .integrate(|pn, _, e_perp| {
            Complex64::new(occupation((pn * pn - alpha).exp() * e_perp), 0.0)
        })
        .re
}
