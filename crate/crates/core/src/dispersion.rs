//! Gaussian Cauchy transforms in the upper half-plane.
//!
//! * `t(z) = pi^{-1/2} int exp(-s^2) / (s - z) ds`, the plasma dispersion
//!   function, equal to `i sqrt(pi) w(z)` with `w` the Faddeeva function.
//! * `lambda_C(z) = 1 + z t(z) = pi^{-1/2} int s exp(-s^2) / (s - z) ds`.
//! * `T(a, b) = pi^{-1/2} int exp(-s^2) / ((s - a)^2 - b^2) ds`
//!   `= [t(a + b) - t(a - b)] / (2 b)`.
//!
//! Only `Im z > 0` is supported. The rational backend uses Weideman's
//! rational approximation of `w` for `|z| < 7` and the Jacobi continued
//! fraction beyond. Combinations that cancel to leading order at large
//! `|a|` are summed from their asymptotic series there.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{finite, Error, Result};
use crate::params::{Backend, EvalSettings};
use crate::quad::{integrate, pole_breakpoints, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Radius beyond which the continued fraction replaces the rational approximation.
const CF_RADIUS: f64 = 7.0;
const CF_DEPTH: usize = 60;
const WEIDEMAN_N: usize = 48;
/// `|a|` beyond which (together with the pole separation) asymptotic series are used.
const SERIES_RADIUS: f64 = 8.0;

/// Arguments of the pole-pair function: poles at `a + b` and `a - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolePairArgs {
    a: Complex64,
    b: f64,
}

impl PolePairArgs {
    pub fn new(a: Complex64, b: f64) -> Result<Self> {
        check_upper(a)?;
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b,
                reason: "pole half-separation must be finite and positive",
            });
        }
        Ok(Self { a, b })
    }

    /// `T(z, q) = T(z/q, q/2)`.
    pub fn from_zq(z: Complex64, q: f64) -> Result<Self> {
        Self::new(z / q, 0.5 * q)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

fn check_upper(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() && z.im > 0.0 {
        Ok(())
    } else {
        Err(Error::LowerHalfPlane { z })
    }
}

/// Plasma dispersion function `t(z)` for `Im z > 0`.
pub fn t_fn(z: Complex64, settings: &EvalSettings) -> Result<Complex64> {
    check_upper(z)?;
    let t = match settings.backend {
        Backend::Rational => t_rational(z),
        Backend::Quadrature => t_quadrature(z, settings)?,
    };
    finite(t, "t_fn")
}

/// Van Kampen function `lambda_C(z) = 1 + z t(z)`.
pub fn lambda_c(z: Complex64, settings: &EvalSettings) -> Result<Complex64> {
    check_upper(z)?;
    let l = match settings.backend {
        Backend::Rational if z.norm() >= CF_RADIUS => {
            // t = -1/(z - R) gives 1 + z t = -R/(z - R) with no cancellation.
            let r = cf_remainder(z);
            -r / (z - r)
        }
        Backend::Rational => 1.0 + z * t_rational(z),
        Backend::Quadrature => 1.0 + z * t_quadrature(z, settings)?,
    };
    finite(l, "lambda_c")
}

/// Pole-pair function `T(a, b)`, computed from the partial-fraction identity.
pub fn t_pole_pair(args: PolePairArgs, settings: &EvalSettings) -> Result<Complex64> {
    let PolePairArgs { a, b } = args;
    if settings.backend == Backend::Rational && a.norm() >= SERIES_RADIUS + 2.0 * b {
        if let Some(v) = pole_pair_series(a, b) {
            return finite(v, "t_pole_pair");
        }
    }
    let hi = t_fn(a + b, settings)?;
    let lo = t_fn(a - b, settings)?;
    finite((hi - lo) / (2.0 * b), "t_pole_pair")
}

/// `lambda_C(a) + c T(a, b)`: the quantum correction `(sigma_1 + sigma_2) / (i y/x)`
/// with pole-pair prefactor `c`.
///
/// For `c = 1/2` the two terms cancel to order `a^-2`; at large `|a|` the
/// sum is taken from its own asymptotic series.
pub fn quantum_kernel(
    args: PolePairArgs,
    coefficient: f64,
    settings: &EvalSettings,
) -> Result<Complex64> {
    let PolePairArgs { a, b } = args;
    if settings.backend == Backend::Rational
        && coefficient == 0.5
        && a.norm() >= SERIES_RADIUS + 2.0 * b
    {
        if let Some(v) = kernel_series(a, b) {
            return finite(v, "quantum_kernel");
        }
    }
    let l = lambda_c(a, settings)?;
    let t = t_pole_pair(args, settings)?;
    finite(l + coefficient * t, "quantum_kernel")
}

/// `1/2 + (a^2 - 3/2) lambda_C(a)`, the cubic moment
/// `pi^{-1/2} int s (s^2 - 3/2) exp(-s^2) / (s - a) ds`.
pub fn cubic_moment(a: Complex64, settings: &EvalSettings) -> Result<Complex64> {
    check_upper(a)?;
    if settings.backend == Backend::Rational && a.norm() >= SERIES_RADIUS {
        if let Some(v) = cubic_series(a) {
            return finite(v, "cubic_moment");
        }
    }
    let l = lambda_c(a, settings)?;
    finite(0.5 + (a * a - 1.5) * l, "cubic_moment")
}

/// Adaptive quadrature of `t(z)` over `|s| <= R`.
pub fn t_quadrature(z: Complex64, settings: &EvalSettings) -> Result<Complex64> {
    check_upper(z)?;
    gaussian_cauchy(
        |s| Complex64::new((-s * s).exp(), 0.0) / (s - z),
        &[z],
        z,
        0.0,
        settings,
    )
}

/// Adaptive quadrature of `pi^{-1/2} int s exp(-s^2) / (s - z) ds`.
pub fn lambda_c_moment_quadrature(z: Complex64, settings: &EvalSettings) -> Result<Complex64> {
    check_upper(z)?;
    gaussian_cauchy(
        |s| Complex64::new(s * (-s * s).exp(), 0.0) / (s - z),
        &[z],
        z,
        0.0,
        settings,
    )
}

/// Direct adaptive quadrature of `T(a, b)`; `b` may have either sign.
pub fn t_pole_pair_quadrature(a: Complex64, b: f64, settings: &EvalSettings) -> Result<Complex64> {
    check_upper(a)?;
    let poles = [a + b, a - b];
    gaussian_cauchy(
        |s| {
            let d = s - a;
            Complex64::new((-s * s).exp(), 0.0) / (d * d - b * b)
        },
        &poles,
        a,
        b.abs(),
        settings,
    )
}

/// Integrates `pi^{-1/2} f(s)` over `[-R, R]` with `R` from the settings,
/// forcing breakpoints at the Gaussian core, its shifted copies at `+-b`,
/// and around each pole.
pub(crate) fn gaussian_cauchy<F>(
    f: F,
    poles: &[Complex64],
    center: Complex64,
    b: f64,
    settings: &EvalSettings,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let r = settings.radius_for(center, b);
    let mut pts = pole_breakpoints(-r, r, poles);
    for c in [0.0, -b, b, -8.0 - b, 8.0 + b] {
        if c > -r && c < r {
            pts.push(c);
        }
    }
    let out = integrate(f, &pts, Tolerance::relative(quad_tolerance(settings)))?;
    finite(out.value / PI.sqrt(), "gaussian quadrature")
}

/// Integrator target: two digits beyond `tol_rel`, floored where the
/// error estimate is dominated by roundoff.
pub(crate) fn quad_tolerance(settings: &EvalSettings) -> f64 {
    (settings.tol_rel * 1e-2).max(1e-13)
}

// ---------------------------------------------------------------------------
// Rational backend

fn t_rational(z: Complex64) -> Complex64 {
    if z.norm() >= CF_RADIUS {
        -1.0 / (z - cf_remainder(z))
    } else {
        I * PI.sqrt() * faddeeva_weideman(z)
    }
}

/// Tail `R` of the Jacobi fraction `t(z) = -1/(z - R)`,
/// `R = (1/2)/(z - 1/(z - (3/2)/(z - ...)))`.
fn cf_remainder(z: Complex64) -> Complex64 {
    let mut r = Complex64::new(0.0, 0.0);
    for k in (1..=CF_DEPTH).rev() {
        r = (0.5 * k as f64) / (z - r);
    }
    r
}

struct Weideman {
    l: f64,
    coeffs: Vec<f64>,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let m2 = 2 * m;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        // Samples of exp(-t^2)(L^2 + t^2) at t = L tan(theta/2), theta = k pi / M,
        // k = -M+1..M-1, with a leading zero; then rotated by M (fftshift).
        let mut f = vec![0.0; m2];
        for (i, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let t = l * (k as f64 * PI / m as f64 / 2.0).tan();
            f[i + 1] = (-t * t).exp() * (l * l + t * t);
        }
        let shifted: Vec<f64> = (0..m2).map(|i| f[(i + m) % m2]).collect();
        let coeffs = (1..=n)
            .map(|j| {
                shifted
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (2.0 * PI * (i * j % m2) as f64 / m2 as f64).cos())
                    .sum::<f64>()
                    / m2 as f64
            })
            .collect();
        Weideman { l, coeffs }
    })
}

/// Weideman's rational approximation of `w(z)` for `Im z >= 0`.
fn faddeeva_weideman(z: Complex64) -> Complex64 {
    let tab = weideman();
    let l = Complex64::new(tab.l, 0.0);
    let denom = l - I * z;
    let zz = (l + I * z) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for c in tab.coeffs.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (denom * denom) + (1.0 / PI.sqrt()) / denom
}

// ---------------------------------------------------------------------------
// Asymptotic series, valid for |a| well beyond the Gaussian core.
//
// With s ~ N(0, 1/2) and m_k = E[s^k] = (k-1)!!/2^{k/2} for even k,
// 1/(s - a) = -sum_n s^n / a^{n+1} turns each transform into a moment sum.

const SERIES_MAX_POWER: usize = 200;

fn gaussian_moments(max: usize) -> Vec<f64> {
    let mut m = vec![0.0; max + 1];
    m[0] = 1.0;
    let mut k = 2;
    while k <= max {
        m[k] = m[k - 2] * (k - 1) as f64 / 2.0;
        k += 2;
    }
    m
}

/// Sums `sum_p coeff(p) a^-p` over even `p >= p0`, stopping at the first
/// term below `1e-17 |sum|`. Returns `None` if the terms start growing first.
fn even_power_series(a: Complex64, p0: usize, coeff: impl Fn(usize) -> f64) -> Option<Complex64> {
    let inv2 = (1.0 / a) * (1.0 / a);
    let mut pow = inv2.powu(p0 as u32 / 2);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut p = p0;
    while p <= SERIES_MAX_POWER {
        let term = pow * coeff(p);
        sum += term;
        let mag = term.norm();
        if mag <= 1e-17 * sum.norm() {
            return Some(sum);
        }
        if mag > prev {
            return None;
        }
        if mag > 0.0 {
            prev = mag;
        }
        pow *= inv2;
        p += 2;
    }
    None
}

/// `sum_{j odd, j_min <= j <= n} C(n, j) b^{j-1} m_{n-j}`.
fn shifted_moment(n: usize, j_min: usize, b: f64, m: &[f64]) -> f64 {
    let mut binom = 1.0;
    let mut bpow = 1.0 / b;
    let mut acc = 0.0;
    for j in 1..=n {
        binom *= (n - j + 1) as f64 / j as f64;
        bpow *= b;
        if j % 2 == 1 && j >= j_min {
            acc += binom * bpow * m[n - j];
        }
    }
    acc
}

fn pole_pair_series(a: Complex64, b: f64) -> Option<Complex64> {
    let m = gaussian_moments(SERIES_MAX_POWER);
    even_power_series(a, 2, |p| shifted_moment(p - 1, 1, b, &m))
}

fn kernel_series(a: Complex64, b: f64) -> Option<Complex64> {
    let m = gaussian_moments(SERIES_MAX_POWER);
    even_power_series(a, 4, |p| 0.5 * shifted_moment(p - 1, 3, b, &m))
}

fn cubic_series(a: Complex64) -> Option<Complex64> {
    let m = gaussian_moments(SERIES_MAX_POWER + 4);
    even_power_series(a, 4, |p| -(m[p + 2] - 1.5 * m[p]))
}

#[cfg(test)]
pub(crate) fn lambda_series(a: Complex64) -> Option<Complex64> {
    let m = gaussian_moments(SERIES_MAX_POWER);
    even_power_series(a, 2, |p| -m[p])
}

/// Deterministic set of 100 upper-half-plane points used by the identity checks.
pub fn upper_half_plane_grid() -> Vec<Complex64> {
    let res = [-9.0, -5.0, -3.2, -1.5, -0.4, 0.0, 0.7, 2.1, 4.4, 12.0];
    let ims = [1e-3, 4e-3, 0.02, 0.08, 0.3, 0.9, 1.7, 3.5, 6.0, 15.0];
    res.iter()
        .flat_map(|&x| ims.iter().map(move |&y| Complex64::new(x, y)))
        .collect()
}
