//! Self-check suite: every identity, limit and cross-check, with residuals.

use std::fmt;

use num_complex::Complex64;

use crate::conductivity::{epsilon_tr, k0_limit, sigma_classical, sigma_full, sigma_smallq};
use crate::degeneracy::{fermi_density_3d, fermi_f2, sigma_degenerate, DegeneracyParams};
use crate::dispersion::{
    lambda_c, t_fn, t_pole_pair, t_pole_pair_quadrature, upper_half_plane_grid, PolePairArgs,
};
use crate::error::Result;
use crate::oracle::{
    cubic_moment_quadrature, epsilon_3d_bruteforce, quantum_term_3d, resolve_sigma2_coefficient,
    sigma1_quadrature, sigma2_sinh_quadrature, sigma_3d_bruteforce, sigma_reduced_quadrature,
};
use crate::params::{Backend, Constants, DimensionlessPoint, EvalSettings, PhysicalParams};
use crate::sweep::{run_sweep, write_csv, Axis, Model, Scale, SweepSpec};

/// Result of one check. `residual <= threshold` passes unless `detail`
/// records an evaluation error.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn measured(name: &str, residual: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            residual,
            threshold,
            passed: residual <= threshold,
            detail,
        }
    }

    fn from_result(name: &str, threshold: f64, r: Result<(f64, String)>) -> Self {
        match r {
            Ok((residual, detail)) => Self::measured(name, residual, threshold, detail),
            Err(e) => Self {
                name: name.to_string(),
                residual: f64::NAN,
                threshold,
                passed: false,
                detail: format!("evaluation failed: {e}"),
            },
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} residual {:>10.3e}  threshold {:>9.2e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failed().count();
        write!(
            f,
            "{} of {} checks passed{}",
            self.checks.len() - failed,
            self.checks.len(),
            if failed == 0 { "" } else { "; overall FAIL" }
        )
    }
}

fn pt(x: f64, y: f64, q: f64) -> Result<DimensionlessPoint> {
    DimensionlessPoint::new(x, y, q)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// The 27-point grid `x in {0.001, 0.1, 1}`, `y in {0.005, 0.01, 0.05}`, `q in {0.1, 0.5, 2}`.
pub fn acceptance_grid() -> Vec<DimensionlessPoint> {
    let mut out = Vec::with_capacity(27);
    for x in [0.001, 0.1, 1.0] {
        for y in [0.005, 0.01, 0.05] {
            for q in [0.1, 0.5, 2.0] {
                out.push(DimensionlessPoint::new(x, y, q).expect("grid point"));
            }
        }
    }
    out
}

/// Maximum of `f` over the grid, with the arg-max location in the detail.
fn grid_max<F>(f: F) -> Result<(f64, String)>
where
    F: Fn(&DimensionlessPoint) -> Result<f64>,
{
    let mut worst = (0.0f64, String::new());
    for p in acceptance_grid() {
        let r = f(&p)?;
        if r > worst.0 || r.is_nan() {
            worst = (
                r,
                format!("worst at (x={}, y={}, q={})", p.x(), p.y(), p.q()),
            );
        }
    }
    Ok(worst)
}

/// Largest pairwise relative spread `(max - min) / min|v|`.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let floor = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    (max - min) / floor
}

/// Sweep CSV bytes for the determinism check.
pub fn determinism_csv(settings: &EvalSettings) -> Result<Vec<u8>> {
    let spec = SweepSpec {
        axis: Axis::Q,
        x: 0.1,
        y: 0.01,
        q: 0.5,
        start: 0.01,
        stop: 10.0,
        count: 40,
        scale: Scale::Log,
        models: vec![Model::Classic, Model::Full, Model::Lindhard, Model::Smallq],
    };
    let rows = run_sweep(&spec, settings)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| crate::Error::InvalidSweep(e.to_string()))?;
    Ok(buf)
}

/// Runs every check. Quadrature-agreement thresholds scale with
/// `settings.tol_rel` (10x); the others are fixed.
pub fn run_verify(settings: &EvalSettings) -> VerifyReport {
    let s = settings;
    let quad_tol = 10.0 * s.tol_rel;
    let rational = (*s).with_backend(Backend::Rational);
    let quadrature = (*s).with_backend(Backend::Quadrature);
    let mut checks = Vec::new();
    let mut add = |name: &str, threshold: f64, r: Result<(f64, String)>| {
        checks.push(Check::from_result(name, threshold, r));
    };

    // Dispersion functions.
    add(
        "dispersion: lambda_C = 1 + z t",
        1e-13,
        (|| {
            let mut worst = 0.0f64;
            for z in upper_half_plane_grid() {
                let l = lambda_c(z, &rational)?;
                let zt = z * t_fn(z, &rational)?;
                // Both terms of 1 + z t are O(1); measure against their size.
                worst = worst.max((l - (1.0 + zt)).norm() / (1.0 + zt.norm()));
            }
            Ok((worst, "100 points, scaled by 1 + |z t|".into()))
        })(),
    );
    add(
        "dispersion: T = [t(a+b) - t(a-b)]/(2b)",
        1e-10,
        (|| {
            let mut worst = 0.0f64;
            for z in upper_half_plane_grid() {
                for b in [0.05, 0.25, 1.0] {
                    let t = t_pole_pair(PolePairArgs::new(z, b)?, &rational)?;
                    let d = (t_fn(z + b, &quadrature)? - t_fn(z - b, &quadrature)?) / (2.0 * b);
                    worst = worst.max(rel(t, d));
                }
            }
            Ok((
                worst,
                "100 points x 3 shifts, difference by quadrature".into(),
            ))
        })(),
    );
    add(
        "dispersion: rational vs quadrature t",
        quad_tol,
        (|| {
            let mut worst = 0.0f64;
            for z in upper_half_plane_grid() {
                worst = worst.max(rel(t_fn(z, &rational)?, t_fn(z, &quadrature)?));
            }
            Ok((worst, "100 points".into()))
        })(),
    );
    add(
        "dispersion: Im t > 0 (Nevanlinna)",
        0.0,
        (|| {
            let bad = upper_half_plane_grid()
                .into_iter()
                .map(|z| t_fn(z, &rational).map(|t| t.im <= 0.0))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|b| *b)
                .count();
            Ok((bad as f64, "count of violations".into()))
        })(),
    );

    // Conductivity.
    add(
        "k=0 closed form",
        1e-8,
        (|| {
            let mut worst = 0.0f64;
            for (x, y) in [(0.1, 0.01), (1.0, 0.1)] {
                worst = worst.max(rel(sigma_classical(&pt(x, y, 1e-6)?, s)?, k0_limit(x, y)));
            }
            Ok((worst, String::new()))
        })(),
    );
    add(
        "decomposition: full = classic + s1 + s2",
        1e-12,
        grid_max(|p| Ok(sigma_full(p, s)?.additivity_residual())),
    );
    add(
        "sigma1 vs drift-term quadrature",
        quad_tol,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            Ok((
                rel(sigma_full(&p, s)?.sigma1, sigma1_quadrature(&p, s)?),
                String::new(),
            ))
        })(),
    );
    add(
        "sigma2 vs sinh-kernel quadrature",
        quad_tol,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            Ok((
                rel(sigma_full(&p, s)?.sigma2, sigma2_sinh_quadrature(&p, s)?),
                String::new(),
            ))
        })(),
    );
    add(
        "T identity vs direct pole-pair quadrature",
        quad_tol,
        (|| {
            let p = pt(0.001, 0.01, 2.0)?;
            let args = PolePairArgs::from_zq(p.z(), p.q())?;
            let direct = t_pole_pair_quadrature(args.a(), args.b(), s)?;
            Ok((rel(t_pole_pair(args, s)?, direct), String::new()))
        })(),
    );
    add(
        "reduction: closed form vs 1-D quadrature",
        quad_tol,
        grid_max(|p| Ok(rel(sigma_full(p, s)?.full, sigma_reduced_quadrature(p, s)?))),
    );
    add(
        "reduction: closed form vs 3-D brute force",
        1e-4,
        grid_max(|p| Ok(rel(sigma_full(p, s)?.full, sigma_3d_bruteforce(p, s)?))),
    );
    add(
        "cubic moment identity",
        quad_tol,
        (|| {
            let a = Complex64::new(0.1, 0.01) / 0.05;
            Ok((
                rel(
                    crate::dispersion::cubic_moment(a, s)?,
                    cubic_moment_quadrature(a, s)?,
                ),
                String::new(),
            ))
        })(),
    );
    add(
        "classical limit: each step >= 4x",
        0.25,
        (|| {
            let d: Vec<f64> = [0.2, 0.1, 0.05]
                .iter()
                .map(|&q| sigma_full(&pt(0.1, 0.01, q)?, s).map(|b| (b.full - b.classic).norm()))
                .collect::<Result<_>>()?;
            let worst = (d[1] / d[0]).max(d[2] / d[1]);
            Ok((
                worst,
                format!("|full-classic| = {:.3e}, {:.3e}, {:.3e}", d[0], d[1], d[2]),
            ))
        })(),
    );
    add(
        "small-q form: error decreasing",
        0.0,
        (|| {
            let d: Vec<f64> = [0.2, 0.1, 0.05]
                .iter()
                .map(|&q| {
                    let p = pt(0.1, 0.01, q)?;
                    Ok((sigma_full(&p, s)?.full - sigma_smallq(&p, s)?).norm())
                })
                .collect::<Result<_>>()?;
            let violations = d.windows(2).filter(|w| w[1] >= w[0]).count();
            Ok((
                violations as f64,
                format!("{:.3e}, {:.3e}, {:.3e}", d[0], d[1], d[2]),
            ))
        })(),
    );
    add(
        "difference identity",
        1e-10,
        grid_max(|p| Ok(sigma_full(p, s)?.difference_residual())),
    );
    add(
        "difference decays along q = 2, 4, 8, 16",
        0.0,
        (|| {
            let d: Vec<f64> = [2.0, 4.0, 8.0, 16.0]
                .iter()
                .map(|&q| sigma_full(&pt(0.1, 0.01, q)?, s).map(|b| (b.full - b.lindhard).norm()))
                .collect::<Result<_>>()?;
            let violations = d.windows(2).filter(|w| w[1] >= w[0]).count();
            Ok((violations as f64, "count of increases".into()))
        })(),
    );
    add(
        "symmetry: sigma(-x) = conj sigma(x)",
        1e-10,
        grid_max(|p| {
            let a = sigma_full(p, s)?.full;
            Ok(rel(sigma_full(&p.mirrored(), s)?.full, a.conj()))
        }),
    );
    add(
        "positivity: Re sigma_classic > 0",
        0.0,
        grid_max(|p| {
            Ok(if sigma_classical(p, s)?.re > 0.0 {
                0.0
            } else {
                1.0
            })
        }),
    );

    // Coefficient adjudication against the 3-D quantum term.
    for (x, y, q) in [(0.1, 0.01, 0.5), (0.001, 0.01, 2.0)] {
        add(
            &format!("sigma2 coefficient fit at q={q}"),
            1e-3,
            (|| {
                let fit = resolve_sigma2_coefficient(&pt(x, y, q)?, s)?;
                Ok(((fit.coefficient - 0.5).abs(), fit.to_string()))
            })(),
        );
    }
    add(
        "sigma2 vs 3-D quantum term",
        1e-4,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            let (_, s2) = crate::conductivity::sigma_quantum_parts(&p, s)?;
            Ok((
                rel(s2, quantum_term_3d(&p, s)?),
                format!("sigma2 coefficient in use {}", s.sigma2_coefficient),
            ))
        })(),
    );
    add(
        "coefficient fit grid independence (96 vs 128)",
        1e-4,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            let a = resolve_sigma2_coefficient(&p, &(*s).with_grid(96))?.coefficient;
            let b = resolve_sigma2_coefficient(&p, &(*s).with_grid(128))?.coefficient;
            Ok(((a - b).abs(), String::new()))
        })(),
    );
    add(
        "3-D grid refinement ratio >= 4",
        0.25,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            let v: Vec<Complex64> = [16, 32, 64]
                .iter()
                .map(|&n| sigma_3d_bruteforce(&p, &(*s).with_grid(n)))
                .collect::<Result<_>>()?;
            let (d1, d2) = ((v[1] - v[0]).norm(), (v[2] - v[1]).norm());
            // A change at roundoff level counts as converged.
            let ratio = if d2 <= 1e-13 * v[2].norm() {
                0.0
            } else {
                d2 / d1
            };
            Ok((ratio, format!("changes {d1:.3e}, {d2:.3e}")))
        })(),
    );

    // Permittivity.
    add(
        "epsilon: sigma path vs 3-D integral",
        1e-4,
        (|| {
            let p0 = pt(0.1, 0.01, 0.5)?;
            let phys = PhysicalParams::from_dimensionless(&p0, 1e4, 1e22, Constants::CODATA)?;
            let image = crate::params::to_dimensionless(&phys)?;
            let a = epsilon_tr(&image, &phys, s)? - 1.0;
            let b = epsilon_3d_bruteforce(&image, &phys, s)? - 1.0;
            Ok((rel(a, b), String::new()))
        })(),
    );

    // Degeneracy.
    add(
        "degenerate alpha=-20 vs Maxwellian",
        1e-3,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            let v = sigma_degenerate(&p, &DegeneracyParams::new(-20.0)?, s)?;
            Ok((rel(v, sigma_full(&p, s)?.full), String::new()))
        })(),
    );
    add(
        "f2(-30) vs Boltzmann limit",
        1e-10,
        (|| {
            let v = fermi_f2(&DegeneracyParams::new(-30.0)?, s)?;
            let e = (-30.0f64).exp() * std::f64::consts::PI.sqrt() / 4.0;
            Ok(((v - e).abs() / e, String::new()))
        })(),
    );
    add(
        "degenerate limit monotone in alpha",
        0.0,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            let m = sigma_full(&p, s)?.full;
            let d: Vec<f64> = [-5.0, -10.0, -20.0]
                .iter()
                .map(|&a| Ok(rel(sigma_degenerate(&p, &DegeneracyParams::new(a)?, s)?, m)))
                .collect::<Result<_>>()?;
            let violations = d.windows(2).filter(|w| w[1] >= w[0]).count();
            Ok((
                violations as f64,
                format!("{:.3e}, {:.3e}, {:.3e}", d[0], d[1], d[2]),
            ))
        })(),
    );
    add(
        "Fermi density normalization",
        1e-6,
        (|| {
            let p = pt(0.1, 0.01, 0.5)?;
            let mut worst = 0.0f64;
            for a in [-5.0, 0.0, 5.0] {
                let d = DegeneracyParams::new(a)?;
                let f2 = 4.0 * std::f64::consts::PI * fermi_f2(&d, s)?;
                worst = worst.max((fermi_density_3d(&p, &d, s.grid_n_3d) - f2).abs() / f2);
            }
            Ok((worst, String::new()))
        })(),
    );

    // Figure claims.
    add(
        "figure: quantum deviation <= 2% at q=0.05",
        0.02,
        (|| {
            let b = sigma_full(&pt(0.1, 0.01, 0.05)?, s)?;
            Ok((rel(b.full, b.classic), String::new()))
        })(),
    );
    add(
        "figure: quantum deviation >= 10% in 0.1<q<1",
        0.0,
        (|| {
            let mut max = 0.0f64;
            for i in 1..100 {
                let q = 0.1 * 10f64.powf(i as f64 / 100.0);
                let b = sigma_full(&pt(0.1, 0.01, q)?, s)?;
                max = max.max(rel(b.full, b.classic));
            }
            Ok(((0.1 - max).max(0.0), format!("max deviation {max:.3}")))
        })(),
    );
    for (x, part) in [(25.0, "Re"), (12.0, "Im")] {
        add(
            &format!("figure: {part} spread over q=2,3,4 at x={x}"),
            0.05,
            (|| {
                let v: Vec<f64> = [2.0, 3.0, 4.0]
                    .iter()
                    .map(|&q| {
                        let f = sigma_full(&pt(x, 0.01, q)?, s)?.full;
                        Ok(if part == "Re" { f.re } else { f.im })
                    })
                    .collect::<Result<_>>()?;
                Ok((
                    spread(&v),
                    format!("{:.6e}, {:.6e}, {:.6e}", v[0], v[1], v[2]),
                ))
            })(),
        );
    }

    add(
        "sweep determinism",
        0.0,
        (|| {
            let a = determinism_csv(s)?;
            let b = determinism_csv(s)?;
            Ok((if a == b { 0.0 } else { 1.0 }, format!("{} bytes", a.len())))
        })(),
    );

    VerifyReport { checks }
}
