//! Values frozen from an independent 30-digit quadrature of the single reduced
//! integral and of the dispersion functions.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use qplasma::conductivity::{sigma_difference, sigma_full, sigma_full_verified};
use qplasma::dispersion::cubic_moment;
use qplasma::oracle::sigma_3d_bruteforce;
use qplasma::{Backend, DimensionlessPoint, EvalSettings};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn pt(x: f64, y: f64, q: f64) -> DimensionlessPoint {
    DimensionlessPoint::new(x, y, q).unwrap()
}

type Point = (f64, f64, f64);

const FULL: &[(Point, (f64, f64))] = &[
    ((0.1, 0.01, 0.5), (0.03143843158369342, 0.010801073144816)),
    (
        (0.001, 0.01, 2.0),
        (0.0032867911099285254, 4.563568457492211),
    ),
    (
        (0.1, 0.01, 3.0),
        (0.000645106639916895, 0.07092457968304258),
    ),
    (
        (1.0, 0.05, 0.1),
        (0.0025319106260623725, 0.05012529282242232),
    ),
];

#[test]
fn full_conductivity_matches_frozen_values() {
    for backend in [Backend::Rational, Backend::Quadrature] {
        let s = EvalSettings::default().with_backend(backend);
        for &((x, y, q), (re, im)) in FULL {
            let v = sigma_full(&pt(x, y, q), &s).unwrap().full;
            assert!(
                rel(v, c(re, im)) < 1e-10,
                "{backend:?} ({x}, {y}, {q}): {v}"
            );
        }
    }
}

#[test]
fn verified_path_reports_small_residual() {
    let s = EvalSettings::default();
    for &((x, y, q), (re, im)) in FULL {
        let (b, residual) = sigma_full_verified(&pt(x, y, q), &s).unwrap();
        assert!(residual < 1e-10);
        assert!(rel(b.full, c(re, im)) < 1e-12);
    }
}

#[test]
fn three_d_oracle_matches_frozen_values() {
    let s = EvalSettings::default();
    for &((x, y, q), (re, im)) in FULL {
        let v = sigma_3d_bruteforce(&pt(x, y, q), &s).unwrap();
        assert!(rel(v, c(re, im)) < 1e-4, "({x}, {y}, {q}): {v}");
    }
}

#[test]
fn components_at_reference_point() {
    let b = sigma_full(&pt(0.1, 0.01, 0.5), &EvalSettings::default()).unwrap();
    assert!(rel(b.sigma1, c(-0.03258142156255921, 0.08914309178564106)) < 1e-12);
    assert!(rel(b.sigma2, c(0.030686078508633718, -0.0858655493914221)) < 1e-12);
}

#[test]
fn difference_at_large_q() {
    let d = sigma_difference(&pt(0.1, 0.01, 10.0), &EvalSettings::default()).unwrap();
    assert!(rel(d, c(1.9963261146961291e-6, -0.0001770278784945978)) < 1e-12);
}

#[test]
fn cubic_moment_reference() {
    let a = Complex64::new(0.1, 0.01) / 0.05;
    let v = cubic_moment(a, &EvalSettings::default()).unwrap();
    assert!(rel(v, c(0.028216442564235307, 0.11076638546242247)) < 1e-12);
}
