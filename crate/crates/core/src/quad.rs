//! Quadrature building blocks.
//!
//! * [`integrate`]: globally adaptive 21-point Gauss-Kronrod for complex
//!   integrands on finite intervals, in the style of QUADPACK's QAG.
//! * [`gauss_legendre`] / [`gauss_hermite`]: node generation by Newton
//!   iteration on the three-term recurrences.
//! * [`graded_rule`]: composite Gauss-Legendre with panels shrinking
//!   geometrically toward a nearby complex pole.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Requested accuracy: converged when `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            abs: 0.0,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutput {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut res_abs = WGK[10] * fc.norm();
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let h = half.abs();
    let value = kronrod * half;
    res_abs *= h;
    res_asc *= h;
    let mut err = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value,
        error: err,
    }
}

/// Integrates `f` over `[points[0], points[last]]`, treating every interior
/// point as a forced breakpoint. Points are sorted and deduplicated.
pub fn integrate<F>(f: F, points: &[f64], tol: Tolerance) -> Result<QuadOutput>
where
    F: Fn(f64) -> Complex64,
{
    let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Ok(QuadOutput {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            intervals: 0,
        });
    }

    let mut heap: BinaryHeap<Segment> = pts.windows(2).map(|w| gk21(&f, w[0], w[1])).collect();
    loop {
        let (value, error) = totals(&heap);
        let target = tol.abs.max(tol.rel * value.norm());
        if error <= target {
            return Ok(QuadOutput {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureNotConverged {
                requested: tol.rel,
                estimated: error / value.norm().max(f64::MIN_POSITIVE),
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; nothing left to gain.
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Err(Error::QuadratureNotConverged {
                requested: tol.rel,
                estimated: error / value.norm().max(f64::MIN_POSITIVE),
                intervals: heap.len(),
            });
        }
        heap.push(gk21(&f, worst.a, mid));
        heap.push(gk21(&f, mid, worst.b));
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (Complex64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|l, r| l.a.total_cmp(&r.a));
    let values: Vec<Complex64> = segs.iter().map(|s| s.value).collect();
    let error: f64 = segs.iter().map(|s| s.error).sum();
    (pairwise_sum(&values), error)
}

/// Breakpoints that make the adaptive scheme resolve a pole at `p` lying
/// close to the real axis: `Re p` and `Re p +- 10 Im p`, clipped to `[lo, hi]`.
pub fn pole_breakpoints(lo: f64, hi: f64, poles: &[Complex64]) -> Vec<f64> {
    let mut out = vec![lo, hi];
    for p in poles {
        let w = p.im.abs();
        for c in [p.re - 10.0 * w, p.re - w, p.re, p.re + w, p.re + 10.0 * w] {
            if c > lo && c < hi {
                out.push(c);
            }
        }
    }
    out
}

/// Deterministic pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        return xs.iter().copied().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// A 1-D quadrature rule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1);
    let pim4 = PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // Orthonormal Hermite recurrence avoids overflow for large n.
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    let mut out_nodes = vec![0.0; n];
    let mut out_weights = vec![0.0; n];
    for i in 0..m {
        out_nodes[i] = -nodes[i];
        out_weights[i] = weights[i];
        out_nodes[n - 1 - i] = nodes[i];
        out_weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        out_nodes[n / 2] = 0.0;
    }
    Rule {
        nodes: out_nodes,
        weights: out_weights,
    }
}

/// Uniform trapezoid rule with `n` points on `[lo, hi]`.
pub fn trapezoid(lo: f64, hi: f64, n: usize) -> Rule {
    assert!(n >= 2);
    let h = (hi - lo) / (n - 1) as f64;
    let nodes = (0..n).map(|i| lo + h * i as f64).collect();
    let weights = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    Rule { nodes, weights }
}

/// Composite Gauss-Legendre rule of `order` nodes per panel on `[lo, hi]`.
///
/// Panels start at a quarter of `width` on either side of `center` (clipped into the
/// interval) and double in size moving outward until they reach `max_panel`,
/// after which they stay uniform. `width` is the distance of the pole from
/// the real axis.
pub fn graded_rule(
    lo: f64,
    hi: f64,
    center: f64,
    width: f64,
    max_panel: f64,
    order: usize,
) -> Rule {
    assert!(hi > lo && order >= 1 && max_panel > 0.0);
    let c = center.clamp(lo, hi);
    let w0 = width.abs().clamp(1e-9, max_panel);
    let mut breaks = vec![c];
    for dir in [-1.0f64, 1.0] {
        let mut d = 0.25 * w0;
        loop {
            let p = c + dir * d;
            if p <= lo || p >= hi {
                break;
            }
            breaks.push(p);
            d += d.min(max_panel);
        }
    }
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let gl = gauss_legendre(order);
    let mut rule = Rule::default();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wt) in gl.iter() {
            rule.nodes.push(mid + half * x);
            rule.weights.push(half * wt);
        }
    }
    rule
}
