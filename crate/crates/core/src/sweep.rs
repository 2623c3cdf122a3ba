//! Parameter sweeps along `q` or `x` with CSV/JSON output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::conductivity::{sigma_classical, sigma_full, sigma_smallq};
use crate::degeneracy::{sigma_degenerate, DegeneracyParams};
use crate::error::{Error, Result};
use crate::params::{DimensionlessPoint, EvalSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Q,
    X,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(Axis::Q),
            "x" => Ok(Axis::X),
            _ => Err(Error::InvalidSweep(format!(
                "unknown axis `{s}` (expected q or x)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// A quantity that can be evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Classic,
    Sigma1,
    Sigma2,
    Full,
    Lindhard,
    Difference,
    Smallq,
    /// Fermi-Dirac equilibrium with the given `alpha`.
    Degenerate(f64),
}

impl Model {
    pub fn evaluate(&self, pt: &DimensionlessPoint, settings: &EvalSettings) -> Result<Complex64> {
        match *self {
            Model::Classic => sigma_classical(pt, settings),
            Model::Sigma1 => Ok(sigma_full(pt, settings)?.sigma1),
            Model::Sigma2 => Ok(sigma_full(pt, settings)?.sigma2),
            Model::Full => Ok(sigma_full(pt, settings)?.full),
            Model::Lindhard => Ok(sigma_full(pt, settings)?.lindhard),
            Model::Difference => Ok(sigma_full(pt, settings)?.difference),
            Model::Smallq => sigma_smallq(pt, settings),
            Model::Degenerate(alpha) => {
                sigma_degenerate(pt, &DegeneracyParams::new(alpha)?, settings)
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Classic => f.write_str("classic"),
            Model::Sigma1 => f.write_str("sigma1"),
            Model::Sigma2 => f.write_str("sigma2"),
            Model::Full => f.write_str("full"),
            Model::Lindhard => f.write_str("lindhard"),
            Model::Difference => f.write_str("difference"),
            Model::Smallq => f.write_str("smallq"),
            Model::Degenerate(a) => write!(f, "degenerate({a})"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    /// Accepts the plain names and `degenerate(ALPHA)` or `degenerate:ALPHA`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let simple = match s {
            "classic" => Some(Model::Classic),
            "sigma1" => Some(Model::Sigma1),
            "sigma2" => Some(Model::Sigma2),
            "full" => Some(Model::Full),
            "lindhard" => Some(Model::Lindhard),
            "difference" => Some(Model::Difference),
            "smallq" => Some(Model::Smallq),
            _ => None,
        };
        if let Some(m) = simple {
            return Ok(m);
        }
        let arg = s
            .strip_prefix("degenerate(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("degenerate:"));
        match arg.map(|a| a.trim().parse::<f64>()) {
            Some(Ok(alpha)) => {
                DegeneracyParams::new(alpha)?;
                Ok(Model::Degenerate(alpha))
            }
            _ => Err(Error::InvalidSweep(format!("unknown model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    /// Fixed values; the one named by `axis` is ignored.
    pub x: f64,
    pub y: f64,
    pub q: f64,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
    pub models: Vec<Model>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSweep(m));
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start >= self.stop {
            return bad(format!(
                "need start < stop, got {} and {}",
                self.start, self.stop
            ));
        }
        if self.count < 2 {
            return bad(format!("need at least 2 points, got {}", self.count));
        }
        if self.scale == Scale::Log && self.start <= 0.0 {
            return bad("logarithmic sweep needs a positive start".into());
        }
        if self.models.is_empty() {
            return bad("no models requested".into());
        }
        // Fixed coordinates must form a valid point for some value of the swept one.
        match self.axis {
            Axis::Q => DimensionlessPoint::new(self.x, self.y, 1.0)?,
            Axis::X => DimensionlessPoint::new(1.0, self.y, self.q)?,
        };
        Ok(())
    }

    /// Values of the swept coordinate, in order.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.stop;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * f,
                    Scale::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }

    fn coordinates(&self, v: f64) -> (f64, f64, f64) {
        match self.axis {
            Axis::Q => (self.x, self.y, v),
            Axis::X => (v, self.y, self.q),
        }
    }
}

/// One sweep point with every requested model; failures are kept as messages.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub y: f64,
    pub q: f64,
    pub values: Vec<(Model, std::result::Result<Complex64, String>)>,
}

/// Evaluates every model at every grid point. Points run in parallel; rows
/// come back in axis order.
pub fn run_sweep(spec: &SweepSpec, settings: &EvalSettings) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    settings.validate()?;
    let rows = spec
        .grid()
        .par_iter()
        .map(|&v| {
            let (x, y, q) = spec.coordinates(v);
            let pt = DimensionlessPoint::new(x, y, q);
            let values = spec
                .models
                .iter()
                .map(|m| {
                    let r = pt
                        .as_ref()
                        .map_err(Clone::clone)
                        .and_then(|p| m.evaluate(p, settings))
                        .map_err(|e| e.to_string());
                    (*m, r)
                })
                .collect();
            SweepRow { x, y, q, values }
        })
        .collect();
    Ok(rows)
}

/// 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Marker written in the `re` column when a point failed; `im` then holds the message.
pub const ERROR_MARKER: &str = "error";

/// Long-format CSV: `x,y,q,model,re,im`, one record per (point, model).
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "q", "model", "re", "im"])?;
    for row in rows {
        for (model, value) in &row.values {
            let (re, im) = match value {
                Ok(c) => (fmt_num(c.re), fmt_num(c.im)),
                Err(msg) => (ERROR_MARKER.to_string(), msg.clone()),
            };
            w.write_record([
                fmt_num(row.x),
                fmt_num(row.y),
                fmt_num(row.q),
                model.to_string(),
                re,
                im,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn json_num(v: f64) -> serde_json::Value {
    fmt_num(v)
        .parse::<serde_json::Number>()
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// JSON array of `{x, y, q, model, re, im}` objects; failed points carry
/// `re = im = null` and an `error` message.
pub fn to_json(rows: &[SweepRow]) -> serde_json::Value {
    let mut out = Vec::new();
    for row in rows {
        for (model, value) in &row.values {
            let mut obj = serde_json::Map::new();
            obj.insert("x".into(), json_num(row.x));
            obj.insert("y".into(), json_num(row.y));
            obj.insert("q".into(), json_num(row.q));
            obj.insert("model".into(), model.to_string().into());
            match value {
                Ok(c) => {
                    obj.insert("re".into(), json_num(c.re));
                    obj.insert("im".into(), json_num(c.im));
                }
                Err(msg) => {
                    obj.insert("re".into(), serde_json::Value::Null);
                    obj.insert("im".into(), serde_json::Value::Null);
                    obj.insert("error".into(), msg.clone().into());
                }
            }
            out.push(serde_json::Value::Object(obj));
        }
    }
    serde_json::Value::Array(out)
}
