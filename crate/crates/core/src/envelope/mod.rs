//! Convex and quasiconvex envelopes, rank-one laminate bounds, the
//! α-quasiconvexity violation search and the periodic push-forward.

mod hull;
mod laminate;
mod pushforward;
mod violation;

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hull::{convex_envelope_1d, lower_hull};
pub use laminate::{laminate_upper_bound, LaminateOptions};
pub use pushforward::{periodic_pushforward, Pushforward};
pub use violation::{alpha_qc_violation_search, SearchBudget, ViolationWitness};

/// Two-sided growth c|A|ᵖ ≤ f(A) ≤ C|A|ᵖ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pinching {
    pub lower: f64,
    pub upper: f64,
    pub p: f64,
}

impl Pinching {
    /// Whether `lo ≤ value ≤ hi` up to `tol`, with lo, hi the growth bounds at |A|.
    pub fn brackets(&self, norm: f64, value: f64, tol: f64) -> bool {
        let base = norm.powf(self.p);
        value >= self.lower * base - tol && value <= self.upper * base + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeMethod {
    Biconjugate1d,
    Lamination { depth: usize },
}

/// Sampled integrand and envelope over a box in matrix space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTable {
    /// (m, n) of the sampled matrices.
    pub shape: (usize, usize),
    /// Row-major matrix entries per sample.
    pub samples: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    pub f_qc: Vec<f64>,
    pub method: EnvelopeMethod,
    pub pinching: Option<Pinching>,
}

impl EnvelopeTable {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Range of a scalar table.
    pub fn range(&self) -> Option<(f64, f64)> {
        if self.shape != (1, 1) || self.is_empty() {
            return None;
        }
        Some((self.samples[0][0], self.samples[self.len() - 1][0]))
    }

    /// Piecewise-linear envelope value at `a` for a scalar table; `None`
    /// outside the sampled range.
    pub fn interpolate(&self, a: f64) -> Option<f64> {
        let (lo, hi) = self.range()?;
        if !(a >= lo && a <= hi) {
            return None;
        }
        let k = self.samples.partition_point(|s| s[0] <= a).clamp(1, self.len() - 1);
        let (x0, x1) = (self.samples[k - 1][0], self.samples[k][0]);
        let t = if x1 > x0 { (a - x0) / (x1 - x0) } else { 0.0 };
        Some(self.f_qc[k - 1] * (1.0 - t) + self.f_qc[k] * t)
    }

    /// Largest f^qc − f over the samples (nonpositive for a valid table).
    pub fn max_excess(&self) -> f64 {
        self.f.iter().zip(&self.f_qc).map(|(f, q)| q - f).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether c|A|ᵖ ≤ f^qc ≤ f ≤ C|A|ᵖ at every sample.
    pub fn sandwich_holds(&self, tol: f64) -> Option<bool> {
        let pinch = self.pinching?;
        Some(self.samples.iter().zip(self.f.iter().zip(&self.f_qc)).all(|(a, (f, q))| {
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            *q <= f + tol && pinch.brackets(norm, *q, tol) && pinch.brackets(norm, *f, tol)
        }))
    }

    pub fn to_csv(&self) -> String {
        let entries = self.shape.0 * self.shape.1;
        let mut out = String::new();
        let head: Vec<String> = (0..entries).map(|k| format!("a{k}")).collect();
        let _ = writeln!(out, "{},f,f_qc", head.join(","));
        for (a, (f, q)) in self.samples.iter().zip(self.f.iter().zip(&self.f_qc)) {
            let row: Vec<String> = a.iter().map(|x| format!("{x:.17e}")).collect();
            let _ = writeln!(out, "{},{f:.17e},{q:.17e}", row.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(Error::from)
    }
}
