//! Uniform grids on the periodic unit cell or a truncated box standing in for
//! ℝⁿ, sampled fields, masks and discrete Lᵖ norms.

mod field;
pub mod io;
mod mask;
mod params;

pub use field::{DecayClass, SampledField};
pub use mask::Mask;
pub use params::{gamma_const, mu_const, nu_const, FractionalParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width (in cells) of the outer band of a truncated box on which
/// compactly supported fields must vanish.
pub const PADDING_BAND: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GridKind {
    PeriodicCell,
    TruncatedBox { half_extent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
struct RawGrid {
    dim: usize,
    kind: GridKind,
    points_per_axis: usize,
}

/// Validated grid description. Periodic cells sample `x_i = i h` on `[0, 1)`
/// with `h = 1/N`; truncated boxes sample `x_i = −L + i h` with `h = 2L/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    dim: usize,
    kind: GridKind,
    points_per_axis: usize,
    #[serde(skip_deserializing)]
    spacing: f64,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        GridSpec::new(raw.dim, raw.kind, raw.points_per_axis)
    }
}

impl GridSpec {
    pub fn new(dim: usize, kind: GridKind, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if points_per_axis < 4 || points_per_axis % 2 != 0 {
            return Err(Error::InvalidGrid("N must be even and ≥ 4".into()));
        }
        let length = match kind {
            GridKind::PeriodicCell => 1.0,
            GridKind::TruncatedBox { half_extent } => {
                if !(half_extent > 0.0) || !half_extent.is_finite() {
                    return Err(Error::InvalidGrid("half extent L must be positive".into()));
                }
                2.0 * half_extent
            }
        };
        Ok(GridSpec { dim, kind, points_per_axis, spacing: length / points_per_axis as f64 })
    }

    pub fn periodic(dim: usize, points_per_axis: usize) -> Result<Self> {
        Self::new(dim, GridKind::PeriodicCell, points_per_axis)
    }

    pub fn truncated(dim: usize, half_extent: f64, points_per_axis: usize) -> Result<Self> {
        Self::new(dim, GridKind::TruncatedBox { half_extent }, points_per_axis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, GridKind::PeriodicCell)
    }

    /// Side length of the sampled domain (1 for the periodic cell, 2L for a box).
    pub fn domain_length(&self) -> f64 {
        self.spacing * self.points_per_axis as f64
    }

    pub fn half_extent(&self) -> f64 {
        match self.kind {
            GridKind::PeriodicCell => 0.5,
            GridKind::TruncatedBox { half_extent } => half_extent,
        }
    }

    /// Quadrature weight hⁿ.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_axis; self.dim]
    }

    /// Coordinate of index `i` along any axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        let origin = match self.kind {
            GridKind::PeriodicCell => 0.0,
            GridKind::TruncatedBox { half_extent } => -half_extent,
        };
        origin + i as f64 * self.spacing
    }

    /// Row-major multi-index of a flat point index (last axis fastest).
    pub fn multi_index(&self, flat: usize, out: &mut [usize]) {
        let n = self.points_per_axis;
        let mut rest = flat;
        for d in (0..self.dim).rev() {
            out[d] = rest % n;
            rest /= n;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let n = self.points_per_axis;
        let mut rest = flat;
        for d in (0..self.dim).rev() {
            out[d] = self.coordinate(rest % n);
            rest /= n;
        }
    }

    /// Nearest grid point to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: &[f64]) -> usize {
        let origin = self.coordinate(0);
        let idx: Vec<usize> = x
            .iter()
            .map(|&c| {
                let k = ((c - origin) / self.spacing).round();
                k.clamp(0.0, (self.points_per_axis - 1) as f64) as usize
            })
            .collect();
        self.flat_index(&idx)
    }

    /// Whether a flat index lies in the outer padding band of a truncated box.
    pub fn in_padding_band(&self, flat: usize) -> bool {
        if self.is_periodic() {
            return false;
        }
        let n = self.points_per_axis;
        let mut rest = flat;
        for _ in 0..self.dim {
            let i = rest % n;
            rest /= n;
            if i < PADDING_BAND || i >= n - PADDING_BAND {
                return true;
            }
        }
        false
    }
}

/// Discrete Lᵖ norm `(Σ |u|ᵖ hⁿ)^{1/p}` of the pointwise Euclidean magnitude,
/// optionally restricted to a mask; `p = ∞` gives the max norm.
pub fn lp_norm(u: &SampledField, p: f64, region: Option<&Mask>) -> f64 {
    let m = u.components();
    let inside = |i: usize| region.map_or(true, |r| r.contains(i));
    let mags = u.values().chunks(m).enumerate().filter(|(i, _)| inside(*i)).map(|(_, v)| {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    });
    if p.is_infinite() {
        return mags.fold(0.0, f64::max);
    }
    let sum: f64 = mags.map(|a| a.powf(p)).sum();
    (sum * u.grid().cell_volume()).powf(1.0 / p)
}
