use serde::{Deserialize, Serialize};

use super::GridSpec;
use crate::error::{Error, Result};

/// Decay metadata used for far-field treatment on truncated boxes.
///
/// Decaying fields (compact support or schwartz-like) are zero-extended
/// outside the box. Fields of unknown decay are treated as non-decaying:
/// nonlocal integrals over them are restricted to the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    CompactSupport,
    SchwartzLike,
    Unknown,
}

/// Values of u: ℝⁿ → ℝᵐ on a grid, stored point-major (all m components of a
/// point are contiguous).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    components: usize,
    values: Vec<f64>,
    decay: DecayClass,
}

impl SampledField {
    pub fn new(grid: GridSpec, components: usize, values: Vec<f64>, decay: DecayClass) -> Result<Self> {
        if components == 0 || values.len() != grid.len() * components {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values ({} points × {components}), got {}",
                grid.len() * components,
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SampledField { grid, components, values, decay })
    }

    pub fn zeros(grid: GridSpec, components: usize, decay: DecayClass) -> Self {
        SampledField { grid, components, values: vec![0.0; grid.len() * components], decay }
    }

    pub fn from_fn(
        grid: GridSpec,
        components: usize,
        decay: DecayClass,
        f: impl Fn(&[f64], &mut [f64]),
    ) -> Self {
        let mut values = vec![0.0; grid.len() * components];
        let mut x = vec![0.0; grid.dim()];
        for (i, out) in values.chunks_mut(components).enumerate() {
            grid.point(i, &mut x);
            f(&x, out);
        }
        SampledField { grid, components, values, decay }
    }

    pub fn scalar_fn(grid: GridSpec, decay: DecayClass, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, 1, decay, |x, out| out[0] = f(x))
    }

    /// Assemble from per-component arrays.
    pub fn from_components(grid: GridSpec, comps: &[Vec<f64>], decay: DecayClass) -> Result<Self> {
        let m = comps.len();
        let mut values = vec![0.0; grid.len() * m];
        for (c, comp) in comps.iter().enumerate() {
            if comp.len() != grid.len() {
                return Err(Error::ShapeMismatch("component length differs from grid size".into()));
            }
            for (i, v) in comp.iter().enumerate() {
                values[i * m + c] = *v;
            }
        }
        Self::new(grid, m, values, decay)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn decay(&self) -> DecayClass {
        self.decay
    }

    pub fn with_decay(mut self, decay: DecayClass) -> Self {
        self.decay = decay;
        self
    }

    pub fn at(&self, point: usize) -> &[f64] {
        &self.values[point * self.components..(point + 1) * self.components]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.components).copied().collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SampledField { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `self + a·other`; the result keeps the weaker decay class.
    pub fn axpy(&self, a: f64, other: &SampledField) -> Result<Self> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Ok(SampledField { values, decay: weaker(self.decay, other.decay), ..self.clone() })
    }

    pub fn add(&self, other: &SampledField) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// Pointwise product with a scalar field.
    pub fn multiply_scalar(&self, psi: &SampledField) -> Result<Self> {
        if psi.components != 1 || psi.grid != self.grid {
            return Err(Error::ShapeMismatch("multiplier must be a scalar field on the same grid".into()));
        }
        let m = self.components;
        let values = self.values.iter().enumerate().map(|(k, v)| v * psi.values[k / m]).collect();
        Ok(SampledField { values, ..self.clone() })
    }

    /// Grid inner product Σ u·v hⁿ.
    pub fn dot(&self, other: &SampledField) -> Result<f64> {
        self.check_same_shape(other)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.cell_volume())
    }

    /// Σ u hⁿ per component.
    pub fn integral(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.components];
        for chunk in self.values.chunks(self.components) {
            for (o, v) in out.iter_mut().zip(chunk) {
                *o += v;
            }
        }
        let w = self.grid.cell_volume();
        out.iter_mut().for_each(|o| *o *= w);
        out
    }

    /// Largest magnitude on the padding band (zero on periodic grids).
    pub fn band_max(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.grid.in_padding_band(i))
            .flat_map(|i| self.at(i).iter().map(|v| v.abs()))
            .fold(0.0, f64::max)
    }

    /// Checks finiteness and, for compactly supported fields on a box, that the
    /// padding band is identically zero.
    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.decay == DecayClass::CompactSupport && self.band_max() != 0.0 {
            return Err(Error::InvalidParameter(
                "compact-support field is nonzero on the padding band".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn check_same_shape(&self, other: &SampledField) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::ShapeMismatch("fields live on different grids or component counts".into()));
        }
        Ok(())
    }
}

fn weaker(a: DecayClass, b: DecayClass) -> DecayClass {
    use DecayClass::*;
    match (a, b) {
        (Unknown, _) | (_, Unknown) => Unknown,
        (SchwartzLike, _) | (_, SchwartzLike) => SchwartzLike,
        _ => CompactSupport,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_bad_shape() {
        let g = GridSpec::periodic(1, 4).unwrap();
        assert!(SampledField::new(g, 1, vec![0.0, 1.0, f64::NAN, 0.0], DecayClass::Unknown).is_err());
        assert!(SampledField::new(g, 2, vec![0.0; 4], DecayClass::Unknown).is_err());
    }

    #[test]
    fn compact_field_must_vanish_on_band() {
        let g = GridSpec::truncated(1, 1.0, 16).unwrap();
        let f = SampledField::scalar_fn(g, DecayClass::CompactSupport, |_| 1.0);
        assert!(f.validate().is_err());
        let f = SampledField::scalar_fn(g, DecayClass::CompactSupport, |x| (0.5 - x[0].abs()).max(0.0));
        assert!(f.validate().is_ok());
    }

    #[test]
    fn components_round_trip() {
        let g = GridSpec::periodic(1, 8).unwrap();
        let a: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..8).map(|i| -(i as f64)).collect();
        let f = SampledField::from_components(g, &[a.clone(), b.clone()], DecayClass::Unknown).unwrap();
        assert_eq!(f.component(0), a);
        assert_eq!(f.component(1), b);
        assert_eq!(f.at(3), &[3.0, -3.0]);
    }
}
