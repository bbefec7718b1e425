//! Discrete complementary-value spaces: fields equal to a datum g outside a
//! bounded open set Ω.

mod construction;
mod diagnostic;

pub use construction::{
    construct_prescribed, prescribed_with_datum, template_beta, ConstructionOptions, ConstructionResult, PrescribedField,
};
pub use diagnostic::{strong_outside_diagnostic, OutsideDiagnostic, OutsideRow};

use crate::error::{Error, Result};
use crate::grid::{Mask, SampledField};

/// Default margin (in cells) between Ω and the enlarged set Ω′.
pub const DEFAULT_MARGIN: usize = 4;
/// Smallest accepted margin between Ω and Ω′.
pub const MIN_MARGIN: usize = 2;

#[derive(Debug, Clone)]
pub struct ComplementarySpec {
    omega: Mask,
    g: SampledField,
    omega_prime: Mask,
}

impl ComplementarySpec {
    pub fn new(omega: Mask, g: SampledField, omega_prime: Mask) -> Result<Self> {
        if omega.grid() != g.grid() || omega_prime.grid() != g.grid() {
            return Err(Error::ShapeMismatch("Ω, Ω′ and g must share one grid".into()));
        }
        if omega.count() == 0 {
            return Err(Error::InvalidParameter("Ω is empty".into()));
        }
        if !omega.dilate(MIN_MARGIN).is_subset_of(&omega_prime) {
            return Err(Error::InvalidParameter(format!(
                "Ω′ must contain Ω with a margin of at least {MIN_MARGIN} cells"
            )));
        }
        if omega_prime.count() == g.grid().len() {
            return Err(Error::InvalidParameter("Ω′ must leave a nonempty exterior".into()));
        }
        Ok(ComplementarySpec { omega, g, omega_prime })
    }

    /// Ω′ obtained by dilating Ω by `margin` cells.
    pub fn with_margin(omega: Mask, g: SampledField, margin: usize) -> Result<Self> {
        let prime = omega.dilate(margin);
        Self::new(omega, g, prime)
    }

    pub fn omega(&self) -> &Mask {
        &self.omega
    }

    pub fn g(&self) -> &SampledField {
        &self.g
    }

    pub fn omega_prime(&self) -> &Mask {
        &self.omega_prime
    }
}

/// u on Ω, g on the complement.
pub fn project_complementary(u: &SampledField, spec: &ComplementarySpec) -> Result<SampledField> {
    u.check_same_shape(&spec.g)?;
    let m = u.components();
    let values = u
        .values()
        .iter()
        .zip(spec.g.values())
        .enumerate()
        .map(|(k, (a, b))| if spec.omega.contains(k / m) { *a } else { *b })
        .collect();
    SampledField::new(*u.grid(), m, values, spec.g.decay())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::grid::{DecayClass, GridSpec};

    fn spec(g: SampledField) -> ComplementarySpec {
        let omega = Mask::open_box(*g.grid(), &[0.0], &[1.0]);
        ComplementarySpec::with_margin(omega, g, DEFAULT_MARGIN).unwrap()
    }

    #[test]
    fn rejects_thin_margin() {
        let grid = GridSpec::truncated(1, 2.0, 64).unwrap();
        let omega = Mask::open_box(grid, &[0.0], &[1.0]);
        let g = SampledField::zeros(grid, 1, DecayClass::CompactSupport);
        assert!(ComplementarySpec::with_margin(omega.clone(), g.clone(), 1).is_err());
        assert!(ComplementarySpec::with_margin(omega, g, 2).is_ok());
    }

    #[test]
    fn projection_keeps_datum_outside() {
        let grid = GridSpec::truncated(1, 2.0, 64).unwrap();
        let g = SampledField::zeros(grid, 1, DecayClass::CompactSupport);
        let s = spec(g.clone());
        assert_eq!(project_complementary(&g, &s).unwrap(), g);
        let u = SampledField::scalar_fn(grid, DecayClass::Unknown, |x| 1.0 + x[0]);
        let p = project_complementary(&u, &s).unwrap();
        for i in 0..64 {
            if !s.omega().contains(i) {
                assert_eq!(p.values()[i], 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(vals in proptest::collection::vec(-5.0f64..5.0, 32)) {
            let grid = GridSpec::truncated(1, 2.0, 32).unwrap();
            let g = SampledField::scalar_fn(grid, DecayClass::SchwartzLike, |x| (-x[0] * x[0]).exp());
            let s = spec(g);
            let u = SampledField::new(grid, 1, vals, DecayClass::Unknown).unwrap();
            let once = project_complementary(&u, &s).unwrap();
            prop_assert_eq!(project_complementary(&once, &s).unwrap(), once);
        }
    }
}
