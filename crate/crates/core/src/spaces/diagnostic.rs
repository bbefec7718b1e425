//! Tail control of fractional gradients away from Ω.

use rayon::prelude::*;
use serde::Serialize;

use super::ComplementarySpec;
use crate::error::{Error, Result};
use crate::fracops::{fractional_gradient, Backend};
use crate::grid::{lp_norm, FractionalParams, SampledField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutsideRow {
    pub index: usize,
    /// ‖u_j − u‖_p over the grid.
    pub norm: f64,
    /// ‖∇^α(u_j − u)‖_p over the complement of Ω′.
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutsideDiagnostic {
    pub rows: Vec<OutsideRow>,
    /// max tail/norm over the calibration rows.
    pub constant: f64,
    pub calibration: usize,
    pub passed: bool,
}

impl OutsideDiagnostic {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

const SLACK: f64 = 1e-9;

/// For each member u_j (vanishing outside Ω), compares the tail norm of
/// ∇^α(u_j − u) on (Ω′)^c against ‖u_j − u‖_p. The proportionality constant
/// is fitted on the first `calibration` members and checked on all of them.
pub fn strong_outside_diagnostic(
    sequence: &[SampledField],
    limit: Option<&SampledField>,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
    calibration: usize,
) -> Result<OutsideDiagnostic> {
    if sequence.is_empty() {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    let calibration = calibration.clamp(1, sequence.len());
    let outside = spec.omega_prime().complement();
    let rows = sequence
        .par_iter()
        .enumerate()
        .map(|(index, u)| {
            for i in spec.omega().complement().indices() {
                if u.at(i).iter().any(|v| *v != 0.0) {
                    return Err(Error::InvalidParameter(format!("member {index} does not vanish outside Ω")));
                }
            }
            let diff = match limit {
                Some(l) => u.sub(l)?,
                None => u.clone(),
            };
            let grad = fractional_gradient(&diff, params, backend)?.field;
            Ok(OutsideRow {
                index,
                norm: lp_norm(&diff, params.p, None),
                tail: lp_norm(&grad, params.p, Some(&outside)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let constant = rows[..calibration]
        .iter()
        .filter(|r| r.norm > 0.0)
        .map(|r| r.tail / r.norm)
        .fold(0.0, f64::max);
    let passed = rows.iter().all(|r| r.tail <= constant * r.norm * (1.0 + SLACK) + f64::MIN_POSITIVE);
    Ok(OutsideDiagnostic { rows, constant, calibration, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{oscillating_bump, smooth_bump};
    use crate::grid::{DecayClass, GridSpec, Mask};

    #[test]
    fn constant_sequence_has_zero_differences() {
        let grid = GridSpec::truncated(1, 2.0, 256).unwrap();
        let omega = Mask::open_box(grid, &[0.0], &[1.0]);
        let spec = ComplementarySpec::with_margin(omega, SampledField::zeros(grid, 1, DecayClass::CompactSupport), 4).unwrap();
        let u = smooth_bump(grid, &[0.5], 0.5);
        let params = FractionalParams::new(1, 0.5, 2.0).unwrap();
        let rep = strong_outside_diagnostic(&vec![u.clone(); 3], Some(&u), &spec, &params, &Backend::quadrature(), 2).unwrap();
        assert!(rep.rows.iter().all(|r| r.tail == 0.0 && r.norm == 0.0));
        assert!(rep.passed);
    }

    #[test]
    fn oscillation_tail_is_bounded() {
        let grid = GridSpec::truncated(1, 2.0, 512).unwrap();
        let omega = Mask::open_box(grid, &[0.0], &[1.0]);
        let spec = ComplementarySpec::with_margin(omega, SampledField::zeros(grid, 1, DecayClass::CompactSupport), 4).unwrap();
        let params = FractionalParams::new(1, 0.5, 2.0).unwrap();
        let seq: Vec<_> = (1..=16).map(|j| oscillating_bump(grid, &[0.5], 0.5, j, 1.0)).collect();
        let rep = strong_outside_diagnostic(&seq, None, &spec, &params, &Backend::quadrature(), 4).unwrap();
        assert!(rep.passed, "{rep:?}");
        let first = rep.rows[0].tail;
        assert!(rep.rows.iter().all(|r| r.tail <= first * (1.0 + 1e-9)));
    }

    #[test]
    fn rejects_members_leaking_outside() {
        let grid = GridSpec::truncated(1, 2.0, 128).unwrap();
        let omega = Mask::open_box(grid, &[0.0], &[1.0]);
        let spec = ComplementarySpec::with_margin(omega, SampledField::zeros(grid, 1, DecayClass::CompactSupport), 4).unwrap();
        let params = FractionalParams::new(1, 0.5, 2.0).unwrap();
        let u = smooth_bump(grid, &[0.0], 0.5);
        assert!(strong_outside_diagnostic(&[u], None, &spec, &params, &Backend::quadrature(), 1).is_err());
    }
}
