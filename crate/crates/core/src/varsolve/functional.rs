//! The discrete functional F(u) = Σ f(x, u, ∇^α u) hⁿ and its first variation.

use std::f64::consts::PI;

use super::integrand::Integrand;
use crate::error::{Error, Result};
use crate::fracops::{fractional_divergence_adjoint, fractional_gradient, Backend};
use crate::grid::{DecayClass, FractionalParams, SampledField};
use crate::spaces::{project_complementary, ComplementarySpec};
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub value: f64,
    /// Estimated contribution of the exterior of a truncated box.
    pub tail_estimate: f64,
    /// Set when f left its declared growth envelope at some sample.
    pub growth_warning: bool,
}

pub(crate) fn check_inputs(u: &SampledField, spec: &ComplementarySpec, params: &FractionalParams) -> Result<()> {
    if u.grid() != spec.g().grid() || u.components() != spec.g().components() {
        return Err(Error::ShapeMismatch("u and g differ in grid or components".into()));
    }
    if params.dim != u.grid().dim() {
        return Err(Error::InvalidParameter(format!("params dimension {} on a {}-D grid", params.dim, u.grid().dim())));
    }
    Ok(())
}

/// Sums `integrand(x, z, A)·hⁿ` over the grid for `u` and its gradient `grad`.
pub(crate) fn integrate_pointwise(
    u: &SampledField,
    grad: &SampledField,
    mut integrand: impl FnMut(usize, &[f64], &[f64], &[f64]) -> f64,
) -> f64 {
    let grid = u.grid();
    let mut x = vec![0.0; grid.dim()];
    let mut sum = 0.0;
    for i in 0..grid.len() {
        grid.point(i, &mut x);
        sum += integrand(i, &x, u.at(i), grad.at(i));
    }
    sum * grid.cell_volume()
}

/// Power-law extrapolation of ∫ C|∇^α u|ᵖ beyond the box from the boundary
/// band, where ∇^α u decays like |x|^{−n−α}.
pub(crate) fn exterior_tail(grad: &SampledField, f: &Integrand, params: &FractionalParams) -> f64 {
    let grid = grad.grid();
    if grid.is_periodic() {
        return 0.0;
    }
    let n = grid.dim() as f64;
    let edge = grad.band_max();
    let sphere = 2.0 * PI.powf(0.5 * n) / gamma(0.5 * n);
    let decay = (n + params.alpha) * f.growth.p - n;
    f.growth.upper * edge.powf(f.growth.p) * sphere * grid.half_extent().powf(n) / decay
}

/// F(u) over the grid after projecting u onto the complementary-value space.
pub fn evaluate_functional(
    u: &SampledField,
    f: &Integrand,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
) -> Result<Energy> {
    check_inputs(u, spec, params)?;
    let u = project_complementary(u, spec)?;
    let grad = fractional_gradient(&u, params, backend)?.field;
    let mut warning = false;
    let value = integrate_pointwise(&u, &grad, |_, x, z, a| {
        let v = f.eval(x, z, a);
        if !f.growth.admits(z, a, v) {
            warning = true;
        }
        v
    });
    if !value.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(Energy { value, tail_estimate: exterior_tail(&grad, f, params), growth_warning: warning })
}

/// L² first variation ∂_z f − div^α(∂_A f) of F at u, zero outside Ω.
/// Exact transpose of the discrete gradient, so ⟨grad, δu⟩ is the
/// derivative of F along δu.
pub fn functional_gradient(
    u: &SampledField,
    f: &Integrand,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
) -> Result<SampledField> {
    check_inputs(u, spec, params)?;
    let u = project_complementary(u, spec)?;
    let grid = *u.grid();
    let (m, n) = (u.components(), grid.dim());
    let grad = fractional_gradient(&u, params, backend)?.field;

    let mut x = vec![0.0; n];
    let mut flux = vec![0.0; grid.len() * m * n];
    let mut source = vec![0.0; grid.len() * m];
    for i in 0..grid.len() {
        grid.point(i, &mut x);
        f.deriv_a(&x, u.at(i), grad.at(i), &mut flux[i * m * n..(i + 1) * m * n])?;
        f.deriv_z(&x, u.at(i), grad.at(i), &mut source[i * m..(i + 1) * m]);
    }
    let flux = SampledField::new(grid, m * n, flux, DecayClass::CompactSupport)?;
    let div = fractional_divergence_adjoint(&flux, params, backend)?;

    // box-restricted fields see K u − u·K(1); its transpose adds −P·K(1)
    let restriction = if !grid.is_periodic() && u.decay() == DecayClass::Unknown {
        let ones = SampledField::scalar_fn(grid, DecayClass::CompactSupport, |_| 1.0);
        Some(fractional_gradient(&ones, params, backend)?.field)
    } else {
        None
    };

    let mut out = vec![0.0; grid.len() * m];
    for i in spec.omega().indices() {
        for c in 0..m {
            let mut v = source[i * m + c] - div.at(i)[c];
            if let Some(k1) = &restriction {
                v -= (0..n).map(|d| flux.at(i)[c * n + d] * k1.at(i)[d]).sum::<f64>();
            }
            out[i * m + c] = v;
        }
    }
    SampledField::new(grid, m, out, DecayClass::CompactSupport)
}
