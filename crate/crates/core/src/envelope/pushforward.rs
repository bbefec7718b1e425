use crate::error::{Error, Result};
use crate::fracops::{fractional_gradient, fractional_laplacian, spectral_derivative, Backend};
use crate::grid::{lp_norm, FractionalParams, SampledField};

#[derive(Debug, Clone, PartialEq)]
pub struct Pushforward {
    /// u = (−Δ)^{(1−α)/2} v plus the mean of v.
    pub field: SampledField,
    /// ∇^α u on the cell.
    pub fractional_gradient: SampledField,
    /// Relative L² gap between ∇^α u and the spectral gradient of v.
    pub residual: f64,
}

/// Periodic field u whose fractional gradient is the classical gradient of the
/// periodic field `v`.
pub fn periodic_pushforward(v: &SampledField, params: &FractionalParams) -> Result<Pushforward> {
    if !v.grid().is_periodic() {
        return Err(Error::BackendMismatch("push-forward needs a periodic cell".into()));
    }
    let backend = Backend::spectral();
    let s = 0.5 * (1.0 - params.alpha);
    let lifted = fractional_laplacian(v, s, &backend)?.field;
    let means: Vec<f64> = v.integral().iter().map(|m| m / v.grid().domain_length().powi(v.grid().dim() as i32)).collect();
    let m = v.components();
    let values = lifted.values().iter().enumerate().map(|(k, x)| x + means[k % m]).collect();
    let field = SampledField::new(*v.grid(), m, values, v.decay())?;
    let grad = fractional_gradient(&field, params, &backend)?.field;
    let classical = spectral_derivative(v, 1)?;
    let scale = lp_norm(&classical, 2.0, None);
    let gap = lp_norm(&grad.sub(&classical)?, 2.0, None);
    let residual = if scale > 0.0 { gap / scale } else { gap };
    Ok(Pushforward { field, fractional_gradient: grad, residual })
}
