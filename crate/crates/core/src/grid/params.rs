use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma;

/// Normalization of the fractional gradient, μ_{n,α} = 2^α π^{−n/2} Γ((n+α+1)/2)/Γ((1−α)/2).
pub fn mu_const(n: usize, alpha: f64) -> f64 {
    let n = n as f64;
    2f64.powf(alpha) * PI.powf(-n / 2.0) * gamma((n + alpha + 1.0) / 2.0) / gamma((1.0 - alpha) / 2.0)
}

/// Riesz potential constant γ_{n,α} = π^{n/2} 2^α Γ(α/2)/Γ((n−α)/2), α ∈ (0, n).
pub fn gamma_const(n: usize, alpha: f64) -> f64 {
    let n = n as f64;
    PI.powf(n / 2.0) * 2f64.powf(alpha) * gamma(alpha / 2.0) / gamma((n - alpha) / 2.0)
}

/// Fractional Laplacian constant ν_{n,α} = 2^α π^{−n/2} Γ((n+α)/2)/Γ(−α/2), α ∈ (0, 2);
/// negative on that range.
pub fn nu_const(n: usize, alpha: f64) -> f64 {
    let n = n as f64;
    2f64.powf(alpha) * PI.powf(-n / 2.0) * gamma((n + alpha) / 2.0) / gamma(-alpha / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalParams {
    pub dim: usize,
    pub alpha: f64,
    pub p: f64,
    pub mu: f64,
    pub gamma: f64,
    pub nu: f64,
}

impl FractionalParams {
    pub fn new(dim: usize, alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p must lie in (1,∞), got {p}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(FractionalParams {
            dim,
            alpha,
            p,
            mu: mu_const(dim, alpha),
            gamma: gamma_const(dim, alpha),
            nu: nu_const(dim, alpha),
        })
    }

    /// Constants only, with p = 2.
    pub fn compute_constants(dim: usize, alpha: f64) -> Result<Self> {
        Self::new(dim, alpha, 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_half_order() {
        let c = FractionalParams::compute_constants(1, 0.5).unwrap();
        assert!((c.gamma - (2.0 * PI).sqrt()).abs() < 1e-12);
        let mu = 2f64.sqrt() / PI.sqrt() * gamma(1.25) / gamma(0.25);
        assert!((c.mu - mu).abs() < 1e-14);
        assert!(c.nu < 0.0);
    }

    #[test]
    fn nu_is_negative_everywhere() {
        for n in 1..=3 {
            for k in 1..20 {
                assert!(nu_const(n, k as f64 / 10.0) < 0.0);
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(FractionalParams::new(1, 1.0, 2.0).is_err());
        assert!(FractionalParams::new(1, 0.5, 1.0).is_err());
        assert!(FractionalParams::new(1, 0.0, 2.0).is_err());
    }
}
