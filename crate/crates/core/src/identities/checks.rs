use serde::Serialize;

use super::{fit_power_law, IdentityReport, InputDigest, PowerLaw};
use crate::error::{Error, Result};
use crate::fracops::{
    central_difference, fractional_gradient, fractional_laplacian, nonlocal_leibniz_remainder, riesz_potential,
    spectral_derivative, Backend,
};
use crate::grid::{lp_norm, DecayClass, FractionalParams, GridSpec, Mask, SampledField};

pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-3;

pub const ANCHOR_GRADIENT_DUALITY: &str = "fractional integration by parts for the gradient";
pub const ANCHOR_LAPLACIAN_DUALITY: &str = "self-adjointness of the fractional Laplacian";
pub const ANCHOR_COMPOSITION: &str = "composition rule (−Δ)^((1−α)/2) ∇^α = ∇^α (−Δ)^((1−α)/2) = ∇";
pub const ANCHOR_LEIBNIZ: &str = "fractional Leibniz rule with nonlocal remainder";
pub const ANCHOR_CUTOFF: &str = "cut-off commutator estimate C‖ψ‖∞^(1−α) Lip(ψ)^α ‖u‖_p";
pub const ANCHOR_LIFT: &str = "potential lift ∇ I_(1−α) u = ∇^α u";
pub const ANCHOR_PUSH: &str = "Laplacian push ∇^α (−Δ)^((1−α)/2) v = ∇v";
pub const ANCHOR_PUSH_BOUND: &str = "norm bound for the Laplacian push";
pub const ANCHOR_MEAN_ZERO: &str = "zero cell mean of periodic fractional gradients";
pub const ANCHOR_POINCARE: &str = "fractional Poincaré inequality";

fn default_tol(backend: &Backend) -> f64 {
    if backend.is_spectral() {
        DEFAULT_SPECTRAL_TOL
    } else {
        DEFAULT_QUADRATURE_TOL
    }
}

/// ‖a − b‖_p / ‖b‖_p over an optional region, 0 when both vanish.
pub fn relative_residual(a: &SampledField, b: &SampledField, p: f64, region: Option<&Mask>) -> Result<f64> {
    let diff = lp_norm(&a.sub(b)?, p, region);
    let scale = lp_norm(b, p, region);
    Ok(if diff == 0.0 { 0.0 } else { diff / scale })
}

/// Classical gradient consistent with the backend: spectral derivative for
/// the spectral backend, central differences for quadrature.
pub fn classical_gradient(u: &SampledField, backend: &Backend) -> Result<SampledField> {
    match *backend {
        Backend::Spectral { padding } => spectral_derivative(u, padding),
        Backend::Quadrature { .. } => Ok(central_difference(u)),
    }
}

fn inner_per_component(a: &SampledField, b: &SampledField, n: usize) -> Vec<f64> {
    // a has m·n components, b has m; returns Σ_x a_{c,d} b_c hⁿ per column d.
    let m = b.components();
    let w = a.grid().cell_volume();
    let mut out = vec![0.0; n];
    for i in 0..a.grid().len() {
        for c in 0..m {
            for (d, o) in out.iter_mut().enumerate() {
                *o += a.at(i)[c * n + d] * b.at(i)[c] * w;
            }
        }
    }
    out
}

/// ∫ ∇^α φ ψ = −∫ φ ∇^α ψ, residual relative to the Cauchy–Schwarz scale.
pub fn check_duality_gradient(phi: &SampledField, psi: &SampledField, params: &FractionalParams, backend: &Backend, tol: Option<f64>) -> Result<IdentityReport> {
    phi.check_same_shape(psi)?;
    let n = params.dim;
    let gphi = fractional_gradient(phi, params, backend)?.field;
    let gpsi = fractional_gradient(psi, params, backend)?.field;
    let lhs = inner_per_component(&gphi, psi, n);
    let rhs = inner_per_component(&gpsi, phi, n);
    let defect = lhs.iter().zip(&rhs).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt();
    let scale = lp_norm(&gphi, 2.0, None) * lp_norm(psi, 2.0, None) + lp_norm(phi, 2.0, None) * lp_norm(&gpsi, 2.0, None);
    let residual = if defect == 0.0 { 0.0 } else { defect / scale };
    let digest = InputDigest::new("duality-gradient").params(params).backend(backend).field(phi).field(psi).finish();
    Ok(IdentityReport::new("duality-gradient", ANCHOR_GRADIENT_DUALITY, residual, tol.unwrap_or(default_tol(backend)), digest))
}

/// ∫ (−Δ)^s φ ψ = ∫ φ (−Δ)^s ψ.
pub fn check_duality_laplacian(phi: &SampledField, psi: &SampledField, s: f64, backend: &Backend, tol: Option<f64>) -> Result<IdentityReport> {
    let lphi = fractional_laplacian(phi, s, backend)?.field;
    let lpsi = fractional_laplacian(psi, s, backend)?.field;
    let defect = (lphi.dot(psi)? - phi.dot(&lpsi)?).abs();
    let scale = lp_norm(&lphi, 2.0, None) * lp_norm(psi, 2.0, None) + lp_norm(phi, 2.0, None) * lp_norm(&lpsi, 2.0, None);
    let residual = if defect == 0.0 { 0.0 } else { defect / scale };
    let digest = InputDigest::new("duality-laplacian").scalar(s).backend(backend).field(phi).field(psi).finish();
    Ok(IdentityReport::new("duality-laplacian", ANCHOR_LAPLACIAN_DUALITY, residual, tol.unwrap_or(default_tol(backend)), digest))
}

/// Both orderings of the composition against the backend's classical gradient.
pub fn check_composition(phi: &SampledField, alpha: f64, backend: &Backend, tol: Option<f64>) -> Result<IdentityReport> {
    let params = FractionalParams::new(phi.grid().dim(), alpha, 2.0)?;
    let s = (1.0 - alpha) / 2.0;
    let target = classical_gradient(phi, backend)?;
    let first = fractional_laplacian(&fractional_gradient(phi, &params, backend)?.field, s, backend)?.field;
    let pushed = fractional_laplacian(phi, s, backend)?.field.with_decay(phi.decay());
    let second = fractional_gradient(&pushed, &params, backend)?.field;
    let residual = relative_residual(&first, &target, 2.0, None)?.max(relative_residual(&second, &target, 2.0, None)?);
    let tol = tol.unwrap_or(if backend.is_spectral() { 1e-6 } else { DEFAULT_QUADRATURE_TOL });
    let digest = InputDigest::new("composition").scalar(alpha).backend(backend).field(phi).finish();
    Ok(IdentityReport::new("composition", ANCHOR_COMPOSITION, residual, tol, digest))
}

/// ‖∇^α φ − ∇φ‖₂ / ‖∇φ‖₂, which vanishes as α → 1.
pub fn continuation_residual(phi: &SampledField, alpha: f64, backend: &Backend) -> Result<f64> {
    let params = FractionalParams::new(phi.grid().dim(), alpha, 2.0)?;
    let g = fractional_gradient(phi, &params, backend)?.field;
    relative_residual(&g, &classical_gradient(phi, backend)?, 2.0, None)
}

/// ∇^α(ψu) = ψ∇^α u + u∇^α ψ + ∇^α_NL(u, ψ), in Lᵖ relative to ‖∇^α(ψu)‖_p.
pub fn check_leibniz(u: &SampledField, psi: &SampledField, params: &FractionalParams, backend: &Backend, tol: Option<f64>) -> Result<IdentityReport> {
    let n = params.dim;
    let m = u.components();
    let psi_u = u.multiply_scalar(psi)?;
    let lhs = fractional_gradient(&psi_u, params, backend)?.field;
    let gu = fractional_gradient(u, params, backend)?.field;
    let gpsi = fractional_gradient(psi, params, backend)?.field;
    let nl = nonlocal_leibniz_remainder(u, psi, params, backend)?.field;
    let mut rhs = vec![0.0; lhs.values().len()];
    for i in 0..u.grid().len() {
        for c in 0..m {
            for d in 0..n {
                let k = i * m * n + c * n + d;
                rhs[k] = psi.values()[i] * gu.values()[k] + u.at(i)[c] * gpsi.values()[i * n + d] + nl.values()[k];
            }
        }
    }
    let rhs = SampledField::new(*u.grid(), m * n, rhs, DecayClass::Unknown)?;
    let residual = relative_residual(&rhs, &lhs, params.p, None)?;
    let digest = InputDigest::new("leibniz").params(params).backend(backend).field(u).field(psi).finish();
    Ok(IdentityReport::new("leibniz", ANCHOR_LEIBNIZ, residual, tol.unwrap_or(default_tol(backend)), digest))
}

/// Commutator norms ‖∇^α(ψ_k u_k) − ψ_k ∇^α u_k‖_p / ‖u_k‖_p for a family of
/// cut-offs with Lip(ψ_k) = Lip(ψ)/k.
#[derive(Debug, Clone, Serialize)]
pub struct CutoffSweep {
    pub ks: Vec<f64>,
    pub ratios: Vec<f64>,
    pub fit: PowerLaw,
}

/// Samples `ψ(x/k)` and, when `co_scaled`, `u(x/k)` on `grid` for each k and
/// fits the decay of the normalized commutator. With `co_scaled` the family
/// is the extremal one for the estimate and the fitted exponent is −α.
pub fn cutoff_sweep(
    grid: GridSpec,
    u: impl Fn(&[f64]) -> f64,
    psi: impl Fn(&[f64]) -> f64,
    params: &FractionalParams,
    backend: &Backend,
    ks: &[f64],
    co_scaled: bool,
) -> Result<CutoffSweep> {
    let mut ratios = Vec::with_capacity(ks.len());
    for &k in ks {
        let scaled = |x: &[f64]| x.iter().map(|c| c / k).collect::<Vec<f64>>();
        let uk = SampledField::scalar_fn(grid, DecayClass::CompactSupport, |x| if co_scaled { u(&scaled(x)) } else { u(x) });
        let psik = SampledField::scalar_fn(grid, DecayClass::Unknown, |x| psi(&scaled(x)));
        let lhs = fractional_gradient(&uk.multiply_scalar(&psik)?, params, backend)?.field;
        let gu = fractional_gradient(&uk, params, backend)?.field;
        let comm = lhs.sub(&gu.multiply_scalar(&psik)?)?;
        ratios.push(lp_norm(&comm, params.p, None) / lp_norm(&uk, params.p, None));
    }
    let fit = fit_power_law(ks, &ratios);
    Ok(CutoffSweep { ks: ks.to_vec(), ratios, fit })
}

/// Fitted decay exponent of the co-scaled cut-off family against α.
pub fn check_cutoff_estimate(sweep: &CutoffSweep, params: &FractionalParams, tol: Option<f64>) -> IdentityReport {
    let residual = (-sweep.fit.exponent - params.alpha).abs();
    let mut d = InputDigest::new("cutoff-estimate").params(params);
    for (k, r) in sweep.ks.iter().zip(&sweep.ratios) {
        d = d.scalar(*k).scalar(*r);
    }
    IdentityReport::new("cutoff-estimate", ANCHOR_CUTOFF, residual, tol.unwrap_or(0.1), d.finish())
}

fn interior_mask(grid: &GridSpec, cells: usize) -> Mask {
    let n = grid.points_per_axis();
    let mut idx = vec![0usize; grid.dim()];
    let bits = (0..grid.len())
        .map(|i| {
            grid.multi_index(i, &mut idx);
            idx.iter().all(|&k| k >= cells && k + cells < n)
        })
        .collect();
    Mask::new(*grid, bits).expect("mask sized to grid")
}

/// v = I_{1−α} u (quadrature) then ∇v by central differences against ∇^α u,
/// on the box interior.
pub fn check_potential_lift(u: &SampledField, params: &FractionalParams, tol: Option<f64>) -> Result<IdentityReport> {
    let backend = Backend::quadrature();
    let v = riesz_potential(u, 1.0 - params.alpha, &backend)?.field;
    let dv = central_difference(&v);
    let g = fractional_gradient(u, params, &backend)?.field;
    let interior = interior_mask(u.grid(), 1);
    let residual = relative_residual(&dv, &g, 2.0, Some(&interior))?;
    let digest = InputDigest::new("potential-lift").params(params).field(u).finish();
    Ok(IdentityReport::new("potential-lift", ANCHOR_LIFT, residual, tol.unwrap_or(DEFAULT_QUADRATURE_TOL), digest))
}

/// u = (−Δ)^{(1−α)/2} v, residual of ∇^α u against the classical ∇v.
pub fn check_laplacian_push(v: &SampledField, params: &FractionalParams, backend: &Backend, tol: Option<f64>) -> Result<IdentityReport> {
    let u = fractional_laplacian(v, (1.0 - params.alpha) / 2.0, backend)?.field.with_decay(v.decay());
    let g = fractional_gradient(&u, params, backend)?.field;
    let residual = relative_residual(&g, &classical_gradient(v, backend)?, 2.0, None)?;
    let tol = tol.unwrap_or(if backend.is_spectral() { 1e-6 } else { DEFAULT_QUADRATURE_TOL });
    let digest = InputDigest::new("laplacian-push").params(params).backend(backend).field(v).finish();
    Ok(IdentityReport::new("laplacian-push", ANCHOR_PUSH, residual, tol, digest))
}

/// Ratios ‖u‖_p / (‖v‖_p^a ‖∇v‖_p^b) for u = (−Δ)^{(1−α)/2} v over a family.
#[derive(Debug, Clone, Serialize)]
pub struct PushBoundFit {
    pub exponents: (f64, f64),
    pub ratios: Vec<f64>,
    pub constant: f64,
    /// max ratio / min ratio − 1.
    pub spread: f64,
}

/// Dilation-invariant exponents (α, 1 − α) of the Laplacian push bound.
pub fn push_bound_exponents(alpha: f64) -> (f64, f64) {
    (alpha, 1.0 - alpha)
}

pub fn laplacian_push_bound(family: &[SampledField], params: &FractionalParams, backend: &Backend, exponents: (f64, f64)) -> Result<PushBoundFit> {
    let p = params.p;
    let mut ratios = Vec::with_capacity(family.len());
    for v in family {
        let u = fractional_laplacian(v, (1.0 - params.alpha) / 2.0, backend)?.field;
        let dv = classical_gradient(v, backend)?;
        let denom = lp_norm(v, p, None).powf(exponents.0) * lp_norm(&dv, p, None).powf(exponents.1);
        ratios.push(lp_norm(&u, p, None) / denom);
    }
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PushBoundFit { exponents, constant: hi, spread: hi / lo - 1.0, ratios })
}

pub fn check_push_bound(fit: &PushBoundFit, tol: Option<f64>) -> IdentityReport {
    let mut d = InputDigest::new("push-bound").scalar(fit.exponents.0).scalar(fit.exponents.1);
    for r in &fit.ratios {
        d = d.scalar(*r);
    }
    IdentityReport::new("push-bound", ANCHOR_PUSH_BOUND, fit.spread, tol.unwrap_or(0.1), d.finish())
}

/// ∫ ∇^α u over a region (the whole grid when `region` is None), per column.
pub fn gradient_mean(u: &SampledField, params: &FractionalParams, backend: &Backend, region: Option<&Mask>) -> Result<Vec<f64>> {
    let g = fractional_gradient(u, params, backend)?.field;
    let w = u.grid().cell_volume();
    let k = g.components();
    let mut out = vec![0.0; k];
    for i in 0..u.grid().len() {
        if region.map_or(true, |r| r.contains(i)) {
            for (o, v) in out.iter_mut().zip(g.at(i)) {
                *o += v * w;
            }
        }
    }
    Ok(out)
}

/// |∫_Q ∇^α u| for a periodic field.
pub fn check_periodic_mean_zero(u: &SampledField, params: &FractionalParams, backend: &Backend, tol: Option<f64>) -> Result<IdentityReport> {
    if !u.grid().is_periodic() {
        return Err(Error::InvalidGrid("periodic mean check needs a periodic cell".into()));
    }
    let mean = gradient_mean(u, params, backend, None)?;
    let residual = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
    let digest = InputDigest::new("periodic-mean-zero").params(params).backend(backend).field(u).finish();
    Ok(IdentityReport::new("periodic-mean-zero", ANCHOR_MEAN_ZERO, residual, tol.unwrap_or(default_tol(backend)), digest))
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareFit {
    pub ratios: Vec<f64>,
    /// Maximum ratio over the first half of the samples.
    pub calibration_constant: f64,
    /// Maximum ratio over all samples.
    pub constant: f64,
}

/// Empirical Poincaré constant max ‖u‖_{Lᵖ(Ω)} / ‖∇^α u‖_p; passes when the
/// maximum is stable (within `tol`, default 20%) under doubling the sample count.
pub fn check_poincare(samples: &[SampledField], params: &FractionalParams, omega: &Mask, backend: &Backend, tol: Option<f64>) -> Result<(IdentityReport, PoincareFit)> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("Poincaré check needs at least two samples".into()));
    }
    let outside = omega.complement();
    let mut ratios = Vec::with_capacity(samples.len());
    let mut digest = InputDigest::new("poincare").params(params).backend(backend);
    for u in samples {
        if lp_norm(u, f64::INFINITY, None) == 0.0 {
            return Err(Error::InvalidParameter("zero sample has an undefined Poincaré ratio".into()));
        }
        if lp_norm(u, f64::INFINITY, Some(&outside)) != 0.0 {
            return Err(Error::InvalidParameter("Poincaré samples must vanish outside Ω".into()));
        }
        let g = fractional_gradient(u, params, backend)?.field;
        ratios.push(lp_norm(u, params.p, Some(omega)) / lp_norm(&g, params.p, None));
        digest = digest.field(u);
    }
    let half = ratios.len() / 2;
    let calibration_constant = ratios[..half].iter().copied().fold(0.0, f64::max);
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    let residual = if constant.is_finite() { constant / calibration_constant - 1.0 } else { f64::INFINITY };
    let report = IdentityReport::new("poincare", ANCHOR_POINCARE, residual, tol.unwrap_or(0.2), digest.finish());
    Ok((report, PoincareFit { ratios, calibration_constant, constant }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{gaussian, smooth_bump};

    #[test]
    fn even_pair_has_zero_duality_residual() {
        let grid = GridSpec::truncated(1, 4.0, 256).unwrap();
        let phi = smooth_bump(grid, &[0.0], 1.0);
        let params = FractionalParams::new(1, 0.5, 2.0).unwrap();
        let r = check_duality_gradient(&phi, &phi, &params, &Backend::quadrature(), None).unwrap();
        assert!(r.passed && r.residual < 1e-14);
    }

    #[test]
    fn zero_field_composition_is_exact() {
        let grid = GridSpec::periodic(1, 64).unwrap();
        let zero = SampledField::zeros(grid, 1, DecayClass::CompactSupport);
        let r = check_composition(&zero, 0.4, &Backend::spectral(), None).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn leibniz_with_unit_multiplier() {
        let grid = GridSpec::truncated(1, 4.0, 256).unwrap();
        let u = gaussian(grid, &[0.3], 0.8);
        let one = SampledField::scalar_fn(grid, DecayClass::Unknown, |_| 1.0);
        let params = FractionalParams::new(1, 0.5, 2.0).unwrap();
        let r = check_leibniz(&u, &one, &params, &Backend::quadrature(), None).unwrap();
        assert!(r.residual < 1e-12, "{}", r.residual);
    }

    #[test]
    fn failure_message_names_the_anchor() {
        let r = IdentityReport::new("x", ANCHOR_COMPOSITION, 1.0, 0.1, String::new());
        assert!(!r.passed);
        assert!(r.message().contains(ANCHOR_COMPOSITION));
    }

    #[test]
    fn digest_is_deterministic_and_input_sensitive() {
        let grid = GridSpec::periodic(1, 16).unwrap();
        let u = SampledField::scalar_fn(grid, DecayClass::Unknown, |x| x[0]);
        let a = InputDigest::new("t").field(&u).finish();
        assert_eq!(a, InputDigest::new("t").field(&u).finish());
        assert_ne!(a, InputDigest::new("t").field(&u.scale(2.0)).finish());
    }
}
