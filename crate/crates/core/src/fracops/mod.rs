//! Riesz potential, fractional gradient, fractional Laplacian, the nonlocal
//! Leibniz remainder and the discrete fractional divergence.
//!
//! Two backends share one FFT convolution engine. The spectral backend applies
//! Fourier multipliers on the periodic cell, or on a zero-padded periodic box
//! when the grid is a truncated box. The quadrature backend evaluates the
//! singular integrals as lattice sums with closed-form near-field corrections.

mod engine;
mod quadrature;
mod spectral;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, DecayClass, FractionalParams, GridSpec, SampledField};
use engine::{cached, convolve, CacheKey, Multiplier};

/// Default zero-padding factor of the spectral backend on truncated boxes.
pub const DEFAULT_BOX_PADDING: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Backend {
    /// Fourier multipliers. `padding` must be 1 on a periodic cell and at
    /// least 2 on a truncated box (the box is embedded in a `padding`-times
    /// larger periodic box).
    Spectral { padding: usize },
    /// Lattice quadrature. `singularity_radius` defaults to h/2, `far_cutoff`
    /// to the whole domain.
    Quadrature { singularity_radius: Option<f64>, far_cutoff: Option<f64> },
}

impl Backend {
    pub fn spectral() -> Self {
        Backend::Spectral { padding: 1 }
    }

    pub fn padded_spectral(padding: usize) -> Self {
        Backend::Spectral { padding }
    }

    pub fn quadrature() -> Self {
        Backend::Quadrature { singularity_radius: None, far_cutoff: None }
    }

    /// Spectral backend with the padding appropriate for `grid`.
    pub fn spectral_for(grid: &GridSpec) -> Self {
        if grid.is_periodic() {
            Self::spectral()
        } else {
            Self::padded_spectral(DEFAULT_BOX_PADDING)
        }
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self, Backend::Spectral { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorResult {
    pub field: SampledField,
    /// Bound on the discarded far-field contribution (zero for spectral).
    pub truncation_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Operator {
    Gradient { alpha: f64 },
    Laplacian { s: f64 },
    Potential { order: f64 },
}

impl Operator {
    fn directions(&self, dim: usize) -> usize {
        match self {
            Operator::Gradient { .. } => dim,
            _ => 1,
        }
    }

    fn is_odd(&self) -> bool {
        matches!(self, Operator::Gradient { .. })
    }

    fn tag_and_order(&self) -> (u8, f64) {
        match *self {
            Operator::Gradient { alpha } => (0, alpha),
            Operator::Laplacian { s } => (1, s),
            Operator::Potential { order } => (2, order),
        }
    }
}

fn multiplier(op: Operator, grid: &GridSpec, backend: &Backend, params: Option<&FractionalParams>, raw: bool) -> Result<Arc<Multiplier>> {
    let (tag, order) = op.tag_and_order();
    let extent_bits = if grid.is_periodic() { 0 } else { grid.half_extent().to_bits() };
    match *backend {
        Backend::Spectral { padding } => {
            if grid.is_periodic() && padding != 1 {
                return Err(Error::BackendMismatch("spectral padding must be 1 on a periodic cell".into()));
            }
            if !grid.is_periodic() && padding < 2 {
                return Err(Error::BackendMismatch(
                    "spectral backend on a truncated box needs zero padding ≥ 2 (periodification)".into(),
                ));
            }
            let key = CacheKey {
                tag,
                order_bits: order.to_bits(),
                dim: grid.dim(),
                points: grid.points_per_axis(),
                extent_bits,
                periodic: grid.is_periodic(),
                a: padding as u64,
                b: u64::MAX,
            };
            cached(key, || Ok(spectral::build(op, grid, padding)))
        }
        Backend::Quadrature { singularity_radius, far_cutoff } => {
            let h = grid.spacing();
            let delta = singularity_radius.unwrap_or(0.5 * h);
            if delta < 0.5 * h - 1e-15 {
                return Err(Error::InvalidParameter(format!("singularity radius {delta} is below h/2")));
            }
            if let Some(r) = far_cutoff {
                if grid.is_periodic() {
                    return Err(Error::InvalidParameter("far cutoff applies to truncated boxes only".into()));
                }
                if r > grid.half_extent() || r <= delta {
                    return Err(Error::InvalidParameter(format!("far cutoff {r} outside (δ, L]")));
                }
            }
            let dim = grid.dim();
            let (mu, nu, gamma) = match op {
                Operator::Gradient { alpha } => {
                    (params.map(|p| p.mu).unwrap_or_else(|| crate::grid::mu_const(dim, alpha)), 0.0, 0.0)
                }
                Operator::Laplacian { s } => (0.0, crate::grid::nu_const(dim, 2.0 * s), 0.0),
                Operator::Potential { order } => (0.0, 0.0, crate::grid::gamma_const(dim, order)),
            };
            let setup = quadrature::QuadratureSetup { op, singularity_radius: delta, far_cutoff, raw, mu, nu, gamma };
            let key = CacheKey {
                tag: tag + if raw { 10 } else { 0 },
                order_bits: order.to_bits(),
                dim,
                points: grid.points_per_axis(),
                extent_bits,
                periodic: grid.is_periodic(),
                a: delta.to_bits(),
                b: far_cutoff.map_or(u64::MAX - 1, f64::to_bits),
            };
            cached(key, || quadrature::build(&setup, grid))
        }
    }
}

/// Applies `op` to every component; output components are ordered
/// `c * directions + d`.
///
/// On a truncated box, decaying fields are zero-extended; fields of unknown
/// decay are treated as non-decaying and the integral is restricted to the
/// box (`K_box u = K u − u·K 1`), which annihilates constants.
fn apply(u: &SampledField, op: Operator, backend: &Backend, params: Option<&FractionalParams>, raw: bool, conj: bool) -> Result<(Vec<Vec<f64>>, Arc<Multiplier>)> {
    let grid = u.grid();
    let mult = multiplier(op, grid, backend, params, raw)?;
    let restrict = box_restricted(u) && !matches!(op, Operator::Potential { .. });
    let ones = if restrict { Some(convolve(grid, &vec![1.0; grid.len()], &mult, conj)) } else { None };
    let mut outs = Vec::new();
    for c in 0..u.components() {
        let uc = u.component(c);
        let mut part = convolve(grid, &uc, &mult, conj);
        if let Some(ones) = &ones {
            for (out, one) in part.iter_mut().zip(ones) {
                for ((o, k1), v) in out.iter_mut().zip(one).zip(&uc) {
                    *o -= v * k1;
                }
            }
        }
        outs.extend(part);
    }
    Ok((outs, mult))
}

fn box_restricted(u: &SampledField) -> bool {
    !u.grid().is_periodic() && u.decay() == DecayClass::Unknown
}

/// Decay class of an operator output: decaying inputs give decaying outputs.
fn output_decay(u: &SampledField) -> DecayClass {
    match u.decay() {
        DecayClass::Unknown => DecayClass::Unknown,
        _ => DecayClass::SchwartzLike,
    }
}

fn truncation(u: &SampledField, mult: &Multiplier, backend: &Backend) -> f64 {
    if backend.is_spectral() {
        return 0.0;
    }
    let sup = lp_norm(u, f64::INFINITY, None);
    let band = if box_restricted(u) { 2.0 * sup } else { u.band_max() };
    let cut = mult.cut_abs.iter().copied().fold(0.0, f64::max);
    let total = mult.total_abs.iter().copied().fold(0.0, f64::max);
    sup * (cut + mult.image_tail) + band * total
}

/// Riesz potential I_order u, `order ∈ (0, n)`.
pub fn riesz_potential(u: &SampledField, order: f64, backend: &Backend) -> Result<OperatorResult> {
    let n = u.grid().dim() as f64;
    if !(order > 0.0 && order < n) {
        return Err(Error::InvalidParameter(format!("potential order must lie in (0, {n}), got {order}")));
    }
    if !u.grid().is_periodic() && u.decay() == DecayClass::Unknown {
        return Err(Error::IllDefinedTail(
            "Riesz potential on a truncated box needs compact-support or schwartz-like decay".into(),
        ));
    }
    let (outs, mult) = apply(u, Operator::Potential { order }, backend, None, false, false)?;
    let field = SampledField::from_components(*u.grid(), &outs, DecayClass::Unknown)?;
    Ok(OperatorResult { truncation_estimate: truncation(u, &mult, backend), field })
}

/// Riesz fractional gradient ∇^α u; an m-component field maps to an
/// (m·n)-component field (row-major m × n matrices).
pub fn fractional_gradient(u: &SampledField, params: &FractionalParams, backend: &Backend) -> Result<OperatorResult> {
    check_dim(u, params)?;
    let (outs, mult) = apply(u, Operator::Gradient { alpha: params.alpha }, backend, Some(params), false, false)?;
    let field = SampledField::from_components(*u.grid(), &outs, output_decay(u))?;
    Ok(OperatorResult { truncation_estimate: truncation(u, &mult, backend), field })
}

/// Fractional Laplacian (−Δ)^s, kernel exponent n + 2s, `s ∈ (0, 1)`.
pub fn fractional_laplacian(u: &SampledField, s: f64, backend: &Backend) -> Result<OperatorResult> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("Laplacian order s must lie in (0,1), got {s}")));
    }
    let (outs, mult) = apply(u, Operator::Laplacian { s }, backend, None, false, false)?;
    let field = SampledField::from_components(*u.grid(), &outs, output_decay(u))?;
    Ok(OperatorResult { truncation_estimate: truncation(u, &mult, backend), field })
}

/// Discrete fractional divergence, the negative transpose of the discrete
/// fractional gradient of decaying fields: ⟨∇^α_h u, V⟩ + ⟨u, div^α_h V⟩ = 0.
pub fn fractional_divergence_adjoint(v: &SampledField, params: &FractionalParams, backend: &Backend) -> Result<SampledField> {
    let n = v.grid().dim();
    if v.components() % n != 0 {
        return Err(Error::ShapeMismatch(format!("{} components is not a multiple of n = {n}", v.components())));
    }
    let m = v.components() / n;
    let mult = multiplier(Operator::Gradient { alpha: params.alpha }, v.grid(), backend, Some(params), false)?;
    let mut comps = vec![vec![0.0; v.grid().len()]; m];
    for (c, comp) in comps.iter_mut().enumerate() {
        for d in 0..n {
            let out = convolve_one(v.grid(), &v.component(c * n + d), &mult, d, true);
            for (a, b) in comp.iter_mut().zip(out) {
                *a -= b;
            }
        }
    }
    SampledField::from_components(*v.grid(), &comps, DecayClass::Unknown)
}

fn convolve_one(grid: &GridSpec, data: &[f64], mult: &Multiplier, direction: usize, conj: bool) -> Vec<f64> {
    let single = Multiplier {
        fft_len: mult.fft_len,
        spectra: vec![mult.spectra[direction].clone()],
        cut_abs: Vec::new(),
        total_abs: Vec::new(),
        image_tail: 0.0,
    };
    convolve(grid, data, &single, conj).pop().unwrap()
}

/// Nonlocal Leibniz remainder
/// μ ∫ (y−x)(u(y)−u(x))(ψ(y)−ψ(x))/|y−x|^{n+α+1} dy.
///
/// Quadrature expands the product into lattice convolutions with the bare
/// kernel, each factor following its own far-field convention (zero extension
/// when decaying, box restriction otherwise). The spectral
/// backend has no pointwise kernel and returns the product-rule defect
/// ∇^α(ψu) − ψ∇^αu − u∇^αψ.
pub fn nonlocal_leibniz_remainder(u: &SampledField, psi: &SampledField, params: &FractionalParams, backend: &Backend) -> Result<OperatorResult> {
    check_dim(u, params)?;
    if psi.components() != 1 || psi.grid() != u.grid() {
        return Err(Error::ShapeMismatch("ψ must be a scalar field on the grid of u".into()));
    }
    let raw = !backend.is_spectral();
    let op = Operator::Gradient { alpha: params.alpha };
    let psi_u = u.multiply_scalar(psi)?;
    let (k_psi_u, mult) = apply(&psi_u, op, backend, Some(params), raw, false)?;
    let (k_u, _) = apply(u, op, backend, Some(params), raw, false)?;
    let (k_psi, _) = apply(psi, op, backend, Some(params), raw, false)?;
    let n = u.grid().dim();
    let m = u.components();
    let mut comps = Vec::with_capacity(m * n);
    for c in 0..m {
        let uc = u.component(c);
        for d in 0..n {
            let col = c * n + d;
            comps.push(
                (0..u.grid().len())
                    .map(|i| k_psi_u[col][i] - psi.values()[i] * k_u[col][i] - uc[i] * k_psi[d][i])
                    .collect::<Vec<f64>>(),
            );
        }
    }
    let field = SampledField::from_components(*u.grid(), &comps, DecayClass::Unknown)?;
    let bound = truncation(&psi_u, &mult, backend) + 2.0 * lp_norm(psi, f64::INFINITY, None) * truncation(u, &mult, backend);
    Ok(OperatorResult { field, truncation_estimate: bound })
}

/// Spectral derivative (multiplier 2πiξ, Nyquist removed); the classical
/// gradient matching the spectral backend's algebra.
pub fn spectral_derivative(u: &SampledField, padding: usize) -> Result<SampledField> {
    let backend = Backend::Spectral { padding };
    let (outs, _) = apply(u, Operator::Gradient { alpha: 1.0 }, &backend, None, false, false)?;
    SampledField::from_components(*u.grid(), &outs, DecayClass::Unknown)
}

/// Second-order central-difference gradient (one-sided zero extension at box
/// edges, wrap-around on the periodic cell).
pub fn central_difference(u: &SampledField) -> SampledField {
    let grid = *u.grid();
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let m = u.components();
    let h = grid.spacing();
    let mut idx = vec![0usize; dim];
    let mut comps = vec![vec![0.0; grid.len()]; m * dim];
    for c in 0..m {
        let uc = u.component(c);
        for i in 0..grid.len() {
            grid.multi_index(i, &mut idx);
            for d in 0..dim {
                let k = idx[d];
                let mut probe = idx.clone();
                let fwd = if k + 1 < n {
                    probe[d] = k + 1;
                    uc[grid.flat_index(&probe)]
                } else if grid.is_periodic() {
                    probe[d] = 0;
                    uc[grid.flat_index(&probe)]
                } else {
                    0.0
                };
                let bwd = if k > 0 {
                    probe[d] = k - 1;
                    uc[grid.flat_index(&probe)]
                } else if grid.is_periodic() {
                    probe[d] = n - 1;
                    uc[grid.flat_index(&probe)]
                } else {
                    0.0
                };
                comps[c * dim + d][i] = (fwd - bwd) / (2.0 * h);
            }
        }
    }
    SampledField::from_components(grid, &comps, DecayClass::Unknown).expect("shape preserved")
}

fn check_dim(u: &SampledField, params: &FractionalParams) -> Result<()> {
    if params.dim != u.grid().dim() {
        return Err(Error::ShapeMismatch(format!(
            "parameters are for n = {} but the grid has n = {}",
            params.dim,
            u.grid().dim()
        )));
    }
    Ok(())
}
