//! Smooth fields with a prescribed value and fractional gradient at a point.

use std::f64::consts::PI;

use super::ComplementarySpec;
use crate::error::{Error, Result};
use crate::fields::bump_value;
use crate::fracops::{fractional_gradient, Backend};
use crate::grid::{DecayClass, FractionalParams, SampledField};
use crate::quad::integrate;

/// Smallest accepted support radius, in grid cells.
pub const MIN_SUPPORT_CELLS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionOptions {
    /// Half-width of the (cubic) support; defaults to half the max-norm
    /// distance from x₀ to the complement of Ω.
    pub support_radius: Option<f64>,
    pub backend: Backend,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions { support_radius: None, backend: Backend::quadrature() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionResult {
    pub phi: SampledField,
    /// Fractional derivative of the rescaled odd template at x₀.
    pub beta: f64,
    pub support_radius: f64,
    pub achieved_value: Vec<f64>,
    /// Row-major m × n.
    pub achieved_gradient: Vec<f64>,
}

impl ConstructionResult {
    /// Largest of the relative value and gradient errors against `(z, a)`.
    pub fn relative_error(&self, z: &[f64], a: &[f64]) -> f64 {
        relative(&self.achieved_value, z).max(relative(&self.achieved_gradient, a))
    }

    pub fn verify(&self, z: &[f64], a: &[f64], tol: f64) -> Result<()> {
        let err = self.relative_error(z, a);
        if err > tol {
            return Err(Error::Construction(format!("achieved relative error {err:.3e} exceeds {tol:.1e}")));
        }
        Ok(())
    }
}

fn relative(got: &[f64], want: &[f64]) -> f64 {
    let diff = got.iter().zip(want).map(|(g, w)| (g - w).powi(2)).sum::<f64>().sqrt();
    let scale = want.iter().map(|w| w * w).sum::<f64>().sqrt();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn theta(t: f64) -> f64 {
    let s = 16.0 * t * t;
    if s >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s)).exp()
    }
}

fn psi(t: f64) -> f64 {
    t * theta(t)
}

/// β for the unit template (support |t|∞ < 1/4); the rescaled template
/// with support radius r has β·(4r)^{−α}.
fn unit_beta(dim: usize, alpha: f64, mu: f64) -> f64 {
    // In polar coordinates the integrand is ω₁² E(ρω) ρ^{−α}; the substitution
    // ρ = w^q, q = 1/(1−α), removes the singular factor.
    let q = 1.0 / (1.0 - alpha);
    let radial = |dir: &[f64]| {
        let rmax = 0.25 / dir.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let wmax = rmax.powf(1.0 - alpha);
        integrate(
            |w| {
                let rho = w.powf(q);
                q * dir.iter().map(|d| theta(rho * d)).product::<f64>()
            },
            0.0,
            wmax,
            64,
            16,
        )
    };
    match dim {
        1 => 2.0 * mu * radial(&[1.0]),
        2 => {
            // eight octants share the integral of cos² over [0, π/4] and sin² over [π/4, π/2]
            let f = |phi: f64| {
                let (s, c) = phi.sin_cos();
                c * c * radial(&[c, s])
            };
            4.0 * mu * (integrate(f, 0.0, PI / 4.0, 16, 16) + integrate(f, PI / 4.0, PI / 2.0, 16, 16))
        }
        3 => {
            let f = |th: f64| {
                let (st, ct) = th.sin_cos();
                integrate(
                    |phi| {
                        let (sp, cp) = phi.sin_cos();
                        let w = [st * cp, st * sp, ct];
                        w[0] * w[0] * radial(&w) * st
                    },
                    0.0,
                    PI / 2.0,
                    8,
                    16,
                )
            };
            8.0 * mu * integrate(f, 0.0, PI / 2.0, 8, 16)
        }
        _ => unreachable!("dimension checked by the grid"),
    }
}

/// Fractional derivative at the center of the odd×even product template with
/// support radius `radius`, by high-resolution quadrature.
pub fn template_beta(params: &FractionalParams, radius: f64) -> f64 {
    unit_beta(params.dim, params.alpha, params.mu) * (4.0 * radius).powf(-params.alpha)
}

fn default_radius(x0: usize, spec: &ComplementarySpec) -> f64 {
    let grid = spec.omega().grid();
    let n = grid.dim();
    let (mut c, mut y) = (vec![0.0; n], vec![0.0; n]);
    grid.point(x0, &mut c);
    let mut nearest = f64::INFINITY;
    for i in spec.omega().complement().indices() {
        grid.point(i, &mut y);
        let d = max_dist(&c, &y, grid.is_periodic().then(|| grid.domain_length()));
        nearest = nearest.min(d);
    }
    0.5 * (nearest - 0.5 * grid.spacing())
}

fn max_dist(a: &[f64], b: &[f64], period: Option<f64>) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs();
            period.map_or(d, |p| d.min(p - d))
        })
        .fold(0.0, f64::max)
}

/// Builds φ supported in a cube around the grid point `x0` ⊂ Ω with φ(x₀) = z
/// and ∇^α φ(x₀) = A (row-major m × n), and reports the values the grid
/// operator actually achieves.
pub fn construct_prescribed(
    x0: usize,
    z: &[f64],
    a: &[f64],
    spec: &ComplementarySpec,
    params: &FractionalParams,
    opts: &ConstructionOptions,
) -> Result<ConstructionResult> {
    let grid = *spec.omega().grid();
    let n = grid.dim();
    let m = z.len();
    if params.dim != n {
        return Err(Error::InvalidParameter(format!("params dimension {} on a {n}-D grid", params.dim)));
    }
    if m == 0 || a.len() != m * n {
        return Err(Error::ShapeMismatch(format!("z has {m} entries, A needs {m}·{n}, got {}", a.len())));
    }
    if x0 >= grid.len() || !spec.omega().contains(x0) {
        return Err(Error::Construction("x₀ must be a grid point of Ω".into()));
    }
    let radius = opts.support_radius.unwrap_or_else(|| default_radius(x0, spec));
    if !(radius >= MIN_SUPPORT_CELLS * grid.spacing()) {
        return Err(Error::Construction(format!(
            "support radius {radius:.3e} below {MIN_SUPPORT_CELLS} cells; x₀ too close to ∂Ω"
        )));
    }
    let period = grid.is_periodic().then(|| grid.domain_length());
    let (mut c, mut y) = (vec![0.0; n], vec![0.0; n]);
    grid.point(x0, &mut c);
    for i in 0..grid.len() {
        grid.point(i, &mut y);
        if max_dist(&c, &y, period) < radius && !spec.omega().contains(i) {
            return Err(Error::Construction(format!(
                "support radius {radius:.3e} reaches outside Ω; x₀ too close to ∂Ω"
            )));
        }
    }

    let beta = template_beta(params, radius);
    let scale = 4.0 * radius;
    let phi = SampledField::from_fn(grid, m, DecayClass::CompactSupport, |x, out| {
        let t: Vec<f64> = x
            .iter()
            .zip(&c)
            .map(|(xi, ci)| {
                let mut d = xi - ci;
                if let Some(p) = period {
                    d -= p * (d / p).round();
                }
                d / scale
            })
            .collect();
        if t.iter().any(|v| v.abs() >= 0.25) {
            out.iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        let even: Vec<f64> = t.iter().map(|&v| theta(v)).collect();
        let odd: Vec<f64> = (0..n)
            .map(|d| (0..n).map(|e| if e == d { psi(t[e]) } else { even[e] }).product())
            .collect();
        let dist: Vec<f64> = t.iter().map(|v| v * scale).collect();
        let bump = bump_value(&dist, &vec![0.0; n], radius);
        for (i, o) in out.iter_mut().enumerate() {
            *o = z[i] * bump + (0..n).map(|d| a[i * n + d] / beta * odd[d]).sum::<f64>();
        }
    });
    let grad = fractional_gradient(&phi, params, &opts.backend)?.field;
    Ok(ConstructionResult {
        achieved_value: phi.at(x0).to_vec(),
        achieved_gradient: grad.at(x0).to_vec(),
        phi,
        beta,
        support_radius: radius,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrescribedField {
    /// g + φ, in the complementary-value space of the spec.
    pub field: SampledField,
    pub correction: ConstructionResult,
    pub achieved_value: Vec<f64>,
    pub achieved_gradient: Vec<f64>,
}

impl PrescribedField {
    pub fn relative_error(&self, z: &[f64], a: &[f64]) -> f64 {
        relative(&self.achieved_value, z).max(relative(&self.achieved_gradient, a))
    }
}

/// u = g + φ with u(x₀) = z and ∇^α u(x₀) = A, φ compactly supported in Ω.
pub fn prescribed_with_datum(
    x0: usize,
    z: &[f64],
    a: &[f64],
    spec: &ComplementarySpec,
    params: &FractionalParams,
    opts: &ConstructionOptions,
) -> Result<PrescribedField> {
    let g = spec.g();
    if g.components() != z.len() {
        return Err(Error::ShapeMismatch(format!("g has {} components, z has {}", g.components(), z.len())));
    }
    if x0 >= g.grid().len() {
        return Err(Error::Construction("x₀ outside the grid".into()));
    }
    let g_grad = fractional_gradient(g, params, &opts.backend)?.field;
    let dz: Vec<f64> = z.iter().zip(g.at(x0)).map(|(a, b)| a - b).collect();
    let da: Vec<f64> = a.iter().zip(g_grad.at(x0)).map(|(a, b)| a - b).collect();
    let correction = construct_prescribed(x0, &dz, &da, spec, params, opts)?;
    let field = g.add(&correction.phi)?.with_decay(g.decay());
    let achieved_gradient = fractional_gradient(&field, params, &opts.backend)?.field.at(x0).to_vec();
    Ok(PrescribedField {
        achieved_value: field.at(x0).to_vec(),
        achieved_gradient,
        field,
        correction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, Mask};

    fn setup(n: usize, points: usize) -> (ComplementarySpec, FractionalParams, usize) {
        let grid = GridSpec::truncated(n, 2.0, points).unwrap();
        let omega = Mask::open_box(grid, &vec![0.0; n], &vec![1.0; n]);
        let g = SampledField::zeros(grid, 1, DecayClass::CompactSupport);
        let spec = ComplementarySpec::with_margin(omega, g, 4).unwrap();
        let x0 = grid.nearest_index(&vec![0.5; n]);
        (spec, FractionalParams::new(n, 0.5, 2.0).unwrap(), x0)
    }

    #[test]
    fn beta_is_positive_and_scales() {
        for alpha in [0.25, 0.5, 0.75] {
            let p = FractionalParams::new(1, alpha, 2.0).unwrap();
            let b1 = template_beta(&p, 0.1);
            let b2 = template_beta(&p, 0.2);
            assert!(b1 > 0.0);
            assert!((b1 / b2 - 2f64.powf(alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_data_give_zero_field() {
        let (spec, params, x0) = setup(1, 512);
        let r = construct_prescribed(x0, &[0.0], &[0.0], &spec, &params, &Default::default()).unwrap();
        assert!(r.phi.values().iter().all(|v| *v == 0.0));
        assert_eq!(r.relative_error(&[0.0], &[0.0]), 0.0);
    }

    #[test]
    fn symmetric_bump_has_no_gradient() {
        let (spec, params, x0) = setup(1, 512);
        let r = construct_prescribed(x0, &[3.0], &[0.0], &spec, &params, &Default::default()).unwrap();
        assert_eq!(r.achieved_value, vec![3.0]);
        assert!(r.achieved_gradient[0].abs() <= 1e-6);
    }

    #[test]
    fn unit_gradient_in_one_dimension() {
        let (spec, params, x0) = setup(1, 4096);
        let r = construct_prescribed(x0, &[0.0], &[1.0], &spec, &params, &Default::default()).unwrap();
        assert!((r.achieved_gradient[0] - 1.0).abs() <= 1e-6, "{:?}", r.achieved_gradient);
    }

    #[test]
    fn refuses_points_near_the_boundary() {
        let (spec, params, _) = setup(1, 512);
        let grid = *spec.omega().grid();
        let x0 = grid.nearest_index(&[0.01]);
        assert!(matches!(
            construct_prescribed(x0, &[1.0], &[1.0], &spec, &params, &Default::default()),
            Err(Error::Construction(_))
        ));
        let mid = grid.nearest_index(&[0.5]);
        let opts = ConstructionOptions { support_radius: Some(0.6), ..Default::default() };
        assert!(construct_prescribed(mid, &[1.0], &[1.0], &spec, &params, &opts).is_err());
    }
}
