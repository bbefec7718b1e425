//! Singular-integral quadrature as lattice convolutions.
//!
//! Off-centre lattice points use the kernel directly. The homogeneous Taylor
//! terms of the integrand near the singularity are summed over the whole
//! lattice in closed form through the (analytically continued) Epstein zeta
//! function, which removes the leading discretization error of the plain
//! punctured sum.

use num_complex::Complex64;
use rayon::prelude::*;

use super::engine::{flat, Multiplier};
use super::Operator;
use crate::error::{Error, Result};
use crate::fft::fftn;
use crate::grid::GridSpec;
use crate::quad::integrate;
use crate::special::{epstein_zeta, lattice_ball_sum};

const IMAGE_BUDGET: f64 = 4.0e7;

pub(crate) struct QuadratureSetup {
    pub op: Operator,
    pub singularity_radius: f64,
    pub far_cutoff: Option<f64>,
    /// Skip the local Taylor corrections (raw kernel sums, used for the
    /// nonlocal remainder whose leading Taylor term vanishes).
    pub raw: bool,
    pub mu: f64,
    pub nu: f64,
    pub gamma: f64,
}

/// Kernel value at `z` (already including the normalization constant), one
/// entry per output direction.
fn kernel(setup: &QuadratureSetup, z: &[f64], r: f64, out: &mut [f64]) {
    let n = z.len() as f64;
    match setup.op {
        Operator::Gradient { alpha } => {
            let radial = setup.mu * r.powf(-n - alpha - 1.0);
            for (o, zd) in out.iter_mut().zip(z) {
                *o = zd * radial;
            }
        }
        Operator::Laplacian { s } => out[0] = setup.nu * r.powf(-n - 2.0 * s),
        Operator::Potential { order } => out[0] = r.powf(order - n) / setup.gamma,
    }
}

/// ∫_{|z|_∞ > a} |z|^{−n−2s} dz.
fn cube_exterior_integral(dim: usize, s: f64, a: f64) -> f64 {
    let expo = -(dim as f64 + 2.0 * s) / 2.0;
    let face = match dim {
        1 => 1.0,
        2 => integrate(|v| (1.0 + v * v).powf(expo), -1.0, 1.0, 8, 16),
        _ => integrate(
            |v| integrate(|w| (1.0 + v * v + w * w).powf(expo), -1.0, 1.0, 8, 16),
            -1.0,
            1.0,
            8,
            16,
        ),
    };
    a.powf(-2.0 * s) / (2.0 * s) * 2.0 * dim as f64 * face
}

pub(crate) fn build(setup: &QuadratureSetup, grid: &GridSpec) -> Result<Multiplier> {
    let dim = grid.dim();
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let periodic = grid.is_periodic();
    if periodic && matches!(setup.op, Operator::Potential { .. }) {
        return Err(Error::BackendMismatch(
            "the Riesz potential has no periodic lattice sum; use the spectral backend".into(),
        ));
    }
    let m = if periodic { n } else { 2 * n };
    let total = m.pow(dim as u32);
    let dirs = setup.op.directions(dim);
    let delta = setup.singularity_radius;
    let rho = delta / h;
    let hn = grid.cell_volume();
    let images: i64 = if periodic {
        let per_axis = (IMAGE_BUDGET / total as f64).powf(1.0 / dim as f64);
        (((per_axis - 1.0) / 2.0).floor() as i64).clamp(1, 64)
    } else {
        0
    };

    // C_j = W_{−j}: convolution weights at FFT index j mod m.
    let mut weights = vec![0.0; total * dirs];
    let partial: Vec<f64> = weights
        .par_chunks_mut(dirs)
        .enumerate()
        .map(|(f, out)| {
            let mut rest = f;
            let mut j = vec![0i64; dim];
            for d in (0..dim).rev() {
                let k = (rest % m) as i64;
                rest /= m;
                j[d] = if periodic {
                    crate::fft::wavenumber(k as usize, m)
                } else if k < n as i64 {
                    k
                } else {
                    k - m as i64
                };
            }
            if !periodic && j.iter().any(|&c| c == -(n as i64)) {
                return 0.0;
            }
            let mut z = vec![0.0; dim];
            let mut buf = vec![0.0; dirs];
            let mut cut = 0.0;
            let mut img = vec![-images; dim];
            loop {
                let direct = img.iter().all(|&c| c == 0);
                for d in 0..dim {
                    // evaluate at −z so that the entry is W_{−j}
                    z[d] = -((j[d] + img[d] * n as i64) as f64) * h;
                }
                let r = z.iter().map(|c| c * c).sum::<f64>().sqrt();
                let in_taylor = direct && r <= delta + 1e-12 * h;
                if r > 0.0 && !in_taylor {
                    kernel(setup, &z, r, &mut buf);
                    let beyond = direct && setup.far_cutoff.is_some_and(|big| r > big);
                    for (o, b) in out.iter_mut().zip(&buf) {
                        if beyond {
                            cut += (b * hn).abs();
                        } else {
                            *o += b * hn;
                        }
                    }
                }
                let mut d = 0;
                loop {
                    if d == dim {
                        return cut;
                    }
                    img[d] += 1;
                    if img[d] <= images {
                        break;
                    }
                    img[d] = -images;
                    d += 1;
                }
            }
        })
        .collect();
    let cut_total: f64 = partial.iter().sum();

    let mut image_tail = 0.0;
    if periodic {
        if let Operator::Laplacian { s } = setup.op {
            let a = images as f64 + 0.5;
            let tail = setup.nu * cube_exterior_integral(dim, s, a) * hn;
            image_tail = tail.abs();
            weights.iter_mut().for_each(|w| *w += tail);
        }
        symmetrize(&mut weights, m, dim, dirs, setup.op.is_odd());
    }

    let index_of = |offset: &[i64]| -> usize {
        let idx: Vec<usize> = offset.iter().map(|&c| c.rem_euclid(m as i64) as usize).collect();
        flat(&idx, m)
    };
    let origin = vec![0i64; dim];
    if !setup.raw {
        match setup.op {
            Operator::Gradient { alpha } => {
                let sp = dim as f64 + alpha - 1.0;
                let c = setup.mu * h.powf(1.0 - alpha) * (lattice_ball_sum(dim, sp, rho) - epstein_zeta(dim, sp))
                    / dim as f64;
                for d in 0..dim {
                    let mut e = origin.clone();
                    e[d] = 1;
                    weights[index_of(&e) * dirs + d] -= c / (2.0 * h);
                    e[d] = -1;
                    weights[index_of(&e) * dirs + d] += c / (2.0 * h);
                }
            }
            Operator::Laplacian { s } => {
                let zero = index_of(&origin);
                if periodic {
                    let others: f64 = (0..total).filter(|&f| f != zero).map(|f| weights[f]).sum();
                    weights[zero] = -others;
                } else {
                    let st = dim as f64 + 2.0 * s;
                    weights[zero] =
                        -setup.nu * h.powf(-2.0 * s) * (epstein_zeta(dim, st) - lattice_ball_sum(dim, st, rho));
                }
                let sp = dim as f64 + 2.0 * s - 2.0;
                let c = setup.nu * h.powf(2.0 - 2.0 * s) * (lattice_ball_sum(dim, sp, rho) - epstein_zeta(dim, sp))
                    / (2.0 * dim as f64);
                for d in 0..dim {
                    for sign in [-1, 1] {
                        let mut e = origin.clone();
                        e[d] = sign;
                        weights[index_of(&e)] += c / (h * h);
                    }
                }
                weights[zero] -= 2.0 * dim as f64 * c / (h * h);
            }
            Operator::Potential { order } => {
                let sp = dim as f64 - order;
                weights[index_of(&origin)] +=
                    h.powf(order) / setup.gamma * (lattice_ball_sum(dim, sp, rho) - epstein_zeta(dim, sp));
            }
        }
    }

    let mut total_abs = vec![0.0; dirs];
    for (k, w) in weights.iter().enumerate() {
        total_abs[k % dirs] += w.abs();
    }
    let shape = vec![m; dim];
    let spectra = (0..dirs)
        .map(|d| {
            let mut buf: Vec<Complex64> =
                weights.iter().skip(d).step_by(dirs).map(|&w| Complex64::new(w, 0.0)).collect();
            fftn(&mut buf, &shape, false);
            buf
        })
        .collect();
    Ok(Multiplier { fft_len: m, spectra, cut_abs: vec![cut_total; dirs], total_abs, image_tail })
}

/// Enforces exact parity of periodized weights (the truncated image sum is not
/// symmetric for offsets on the Nyquist plane).
fn symmetrize(weights: &mut [f64], m: usize, dim: usize, dirs: usize, odd: bool) {
    let total = m.pow(dim as u32);
    let mut idx = vec![0usize; dim];
    let mut neg = vec![0usize; dim];
    let orig = weights.to_vec();
    for f in 0..total {
        let mut rest = f;
        for d in (0..dim).rev() {
            idx[d] = rest % m;
            rest /= m;
            neg[d] = (m - idx[d]) % m;
        }
        let g = flat(&neg, m);
        for k in 0..dirs {
            let (a, b) = (orig[f * dirs + k], orig[g * dirs + k]);
            weights[f * dirs + k] = if odd { 0.5 * (a - b) } else { 0.5 * (a + b) };
        }
    }
}
