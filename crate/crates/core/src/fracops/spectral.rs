//! Fourier multipliers of the fractional operators on the (padded) periodic box.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::engine::Multiplier;
use super::Operator;
use crate::fft::wavenumber;
use crate::grid::GridSpec;

pub(crate) fn build(op: Operator, grid: &GridSpec, padding: usize) -> Multiplier {
    let dim = grid.dim();
    let m = grid.points_per_axis() * padding;
    let period = m as f64 * grid.spacing();
    let total = m.pow(dim as u32);
    let dirs = op.directions(dim);
    let mut spectra = vec![vec![Complex64::new(0.0, 0.0); total]; dirs];
    let mut idx = vec![0usize; dim];
    let mut xi = vec![0.0; dim];
    for f in 0..total {
        let mut rest = f;
        for d in (0..dim).rev() {
            idx[d] = rest % m;
            rest /= m;
        }
        for d in 0..dim {
            xi[d] = 2.0 * PI * wavenumber(idx[d], m) as f64 / period;
        }
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r == 0.0 {
            continue;
        }
        match op {
            Operator::Gradient { alpha } => {
                let radial = r.powf(alpha - 1.0);
                for d in 0..dim {
                    if idx[d] != m / 2 {
                        spectra[d][f] = Complex64::new(0.0, xi[d] * radial);
                    }
                }
            }
            Operator::Laplacian { s } => spectra[0][f] = Complex64::new(r.powf(2.0 * s), 0.0),
            Operator::Potential { order } => spectra[0][f] = Complex64::new(r.powf(-order), 0.0),
        }
    }
    Multiplier { fft_len: m, spectra, cut_abs: vec![0.0; dirs], total_abs: vec![0.0; dirs], image_tail: 0.0 }
}
