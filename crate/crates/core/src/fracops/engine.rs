//! FFT convolution engine shared by both backends: a field is embedded in an
//! FFT box, multiplied by one spectrum per output direction, and restricted.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::fft::fftn;
use crate::grid::GridSpec;

/// Per-direction Fourier multipliers on an FFT box of side `fft_len`.
#[derive(Debug)]
pub(crate) struct Multiplier {
    pub fft_len: usize,
    pub spectra: Vec<Vec<Complex64>>,
    /// Σ|weights| discarded by the far cutoff, per direction (quadrature only).
    pub cut_abs: Vec<f64>,
    /// Σ|weights| per direction (quadrature only).
    pub total_abs: Vec<f64>,
    /// Magnitude of the continuum image tail folded into periodic weights.
    pub image_tail: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct CacheKey {
    pub tag: u8,
    pub order_bits: u64,
    pub dim: usize,
    pub points: usize,
    pub extent_bits: u64,
    pub periodic: bool,
    pub a: u64,
    pub b: u64,
}

const CACHE_LIMIT: usize = 64;

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Multiplier>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Multiplier>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn cached<E>(key: CacheKey, build: impl FnOnce() -> Result<Multiplier, E>) -> Result<Arc<Multiplier>, E> {
    if let Some(m) = cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(m));
    }
    let built = Arc::new(build()?);
    let mut map = cache().lock().unwrap();
    if map.len() >= CACHE_LIMIT {
        map.clear();
    }
    map.insert(key, Arc::clone(&built));
    Ok(built)
}

/// Convolves one scalar component with every spectrum of `mult`; with `conj`
/// the transposed operator is applied.
pub(crate) fn convolve(grid: &GridSpec, data: &[f64], mult: &Multiplier, conj: bool) -> Vec<Vec<f64>> {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let m = mult.fft_len;
    let shape = vec![m; dim];
    let total = m.pow(dim as u32);
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    let mut idx = vec![0usize; dim];
    for (i, v) in data.iter().enumerate() {
        grid.multi_index(i, &mut idx);
        buf[flat(&idx, m)] = Complex64::new(*v, 0.0);
    }
    fftn(&mut buf, &shape, false);
    mult.spectra
        .iter()
        .map(|spec| {
            let mut work: Vec<Complex64> = buf
                .iter()
                .zip(spec)
                .map(|(a, s)| if conj { a * s.conj() } else { a * s })
                .collect();
            fftn(&mut work, &shape, true);
            (0..n.pow(dim as u32))
                .map(|i| {
                    grid.multi_index(i, &mut idx);
                    work[flat(&idx, m)].re
                })
                .collect()
        })
        .collect()
}

pub(crate) fn flat(idx: &[usize], m: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * m + i)
}
