use super::hull::lower_hull;
use crate::error::{Error, Result};

/// Sampling of the rank-one lines used by [`laminate_upper_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaminateOptions {
    /// Largest |projection| sampled along a line.
    pub range: f64,
    /// Lattice step of the projections ⟨A + tD, D⟩.
    pub step: f64,
}

impl Default for LaminateOptions {
    fn default() -> Self {
        LaminateOptions { range: 3.0, step: 0.05 }
    }
}

pub const MAX_DEPTH: usize = 3;

fn unit_set(k: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..k {
        let mut e = vec![0.0; k];
        e[i] = 1.0;
        out.push(e);
    }
    let r = 0.5f64.sqrt();
    for i in 0..k {
        for j in i + 1..k {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; k];
                e[i] = r;
                e[j] = sign * r;
                out.push(e);
            }
        }
    }
    out
}

fn rank_one_directions(m: usize, n: usize) -> Vec<Vec<f64>> {
    let (us, vs) = (unit_set(m), unit_set(n));
    let mut out = Vec::new();
    for u in &us {
        for v in &vs {
            out.push(u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect());
        }
    }
    out
}

/// Upper bound on the quasiconvex envelope of `f` at the m × n matrix `a`
/// (row-major) by rank-one lamination trees of depth ≤ `depth`.
pub fn laminate_upper_bound(
    f: &dyn Fn(&[f64]) -> f64,
    a: &[f64],
    shape: (usize, usize),
    depth: usize,
    opts: &LaminateOptions,
) -> Result<f64> {
    if depth > MAX_DEPTH {
        return Err(Error::InvalidParameter(format!("lamination depth {depth} exceeds {MAX_DEPTH}")));
    }
    if a.len() != shape.0 * shape.1 || a.is_empty() {
        return Err(Error::ShapeMismatch(format!("matrix has {} entries, shape {:?}", a.len(), shape)));
    }
    if !(opts.step > 0.0 && opts.range > opts.step) {
        return Err(Error::InvalidParameter("lamination needs 0 < step < range".into()));
    }
    let dirs = rank_one_directions(shape.0, shape.1);
    let value = bound(f, a, depth, &dirs, opts);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite)
    }
}

fn bound(f: &dyn Fn(&[f64]) -> f64, a: &[f64], depth: usize, dirs: &[Vec<f64>], opts: &LaminateOptions) -> f64 {
    let here = if depth == 0 { f(a) } else { bound(f, a, depth - 1, dirs, opts) };
    if depth == 0 {
        return here;
    }
    let reach = (opts.range / opts.step).round() as i64;
    let mut best = here;
    let mut point = vec![0.0; a.len()];
    for d in dirs {
        let proj: f64 = a.iter().zip(d).map(|(x, y)| x * y).sum();
        let mut ts = Vec::with_capacity(2 * reach as usize + 2);
        let mut gs = Vec::with_capacity(ts.capacity());
        let mut zero_done = false;
        for k in -reach..=reach {
            let t = k as f64 * opts.step - proj;
            if !zero_done && t >= 0.0 {
                zero_done = true;
                if t > 0.0 {
                    ts.push(0.0);
                    gs.push(here);
                }
            }
            for ((p, x), y) in point.iter_mut().zip(a).zip(d) {
                *p = x + t * y;
            }
            ts.push(t);
            gs.push(if t == 0.0 { here } else { bound(f, &point, depth - 1, dirs, opts) });
        }
        if !zero_done || ts[0] > 0.0 {
            continue;
        }
        let hull = lower_hull(&ts, &gs);
        for w in hull.windows(2) {
            let (i, j) = (w[0], w[1]);
            if ts[i] <= 0.0 && ts[j] >= 0.0 {
                let v = if ts[j] > ts[i] { gs[i] + (gs[j] - gs[i]) * (-ts[i]) / (ts[j] - ts[i]) } else { gs[i] };
                best = best.min(v);
            }
        }
    }
    best
}
