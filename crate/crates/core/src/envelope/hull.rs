use super::{EnvelopeMethod, EnvelopeTable, Pinching};
use crate::error::{Error, Result};

/// Indices of the lower convex hull of points sorted by abscissa.
pub fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Convex envelope of `f` sampled at `count` uniform points of [lo, hi]: the
/// discrete biconjugate, evaluated as the lower convex hull of the samples.
pub fn convex_envelope_1d(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    count: usize,
    pinching: Option<Pinching>,
) -> Result<EnvelopeTable> {
    if count < 2 || !(hi > lo) {
        return Err(Error::InvalidParameter("need at least two samples on a nonempty interval".into()));
    }
    let step = (hi - lo) / (count - 1) as f64;
    let xs: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite);
    }
    let hull = lower_hull(&xs, &ys);
    let mut f_qc = vec![0.0; count];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for k in a..=b {
            let t = (xs[k] - xs[a]) / (xs[b] - xs[a]);
            f_qc[k] = (ys[a] * (1.0 - t) + ys[b] * t).min(ys[k]);
        }
    }
    if hull.len() == 1 {
        f_qc[0] = ys[0];
    }
    Ok(EnvelopeTable {
        shape: (1, 1),
        samples: xs.into_iter().map(|x| vec![x]).collect(),
        f: ys,
        f_qc,
        method: EnvelopeMethod::Biconjugate1d,
        pinching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_input_is_unchanged() {
        let t = convex_envelope_1d(|a| a * a, -2.0, 2.0, 401, None).unwrap();
        for (f, q) in t.f.iter().zip(&t.f_qc) {
            assert!((f - q).abs() <= 1e-10);
        }
    }

    #[test]
    fn double_well_envelope_and_convexity() {
        let t = convex_envelope_1d(|a: f64| ((a - 1.0).powi(2)).min((a + 1.0).powi(2)), -2.0, 2.0, 401, None).unwrap();
        let h = 0.01;
        for (a, q) in t.samples.iter().zip(&t.f_qc) {
            let exact = (a[0].abs() - 1.0).max(0.0).powi(2);
            assert!((q - exact).abs() <= 2.0 * h);
        }
        for k in 1..t.len() - 1 {
            assert!(t.f_qc[k - 1] - 2.0 * t.f_qc[k] + t.f_qc[k + 1] >= -1e-12);
        }
        assert!(t.max_excess() <= 0.0);
        assert_eq!(t.interpolate(0.0), Some(0.0));
        assert_eq!(t.interpolate(2.5), None);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(convex_envelope_1d(|a| 1.0 / a, -1.0, 1.0, 3, None), Err(Error::NonFinite)));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = convex_envelope_1d(|a| a.abs(), -1.0, 1.0, 5, None).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("a0,f,f_qc\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
