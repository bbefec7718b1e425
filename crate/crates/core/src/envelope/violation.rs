use super::pushforward::periodic_pushforward;
use crate::error::{Error, Result};
use crate::fields::sawtooth;
use crate::grid::{DecayClass, FractionalParams, GridSpec, SampledField};

/// Size of the candidate family searched for α-quasiconvexity violations.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBudget {
    /// Points per axis of the periodic cell.
    pub points: usize,
    /// Oscillations per cell of the laminates.
    pub oscillations: Vec<usize>,
    /// Samples per slope on the coarse grid.
    pub slopes: usize,
    pub max_slope: f64,
    /// Pattern-search steps refining the best coarse candidate.
    pub refine_steps: usize,
    /// Smallest gap reported as a witness.
    pub threshold: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { points: 256, oscillations: vec![2, 4, 8], slopes: 16, max_slope: 3.0, refine_steps: 40, threshold: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationWitness {
    pub a: Vec<f64>,
    /// Periodic test field φ with h(A) > mean of h(A + ∇^α φ).
    pub test_field: SampledField,
    pub gap: f64,
    pub oscillations: usize,
    /// Rising and falling slopes of the laminate before the push-forward.
    pub slopes: (f64, f64),
}

struct Candidate {
    axis: usize,
    amplitude: Vec<f64>,
    k: usize,
    s1: f64,
    s2: f64,
}

struct Search<'a> {
    h: &'a dyn Fn(&[f64]) -> f64,
    a: &'a [f64],
    shape: (usize, usize),
    params: &'a FractionalParams,
    grid: GridSpec,
    base: f64,
}

impl Search<'_> {
    fn field(&self, c: &Candidate) -> Result<SampledField> {
        let lambda = -c.s2 / (c.s1 - c.s2);
        let offset = 0.5 * self.grid.spacing() * c.k as f64;
        let field = SampledField::from_fn(self.grid, self.shape.0, DecayClass::Unknown, |x, out| {
            let s = sawtooth(x[c.axis], c.k, lambda, c.s1, offset);
            for (o, u) in out.iter_mut().zip(&c.amplitude) {
                *o = u * s;
            }
        });
        field.validate()?;
        Ok(field)
    }

    fn gap(&self, c: &Candidate) -> Result<(f64, SampledField)> {
        let v = self.field(c)?;
        let push = periodic_pushforward(&v, self.params)?;
        let grad = push.fractional_gradient;
        let mut point = vec![0.0; self.a.len()];
        let mut sum = 0.0;
        for i in 0..self.grid.len() {
            for ((p, a), g) in point.iter_mut().zip(self.a).zip(grad.at(i)) {
                *p = a + g;
            }
            sum += (self.h)(&point);
        }
        let gap = self.base - sum / self.grid.len() as f64;
        Ok((if gap.is_finite() { gap } else { f64::NEG_INFINITY }, push.field))
    }
}

fn unit_vectors(m: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        out.push(e);
    }
    let r = 0.5f64.sqrt();
    for i in 0..m {
        for j in i + 1..m {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; m];
                e[i] = r;
                e[j] = sign * r;
                out.push(e);
            }
        }
    }
    out
}

/// Searches periodic laminates pushed forward to fractional-gradient fields
/// for a test field violating the α-quasiconvexity inequality of `h` at the
/// m × n matrix `a` (row-major). `None` means no violation above the budget's
/// threshold was found, which is consistent with, but does not certify,
/// α-quasiconvexity.
pub fn alpha_qc_violation_search(
    h: &dyn Fn(&[f64]) -> f64,
    a: &[f64],
    shape: (usize, usize),
    params: &FractionalParams,
    budget: &SearchBudget,
) -> Result<Option<ViolationWitness>> {
    if shape.1 != params.dim || a.len() != shape.0 * shape.1 {
        return Err(Error::ShapeMismatch(format!("matrix shape {shape:?} with {} entries in dimension {}", a.len(), params.dim)));
    }
    if budget.slopes == 0 || budget.oscillations.is_empty() || !(budget.max_slope > 0.0) {
        return Err(Error::InvalidParameter("empty search budget".into()));
    }
    let base = h(a);
    if !base.is_finite() {
        return Err(Error::NonFinite);
    }
    let search = Search { h, a, shape, params, grid: GridSpec::periodic(params.dim, budget.points)?, base };
    let ladder: Vec<f64> = (1..=budget.slopes)
        .map(|i| budget.max_slope * (i as f64 / budget.slopes as f64).powi(2))
        .collect();

    let mut best: Option<(f64, Candidate)> = None;
    for axis in 0..shape.1 {
        for amplitude in unit_vectors(shape.0) {
            for &k in &budget.oscillations {
                for &s1 in &ladder {
                    for &s2 in &ladder {
                        let c = Candidate { axis, amplitude: amplitude.clone(), k, s1, s2: -s2 };
                        let (gap, _) = search.gap(&c)?;
                        if best.as_ref().map_or(true, |(g, _)| gap > *g) {
                            best = Some((gap, c));
                        }
                    }
                }
            }
        }
    }
    let (mut gap, mut c) = best.expect("nonempty family");

    // multiplicative pattern search on the two slopes
    let mut step = 0.5;
    for _ in 0..budget.refine_steps {
        let mut moved = false;
        for (f1, f2) in [(1.0 + step, 1.0), (1.0 / (1.0 + step), 1.0), (1.0, 1.0 + step), (1.0, 1.0 / (1.0 + step))] {
            let trial = Candidate { axis: c.axis, amplitude: c.amplitude.clone(), k: c.k, s1: c.s1 * f1, s2: c.s2 * f2 };
            let (g, _) = search.gap(&trial)?;
            if g > gap {
                gap = g;
                c = trial;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }

    if gap > budget.threshold {
        let (gap, test_field) = search.gap(&c)?;
        Ok(Some(ViolationWitness { a: a.to_vec(), test_field, gap, oscillations: c.k, slopes: (c.s1, c.s2) }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SearchBudget {
        SearchBudget { points: 64, oscillations: vec![2], slopes: 8, refine_steps: 10, ..Default::default() }
    }

    #[test]
    fn convex_integrand_has_no_witness() {
        let params = FractionalParams::new(1, 0.5, 2.0).unwrap();
        let h = |a: &[f64]| a[0] * a[0];
        for a in [-1.0, 0.0, 0.7] {
            assert!(alpha_qc_violation_search(&h, &[a], (1, 1), &params, &small()).unwrap().is_none());
        }
    }

    #[test]
    fn double_well_at_zero() {
        let params = FractionalParams::new(1, 0.5, 2.0).unwrap();
        let h = |a: &[f64]| ((a[0] - 1.0).powi(2)).min((a[0] + 1.0).powi(2));
        let w = alpha_qc_violation_search(&h, &[0.0], (1, 1), &params, &small()).unwrap().unwrap();
        assert!(w.gap > 0.8 && w.gap <= 1.0, "{}", w.gap);
    }
}
