//! Relaxed energy, laminate minimizing sequences and the lower-semicontinuity
//! probe (scalar, one-dimensional).

use num_complex::Complex64;
use serde::Serialize;

use super::functional::{check_inputs, evaluate_functional, integrate_pointwise};
use super::integrand::Integrand;
use crate::envelope::EnvelopeTable;
use crate::error::{Error, Result};
use crate::fft::{fftn, wavenumber};
use crate::fields::{interval_cutoff, smoothstep};
use crate::fracops::{fractional_gradient, fractional_laplacian, Backend, DEFAULT_BOX_PADDING};
use crate::grid::{DecayClass, FractionalParams, GridSpec, SampledField};
use crate::spaces::{project_complementary, ComplementarySpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxedEnergy {
    pub value: f64,
    /// Set when ∇^α u left the range of the envelope table somewhere in Ω
    /// (f is used there instead).
    pub extrapolated: bool,
}

fn require_scalar_1d(u: &SampledField) -> Result<()> {
    if u.grid().dim() != 1 || u.components() != 1 {
        return Err(Error::Unsupported("relaxation is implemented for scalar fields in one dimension".into()));
    }
    Ok(())
}

/// ∫_Ω f_qc(∇^α u) + ∫_{Ωᶜ} f(x, u, ∇^α u) with an arbitrary envelope.
pub fn relaxed_energy_with(
    u: &SampledField,
    f: &Integrand,
    f_qc: &dyn Fn(&[f64]) -> Option<f64>,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
) -> Result<RelaxedEnergy> {
    check_inputs(u, spec, params)?;
    let u = project_complementary(u, spec)?;
    let grad = fractional_gradient(&u, params, backend)?.field;
    let mut extrapolated = false;
    let value = integrate_pointwise(&u, &grad, |i, x, z, a| {
        if spec.omega().contains(i) {
            let full = f.eval(x, z, a);
            match f_qc(a) {
                // interpolation of a convex table overshoots between nodes
                Some(q) => q.min(full),
                None => {
                    extrapolated = true;
                    full
                }
            }
        } else {
            f.eval(x, z, a)
        }
    });
    Ok(RelaxedEnergy { value, extrapolated })
}

/// Relaxed energy with the envelope interpolated from a scalar table.
pub fn relaxed_energy(
    u: &SampledField,
    f: &Integrand,
    f_qc: &EnvelopeTable,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
) -> Result<RelaxedEnergy> {
    require_scalar_1d(u)?;
    if f_qc.shape != (1, 1) {
        return Err(Error::Unsupported("envelope table must be scalar".into()));
    }
    relaxed_energy_with(u, f, &|a| f_qc.interpolate(a[0]), spec, params, backend)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceOptions {
    /// Fraction of Ω on which the cut-off equals one.
    pub cutoff_inner: f64,
    /// Relative tolerance separating f from its envelope.
    pub gap_tol: f64,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions { cutoff_inner: 0.8, gap_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMember {
    pub oscillations: usize,
    pub field: SampledField,
    pub energy: f64,
    /// Points of Ω where the laminate replaces ∇^α u; zero means the
    /// member equals u.
    pub laminated_points: usize,
}

/// Maximal intervals (a, b) of the table where f exceeds its envelope.
fn nonconvex_intervals(table: &EnvelopeTable, gap_tol: f64) -> Vec<(f64, f64)> {
    let scale = table.f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for k in 0..table.len() {
        let gap = table.f[k] - table.f_qc[k] > gap_tol * scale;
        match (gap, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push((table.samples[s.saturating_sub(1)][0], table.samples[k][0]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((table.samples[s.saturating_sub(1)][0], table.samples[table.len() - 1][0]));
    }
    out
}

/// Extent (lo, hi) of an interval mask, widened by one cell so that the
/// cut-off vanishes at every point outside it.
fn interval_extent(spec: &ComplementarySpec) -> Result<(f64, f64)> {
    let grid = spec.omega().grid();
    let idx: Vec<usize> = spec.omega().indices().collect();
    let (first, last) = (idx[0], idx[idx.len() - 1]);
    if last - first + 1 != idx.len() {
        return Err(Error::Unsupported("Ω must be an interval".into()));
    }
    Ok((grid.coordinate(first) - grid.spacing(), grid.coordinate(last) + grid.spacing()))
}

/// Field w with ∇^α w = t under the spectral gradient (zero and Nyquist modes
/// of t dropped).
fn inverse_gradient(grid: &GridSpec, t: &[f64], alpha: f64) -> Vec<f64> {
    let n = grid.points_per_axis();
    let len = if grid.is_periodic() { n } else { n * DEFAULT_BOX_PADDING };
    let period = len as f64 * grid.spacing();
    let mut data = vec![Complex64::new(0.0, 0.0); len];
    for (d, v) in data.iter_mut().zip(t) {
        d.re = *v;
    }
    fftn(&mut data, &[len], false);
    for (k, d) in data.iter_mut().enumerate() {
        let w = wavenumber(k, len);
        if w == 0 || k == len / 2 {
            *d = Complex64::new(0.0, 0.0);
            continue;
        }
        let xi = 2.0 * std::f64::consts::PI * w as f64 / period;
        let symbol = Complex64::new(0.0, xi * xi.abs().powf(alpha - 1.0));
        *d /= symbol;
    }
    fftn(&mut data, &[len], true);
    data[..n].iter().map(|c| c.re).collect()
}

/// Per-cell two-slope laminate of the target slopes: inside a nonconvex
/// interval each point takes the upper endpoint for the first points of the
/// cell and the lower one afterwards, the split chosen to balance the cell
/// mean, and the remaining imbalance spread over the laminated points.
fn laminate_defect(grid: &GridSpec, target: &[f64], lo: f64, hi: f64, k: usize, intervals: &[(f64, f64)]) -> (Vec<f64>, usize) {
    let width = (hi - lo) / k as f64;
    let mut defect = vec![0.0; target.len()];
    let mut total = 0;
    for cell in 0..k {
        let (a0, a1) = (lo + cell as f64 * width, lo + (cell + 1) as f64 * width);
        let members: Vec<(usize, f64, f64)> = (0..target.len())
            .filter(|&i| {
                let x = grid.coordinate(i);
                x > a0 && x <= a1
            })
            .filter_map(|i| {
                intervals.iter().find(|(a, b)| target[i] > *a && target[i] < *b).map(|&(a, b)| (i, a, b))
            })
            .collect();
        if members.is_empty() {
            continue;
        }
        let base: f64 = members.iter().map(|&(i, a, _)| a - target[i]).sum();
        let (mut best_j, mut best) = (0, base.abs());
        let mut running = base;
        for (j, &(_, a, b)) in members.iter().enumerate() {
            running += b - a;
            if running.abs() < best {
                best = running.abs();
                best_j = j + 1;
            }
        }
        let mut sum = 0.0;
        for (j, &(i, a, b)) in members.iter().enumerate() {
            let s = if j < best_j { b } else { a };
            defect[i] = s - target[i];
            sum += defect[i];
        }
        let share = sum / members.len() as f64;
        for &(i, _, _) in &members {
            defect[i] -= share;
        }
        total += members.len();
    }
    (defect, total)
}

/// Fields u_K = u + χ·w_K, where ∇^α w_K is the defect between a K-cell
/// laminate of the envelope and ∇^α u, and χ is a cut-off supported in Ω;
/// each member equals g outside Ω.
pub fn minimizing_sequence(
    u: &SampledField,
    f: &Integrand,
    f_qc: &EnvelopeTable,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
    oscillations: &[usize],
    opts: &SequenceOptions,
) -> Result<Vec<SequenceMember>> {
    require_scalar_1d(u)?;
    check_inputs(u, spec, params)?;
    let u = project_complementary(u, spec)?;
    let grid = *u.grid();
    let (lo, hi) = interval_extent(spec)?;
    let target = fractional_gradient(&u, params, backend)?.field.into_values();
    let intervals = nonconvex_intervals(f_qc, opts.gap_tol);
    let chi: Vec<f64> = (0..grid.len()).map(|i| interval_cutoff(grid.coordinate(i), lo, hi, opts.cutoff_inner)).collect();

    oscillations
        .iter()
        .map(|&k| {
            if k == 0 {
                return Err(Error::InvalidParameter("oscillation counts must be positive".into()));
            }
            let (defect, laminated) = laminate_defect(&grid, &target, lo, hi, k, &intervals);
            let field = if laminated == 0 {
                u.clone()
            } else {
                let lift = inverse_gradient(&grid, &defect, params.alpha);
                let values = u.values().iter().zip(lift.iter().zip(&chi)).map(|(a, (w, c))| a + c * w).collect();
                project_complementary(&SampledField::new(grid, 1, values, u.decay())?, spec)?
            };
            let energy = evaluate_functional(&field, f, spec, params, backend)?.value;
            Ok(SequenceMember { oscillations: k, field, energy, laminated_points: laminated })
        })
        .collect()
}

/// A family u_j together with its (weak) limit.
#[derive(Debug, Clone)]
pub struct ProbeSequence {
    pub name: String,
    pub members: Vec<SampledField>,
    pub limit: SampledField,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LscRow {
    pub name: String,
    pub energies: Vec<f64>,
    pub limit_energy: f64,
    /// Smallest energy over the second half of the sequence.
    pub liminf: f64,
    /// liminf ≥ limit energy − tolerance.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LscReport {
    pub integrand: String,
    pub rows: Vec<LscRow>,
}

impl LscReport {
    /// Whether some sequence drops strictly below the energy of its limit.
    pub fn violated(&self) -> bool {
        self.rows.iter().any(|r| !r.holds)
    }
}

/// Compares the tail of the energies along each sequence with the energy of
/// its limit.
pub fn lsc_probe(
    f: &Integrand,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
    sequences: &[ProbeSequence],
    tol: f64,
) -> Result<LscReport> {
    let mut rows = Vec::with_capacity(sequences.len());
    for seq in sequences {
        if seq.members.is_empty() {
            return Err(Error::InvalidParameter(format!("sequence '{}' is empty", seq.name)));
        }
        let energies = seq
            .members
            .iter()
            .map(|u| evaluate_functional(u, f, spec, params, backend).map(|e| e.value))
            .collect::<Result<Vec<_>>>()?;
        let limit_energy = evaluate_functional(&seq.limit, f, spec, params, backend)?.value;
        let half = energies.len() / 2;
        let liminf = energies[half..].iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(LscRow { name: seq.name.clone(), holds: liminf >= limit_energy - tol, energies, limit_energy, liminf });
    }
    Ok(LscReport { integrand: f.name.clone(), rows })
}

/// Datum for the one-dimensional relaxation benchmark: u = (−Δ)^{(1−α)/2} V
/// where V′ sits at 1/2 on (0.3, 0.7) (inside the nonconvex range of the
/// pinched integrand) and a negative lobe on (0.9, 1.9) restores zero mean.
/// Needs a truncated box containing [0, 2].
pub fn relaxation_benchmark(grid: GridSpec, params: &FractionalParams) -> Result<SampledField> {
    if grid.dim() != 1 || grid.is_periodic() || grid.half_extent() < 2.0 {
        return Err(Error::InvalidGrid("the relaxation benchmark needs a 1-D box with L ≥ 2".into()));
    }
    let plateau = |x: f64| 0.5 * smoothstep((x - 0.2) / 0.1) * smoothstep((0.8 - x) / 0.1);
    let lobe = |x: f64| smoothstep((x - 0.9) / 0.2) * smoothstep((1.9 - x) / 0.2);
    let xs: Vec<f64> = (0..grid.len()).map(|i| grid.coordinate(i)).collect();
    let mass: f64 = xs.iter().map(|&x| plateau(x)).sum();
    let lobe_mass: f64 = xs.iter().map(|&x| lobe(x)).sum();
    let scale = mass / lobe_mass;
    let h = grid.spacing();
    let mut acc = 0.0;
    let v: Vec<f64> = xs
        .iter()
        .map(|&x| {
            acc += (plateau(x) - scale * lobe(x)) * h;
            acc
        })
        .collect();
    let v = SampledField::new(grid, 1, v, DecayClass::CompactSupport)?;
    let s = 0.5 * (1.0 - params.alpha);
    let u = fractional_laplacian(&v, s, &Backend::spectral_for(&grid))?.field;
    Ok(u.with_decay(DecayClass::SchwartzLike))
}
