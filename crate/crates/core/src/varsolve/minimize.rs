//! Projected descent over the complementary-value space.

use serde::Serialize;

use super::functional::{evaluate_functional, functional_gradient};
use super::integrand::Integrand;
use crate::error::Result;
use crate::fracops::Backend;
use crate::grid::{lp_norm, FractionalParams, SampledField};
use crate::spaces::{project_complementary, ComplementarySpec};

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    /// Stop once the L² norm of the first variation falls below this.
    pub tol: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub max_backtracks: usize,
    /// Starting field; defaults to g.
    pub initial: Option<SampledField>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { tol: 1e-6, max_iterations: 5000, armijo: 1e-4, max_backtracks: 40, initial: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeReport {
    pub minimizer: SampledField,
    pub energy: f64,
    pub optimality_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub energy_trace: Vec<f64>,
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    energy: f64,
    optimality_residual: f64,
    iterations: usize,
    converged: bool,
    energy_trace: &'a [f64],
}

impl MinimizeReport {
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ReportSummary {
            energy: self.energy,
            optimality_residual: self.optimality_residual,
            iterations: self.iterations,
            converged: self.converged,
            energy_trace: &self.energy_trace,
        })?)
    }
}

/// Projected gradient descent with Barzilai–Borwein trial steps and Armijo
/// backtracking; the energy trace never increases and every iterate equals
/// g outside Ω.
pub fn minimize(
    f: &Integrand,
    spec: &ComplementarySpec,
    params: &FractionalParams,
    backend: &Backend,
    opts: &MinimizeOptions,
) -> Result<MinimizeReport> {
    let start = opts.initial.clone().unwrap_or_else(|| spec.g().clone());
    let mut u = project_complementary(&start, spec)?;
    let mut energy = evaluate_functional(&u, f, spec, params, backend)?.value;
    let mut grad = functional_gradient(&u, f, spec, params, backend)?;
    let mut residual = lp_norm(&grad, 2.0, None);
    let mut trace = vec![energy];
    let mut step = 1.0;
    let mut iterations = 0;

    while residual > opts.tol && iterations < opts.max_iterations {
        let slope = grad.dot(&grad)?;
        let mut t = step;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial = u.axpy(-t, &grad)?.with_decay(u.decay());
            let e = evaluate_functional(&trial, f, spec, params, backend)?.value;
            if e <= energy - opts.armijo * t * slope {
                accepted = Some((trial, e));
                break;
            }
            t *= 0.5;
        }
        let Some((next, e)) = accepted else { break };
        let next_grad = functional_gradient(&next, f, spec, params, backend)?;
        // Barzilai–Borwein step from the last displacement
        let s = next.sub(&u)?;
        let y = next_grad.sub(&grad)?;
        let sy = s.dot(&y)?;
        step = if sy > 0.0 { s.dot(&s)? / sy } else { 2.0 * t };
        u = next;
        grad = next_grad;
        energy = e;
        residual = lp_norm(&grad, 2.0, None);
        trace.push(energy);
        iterations += 1;
    }
    Ok(MinimizeReport {
        converged: residual <= opts.tol,
        minimizer: u,
        energy,
        optimality_residual: residual,
        iterations,
        energy_trace: trace,
    })
}
