//! Discrete functionals over complementary-value spaces: evaluation, first
//! variation, direct-method minimization and relaxation experiments.

mod functional;
mod integrand;
mod minimize;
mod relax;

pub use functional::{evaluate_functional, functional_gradient, Energy};
pub use integrand::{double_well, pinched_nonconvex, pinched_profile, preset, quadratic, DerivFn, EvalFn, Growth, Integrand, PRESETS};
pub use minimize::{minimize, MinimizeOptions, MinimizeReport};
pub use relax::{
    lsc_probe, minimizing_sequence, relaxation_benchmark, relaxed_energy, relaxed_energy_with, LscReport, LscRow,
    ProbeSequence, RelaxedEnergy, SequenceMember, SequenceOptions,
};
