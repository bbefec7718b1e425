//! Riesz fractional calculus of variations on uniform grids.
//!
//! Fractional operators (Riesz potential, fractional gradient, fractional
//! Laplacian) with spectral and singular-quadrature backends, executable
//! identity checks, complementary-value spaces, envelopes and a direct-method
//! minimizer with a relaxation experiment.

pub mod envelope;
pub mod error;
pub mod fft;
pub mod fields;
pub mod fracops;
pub mod grid;
pub mod identities;
pub mod quad;
pub mod spaces;
pub mod special;
pub mod varsolve;

pub use error::{Error, Result};
pub use fracops::{Backend, OperatorResult};
pub use grid::{DecayClass, FractionalParams, GridKind, GridSpec, Mask, SampledField};
