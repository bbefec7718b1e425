//! Executable identity and inequality checks, each returning a residual
//! report with a reproducibility digest.

mod checks;
mod fit;

pub use checks::*;
pub use fit::{fit_power_law, PowerLaw};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::fracops::Backend;
use crate::grid::{FractionalParams, SampledField};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_name: String,
    /// Descriptive name of the identity or inequality being checked.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub inputs_digest: String,
}

impl IdentityReport {
    pub fn new(name: &str, anchor: &str, residual: f64, tolerance: f64, digest: String) -> Self {
        IdentityReport {
            identity_name: name.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            inputs_digest: digest,
        }
    }

    pub fn message(&self) -> String {
        if self.passed {
            format!("{}: ok (residual {:.3e} ≤ {:.1e})", self.identity_name, self.residual, self.tolerance)
        } else {
            format!(
                "{}: FAILED, violates {} (residual {:.3e} > {:.1e})",
                self.identity_name, self.anchor, self.residual, self.tolerance
            )
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Human-readable table of reports.
pub fn summary_table(reports: &[IdentityReport]) -> String {
    let mut out = format!("{:<34} {:>12} {:>10}  {}\n", "check", "residual", "tolerance", "status");
    for r in reports {
        out.push_str(&format!(
            "{:<34} {:>12.3e} {:>10.1e}  {}\n",
            r.identity_name,
            r.residual,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        ));
    }
    out
}

/// SHA-256 over check name, parameters, backend and field contents.
#[derive(Clone)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(name: &str) -> Self {
        let mut h = Sha256::new();
        h.update(name.as_bytes());
        InputDigest(h)
    }

    pub fn scalar(mut self, x: f64) -> Self {
        self.0.update(x.to_le_bytes());
        self
    }

    pub fn params(self, p: &FractionalParams) -> Self {
        self.scalar(p.dim as f64).scalar(p.alpha).scalar(p.p)
    }

    pub fn backend(mut self, b: &Backend) -> Self {
        self.0.update(serde_json::to_vec(b).expect("backend serializes"));
        self
    }

    pub fn field(mut self, u: &SampledField) -> Self {
        self.0.update(serde_json::to_vec(u.grid()).expect("grid serializes"));
        self.0.update((u.components() as u64).to_le_bytes());
        for v in u.values() {
            self.0.update(v.to_le_bytes());
        }
        self
    }

    pub fn finish(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
