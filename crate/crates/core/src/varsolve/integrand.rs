//! Integrands f(x, z, A) with growth metadata.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::envelope::Pinching;
use crate::error::{Error, Result};

pub type EvalFn = Arc<dyn Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync>;
/// Writes a partial derivative into the output slice.
pub type DerivFn = Arc<dyn Fn(&[f64], &[f64], &[f64], &mut [f64]) + Send + Sync>;

/// Growth data: 0 ≤ f ≤ a + C(|z|ᵖ + |A|ᵖ), and c|A|ᵖ ≤ f when `lower` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Growth {
    /// Bound on the profile a(x).
    pub offset: f64,
    pub upper: f64,
    /// Pinching constant c, when the integrand is pinched.
    pub lower: Option<f64>,
    pub p: f64,
}

impl Growth {
    pub fn admits(&self, z: &[f64], a: &[f64], value: f64) -> bool {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let slack = 1e-12 * (1.0 + value.abs());
        value >= -slack && value <= self.offset + self.upper * (norm(z).powf(self.p) + norm(a).powf(self.p)) + slack
    }

    pub fn pinching(&self) -> Option<Pinching> {
        self.lower.map(|lower| Pinching { lower, upper: self.upper, p: self.p })
    }
}

#[derive(Clone)]
pub struct Integrand {
    pub name: String,
    eval: EvalFn,
    deriv_a: Option<DerivFn>,
    deriv_z: Option<DerivFn>,
    pub growth: Growth,
    pub x_dependent: bool,
    pub z_dependent: bool,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("growth", &self.growth)
            .field("x_dependent", &self.x_dependent)
            .field("z_dependent", &self.z_dependent)
            .field("has_deriv_a", &self.deriv_a.is_some())
            .finish()
    }
}

impl Integrand {
    /// An integrand depending on A only.
    pub fn homogeneous(
        name: &str,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        deriv: Option<Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>>,
        growth: Growth,
    ) -> Self {
        Integrand {
            name: name.to_string(),
            eval: Arc::new(move |_, _, a| eval(a)),
            deriv_a: deriv.map(|d| Arc::new(move |_: &[f64], _: &[f64], a: &[f64], out: &mut [f64]| d(a, out)) as DerivFn),
            deriv_z: None,
            growth,
            x_dependent: false,
            z_dependent: false,
        }
    }

    pub fn general(name: &str, eval: EvalFn, deriv_a: Option<DerivFn>, deriv_z: Option<DerivFn>, growth: Growth) -> Self {
        Integrand {
            name: name.to_string(),
            z_dependent: deriv_z.is_some(),
            eval,
            deriv_a,
            deriv_z,
            growth,
            x_dependent: true,
        }
    }

    pub fn eval(&self, x: &[f64], z: &[f64], a: &[f64]) -> f64 {
        (self.eval)(x, z, a)
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv_a.is_some()
    }

    pub fn deriv_a(&self, x: &[f64], z: &[f64], a: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.deriv_a.as_ref().ok_or_else(|| Error::MissingDerivative(self.name.clone(), "A"))?;
        d(x, z, a, out);
        Ok(())
    }

    /// ∂f/∂z, zero for z-independent integrands.
    pub fn deriv_z(&self, x: &[f64], z: &[f64], a: &[f64], out: &mut [f64]) {
        match &self.deriv_z {
            Some(d) => d(x, z, a, out),
            None => out.iter_mut().for_each(|o| *o = 0.0),
        }
    }
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// f(A) = |A|².
pub fn quadratic() -> Integrand {
    Integrand::homogeneous(
        "quadratic",
        |a| a.iter().map(|x| x * x).sum(),
        Some(Arc::new(|a, out| {
            for (o, x) in out.iter_mut().zip(a) {
                *o = 2.0 * x;
            }
        })),
        Growth { offset: 0.0, upper: 1.0, lower: Some(1.0), p: 2.0 },
    )
}

/// Scalar profile of [`pinched_nonconvex`] as a function of |A|.
pub fn pinched_profile(r: f64) -> f64 {
    (2.0 * r * r).min(r * r + (r - 1.0).powi(2))
}

/// f(A) = min(2|A|², |A|² + (|A| − 1)²): ½|A|² ≤ f ≤ 2|A|², nonconvex for
/// |A| ∈ (¼, ¾).
pub fn pinched_nonconvex() -> Integrand {
    Integrand::homogeneous(
        "pinched-nonconvex-1d",
        |a| pinched_profile(norm(a)),
        Some(Arc::new(|a, out| {
            let r = norm(a);
            // radial derivative over r: 4 on the inner branch, 4 − 2/r outside
            let scale = if r <= 0.5 { 4.0 } else { 4.0 - 2.0 / r };
            for (o, x) in out.iter_mut().zip(a) {
                *o = scale * x;
            }
        })),
        Growth { offset: 0.0, upper: 2.0, lower: Some(0.5), p: 2.0 },
    )
}

/// f(A) = (|A| − 1)², the unpinched double well.
pub fn double_well() -> Integrand {
    Integrand::homogeneous(
        "double-well-unpinched",
        |a| (norm(a) - 1.0).powi(2),
        Some(Arc::new(|a, out| {
            let r = norm(a);
            let scale = if r > 0.0 { 2.0 * (r - 1.0) / r } else { 0.0 };
            for (o, x) in out.iter_mut().zip(a) {
                *o = scale * x;
            }
        })),
        Growth { offset: 1.0, upper: 1.0, lower: None, p: 2.0 },
    )
}

pub const PRESETS: &[(&str, &str)] = &[
    ("quadratic", "|A|²; convex, pinched with c = C = 1, p = 2"),
    ("pinched-nonconvex-1d", "min(2|A|², |A|² + (|A|−1)²); pinched with c = 1/2, C = 2, p = 2; nonconvex on 1/4 < |A| < 3/4"),
    ("double-well-unpinched", "(|A|−1)²; a = 1, C = 1, p = 2; not pinched, for envelope demos"),
];

pub fn preset(name: &str) -> Result<Integrand> {
    match name {
        "quadratic" => Ok(quadratic()),
        "pinched-nonconvex-1d" => Ok(pinched_nonconvex()),
        "double-well-unpinched" => Ok(double_well()),
        other => {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            Err(Error::InvalidParameter(format!("unknown integrand '{other}', expected one of {}", names.join(", "))))
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn presets_respect_growth_and_derivatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, _) in PRESETS {
            let f = preset(name).unwrap();
            for _ in 0..200 {
                let a = [rng.gen_range(-3.0..3.0)];
                let z = [rng.gen_range(-3.0..3.0)];
                let v = f.eval(&[0.0], &z, &a);
                assert!(f.growth.admits(&z, &a, v), "{name} at {a:?}");
                if let Some(pinch) = f.growth.pinching() {
                    assert!(pinch.brackets(a[0].abs(), v, 1e-12));
                }
                let mut d = [0.0];
                f.deriv_a(&[0.0], &z, &a, &mut d).unwrap();
                let eps = 1e-6;
                let fd = (f.eval(&[0.0], &z, &[a[0] + eps]) - f.eval(&[0.0], &z, &[a[0] - eps])) / (2.0 * eps);
                if (a[0].abs() - 0.5).abs() > 1e-3 && a[0].abs() > 1e-3 {
                    assert!((d[0] - fd).abs() <= 1e-5 * (1.0 + fd.abs()), "{name}: {} vs {fd}", d[0]);
                }
            }
        }
    }

    #[test]
    fn unknown_preset_lists_options() {
        let err = preset("cubic").unwrap_err().to_string();
        assert!(err.contains("quadratic") && err.contains("pinched-nonconvex-1d"));
    }

    #[test]
    fn missing_derivative_is_an_error() {
        let f = Integrand::homogeneous("abs", |a| a[0].abs(), None, Growth { offset: 0.0, upper: 1.0, lower: None, p: 1.0 });
        assert!(matches!(f.deriv_a(&[0.0], &[0.0], &[1.0], &mut [0.0]), Err(Error::MissingDerivative(..))));
    }
}
