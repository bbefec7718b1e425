//! Named test-field families.

use std::f64::consts::PI;

use crate::grid::{DecayClass, GridSpec, SampledField};

/// Family names and one-line descriptions, for listings.
pub const FAMILIES: &[(&str, &str)] = &[
    ("gaussian", "exp(−π|x|²), schwartz-like"),
    ("smooth-bump", "exp(1 − 1/(1 − |x−c|²/r²)) inside the ball B(c, r), compact support"),
    ("oscillating-bump", "sin(2πj x₁)·smooth-bump / j, compact support"),
    ("sawtooth", "periodic two-slope laminate profile on the unit cell"),
    ("trig-polynomial", "random trigonometric polynomial on the unit cell"),
];

/// C^∞ bump with peak value 1 at `center` and support radius `radius`.
pub fn bump_value(x: &[f64], center: &[f64], radius: f64) -> f64 {
    let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>() / (radius * radius);
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

pub fn smooth_bump(grid: GridSpec, center: &[f64], radius: f64) -> SampledField {
    SampledField::scalar_fn(grid, DecayClass::CompactSupport, |x| bump_value(x, center, radius))
}

pub fn gaussian(grid: GridSpec, center: &[f64], width: f64) -> SampledField {
    SampledField::scalar_fn(grid, DecayClass::SchwartzLike, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum();
        (-PI * r2 / (width * width)).exp()
    })
}

pub fn oscillating_bump(grid: GridSpec, center: &[f64], radius: f64, j: usize, amplitude: f64) -> SampledField {
    SampledField::scalar_fn(grid, DecayClass::CompactSupport, |x| {
        amplitude * (2.0 * PI * j as f64 * x[0]).sin() * bump_value(x, center, radius)
    })
}

/// Σ a cos(2π k·x) + b sin(2π k·x) over `(k, a, b)` terms, for the periodic cell.
pub fn trig_polynomial(grid: GridSpec, terms: &[(Vec<i64>, f64, f64)]) -> SampledField {
    SampledField::scalar_fn(grid, DecayClass::Unknown, |x| {
        terms
            .iter()
            .map(|(k, a, b)| {
                let phase = 2.0 * PI * k.iter().zip(x).map(|(ki, xi)| *ki as f64 * xi).sum::<f64>();
                a * phase.cos() + b * phase.sin()
            })
            .sum()
    })
}

/// Smooth transition from 0 (t ≤ 0) to 1 (t ≥ 1).
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// 1D cut-off on `[lo, hi]`: zero outside, one on the inner `inner` fraction,
/// smooth ramps between.
pub fn interval_cutoff(x: f64, lo: f64, hi: f64, inner: f64) -> f64 {
    let ramp = 0.5 * (1.0 - inner) * (hi - lo);
    if ramp <= 0.0 {
        return if x > lo && x < hi { 1.0 } else { 0.0 };
    }
    smoothstep((x - lo) / ramp) * smoothstep((hi - x) / ramp)
}

/// Periodic two-slope profile on [0,1): slope `up` on the first `lambda`
/// fraction of each of `k` periods and `−up·lambda/(1−lambda)` on the rest,
/// shifted by `offset` (in cells of the period). Zero mean slope.
pub fn sawtooth(t: f64, k: usize, lambda: f64, up: f64, offset: f64) -> f64 {
    let period = 1.0 / k as f64;
    let s = ((t - offset * period) / period).rem_euclid(1.0);
    let peak = up * lambda * period;
    if s < lambda {
        up * s * period
    } else {
        peak * (1.0 - (s - lambda) / (1.0 - lambda))
    }
}

/// Derivative of [`sawtooth`] away from its kinks.
pub fn sawtooth_slope(t: f64, k: usize, lambda: f64, up: f64, offset: f64) -> f64 {
    let period = 1.0 / k as f64;
    let s = ((t - offset * period) / period).rem_euclid(1.0);
    if s < lambda {
        up
    } else {
        -up * lambda / (1.0 - lambda)
    }
}
