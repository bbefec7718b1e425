//! Special functions: gamma (via statrs), Riemann zeta and the Epstein zeta
//! function of the integer lattice, analytically continued.

use std::f64::consts::PI;

pub use statrs::function::gamma::gamma;
use statrs::function::gamma::gamma_ur;

/// Exponential integral E₁(x) = Γ(0, x), x > 0.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum -= term / k as f64;
        }
        return -0.577_215_664_901_532_9 - x.ln() + sum;
    }
    // modified Lentz continued fraction
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut frac = d;
    for i in 1..200 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        frac *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    frac * (-x).exp()
}

/// Upper incomplete gamma Γ(a, x) for x > 0 and any real a.
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        exp_integral_e1(x)
    } else if a > 0.0 {
        gamma_ur(a, x) * gamma(a)
    } else {
        // Γ(a, x) = (Γ(a+1, x) − x^a e^{−x}) / a
        (upper_gamma(a + 1.0, x) - x.powf(a) * (-x).exp()) / a
    }
}

const BORWEIN_TERMS: usize = 48;

fn borwein_weights() -> [f64; BORWEIN_TERMS + 1] {
    let n = BORWEIN_TERMS;
    let mut d = [0.0; BORWEIN_TERMS + 1];
    let mut term = 1.0;
    let mut acc = term;
    d[0] = acc;
    for i in 0..n {
        let fi = i as f64;
        term *= 4.0 * (n as f64 + fi) * (n as f64 - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
        acc += term;
        d[i + 1] = acc;
    }
    d
}

/// Riemann zeta ζ(s) for real s ≠ 1.
///
/// Borwein's accelerated alternating series for s ≥ 0, the functional
/// equation for s < 0.
pub fn riemann_zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s < 0.0 {
        let t = 1.0 - s;
        return 2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(t) * riemann_zeta(t);
    }
    if s > 60.0 {
        return 1.0 + 2f64.powf(-s) + 3f64.powf(-s);
    }
    let d = borwein_weights();
    let n = BORWEIN_TERMS;
    let mut sum = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - d[n]) / ((k + 1) as f64).powf(s);
    }
    -sum / (d[n] * (1.0 - 2f64.powf(1.0 - s)))
}

/// Epstein zeta Z_n(s) = Σ_{j ∈ ℤⁿ∖0} |j|^{−s}, continued to s > 0, s ≠ n.
///
/// n = 1 reduces to 2ζ(s) (valid for every s ≠ 1). For n ≥ 2 the theta-function
/// splitting at t = 1 is used, which converges like e^{−π|j|²}.
pub fn epstein_zeta(n: usize, s: f64) -> f64 {
    if n == 1 {
        return 2.0 * riemann_zeta(s);
    }
    assert!(s > 0.0 && (s - n as f64).abs() > 1e-12, "epstein_zeta: s must be positive and ≠ n");
    let reach: i64 = 6;
    let a1 = s / 2.0;
    let a2 = (n as f64 - s) / 2.0;
    let mut sum = 0.0;
    let mut idx = vec![-reach; n];
    loop {
        let r2: i64 = idx.iter().map(|k| k * k).sum();
        if r2 > 0 && r2 <= reach * reach {
            let x = PI * r2 as f64;
            sum += upper_gamma(a1, x) * x.powf(-a1) + upper_gamma(a2, x) * x.powf(-a2);
        }
        let mut d = 0;
        loop {
            if d == n {
                let total = sum + 2.0 / (s - n as f64) - 2.0 / s;
                return PI.powf(a1) / gamma(a1) * total;
            }
            idx[d] += 1;
            if idx[d] <= reach {
                break;
            }
            idx[d] = -reach;
            d += 1;
        }
    }
}

/// Finite lattice sum Σ_{0 < |j| ≤ rho} |j|^{−s} over ℤⁿ.
pub fn lattice_ball_sum(n: usize, s: f64, rho: f64) -> f64 {
    let reach = rho.floor() as i64;
    if reach < 1 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut idx = vec![-reach; n];
    loop {
        let r2: i64 = idx.iter().map(|k| k * k).sum();
        if r2 > 0 && (r2 as f64) <= rho * rho {
            sum += (r2 as f64).powf(-s / 2.0);
        }
        let mut d = 0;
        loop {
            if d == n {
                return sum;
            }
            idx[d] += 1;
            if idx[d] <= reach {
                break;
            }
            idx[d] = -reach;
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219;

    #[test]
    fn zeta_known_values() {
        assert!((riemann_zeta(2.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((riemann_zeta(0.5) + 1.460_354_508_809_586_8).abs() < 1e-12);
        assert!((riemann_zeta(0.0) + 0.5).abs() < 1e-13);
        assert!((riemann_zeta(-1.0) + 1.0 / 12.0).abs() < 1e-12);
        assert!((riemann_zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-13);
    }

    #[test]
    fn epstein_reduces_in_one_dimension() {
        assert!((epstein_zeta(1, 3.0) - 2.0 * 1.202_056_903_159_594).abs() < 1e-12);
    }

    #[test]
    fn epstein_square_lattice_closed_form() {
        // Z_2(2s) = 4 ζ(s) β(s); β(2) is Catalan's constant.
        let expect = 4.0 * PI * PI / 6.0 * CATALAN;
        assert!((epstein_zeta(2, 4.0) - expect).abs() < 1e-10);
    }

    #[test]
    fn epstein_matches_direct_sum_when_convergent() {
        let direct = lattice_ball_sum(3, 9.0, 60.0);
        assert!((epstein_zeta(3, 9.0) - direct).abs() < 1e-9);
    }

    #[test]
    fn exponential_integral_values() {
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((exp_integral_e1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-13);
        assert!((exp_integral_e1(5.0) - 1.148_295_591_275_325_8e-3).abs() < 1e-16);
    }

    #[test]
    fn upper_gamma_negative_order_recurrence() {
        // Γ(−1/2, x) = 2 e^{−x}/√x − 2√π erfc(√x); at x = 1.
        let erfc1 = 0.157_299_207_050_285_1;
        let expect = 2.0 * (-1f64).exp() - 2.0 * PI.sqrt() * erfc1;
        assert!((upper_gamma(-0.5, 1.0) - expect).abs() < 1e-12);
    }
}
