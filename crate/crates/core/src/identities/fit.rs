use serde::Serialize;

/// Least-squares fit of y ≈ C·x^exponent in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub constant: f64,
    pub exponent: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> PowerLaw {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    PowerLaw { constant: (my - exponent * mx).exp(), exponent }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.4)).collect();
        let fit = fit_power_law(&xs, &ys);
        assert!((fit.exponent + 0.4).abs() < 1e-12);
        assert!((fit.constant - 3.0).abs() < 1e-12);
    }
}
