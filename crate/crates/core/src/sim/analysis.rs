use crate::error::{Error, Result};

/// Sampling-overhead base of a layer: `LF^-2`.
pub fn mitigation_overhead(lf: f64) -> Result<f64> {
    if !(lf > 0.0) || lf > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("layer fidelity {lf} outside (0, 1]")));
    }
    Ok(lf.powi(-2))
}

/// `(gamma_a / gamma_b)^d`
pub fn overhead_ratio(gamma_a: f64, gamma_b: f64, d: u32) -> f64 {
    (gamma_a / gamma_b).powi(d as i32)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialFit {
    pub a: f64,
    pub p: f64,
}

/// Log-linear least squares for `y = a * p^x`; values are clamped at 1e-12.
pub fn fit_exponential(xs: &[f64], ys: &[f64]) -> Result<ExponentialFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::FitFailure("need at least two matching points".into()));
    }
    let n = xs.len() as f64;
    let ls: Vec<f64> = ys.iter().map(|y| y.max(1e-12).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ls.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailure("degenerate abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, l)| (x - mx) * (l - my)).sum();
    let slope = sxy / sxx;
    let a = (my - slope * mx).exp();
    let p = slope.exp();
    if !a.is_finite() || !p.is_finite() {
        return Err(Error::FitFailure("non-finite fit".into()));
    }
    Ok(ExponentialFit { a, p })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DepolarizationFit {
    pub a: f64,
    pub lambda: f64,
    /// `(A λ^d)^-2` per depth.
    pub overhead: Vec<f64>,
}

/// Least-squares fit of `measured(d) ≈ A λ^d ideal(d)`.
pub fn depolarization_overhead_fit(depths: &[f64], measured: &[f64], ideal: &[f64]) -> Result<DepolarizationFit> {
    if depths.len() != measured.len() || depths.len() != ideal.len() || depths.is_empty() {
        return Err(Error::FitFailure("curves must share the depth grid".into()));
    }
    if ideal.iter().all(|v| v.abs() < 1e-12) {
        return Err(Error::FitFailure("ideal curve is identically zero".into()));
    }
    if measured.iter().chain(ideal).any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("non-finite input".into()));
    }
    // for fixed λ the optimal A is closed form
    let best_a = |lam: f64| -> (f64, f64) {
        let g: Vec<f64> = depths.iter().zip(ideal).map(|(d, i)| lam.powf(*d) * i).collect();
        let gg: f64 = g.iter().map(|x| x * x).sum();
        if gg == 0.0 {
            return (0.0, measured.iter().map(|m| m * m).sum());
        }
        let a = g.iter().zip(measured).map(|(x, m)| x * m).sum::<f64>() / gg;
        let r = g.iter().zip(measured).map(|(x, m)| (m - a * x).powi(2)).sum();
        (a, r)
    };
    let (lo, hi) = (1e-6, 1.5);
    let steps = 3000;
    let mut best = (f64::INFINITY, lo);
    for k in 0..=steps {
        let lam = lo + (hi - lo) * k as f64 / steps as f64;
        let r = best_a(lam).1;
        if r < best.0 {
            best = (r, lam);
        }
    }
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..200 {
        if best_a(c).1 < best_a(d).1 {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    let lambda = 0.5 * (a + b);
    let (amp, _) = best_a(lambda);
    if !(amp > 0.0) {
        return Err(Error::FitFailure("non-positive amplitude".into()));
    }
    let overhead = depths.iter().map(|d| (amp * lambda.powf(*d)).powi(-2)).collect();
    Ok(DepolarizationFit { a: amp, lambda, overhead })
}
