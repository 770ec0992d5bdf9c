//! Least-squares fits of loading curves.

use serde::{Deserialize, Serialize};

use crate::trap::minimize::golden_max;

/// `N(t) = N_ss·(1 − exp(−t/τ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationFit {
    pub n_ss: f64,
    pub tau: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

/// `T(t) = T_∞ + A·exp(−t/τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationFit {
    pub asymptote: f64,
    pub amplitude: f64,
    pub tau: f64,
    pub rms: f64,
}

/// Straight line `y = a + b·t` with the standard error of `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_err: f64,
}

pub fn fit_line(t: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = t.len();
    if n < 3 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let tm = t.iter().sum::<f64>() / nf;
    let ym = y.iter().sum::<f64>() / nf;
    let stt: f64 = t.iter().map(|v| (v - tm).powi(2)).sum();
    if stt == 0.0 {
        return None;
    }
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let rss: f64 = t.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Some(LineFit { intercept, slope, slope_err: (rss / (nf - 2.0) / stt).sqrt() })
}

/// Best amplitude for a fixed basis `f(t)` in `y ≈ c·f`, and the residual sum.
fn project(t: &[f64], y: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut ff, mut fy) = (0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        let v = f(ti);
        ff += v * v;
        fy += v * yi;
    }
    let c = if ff > 0.0 { fy / ff } else { 0.0 };
    let rss = t.iter().zip(y).map(|(&ti, &yi)| (yi - c * f(ti)).powi(2)).sum();
    (c, rss)
}

/// Search `τ` on a log grid then refine; `rss(τ)` must be cheap.
fn best_tau(rss: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let n = 200;
    let (la, lb) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..=n).map(|k| la + (lb - la) * k as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&l| rss(l.exp())).collect();
    let (k, _) = vals.iter().enumerate().filter(|(_, v)| v.is_finite()).min_by(|a, b| a.1.total_cmp(b.1))?;
    if k == 0 || k == n {
        return None;
    }
    let (l, _) = golden_max(|l| -rss(l.exp()), grid[k - 1], grid[k + 1], 1e-10);
    Some(l.exp())
}

/// Fit the saturation curve. `None` when the optimum time constant runs into
/// the search limits (no saturation visible, or instantaneous).
pub fn fit_saturation(t: &[f64], n: &[f64]) -> Option<SaturationFit> {
    let t_max = t.iter().cloned().fold(0.0, f64::max);
    if t.len() < 4 || t_max <= 0.0 {
        return None;
    }
    let rss = |tau: f64| project(t, n, |x| 1.0 - (-x / tau).exp()).1;
    let tau = best_tau(rss, t_max * 1e-3, t_max * 20.0)?;
    let (n_ss, r) = project(t, n, |x| 1.0 - (-x / tau).exp());
    Some(SaturationFit { n_ss, tau, rms: (r / t.len() as f64).sqrt() })
}

/// Fit an exponential relaxation towards a constant.
pub fn fit_relaxation(t: &[f64], y: &[f64]) -> Option<RelaxationFit> {
    let t_max = t.iter().cloned().fold(0.0, f64::max);
    let t_min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    let span = t_max - t_min;
    if t.len() < 5 || span <= 0.0 {
        return None;
    }
    let solve = |tau: f64| -> (f64, f64, f64) {
        // y ≈ a + b·g(t), g = exp(−(t − t_min)/τ); 2×2 normal equations.
        let (mut s1, mut sg, mut sgg, mut sy, mut sgy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&ti, &yi) in t.iter().zip(y) {
            let g = (-(ti - t_min) / tau).exp();
            s1 += 1.0;
            sg += g;
            sgg += g * g;
            sy += yi;
            sgy += g * yi;
        }
        let det = s1 * sgg - sg * sg;
        if det.abs() < 1e-300 {
            return (f64::NAN, f64::NAN, f64::INFINITY);
        }
        let a = (sy * sgg - sg * sgy) / det;
        let b = (s1 * sgy - sg * sy) / det;
        let rss = t.iter().zip(y).map(|(&ti, &yi)| (yi - a - b * (-(ti - t_min) / tau).exp()).powi(2)).sum();
        (a, b, rss)
    };
    let tau = best_tau(|tau| solve(tau).2, span * 1e-3, span * 20.0)?;
    let (a, b, r) = solve(tau);
    // amplitude referred to t = 0
    Some(RelaxationFit { asymptote: a, amplitude: b * (t_min / tau).exp(), tau, rms: (r / t.len() as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_saturation_curve() {
        let t: Vec<f64> = (1..=60).map(|k| k as f64).collect();
        let n: Vec<f64> = t.iter().map(|&x| 3.7e7 * (1.0 - (-x / 11.4f64).exp())).collect();
        let f = fit_saturation(&t, &n).unwrap();
        assert!((f.n_ss / 3.7e7 - 1.0).abs() < 1e-6 && (f.tau / 11.4 - 1.0).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn recovers_relaxation() {
        let t: Vec<f64> = (0..80).map(|k| 0.5 + k as f64 * 0.5).collect();
        let y: Vec<f64> = t.iter().map(|&x| 102e-6 + 150e-6 * (-x / 6.0f64).exp()).collect();
        let f = fit_relaxation(&t, &y).unwrap();
        assert!((f.asymptote / 102e-6 - 1.0).abs() < 1e-6, "{f:?}");
        assert!((f.amplitude / 150e-6 - 1.0).abs() < 1e-6 && (f.tau / 6.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn line_slope() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let f = fit_line(&t, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && f.slope_err < 1e-12);
    }
}
