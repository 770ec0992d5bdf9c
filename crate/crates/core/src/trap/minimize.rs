//! Small dense minimizers used by the trap analysis.
//!
//! Both work on `SVector<f64, D>` in whatever units the caller chooses; the
//! trap code feeds them μm and μK so that tolerances are O(1) numbers.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Converged when the gradient norm falls below this.
    pub gtol: f64,
    /// Converged (stalled) when successive steps are shorter than this.
    pub xtol: f64,
    pub max_iter: usize,
    /// Length of the first trial step.
    pub initial_step: f64,
    /// Upper bound on any single step.
    pub max_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { gtol: 1e-12, xtol: 1e-9, max_iter: 500, initial_step: 10.0, max_step: 200.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Gradient,
    Stalled,
}

#[derive(Debug, Clone)]
pub struct Outcome<const D: usize> {
    pub x: SVector<f64, D>,
    pub f: f64,
    pub grad: SVector<f64, D>,
    pub iterations: usize,
    pub status: Status,
}

/// Quasi-Newton BFGS with Armijo backtracking. Evaluation errors during a
/// line search (e.g. stepping into a conductor) count as an infinite value.
pub fn bfgs<const D: usize, F>(f: F, x0: SVector<f64, D>, opts: &MinimizeOptions) -> Result<Outcome<D>>
where
    F: Fn(&SVector<f64, D>) -> Result<(f64, SVector<f64, D>)>,
{
    let (mut fx, mut g) = f(&x0)?;
    let mut x = x0;
    let gn = g.norm();
    let mut h = SMatrix::<f64, D, D>::identity() * if gn > 0.0 { opts.initial_step / gn } else { 1.0 };
    let mut first = true;
    let mut small_steps = 0;
    for it in 0..opts.max_iter {
        if g.norm() <= opts.gtol {
            return Ok(Outcome { x, f: fx, grad: g, iterations: it, status: Status::Gradient });
        }
        let mut d = -(h * g);
        if d.dot(&g) >= 0.0 {
            h = SMatrix::identity() * (opts.initial_step / g.norm());
            d = -(h * g);
        }
        let dn = d.norm();
        if dn > opts.max_step {
            d *= opts.max_step / dn;
        }
        let slope = d.dot(&g);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xt = x + d * alpha;
            if let Ok((ft, gt)) = f(&xt) {
                if ft.is_finite() && ft <= fx + 1e-4 * alpha * slope {
                    accepted = Some((xt, ft, gt));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            return Ok(Outcome { x, f: fx, grad: g, iterations: it, status: Status::Stalled });
        };
        let s = xn - x;
        let y = gnew - g;
        let sy = s.dot(&y);
        if sy > 1e-14 * s.norm() * y.norm() {
            if first {
                h = SMatrix::identity() * (sy / y.dot(&y));
                first = false;
            }
            let rho = 1.0 / sy;
            let i = SMatrix::<f64, D, D>::identity();
            h = (i - s * y.transpose() * rho) * h * (i - y * s.transpose() * rho) + s * s.transpose() * rho;
        }
        if s.norm() < opts.xtol {
            small_steps += 1;
        } else {
            small_steps = 0;
        }
        x = xn;
        fx = fnew;
        g = gnew;
        if small_steps >= 3 {
            return Ok(Outcome { x, f: fx, grad: g, iterations: it + 1, status: Status::Stalled });
        }
    }
    if g.norm() <= opts.gtol {
        return Ok(Outcome { x, f: fx, grad: g, iterations: opts.max_iter, status: Status::Gradient });
    }
    Err(Error::NoConvergence { iterations: opts.max_iter })
}

/// Derivative-free Nelder-Mead simplex. Returns the best vertex once the
/// simplex diameter drops below `opts.xtol`.
pub fn nelder_mead<const D: usize, F>(f: F, x0: SVector<f64, D>, opts: &MinimizeOptions) -> Result<(SVector<f64, D>, f64)>
where
    F: Fn(&SVector<f64, D>) -> Result<f64>,
{
    let eval = |x: &SVector<f64, D>| f(x).ok().filter(|v| v.is_finite()).unwrap_or(f64::INFINITY);
    let mut pts: Vec<(SVector<f64, D>, f64)> = Vec::with_capacity(D + 1);
    let f0 = f(&x0)?;
    pts.push((x0, f0));
    for i in 0..D {
        let mut x = x0;
        x[i] += opts.initial_step;
        pts.push((x, eval(&x)));
    }
    let n = D as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n);
    for _ in 0..opts.max_iter * 4 {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diam = pts.iter().skip(1).map(|p| (p.0 - pts[0].0).norm()).fold(0.0, f64::max);
        if diam < opts.xtol {
            return Ok((pts[0].0, pts[0].1));
        }
        let centroid = pts[..D].iter().fold(SVector::<f64, D>::zeros(), |acc, p| acc + p.0) / n;
        let worst = pts[D];
        let xr = centroid + (centroid - worst.0) * alpha;
        let fr = eval(&xr);
        if fr < pts[0].1 {
            let xe = centroid + (xr - centroid) * gamma;
            let fe = eval(&xe);
            pts[D] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[D - 1].1 {
            pts[D] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = centroid + (xr - centroid) * rho;
                (xc, eval(&xc))
            } else {
                let xc = centroid + (worst.0 - centroid) * rho;
                (xc, eval(&xc))
            };
            if fc < worst.1.min(fr) {
                pts[D] = (xc, fc);
            } else {
                let best = pts[0].0;
                for p in pts.iter_mut().skip(1) {
                    p.0 = best + (p.0 - best) * sigma;
                    p.1 = eval(&p.0);
                }
            }
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter * 4 })
}

/// Maximize a unimodal function on `[a, b]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Vector2, Vector3};

    fn rosenbrock(x: &Vector2<f64>) -> Result<(f64, Vector2<f64>)> {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = Vector2::new(-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a));
        Ok((f, g))
    }

    #[test]
    fn bfgs_solves_rosenbrock() {
        let opts = MinimizeOptions { gtol: 1e-10, initial_step: 0.1, max_step: 1.0, ..Default::default() };
        let r = bfgs(rosenbrock, Vector2::new(-1.2, 1.0), &opts).unwrap();
        assert!((r.x - Vector2::new(1.0, 1.0)).norm() < 1e-8, "{:?}", r.x);
    }

    #[test]
    fn nelder_mead_solves_anisotropic_quadratic() {
        let f = |x: &Vector3<f64>| Ok((x[0] - 1.0).powi(2) + 900.0 * (x[1] + 2.0).powi(2) + 3.0 * x[2] * x[2]);
        let opts = MinimizeOptions { xtol: 1e-9, initial_step: 0.5, max_iter: 5000, ..Default::default() };
        let (x, _) = nelder_mead(f, Vector3::new(0.0, 0.0, 1.0), &opts).unwrap();
        assert!((x - Vector3::new(1.0, -2.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn golden_section_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3f64).powi(2) + 2.0, -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6 && (v - 2.0).abs() < 1e-12);
    }
}
