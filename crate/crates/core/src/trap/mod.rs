//! Characterization of a trapping potential: minimum, frequencies, depth and
//! the height of the entrance barrier seen by atoms arriving along a guide.
//!
//! Internally every search runs in μm and μK (energy / kB) so that step sizes
//! and tolerances are numbers of order one.

pub mod minimize;

use nalgebra::{Matrix3, SymmetricEigen, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnetostatics::{MagneticField, ZeemanPotential};
use crate::potential::{potential_gradient_hessian, Potential, DEFAULT_FD_STEP};
use minimize::{bfgs, golden_max, nelder_mead, MinimizeOptions, Status};

/// Axis-aligned box in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl SearchBox {
    pub fn new(lo: Vector3<f64>, hi: Vector3<f64>) -> Self {
        Self { lo: lo.into(), hi: hi.into() }
    }

    pub fn around(center: Vector3<f64>, half: Vector3<f64>) -> Self {
        Self::new(center - half, center + half)
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    /// Largest t ≥ 0 with `p + t·d` inside the box (0 if `p` is outside).
    pub fn exit_distance(&self, p: &Vector3<f64>, d: &Vector3<f64>) -> f64 {
        if !self.contains(p) {
            return 0.0;
        }
        let mut t = f64::INFINITY;
        for i in 0..3 {
            if d[i] > 0.0 {
                t = t.min((self.hi[i] - p[i]) / d[i]);
            } else if d[i] < 0.0 {
                t = t.min((self.lo[i] - p[i]) / d[i]);
            }
        }
        t
    }
}

/// Options for [`find_minimum`].
#[derive(Debug, Clone, Copy)]
pub struct MinimumOptions {
    /// Gradient tolerance in μK/μm.
    pub gtol: f64,
    pub max_iter: usize,
    pub search_box: Option<SearchBox>,
    /// Step for the Hessian used in the saddle check, m.
    pub fd_step: f64,
}

impl Default for MinimumOptions {
    fn default() -> Self {
        Self { gtol: 1e-12, max_iter: 2000, search_box: None, fd_step: DEFAULT_FD_STEP }
    }
}

struct Scaled<'a, P: ?Sized> {
    pot: &'a P,
    kb: f64,
}

impl<'a, P: Potential + ?Sized> Scaled<'a, P> {
    fn new(pot: &'a P) -> Self {
        Self { pot, kb: pot.constants().k_b }
    }

    fn energy(&self, x_um: &Vector3<f64>) -> Result<f64> {
        Ok(self.pot.energy(&(x_um * 1e-6))? / self.kb * 1e6)
    }

    fn energy_gradient(&self, x_um: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
        let (u, g) = self.pot.energy_gradient(&(x_um * 1e-6))?;
        Ok((u / self.kb * 1e6, g / self.kb))
    }

    /// Hessian from central differences of the gradient, μK/μm².
    fn hessian(&self, x_um: &Vector3<f64>, h: f64) -> Result<Matrix3<f64>> {
        let mut m = Matrix3::zeros();
        for j in 0..3 {
            let mut e = Vector3::zeros();
            e[j] = h;
            let gp = self.energy_gradient(&(x_um + e))?.1;
            let gm = self.energy_gradient(&(x_um - e))?.1;
            m.set_column(j, &((gp - gm) / (2.0 * h)));
        }
        Ok((m + m.transpose()) * 0.5)
    }
}

/// Local minimum of `pot` near `guess`: BFGS, simplex fallback, Newton polish.
pub fn find_minimum<P: Potential + ?Sized>(pot: &P, guess: &Vector3<f64>, opts: &MinimumOptions) -> Result<Vector3<f64>> {
    if let Some(b) = &opts.search_box {
        if !b.contains(guess) {
            return Err(Error::OutOfDomain);
        }
    }
    let s = Scaled::new(pot);
    let x0 = guess * 1e6;
    s.energy(&x0)?;
    let mo = MinimizeOptions { gtol: opts.gtol, max_iter: opts.max_iter, ..Default::default() };
    let inside = |x: &Vector3<f64>| opts.search_box.map_or(true, |b| b.contains(&(x * 1e-6)));

    let mut best = match bfgs(|x| s.energy_gradient(x), x0, &mo) {
        Ok(r) if inside(&r.x) => Some(r),
        _ => None,
    };
    if best.as_ref().map_or(true, |r| r.status != Status::Gradient) {
        let nm_opts = MinimizeOptions { xtol: 1e-6, initial_step: 20.0, ..mo };
        if let Ok((xn, _)) = nelder_mead(|x| s.energy(x), best.as_ref().map_or(x0, |r| r.x), &nm_opts) {
            if let Ok(r) = bfgs(|x| s.energy_gradient(x), xn, &mo) {
                if inside(&r.x) && best.as_ref().map_or(true, |b| r.f <= b.f) {
                    best = Some(r);
                }
            }
        }
    }
    let best = best.ok_or(Error::NoConvergence { iterations: opts.max_iter })?;
    let (mut x, mut g) = (best.x, best.grad);

    for _ in 0..8 {
        if g.norm() <= opts.gtol {
            break;
        }
        let Ok(h) = s.hessian(&x, 1e-3) else { break };
        let Some(chol) = h.cholesky() else { break };
        let xn = x - chol.solve(&g);
        match s.energy_gradient(&xn) {
            Ok((_, gn)) if gn.norm() < g.norm() => {
                x = xn;
                g = gn;
            }
            _ => break,
        }
    }
    // Below this the gradient is limited by floating-point cancellation, not
    // by the search.
    if g.norm() > opts.gtol.max(1e-6) {
        return Err(Error::NoConvergence { iterations: opts.max_iter });
    }
    let x_si = x * 1e-6;
    if !inside(&x) {
        return Err(Error::OutOfDomain);
    }
    let (_, hess) = potential_gradient_hessian(pot, &x_si, opts.fd_step)?;
    let eig = SymmetricEigen::new(hess);
    let lowest = eig.eigenvalues.min();
    if lowest < 0.0 {
        return Err(Error::SaddleDetected { eigenvalue: lowest });
    }
    Ok(x_si)
}

/// Harmonic frequencies at a minimum, sorted descending, with principal axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapFrequencies {
    /// Angular frequencies, rad/s.
    pub omega: [f64; 3],
    /// Unit vector for each entry of `omega`.
    pub axes: [[f64; 3]; 3],
}

impl TrapFrequencies {
    pub fn hz(&self) -> [f64; 3] {
        self.omega.map(|w| w / (2.0 * std::f64::consts::PI))
    }

    pub fn axis(&self, i: usize) -> Vector3<f64> {
        Vector3::from(self.axes[i])
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.omega[0] / self.omega[2]
    }
}

/// Sign convention: the largest-magnitude component of each axis is positive.
fn canonical_axis(v: Vector3<f64>) -> Vector3<f64> {
    let i = v.iamax();
    if v[i] < 0.0 {
        -v
    } else {
        v
    }
}

pub fn trap_frequencies<P: Potential + ?Sized>(pot: &P, minimum: &Vector3<f64>, fd_step: f64) -> Result<TrapFrequencies> {
    let (_, hess) = potential_gradient_hessian(pot, minimum, fd_step)?;
    let eig = SymmetricEigen::new(hess);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let m = pot.constants().mass;
    let mut omega = [0.0; 3];
    let mut axes = [[0.0; 3]; 3];
    for (k, &i) in order.iter().enumerate() {
        let l = eig.eigenvalues[i];
        if l <= 0.0 {
            return Err(Error::NotAMinimum { eigenvalue: l });
        }
        omega[k] = (l / m).sqrt();
        axes[k] = canonical_axis(eig.eigenvectors.column(i).into_owned()).into();
    }
    Ok(TrapFrequencies { omega, axes })
}

/// Two unit vectors spanning the plane normal to `axis`.
fn transverse_basis(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if axis.z.abs() < 0.9 { Vector3::z() } else { Vector3::x() };
    let e1 = axis.cross(&helper).normalize();
    let e2 = axis.cross(&e1);
    (e1, e2)
}

/// Minimum of the potential over the plane through `origin` normal to `axis`,
/// starting from `start` (a point in that plane). Positions in μm, energy μK.
fn plane_minimum<P: Potential + ?Sized>(
    s: &Scaled<'_, P>,
    origin: &Vector3<f64>,
    e1: &Vector3<f64>,
    e2: &Vector3<f64>,
    start: &Vector3<f64>,
) -> Result<(Vector3<f64>, f64)> {
    let to3 = |q: &Vector2<f64>| origin + e1 * q.x + e2 * q.y;
    let q0 = Vector2::new((start - origin).dot(e1), (start - origin).dot(e2));
    let f = |q: &Vector2<f64>| -> Result<(f64, Vector2<f64>)> {
        let (u, g) = s.energy_gradient(&to3(q))?;
        Ok((u, Vector2::new(g.dot(e1), g.dot(e2))))
    };
    let opts = MinimizeOptions { gtol: 1e-9, xtol: 1e-6, max_iter: 400, initial_step: 5.0, max_step: 100.0 };
    let q = match bfgs(f, q0, &opts) {
        Ok(r) if r.status == Status::Gradient => r.x,
        other => {
            let from = other.map(|r| r.x).unwrap_or(q0);
            let nm = MinimizeOptions { xtol: 1e-5, initial_step: 5.0, ..opts };
            nelder_mead(|q| s.energy(&to3(q)), from, &nm)?.0
        }
    };
    let p = to3(&q);
    Ok((p, s.energy(&p)?))
}

/// First local maximum along a sampled profile, refined by golden section.
/// `samples` holds (abscissa, value); `eval` re-evaluates the profile.
fn first_peak(samples: &[(f64, f64)], eval: impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    if samples.len() < 3 {
        return None;
    }
    let u0 = samples[0].1;
    for k in 1..samples.len() - 1 {
        let (_, u) = samples[k];
        if u > u0 && u >= samples[k - 1].1 && samples[k + 1].1 <= u {
            let (a, b) = (samples[k - 1].0, samples[k + 1].0);
            let (t, v) = golden_max(&eval, a, b, (b - a).abs() * 1e-9);
            return Some(if v >= u { (t, v) } else { (samples[k].0, u) });
        }
    }
    None
}

/// Options for [`trap_depth`].
#[derive(Debug, Clone, Copy)]
pub struct DepthOptions {
    pub rays: usize,
    pub slices: usize,
    pub ray_samples: usize,
    /// Axial spacing of the floor-profile samples, m.
    pub floor_step: f64,
    pub search_box: SearchBox,
    /// Axial direction; defaults to the weakest principal axis.
    pub axis: Option<Vector3<f64>>,
}

impl DepthOptions {
    pub fn new(search_box: SearchBox) -> Self {
        Self { rays: 64, slices: 32, ray_samples: 160, floor_step: 250e-6, search_box, axis: None }
    }
}

/// Result of the escape-channel search. Energies are μK above the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthReport {
    /// Lowest saddle over all channels.
    pub depth_uk: f64,
    pub saddle: [f64; 3],
    /// Lowest saddle along transverse rays through the minimum.
    pub transverse_depth_uk: Option<f64>,
    /// Lowest saddle of the axial floor profile, either direction.
    pub axial_depth_uk: Option<f64>,
}

/// Lowest escape energy from the basin around `minimum`.
///
/// The floor profile (transverse minimum of U) is followed along the axis in
/// both directions up to its first maximum. Rays fanned out in the
/// transverse plane from slices of that floor find the transverse ridges; an
/// escape through slice `k` costs the larger of the ridge height there and
/// the highest floor point between the minimum and the slice.
pub fn trap_depth<P: Potential + ?Sized>(pot: &P, minimum: &Vector3<f64>, opts: &DepthOptions) -> Result<DepthReport> {
    let s = Scaled::new(pot);
    let m_um = minimum * 1e6;
    let u_min = s.energy(&m_um)?;
    let axis = match opts.axis {
        Some(a) => a.normalize(),
        None => trap_frequencies(pot, minimum, DEFAULT_FD_STEP)?.axis(2),
    };
    let (e1, e2) = transverse_basis(&axis);
    let bx = SearchBox { lo: opts.search_box.lo.map(|v| v * 1e6), hi: opts.search_box.hi.map(|v| v * 1e6) };
    let step = opts.floor_step * 1e6;

    // Floor profile in each direction: (s, floor point, energy).
    let mut sides: Vec<(Vec<(f64, Vector3<f64>, f64)>, Option<(f64, f64)>)> = Vec::new();
    for dir in [1.0, -1.0] {
        let mut prof = vec![(0.0, m_um, u_min)];
        let mut k = 1;
        loop {
            let sk = dir * step * k as f64;
            let origin = m_um + axis * sk;
            if !bx.contains(&origin) {
                break;
            }
            let start = prof.last().unwrap().1 + axis * (dir * step);
            match plane_minimum(&s, &origin, &e1, &e2, &start) {
                Ok((p, u)) if bx.contains(&p) => prof.push((sk, p, u)),
                _ => break,
            }
            k += 1;
            if prof.len() >= 3 {
                let n = prof.len();
                if prof[n - 2].2 > u_min && prof[n - 2].2 >= prof[n - 3].2 && prof[n - 1].2 <= prof[n - 2].2 {
                    break;
                }
            }
        }
        let samples: Vec<(f64, f64)> = prof.iter().map(|e| (e.0.abs(), e.2)).collect();
        let warm: Vec<Vector3<f64>> = prof.iter().map(|e| e.1).collect();
        let peak = first_peak(&samples, |t| {
            let idx = ((t / step).round() as usize).min(warm.len() - 1);
            let origin = m_um + axis * (dir * t);
            let start = warm[idx] + axis * (dir * t - (warm[idx] - m_um).dot(&axis));
            plane_minimum(&s, &origin, &e1, &e2, &start).map(|r| r.1).unwrap_or(f64::NEG_INFINITY)
        });
        sides.push((prof, peak));
    }

    let mut best: Option<(f64, Vector3<f64>)> = None;
    let mut consider = |u: f64, p: Vector3<f64>| {
        if best.map_or(true, |b| u < b.0) {
            best = Some((u, p));
        }
    };
    let mut axial_depth: Option<f64> = None;
    for (dir, (_, peak)) in [1.0, -1.0].iter().zip(&sides) {
        if let Some((t, u)) = peak {
            consider(*u, m_um + axis * (dir * t));
            axial_depth = Some(axial_depth.map_or(*u, |a: f64| a.min(*u)));
        }
    }

    let ray_ridge = |origin: &Vector3<f64>| -> Option<(f64, Vector3<f64>)> {
        let mut low: Option<(f64, Vector3<f64>)> = None;
        for r in 0..opts.rays {
            let a = 2.0 * std::f64::consts::PI * r as f64 / opts.rays as f64;
            let d = e1 * a.cos() + e2 * a.sin();
            let tmax = bx.exit_distance(origin, &d);
            if !(tmax > 0.0) {
                continue;
            }
            let u0 = s.energy(origin).unwrap_or(f64::INFINITY);
            let mut samples = vec![(0.0, u0)];
            for k in 1..=opts.ray_samples {
                let t = tmax * k as f64 / opts.ray_samples as f64;
                match s.energy(&(origin + d * t)) {
                    Ok(u) => samples.push((t, u)),
                    Err(_) => break,
                }
            }
            let peak = first_peak(&samples, |t| s.energy(&(origin + d * t)).unwrap_or(f64::NEG_INFINITY));
            if let Some((t, u)) = peak {
                if low.map_or(true, |l| u < l.0) {
                    low = Some((u, origin + d * t));
                }
            }
        }
        low
    };

    let transverse = ray_ridge(&m_um);
    if let Some((u, p)) = transverse {
        consider(u, p);
    }

    // Slices spread over the basin, both directions.
    let extent = |i: usize| sides[i].1.map(|p| p.0).unwrap_or_else(|| sides[i].0.last().unwrap().0.abs());
    let (ext_p, ext_m) = (extent(0), extent(1));
    let total = ext_p + ext_m;
    if total > 0.0 && opts.slices > 0 {
        for j in 0..opts.slices {
            let t = -ext_m + total * (j as f64 + 0.5) / opts.slices as f64;
            let (side, dir) = if t >= 0.0 { (&sides[0].0, 1.0) } else { (&sides[1].0, -1.0) };
            let ta = t.abs();
            // nearest sampled floor point and the floor maximum on the way there
            let idx = ((ta / step).round() as usize).min(side.len() - 1);
            let path_max = side[..=idx].iter().map(|e| e.2).fold(u_min, f64::max);
            let origin = m_um + axis * t;
            let start = side[idx].1 + axis * (t - dir * side[idx].0.abs());
            let Ok((floor, _)) = plane_minimum(&s, &origin, &e1, &e2, &start) else { continue };
            if let Some((u, p)) = ray_ridge(&floor) {
                consider(u.max(path_max), p);
            }
        }
    }

    let (u_sad, p_sad) = best.ok_or(Error::Unbounded)?;
    Ok(DepthReport {
        depth_uk: (u_sad - u_min).max(0.0),
        saddle: (p_sad * 1e-6).into(),
        transverse_depth_uk: transverse.map(|t| (t.0 - u_min).max(0.0)),
        axial_depth_uk: axial_depth.map(|a| (a - u_min).max(0.0)),
    })
}

/// Straight path from the guide entrance to the trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidePath {
    pub start: [f64; 3],
    pub end: [f64; 3],
    pub stations: usize,
}

impl GuidePath {
    pub fn new(start: Vector3<f64>, end: Vector3<f64>) -> Self {
        Self { start: start.into(), end: end.into(), stations: 96 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport {
    /// Barrier above the guide floor at the entrance, μK.
    pub height_uk: f64,
    pub position: [f64; 3],
    /// Absolute floor energy at the entrance, μK.
    pub floor_uk: f64,
    /// (distance along path m, transverse-minimum energy μK) per station.
    pub profile: Vec<(f64, f64)>,
}

/// Highest point of the transverse-minimum profile along `path`, measured
/// from the guide floor at the path start.
pub fn barrier_height<P: Potential + ?Sized>(pot: &P, path: &GuidePath) -> Result<BarrierReport> {
    let s = Scaled::new(pot);
    let a = Vector3::from(path.start) * 1e6;
    let b = Vector3::from(path.end) * 1e6;
    let len = (b - a).norm();
    if len == 0.0 || path.stations < 2 {
        return Err(Error::Config("guide path needs two distinct ends and at least two stations".into()));
    }
    let dir = (b - a) / len;
    let (e1, e2) = transverse_basis(&dir);
    let n = path.stations;
    let mut pts: Vec<Vector3<f64>> = Vec::with_capacity(n + 1);
    let mut prof: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    let mut start = a;
    for k in 0..=n {
        let t = len * k as f64 / n as f64;
        let origin = a + dir * t;
        let guess = start + dir * (t - (start - a).dot(&dir));
        let (p, u) = plane_minimum(&s, &origin, &e1, &e2, &guess)?;
        pts.push(p);
        prof.push((t, u));
        start = p;
    }
    let floor = prof[0].1;
    let (mut kmax, mut umax) = (0, floor);
    for (k, &(_, u)) in prof.iter().enumerate() {
        if u > umax {
            kmax = k;
            umax = u;
        }
    }
    if kmax == 0 {
        return Err(Error::NoBarrier);
    }
    let (mut tpk, mut upk) = (prof[kmax].0, umax);
    if kmax < n {
        let eval = |t: f64| {
            let origin = a + dir * t;
            let guess = pts[kmax] + dir * (t - prof[kmax].0);
            plane_minimum(&s, &origin, &e1, &e2, &guess).map(|r| r.1).unwrap_or(f64::NEG_INFINITY)
        };
        let (lo, hi) = (prof[kmax - 1].0, prof[kmax + 1].0);
        let (t, v) = golden_max(eval, lo, hi, (hi - lo) * 1e-9);
        if v > upk {
            tpk = t;
            upk = v;
        }
    }
    let position = (a + dir * tpk) * 1e-6;
    Ok(BarrierReport {
        height_uk: upk - floor,
        position: position.into(),
        floor_uk: floor,
        profile: prof.iter().map(|&(t, u)| (t * 1e-6, u)).collect(),
    })
}

/// Everything the loading studies need to know about a trap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapCharacterization {
    pub minimum_position: [f64; 3],
    /// |B| at the minimum, gauss.
    pub offset_field_g: f64,
    /// Descending angular frequencies, rad/s.
    pub frequencies: [f64; 3],
    pub principal_axes: [[f64; 3]; 3],
    /// Lowest saddle above the minimum, μK.
    pub depth_uk: f64,
    pub transverse_depth_uk: Option<f64>,
    pub saddle_position: [f64; 3],
    pub barrier_height_uk: Option<f64>,
    pub barrier_position: Option<[f64; 3]>,
    pub aspect_ratio: f64,
    /// Absolute potential energy at the minimum, μK.
    pub energy_min_uk: f64,
}

impl TrapCharacterization {
    pub fn frequencies_hz(&self) -> [f64; 3] {
        self.frequencies.map(|w| w / (2.0 * std::f64::consts::PI))
    }

    pub const CSV_HEADER: &'static str = "x_min_m,y_min_m,z_min_m,offset_G,omega1_rad_s,omega2_rad_s,omega3_rad_s,depth_uK,transverse_depth_uK,barrier_uK,aspect_ratio";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("nan".to_string(), |v| format!("{v:.6}"));
        let p = self.minimum_position;
        let w = self.frequencies;
        format!(
            "{:.9e},{:.9e},{:.9e},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{:.6}",
            p[0], p[1], p[2], self.offset_field_g, w[0], w[1], w[2], self.depth_uk,
            opt(self.transverse_depth_uk), opt(self.barrier_height_uk), self.aspect_ratio
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub minimum: MinimumOptions,
    pub depth: DepthOptions,
    /// Entrance of the guide; the barrier path runs from here to the minimum.
    pub guide_entrance: Option<Vector3<f64>>,
    pub barrier_stations: usize,
}

impl AnalysisOptions {
    pub fn new(search_box: SearchBox) -> Self {
        Self {
            minimum: MinimumOptions { search_box: Some(search_box), ..Default::default() },
            depth: DepthOptions::new(search_box),
            guide_entrance: None,
            barrier_stations: 96,
        }
    }
}

/// Full characterization of a Zeeman trap near `guess`.
pub fn analyze<F: MagneticField>(pot: &ZeemanPotential<F>, guess: &Vector3<f64>, opts: &AnalysisOptions) -> Result<TrapCharacterization> {
    let min = find_minimum(pot, guess, &opts.minimum)?;
    let freqs = trap_frequencies(pot, &min, opts.minimum.fd_step)?;
    let depth = trap_depth(pot, &min, &opts.depth)?;
    let barrier = match opts.guide_entrance {
        Some(entry) => {
            let path = GuidePath { stations: opts.barrier_stations, ..GuidePath::new(entry, min) };
            Some(barrier_height(pot, &path)?)
        }
        None => None,
    };
    let c = pot.constants;
    Ok(TrapCharacterization {
        minimum_position: min.into(),
        offset_field_g: pot.field_magnitude(&min)? * 1e4,
        frequencies: freqs.omega,
        principal_axes: freqs.axes,
        depth_uk: depth.depth_uk,
        transverse_depth_uk: depth.transverse_depth_uk,
        saddle_position: depth.saddle,
        barrier_height_uk: barrier.as_ref().map(|b| b.height_uk),
        barrier_position: barrier.as_ref().map(|b| b.position),
        aspect_ratio: freqs.aspect_ratio(),
        energy_min_uk: c.joule_to_uk(pot.energy(&min)?),
    })
}
