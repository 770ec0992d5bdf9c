//! Oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::Vector3;
use trapload::magnetostatics::segment::MU0_OVER_4PI;
use trapload::magnetostatics::WireSegment;

/// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> Vector3<f64>>(f: &F, a: f64, b: f64) -> (Vector3<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XK[i];
        let s = f(c - x) + f(c + x);
        k += s * WK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    ((k * h), ((k - g) * h).norm())
}

fn adaptive<F: Fn(f64) -> Vector3<f64>>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Vector3<f64> {
    let (v, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return v;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1)
}

/// B = μ0 I / 4π ∫ dl × (p − s) / |p − s|³ by adaptive quadrature.
pub fn quadrature_field(seg: &WireSegment, current: f64, p: &Vector3<f64>) -> Vector3<f64> {
    let l = seg.end - seg.start;
    let integrand = |t: f64| {
        let r = p - (seg.start + l * t);
        l.cross(&r) / r.norm().powi(3)
    };
    // scale of the result sets the absolute tolerance
    let d = seg.distance_to(p);
    let scale = 2.0 / d;
    adaptive(&integrand, 0.0, 1.0, 1e-15 * scale, 40) * (MU0_OVER_4PI * current)
}


/// Oscillation frequency (Hz) of a particle released at rest from
/// `minimum + amplitude·axis`, from zero crossings of its displacement along
/// `axis`. Integrates with the library's Verlet pusher.
pub fn trajectory_frequency<P: trapload::potential::Potential>(
    pot: &P,
    minimum: &Vector3<f64>,
    axis: &Vector3<f64>,
    amplitude: f64,
    dt: f64,
    duration: f64,
) -> f64 {
    use trapload::kinetics::{init_accel, push, Particle};
    let mut p = [Particle::new(minimum + axis * amplitude, Vector3::zeros(), 1.0)];
    assert!(init_accel(&mut p, pot).is_empty());
    let mut prev = amplitude;
    let mut crossings = Vec::new();
    let steps = (duration / dt) as usize;
    for k in 1..=steps {
        assert!(push(&mut p, pot, dt).is_empty(), "particle left the potential");
        let x = (p[0].position - minimum).dot(axis);
        if (x > 0.0) != (prev > 0.0) {
            let t = (k as f64 - 1.0 + prev / (prev - x)) * dt;
            crossings.push(t);
        }
        prev = x;
    }
    assert!(crossings.len() >= 3, "too few oscillations");
    let n = crossings.len() - 1;
    n as f64 / 2.0 / (crossings[n] - crossings[0])
}
