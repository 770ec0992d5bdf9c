//! Closed-form field of a finite straight current filament.

use nalgebra::{Matrix3, Vector3};
use crate::error::{Error, Result};

/// Default guard radius around line conductors, m.
pub const DEFAULT_CORE_RADIUS: f64 = 10e-6;

/// μ0/4π in T·m/A.
pub const MU0_OVER_4PI: f64 = 1.000_000_000_55e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct WireSegment {
    pub start: Vector3<f64>,
    pub end: Vector3<f64>,
    pub channel: String,
}

impl WireSegment {
    pub fn new(start: Vector3<f64>, end: Vector3<f64>, channel: impl Into<String>) -> Result<Self> {
        let seg = Self { start, end, channel: channel.into() };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.start.iter().chain(self.end.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config(format!("segment of channel {} has non-finite coordinates", self.channel)));
        }
        if (self.end - self.start).norm() <= 0.0 {
            return Err(Error::Config(format!("zero-length segment in channel {}", self.channel)));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Distance from `p` to the closed segment.
    pub fn distance_to(&self, p: &Vector3<f64>) -> f64 {
        let l = self.end - self.start;
        let t = ((p - self.start).dot(&l) / l.norm_squared()).clamp(0.0, 1.0);
        (p - (self.start + l * t)).norm()
    }

    fn check_core(&self, p: &Vector3<f64>, core_radius: f64) -> Result<()> {
        let d = self.distance_to(p);
        if d <= core_radius {
            return Err(Error::CoreRegion { distance: d, core_radius });
        }
        Ok(())
    }
}

/// Shared geometry of one segment/point pair.
struct Geometry {
    l: Vector3<f64>,
    r1: Vector3<f64>,
    r2: Vector3<f64>,
    n1: f64,
    n2: f64,
    /// (b − a) × r1, equal to r1 × r2 without the cancellation.
    c: Vector3<f64>,
    /// (n1 + n2) / (n1·n2·(n1·n2 + r1·r2)).
    f: f64,
}

impl Geometry {
    fn new(seg: &WireSegment, p: &Vector3<f64>) -> Self {
        let l = seg.end - seg.start;
        let r1 = p - seg.start;
        let r2 = p - seg.end;
        let n1 = r1.norm();
        let n2 = r2.norm();
        let c = l.cross(&r1);
        let dot = r1.dot(&r2);
        // n1·n2 + r1·r2 loses all digits when p sits beside the wire (r1 ≈ −r2);
        // rewrite it as |r1×r2|² / (n1·n2 − r1·r2) there.
        let q = if dot < 0.0 { c.norm_squared() / (n1 * n2 - dot) } else { n1 * n2 + dot };
        let f = (n1 + n2) / (n1 * n2 * q);
        Self { l, r1, r2, n1, n2, c, f }
    }
}

/// Biot-Savart field (tesla) of `seg` carrying `current` amperes, evaluated at `p`.
pub fn segment_field(seg: &WireSegment, current: f64, p: &Vector3<f64>, core_radius: f64) -> Result<Vector3<f64>> {
    seg.check_core(p, core_radius)?;
    if current == 0.0 {
        return Ok(Vector3::zeros());
    }
    let g = Geometry::new(seg, p);
    Ok(g.c * (MU0_OVER_4PI * current * g.f))
}

/// Field and its spatial Jacobian `J[i][j] = ∂B_i/∂p_j`, both analytic.
pub fn segment_field_jacobian(
    seg: &WireSegment,
    current: f64,
    p: &Vector3<f64>,
    core_radius: f64,
) -> Result<(Vector3<f64>, Matrix3<f64>)> {
    seg.check_core(p, core_radius)?;
    if current == 0.0 {
        return Ok((Vector3::zeros(), Matrix3::zeros()));
    }
    let g = Geometry::new(seg, p);
    let k = MU0_OVER_4PI * current;
    let s = g.n1 + g.n2;
    let prod = g.n1 * g.n2;
    let q = s / (prod * g.f);
    let u1 = g.r1 / g.n1;
    let u2 = g.r2 / g.n2;
    let grad_s = u1 + u2;
    let grad_p_over_p = g.r1 / (g.n1 * g.n1) + g.r2 / (g.n2 * g.n2);
    let grad_q = grad_s * s;
    let grad_f = (grad_s / s - grad_p_over_p - grad_q / q) * g.f;
    // ∂c/∂p_j = l × e_j, i.e. the cross-product matrix of l.
    let lx = g.l.cross_matrix();
    let jac = (lx * g.f + g.c * grad_f.transpose()) * k;
    Ok((g.c * (k * g.f), jac))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: [f64; 3], b: [f64; 3]) -> WireSegment {
        WireSegment::new(Vector3::from(a), Vector3::from(b), "w").unwrap()
    }

    #[test]
    fn long_wire_matches_infinite_limit() {
        let s = seg([-10.0, 0.0, 0.0], [10.0, 0.0, 0.0]);
        let b = segment_field(&s, 100.0, &Vector3::new(0.0, 0.0, 5e-3), DEFAULT_CORE_RADIUS).unwrap();
        let expected = 2.0 * MU0_OVER_4PI * 100.0 / 5e-3;
        assert!((b.norm() - expected).abs() / expected < 1e-6);
        assert!((b.norm() - 4.0e-3).abs() / 4.0e-3 < 1e-6);
        // current along +x, point above: field along −y
        assert!(b.y < 0.0 && b.x.abs() < 1e-18 && b.z.abs() < 1e-18);
    }

    #[test]
    fn zero_current_and_axis_points_vanish() {
        let s = seg([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let p = Vector3::new(0.3, 0.2, -0.1);
        assert_eq!(segment_field(&s, 0.0, &p, DEFAULT_CORE_RADIUS).unwrap(), Vector3::zeros());
        let b = segment_field(&s, 50.0, &Vector3::new(2.0, 0.0, 0.0), DEFAULT_CORE_RADIUS).unwrap();
        assert_eq!(b, Vector3::zeros());
    }

    #[test]
    fn core_region_is_rejected() {
        let s = seg([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let err = segment_field(&s, 1.0, &Vector3::new(0.5, 5e-6, 0.0), DEFAULT_CORE_RADIUS).unwrap_err();
        assert!(matches!(err, Error::CoreRegion { .. }));
        assert!(segment_field(&s, 1.0, &Vector3::new(0.5, 20e-6, 0.0), DEFAULT_CORE_RADIUS).is_ok());
    }

    #[test]
    fn degenerate_segment_rejected() {
        assert!(WireSegment::new(Vector3::zeros(), Vector3::zeros(), "w").is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let s = seg([-0.01, 0.002, 0.0], [0.012, -0.003, 0.001]);
        let p = Vector3::new(0.001, 0.0005, -0.003);
        let (b, j) = segment_field_jacobian(&s, 30.0, &p, DEFAULT_CORE_RADIUS).unwrap();
        assert_eq!(b, segment_field(&s, 30.0, &p, DEFAULT_CORE_RADIUS).unwrap());
        let h = 1e-7;
        for col in 0..3 {
            let mut e = Vector3::zeros();
            e[col] = h;
            let fd = (segment_field(&s, 30.0, &(p + e), 0.0).unwrap() - segment_field(&s, 30.0, &(p - e), 0.0).unwrap())
                / (2.0 * h);
            for row in 0..3 {
                let scale = j.norm();
                assert!((fd[row] - j[(row, col)]).abs() < 1e-7 * scale, "{row},{col}: {} vs {}", fd[row], j[(row, col)]);
            }
        }
    }
}
