//! Field oracles: numerical Biot-Savart quadrature, the infinite-wire limit
//! and structural properties of the closed form.

mod common;

use common::quadrature_field;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trapload::magnetostatics::segment::MU0_OVER_4PI;
use trapload::magnetostatics::{segment_field, segment_field_jacobian, ChipLayout, CurrentSetting, MagneticField, Wire, WireField, WireSegment};

#[test]
fn closed_form_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a = Vector3::from_fn(|_, _| rng.gen_range(-10e-3..10e-3));
        let b = Vector3::from_fn(|_, _| rng.gen_range(-10e-3..10e-3));
        let seg = WireSegment::new(a, b, "w").unwrap();
        let p = loop {
            let p = Vector3::from_fn(|_, _| rng.gen_range(-20e-3..20e-3));
            if seg.distance_to(&p) > 0.2e-3 {
                break p;
            }
        };
        let i = rng.gen_range(-150.0..150.0);
        let exact = segment_field(&seg, i, &p, 0.0).unwrap();
        let quad = quadrature_field(&seg, i, &p);
        worst = worst.max((exact - quad).norm() / quad.norm());
    }
    assert!(worst < 1e-10, "worst relative error {worst:e}");
}

#[test]
fn long_wire_approaches_infinite_wire() {
    let d = 5e-3;
    let len = 4000.0 * d;
    let seg = WireSegment::new(Vector3::new(-len / 2.0, 0.0, 0.0), Vector3::new(len / 2.0, 0.0, 0.0), "w").unwrap();
    let b = segment_field(&seg, 100.0, &Vector3::new(0.0, 0.0, -d), 0.0).unwrap();
    let gauss = b.norm() * 1e4;
    assert!((gauss - 40.0).abs() / 40.0 < 1e-6, "{gauss}");
    // current along +x, point below: field along +y
    assert!(b.y > 0.0);
}

fn random_layout(rng: &mut ChaCha8Rng, n: usize) -> (ChipLayout, CurrentSetting) {
    let mut wires = Vec::new();
    let mut cur = CurrentSetting::default();
    for k in 0..n {
        let name = format!("w{k}");
        let pts: Vec<Vector3<f64>> = (0..3).map(|_| Vector3::from_fn(|_, _| rng.gen_range(-10e-3..10e-3))).collect();
        wires.push(Wire { name: name.clone(), channel: name.clone(), points: pts });
        cur.set(&name, rng.gen_range(-100.0..100.0));
    }
    (ChipLayout::new(wires).unwrap(), cur)
}

fn away_point(field: &WireField, rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let p = Vector3::from_fn(|_, _| rng.gen_range(-15e-3..15e-3));
        if field.nearest_conductor(&p) > 0.5e-3 {
            return p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn superposition_over_channels(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (layout, cur) = random_layout(&mut rng, 4);
        let all = WireField::new(&layout, &cur).unwrap();
        let p = away_point(&all, &mut rng);
        let mut sum = Vector3::zeros();
        for ch in &layout.channels {
            let mut one = cur.scaled(0.0);
            one.set(ch, cur.get(ch).unwrap());
            sum += WireField::new(&layout, &one).unwrap().field(&p).unwrap();
        }
        let b = all.field(&p).unwrap();
        prop_assert!((b - sum).norm() <= 1e-12 * b.norm().max(sum.norm()) + 1e-18);
    }

    #[test]
    fn field_is_linear_in_current(seed in any::<u64>(), s in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (layout, cur) = random_layout(&mut rng, 3);
        let f1 = WireField::new(&layout, &cur).unwrap();
        let fs = WireField::new(&layout, &cur.scaled(s)).unwrap();
        let p = away_point(&f1, &mut rng);
        let b1 = f1.field(&p).unwrap();
        let bs = fs.field(&p).unwrap();
        prop_assert!((bs - b1 * s).norm() <= 1e-12 * b1.norm() * s.abs().max(1.0));
    }

    #[test]
    fn divergence_and_curl_vanish(seed in any::<u64>()) {
        // closed random polygons: div B = 0 everywhere, curl B = 0 off the wires
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wires = Vec::new();
        let mut cur = CurrentSetting::default();
        for k in 0..2 {
            let name = format!("loop{k}");
            let mut pts: Vec<Vector3<f64>> = (0..4).map(|_| Vector3::from_fn(|_, _| rng.gen_range(-10e-3..10e-3))).collect();
            pts.push(pts[0]);
            wires.push(Wire { name: name.clone(), channel: name.clone(), points: pts });
            cur.set(&name, rng.gen_range(-100.0..100.0));
        }
        let f = WireField::new(&ChipLayout::new(wires).unwrap(), &cur).unwrap();
        let p = away_point(&f, &mut rng);
        let (_, j): (Vector3<f64>, Matrix3<f64>) = f.field_jacobian(&p).unwrap();
        let scale = j.norm();
        prop_assert!(j.trace().abs() <= 1e-10 * scale, "div {:e} vs {:e}", j.trace(), scale);
        prop_assert!((j - j.transpose()).norm() <= 1e-10 * scale);
    }

    #[test]
    fn jacobian_matches_central_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Vector3::from_fn(|_, _| rng.gen_range(-10e-3..10e-3));
        let b = Vector3::from_fn(|_, _| rng.gen_range(-10e-3..10e-3));
        let seg = WireSegment::new(a, b, "w").unwrap();
        let p = loop {
            let p = Vector3::from_fn(|_, _| rng.gen_range(-15e-3..15e-3));
            if seg.distance_to(&p) > 0.5e-3 {
                break p;
            }
        };
        let (_, j) = segment_field_jacobian(&seg, 50.0, &p, 0.0).unwrap();
        let h = 1e-7;
        for c in 0..3 {
            let mut e = Vector3::zeros();
            e[c] = h;
            let d = (segment_field(&seg, 50.0, &(p + e), 0.0).unwrap() - segment_field(&seg, 50.0, &(p - e), 0.0).unwrap()) / (2.0 * h);
            prop_assert!((j.column(c) - d).norm() <= 1e-6 * j.norm());
        }
    }

    #[test]
    fn closed_loop_far_field_is_dipolar(seed in any::<u64>()) {
        // square loop of side s in the xy plane; moment m = I s² ẑ
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = 1e-3;
        let i = 10.0;
        let h = s / 2.0;
        let pts = vec![
            Vector3::new(-h, -h, 0.0), Vector3::new(h, -h, 0.0), Vector3::new(h, h, 0.0), Vector3::new(-h, h, 0.0), Vector3::new(-h, -h, 0.0),
        ];
        let layout = ChipLayout::new(vec![Wire { name: "loop".into(), channel: "loop".into(), points: pts }]).unwrap();
        let mut cur = CurrentSetting::default();
        cur.set("loop", i);
        let f = WireField::new(&layout, &cur).unwrap();
        let dir = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize();
        let r = 1.0;
        let p = dir * r;
        let m = Vector3::new(0.0, 0.0, i * s * s);
        let dipole = (dir * (3.0 * m.dot(&dir)) - m) * (MU0_OVER_4PI / r.powi(3));
        let b = f.field(&p).unwrap();
        // quadrupole and higher corrections are O((s/r)²)
        prop_assert!((b - dipole).norm() <= 1e-5 * dipole.norm().max(MU0_OVER_4PI * m.norm() / r.powi(3)));
    }
}
