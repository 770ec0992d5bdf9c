//! Pusher and collision invariants on random ensembles.

use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use trapload::kinetics::{collide, init_accel, push, CollisionCellGrid, Particle, ScatteringModel};
use trapload::potential::HarmonicPotential;

/// `n` particles in a 1 mm box with thermal velocities of width `sigma_v`.
fn random_box(seed: u64, n: usize, sigma_v: f64) -> Vec<Particle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma_v).unwrap();
    (0..n)
        .map(|_| {
            let p = Vector3::from_fn(|_, _| rng.gen_range(0.0..1e-3));
            let v = Vector3::from_fn(|_, _| normal.sample(&mut rng));
            Particle::new(p, v, 1e5)
        })
        .collect()
}

fn box_grid() -> CollisionCellGrid {
    CollisionCellGrid::covering(Vector3::zeros(), Vector3::repeat(1e-3), Vector3::repeat(0.25e-3)).unwrap()
}

fn totals(ps: &[Particle]) -> (Vector3<f64>, f64) {
    ps.iter().fold((Vector3::zeros(), 0.0), |(m, e), p| (m + p.velocity, e + p.velocity.norm_squared()))
}

fn run_collisions(ps: &mut Vec<Particle>, seed: u64, steps: u64) -> u64 {
    let grid = box_grid();
    let model = ScatteringModel::new(5.24e-9).unwrap();
    (0..steps).map(|s| collide(ps, &grid, &model, 1e-3, seed, s).unwrap().collisions).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Elastic collisions conserve particle number, total momentum and total
    /// kinetic energy, and never move particles.
    #[test]
    fn collisions_conserve_invariants(seed in any::<u64>(), n in 2usize..400) {
        let mut ps = random_box(seed, n, 0.1);
        let (m0, e0) = totals(&ps);
        let mut before: Vec<[f64; 3]> = ps.iter().map(|p| p.position.into()).collect();
        let hits = run_collisions(&mut ps, seed, 5);
        let (m1, e1) = totals(&ps);
        prop_assert_eq!(ps.len(), n);
        prop_assert!((m1 - m0).norm() <= 1e-12 * (e0 * n as f64).sqrt());
        prop_assert!((e1 - e0).abs() <= 1e-12 * e0);
        let mut after: Vec<[f64; 3]> = ps.iter().map(|p| p.position.into()).collect();
        before.sort_by(|a, b| a.partial_cmp(b).unwrap());
        after.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert_eq!(before, after);
        if n > 200 {
            prop_assert!(hits > 0);
        }
    }

    /// Velocity Verlet is time reversible: integrating forward, flipping the
    /// velocities and integrating again returns to the start.
    #[test]
    fn verlet_is_reversible(seed in any::<u64>(), steps in 1usize..400) {
        let pot = HarmonicPotential::new(Vector3::zeros(), Vector3::new(900.0, 1200.0, 40.0));
        let mut ps = random_box(seed, 20, 0.05);
        let start = ps.clone();
        init_accel(&mut ps, &pot);
        for _ in 0..steps {
            push(&mut ps, &pot, 1e-5);
        }
        for p in &mut ps {
            p.velocity = -p.velocity;
        }
        for _ in 0..steps {
            push(&mut ps, &pot, 1e-5);
        }
        for (a, b) in ps.iter().zip(&start) {
            prop_assert!((a.position - b.position).norm() < 1e-15);
            prop_assert!((a.velocity + b.velocity).norm() < 1e-12);
        }
    }
}

#[test]
fn collisions_are_thread_count_independent() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let mut ps = random_box(11, 3000, 0.1);
        pool.install(|| run_collisions(&mut ps, 3, 20));
        ps
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn anisotropic_box_relaxes_to_isotropy() {
    // hot along x, cold along y and z
    let mut ps = random_box(5, 4000, 0.05);
    for p in &mut ps {
        p.velocity.x *= 3.0;
    }
    let spread = |ps: &[Particle]| {
        let t = |i: usize| ps.iter().map(|p| p.velocity[i].powi(2)).sum::<f64>() / ps.len() as f64;
        t(0) / (0.5 * (t(1) + t(2)))
    };
    assert!(spread(&ps) > 8.0);
    let hits = run_collisions(&mut ps, 9, 400);
    // each atom collides several times on average
    assert!(hits > 4 * ps.len() as u64, "only {hits} collisions");
    let r = spread(&ps);
    assert!((r - 1.0).abs() < 0.1, "temperature ratio {r}");
}
