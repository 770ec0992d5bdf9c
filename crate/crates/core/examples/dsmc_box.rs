//! Collisional relaxation in a homogeneous box: a gas hot along x and cold
//! along y and z equilibrates through DSMC collisions, and the collision
//! rate matches n·σ·⟨v_rel⟩.
//!
//! ```text
//! cargo run --release --example dsmc_box
//! ```

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use trapload::kinetics::{collide, CollisionCellGrid, Particle, ScatteringModel};
use trapload::rng::{stream, Purpose};
use trapload::PhysicalConstants;

fn main() -> trapload::Result<()> {
    let c = PhysicalConstants::RB87;
    let (n, density, t) = (10_000usize, 1e18, 100e-6);
    let weight = density * 1e-9 / n as f64;
    let sigma_v = c.thermal_velocity(t);
    let mut rng = stream(1, Purpose::Test, 0, 0);
    let g = Normal::new(0.0, 1.0).unwrap();
    // same total energy as a 100 μK gas, all of it first along x
    let mut ps: Vec<Particle> = (0..n)
        .map(|_| {
            let p = Vector3::from_fn(|_, _| rng.gen_range(0.0..1e-3));
            let v = Vector3::new(3f64.sqrt() * sigma_v * g.sample(&mut rng), 0.0, 0.0);
            Particle::new(p, v, weight)
        })
        .collect();
    let model = ScatteringModel::new(5.24e-9)?;
    let grid = CollisionCellGrid::covering(Vector3::zeros(), Vector3::repeat(1e-3), Vector3::repeat(0.5e-3))?;

    let temps = |ps: &[Particle]| {
        let t = |i: usize| c.mass * ps.iter().map(|p| p.velocity[i].powi(2)).sum::<f64>() / (ps.len() as f64 * c.k_b) * 1e6;
        (t(0), t(1), t(2))
    };
    let dt = 1e-4;
    let mut hits = 0;
    println!("{:>8} {:>8} {:>8} {:>8}", "t [ms]", "Tx [uK]", "Ty [uK]", "Tz [uK]");
    for step in 0..=600u64 {
        if step % 50 == 0 {
            let (x, y, z) = temps(&ps);
            println!("{:>8.1} {:>8.1} {:>8.1} {:>8.1}", step as f64 * dt * 1e3, x, y, z);
        }
        hits += collide(&mut ps, &grid, &model, dt, 1, step)?.collisions;
    }
    let elapsed = 601.0 * dt;
    let rate = 2.0 * hits as f64 / (n as f64 * elapsed);
    let expected = density * model.cross_section() * (16.0 * c.k_b * t / (std::f64::consts::PI * c.mass)).sqrt();
    println!("\nper-atom collision rate {rate:.1}/s, equilibrium value {expected:.1}/s");
    Ok(())
}
