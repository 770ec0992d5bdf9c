//! The slow atom beam: emission statistics of one second of continuous
//! flux and the arrival profile of a pulsed source.
//!
//! ```text
//! cargo run --release --example beam
//! ```

use trapload::beam::{emit, emit_enveloped, pulsed_schedule, BeamSpec};
use trapload::rng::{stream, Purpose};
use trapload::PhysicalConstants;

fn main() -> trapload::Result<()> {
    let c = PhysicalConstants::RB87;
    let spec = BeamSpec {
        flux: 7.6e7,
        mean_velocity: 0.256,
        t_long: 93e-6,
        t_rad: 77e-6,
        entrance_point: [-6e-3, 0.0, -3.6e-3],
        entrance_normal: [1.0, 0.0, 0.0],
        transverse_sigma: [0.13e-3, 0.15e-3],
        macroparticle_weight: 380.0,
    };
    spec.validate()?;

    let mut rng = stream(1, Purpose::Test, 0, 0);
    let ps = emit(&spec, 1.0, &c, &mut rng);
    let n = ps.len() as f64;
    let mean = ps.iter().map(|p| p.velocity.x).sum::<f64>() / n;
    let var = ps.iter().map(|p| (p.velocity.x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let var_r = ps.iter().map(|p| p.velocity.y.powi(2) + p.velocity.z.powi(2)).sum::<f64>() / (2.0 * n);
    println!("one second of beam: {} macroparticles ({:.3e} atoms)", ps.len(), n * spec.macroparticle_weight);
    println!("mean velocity      {:.2} cm/s", mean * 100.0);
    println!("T_long             {:.1} uK", c.mass * var / c.k_b * 1e6);
    println!("T_rad              {:.1} uK", c.mass * var_r / c.k_b * 1e6);
    println!("mean energy        {:.0} uK (kinetic temperature {:.0} uK)", c.joule_to_uk(spec.mean_longitudinal_energy(&c)), spec.kinetic_temperature(&c) * 1e6);

    // 8.4e7 atoms per launch, one launch per second, 0.2 s wide
    let env = pulsed_schedule(1.0, 8.4e7, 0.2, 1e9)?;
    let dt = 0.02;
    println!("\npulsed source, atoms per {:.0} ms bin:", dt * 1e3);
    for k in 0..15 {
        let t = k as f64 * dt;
        let atoms: f64 = emit_enveloped(&spec, &env, t, dt, &c, &mut rng).iter().fold(0.0, |a, p| a + p.weight);
        println!("{:>6.2} s {:>10.3e} {}", t, atoms, "#".repeat((atoms / 2e5) as usize));
    }
    Ok(())
}
