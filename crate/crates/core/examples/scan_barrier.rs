//! Atoms accumulated after a fixed loading time versus the entrance barrier,
//! which is set through the p5 current.
//!
//! Short and coarse by default so it finishes in a few minutes; pass config
//! overrides to refine, e.g. `scan.loading_time_s=33 beam.weight=6000`.
//!
//! ```text
//! cargo run --release --example scan_barrier
//! ```

use trapload::config::SimConfig;
use trapload::loading::scan_barrier;

fn main() -> trapload::Result<()> {
    let mut overrides: Vec<String> =
        ["beam.weight=20000", "run.dt_s=0.0004", "run.collide_every=5", "scan.loading_time_s=8", "scan.seeds=[1,2]"]
            .map(String::from)
            .to_vec();
    overrides.extend(std::env::args().skip(1));
    let loaded = SimConfig::builtin(&overrides)?;
    let s = &loaded.config.scan;
    let cfg = loaded.loading_config(None)?;
    let currents = [8.0, 16.0, 24.0, 28.1, 36.0, 48.0, 64.0];
    let points = scan_barrier(&cfg, &s.channel, &currents, s.loading_time_s, &s.seeds);

    println!("{:>8} {:>12} {:>11} {:>9}", "p5 [A]", "barrier [uK]", "N", "sem");
    for p in &points {
        match &p.error {
            None => println!("{:>8.1} {:>12.0} {:>11.3e} {:>9.1e}", p.control, p.barrier_uk.unwrap_or(f64::NAN), p.mean, p.sem),
            Some(e) => println!("{:>8.1} {:>12} missing: {e}", p.control, "-"),
        }
    }
    Ok(())
}
