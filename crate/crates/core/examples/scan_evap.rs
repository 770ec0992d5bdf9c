//! Atoms accumulated with a microwave knife held at a fixed energy during the
//! whole loading time, versus the knife energy.
//!
//! ```text
//! cargo run --release --example scan_evap
//! ```

use trapload::config::SimConfig;
use trapload::loading::scan_evaporation;

fn main() -> trapload::Result<()> {
    let mut overrides: Vec<String> =
        ["beam.weight=20000", "run.dt_s=0.0004", "run.collide_every=5", "scan.loading_time_s=8", "scan.seeds=[1,2]"]
            .map(String::from)
            .to_vec();
    overrides.extend(std::env::args().skip(1));
    let loaded = SimConfig::builtin(&overrides)?;
    let s = &loaded.config.scan;
    let cfg = loaded.loading_config(None)?;
    let depth = cfg.trap.characterize()?.transverse_depth_uk;
    let mut thresholds: Vec<Option<f64>> = [200.0, 400.0, 600.0, 800.0, 1000.0].map(Some).to_vec();
    thresholds.push(None);
    let points = scan_evaporation(&cfg, &thresholds, s.loading_time_s, &s.seeds)?;

    println!("radial trap depth {:.0} uK", depth.unwrap_or(f64::NAN));
    println!("{:>14} {:>11} {:>9}", "knife [uK]", "N", "sem");
    for p in &points {
        let label = if p.control.is_finite() { format!("{:.0}", p.control) } else { "off".into() };
        println!("{:>14} {:>11.3e} {:>9.1e}", label, p.mean, p.sem);
    }
    Ok(())
}
