//! Fraction of the beam that makes it over the entrance barrier, for a few
//! barrier heights.
//!
//! ```text
//! cargo run --release --example capture
//! ```

use trapload::config::SimConfig;
use trapload::loading::capture_fraction;

fn main() -> trapload::Result<()> {
    let cfg = SimConfig::builtin(&["beam.weight=4000".to_string()])?.loading_config(None)?;
    println!("{:>8} {:>12} {:>9}", "p5 [A]", "barrier [uK]", "fraction");
    for i in [12.0, 20.0, 28.1, 40.0, 56.0] {
        let mut c = cfg.clone();
        c.trap.currents.set("p5", i);
        let r = capture_fraction(&c, 1.0, 0.3)?;
        println!("{:>8.1} {:>12.0} {:>9.3}", i, r.barrier_uk.unwrap_or(f64::NAN), r.fraction);
    }
    Ok(())
}
