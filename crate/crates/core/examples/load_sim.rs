//! Continuous loading of the default chip trap from the slow beam.
//!
//! Runs 10 s at a coarse macroparticle weight by default. Arguments are
//! config overrides applied on top, e.g.
//! `cargo run --release --example load_sim -- run.duration_s=60 beam.weight=380`.

use std::time::Instant;

use trapload::config::SimConfig;
use trapload::loading::{prepare, run_prepared};

fn main() -> trapload::Result<()> {
    let mut overrides = vec!["run.duration_s=10".to_string(), "beam.weight=2000".to_string()];
    overrides.extend(std::env::args().skip(1));
    let loaded = SimConfig::builtin(&overrides)?;
    let cfg = loaded.loading_config(None)?;

    let t0 = Instant::now();
    let prep = prepare(&cfg)?;
    let f = prep.trap.frequencies_hz();
    println!(
        "trap: f = ({:.1}, {:.1}, {:.1}) Hz, depth {:.0} uK, barrier {:.0} uK, dt {:.3} ms (prepared in {:.1} s)",
        f[0],
        f[1],
        f[2],
        prep.trap.depth_uk,
        prep.trap.barrier_height_uk.unwrap_or(f64::NAN),
        prep.dt * 1e3,
        t0.elapsed().as_secs_f64()
    );
    println!("beam: transverse sigma ({:.3}, {:.3}) mm", prep.beam.transverse_sigma[0] * 1e3, prep.beam.transverse_sigma[1] * 1e3);

    let t1 = Instant::now();
    let r = run_prepared(&cfg, &prep)?;
    let wall = t1.elapsed().as_secs_f64();

    println!("{:>7} {:>11} {:>8} {:>11} {:>9}", "t [s]", "N", "T [uK]", "n_pk [m^-3]", "psd");
    for rec in &r.records {
        let s = &rec.stats;
        println!("{:>7.2} {:>11.4e} {:>8.1} {:>11.3e} {:>9.2e}", rec.t, s.n, s.temperature * 1e6, s.n_peak, s.psd);
    }
    let l = &r.ledger;
    println!(
        "ledger (macroparticles): injected {} crossed {} reflected {} escaped {} bg {} cross {} evap {} trapped {} in flight {}, closure {:.1e}",
        l.injected, l.crossings, l.reflected, l.escaped, l.background, l.crosstalk, l.evaporated, l.trapped, l.in_flight, l.closure_error()
    );
    if let Some(s) = r.saturation {
        println!("saturation fit: N_ss = {:.3e}, tau = {:.2} s", s.n_ss, s.tau);
    }
    if let Some(l) = r.initial_rate {
        println!("initial loading rate: {:.3e} atoms/s", l.slope);
    }
    println!("collisions: {}, steps: {}, wall {:.1} s", r.collisions, r.steps, wall);
    Ok(())
}
