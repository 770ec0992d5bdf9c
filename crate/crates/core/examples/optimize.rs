//! Differential evolution on a test function, then on the loading itself:
//! the p5 current that maximizes the atom number after a short loading time.
//!
//! ```text
//! cargo run --release --example optimize
//! ```

use trapload::config::SimConfig;
use trapload::optimize::{optimize, optimize_loading, DEConfig};

fn main() -> trapload::Result<()> {
    let mut de = DEConfig::new(vec![-2.0; 4], vec![2.0; 4]);
    de.generations = 300;
    let rosenbrock = |x: &[f64], _: u64| Ok(-(0..3).map(|i| 100.0 * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2)).sum::<f64>());
    let r = optimize(rosenbrock, &de)?;
    println!("rosenbrock-4d: best {:?} score {:.2e} after {} evaluations", r.best, r.best_score, r.evaluations);

    let cfg = SimConfig::builtin(&["beam.weight=20000".into(), "run.dt_s=0.0004".into(), "run.collide_every=5".into()])?.loading_config(None)?;
    let mut de = DEConfig::new(vec![8.0], vec![64.0]);
    de.population = 4;
    de.generations = 3;
    let best = optimize_loading(&cfg, &["p5".to_string()], 6.0, &de, None)?;
    let res = best.result.as_ref().expect("one free channel");
    println!("\n{:>4} {:>11} {:>11} {:>8}", "gen", "best N", "mean N", "p5 [A]");
    for row in &res.trace {
        println!("{:>4} {:>11.3e} {:>11.3e} {:>8.2}", row.generation, row.best_score, row.mean_score, row.best_params[0]);
    }
    println!(
        "\nbest p5 = {:.2} A: barrier {:.0} uK, depth {:.0} uK",
        best.currents.get("p5").unwrap_or(f64::NAN),
        best.trap.barrier_height_uk.unwrap_or(f64::NAN),
        best.trap.depth_uk
    );
    Ok(())
}
