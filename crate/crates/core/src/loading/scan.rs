//! Parameter scans built on repeated loading runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{prepare, run_prepared, LoadingConfig};
use crate::error::Result;

/// One scan setting evaluated over several seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// The scanned quantity (current in A, or threshold in μK).
    pub control: f64,
    pub barrier_uk: Option<f64>,
    /// Final weighted atom number per seed.
    pub n: Vec<f64>,
    pub mean: f64,
    /// Standard error of the mean over seeds.
    pub sem: f64,
    /// Worst atom-ledger closure error over the seeds.
    pub closure_error: f64,
    /// Why the point is missing, if it is.
    pub error: Option<String>,
}

impl ScanPoint {
    fn from_runs(control: f64, barrier_uk: Option<f64>, runs: Vec<(f64, f64)>) -> Self {
        let (n, closure): (Vec<f64>, Vec<f64>) = runs.into_iter().unzip();
        let closure_error = closure.into_iter().fold(0.0, f64::max);
        let k = n.len() as f64;
        let mean = n.iter().sum::<f64>() / k;
        let sem = if n.len() > 1 { (n.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt() } else { 0.0 };
        Self { control, barrier_uk, n, mean, sem, closure_error, error: None }
    }

    fn missing(control: f64, error: String) -> Self {
        Self { control, barrier_uk: None, n: Vec::new(), mean: f64::NAN, sem: f64::NAN, closure_error: f64::NAN, error: Some(error) }
    }
}

pub const SCAN_HEADER: &str = "control,barrier_uK,N_mean,N_sem,n_seeds,error";

pub fn scan_csv(points: &[ScanPoint]) -> String {
    let mut s = format!("{SCAN_HEADER}\n");
    for p in points {
        let b = p.barrier_uk.map_or("nan".into(), |v| format!("{v:.6}"));
        let e = p.error.as_deref().unwrap_or("").replace(',', ";");
        s += &format!("{:.6},{b},{:.6e},{:.6e},{},{e}\n", p.control, p.mean, p.sem, p.n.len());
    }
    s
}

/// Final atom number and ledger closure error for each seed.
fn run_seeds(cfg: &LoadingConfig, prep: &super::Prepared, seeds: &[u64]) -> Result<Vec<(f64, f64)>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let c = LoadingConfig { seed, ..cfg.clone() };
            run_prepared(&c, prep).map(|r| (r.final_n(), r.ledger.closure_error()))
        })
        .collect()
}

/// Final atom number after `loading_time` for each current of `channel`,
/// sorted by the resulting barrier height. Settings without a trap are kept
/// as missing points.
pub fn scan_barrier(base: &LoadingConfig, channel: &str, currents: &[f64], loading_time: f64, seeds: &[u64]) -> Vec<ScanPoint> {
    let mut points: Vec<ScanPoint> = currents
        .par_iter()
        .map(|&i| {
            let mut cfg = base.clone();
            cfg.trap.currents.set(channel, i);
            cfg.duration = loading_time;
            let prep = match prepare(&cfg) {
                Ok(p) => p,
                Err(e) => return ScanPoint::missing(i, e.to_string()),
            };
            let barrier = prep.trap.barrier_height_uk;
            match run_seeds(&cfg, &prep, seeds) {
                Ok(n) => ScanPoint::from_runs(i, barrier, n),
                Err(e) => ScanPoint { barrier_uk: barrier, ..ScanPoint::missing(i, e.to_string()) },
            }
        })
        .collect();
    points.sort_by(|a, b| a.barrier_uk.unwrap_or(f64::INFINITY).total_cmp(&b.barrier_uk.unwrap_or(f64::INFINITY)).then(a.control.total_cmp(&b.control)));
    points
}

/// Final atom number after `loading_time` for each evaporation threshold (μK).
/// `None` in `thresholds` means the knife is off.
pub fn scan_evaporation(base: &LoadingConfig, thresholds: &[Option<f64>], loading_time: f64, seeds: &[u64]) -> Result<Vec<ScanPoint>> {
    let mut cfg = base.clone();
    cfg.duration = loading_time;
    let prep = prepare(&cfg)?;
    let barrier = prep.trap.barrier_height_uk;
    Ok(thresholds
        .par_iter()
        .map(|&th| {
            let mut c = cfg.clone();
            c.losses.evaporation_threshold = th;
            let control = th.unwrap_or(f64::INFINITY);
            match run_seeds(&c, &prep, seeds) {
                Ok(n) => ScanPoint::from_runs(control, barrier, n),
                Err(e) => ScanPoint::missing(control, e.to_string()),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptureResult {
    pub injected: u64,
    pub crossed: u64,
    pub fraction: f64,
    pub barrier_uk: Option<f64>,
    pub closure_error: f64,
}

/// Fraction of the atoms injected during `window` that cross the barrier
/// plane into the trap. The beam runs for `window` from an empty trap; the
/// run continues for `settle` seconds so every atom has reached or turned
/// back from the barrier.
pub fn capture_fraction(base: &LoadingConfig, window: f64, settle: f64) -> Result<CaptureResult> {
    let mut cfg = base.clone();
    cfg.initial.clear();
    cfg.beam.start = 0.0;
    cfg.beam.stop = Some(window);
    cfg.duration = window + settle;
    cfg.record_interval = cfg.record_interval.min(cfg.duration);
    let prep = prepare(&cfg)?;
    let r = run_prepared(&cfg, &prep)?;
    let l = r.ledger;
    let fraction = if l.injected > 0 { l.crossings as f64 / l.injected as f64 } else { 0.0 };
    Ok(CaptureResult { injected: l.injected, crossed: l.crossings, fraction, barrier_uk: prep.trap.barrier_height_uk, closure_error: l.closure_error() })
}
