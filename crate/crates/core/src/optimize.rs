//! Differential evolution for noisy black-box objectives.
//!
//! DE/rand/1/bin with clamping at the bounds. Scores are maximized. Every
//! candidate is scored by the mean of `evals_per_candidate` evaluations; the
//! evaluation seeds are shared by all candidates of a generation, and with
//! more than one evaluation the parents are re-scored on those seeds too, so
//! selection is a paired comparison. A candidate whose evaluation fails
//! scores −∞ and the failure is logged.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loading::{run_loading, LoadingConfig};
use crate::rng::{stream, Purpose};
use crate::trap::TrapCharacterization;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub population: usize,
    pub f_weight: f64,
    pub crossover: f64,
    pub generations: usize,
    pub evals_per_candidate: usize,
    pub seed: u64,
    /// Stop once this many objective evaluations have been spent.
    pub max_evaluations: Option<usize>,
}

impl DEConfig {
    /// Defaults: NP = 10·dimension (at least 4), Fw = 0.6, CR = 0.9.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let np = (10 * lower.len()).max(4);
        Self {
            lower,
            upper,
            population: np,
            f_weight: 0.6,
            crossover: 0.9,
            generations: 100,
            evals_per_candidate: 1,
            seed: 1,
            max_evaluations: None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.lower.len() != self.upper.len() {
            return bad("lower and upper bounds differ in length".into());
        }
        if let Some(i) = (0..self.lower.len()).find(|&i| !(self.lower[i] < self.upper[i])) {
            return bad(format!("bound {i}: lower must be below upper"));
        }
        if self.population < 4 {
            return bad("population must be at least 4".into());
        }
        if !(self.f_weight > 0.0 && self.f_weight <= 2.0) {
            return bad("differential weight must lie in (0, 2]".into());
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return bad("crossover rate must lie in [0, 1]".into());
        }
        if self.evals_per_candidate == 0 {
            return bad("evals_per_candidate must be at least 1".into());
        }
        Ok(())
    }

    fn fingerprint(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_score: f64,
    pub mean_score: f64,
    pub best_params: Vec<f64>,
}

impl TraceRow {
    pub fn csv_row(&self) -> String {
        let mut s = format!("{},{:.12e},{:.12e}", self.generation, self.best_score, self.mean_score);
        for p in &self.best_params {
            s.push_str(&format!(",{p:.12e}"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveFailureRecord {
    pub generation: usize,
    pub params: Vec<f64>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DEResult {
    /// Best member of the final population by its latest score. For a
    /// deterministic objective this is the best candidate ever scored; for
    /// a noisy one it avoids keeping a single lucky draw.
    pub best: Vec<f64>,
    pub best_score: f64,
    /// Highest score seen so far (nondecreasing along the trace).
    pub best_ever_score: f64,
    pub best_ever: Vec<f64>,
    /// One row per generation, generation 0 being the initial population.
    pub trace: Vec<TraceRow>,
    pub evaluations: usize,
    /// Set when `max_evaluations` stopped the run early.
    pub budget_exhausted: bool,
    pub failures: Vec<ObjectiveFailureRecord>,
}

/// Write the trace as CSV: `gen,best_score,mean_score,best_params...`.
pub fn write_trace<W: Write>(mut w: W, trace: &[TraceRow], names: &[String]) -> std::io::Result<()> {
    write!(w, "gen,best_score,mean_score")?;
    for n in names {
        write!(w, ",{n}")?;
    }
    writeln!(w)?;
    for r in trace {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    generation: usize,
    population: Vec<Vec<f64>>,
    scores: Vec<f64>,
    result: DEResult,
}

/// Seed of evaluation `e` in generation `g`.
pub fn evaluation_seed(seed: u64, generation: usize, e: usize) -> u64 {
    stream(seed, Purpose::Objective, generation as u64, e as u64).next_u64()
}

struct Scored {
    score: f64,
    failure: Option<String>,
}

fn score<F>(objective: &F, x: &[f64], seeds: &[u64]) -> Scored
where
    F: Fn(&[f64], u64) -> Result<f64> + Sync,
{
    let mut sum = 0.0;
    for &s in seeds {
        match objective(x, s) {
            Ok(v) if !v.is_nan() => sum += v,
            Ok(_) => return Scored { score: f64::NEG_INFINITY, failure: Some("objective returned NaN".into()) },
            Err(e) => return Scored { score: f64::NEG_INFINITY, failure: Some(e.to_string()) },
        }
    }
    Scored { score: sum / seeds.len() as f64, failure: None }
}

/// Maximize `objective(x, seed)` over the box. The seed lets stochastic
/// objectives use common random numbers.
pub fn optimize<F>(objective: F, cfg: &DEConfig) -> Result<DEResult>
where
    F: Fn(&[f64], u64) -> Result<f64> + Sync,
{
    optimize_checkpointed(objective, cfg, None)
}

/// As [`optimize`], saving the state after every generation to `checkpoint`
/// and resuming from it when it exists and matches the configuration.
pub fn optimize_checkpointed<F>(objective: F, cfg: &DEConfig, checkpoint: Option<&Path>) -> Result<DEResult>
where
    F: Fn(&[f64], u64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let d = cfg.dimension();
    let np = cfg.population;
    let ne = cfg.evals_per_candidate;
    let budget = cfg.max_evaluations.unwrap_or(usize::MAX);
    let clamp = |x: &mut [f64]| {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(cfg.lower[i], cfg.upper[i]);
        }
    };
    let mean_finite = |s: &[f64]| {
        let f: Vec<f64> = s.iter().copied().filter(|v| v.is_finite()).collect();
        if f.is_empty() {
            f64::NEG_INFINITY
        } else {
            f.iter().sum::<f64>() / f.len() as f64
        }
    };

    let resumed = match checkpoint {
        Some(p) if p.exists() => {
            let text = std::fs::read_to_string(p)?;
            let c: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Config(format!("checkpoint {}: {e}", p.display())))?;
            if c.fingerprint != cfg.fingerprint() {
                return Err(Error::Config(format!("checkpoint {} belongs to a different optimizer configuration", p.display())));
            }
            Some(c)
        }
        _ => None,
    };

    let (mut gen, mut pop, mut scores, mut res) = match resumed {
        Some(c) => (c.generation, c.population, c.scores, c.result),
        None => {
            let mut rng = stream(cfg.seed, Purpose::Optimizer, 0, 0);
            let pop: Vec<Vec<f64>> =
                (0..np).map(|_| (0..d).map(|i| rng.gen_range(cfg.lower[i]..=cfg.upper[i])).collect()).collect();
            let seeds: Vec<u64> = (0..ne).map(|e| evaluation_seed(cfg.seed, 0, e)).collect();
            let scored: Vec<Scored> = pop.par_iter().map(|x| score(&objective, x, &seeds)).collect();
            let scores: Vec<f64> = scored.iter().map(|s| s.score).collect();
            let mut res = DEResult {
                best: pop[0].clone(),
                best_score: f64::NEG_INFINITY,
                best_ever_score: f64::NEG_INFINITY,
                best_ever: pop[0].clone(),
                trace: Vec::new(),
                evaluations: np * ne,
                budget_exhausted: false,
                failures: Vec::new(),
            };
            log_failures(&mut res, 0, &pop, &scored);
            update_best(&mut res, &pop, &scores);
            res.trace.push(TraceRow { generation: 0, best_score: res.best_ever_score, mean_score: mean_finite(&scores), best_params: res.best_ever.clone() });
            (0, pop, scores, res)
        }
    };
    if let Some(p) = checkpoint {
        save(p, cfg, gen, &pop, &scores, &res)?;
    }

    let rescore = ne > 1;
    let per_gen = if rescore { 2 * np * ne } else { np * ne };
    while gen < cfg.generations {
        if res.evaluations + per_gen > budget {
            res.budget_exhausted = true;
            break;
        }
        gen += 1;
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let mut rng = stream(cfg.seed, Purpose::Optimizer, gen as u64, i as u64);
                let pick = |rng: &mut rand_chacha::ChaCha8Rng, taken: &[usize]| loop {
                    let r = rng.gen_range(0..np);
                    if !taken.contains(&r) {
                        break r;
                    }
                };
                let a = pick(&mut rng, &[i]);
                let b = pick(&mut rng, &[i, a]);
                let c = pick(&mut rng, &[i, a, b]);
                let forced = rng.gen_range(0..d);
                let mut t = pop[i].clone();
                for k in 0..d {
                    if k == forced || rng.gen::<f64>() < cfg.crossover {
                        t[k] = pop[a][k] + cfg.f_weight * (pop[b][k] - pop[c][k]);
                    }
                }
                clamp(&mut t);
                t
            })
            .collect();
        let seeds: Vec<u64> = (0..ne).map(|e| evaluation_seed(cfg.seed, gen, e)).collect();
        let trial_scored: Vec<Scored> = trials.par_iter().map(|x| score(&objective, x, &seeds)).collect();
        if rescore {
            let parent_scored: Vec<Scored> = pop.par_iter().map(|x| score(&objective, x, &seeds)).collect();
            log_failures(&mut res, gen, &pop, &parent_scored);
            scores = parent_scored.iter().map(|s| s.score).collect();
            update_best(&mut res, &pop, &scores);
        }
        res.evaluations += per_gen;
        log_failures(&mut res, gen, &trials, &trial_scored);
        for (i, (t, s)) in trials.into_iter().zip(&trial_scored).enumerate() {
            if s.score >= scores[i] {
                pop[i] = t;
                scores[i] = s.score;
            }
        }
        update_best(&mut res, &pop, &scores);
        res.trace.push(TraceRow { generation: gen, best_score: res.best_ever_score, mean_score: mean_finite(&scores), best_params: res.best_ever.clone() });
        if let Some(p) = checkpoint {
            save(p, cfg, gen, &pop, &scores, &res)?;
        }
    }
    Ok(res)
}

fn log_failures(res: &mut DEResult, generation: usize, xs: &[Vec<f64>], scored: &[Scored]) {
    for (x, s) in xs.iter().zip(scored) {
        if let Some(m) = &s.failure {
            res.failures.push(ObjectiveFailureRecord { generation, params: x.clone(), message: m.clone() });
        }
    }
}

fn update_best(res: &mut DEResult, pop: &[Vec<f64>], scores: &[f64]) {
    let mut top = 0;
    for (i, (x, &s)) in pop.iter().zip(scores).enumerate() {
        if s > res.best_ever_score {
            res.best_ever_score = s;
            res.best_ever = x.clone();
        }
        if s > scores[top] {
            top = i;
        }
    }
    res.best = pop[top].clone();
    res.best_score = scores[top];
}

fn save(path: &Path, cfg: &DEConfig, generation: usize, pop: &[Vec<f64>], scores: &[f64], res: &DEResult) -> Result<()> {
    let c = Checkpoint { fingerprint: cfg.fingerprint(), generation, population: pop.to_vec(), scores: scores.to_vec(), result: res.clone() };
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec(&c).map_err(|e| Error::Config(e.to_string()))?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Outcome of a current optimization.
#[derive(Debug, Clone)]
pub struct LoadingOptimum {
    pub currents: crate::magnetostatics::CurrentSetting,
    /// Mean atom number at the end of loading, or `None` when nothing was optimized.
    pub score: Option<f64>,
    pub trap: TrapCharacterization,
    pub result: Option<DEResult>,
}

/// Maximize the atom number after `loading_time` over the currents of the
/// free `channels`. The bounds in `de` are in the order of `channels`. A
/// setting without a usable trap scores −∞.
pub fn optimize_loading(
    base: &LoadingConfig,
    channels: &[String],
    loading_time: f64,
    de: &DEConfig,
    checkpoint: Option<&Path>,
) -> Result<LoadingOptimum> {
    for ch in channels {
        if !base.trap.layout.channels.contains(ch) {
            return Err(Error::Config(format!("free channel `{ch}` is not in the layout")));
        }
    }
    if channels.is_empty() {
        let trap = base.trap.characterize()?;
        return Ok(LoadingOptimum { currents: base.trap.currents.clone(), score: None, trap, result: None });
    }
    if de.dimension() != channels.len() {
        return Err(Error::Config("optimizer bounds must match the free channels".into()));
    }
    let configure = |x: &[f64], seed: u64| {
        let mut c = base.clone();
        for (ch, &v) in channels.iter().zip(x) {
            c.trap.currents.set(ch, v);
        }
        c.duration = loading_time;
        c.seed = seed;
        c.snapshots = None;
        c
    };
    let objective = |x: &[f64], seed: u64| -> Result<f64> { Ok(run_loading(&configure(x, seed))?.final_n()) };
    let result = optimize_checkpointed(objective, de, checkpoint)?;
    let best = configure(&result.best, 0);
    let trap = best.trap.characterize()?;
    Ok(LoadingOptimum { currents: best.trap.currents, score: Some(result.best_score), trap, result: Some(result) })
}
