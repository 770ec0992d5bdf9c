//! Continuous loading of the chip trap from the guided beam.
//!
//! A run analyses the trap once with the exact wire field, tabulates the
//! field over the simulation domain, and then advances the ensemble through
//! push → (collide, losses) → inject → record. Every stochastic draw comes
//! from a counter-addressed stream, so results depend only on the seed.

pub mod fit;
pub mod scan;

use std::io::Write;
use std::path::PathBuf;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam::{emit_enveloped, entrance_profile, BeamSpec, FluxEnvelope};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kinetics::{
    apply_losses, collide, init_accel, push, remove_indices, stats_lenient, CollisionCellGrid, EnsembleStats,
    EvaporationMode, KnifeRegion, LossChannels, LossLedger, Particle, ScatteringModel, StatsOptions, FLAG_CAPTURED, FLAG_ENTERED,
};
use crate::magnetostatics::{ChipLayout, CurrentSetting, InterpolatedField, SpinState, WireField, ZeemanPotential};
use crate::potential::Potential;
use crate::rng::{stream, Purpose};
use crate::trap::{analyze, AnalysisOptions, SearchBox, TrapCharacterization};
use fit::{fit_line, fit_relaxation, fit_saturation};

pub use fit::{LineFit, RelaxationFit, SaturationFit};
pub use scan::{capture_fraction, scan_barrier, scan_csv, scan_evaporation, CaptureResult, ScanPoint, SCAN_HEADER};

/// Where the trap is and how to find it.
#[derive(Debug, Clone)]
pub struct TrapSetup {
    pub layout: ChipLayout,
    pub currents: CurrentSetting,
    pub bias: Vector3<f64>,
    pub spin: SpinState,
    pub constants: PhysicalConstants,
    pub gravity: bool,
    pub search_box: SearchBox,
    pub minimum_guess: Vector3<f64>,
    /// Point on the guide axis where the beam enters; the barrier path starts here.
    pub guide_entrance: Vector3<f64>,
    /// Direction of travel along the guide.
    pub guide_axis: Vector3<f64>,
    /// Rays per slice in the depth search (fewer is faster).
    pub depth_rays: usize,
    pub depth_slices: usize,
}

impl TrapSetup {
    pub fn field(&self) -> Result<WireField> {
        Ok(WireField::new(&self.layout, &self.currents)?.with_bias(self.bias))
    }

    pub fn potential(&self) -> Result<ZeemanPotential<WireField>> {
        ZeemanPotential::new(self.field()?, self.spin, self.constants, self.gravity)
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        let mut o = AnalysisOptions::new(self.search_box);
        o.guide_entrance = Some(self.guide_entrance);
        o.depth.rays = self.depth_rays;
        o.depth.slices = self.depth_slices;
        o
    }

    /// Full characterization; any failure becomes `NoTrap`.
    pub fn characterize(&self) -> Result<TrapCharacterization> {
        let pot = self.potential()?;
        analyze(&pot, &self.minimum_guess, &self.analysis_options()).map_err(|e| match e {
            Error::Config(_) | Error::UntrappableState { .. } => e,
            other => Error::NoTrap(other.to_string()),
        })
    }
}

#[derive(Debug, Clone)]
pub struct BeamSettings {
    pub flux: f64,
    pub mean_velocity: f64,
    pub t_long: f64,
    pub t_rad: f64,
    pub weight: f64,
    /// Rms position spread in the entrance plane; computed from the guide's
    /// thermal profile at `t_rad` when `None`.
    pub transverse_sigma: Option<[f64; 2]>,
    pub envelope: FluxEnvelope,
    pub start: f64,
    pub stop: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct LossSettings {
    pub tau_background: Option<f64>,
    pub tau_crosstalk: Option<f64>,
    /// μK above the trap bottom.
    pub evaporation_threshold: Option<f64>,
    pub evaporation_mode: EvaporationMode,
    pub cull_radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DomainSettings {
    /// Tabulated-field box, m.
    pub lo: Vector3<f64>,
    pub hi: Vector3<f64>,
    pub spacing: Vector3<f64>,
    /// Collision grid box and its cell size, m.
    pub collision_lo: Vector3<f64>,
    pub collision_hi: Vector3<f64>,
    pub cell: Vector3<f64>,
    pub max_per_cell: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Trapped means inside the trap with total energy below the lowest saddle.
    #[default]
    Energy,
    /// Atoms still in the trap after the hold time with the beam off.
    Hold,
}

#[derive(Debug, Clone)]
pub struct SnapshotSettings {
    pub dir: PathBuf,
    pub config_hash: String,
}

#[derive(Debug, Clone)]
pub struct LoadingConfig {
    pub trap: TrapSetup,
    pub beam: BeamSettings,
    pub losses: LossSettings,
    /// `None` switches collisions off.
    pub scattering: Option<ScatteringModel>,
    pub domain: DomainSettings,
    pub dt: f64,
    /// Collisions and losses run every this many push steps.
    pub collide_every: usize,
    pub duration: f64,
    pub record_interval: f64,
    pub seed: u64,
    pub count_mode: CountMode,
    pub hold_time: f64,
    pub stats: StatsOptions,
    pub snapshots: Option<SnapshotSettings>,
    /// Particles present at t = 0 (positions relative to nothing; absolute).
    pub initial: Vec<Particle>,
}

impl LoadingConfig {
    /// Check the settings. A zero `dt` means automatic and is resolved by
    /// [`prepare`]; the step-dependent checks then run in [`run_prepared`].
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.duration > 0.0) {
            return bad("duration must be positive");
        }
        if !(self.dt >= 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive (or zero for automatic)");
        }
        if !(self.beam.weight >= 1.0) {
            return bad("macroparticle weight must be at least 1");
        }
        if self.initial.iter().any(|p| p.weight != self.beam.weight) {
            return bad("initial particles must carry the beam's macroparticle weight");
        }
        if self.dt > 0.0 {
            self.validate_step(self.dt)?;
        }
        Ok(())
    }

    fn validate_step(&self, dt: f64) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.record_interval >= dt) {
            return bad("record interval must be at least dt");
        }
        if self.collide_every == 0 {
            return bad("collide_every must be at least 1");
        }
        let dtc = dt * self.collide_every as f64;
        let rate = self.losses.tau_background.map_or(0.0, |t| 1.0 / t) + self.losses.tau_crosstalk.map_or(0.0, |t| 1.0 / t);
        if dtc * rate >= 0.1 {
            return bad("loss step too long for the configured lifetimes (dt·collide_every/τ must stay below 0.1)");
        }
        Ok(())
    }
}

/// Analysed trap plus everything derived from it that a run needs.
pub struct Prepared {
    pub trap: TrapCharacterization,
    pub potential: ZeemanPotential<InterpolatedField>,
    pub beam: BeamSpec,
    pub grid: CollisionCellGrid,
    /// Tabulated potential at the minimum, J.
    pub u_min: f64,
    /// Lowest saddle above the minimum, J.
    pub depth: f64,
    pub barrier_point: Vector3<f64>,
    pub axis: Vector3<f64>,
    pub entrance: Vector3<f64>,
    /// Integration step: the configured one, or 1/(50·f_max) of the trap.
    pub dt: f64,
}

/// Fifty steps per period of the stiffest trap axis.
pub fn auto_dt(trap: &TrapCharacterization) -> f64 {
    let f_max = trap.frequencies_hz().iter().fold(0.0f64, |a, &b| a.max(b));
    1.0 / (50.0 * f_max)
}

/// Characterize the trap, tabulate the field and derive beam and loss settings.
pub fn prepare(cfg: &LoadingConfig) -> Result<Prepared> {
    cfg.validate()?;
    let trap = cfg.trap.characterize()?;
    prepare_with(cfg, trap)
}

pub fn prepare_with(cfg: &LoadingConfig, trap: TrapCharacterization) -> Result<Prepared> {
    let c = cfg.trap.constants;
    let min = Vector3::from(trap.minimum_position);
    let axis = cfg.trap.guide_axis.normalize();
    let barrier_point = match trap.barrier_position {
        Some(b) => Vector3::from(b),
        None => return Err(Error::NoTrap("no entrance barrier between guide and trap".into())),
    };
    let d = &cfg.domain;
    let mut hi = d.hi;
    // keep the tabulated region clear of the chip surface
    hi.z = hi.z.min(cfg.trap.search_box.hi[2]);
    let lo = d.lo;
    if !(lo.x < min.x && min.x < hi.x && lo.z < min.z && min.z < hi.z) {
        return Err(Error::Config("simulation domain does not contain the trap minimum".into()));
    }
    let exact = cfg.trap.field()?;
    let table = InterpolatedField::sample(&exact, lo, hi, d.spacing)?;
    let potential = ZeemanPotential::new(table, cfg.trap.spin, c, cfg.trap.gravity)?;
    let u_min = potential.energy(&min)?;
    let depth = c.uk_to_joule(trap.depth_uk);

    let entrance = cfg.trap.guide_entrance;
    let prof = entrance_profile(&cfg.trap.potential()?, &entrance, &axis, cfg.beam.t_rad, 1.5e-3, 121)?;
    let center = Vector3::from(prof.center);
    let sigma = cfg.beam.transverse_sigma.unwrap_or(prof.sigma);
    let beam = BeamSpec {
        flux: cfg.beam.flux,
        mean_velocity: cfg.beam.mean_velocity,
        t_long: cfg.beam.t_long,
        t_rad: cfg.beam.t_rad,
        entrance_point: center.into(),
        entrance_normal: axis.into(),
        transverse_sigma: sigma,
        macroparticle_weight: cfg.beam.weight,
    };
    beam.validate()?;
    let mut grid = CollisionCellGrid::covering(d.collision_lo, d.collision_hi, d.cell)?;
    grid.max_per_cell = d.max_per_cell;
    let dt = if cfg.dt > 0.0 { cfg.dt } else { auto_dt(&trap) };
    cfg.validate_step(dt)?;
    Ok(Prepared { trap, potential, beam, grid, u_min, depth, barrier_point, axis, entrance, dt })
}

/// Loss channels for a run: the knife acts beyond the barrier plane and the
/// cull is cylindrical about the guide axis through the minimum.
pub fn loss_channels(cfg: &LoadingConfig, prep: &Prepared) -> Result<LossChannels> {
    let ch = LossChannels {
        tau_background: cfg.losses.tau_background,
        tau_crosstalk: cfg.losses.tau_crosstalk,
        evaporation_threshold: cfg.losses.evaporation_threshold,
        evaporation_mode: cfg.losses.evaporation_mode,
        knife_region: KnifeRegion::Beyond { point: prep.barrier_point, normal: prep.axis },
        spatial_cull_radius: cfg.losses.cull_radius,
        cull_center: Vector3::from(prep.trap.minimum_position),
        cull_axis: Some(prep.axis),
    };
    ch.validate()?;
    Ok(ch)
}

/// Weighted atoms removed by each channel since the previous record.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub stats: EnsembleStats,
    pub loss_background: f64,
    pub loss_crosstalk: f64,
    pub loss_evaporation: f64,
    pub loss_escape: f64,
    /// Weighted atoms trapped for the first time since the previous record.
    pub captured: f64,
}

pub const TIME_SERIES_HEADER: &str = "t_s,N,T_uK,n_peak_m3,psd,loss_bg,loss_cross,loss_evap,loss_escape";

impl TimeSeriesRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6e},{:.6},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
            self.t,
            self.stats.n,
            self.stats.temperature * 1e6,
            self.stats.n_peak,
            self.stats.psd,
            self.loss_background,
            self.loss_crosstalk,
            self.loss_evaporation,
            self.loss_escape
        )
    }
}

pub fn write_time_series<W: Write>(mut w: W, records: &[TimeSeriesRecord]) -> std::io::Result<()> {
    writeln!(w, "{TIME_SERIES_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Particle counts for the whole run. Weighted numbers are count × weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AtomLedger {
    pub weight: f64,
    pub initial: u64,
    pub injected: u64,
    pub reflected: u64,
    pub escaped: u64,
    pub background: u64,
    pub crosstalk: u64,
    pub evaporated: u64,
    pub trapped: u64,
    /// Still present at the end but not counted as trapped.
    pub in_flight: u64,
    /// First crossings of the barrier plane.
    pub crossings: u64,
    /// Particles that counted as trapped at least once.
    pub captures: u64,
}

impl AtomLedger {
    fn add_losses(&mut self, l: &LossLedger) {
        self.background += l.background;
        self.crosstalk += l.crosstalk;
        self.evaporated += l.evaporated;
        self.escaped += l.escaped;
    }

    pub fn sources(&self) -> u64 {
        self.initial + self.injected
    }

    pub fn sinks(&self) -> u64 {
        self.reflected + self.escaped + self.background + self.crosstalk + self.evaporated + self.trapped + self.in_flight
    }

    /// |sources − sinks| / sources, on weighted numbers.
    pub fn closure_error(&self) -> f64 {
        let s = self.sources() as f64 * self.weight;
        let k = self.sinks() as f64 * self.weight;
        if s == 0.0 {
            k
        } else {
            (s - k).abs() / s
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadingResult {
    pub records: Vec<TimeSeriesRecord>,
    pub ledger: AtomLedger,
    pub trap: TrapCharacterization,
    pub beam: BeamSpec,
    pub saturation: Option<SaturationFit>,
    pub temperature_fit: Option<RelaxationFit>,
    /// Linear fit to N(t) over the initial loading window.
    pub initial_rate: Option<LineFit>,
    /// Linear fit to N(t) over the final 20% of the run.
    pub final_slope: Option<LineFit>,
    pub collisions: u64,
    pub steps: u64,
}

impl LoadingResult {
    pub fn final_n(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.stats.n)
    }
}

struct Sim<'a> {
    cfg: &'a LoadingConfig,
    prep: &'a Prepared,
    channels: LossChannels,
    particles: Vec<Particle>,
    ledger: AtomLedger,
    since_record: LossLedger,
    captured_since_record: u64,
    collisions: u64,
}

impl<'a> Sim<'a> {
    fn downstream(&self, p: &Vector3<f64>) -> bool {
        (p - self.prep.barrier_point).dot(&self.prep.axis) > 0.0
    }

    fn is_trapped(&self, p: &Particle) -> bool {
        if !p.has(FLAG_ENTERED) || !self.downstream(&p.position) {
            return false;
        }
        let m = self.prep.potential.constants.mass;
        match self.prep.potential.energy(&p.position) {
            Ok(u) => u + p.kinetic_energy(m) - self.prep.u_min < self.prep.depth,
            Err(_) => false,
        }
    }

    /// Drop particles whose force could not be evaluated, sorting them into
    /// reflected (never entered, left upstream) and escaped.
    fn cull(&mut self, failed: &[usize]) {
        for &i in failed {
            let p = &self.particles[i];
            let upstream = (p.position - self.prep.entrance).dot(&self.prep.axis) < 0.0;
            if upstream && !p.has(FLAG_ENTERED) {
                self.ledger.reflected += 1;
            } else {
                self.ledger.escaped += 1;
                self.since_record.escaped += 1;
            }
        }
        remove_indices(&mut self.particles, failed);
    }

    fn mark_crossings(&mut self) {
        let (bp, ax) = (self.prep.barrier_point, self.prep.axis);
        let n: u64 = self
            .particles
            .par_iter_mut()
            .with_min_len(1024)
            .map(|p| {
                if !p.has(FLAG_ENTERED) && (p.position - bp).dot(&ax) > 0.0 {
                    p.flags |= FLAG_ENTERED;
                    1
                } else {
                    0
                }
            })
            .sum();
        self.ledger.crossings += n;
    }

    fn record(&mut self, t: f64) -> Result<TimeSeriesRecord> {
        let trapped: Vec<Particle> = self.particles.iter().filter(|p| self.is_trapped(p)).copied().collect();
        let stats = stats_lenient(&trapped, &self.prep.potential, &self.cfg.stats);
        let w = self.cfg.beam.weight;
        let l = std::mem::take(&mut self.since_record);
        if let Some(s) = &self.cfg.snapshots {
            self.snapshot(s, t)?;
        }
        Ok(TimeSeriesRecord {
            t,
            stats,
            loss_background: l.background as f64 * w,
            loss_crosstalk: l.crosstalk as f64 * w,
            loss_evaporation: l.evaporated as f64 * w,
            loss_escape: l.escaped as f64 * w,
            captured: std::mem::take(&mut self.captured_since_record) as f64 * w,
        })
    }

    fn snapshot(&self, s: &SnapshotSettings, t: f64) -> Result<()> {
        std::fs::create_dir_all(&s.dir)?;
        let path = s.dir.join(format!("snapshot_t{:010.4}.csv", t));
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# t_s={t:.6} seed={} config_hash={}", self.cfg.seed, s.config_hash)?;
        writeln!(f, "x,y,z,vx,vy,vz,weight")?;
        for p in &self.particles {
            writeln!(
                f,
                "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{}",
                p.position.x, p.position.y, p.position.z, p.velocity.x, p.velocity.y, p.velocity.z, p.weight
            )?;
        }
        Ok(())
    }

    fn step_losses(&mut self, dtc: f64, beam_on: bool, step: u64) -> Result<()> {
        if let Some(model) = &self.cfg.scattering {
            let r = collide(&mut self.particles, &self.prep.grid, model, dtc, self.cfg.seed, step)?;
            self.collisions += r.collisions;
        }
        let crosstalk_on = beam_on && self.cfg.losses.tau_crosstalk.is_some();
        let l = apply_losses(
            &mut self.particles,
            &self.channels,
            &self.prep.potential,
            self.prep.u_min,
            dtc,
            crosstalk_on,
            self.cfg.seed,
            step,
        );
        self.ledger.add_losses(&l);
        self.since_record.add(&l);
        self.mark_captures();
        Ok(())
    }

    fn mark_captures(&mut self) {
        let fresh: Vec<usize> = self
            .particles
            .par_iter()
            .enumerate()
            .with_min_len(1024)
            .filter(|(_, p)| p.has(FLAG_ENTERED) && !p.has(FLAG_CAPTURED) && self.is_trapped(p))
            .map(|(i, _)| i)
            .collect();
        for &i in &fresh {
            self.particles[i].flags |= FLAG_CAPTURED;
        }
        self.ledger.captures += fresh.len() as u64;
        self.captured_since_record += fresh.len() as u64;
    }
}

fn beam_active(b: &BeamSettings, t: f64) -> bool {
    t >= b.start && b.stop.map_or(true, |s| t < s) && b.flux > 0.0
}

/// Run a loading experiment on an already prepared trap.
pub fn run_prepared(cfg: &LoadingConfig, prep: &Prepared) -> Result<LoadingResult> {
    cfg.validate()?;
    let mut sim = Sim {
        cfg,
        prep,
        channels: loss_channels(cfg, prep)?,
        particles: cfg.initial.clone(),
        ledger: AtomLedger { weight: cfg.beam.weight, initial: cfg.initial.len() as u64, ..Default::default() },
        since_record: LossLedger::default(),
        captured_since_record: 0,
        collisions: 0,
    };
    for p in sim.particles.iter_mut() {
        if (p.position - prep.barrier_point).dot(&prep.axis) > 0.0 {
            p.flags |= FLAG_ENTERED;
        }
    }
    let failed = init_accel(&mut sim.particles, &prep.potential);
    sim.cull(&failed);

    let c = cfg.trap.constants;
    let dt = prep.dt;
    let steps = (cfg.duration / dt).round() as u64;
    let hold_steps = if cfg.count_mode == CountMode::Hold { (cfg.hold_time / dt).round() as u64 } else { 0 };
    let rec_every = ((cfg.record_interval / dt).round() as u64).max(1);
    let mut records = vec![sim.record(0.0)?];
    let mut k: u64 = 0;
    while k < steps + hold_steps {
        let t = k as f64 * dt;
        let holding = k >= steps;
        let beam_on = !holding && beam_active(&cfg.beam, t);

        let failed = push(&mut sim.particles, &prep.potential, dt);
        sim.cull(&failed);
        sim.mark_crossings();

        if (k + 1) % cfg.collide_every as u64 == 0 {
            sim.step_losses(dt * cfg.collide_every as f64, beam_on, k)?;
        }

        if beam_on {
            let mut rng = stream(cfg.seed, Purpose::Inject, k, 0);
            let mut fresh = emit_enveloped(&prep.beam, &cfg.beam.envelope, t - cfg.beam.start, dt, &c, &mut rng);
            sim.ledger.injected += fresh.len() as u64;
            let bad = init_accel(&mut fresh, &prep.potential);
            let start = sim.particles.len();
            sim.particles.extend(fresh);
            let bad: Vec<usize> = bad.into_iter().map(|i| i + start).collect();
            sim.cull(&bad);
        }

        k += 1;
        // a periodic record just short of the end would duplicate the final one
        let periodic = k % rec_every == 0 && steps - k.min(steps) > rec_every / 100;
        if !holding && (periodic || k == steps) && k <= steps {
            let r = sim.record(k as f64 * dt)?;
            if r.t > records.last().unwrap().t {
                records.push(r);
            }
        }
    }
    if cfg.count_mode == CountMode::Hold {
        // After the hold every atom still inside counts.
        let inside: Vec<Particle> = sim.particles.iter().filter(|p| p.has(FLAG_ENTERED) && sim.downstream(&p.position)).copied().collect();
        let stats = stats_lenient(&inside, &prep.potential, &cfg.stats);
        let last = records.last_mut().unwrap();
        last.stats.n = stats.n;
    }

    for p in &sim.particles {
        if sim.is_trapped(p) {
            sim.ledger.trapped += 1;
        } else {
            sim.ledger.in_flight += 1;
        }
    }

    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let ns: Vec<f64> = records.iter().map(|r| r.stats.n).collect();
    let saturation = fit_saturation(&ts, &ns);
    let early_end = saturation.map_or(0.15 * cfg.duration, |f| (0.15 * f.tau).min(0.15 * cfg.duration));
    let (te, ne): (Vec<f64>, Vec<f64>) = ts.iter().zip(&ns).filter(|(t, _)| **t <= early_end.max(3.0 * cfg.record_interval)).map(|(a, b)| (*a, *b)).unzip();
    let initial_rate = fit_line(&te, &ne);
    let tail_start = 0.8 * cfg.duration;
    let (tt, nt): (Vec<f64>, Vec<f64>) = ts.iter().zip(&ns).filter(|(t, _)| **t >= tail_start).map(|(a, b)| (*a, *b)).unzip();
    let final_slope = fit_line(&tt, &nt);
    let (t_temp, y_temp): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.stats.particles >= 50 && r.stats.temperature > 0.0)
        .map(|r| (r.t, r.stats.temperature))
        .unzip();
    let temperature_fit = fit_relaxation(&t_temp, &y_temp);

    Ok(LoadingResult {
        records,
        ledger: sim.ledger,
        trap: prep.trap.clone(),
        beam: prep.beam,
        saturation,
        temperature_fit,
        initial_rate,
        final_slope,
        collisions: sim.collisions,
        steps: steps + hold_steps,
    })
}

/// Characterize the trap and run the loading experiment.
pub fn run_loading(cfg: &LoadingConfig) -> Result<LoadingResult> {
    let prep = prepare(cfg)?;
    run_prepared(cfg, &prep)
}
