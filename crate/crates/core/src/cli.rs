//! Command-line front end.
//!
//! Every command reads one config file (the bundled default when `--config`
//! is absent), applies `--set` overrides, writes its results and a
//! `manifest.json` into the output directory, and ends by printing a
//! machine-readable status line:
//!
//! ```text
//! status=ok exit=0
//! status=error category=physics kind=NoTrap exit=3 message="..."
//! ```

use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{LoadedConfig, SimConfig};
use crate::constants::CONSTANTS_VERSION;
use crate::error::{Error, Result};
use crate::loading::{capture_fraction, prepare, run_prepared, scan_barrier, scan_csv, scan_evaporation, write_time_series};
use crate::magnetostatics::field_map::{self, GridSpec};
use crate::optimize::{optimize_loading, write_trace, DEConfig};
use crate::trap::TrapCharacterization;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "trapload", version, about = "Continuous loading of a magnetic chip trap from a slow atom beam")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Simulation config (TOML). Defaults to the bundled configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for all random streams (overrides run.seed and optimize.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory. Defaults to out/<command>.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Override a config value, e.g. --set currents.p5=20 (repeatable).
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate B and the Zeeman potential on the [field_map] grid.
    FieldMap(Common),
    /// Locate the trap minimum; report frequencies, depth and barrier.
    AnalyzeTrap(Common),
    /// Run one loading simulation.
    LoadSim(Common),
    /// Atom number after the scan loading time versus entrance barrier.
    ScanBarrier(Common),
    /// Atom number after the scan loading time versus evaporation threshold.
    ScanEvap(Common),
    /// Differential-evolution search over the free currents.
    Optimize(Common),
    /// Parse the config and run the trap preflight without simulating.
    Validate(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::FieldMap(_) => "field-map",
            Command::AnalyzeTrap(_) => "analyze-trap",
            Command::LoadSim(_) => "load-sim",
            Command::ScanBarrier(_) => "scan-barrier",
            Command::ScanEvap(_) => "scan-evap",
            Command::Optimize(_) => "optimize",
            Command::Validate(_) => "validate",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::FieldMap(c)
            | Command::AnalyzeTrap(c)
            | Command::LoadSim(c)
            | Command::ScanBarrier(c)
            | Command::ScanEvap(c)
            | Command::Optimize(c)
            | Command::Validate(c) => c,
        }
    }
}

/// Everything needed to rerun a command exactly.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub status: String,
    pub config_path: Option<String>,
    pub overrides: Vec<String>,
    pub config_hash: String,
    pub layout_hash: String,
    pub seed: u64,
    pub threads: Option<usize>,
    pub constants_version: String,
    pub tool_version: String,
    pub started_unix_s: f64,
    pub finished_unix_s: Option<f64>,
    pub outputs: Vec<String>,
    /// The fully resolved configuration after overrides.
    pub config: SimConfig,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

struct Output {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Output {
    fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.dir.join(name)
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let p = self.path(name);
        fs::write(p, contents)?;
        Ok(())
    }

    fn save_manifest(&self) -> Result<()> {
        let json = serde_json::to_vec_pretty(&self.manifest).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(self.dir.join("manifest.json"), json)?;
        Ok(())
    }
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

/// Parse `argv`, run the command and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                return 0;
            }
            println!("status=error category=config kind=Usage exit=2");
            return 2;
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => {
            println!("status=ok exit=0");
            0
        }
        Err(e) => {
            let cat = e.category();
            eprintln!("error: {e}");
            println!("status=error category={} kind={} exit={} message={:?}", cat.as_str(), e.kind(), cat.exit_code(), e.to_string());
            cat.exit_code()
        }
    }
}

fn load(common: &Common) -> Result<LoadedConfig> {
    let mut overrides = common.overrides.clone();
    if let Some(s) = common.seed {
        overrides.push(format!("run.seed={s}"));
        overrides.push(format!("optimize.seed={s}"));
    }
    match &common.config {
        Some(p) => SimConfig::load(p, &overrides),
        None => SimConfig::builtin(&overrides),
    }
}

fn dispatch(cmd: &Command) -> Result<()> {
    match cmd.common().threads {
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?
            .install(|| execute(cmd)),
        None => execute(cmd),
    }
}

fn execute(cmd: &Command) -> Result<()> {
    let common = cmd.common();
    let loaded = load(common)?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out").join(cmd.name()));
    fs::create_dir_all(&dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let mut out = Output {
        dir,
        manifest: RunManifest {
            command: cmd.name().into(),
            status: "running".into(),
            config_path: common.config.as_ref().map(|p| p.display().to_string()),
            overrides: common.overrides.clone(),
            config_hash: loaded.hash.clone(),
            layout_hash: loaded.layout_hash()?,
            seed: loaded.config.run.seed,
            threads: common.threads,
            constants_version: CONSTANTS_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            started_unix_s: now(),
            finished_unix_s: None,
            outputs: Vec::new(),
            config: loaded.config.clone(),
        },
    };
    out.save_manifest()?;
    let result = match cmd {
        Command::FieldMap(_) => field_map(&loaded, &mut out),
        Command::AnalyzeTrap(_) => analyze_trap(&loaded, &mut out),
        Command::LoadSim(_) => load_sim(&loaded, &mut out),
        Command::ScanBarrier(_) => scan_barrier_cmd(&loaded, &mut out),
        Command::ScanEvap(_) => scan_evap_cmd(&loaded, &mut out),
        Command::Optimize(_) => optimize_cmd(&loaded, &mut out),
        Command::Validate(_) => validate(&loaded, &mut out),
    };
    out.manifest.status = match &result {
        Ok(()) => "ok".into(),
        Err(e) => format!("error: {}", e.kind()),
    };
    out.manifest.finished_unix_s = Some(now());
    out.save_manifest()?;
    result
}

fn print_trap(t: &TrapCharacterization) {
    let f = t.frequencies_hz();
    let p = t.minimum_position;
    println!("minimum        ({:.4}, {:.4}, {:.4}) mm", p[0] * 1e3, p[1] * 1e3, p[2] * 1e3);
    println!("offset field   {:.4} G", t.offset_field_g);
    println!("frequencies    ({:.2}, {:.2}, {:.2}) Hz", f[0], f[1], f[2]);
    println!("aspect ratio   {:.2}", t.aspect_ratio);
    println!("depth          {:.1} uK", t.depth_uk);
    if let Some(d) = t.transverse_depth_uk {
        println!("radial depth   {d:.1} uK");
    }
    match t.barrier_height_uk {
        Some(b) => println!("barrier        {b:.1} uK"),
        None => println!("barrier        none"),
    }
}

fn field_map(l: &LoadedConfig, out: &mut Output) -> Result<()> {
    let setup = l.trap_setup()?;
    let field = setup.field()?;
    let fm = &l.config.field_map;
    let grid = GridSpec { min: fm.lo_mm.map(|v| v * 1e-3), max: fm.hi_mm.map(|v| v * 1e-3), counts: fm.counts };
    let map = field_map::field_map(&field, &setup.spin, &setup.constants, setup.gravity, &grid)?;
    let mut buf = Vec::new();
    map.write_csv(&mut buf)?;
    out.write("field_map.csv", &buf)?;
    out.write("field_map.json", &json(&map.metadata(&l.layout_hash()?))?)?;
    println!("wrote {} points ({} inside conductors) to {}", grid.len(), map.masked(), out.dir.join("field_map.csv").display());
    Ok(())
}

fn analyze_trap(l: &LoadedConfig, out: &mut Output) -> Result<()> {
    let t = l.trap_setup()?.characterize()?;
    print_trap(&t);
    out.write("trap.csv", format!("{}\n{}\n", TrapCharacterization::CSV_HEADER, t.csv_row()).as_bytes())?;
    out.write("trap.json", &json(&t)?)?;
    Ok(())
}

fn validate(l: &LoadedConfig, out: &mut Output) -> Result<()> {
    let cfg = l.loading_config(None)?;
    cfg.validate()?;
    let t = cfg.trap.characterize()?;
    print_trap(&t);
    if t.barrier_height_uk.is_none() {
        return Err(Error::NoTrap("no entrance barrier between guide and trap".into()));
    }
    out.write("trap.json", &json(&t)?)?;
    println!("config hash    {}", l.hash);
    Ok(())
}

fn load_sim(l: &LoadedConfig, out: &mut Output) -> Result<()> {
    let cfg = l.loading_config(Some(&out.dir))?;
    let prep = prepare(&cfg)?;
    print_trap(&prep.trap);
    let r = run_prepared(&cfg, &prep)?;
    let mut buf = Vec::new();
    write_time_series(&mut buf, &r.records)?;
    out.write("time_series.csv", &buf)?;
    out.write("ledger.json", &json(&r.ledger)?)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        final_n: f64,
        dt_s: f64,
        saturation: &'a Option<crate::loading::SaturationFit>,
        temperature_fit: &'a Option<crate::loading::RelaxationFit>,
        initial_rate: &'a Option<crate::loading::LineFit>,
        final_slope: &'a Option<crate::loading::LineFit>,
        collisions: u64,
        steps: u64,
        ledger_closure: f64,
        trap: &'a TrapCharacterization,
    }
    let s = Summary {
        final_n: r.final_n(),
        dt_s: prep.dt,
        saturation: &r.saturation,
        temperature_fit: &r.temperature_fit,
        initial_rate: &r.initial_rate,
        final_slope: &r.final_slope,
        collisions: r.collisions,
        steps: r.steps,
        ledger_closure: r.ledger.closure_error(),
        trap: &r.trap,
    };
    out.write("summary.json", &json(&s)?)?;
    if cfg.snapshots.is_some() {
        out.manifest.outputs.push("snapshots/".into());
    }
    println!("final N        {:.4e}", r.final_n());
    if let Some(f) = r.saturation {
        println!("saturation     N_ss = {:.4e}, tau = {:.2} s", f.n_ss, f.tau);
    }
    Ok(())
}

fn scan_barrier_cmd(l: &LoadedConfig, out: &mut Output) -> Result<()> {
    let cfg = l.loading_config(None)?;
    let s = &l.config.scan;
    if s.currents_a.is_empty() || s.seeds.is_empty() {
        return Err(Error::Config("scan.currents_a and scan.seeds must not be empty".into()));
    }
    if !cfg.trap.layout.channels.contains(&s.channel) {
        return Err(Error::Config(format!("scan channel `{}` is not in the layout", s.channel)));
    }
    let points = scan_barrier(&cfg, &s.channel, &s.currents_a, s.loading_time_s, &s.seeds);
    out.write("scan_barrier.csv", scan_csv(&points).as_bytes())?;
    for p in &points {
        println!("{} = {:>7.2} A  barrier {:>8.1} uK  N = {:.3e} +- {:.1e}", s.channel, p.control, p.barrier_uk.unwrap_or(f64::NAN), p.mean, p.sem);
    }
    let cap = capture_fraction(&cfg, s.capture_window_s, s.capture_settle_s)?;
    out.write("capture.json", &json(&cap)?)?;
    println!("capture fraction at base currents: {:.3}", cap.fraction);
    Ok(())
}

fn scan_evap_cmd(l: &LoadedConfig, out: &mut Output) -> Result<()> {
    let cfg = l.loading_config(None)?;
    let s = &l.config.scan;
    if s.seeds.is_empty() {
        return Err(Error::Config("scan.seeds must not be empty".into()));
    }
    let mut th: Vec<Option<f64>> = s.thresholds_uk.iter().map(|&t| Some(t)).collect();
    th.push(None);
    let points = scan_evaporation(&cfg, &th, s.loading_time_s, &s.seeds)?;
    out.write("scan_evap.csv", scan_csv(&points).as_bytes())?;
    for p in &points {
        println!("threshold {:>8.1} uK  N = {:.3e} +- {:.1e}", p.control, p.mean, p.sem);
    }
    Ok(())
}

fn optimize_cmd(l: &LoadedConfig, out: &mut Output) -> Result<()> {
    let cfg = l.loading_config(None)?;
    let o = &l.config.optimize;
    if o.lower_a.len() != o.channels.len() || o.upper_a.len() != o.channels.len() {
        return Err(Error::Config("optimize.lower_a and optimize.upper_a need one entry per channel".into()));
    }
    let mut de = DEConfig::new(o.lower_a.clone(), o.upper_a.clone());
    if let Some(np) = o.population {
        de.population = np;
    }
    de.f_weight = o.f_weight;
    de.crossover = o.crossover;
    de.generations = o.generations;
    de.evals_per_candidate = o.evals_per_candidate;
    de.seed = o.seed;
    let checkpoint = out.path("checkpoint.json");
    let best = optimize_loading(&cfg, &o.channels, o.loading_time_s, &de, Some(&checkpoint))?;
    if let Some(r) = &best.result {
        let mut buf = Vec::new();
        write_trace(&mut buf, &r.trace, &o.channels)?;
        out.write("trace.csv", &buf)?;
        println!("evaluations {}{}", r.evaluations, if r.budget_exhausted { " (budget exhausted)" } else { "" });
    }
    #[derive(Serialize)]
    struct Best<'a> {
        currents: &'a crate::magnetostatics::CurrentSetting,
        score: Option<f64>,
        trap: &'a TrapCharacterization,
    }
    out.write("best.json", &json(&Best { currents: &best.currents, score: best.score, trap: &best.trap })?)?;
    for ch in &o.channels {
        println!("{ch} = {:.3} A", best.currents.get(ch).unwrap_or(f64::NAN));
    }
    print_trap(&best.trap);
    Ok(())
}
