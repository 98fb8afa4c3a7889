//! Command-line front end: `mesh gen`, `mesh info`, `run`, `converge`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
//! 4 IO error, 1 internal error.

pub mod config;
pub mod converge;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::EnergyNorm;
use crate::error::{Error, Result};
use crate::mesh::{format_mesh, quality_report, read_mesh};
use crate::scenarios::Simulation;
use crate::timestepper::{estimate_stable_dt, ProbeConfig, Recorder};
use config::{ConvergenceConfig, MeshConfig, RunConfig, TimeStep};
use converge::{fit_dt, h_study, h_summary, h_table, p_study, p_summary, rates_h_csv, rates_p_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Divergence { .. } | Error::Factorization(_) | Error::PowerIteration(_) => EXIT_DIVERGED,
        Error::Contract(_) | Error::Assembly(_) => EXIT_INTERNAL,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Parser)]
#[command(name = "elastoacoustic", version, about = "dG solver for coupled elasto-acoustic waves on polygonal meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (`mesh gen`: output file).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the assembled matrices as COO text files to `<out>/matrices`.
    #[arg(long, global = true)]
    pub dump_matrices: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or inspect meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Run one simulation.
    Run,
    /// Run an h- and/or p-convergence study.
    Converge,
}

#[derive(Debug, Subcommand)]
pub enum MeshCommand {
    /// Generate a Voronoi mesh of (-1, 1) x (0, 1) split at x = 0.
    Gen(GenArgs),
    /// Print the quality report of a mesh file.
    Info {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Total number of cells, split evenly between the subdomains.
    #[arg(long, short = 'n')]
    pub elements: Option<usize>,
    #[arg(long)]
    pub elastic: Option<usize>,
    #[arg(long)]
    pub acoustic: Option<usize>,
    #[arg(long)]
    pub lloyd: Option<usize>,
    /// Make the mesh symmetric about y = 0.5.
    #[arg(long)]
    pub mirror_y: bool,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
}

fn init_threads(n: Option<usize>) -> Result<()> {
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialized; --threads ignored");
        }
    }
    Ok(())
}

fn require_config(g: &GlobalArgs) -> Result<&Path> {
    g.config.as_deref().ok_or_else(|| Error::Config("--config <path> is required".into()))
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn cmd_mesh_gen(args: &GenArgs, g: &GlobalArgs) -> Result<String> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?.mesh,
        None => MeshConfig::default(),
    };
    if let Some(n) = args.elements {
        if n < 2 {
            return Err(Error::Config("need at least 2 elements".into()));
        }
        cfg.n_elastic = n / 2;
        cfg.n_acoustic = n - n / 2;
    }
    cfg.n_elastic = args.elastic.unwrap_or(cfg.n_elastic);
    cfg.n_acoustic = args.acoustic.unwrap_or(cfg.n_acoustic);
    cfg.lloyd_iterations = args.lloyd.unwrap_or(cfg.lloyd_iterations);
    cfg.mirror_y |= args.mirror_y;
    cfg.file = None;
    if args.degree == 0 {
        return Err(Error::Config("polynomial degree must be at least 1".into()));
    }
    let mut mesh = cfg.build(g.seed.unwrap_or(1), Path::new("."))?;
    mesh.set_uniform_degree(args.degree);
    let text = format_mesh(&mesh);
    if let Some(out) = &g.out {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(out, &text)?;
        Ok(format!("wrote {} elements to {}", mesh.n_elements(), out.display()))
    } else {
        Ok(text)
    }
}

pub fn cmd_mesh_info(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("mesh file {} does not exist", path.display()))));
    }
    let mesh = read_mesh(path)?;
    let r = quality_report(&mesh);
    let fc = r.face_counts;
    let mut s = String::new();
    s += &format!("elements: {}\n", r.n_elements);
    s += &format!(
        "faces: interior_elastic={} interior_acoustic={} boundary_elastic={} boundary_acoustic={} interface={}\n",
        fc.interior_elastic, fc.interior_acoustic, fc.boundary_elastic, fc.boundary_acoustic, fc.interface
    );
    s += &format!("h_min: {}\nh_max: {}\n", r.h_min, r.h_max);
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
    s += &format!("max_h_ratio: {}\nmax_p_ratio: {}\n", opt(r.max_h_ratio), opt(r.max_p_ratio));
    s += &format!("max_simplex_ratio: {}\n", r.max_simplex_ratio());
    for f in &r.flags {
        s += &format!("flag: {f}\n");
    }
    Ok(s)
}

/// What a finished (or diverged) run wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub dt: f64,
    pub final_time: f64,
    pub n_levels: usize,
    pub snapshots: usize,
    pub final_errors: Option<[f64; 4]>,
}

pub fn cmd_run(cfg: &RunConfig, base: &Path, out: &Path, dump_matrices: bool) -> Result<RunSummary> {
    let scenario = cfg.scenario()?;
    let mut mesh = cfg.mesh.build(cfg.seed, base)?;
    cfg.discretization.apply_degrees(&mut mesh)?;
    let sim = Simulation::new(&scenario, mesh, cfg.discretization.stabilization()?)?;
    let final_time = cfg.time.final_time.unwrap_or(scenario.final_time);
    let dt = match cfg.time.dt {
        Some(TimeStep::Fixed(dt)) => dt,
        Some(TimeStep::Auto(_)) => fit_dt(estimate_stable_dt(&sim.system, cfg.time.safety)?, final_time),
        None => scenario.dt,
    };
    let n_levels = crate::timestepper::n_steps(final_time, dt)?;

    fs::create_dir_all(out)?;
    let marker = out.join("DIVERGED");
    if marker.exists() {
        fs::remove_file(&marker)?;
    }
    if dump_matrices {
        sim.system.dump(&out.join("matrices"))?;
    }
    let o = &cfg.output;
    let norm = if o.energy_every > 0 { Some(EnergyNorm::new(&sim.disc, &sim.system)?) } else { None };
    let probes = ProbeConfig {
        energy_every: o.energy_every,
        probe_every: o.probe_every,
        points: o.probes.clone(),
        snapshot_every: o.snapshot_every,
    };
    let mut rec = Recorder::new(&sim.disc, norm, probes, n_levels)?;
    log::info!("{}: {} elements, dt = {dt:e}, {n_levels} levels", scenario.name, sim.disc.mesh.n_elements());
    let result = sim.run(&scenario, dt, final_time, cfg.time.startup, &mut rec);

    if o.energy_every > 0 {
        output::write(out, "energy.csv", &output::energy_csv(&rec.energy))?;
    }
    if o.probe_every > 0 && !o.probes.is_empty() {
        output::write(out, "probes.csv", &output::probes_csv(&rec.probes, &o.probes))?;
    }
    for snap in &rec.snapshots {
        output::write(out, &format!("snapshot_{:07}.vtk", snap.n), &output::snapshot_vtk(&sim.disc, snap))?;
    }
    let state = match result {
        Ok(s) => s,
        Err(e) => {
            if let Error::Divergence { step, time } = e {
                fs::write(&marker, format!("step {step}\nt {time}\n"))?;
            }
            return Err(e);
        }
    };
    let final_errors = if scenario.exact.is_some() {
        let e = sim.errors(&scenario, &state)?;
        let cols = [e.dg_e, e.dg_a, e.l2_e, e.l2_a];
        let line: Vec<String> = cols.iter().map(|&v| output::num(v)).collect();
        let csv = format!("t,{}\n{},{}\n", config::NORMS.join(","), output::num(e.t), line.join(","));
        output::write(out, "errors.csv", &csv)?;
        Some(cols)
    } else {
        None
    };
    Ok(RunSummary { dt, final_time, n_levels, snapshots: rec.snapshots.len(), final_errors })
}

pub fn cmd_converge(cfg: &ConvergenceConfig, out: &Path) -> Result<Vec<String>> {
    let scenario = cfg.scenario()?;
    if scenario.exact.is_none() {
        return Err(Error::Config(format!("scenario '{}' has no exact solution to converge to", scenario.name)));
    }
    fs::create_dir_all(out)?;
    let mut lines = Vec::new();
    if let Some(h) = &cfg.h {
        let levels = h_study(&scenario, h, &cfg.time, &cfg.discretization, cfg.lloyd_iterations, cfg.seed)?;
        let table = h_table(&levels)?;
        output::write(out, "rates_h.csv", &rates_h_csv(&table))?;
        lines.push(h_summary(&table, &cfg.norms)?);
    }
    if let Some(p) = &cfg.p {
        let levels = p_study(&scenario, p, &cfg.time, &cfg.discretization, cfg.lloyd_iterations, cfg.seed)?;
        output::write(out, "rates_p.csv", &rates_p_csv(&levels))?;
        lines.push(p_summary(&levels, &cfg.norms)?);
    }
    Ok(lines)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    init_threads(g.threads)?;
    match &cli.command {
        Command::Mesh(MeshCommand::Gen(args)) => {
            println!("{}", cmd_mesh_gen(args, g)?.trim_end());
        }
        Command::Mesh(MeshCommand::Info { path }) => {
            print!("{}", cmd_mesh_info(path)?);
        }
        Command::Run => {
            let path = require_config(g)?;
            let mut cfg = RunConfig::load(path)?;
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            if g.threads.is_none() {
                init_threads(cfg.threads)?;
            }
            let out = g.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
            let s = cmd_run(&cfg, &config_dir(path), &out, g.dump_matrices)?;
            println!("completed {} levels, dt = {}, T = {}", s.n_levels, s.dt, s.final_time);
            if let Some(e) = s.final_errors {
                println!("final errors: dG_u={:.6e} dG_phi={:.6e} L2_u={:.6e} L2_phi={:.6e}", e[0], e[1], e[2], e[3]);
            }
        }
        Command::Converge => {
            let path = require_config(g)?;
            let mut cfg = ConvergenceConfig::load(path)?;
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            if g.threads.is_none() {
                init_threads(cfg.threads)?;
            }
            let out = g.out.clone().unwrap_or_else(|| cfg.out.clone());
            for line in cmd_converge(&cfg, &out)? {
                println!("{line}");
            }
        }
    }
    Ok(())
}
