//! Command-line front end for the correlation-function engine: parse
//! configs, dispatch the exact and numeric computations, and emit JSON.
//! Every number in a report is rendered as a string, exact "p/q" where the
//! value is rational and 17 significant digits otherwise, so no consumer
//! ever round-trips through a lossy parse.
//!
//! Exit codes: 0 computation done / all verifications passed, 1 a
//! verification ran and failed, 2 malformed configuration or arguments.
//! Output schemas are documented in docs/cli.md.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use svoa::exact::poly::v;
use svoa::exact::ratfunc::RationalFunction;
use svoa::exact::trunc::{sigma_key_string, TruncatedSeries};
use svoa::schottky::{complex_strings, group_words};
use svoa::verify::{float_str, run_suite_seeded, SUITE_NAMES};
use svoa::{
    psi_poincare, theta_extract, BersKernel, Correlator, GenusContext, GenusGFunction,
    ReductionKernel, SewingParams, SewingSystem,
};

mod input;

#[derive(Parser)]
#[command(
    name = "svoa",
    version,
    about = "correlation functions of the rank-1 Heisenberg vertex algebra \
             at genus zero and on Schottky-sewn surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every command; together with the subcommand this is
/// the full run configuration. Paths are only read by the commands that
/// need them.
#[derive(Args, Debug)]
struct RunConfig {
    /// Schottky configuration JSON (genus + handles)
    #[arg(long)]
    config: Option<PathBuf>,
    /// insertion list JSON
    #[arg(long)]
    insertions: Option<PathBuf>,
    /// rho-order cutoff W for genus-g series
    #[arg(long, default_value_t = 1)]
    cutoff: u32,
    /// sewing mode cutoff M
    #[arg(long, default_value_t = 8)]
    modes: usize,
    /// Neumann series truncation order K
    #[arg(long, default_value_t = 8)]
    neumann_order: usize,
    /// Poincare word-length cutoff L
    #[arg(long, default_value_t = 6)]
    word_length: usize,
    /// numeric tolerance where one applies
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// write the JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// seed for randomly sampled points in verification suites
    #[arg(long)]
    seed: Option<u64>,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            bail!("tolerance must be positive, got {}", self.tol);
        }
        Ok(())
    }

    fn require_config(&self) -> Result<svoa::SchottkyConfig> {
        let path = self.config.as_deref().context("this command needs --config")?;
        input::load_schottky(path)
    }

    fn require_insertions(&self) -> Result<Vec<svoa::Insertion>> {
        let path = self
            .insertions
            .as_deref()
            .context("this command needs --insertions")?;
        input::load_insertions(path)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PsiMode {
    /// direct Poincare word sum
    Poincare,
    /// sewing moment matrices + Neumann inverse
    Sewing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ThetaMode {
    /// quasi-periodicity defect of the Poincare-sum quasiform
    Extract,
    /// closed-form coefficients from the sewing system
    Sewing,
}

#[derive(Subcommand)]
enum Command {
    /// Exact genus-zero n-point correlation function
    Npoint0 {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Genus-zero reduction: a quasiprimary descendant inserted through the
    /// kernel sum instead of directly
    Zhu0 {
        #[command(flatten)]
        run: RunConfig,
        /// state to insert: a | omega | vacuum | {"terms": ...} JSON
        #[arg(long, default_value = "omega")]
        state: String,
        /// translation-descendant order i (inserts L(-1)^i u / i!)
        #[arg(long, default_value_t = 0)]
        descendant: u32,
        /// variable name for the new insertion point
        #[arg(long, default_value = "z")]
        point: String,
        /// kernel limit points: 2N-1 comma-separated rationals
        #[arg(long, default_value = "0,1,2")]
        nodes: String,
    },
    /// Exact genus-zero reduction kernel f_{N,i,j}(z, y)
    Kernel {
        #[command(flatten)]
        run: RunConfig,
        /// form weight N
        #[arg(long, default_value_t = 2)]
        weight: u32,
        /// kernel limit points: 2N-1 comma-separated rationals
        #[arg(long, default_value = "0,1,2")]
        nodes: String,
        /// derivative order i in z
        #[arg(long, default_value_t = 0)]
        i: u32,
        /// mode index j
        #[arg(long, default_value_t = 0)]
        j: u32,
        #[arg(long, default_value = "z")]
        zvar: String,
        #[arg(long, default_value = "y")]
        yvar: String,
    },
    /// Genus-g partition series, exact in the sewing parameters
    Partition {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long)]
        genus: usize,
    },
    /// Genus-g n-point series, exact in the sewing parameters
    Npoint {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long)]
        genus: usize,
    },
    /// Numeric Bers quasiform Psi_N(z, y) on a Schottky cover
    Psi {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long, value_enum)]
        mode: PsiMode,
        /// form weight N
        #[arg(long, default_value_t = 2)]
        weight: u32,
        /// evaluation point z as "re,im"
        #[arg(long)]
        z: String,
        /// second point y as "re,im"
        #[arg(long)]
        y: String,
        /// kernel limit point as "re,im"; repeat 2N-1 times, default:
        /// generator fixed points
        #[arg(long = "node")]
        node: Vec<String>,
    },
    /// Holomorphic N-form coefficients Theta_{N,a}^l(z), l = 0..2N-2
    Theta {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long, value_enum)]
        mode: ThetaMode,
        /// form weight N
        #[arg(long, default_value_t = 2)]
        weight: u32,
        /// handle index a, 1-based
        #[arg(long, default_value_t = 1)]
        handle: usize,
        /// evaluation point z as "re,im"
        #[arg(long)]
        z: String,
        /// kernel limit point as "re,im"; repeat 2N-1 times, default:
        /// generator fixed points
        #[arg(long = "node")]
        node: Vec<String>,
    },
    /// Run named verification suites and report residuals
    Verify {
        #[command(flatten)]
        run: RunConfig,
        /// suite names, or "all"
        #[arg(required_unless_present = "list")]
        suites: Vec<String>,
        /// list the known suite names and exit
        #[arg(long, conflicts_with = "suites")]
        list: bool,
    },
}

struct Outcome {
    json: serde_json::Value,
    pass: bool,
}

fn main() -> ExitCode {
    if let Err(e) = init_workers() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    let out_path = run_config_of(&cli.command).out.clone();
    match dispatch(cli.command) {
        Ok(outcome) => {
            let text = format!("{:#}\n", outcome.json);
            let written = match &out_path {
                Some(path) => std::fs::write(path, &text)
                    .with_context(|| format!("cannot write {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// SVOA_WORKERS caps the rayon pool; unset means rayon's default.
fn init_workers() -> Result<()> {
    let Ok(val) = std::env::var("SVOA_WORKERS") else {
        return Ok(());
    };
    let n: usize = val
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("SVOA_WORKERS must be a positive integer, got {val:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("rayon pool already initialized")?;
    Ok(())
}

fn run_config_of(command: &Command) -> &RunConfig {
    match command {
        Command::Npoint0 { run }
        | Command::Zhu0 { run, .. }
        | Command::Kernel { run, .. }
        | Command::Partition { run, .. }
        | Command::Npoint { run, .. }
        | Command::Psi { run, .. }
        | Command::Theta { run, .. }
        | Command::Verify { run, .. } => run,
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    run_config_of(&command).validate()?;
    match command {
        Command::Npoint0 { run } => npoint0(&run),
        Command::Zhu0 { run, state, descendant, point, nodes } => {
            zhu0(&run, &state, descendant, &point, &nodes)
        }
        Command::Kernel { run: _, weight, nodes, i, j, zvar, yvar } => {
            kernel(weight, &nodes, i, j, &zvar, &yvar)
        }
        Command::Partition { run, genus } => partition(&run, genus),
        Command::Npoint { run, genus } => npoint(&run, genus),
        Command::Psi { run, mode, weight, z, y, node } => psi(&run, mode, weight, &z, &y, &node),
        Command::Theta { run, mode, weight, handle, z, node } => {
            theta(&run, mode, weight, handle, &z, &node)
        }
        Command::Verify { run, suites, list } => verify(&run, &suites, list),
    }
}

fn done(json: serde_json::Value) -> Result<Outcome> {
    Ok(Outcome { json, pass: true })
}

fn cpx_json(z: Complex64) -> serde_json::Value {
    serde_json::json!(complex_strings(z))
}

/// A truncated series as a flat JSON object: canonical rho-monomial keys,
/// exact coefficient strings.
fn series_json(series: &TruncatedSeries<RationalFunction>) -> serde_json::Value {
    let map: BTreeMap<String, String> = series
        .terms
        .iter()
        .map(|(e, c)| (sigma_key_string(e), c.to_string()))
        .collect();
    serde_json::json!(map)
}

fn genusg_json(command: &str, genus: usize, cutoff: u32, f: &GenusGFunction) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "genus": genus.to_string(),
        "cutoff": cutoff.to_string(),
        "points": f.points.iter().map(|p| p.name()).collect::<Vec<_>>(),
        "weights": f.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "series": series_json(&f.series),
    })
}

fn npoint0(run: &RunConfig) -> Result<Outcome> {
    let ins = run.require_insertions()?;
    let value = Correlator::new().npoint0_value(&ins)?;
    done(serde_json::json!({
        "command": "npoint0",
        "points": ins.iter().map(|x| x.var.name()).collect::<Vec<_>>(),
        "value": value.to_string(),
    }))
}

fn zhu0(run: &RunConfig, state: &str, descendant: u32, point: &str, nodes: &str) -> Result<Outcome> {
    let ins = run.require_insertions()?;
    let u = input::parse_state_arg(state)?;
    let nodes = input::parse_rational_list(nodes)?;
    let zv = v(point);
    let kernel = ReductionKernel::new(weight_of(&u)?, nodes.clone(), zv, v("ykernel"))?;
    let form = Correlator::new().zhu_reduce0(&u, descendant, zv, &kernel, &ins)?;
    done(serde_json::json!({
        "command": "zhu0",
        "state": state,
        "descendant": descendant.to_string(),
        "nodes": nodes.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "points": form.points.iter().map(|p| p.name()).collect::<Vec<_>>(),
        "weights": form.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "value": form.value.to_string(),
    }))
}

/// Weight of a homogeneous vector; the kernel commands need it up front.
fn weight_of(u: &svoa::FockVector) -> Result<u32> {
    u.weight().context("state must be homogeneous and nonzero")
}

fn kernel(weight: u32, nodes: &str, i: u32, j: u32, zvar: &str, yvar: &str) -> Result<Outcome> {
    let nodes = input::parse_rational_list(nodes)?;
    if zvar == yvar {
        bail!("zvar and yvar must differ");
    }
    let (zv, yv) = (v(zvar), v(yvar));
    let kernel = ReductionKernel::new(weight, nodes.clone(), zv, yv)?;
    let f = kernel.f(i, j, zv, yv)?;
    done(serde_json::json!({
        "command": "kernel",
        "weight": weight.to_string(),
        "i": i.to_string(),
        "j": j.to_string(),
        "nodes": nodes.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "f": f.to_string(),
    }))
}

fn partition(run: &RunConfig, genus: usize) -> Result<Outcome> {
    let ctx = GenusContext::new(genus)?;
    let f = ctx.partition(run.cutoff)?;
    done(genusg_json("partition", genus, run.cutoff, &f))
}

fn npoint(run: &RunConfig, genus: usize) -> Result<Outcome> {
    let ins = run.require_insertions()?;
    let ctx = GenusContext::new(genus)?;
    let f = ctx.npoint(&ins, run.cutoff)?;
    done(genusg_json("npoint", genus, run.cutoff, &f))
}

fn numeric_kernel(
    cfg: &svoa::SchottkyConfig,
    weight: u32,
    node: &[String],
) -> Result<BersKernel> {
    if node.is_empty() {
        return Ok(BersKernel::default_for(cfg, weight)?);
    }
    let points = node
        .iter()
        .map(|s| input::parse_complex(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(BersKernel::new(weight, points)?)
}

fn psi(
    run: &RunConfig,
    mode: PsiMode,
    weight: u32,
    z: &str,
    y: &str,
    node: &[String],
) -> Result<Outcome> {
    let cfg = run.require_config()?;
    let kernel = numeric_kernel(&cfg, weight, node)?;
    let z = input::parse_complex(z)?;
    let y = input::parse_complex(y)?;
    let (mode_name, value, tail) = match mode {
        PsiMode::Poincare => {
            let words = group_words(&cfg, run.word_length);
            let pv = psi_poincare(&kernel, &words, z, y)?;
            ("poincare", pv.value, pv.tail)
        }
        PsiMode::Sewing => {
            let params = SewingParams::new(run.modes, run.neumann_order);
            let sys = SewingSystem::new(&cfg, &kernel, params)?;
            let pv = sys.psi(z, y)?;
            ("sewing", pv.value, pv.tail)
        }
    };
    done(serde_json::json!({
        "command": "psi",
        "mode": mode_name,
        "weight": weight.to_string(),
        "z": cpx_json(z),
        "y": cpx_json(y),
        "value": cpx_json(value),
        "tail": float_str(tail),
    }))
}

fn theta(
    run: &RunConfig,
    mode: ThetaMode,
    weight: u32,
    handle: usize,
    z: &str,
    node: &[String],
) -> Result<Outcome> {
    let cfg = run.require_config()?;
    if handle == 0 || handle > cfg.genus {
        bail!("handle must be in 1..={}", cfg.genus);
    }
    let kernel = numeric_kernel(&cfg, weight, node)?;
    let z = input::parse_complex(z)?;
    let (mode_name, coeffs) = match mode {
        ThetaMode::Extract => {
            let words = group_words(&cfg, run.word_length);
            ("extract", theta_extract(&kernel, &cfg, &words, handle - 1, z)?)
        }
        ThetaMode::Sewing => {
            let params = SewingParams::new(run.modes, run.neumann_order);
            let sys = SewingSystem::new(&cfg, &kernel, params)?;
            let mut coeffs = Vec::with_capacity(2 * weight as usize - 1);
            for l in 0..=(2 * weight - 2) {
                coeffs.push(sys.theta(handle as i32, l, z)?);
            }
            ("sewing", coeffs)
        }
    };
    done(serde_json::json!({
        "command": "theta",
        "mode": mode_name,
        "weight": weight.to_string(),
        "handle": handle.to_string(),
        "z": cpx_json(z),
        "coeffs": coeffs.into_iter().map(cpx_json).collect::<Vec<_>>(),
    }))
}

fn verify(run: &RunConfig, suites: &[String], list: bool) -> Result<Outcome> {
    if list {
        return done(serde_json::json!({ "suites": SUITE_NAMES }));
    }
    let names: Vec<&str> = if suites.iter().any(|s| s == "all") {
        SUITE_NAMES.to_vec()
    } else {
        suites.iter().map(|s| s.as_str()).collect()
    };
    let mut reports = Vec::with_capacity(names.len());
    let mut pass = true;
    for name in &names {
        let report = run_suite_seeded(name, run.seed)?;
        pass &= report.pass;
        reports.push(report.to_json());
    }
    let json = if reports.len() == 1 {
        reports.pop().unwrap()
    } else {
        serde_json::json!({ "pass": pass, "reports": reports })
    };
    Ok(Outcome { json, pass })
}
