//! Command-line interface.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lfpp_core::field::SamplerKind;

use crate::config::{parse_levels, parse_list, parse_range, Config};
use crate::estimate::{census_row, estimate_run, write_report, CensusRow, EstimateRow, CENSUS_ESTIMATES_FILE, ESTIMATES_FILE};
use crate::simulate::{read_run, simulate_to_dir, SimulationPlan};
use crate::svg::{build_figure, render_svg, FigureId, FigureSpec, PreviousBest};
use crate::tables::{gamma_knots, gamma_table, grid, lambda_table, read_csv, write_csv, xi_knots};

pub const LAMBDA_BOUNDS_FILE: &str = "lambda_bounds.csv";
pub const GAMMA_BOUNDS_FILE: &str = "gamma_bounds.csv";

#[derive(Debug, Parser)]
#[command(name = "lfpp-lab", version, about = "Liouville first passage percolation simulation lab")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// INI configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory (default: $LFPP_LAB_OUT, then ./lfpp-out)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the analytic bounds over xi and gamma grids
    Bounds(BoundsArgs),
    /// Run crossing simulations
    Simulate(SimulateArgs),
    /// Fit exponents to a finished simulation
    Estimate(EstimateArgs),
    /// Count low-field vertices and fit their growth exponent
    Census(CensusArgs),
    /// Draw a figure as SVG
    Plot(PlotArgs),
}

#[derive(Debug, Args, Default)]
pub struct BoundsArgs {
    /// xi range as LO,HI
    #[arg(long)]
    pub xi_range: Option<String>,
    #[arg(long)]
    pub xi_step: Option<String>,
    /// gamma range as LO,HI, inside (0, 2)
    #[arg(long)]
    pub gamma_range: Option<String>,
    #[arg(long)]
    pub gamma_step: Option<String>,
    /// Add the knots 1/sqrt(6) and sqrt(8/3) to the grids
    #[arg(long)]
    pub insert_knots: bool,
}

#[derive(Debug, Args, Default)]
pub struct SimulateArgs {
    /// Comma-separated xi values
    #[arg(long)]
    pub xi: Option<String>,
    /// Comma-separated levels; `a-b` for a run
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// exact, fourier or layered
    #[arg(long)]
    pub sampler: Option<String>,
    /// xi_tilde values at which each geodesic is re-measured
    #[arg(long)]
    pub multi_xi: Option<String>,
    /// Census thresholds evaluated on every field
    #[arg(long)]
    pub census_alpha: Option<String>,
    #[arg(long)]
    pub padding: Option<f64>,
    /// Store geodesic vertex lists and a coordinate CSV
    #[arg(long)]
    pub save_geodesics: bool,
    #[arg(long)]
    pub memory_budget_mb: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct EstimateArgs {
    /// Run directory (default: the output directory)
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct CensusArgs {
    #[arg(long)]
    pub census_alpha: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub sampler: Option<String>,
    #[arg(long)]
    pub padding: Option<f64>,
    #[arg(long)]
    pub memory_budget_mb: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// lambda_bounds, d_bounds or g_bound
    #[arg(long)]
    pub figure: String,
    /// Abscissa range as LO,HI
    #[arg(long)]
    pub range: Option<String>,
    /// Estimates CSV providing overlay points
    #[arg(long)]
    pub estimates: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    let config = Config::load_optional(cli.common.config.as_deref())?;
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(&config, &cli.common, a),
        Command::Simulate(a) => cmd_simulate(&config, &cli.common, a),
        Command::Estimate(a) => cmd_estimate(&config, &cli.common, a),
        Command::Census(a) => cmd_census(&config, &cli.common, a),
        Command::Plot(a) => cmd_plot(&config, &cli.common, a),
    }
}

fn pick<T>(flag: Option<T>, config: Result<Option<T>>) -> Result<Option<T>> {
    Ok(match flag {
        Some(v) => Some(v),
        None => config?,
    })
}

fn pick_str<T>(flag: Option<&str>, parse: fn(&str) -> Result<T>, config: Result<Option<T>>) -> Result<Option<T>> {
    pick(flag.map(parse).transpose()?, config)
}

fn out_dir(config: &Config, section: &str, common: &CommonArgs) -> Result<PathBuf> {
    let dir = config.out_dir(section, common.out.as_deref());
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn workers(config: &Config, section: &str, common: &CommonArgs) -> Result<usize> {
    let w = pick(common.workers, config.integer(section, "workers"))?.unwrap_or(1);
    if w == 0 {
        bail!("worker count must be at least 1");
    }
    Ok(w)
}

fn sampler_kind(s: &str) -> Result<SamplerKind> {
    Ok(s.parse()?)
}

pub fn cmd_bounds(config: &Config, common: &CommonArgs, a: &BoundsArgs) -> Result<()> {
    const S: &str = "bounds";
    let num = |s: &str| crate::config::parse_number(s);
    let (xlo, xhi) = pick_str(a.xi_range.as_deref(), parse_range, config.range(S, "xi_range"))?.unwrap_or((0.0, 1.0));
    let xstep = pick_str(a.xi_step.as_deref(), num, config.number(S, "xi_step"))?.unwrap_or(0.01);
    let (glo, ghi) = pick_str(a.gamma_range.as_deref(), parse_range, config.range(S, "gamma_range"))?.unwrap_or((0.01, 1.99));
    let gstep = pick_str(a.gamma_step.as_deref(), num, config.number(S, "gamma_step"))?.unwrap_or(0.01);
    let knots = a.insert_knots || config.flag(S, "insert_knots")?.unwrap_or(false);
    let (xk, gk) = if knots { (xi_knots(), gamma_knots()) } else { (Vec::new(), Vec::new()) };
    let xis = grid(xlo, xhi, xstep, &xk)?;
    let gammas = grid(glo, ghi, gstep, &gk)?;
    let dir = out_dir(config, S, common)?;
    write_csv(&dir.join(LAMBDA_BOUNDS_FILE), &lambda_table(&xis)?)?;
    write_csv(&dir.join(GAMMA_BOUNDS_FILE), &gamma_table(&gammas)?)?;
    println!(
        "wrote {} xi rows and {} gamma rows to {}",
        xis.len(),
        gammas.len(),
        dir.display()
    );
    Ok(())
}

/// Builds the simulation plan for `section` from flags and config.
pub fn simulation_plan(config: &Config, common: &CommonArgs, section: &str, a: &SimulateArgs) -> Result<SimulationPlan> {
    let xi = pick_str(a.xi.as_deref(), parse_list, config.list(section, "xi"))?.unwrap_or_default();
    let k = pick_str(a.k.as_deref(), parse_levels, config.levels(section, "k"))?
        .context("no levels given (--k or [simulate] k)")?;
    let reps = pick(a.reps, config.integer(section, "reps"))?.unwrap_or(1);
    let sampler = pick_str(a.sampler.as_deref(), sampler_kind, config.typed_sampler(section))?.unwrap_or(SamplerKind::Fourier);
    let seed = pick(common.seed, config.integer(section, "seed"))?.unwrap_or(0);
    let mut plan = SimulationPlan::new(xi, k, reps, sampler, seed);
    plan.multi_xi = pick_str(a.multi_xi.as_deref(), parse_list, config.list(section, "multi_xi"))?.unwrap_or_default();
    plan.census_alpha =
        pick_str(a.census_alpha.as_deref(), parse_list, config.list(section, "census_alpha"))?.unwrap_or_default();
    if let Some(p) = pick(a.padding, config.number(section, "padding"))? {
        plan.padding_factor = p;
    }
    if let Some(c0) = config.number(section, "fourier_c0")? {
        plan.fourier_c0 = c0;
    }
    plan.save_geodesics = a.save_geodesics || config.flag(section, "save_geodesics")?.unwrap_or(false);
    if let Some(m) = pick(a.memory_budget_mb, config.integer(section, "memory_budget_mb"))? {
        plan.memory_budget_mb = m;
    }
    if let Some(q) = config.number(section, "quantile")? {
        plan.quantile = q;
    }
    if let Some(s) = config.number(section, "slack_lambda")? {
        plan.slack_lambda = s;
    }
    if let Some(s) = config.number(section, "slack_census")? {
        plan.slack_census = s;
    }
    if let Some(m) = config.integer(section, "min_k")? {
        plan.min_k = m;
    }
    plan.validate()?;
    Ok(plan)
}

impl Config {
    fn typed_sampler(&self, section: &str) -> Result<Option<SamplerKind>> {
        self.get(section, "sampler").map(sampler_kind).transpose()
    }
}

pub fn cmd_simulate(config: &Config, common: &CommonArgs, a: &SimulateArgs) -> Result<()> {
    const S: &str = "simulate";
    let plan = simulation_plan(config, common, S, a)?;
    let dir = out_dir(config, S, common)?;
    let m = simulate_to_dir(&dir, &plan, workers(config, S, common)?)?;
    println!(
        "{} crossings, {} census counts in {:.2} s; manifest digest {}",
        m.body.outputs[0].records, m.body.outputs[1].records, m.run.elapsed_seconds, m.digest
    );
    Ok(())
}

pub fn cmd_estimate(config: &Config, common: &CommonArgs, a: &EstimateArgs) -> Result<()> {
    const S: &str = "estimate";
    let input = match &a.input {
        Some(p) => p.clone(),
        None => config
            .get(S, "input")
            .map(PathBuf::from)
            .unwrap_or(config.out_dir(S, common.out.as_deref())),
    };
    let run = read_run(&input)?;
    let report = estimate_run(&run)?;
    let dir = if common.out.is_some() || a.input.is_none() {
        out_dir(config, S, common)?
    } else {
        input
    };
    write_report(&dir, &report)?;
    for r in &report.estimates {
        println!(
            "xi = {}: lambda = {} +- {}, g = {} +- {}",
            r.xi, r.lambda_hat, r.lambda_stderr, r.g_hat, r.g_stderr
        );
    }
    Ok(())
}

pub fn cmd_census(config: &Config, common: &CommonArgs, a: &CensusArgs) -> Result<()> {
    const S: &str = "census";
    let sim = SimulateArgs {
        xi: Some(String::new()),
        k: a.k.clone(),
        reps: a.reps,
        sampler: a.sampler.clone(),
        multi_xi: None,
        census_alpha: a.census_alpha.clone(),
        padding: a.padding,
        save_geodesics: false,
        memory_budget_mb: a.memory_budget_mb,
    };
    let plan = simulation_plan(config, common, S, &sim)?;
    if plan.census_alpha.is_empty() {
        bail!("no census thresholds given (--census-alpha or [census] census_alpha)");
    }
    let experiment = plan.experiment()?;
    let dir = out_dir(config, S, common)?;
    simulate_to_dir(&dir, &plan, workers(config, S, common)?)?;
    let run = read_run(&dir)?;
    let rows = plan
        .census_alpha
        .iter()
        .map(|&alpha| census_row(&experiment, &run.census, alpha))
        .collect::<Result<Vec<CensusRow>>>()?;
    write_csv(&dir.join(CENSUS_ESTIMATES_FILE), &rows)?;
    for r in &rows {
        match r.exponent {
            Some(e) => println!("alpha = {}: exponent {} (bound {} + {})", r.alpha, e, r.bound, r.slack),
            None => println!("alpha = {}: {}", r.alpha, r.note),
        }
    }
    Ok(())
}

pub fn cmd_plot(config: &Config, common: &CommonArgs, a: &PlotArgs) -> Result<()> {
    const S: &str = "plot";
    let id: FigureId = a.figure.parse()?;
    let mut spec = FigureSpec::new(id);
    if let Some(r) = pick_str(a.range.as_deref(), parse_range, config.range(S, &format!("{}_range", id.name())))? {
        spec.range = r;
    }
    let estimates = a.estimates.clone().or_else(|| config.get(S, "estimates").map(PathBuf::from));
    if let Some(path) = estimates {
        let rows: Vec<EstimateRow> = read_csv(&path)?;
        spec = spec.with_estimates(&rows);
    }
    spec.previous_best = config
        .previous_best()
        .into_iter()
        .map(|(label, expr)| PreviousBest { label, expr })
        .collect();
    let fig = build_figure(&spec)?;
    for n in &fig.notes {
        eprintln!("note: {n}");
    }
    let dir = out_dir(config, S, common)?;
    let path = dir.join(format!("{}.svg", id.name()));
    write_svg(&path, &render_svg(&fig))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_svg(path: &Path, svg: &str) -> Result<()> {
    fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}

/// Default location of the estimates table inside a run directory.
pub fn estimates_path(dir: &Path) -> PathBuf {
    dir.join(ESTIMATES_FILE)
}
