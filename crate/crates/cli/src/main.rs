mod model;
mod repro;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use transfractal::cover::{greedy_boxing, min_boxes_exact, DEFAULT_NODE_BUDGET};
use transfractal::dim::{
    fit_db, fit_tau, fit_tau_cesaro, fits_to_csv, BoxRow, BoxTable, CesaroOffset, CountMethod, DimensionFit,
    FitConfig,
};
use transfractal::edgelist::{write_edge_list, write_edge_list_with_birth};
use transfractal::graph::diameter;
use transfractal::{Graph, MetricMode};

use model::{Model, ModelArgs, ModelKind};

/// Largest graphs the exact solver accepts without `--force-exact`.
const EXACT_LIMIT_GLOBAL: usize = 60;
const EXACT_LIMIT_SUBGRAPH: usize = 30;
/// Diameters are reported in manifests up to this many vertices.
const DIAMETER_LIMIT: usize = 5000;

#[derive(Parser)]
#[command(name = "transfractal", version, about = "Box covering and transfinite fractal dimension of graph sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write edge-list snapshots of a model and a manifest.
    Generate(GenerateArgs),
    /// Append box-count rows to a CSV table.
    Box(BoxArgs),
    /// Fit a dimension to a box table; exits 1 when a tolerance check fails.
    Dim(DimArgs),
    /// Run a named scenario end to end.
    Repro(repro::ReproArgs),
}

#[derive(Args, Serialize)]
struct GenerateArgs {
    model: ModelKind,
    #[command(flatten)]
    params: ModelArgs,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Exact,
    Greedy,
    Bounds,
    Witness,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Subgraph,
    Global,
}

impl From<ModeArg> for MetricMode {
    fn from(m: ModeArg) -> MetricMode {
        match m {
            ModeArg::Subgraph => MetricMode::SubgraphDistance,
            ModeArg::Global => MetricMode::GlobalDistance,
        }
    }
}

#[derive(Args, Serialize)]
struct BoxArgs {
    /// Model to box; omit when using `--graph`.
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelKind>,
    #[command(flatten)]
    params: ModelArgs,
    /// Edge-list file to box instead of a model.
    #[arg(long, conflicts_with = "model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<PathBuf>,
    /// Sequence index recorded for a `--graph` input.
    #[arg(long, default_value_t = 0)]
    index: u32,
    #[arg(long, value_enum)]
    method: Method,
    /// Box sizes for `exact` and `greedy`.
    #[arg(long, value_delimiter = ',')]
    ell: Vec<u32>,
    /// Scales for `bounds` and `witness`.
    #[arg(long, value_delimiter = ',')]
    k: Vec<u32>,
    #[arg(long, value_enum, default_value = "subgraph")]
    mode: ModeArg,
    /// Search-node budget for `exact`.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Run the exact solver above its size limits.
    #[arg(long)]
    force_exact: bool,
    /// Table to append to; defaults to `<out>/boxes.csv`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FitArg {
    Tau,
    Db,
    Cesaro,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OffsetArg {
    Box,
    Tree,
}

#[derive(Args, Serialize)]
struct DimArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long, value_enum, default_value = "tau")]
    kind: FitArg,
    /// Expected slope; with a bracket the target must lie inside it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    tolerance: f64,
    /// Largest residual for a fit to count as linear.
    #[arg(long, default_value_t = FitConfig::default().residual_tolerance)]
    residual_tolerance: f64,
    /// Fail unless the fit is linear.
    #[arg(long)]
    require_linear: bool,
    /// Box sizes for the Cesaro average.
    #[arg(long, value_delimiter = ',')]
    ells: Vec<u32>,
    /// Number of Cesaro terms.
    #[arg(long, default_value_t = 0)]
    terms: u32,
    #[arg(long, value_enum, default_value = "tree")]
    offset: OffsetArg,
    /// Count method used by the Cesaro average.
    #[arg(long, default_value = "lower")]
    count_method: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// The configuration echo written to `run.toml`.
#[derive(Serialize)]
struct RunConfig<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    args: &'a T,
}

fn write_run_config<T: Serialize>(out: &Path, command: &str, args: &T) -> Result<()> {
    let cfg = RunConfig {
        command,
        version: env!("CARGO_PKG_VERSION"),
        args,
    };
    let text = toml::to_string(&cfg).context("serializing run config")?;
    write_file(&out.join("run.toml"), &text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct Snapshot {
    file: String,
    index: u32,
    vertices: usize,
    edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    diameter: Option<u32>,
}

#[derive(Serialize)]
struct Manifest {
    model: ModelKind,
    snapshots: Vec<Snapshot>,
}

fn snapshot(file: &str, index: u32, g: &Graph) -> Result<Snapshot> {
    let diameter = if g.num_vertices() <= DIAMETER_LIMIT && g.is_connected() {
        Some(diameter(g)?)
    } else {
        None
    };
    Ok(Snapshot {
        file: file.to_string(),
        index,
        vertices: g.num_vertices(),
        edges: g.num_edges(),
        diameter,
    })
}

fn cmd_generate(args: &GenerateArgs) -> Result<ExitCode> {
    let model = Model::resolve(args.model, &args.params)?;
    let mut snapshots = Vec::new();
    match &model {
        Model::Shm { states, .. } => {
            for s in states {
                let file = format!("step{}.edges", s.step);
                write_file(&args.out.join(&file), &write_edge_list_with_birth(&s.graph, Some(&s.birth_time)))?;
                snapshots.push(snapshot(&file, s.step, &s.graph)?);
            }
        }
        _ => {
            let g = model.graph()?;
            let file = "graph.edges";
            write_file(&args.out.join(file), &write_edge_list(&g))?;
            snapshots.push(snapshot(file, model.index(), &g)?);
        }
    }
    for s in &snapshots {
        println!("{}: {} vertices, {} edges", s.file, s.vertices, s.edges);
    }
    let manifest = Manifest {
        model: args.model,
        snapshots,
    };
    write_file(&args.out.join("manifest.toml"), &toml::to_string(&manifest)?)?;
    write_run_config(&args.out, "generate", args)?;
    Ok(ExitCode::SUCCESS)
}

fn load_table(path: &Path) -> Result<BoxTable> {
    if !path.exists() {
        return Ok(BoxTable::new());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    BoxTable::from_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_box(args: &BoxArgs) -> Result<ExitCode> {
    let model = match (args.model, &args.graph) {
        (Some(kind), None) => Some(Model::resolve(kind, &args.params)?),
        (None, Some(_)) => None,
        _ => bail!("give either a model or --graph"),
    };
    let mode: MetricMode = args.mode.into();
    let mut rows = Vec::new();
    match args.method {
        Method::Exact | Method::Greedy => {
            if args.ell.is_empty() {
                bail!("--ell is required for {:?}", args.method);
            }
            let (graph, index) = match &model {
                Some(m) => (m.graph()?, m.index()),
                None => (model::read_graph(args.graph.as_ref().expect("checked"))?, args.index),
            };
            let size = graph.num_vertices();
            if matches!(args.method, Method::Exact) && !args.force_exact {
                let limit = match mode {
                    MetricMode::GlobalDistance => EXACT_LIMIT_GLOBAL,
                    MetricMode::SubgraphDistance => EXACT_LIMIT_SUBGRAPH,
                };
                if size > limit {
                    bail!("exact boxing refused: {size} vertices exceeds the {limit}-vertex limit for {} mode (use --force-exact)", mode.as_str());
                }
            }
            for &ell in &args.ell {
                let (count, method) = match args.method {
                    Method::Exact => {
                        let c = min_boxes_exact(&graph, ell, mode, args.budget)?;
                        if c.optimal {
                            (c.num_boxes(), CountMethod::Exact)
                        } else {
                            eprintln!("warning: node budget exhausted at ell={ell}; recording an upper bound");
                            (c.num_boxes(), CountMethod::UpperBound)
                        }
                    }
                    _ => (greedy_boxing(&graph, ell, mode, args.params.seed)?.num_boxes(), CountMethod::Greedy),
                };
                rows.push(BoxRow::new(ell, index, count as u64, method, size as u64));
            }
        }
        Method::Bounds | Method::Witness => {
            let model = model.context("bounds and witnesses need a model")?;
            if args.k.is_empty() {
                bail!("--k is required for {:?}", args.method);
            }
            for &k in &args.k {
                if matches!(args.method, Method::Bounds) {
                    let (ell, lo, hi, size) = model.bounds(k)?;
                    rows.push(BoxRow::new(ell, model.index(), lo, CountMethod::LowerBound, size.clone()));
                    rows.push(BoxRow::new(ell, model.index(), hi, CountMethod::UpperBound, size));
                } else {
                    let w = model.witness(k)?;
                    let size = model.graph()?.num_vertices();
                    rows.push(BoxRow::new(model.ell(k)?, model.index(), w.lower_bound() as u64, CountMethod::LowerBound, size as u64));
                }
            }
        }
    }
    let path = args.table.clone().unwrap_or_else(|| args.out.join("boxes.csv"));
    let mut table = load_table(&path)?;
    for r in rows {
        println!("ell={} n={} count={} method={} size={}", r.ell, r.n, r.count, r.method, r.size);
        table.push(r)?;
    }
    write_file(&path, &table.to_csv()?)?;
    write_run_config(&args.out, "box", args)?;
    Ok(ExitCode::SUCCESS)
}

/// Whether `fit` meets `target` within `tolerance`: the target must lie in
/// the bracket widened by `tolerance`, or near the point slope.
pub fn meets_target(fit: &DimensionFit, target: f64, tolerance: f64) -> bool {
    match fit.bracket {
        Some((lo, hi)) => lo - tolerance <= target && target <= hi + tolerance,
        None => (fit.slope - target).abs() <= tolerance,
    }
}

pub fn describe(fit: &DimensionFit) -> String {
    let mut s = format!("{} slope {:.6} max residual {:.6}", fit.kind, fit.slope, fit.max_residual);
    if let Some((lo, hi)) = fit.bracket {
        s += &format!(" bracket [{lo:.6}, {hi:.6}]");
    }
    s += if fit.linear { " linear" } else { " non-linear" };
    s
}

fn cmd_dim(args: &DimArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.table).with_context(|| format!("reading {}", args.table.display()))?;
    let table = BoxTable::from_csv(&text).with_context(|| format!("parsing {}", args.table.display()))?;
    let config = FitConfig {
        residual_tolerance: args.residual_tolerance,
    };
    let fit = match args.kind {
        FitArg::Tau => fit_tau(&table, &config)?,
        FitArg::Db => fit_db(&table, &config)?,
        FitArg::Cesaro => {
            let offset = match args.offset {
                OffsetArg::Box => CesaroOffset::BoxSize,
                OffsetArg::Tree => CesaroOffset::TreeRadius,
            };
            let method: CountMethod = args.count_method.parse()?;
            fit_tau_cesaro(&table, &args.ells, args.terms, offset, method)?
        }
    };
    println!("{}", describe(&fit));
    write_file(&args.out.join("fits.csv"), &fits_to_csv(std::slice::from_ref(&fit))?)?;
    write_run_config(&args.out, "dim", args)?;
    let mut ok = true;
    if let Some(target) = args.target {
        let hit = meets_target(&fit, target, args.tolerance);
        println!("target {target:.6} tolerance {}: {}", args.tolerance, if hit { "ok" } else { "FAILED" });
        ok &= hit;
    }
    if args.require_linear && !fit.linear {
        println!("fit is not linear within {}", args.residual_tolerance);
        ok = false;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Box(a) => cmd_box(a),
        Command::Dim(a) => cmd_dim(a),
        Command::Repro(a) => repro::run(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
