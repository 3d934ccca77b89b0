use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glct_core::graph::{
    build_knn_graph, build_random_knn_graph, build_sensor_graph, build_swiss_roll_graph, read_coords, read_edge_list, synthetic_autocorrelation,
    write_coords, write_edge_list, Graph, GraphSignal, Weighting,
};
use glct_core::io::{read_signal_csv, write_complex_matrix_csv, write_signal_csv};
use glct_core::lct::LctParams;
use glct_core::optimize::{adam_train, gfrft_search_models, grid_search_models, write_grid_csv, Snapshot};
use glct_core::transforms::{FactoryConfig, TransformFactory};
use glct_core::wiener::{ObservationModel, ObservationSampler};
use glct_core::{GlctError, Method, Result};
use glct_experiments::bench::{run_bench, write_bench_outputs, BenchConfig};
use glct_experiments::config::{ExperimentConfig, GridSettings, Strategy, TrainSettings};
use glct_experiments::data::{add_noise, derive_seed, read_signal_table, write_stand_ins};
use glct_experiments::report::write_all;
use glct_experiments::suite::{checks_markdown, run_realworld_suite, run_synthetic_suite};
use serde_json::json;

/// Graph linear canonical transforms, Wiener denoising and parameter search.
#[derive(Parser, Debug)]
#[command(name = "glct", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Base seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory receiving output files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// JSON experiment or bench configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Method name (gfrft-w, gfrft-l, wadj-cddhfs, wadj-cmcccm, lap-cddhfs,
    /// lap-cmcccm); repeatable. Restricts suites and the bench, selects the
    /// method of single runs.
    #[arg(long = "variant", global = true)]
    variants: Vec<Method>,

    /// Largest accepted inverse residual ‖F⁻¹F − I‖_F of constructed operators.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, import or export graphs.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Apply a transform to a signal CSV.
    Transform(TransformArgs),
    /// Closed-form MSE grid search under the neighbourhood covariance model.
    GridSearch(GridSearchArgs),
    /// Joint Adam training on one noisy snapshot.
    Train(TrainArgs),
    /// Run a denoising suite.
    #[command(subcommand)]
    Suite(SuiteCommand),
    /// Compare grid search and Adam across graph sizes.
    Bench(BenchArgs),
    /// Write generated stand-ins for the real-data CSVs.
    StandIns {
        #[arg(long, default_value = "data")]
        dir: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum GraphCommand {
    /// Draw a graph and write `edges.csv` and `coords.csv`.
    Build(GraphSource),
    /// Read a graph and print a summary.
    Import(GraphSource),
    /// Write adjacency and Laplacian matrices as CSV.
    Export(GraphSource),
}

#[derive(Subcommand, Debug)]
enum SuiteCommand {
    Synthetic,
    Real {
        /// Directory with `<name>_coords.csv` / `<name>_signals.csv`; stand-ins
        /// are generated there when missing.
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Knn,
    Sensor,
    SwissRoll,
}

#[derive(Args, Debug)]
struct GraphSource {
    /// Edge list `i,j,w`.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Coordinates `id,x,y[,z]`; joined by a gaussian k-nn relation unless `--edges` is given.
    #[arg(long)]
    coords: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "knn")]
    family: Family,
    #[arg(long, default_value_t = 15)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    graph: GraphSource,
    /// Signal CSV `node_id,value` or `node_id,re,im`.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// Fractional order, for gfrft methods.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Apply the inverse transform instead.
    #[arg(long)]
    inverse: bool,
    /// Also write the operator matrix.
    #[arg(long)]
    matrix: bool,
}

#[derive(Args, Debug)]
struct GridSearchArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Leave out the fractional Fourier points of the GLCT grid.
    #[arg(long)]
    no_rotations: bool,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    graph: GraphSource,
    /// Signal table `node_id,t_0,…`; a snapshot is sampled from the covariance model otherwise.
    #[arg(long)]
    signals: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    time: usize,
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long, default_value_t = 0.005)]
    learning_rate: f64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    grid_count: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
}

/// Opens `path`, naming it in the error.
fn open(path: &std::path::Path) -> Result<File> {
    File::open(path).map_err(|e| GlctError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn invalid(msg: impl Into<String>) -> GlctError {
    GlctError::InvalidParameter(msg.into())
}

impl Cli {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("results"))
    }

    fn factory(&self) -> Result<FactoryConfig<f64>> {
        let mut f = FactoryConfig::default();
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(invalid("--tolerance must be > 0"));
            }
            f.inverse_tol = t;
        }
        Ok(f)
    }

    fn method(&self, default: Method) -> Method {
        self.variants.first().copied().unwrap_or(default)
    }

    fn output(&self, name: &str) -> Result<BufWriter<File>> {
        let dir = self.out_dir();
        std::fs::create_dir_all(&dir)?;
        Ok(BufWriter::new(File::create(dir.join(name))?))
    }
}

impl GraphSource {
    fn load(&self, seed: u64) -> Result<Graph<f64>> {
        match (&self.edges, &self.coords) {
            (Some(e), coords) => {
                let g = read_edge_list(open(e)?, None)?;
                match coords {
                    Some(c) => Graph::from_adjacency(g.adjacency().clone(), Some(read_coords(open(c)?)?)),
                    None => Ok(g),
                }
            }
            (None, Some(c)) => build_knn_graph(&read_coords(open(c)?)?, self.k, Weighting::default()),
            (None, None) => match self.family {
                Family::Knn => build_random_knn_graph(self.n, self.k, seed, Weighting::default()),
                Family::Sensor => build_sensor_graph(self.n, seed),
                Family::SwissRoll => build_swiss_roll_graph(self.n, seed, self.k),
            },
        }
    }
}

fn summary(g: &Graph<f64>) -> serde_json::Value {
    let deg = g.degree();
    json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "connected": g.is_connected(),
        "min_degree": deg.min(),
        "max_degree": deg.max(),
    })
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn graph_cmd(cli: &Cli, cmd: &GraphCommand) -> Result<()> {
    match cmd {
        GraphCommand::Build(src) => {
            let g = src.load(cli.seed())?;
            write_edge_list(&g, cli.output("edges.csv")?)?;
            if let Some(c) = g.coords() {
                write_coords(c, cli.output("coords.csv")?)?;
            }
            print_json(&summary(&g));
        }
        GraphCommand::Import(src) => print_json(&summary(&src.load(cli.seed())?)),
        GraphCommand::Export(src) => {
            let g = src.load(cli.seed())?;
            let cplx = |m: &nalgebra::DMatrix<f64>| m.map(|v| nalgebra::Complex::new(v, 0.0));
            write_complex_matrix_csv(&cplx(g.adjacency()), cli.output("adjacency.csv")?)?;
            write_complex_matrix_csv(&cplx(g.laplacian()), cli.output("laplacian.csv")?)?;
            print_json(&summary(&g));
        }
    }
    Ok(())
}

fn transform_cmd(cli: &Cli, args: &TransformArgs) -> Result<()> {
    let g = args.graph.load(cli.seed())?;
    let f = TransformFactory::new(&g, cli.factory()?)?;
    let signal = GraphSignal::new(read_signal_csv(open(&args.signal)?)?);
    let method = cli.method(Method::Glct(glct_core::Variant::WadjCddhfs));
    let op = match method {
        Method::Gfrft(basis) => f.gfrft(basis, args.alpha)?,
        Method::Glct(v) => f.glct(v, &LctParams::from_abd(args.a, args.b, args.d)?)?,
    };
    let out = if args.inverse { op.apply_inverse(&signal)? } else { op.apply(&signal)? };
    write_signal_csv(out.values(), cli.output("transformed.csv")?)?;
    if args.matrix {
        write_complex_matrix_csv(op.forward(), cli.output("operator.csv")?)?;
    }
    print_json(&json!({ "method": method, "diagnostics": op.diagnostics() }));
    Ok(())
}

fn grid_cmd(cli: &Cli, args: &GridSearchArgs) -> Result<()> {
    let g = args.graph.load(cli.seed())?;
    let f = TransformFactory::new(&g, cli.factory()?)?;
    let model = ObservationModel::denoising(synthetic_autocorrelation(&g), args.noise)?;
    let settings = GridSettings { step: args.step, append_rotations: !args.no_rotations };
    let method = cli.method(Method::Glct(glct_core::Variant::WadjCddhfs));
    let models = std::slice::from_ref(&model);
    let out = match method {
        Method::Gfrft(basis) => gfrft_search_models(&f, basis, models, &settings.alphas()?)?,
        Method::Glct(v) => grid_search_models(&f, v, models, &settings.grid()?)?,
    };
    write_grid_csv(&out, 0, cli.output("grid.csv")?)?;
    let opt = &out.optima[0];
    print_json(&json!({
        "method": method,
        "params": opt.params,
        "mse": opt.mse,
        "filter": opt.filter.to_json(),
        "points": out.points.len(),
        "evaluations": out.evaluations,
        "failures": out.failures,
        "op_counts": out.op_counts,
        "elapsed_ms": out.elapsed.as_secs_f64() * 1e3,
    }));
    Ok(())
}

fn train_cmd(cli: &Cli, args: &TrainArgs) -> Result<()> {
    let g = args.graph.load(cli.seed())?;
    let f = TransformFactory::new(&g, cli.factory()?)?;
    let snapshot = match &args.signals {
        Some(path) => {
            let clean = read_signal_table(open(path)?)?.signal(args.time)?;
            if clean.len() != g.n() {
                return Err(GlctError::DimensionMismatch { expected: g.n(), found: clean.len() });
            }
            let noisy = add_noise(&clean, args.noise, derive_seed(cli.seed(), &[args.time as u64]))?;
            Snapshot::new(noisy.into_inner(), clean.into_inner())?
        }
        None => {
            let model = ObservationModel::denoising(synthetic_autocorrelation(&g), args.noise)?;
            let (clean, noisy) = ObservationSampler::new(&model, derive_seed(cli.seed(), &[1]))?.draw();
            Snapshot::new(noisy, clean)?
        }
    };
    let method = cli.method(Method::Glct(glct_core::Variant::LapCmcccm));
    let settings = TrainSettings { learning_rate: args.learning_rate, max_iters: args.iters, ..TrainSettings::default() };
    let tc = settings.train_config(method, cli.seed(), f.config().b_min);
    let state = adam_train(&f, method, &[snapshot], &tc)?;
    state.write_trace_csv(cli.output("trace.csv")?)?;
    print_json(&json!({
        "method": method,
        "params": state.params.transform,
        "loss": state.loss,
        "initial_loss": state.initial_loss,
        "baseline_loss": state.baseline_loss,
        "used_baseline": state.used_baseline,
        "iterations": state.iterations(),
        "stop": state.stop,
        "filter": state.params.filter().to_json(),
        "elapsed_ms": state.elapsed.as_secs_f64() * 1e3,
    }));
    Ok(())
}

fn suite_config(cli: &Cli, default: ExperimentConfig) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => default,
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    if !cli.variants.is_empty() {
        cfg.methods = cli.variants.clone();
    }
    if let Some(t) = cli.tolerance {
        cfg.factory.inverse_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn suite_cmd(cli: &Cli, cmd: &SuiteCommand) -> Result<()> {
    let (cfg, rows, title) = match cmd {
        SuiteCommand::Synthetic => {
            let cfg = suite_config(cli, ExperimentConfig::synthetic_default())?;
            let rows = run_synthetic_suite(&cfg)?;
            (cfg, rows, "Synthetic graphs")
        }
        SuiteCommand::Real { data_dir } => {
            if cli.config.is_none() && !data_dir.join("sst_signals.csv").is_file() {
                log::info!("generating stand-in datasets in {}", data_dir.display());
                write_stand_ins(data_dir, cli.seed())?;
            }
            let cfg = suite_config(cli, ExperimentConfig::real_default(data_dir))?;
            if cfg.strategy != Strategy::Adam {
                return Err(invalid("the real-data suite needs strategy \"adam\""));
            }
            let rows = run_realworld_suite(&cfg)?;
            (cfg, rows, "Real-data snapshots")
        }
    };
    write_all(&rows, &cfg.out_dir, title)?;
    let checks = checks_markdown(&rows, 1e-9);
    let mut md = std::fs::OpenOptions::new().append(true).open(cfg.out_dir.join("results.md"))?;
    writeln!(md, "{checks}")?;
    std::fs::write(cfg.out_dir.join("config.json"), cfg.to_json())?;
    println!("{checks}");
    let failed = rows.iter().filter(|r| r.failed()).count();
    println!("{} rows ({failed} failed) written to {}", rows.len(), cfg.out_dir.display());
    Ok(())
}

fn bench_cmd(cli: &Cli, args: &BenchArgs) -> Result<()> {
    let mut cfg: BenchConfig = match &cli.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => BenchConfig::default(),
    };
    if let Some(s) = &args.sizes {
        cfg.sizes = s.clone();
    }
    if let Some(c) = args.grid_count {
        cfg.grid_count = c;
    }
    if let Some(i) = args.iters {
        cfg.iters = i;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tolerance {
        cfg.factory.inverse_tol = t;
    }
    if !cli.variants.is_empty() {
        cfg.variants = cli
            .variants
            .iter()
            .map(|m| match m {
                Method::Glct(v) => Ok(*v),
                Method::Gfrft(_) => Err(invalid("the bench compares GLCT variants only")),
            })
            .collect::<Result<_>>()?;
    }
    if cfg.sizes.iter().any(|&n| n < 2) || cfg.grid_count == 0 || cfg.iters == 0 || cfg.variants.is_empty() {
        return Err(invalid("bench needs sizes >= 2, grid_count >= 1, iters >= 1 and a variant"));
    }
    let rows = run_bench(&cfg)?;
    let dir = cli.out_dir();
    write_bench_outputs(&rows, &dir)?;
    print!("{}", glct_experiments::bench::bench_markdown(&rows));
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Graph(c) => graph_cmd(cli, c),
        Command::Transform(a) => transform_cmd(cli, a),
        Command::GridSearch(a) => grid_cmd(cli, a),
        Command::Train(a) => train_cmd(cli, a),
        Command::Suite(c) => suite_cmd(cli, c),
        Command::Bench(a) => bench_cmd(cli, a),
        Command::StandIns { dir } => {
            for (c, s) in write_stand_ins(dir, cli.seed())? {
                println!("{} {}", c.display(), s.display());
            }
            Ok(())
        }
    }
}

/// 2 for bad input (including unreadable files), 3 for numerical failures.
fn exit_code(e: &GlctError) -> u8 {
    if e.is_validation() || matches!(e, GlctError::Io(_)) {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
