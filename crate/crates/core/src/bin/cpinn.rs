use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use consistent_pinns::adnet::Network;
use consistent_pinns::experiments::{
    convergence_study, emit_plot, lstar_agreement, make_problem, norm_equivalence_study,
    run_experiment, table_csv, table_json, Config, LossKind, ProblemId, ResultRow, RunSpec,
    StudyNorm, TestFunction,
};
use consistent_pinns::geometry::{kuhn_tucker_mesh, Ambient, GridSpec, SimplicialMesh};
use consistent_pinns::rates::{expected_rate, NormKind, RateQuery, SmoothnessClass};
use consistent_pinns::Error;

#[derive(Parser)]
#[command(name = "cpinn", version, about = "Collocation solvers for the Poisson problem on the unit cube")]
struct Cli {
    /// key=value file; flags given on the command line take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sizes of the tensor grid, its boundary and the simplicial meshes
    GridInfo {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Interpolation error across levels and the fitted order
    InterpConvergence {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value = "sup")]
        norm: String,
        #[arg(long, default_value_t = 3)]
        k_min: u32,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        #[arg(long, default_value = "sinsin")]
        function: String,
    },
    /// Discrete vs quadrature norms of random piecewise-linear functions
    NormEquivalence {
        #[arg(long, default_value_t = 4)]
        k_max: u32,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train one loss on one grid for a list of seeds
    Train(TrainArgs),
    /// Every grid size and loss of one benchmark
    Tables(TrainArgs),
    /// SVG heatmap of the exact solution or of a saved network
    Plot {
        #[arg(long)]
        experiment: Option<String>,
        /// network checkpoint; the exact solution is drawn when absent
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal-recovery exponent of a smoothness class in a given norm
    Rates {
        #[arg(long, value_enum)]
        norm: RateNorm,
        #[arg(long)]
        s: f64,
        /// integrability; `inf` for p = ∞
        #[arg(long)]
        p: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        tau: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RateNorm {
    C,
    Lp,
    H1,
    Hminus1,
    H12,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct TrainArgs {
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    /// collocation points per axis (tables: comma-separated list)
    #[arg(long)]
    points_per_axis: Option<String>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// comma-separated seeds
    #[arg(long)]
    seed: Option<String>,
    /// domain exponent of the consistent-gamma loss
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    damping: Option<f64>,
    #[arg(long)]
    eta_max: Option<f64>,
    /// side of the cell-centre grid for the H1 error
    #[arg(long)]
    eval_points: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// directory for network checkpoints
    #[arg(long)]
    checkpoint_dir: Option<PathBuf>,
}

/// Flag values with configuration-file fallbacks.
struct Resolved<'a> {
    args: &'a TrainArgs,
    config: &'a Config,
}

impl Resolved<'_> {
    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Error> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.config.parsed(key),
        }
    }

    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.config.get(key).map(String::from))
    }

    fn problem(&self) -> Result<ProblemId, Error> {
        self.string(&self.args.experiment, "experiment")
            .unwrap_or_else(|| "1".into())
            .parse()
    }

    fn format(&self) -> Result<Format, Error> {
        match self.args.format {
            Some(f) => Ok(f),
            None => match self.config.get("format") {
                None | Some("csv") => Ok(Format::Csv),
                Some("json") => Ok(Format::Json),
                Some(other) => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
            },
        }
    }

    fn list<T: std::str::FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Option<Vec<T>>, Error> {
        self.string(flag, key)
            .map(|s| {
                s.split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|_| Error::InvalidParameter(format!("bad `{key}` entry `{x}`")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn out(&self) -> Option<PathBuf> {
        self.args
            .out
            .clone()
            .or_else(|| self.config.get("out").map(PathBuf::from))
    }

    fn spec(&self, problem: ProblemId, n: usize, loss: LossKind) -> Result<RunSpec, Error> {
        let a = self.args;
        let mut spec = RunSpec::benchmark(problem, n, loss);
        if let Some(v) = self.get(a.layers, "layers")? {
            spec.layers = v;
        }
        if let Some(v) = self.get(a.width, "width")? {
            spec.width = v;
        }
        if let Some(v) = self.get(a.steps, "steps")? {
            spec.train.steps = v;
        }
        if let Some(v) = self.get(a.gamma, "gamma")? {
            spec.gamma = v;
        }
        if let Some(v) = self.get(a.damping, "damping")? {
            spec.train.damping = v;
        }
        if let Some(v) = self.get(a.eta_max, "eta-max")? {
            spec.train.eta_max = v;
        }
        if let Some(v) = self.get(a.eval_points, "eval-points")? {
            spec.eval_points = v;
        }
        if let Some(seeds) = self.list(&a.seed, "seed")? {
            spec.seeds = seeds;
        }
        Ok(spec)
    }
}

fn write_output(path: Option<PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_rows(r: &Resolved, rows: &[ResultRow]) -> Result<(), Error> {
    let text = match r.format()? {
        Format::Csv => table_csv(rows)?,
        Format::Json => table_json(rows)? + "\n",
    };
    write_output(r.out(), &text)
}

fn run_specs(r: &Resolved, specs: Vec<RunSpec>) -> Result<(), Error> {
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    let mut failed = false;
    for spec in specs {
        let out = run_experiment(&spec)?;
        for (seed, err) in &out.failures {
            eprintln!("{} n={} seed={seed}: {err}", spec.loss, spec.points_per_axis);
            failed = true;
        }
        if let Some(best) = out.best() {
            eprintln!(
                "{:<17} m̃={:<5} m̄={:<4} best rel H1 error {:.3}% (seed {})",
                spec.loss,
                best.row.m_tilde,
                best.row.m_bar,
                100.0 * best.row.rel_h1_error,
                best.row.seed
            );
        }
        if let Some(dir) = r.args.checkpoint_dir.clone().or_else(|| r.config.get("checkpoint-dir").map(PathBuf::from)) {
            std::fs::create_dir_all(&dir)?;
            for run in &out.runs {
                let name = format!(
                    "exp{}-{}-n{}-seed{}.net",
                    spec.problem, spec.loss, spec.points_per_axis, run.row.seed
                );
                run.net.save(&dir.join(name))?;
            }
        }
        rows.extend(out.rows());
        runs.extend(out.runs);
    }
    if let Some(frac) = lstar_agreement(&runs) {
        eprintln!("smaller ℒ* ⇒ smaller H1 error in {:.0}% of seed pairs", 100.0 * frac);
    }
    if rows.is_empty() {
        return Err(Error::NonConvergence("every run failed".into()));
    }
    emit_rows(r, &rows)?;
    if failed {
        return Err(Error::NonConvergence("some seeds failed".into()));
    }
    Ok(())
}

fn mesh_line(name: &str, mesh: &SimplicialMesh) -> String {
    format!("{name}: {} simplices of dimension {}\n", mesh.len(), mesh.reference_dim())
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::GridInfo { k, r, d } => {
            let spec = GridSpec::new(k, r, d)?;
            let mut s = format!(
                "k={k} r={r} d={d}\npoints per axis: {}\nspacing: {}\nm̃ = {}\nm̄ = {}\n",
                spec.per_axis(),
                spec.spacing(),
                spec.m_tilde(),
                spec.m_bar()
            );
            s += &mesh_line("domain mesh", &kuhn_tucker_mesh(k, d, Ambient::Domain)?);
            s += &mesh_line("boundary mesh", &kuhn_tucker_mesh(k, d, Ambient::Boundary)?);
            write_output(None, &s)
        }
        Command::InterpConvergence {
            r,
            norm,
            k_min,
            k_max,
            function,
        } => {
            let norm: StudyNorm = norm.parse()?;
            let test: TestFunction = function.parse()?;
            let ks: Vec<u32> = (k_min..=k_max).collect();
            let res = convergence_study(r, norm, &ks, test)?;
            write_output(None, &format!("{res}\n"))
        }
        Command::NormEquivalence { k_max, samples, seed } => {
            let ks: Vec<u32> = (1..=k_max).collect();
            let bands = norm_equivalence_study(&ks, samples, &[1.0, 1.2, 2.0], seed, 1e-6)?;
            let text: String = bands.iter().map(|b| format!("{b}\n")).collect();
            write_output(None, &text)
        }
        Command::Train(args) => {
            let r = Resolved {
                args: &args,
                config: &config,
            };
            let problem = r.problem()?;
            let loss: LossKind = r
                .string(&args.loss, "loss")
                .unwrap_or_else(|| "weighted".into())
                .parse()?;
            let n = match r.list::<usize>(&args.points_per_axis, "points-per-axis")? {
                Some(v) if v.len() == 1 => v[0],
                Some(_) => return Err(Error::InvalidParameter("train takes a single grid size".into())),
                None => 10,
            };
            let spec = r.spec(problem, n, loss)?;
            run_specs(&r, vec![spec])
        }
        Command::Tables(args) => {
            let r = Resolved {
                args: &args,
                config: &config,
            };
            let problem = r.problem()?;
            let sizes = r
                .list::<usize>(&args.points_per_axis, "points-per-axis")?
                .unwrap_or_else(|| problem.grid_sizes().to_vec());
            let losses: Vec<LossKind> = match r.string(&args.loss, "loss") {
                Some(l) => vec![l.parse()?],
                None => LossKind::ALL.to_vec(),
            };
            let mut specs = Vec::new();
            for &n in &sizes {
                for &loss in &losses {
                    specs.push(r.spec(problem, n, loss)?);
                }
            }
            run_specs(&r, specs)
        }
        Command::Plot {
            experiment,
            checkpoint,
            resolution,
            out,
        } => {
            let id: ProblemId = experiment
                .or_else(|| config.get("experiment").map(String::from))
                .unwrap_or_else(|| "1".into())
                .parse()?;
            let out = out
                .or_else(|| config.get("out").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(format!("exp{id}.svg")));
            let map = match checkpoint {
                Some(path) => {
                    let net = Network::load(&path)?;
                    emit_plot(&net, resolution, &path.display().to_string(), &out)?
                }
                None => emit_plot(&make_problem(id), resolution, &format!("experiment {id}: exact solution"), &out)?,
            };
            eprintln!("wrote {} (min {:.6e}, max {:.6e})", out.display(), map.min, map.max);
            Ok(())
        }
        Command::Rates { norm, s, p, d, tau } => {
            let p: f64 = if p == "inf" {
                f64::INFINITY
            } else {
                p.parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad p `{p}`")))?
            };
            let class = SmoothnessClass::new(s, p, f64::INFINITY, d)?;
            let norm = match norm {
                RateNorm::C => NormKind::C,
                RateNorm::Lp => NormKind::Lp(tau),
                RateNorm::H1 => NormKind::H1,
                RateNorm::Hminus1 => NormKind::HMinus1,
                RateNorm::H12 => NormKind::H12Boundary,
            };
            let rate = expected_rate(&RateQuery { norm, class })?;
            write_output(
                None,
                &format!(
                    "exponent (sites): {}\nexponent (2^-k): {}\nlog factor: {}\n",
                    rate.exponent,
                    rate.k_scale(d),
                    rate.log_factor
                ),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_)
                | Error::Parse(_)
                | Error::DimensionMismatch { .. }
                | Error::ShapeMismatch(_)
                | Error::OutsideAmbient(_)
                | Error::UnsupportedQuadratureOrder(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
