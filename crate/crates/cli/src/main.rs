//! `lwpm`: command-line front end for the low-weight multiple solvers,
//! reductions and experiments.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lwpm::harness::{run_forward_validation, run_reverse_experiment, ExperimentConfig};
use lwpm::oracle::{brute_maxsat, brute_min_pm};
use lwpm::reductions::{
    decide_min_pm, evaluate_min_pm, forward_reduce_with, reverse_reduce, solve_min_pm, LiftInit,
};
use lwpm::search::{random_assignment, rng_from_seed};
use lwpm::{
    AffineSystem, BinaryMatrix, BitVec, Engine, Error, Gf2Poly, HcVariant, MinPmInstance, PolyStyle,
    Projection, SaReturn, SolverConfig, ToeplitzOperator,
};

#[derive(Parser)]
#[command(name = "lwpm", version, about = "Low-weight polynomial multiples over GF(2) via affine MAX-SAT")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Base seed; falls back to $LWPM_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Polynomial notation for input and output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Algebraic)]
    format: Format,

    /// key=value solver config file, applied before the flags below.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    max_iters: Option<usize>,

    #[arg(long, global = true)]
    restarts: Option<usize>,

    #[arg(long, global = true)]
    t_initial: Option<f64>,

    #[arg(long, global = true)]
    t_min: Option<f64>,

    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Exclude the all-zero assignment.
    #[arg(long, global = true)]
    forbid_zero: bool,

    #[arg(long, global = true, value_enum)]
    sa_return: Option<SaReturnArg>,

    #[arg(long, global = true, value_enum)]
    hc_variant: Option<HcVariantArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Algebraic,
    Exponents,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Exhaustive,
    Hc,
    Sa,
}

#[derive(Clone, Copy, ValueEnum)]
enum SaReturnArg {
    Best,
    Final,
}

#[derive(Clone, Copy, ValueEnum)]
enum HcVariantArg {
    Stochastic,
    Steepest,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectionArg {
    Majority,
    MajorityTie0,
    FirstOccurrence,
}

#[derive(Clone, Copy, ValueEnum)]
enum LiftInitArg {
    Truncate,
    DropFirst,
}

#[derive(Subcommand)]
enum Command {
    /// Find a low-weight multiple of POLY with degree below the bound.
    SolveLwpm {
        poly: String,
        #[arg(short = 'n', long = "degree-bound")]
        degree_bound: usize,
        #[arg(long, value_enum, default_value_t = EngineArg::Exhaustive)]
        engine: EngineArg,
    },
    /// Is there a multiple of degree < N and weight <= W?
    DecideLwpm {
        poly: String,
        #[arg(short = 'n', long = "degree-bound")]
        n: usize,
        #[arg(short = 'w', long)]
        weight: usize,
        #[arg(long, value_enum, default_value_t = EngineArg::Exhaustive)]
        engine: EngineArg,
    },
    /// Minimum weight of a multiple of degree < N.
    EvaluateLwpm {
        poly: String,
        #[arg(short = 'n', long = "degree-bound")]
        n: usize,
        #[arg(long, value_enum, default_value_t = EngineArg::Exhaustive)]
        engine: EngineArg,
    },
    /// Emit the affine system M(P, t) x = 0 for the instance (POLY, N).
    Reduce {
        poly: String,
        #[arg(short = 'n', long = "degree-bound")]
        n: usize,
        /// Substitute x0 = 1 and emit the remaining system.
        #[arg(long)]
        pin: bool,
        /// Emit the full reduction certificate instead of the bare system.
        #[arg(long, conflicts_with = "pin")]
        certificate: bool,
    },
    /// Emit the dense Toeplitz operator of POLY with T + 1 columns.
    Toeplitz {
        poly: String,
        #[arg(short = 't', long)]
        t: usize,
    },
    /// Project a 0/1 matrix file onto a polynomial instance.
    RevReduce {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = ProjectionArg::Majority)]
        projection: ProjectionArg,
    },
    /// Maximize satisfied constraints of a system file.
    SolveMaxsat {
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Exhaustive)]
        engine: EngineArg,
        /// Starting assignment for local search (default: random from the seed).
        #[arg(long, value_name = "BITS")]
        init: Option<String>,
    },
    /// Brute-force ground truth.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Reverse-reduction experiment over random matrices.
    Experiment {
        /// Comma-separated shapes such as 40x30,400x200.
        #[arg(long, default_value = "40x30")]
        sizes: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Directory for the CSV series and summaries.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, value_enum, default_value_t = ProjectionArg::Majority)]
        projection: ProjectionArg,
        /// Engine producing the multiple of each projected polynomial.
        #[arg(long, value_enum, default_value_t = EngineArg::Hc)]
        multiple_engine: EngineArg,
        #[arg(long, value_enum, default_value_t = LiftInitArg::Truncate)]
        lift_init: LiftInitArg,
        /// Random right-hand sides instead of A x = 0.
        #[arg(long)]
        random_rhs: bool,
    },
    /// Check the forward reduction identities on random small instances.
    Validate {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exhaustive minimum-weight multiple.
    Lwpm {
        poly: String,
        #[arg(short = 'n', long = "degree-bound")]
        n: usize,
    },
    /// Exhaustive MAX-SAT over a system file.
    Maxsat { system: PathBuf },
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::EmptyNeighbourhood | Error::ZeroAssignment | Error::Counterexample(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

impl From<Format> for PolyStyle {
    fn from(f: Format) -> Self {
        match f {
            Format::Algebraic => PolyStyle::Algebraic,
            Format::Exponents => PolyStyle::Exponents,
        }
    }
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Exhaustive => Engine::Exhaustive,
            EngineArg::Hc => Engine::HillClimb,
            EngineArg::Sa => Engine::SimulatedAnneal,
        }
    }
}

impl From<ProjectionArg> for Projection {
    fn from(p: ProjectionArg) -> Self {
        match p {
            ProjectionArg::Majority => "majority",
            ProjectionArg::MajorityTie0 => "majority-tie0",
            ProjectionArg::FirstOccurrence => "first-occurrence",
        }
        .parse()
        .expect("known projection name")
    }
}

impl GlobalOpts {
    fn style(&self) -> PolyStyle {
        self.format.into()
    }

    fn seed(&self) -> CliResult<u64> {
        if let Some(seed) = self.seed {
            return Ok(seed);
        }
        match std::env::var("LWPM_SEED") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::input(format!("invalid LWPM_SEED '{v}'"))),
            Err(_) => Ok(0),
        }
    }

    fn solver(&self) -> CliResult<SolverConfig> {
        let mut cfg = SolverConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_kv(&read(path)?)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        }
        cfg.seed = self.seed()?;
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.t_initial {
            cfg.t_initial = v;
        }
        if let Some(v) = self.t_min {
            cfg.t_min = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if self.forbid_zero {
            cfg.forbid_zero = true;
        }
        if let Some(v) = self.sa_return {
            cfg.sa_return = match v {
                SaReturnArg::Best => SaReturn::Best,
                SaReturnArg::Final => SaReturn::Final,
            };
        }
        if let Some(v) = self.hc_variant {
            cfg.hc_variant = match v {
                HcVariantArg::Stochastic => HcVariant::Stochastic,
                HcVariantArg::Steepest => HcVariant::Steepest,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_poly(text: &str, style: PolyStyle) -> CliResult<Gf2Poly> {
    Gf2Poly::parse(text, style).map_err(|e| Failure::input(format!("invalid polynomial '{text}': {e}")))
}

fn instance(text: &str, n: usize, style: PolyStyle) -> CliResult<MinPmInstance> {
    Ok(MinPmInstance::new(parse_poly(text, style)?, n)?)
}

fn read_system(path: &Path) -> CliResult<AffineSystem> {
    read(path)?
        .parse()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_sizes(text: &str) -> CliResult<Vec<(usize, usize)>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.split_once(['x', 'X'])
                .and_then(|(m, k)| Some((m.parse().ok()?, k.parse().ok()?)))
                .filter(|&(m, k)| m > 0 && k > 0)
                .ok_or_else(|| Failure::input(format!("invalid size '{tok}', expected MxK")))
        })
        .collect()
}

fn run(cli: Cli) -> CliResult<String> {
    let g = &cli.global;
    let style = g.style();
    let mut out = String::new();
    match cli.command {
        Command::SolveLwpm {
            poly,
            degree_bound,
            engine,
        } => {
            let inst = instance(&poly, degree_bound, style)?;
            let sol = solve_min_pm(&inst, engine.into(), &g.solver()?)?;
            let _ = writeln!(out, "{}", sol.multiple.format(style));
            let _ = writeln!(out, "weight {}", sol.weight);
            let _ = writeln!(out, "exact {}", sol.exact);
        }
        Command::DecideLwpm {
            poly,
            n,
            weight,
            engine,
        } => {
            let inst = instance(&poly, n, style)?;
            let d = decide_min_pm(&inst, weight, engine.into(), &g.solver()?)?;
            let _ = writeln!(out, "{}", d.holds);
            let _ = writeln!(out, "exact {}", d.exact);
        }
        Command::EvaluateLwpm { poly, n, engine } => {
            let inst = instance(&poly, n, style)?;
            let e = evaluate_min_pm(&inst, engine.into(), &g.solver()?)?;
            let _ = writeln!(out, "weight {}", e.weight);
            let _ = writeln!(out, "exact {}", e.exact);
        }
        Command::Reduce {
            poly,
            n,
            pin,
            certificate,
        } => {
            let inst = instance(&poly, n, style)?;
            let cert = forward_reduce_with(&inst, pin || certificate);
            if certificate {
                out = cert.to_string();
            } else if pin {
                let system = cert
                    .working_system()
                    .ok_or_else(|| Failure::input("pinning x0 leaves no variables (t = 0)"))?;
                out = system.to_string();
            } else {
                out = cert.system().to_string();
            }
        }
        Command::Toeplitz { poly, t } => {
            let op = ToeplitzOperator::build(&parse_poly(&poly, style)?, t)?;
            out = op.to_dense().to_string();
        }
        Command::RevReduce { matrix, projection } => {
            let a: BinaryMatrix = read(&matrix)?
                .parse()
                .map_err(|e| Failure::input(format!("{}: {e}", matrix.display())))?;
            let inst = reverse_reduce(&a, projection.into())?;
            let op = inst.operator();
            let _ = writeln!(out, "# operator {}x{}", op.rows(), op.cols());
            let _ = writeln!(out, "poly {}", inst.poly().format(style));
            let _ = writeln!(out, "n {}", inst.n());
        }
        Command::SolveMaxsat {
            system,
            engine,
            init,
        } => {
            let s = read_system(&system)?;
            let cfg = g.solver()?;
            let x0 = match init {
                Some(bits) => bits
                    .parse::<BitVec>()
                    .map_err(|e| Failure::input(format!("invalid --init '{bits}': {e}")))?,
                None => random_start(s.vars(), cfg.seed, cfg.forbid_zero),
            };
            let x = Engine::from(engine).run(&s, &x0, &cfg)?;
            let satisfied = s.satisfied_count(&x)?;
            let _ = writeln!(out, "assignment {x}");
            let _ = writeln!(out, "satisfied {satisfied}");
            let _ = writeln!(out, "violated {}", s.constraints() - satisfied);
        }
        Command::Oracle { which } => match which {
            OracleCommand::Lwpm { poly, n } => {
                let p = parse_poly(&poly, style)?;
                let (k, w) = brute_min_pm(&p, n)?;
                let _ = writeln!(out, "{}", k.format(style));
                let _ = writeln!(out, "weight {w}");
            }
            OracleCommand::Maxsat { system } => {
                let s = read_system(&system)?;
                let (x, satisfied) = brute_maxsat(&s, g.forbid_zero)?;
                let _ = writeln!(out, "assignment {x}");
                let _ = writeln!(out, "satisfied {satisfied}");
                let _ = writeln!(out, "violated {}", s.constraints() - satisfied);
            }
        },
        Command::Experiment {
            sizes,
            trials,
            out: dir,
            density,
            projection,
            multiple_engine,
            lift_init,
            random_rhs,
        } => {
            let cfg = ExperimentConfig {
                sizes: parse_sizes(&sizes)?,
                trials,
                base_seed: g.seed()?,
                density,
                projection: projection.into(),
                multiple_engine: multiple_engine.into(),
                solver: g.solver()?,
                init: match lift_init {
                    LiftInitArg::Truncate => LiftInit::Truncate,
                    LiftInitArg::DropFirst => LiftInit::DropFirst,
                },
                random_rhs,
            };
            let report = run_reverse_experiment(&cfg)?;
            if let Some(dir) = dir {
                report.write_dir(&dir)?;
            }
            out = report.table();
            for s in &report.sizes {
                for (trial, msg) in &s.failures {
                    let _ = writeln!(out, "# {}x{} trial {trial} failed: {msg}", s.rows, s.cols);
                }
            }
        }
        Command::Validate { count, max_degree } => {
            let report = run_forward_validation(count, max_degree, g.seed()?)?;
            let _ = writeln!(out, "passed {}/{}", report.passed, report.instances);
        }
    }
    Ok(out)
}

fn random_start(k: usize, seed: u64, nonzero: bool) -> BitVec {
    random_assignment(k, nonzero, &mut rng_from_seed(seed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
