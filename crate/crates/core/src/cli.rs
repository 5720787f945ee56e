//! Command-line front end.
//!
//! Exit codes: 0 success, 2 rejected configuration or bad usage, 3 I/O or
//! format error, 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audio::{denoise_speech, DenoiseMode};
use crate::datagen::{corrupt_uniform, run_sweep, GraphSpec, SweepKind, SweepSetup, SyntheticSpec};
use crate::io::{read_edge_list, read_matrix_csv, read_wav, write_matrix_csv, write_wav, write_with};
use crate::metrics::rse;
use crate::penalty::{prox_scalar, PenaltyKind, PenaltyParams};
use crate::solver::{solve, validate_config, SolverConfig};
use crate::tuning::{grid_search, penalties_for_lambdas, Method, SolverDefaults, DEFAULT_BETA_GRID};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "islr", version, about = "Sparse low-rank matrix denoising with convexity-preserving non-convex penalties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Denoise a matrix stored as CSV.
    Denoise(DenoiseArgs),
    /// Seeded synthetic sweep comparing ISLR and SLR.
    Bench(BenchArgs),
    /// Denoise a mono 16-bit WAV file in the STFT domain.
    Audio(AudioArgs),
    /// Corrupt and denoise a weighted graph adjacency matrix.
    Graph(GraphArgs),
    /// Print the scalar proximity operator for a list of inputs.
    Prox(ProxArgs),
    /// Check a parameter set against the convexity and ADMM conditions.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct PenaltyArgs {
    /// Penalty family.
    #[arg(long, default_value_t = PenaltyKind::Arctangent)]
    penalty: PenaltyKind,
    /// Share of the convexity budget for the singular-value penalty [default: 0.5].
    #[arg(long, conflicts_with_all = ["a0", "a1"])]
    c: Option<f64>,
    #[arg(long, requires = "a1", allow_hyphen_values = true)]
    a0: Option<f64>,
    #[arg(long, requires = "a0", allow_hyphen_values = true)]
    a1: Option<f64>,
    /// Convex baseline: a0 = a1 = 0.
    #[arg(long, conflicts_with_all = ["c", "a0", "a1"])]
    slr: bool,
}

impl PenaltyArgs {
    fn config(&self, lambda0: f64, lambda1: f64, solver: &SolverArgs) -> Result<SolverConfig> {
        let (a0, a1) = match (self.slr, self.a0, self.a1) {
            (true, _, _) => (0.0, 0.0),
            (false, Some(a0), Some(a1)) => (a0, a1),
            _ => penalties_for_lambdas(self.c.unwrap_or(0.5), lambda0, lambda1)?,
        };
        let cfg = SolverConfig::new(
            lambda0,
            lambda1,
            PenaltyParams { kind: self.penalty, a: a0 },
            PenaltyParams { kind: self.penalty, a: a1 },
        )
        .mu(solver.mu)
        .eps(solver.eps)
        .max_iter(solver.max_iter)
        .residual_tol(solver.residual_tol);
        let outcome = validate_config(&cfg);
        if !outcome.accepted() {
            return Err(Error::ConfigRejected(outcome));
        }
        Ok(cfg)
    }

    fn method(&self) -> Method {
        if self.slr {
            Method::Slr
        } else {
            Method::Islr
        }
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1.5)]
    mu: f64,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Relative bound on the split residual at convergence, at most 1e-3 [default: min(eps, 1e-3)].
    #[arg(long)]
    residual_tol: Option<f64>,
}

impl SolverArgs {
    fn defaults(&self, kind: PenaltyKind) -> SolverDefaults {
        SolverDefaults {
            kind,
            mu: self.mu,
            eps: self.eps,
            max_iter: self.max_iter,
            residual_tol: self.residual_tol,
        }
    }
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    lambda0: f64,
    #[arg(long)]
    lambda1: f64,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Objective value per iteration, as CSV.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepArg {
    Rank,
    Sparsity,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    sweep: SweepArg,
    /// Sweep points; ranks, or sparsity levels (fraction of nonzero entries).
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    m: usize,
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Rank when sweeping sparsity.
    #[arg(long, default_value_t = 10)]
    rank: usize,
    /// Fraction of nonzero entries when sweeping rank.
    #[arg(long, default_value_t = 0.6)]
    sparsity: f64,
    #[arg(long, default_value_t = 0.2)]
    sigma: f64,
    #[arg(long, default_value_t = 15)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BETA_GRID)]
    beta0: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BETA_GRID)]
    beta1: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    c: f64,
    #[arg(long, default_value_t = PenaltyKind::Arctangent)]
    penalty: PenaltyKind,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AudioArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Noise standard deviation; the weights are beta·sigma.
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    beta0: f64,
    #[arg(long, default_value_t = 1.0)]
    beta1: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Complex)]
    mode: ModeArg,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Complex,
    Magnitude,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Tab-separated `a<TAB>b<TAB>weight` edges; a synthetic graph is used if omitted.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    /// Corrupted adjacency written before denoising.
    #[arg(long)]
    noisy_output: Option<PathBuf>,
    /// Upper end of the uniform corruption.
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    /// Fraction of entries corrupted.
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 440)]
    nodes: usize,
    #[arg(long, default_value_t = 8)]
    communities: usize,
    /// Fraction of synthetic nodes that carry edges.
    #[arg(long, default_value_t = 0.5)]
    active: f64,
    #[arg(long, default_value_t = 1.0)]
    beta0: f64,
    #[arg(long, default_value_t = 1.0)]
    beta1: f64,
    /// Pick beta0, beta1 from the default grid by RSE against the clean graph.
    #[arg(long, conflicts_with_all = ["beta0", "beta1", "a0", "a1"])]
    tune: bool,
    /// Grid report written when tuning.
    #[arg(long, requires = "tune")]
    report: Option<PathBuf>,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct ProxArgs {
    #[arg(long, default_value_t = PenaltyKind::Arctangent)]
    penalty: PenaltyKind,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    values: Vec<f64>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    lambda0: f64,
    #[arg(long)]
    lambda1: f64,
    #[arg(long, allow_hyphen_values = true)]
    a0: f64,
    #[arg(long, allow_hyphen_values = true)]
    a1: f64,
    #[arg(long, default_value_t = 1.5)]
    mu: f64,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConfigRejected(_)
        | Error::InvalidPenalty { .. }
        | Error::DegenerateLambda(_)
        | Error::InvalidArgument(_)
        | Error::BadRank { .. }
        | Error::BadParams(_) => EXIT_REJECTED,
        Error::Io { .. }
        | Error::Parse { .. }
        | Error::RaggedRows { .. }
        | Error::EmptyInput(_)
        | Error::UnsupportedFormat(_)
        | Error::Wav(_) => EXIT_IO,
        Error::ShapeMismatch { .. }
        | Error::InvalidMatrix(_)
        | Error::DecompositionFailure
        | Error::NonFinite { .. }
        | Error::ZeroReference => EXIT_NUMERIC,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if !matches!(cli.command, Command::Bench(_)) {
        // only sweeps fan out; an already-built pool is fine too
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let stdout = std::io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn run(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Denoise(args) => denoise(args, out),
        Command::Bench(args) => bench(args, out),
        Command::Audio(args) => audio(args, out),
        Command::Graph(args) => graph(args, out),
        Command::Prox(args) => prox(args, out),
        Command::Validate(args) => validate(args, out),
    }
}

fn denoise(args: DenoiseArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.penalty.config(args.lambda0, args.lambda1, &args.solver)?;
    let y = read_matrix_csv(&args.input)?;
    let result = solve(&y, &cfg, None)?;
    write_matrix_csv(&result.x, &args.output)?;
    if let Some(path) = &args.history {
        write_with(path, |w| result.write_history(w))?;
    }
    writeln!(out, "iterations\t{}", result.iterations).map_err(stdout_err)?;
    writeln!(out, "converged\t{}", result.converged).map_err(stdout_err)?;
    if let Some(f) = result.final_objective() {
        writeln!(out, "objective\t{f:.16e}").map_err(stdout_err)?;
    }
    if !result.converged {
        eprintln!("warning: stopped after {} iterations without meeting the tolerance", result.iterations);
    }
    Ok(EXIT_OK)
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let kind = match args.sweep {
        SweepArg::Rank => SweepKind::Rank,
        SweepArg::Sparsity => SweepKind::Sparsity,
    };
    let values = if !args.values.is_empty() {
        args.values.clone()
    } else {
        match kind {
            SweepKind::Rank => (1..=args.m.min(args.n)).step_by(5).map(|k| k as f64).collect(),
            SweepKind::Sparsity => (1..=9).map(|i| f64::from(i) / 10.0).collect(),
        }
    };
    if !(0.0..=1.0).contains(&args.sparsity) {
        return Err(Error::InvalidArgument(format!("sparsity level {} outside [0, 1]", args.sparsity)));
    }
    let base = SyntheticSpec {
        m: args.m,
        n: args.n,
        rank: args.rank,
        zero_fraction: 1.0 - args.sparsity,
        sigma: args.sigma,
        seed: args.seed,
    };
    let mut setup = SweepSetup::new(kind, values, base, args.trials);
    setup.beta0_grid = args.beta0.clone();
    setup.beta1_grid = args.beta1.clone();
    setup.c = args.c;
    setup.defaults = args.solver.defaults(args.penalty);
    let report = run_sweep(&setup)?;
    write_with(&args.out, |w| report.write_csv(w))?;
    for row in &report.rows {
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}",
            row.sweep_value, row.method, row.mean_rse, row.std_rse
        )
        .map_err(stdout_err)?;
    }
    Ok(EXIT_OK)
}

fn audio(args: AudioArgs, out: &mut dyn Write) -> Result<i32> {
    if !(args.sigma >= 0.0 && args.beta0 >= 0.0 && args.beta1 >= 0.0) {
        return Err(Error::InvalidArgument("sigma and betas must be nonnegative".into()));
    }
    let cfg = args
        .penalty
        .config(args.beta0 * args.sigma, args.beta1 * args.sigma, &args.solver)?;
    let (signal, rate) = read_wav(&args.input)?;
    let mode = match args.mode {
        ModeArg::Complex => DenoiseMode::Complex,
        ModeArg::Magnitude => DenoiseMode::Magnitude,
    };
    let denoised = denoise_speech(&signal, &cfg, mode)?;
    write_wav(&denoised, rate, &args.output)?;
    writeln!(out, "samples\t{}\nrate\t{rate}", denoised.len()).map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn graph(args: GraphArgs, out: &mut dyn Write) -> Result<i32> {
    let clean = match &args.edges {
        Some(path) => {
            let (list, adjacency) = read_edge_list(path)?;
            for w in &list.warnings {
                eprintln!("warning: {w}");
            }
            adjacency
        }
        None => GraphSpec {
            nodes: args.nodes,
            communities: args.communities,
            active_fraction: args.active,
            seed: args.seed,
        }
        .adjacency()?,
    };
    let noisy = corrupt_uniform(&clean, args.fraction, args.sigma, crate::datagen::sub_seed(args.seed, 1))?;
    if let Some(path) = &args.noisy_output {
        write_matrix_csv(&noisy, path)?;
    }
    let (beta0, beta1) = if args.tune {
        let report = grid_search(
            &noisy,
            &clean,
            &DEFAULT_BETA_GRID,
            &DEFAULT_BETA_GRID,
            args.penalty.c.unwrap_or(0.5),
            args.sigma,
            args.penalty.method(),
            &args.solver.defaults(args.penalty.penalty),
        )?;
        if let Some(path) = &args.report {
            write_with(path, |w| report.write_csv(w))?;
        }
        (report.best_row().beta0, report.best_row().beta1)
    } else {
        (args.beta0, args.beta1)
    };
    let cfg = args
        .penalty
        .config(beta0 * args.sigma, beta1 * args.sigma, &args.solver)?;
    let x = solve(&noisy, &cfg, None)?.x;
    write_matrix_csv(&x, &args.output)?;
    writeln!(out, "beta0\t{beta0}\nbeta1\t{beta1}").map_err(stdout_err)?;
    writeln!(out, "rse_noisy\t{:.6}", rse(&noisy, &clean)?).map_err(stdout_err)?;
    writeln!(out, "rse_denoised\t{:.6}", rse(&x, &clean)?).map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn prox(args: ProxArgs, out: &mut dyn Write) -> Result<i32> {
    let p = PenaltyParams::new(args.penalty, args.a)?;
    for &y in &args.values {
        let x = prox_scalar(y, args.lambda, p)?;
        writeln!(out, "{y}\t{x}").map_err(stdout_err)?;
    }
    Ok(EXIT_OK)
}

fn validate(args: ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    // the penalty family does not enter the conditions
    let kind = PenaltyKind::Rational;
    let cfg = SolverConfig::new(
        args.lambda0,
        args.lambda1,
        PenaltyParams { kind, a: args.a0 },
        PenaltyParams { kind, a: args.a1 },
    )
    .mu(args.mu);
    let outcome = validate_config(&cfg);
    writeln!(out, "a0*lambda0 + a1*lambda1\t{}", outcome.nonconvexity).map_err(stdout_err)?;
    writeln!(out, "convexity_margin\t{}", outcome.convexity_margin).map_err(stdout_err)?;
    writeln!(out, "mu_margin\t{}", outcome.mu_margin).map_err(stdout_err)?;
    if outcome.accepted() {
        writeln!(out, "accepted").map_err(stdout_err)?;
        Ok(EXIT_OK)
    } else {
        for v in &outcome.violations {
            writeln!(out, "violated\t{v}").map_err(stdout_err)?;
        }
        Ok(EXIT_REJECTED)
    }
}
