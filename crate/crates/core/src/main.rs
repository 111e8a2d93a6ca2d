//! Command-line front end: verify, sweep, compare, estimate.
//!
//! Exit codes: 0 success, 1 for physics/validation/property failures and
//! I/O problems, 2 for malformed invocations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use urlab::bounds::BoundComparison;
use urlab::estimator::{self, MeasurementPlan};
use urlab::moments;
use urlab::output;
use urlab::sweeps;
use urlab::verify::{self, CaseConfig};
use urlab::{BlochState, Error, PauliObservable};

#[derive(Parser)]
#[command(
    name = "urlab",
    version,
    about = "Qubit uncertainty laboratory: deviation-sum bounds, tightness sweeps, mixedness estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized self-check of the bound identities over seeded draws
    Verify(VerifyArgs),
    /// Evaluate a parameter grid and write it to a data file
    Sweep(SweepArgs),
    /// Every applicable bound and tightness ratio for one configuration
    Compare(CompareArgs),
    /// Estimate state mixedness from measured or simulated counts
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random configurations to draw
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the offending configuration on failure
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-evaluate a previously dumped configuration instead of drawing
    #[arg(long, conflicts_with_all = ["trials", "seed"])]
    replay: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[command(subcommand)]
    grid: SweepGridCmd,
}

#[derive(Subcommand)]
enum SweepGridCmd {
    /// Direction grid (theta, phi) at fixed Bloch radius, (x, y, z) triple
    Fig1 {
        /// Bloch radius of every grid state
        #[arg(long, default_value_t = DEFAULT_FIG1_GAMMA)]
        gamma: f64,
        /// Grid points per axis
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: FileFormat,
    },
    /// Mixedness sweep at a fixed direction, (x, y, z) triple
    Fig2 {
        /// Polar angle of the Bloch direction
        #[arg(long, default_value_t = 3.0 * std::f64::consts::FRAC_PI_4)]
        theta: f64,
        /// Azimuthal angle of the Bloch direction
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        phi: f64,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: FileFormat,
    },
    /// Pure-family sweep with closed-form curves, (x, y) pair
    Fig3 {
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: FileFormat,
    },
}

/// sqrt(0.8): the radius where every grid state has mixedness 0.1.
const DEFAULT_FIG1_GAMMA: f64 = 0.8944271909999159;

#[derive(Args)]
struct CompareArgs {
    /// Observable, repeated: sx|sy|sz|id or "a1,a2,a3,a4"
    #[arg(long = "obs", required = true)]
    obs: Vec<String>,
    /// State as "p1,p2,p3"
    #[arg(long)]
    state: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: FileFormat,
}

#[derive(Args)]
struct EstimateArgs {
    /// The two measured observables (exactly two --obs), unless --counts-file
    #[arg(long = "obs")]
    obs: Vec<String>,
    /// State to simulate, "p1,p2,p3"
    #[arg(long)]
    state: Option<String>,
    /// Shots per measurement setting for the simulation
    #[arg(long, default_value_t = 1_000_000)]
    shots: u64,
    /// RNG seed for sampling and bootstrap
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bootstrap resamples behind the interval
    #[arg(long, default_value_t = 1000)]
    resamples: u32,
    /// Estimate from previously exported counts instead of simulating
    #[arg(long, conflicts_with_all = ["state", "shots", "obs"])]
    counts_file: Option<PathBuf>,
    /// Write the simulated counts for later replay
    #[arg(long)]
    export_counts: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: FileFormat,
}

enum AppError {
    Lib(Error),
    Io(std::io::Error),
    /// Invocation problems clap cannot catch.
    Usage(String),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError::Lib(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Lib(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "{e}"),
            AppError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            // Bad invocations and unparsable inputs.
            AppError::Usage(_) => 2,
            AppError::Lib(
                Error::Parse { .. }
                | Error::TooFewSteps { .. }
                | Error::InvalidParameter { .. }
                | Error::TooFewObservables { .. }
                | Error::NonFinite { .. },
            ) => 2,
            // Physically invalid inputs, bad data files, I/O.
            AppError::Lib(_) | AppError::Io(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Estimate(args) => cmd_estimate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, AppError> {
    std::fs::read_to_string(path).map_err(AppError::from)
}

fn parse_observables(tokens: &[String]) -> Result<Vec<PauliObservable>, AppError> {
    tokens
        .iter()
        .map(|t| t.parse::<PauliObservable>().map_err(AppError::from))
        .collect()
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, AppError> {
    if let Some(path) = &args.replay {
        let case: CaseConfig =
            serde_json::from_str(&read_file(path)?).map_err(|e| Error::Parse {
                what: "replay case",
                input: path.display().to_string(),
                reason: e.to_string(),
            })?;
        let residuals = verify::evaluate_case(&case)?;
        let mut clean = true;
        for ((name, violation), tolerance) in residuals.named().into_iter().zip([
            verify::EQUALITY_TOL,
            verify::ORACLE_TOL,
            verify::DOMINANCE_TOL,
            verify::COMPETITOR_SLACK,
            0.0,
        ]) {
            if violation == f64::NEG_INFINITY {
                println!("{name}: not applicable to this case");
                continue;
            }
            let ok = violation <= tolerance;
            clean &= ok;
            println!(
                "{name}: residual {} (tolerance {:.1e}) {}",
                output::fmt_f64(violation),
                tolerance,
                if ok { "PASS" } else { "FAIL" }
            );
        }
        return Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }

    if args.trials == 0 {
        return Err(AppError::Usage("--trials must be at least 1".into()));
    }
    let report = verify::run(args.trials, args.seed);
    for p in &report.properties {
        println!(
            "{}: worst {} over {} checks (tolerance {:.1e}) {}",
            p.name,
            output::fmt_f64(p.worst),
            p.checks,
            p.tolerance,
            if p.passed() { "PASS" } else { "FAIL" }
        );
    }
    if report.passed() {
        println!("verify: all properties hold over {} trials (seed {})", report.trials, report.seed);
        Ok(ExitCode::SUCCESS)
    } else {
        let failing = report.first_failure().expect("a property failed");
        let case = failing.worst_case.as_ref().expect("failing property has a case");
        let path = args
            .out
            .unwrap_or_else(|| PathBuf::from("verify-failure.json"));
        output::write_atomic(&path, &output::to_json(case))?;
        eprintln!(
            "verify: {} breached its tolerance; offending case written to {} (replay with --replay)",
            failing.name,
            path.display()
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, AppError> {
    let (grid, out, format) = match args.grid {
        SweepGridCmd::Fig1 {
            gamma,
            steps,
            out,
            format,
        } => (sweeps::sweep_fig1(gamma, steps, steps)?, out, format),
        SweepGridCmd::Fig2 {
            theta,
            phi,
            steps,
            out,
            format,
        } => (sweeps::sweep_fig2(theta, phi, steps)?, out, format),
        SweepGridCmd::Fig3 { steps, out, format } => (sweeps::sweep_fig3(steps)?, out, format),
    };
    let contents = match format {
        FileFormat::Csv => output::sweep_to_csv(&grid),
        FileFormat::Json => output::sweep_to_json(&grid),
    };
    output::write_atomic(&out, &contents)?;
    println!(
        "sweep {}: wrote {} grid points to {}",
        grid.kind.name(),
        grid.points.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, AppError> {
    let obs = parse_observables(&args.obs)?;
    let state: BlochState = args.state.parse()?;
    let cmp = BoundComparison::evaluate(&obs, &state)?;
    let ratios = sweeps::tightness(&obs, &state);
    print!("{}", output::comparison_table(&cmp, &ratios));
    if let Some(out) = &args.out {
        let contents = match args.format {
            FileFormat::Csv => output::comparison_to_csv(&cmp, &ratios),
            FileFormat::Json => output::comparison_to_json(&cmp, &ratios),
        };
        output::write_atomic(out, &contents)?;
        println!("wrote comparison to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_estimate(args: EstimateArgs) -> Result<ExitCode, AppError> {
    if args.resamples == 0 {
        return Err(AppError::Usage("--resamples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    let report = if let Some(path) = &args.counts_file {
        if args.export_counts.is_some() {
            return Err(AppError::Usage(
                "--export-counts only applies when simulating (give --state, not --counts-file)"
                    .into(),
            ));
        }
        let counts = output::counts_from_csv(&read_file(path)?)?;
        estimator::estimate_from_counts(&counts, args.resamples, &mut rng)?
    } else {
        let state_text = args.state.as_ref().ok_or_else(|| {
            AppError::Usage("estimate needs either --state (simulation) or --counts-file".into())
        })?;
        if args.obs.len() != 2 {
            return Err(AppError::Usage(format!(
                "estimate needs exactly two --obs settings, got {}",
                args.obs.len()
            )));
        }
        if args.shots < 100 {
            return Err(AppError::Usage(
                "--shots must be at least 100 for a usable estimate".into(),
            ));
        }
        let obs = parse_observables(&args.obs)?;
        let state: BlochState = state_text.parse()?;
        let plan = MeasurementPlan::new(&obs[0], &obs[1])?;
        let counts = estimator::collect_counts(&plan, &state, args.shots, &mut rng)?;
        if let Some(path) = &args.export_counts {
            output::write_atomic(path, &output::counts_to_csv(&counts))?;
            println!("wrote counts to {}", path.display());
        }
        let mut report = estimator::estimate_from_counts(&counts, args.resamples, &mut rng)?;
        report.true_m = Some(moments::mixedness(&state));
        report
    };

    print!("{}", output::report_text(&report));
    if let Some(out) = &args.out {
        let contents = match args.format {
            FileFormat::Csv => output::report_to_csv(&report),
            FileFormat::Json => output::report_to_json(&report),
        };
        output::write_atomic(out, &contents)?;
        println!("wrote report to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}
