//! Command-line front end: compose replacement schemes, verify coefficient
//! files against the constraint manifold, run Jacobian-rank completeness
//! checks, simulate trajectories, reduce noise bases, and inspect commutator
//! structure.
//!
//! Exit codes: 0 success, 2 constraint violation, 3 parse/IO error,
//! 4 numeric domain error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use cavity_noise::dynamics::{
    discretized_commutator_oracle, output_commutator_kernel, simulate_mean,
    simulate_photon_number, TrajectorySeries,
};
use cavity_noise::error::CavityError;
use cavity_noise::geometry::{model_gram, reduce_basis};
use cavity_noise::manifold::{completeness_check, manifold_dimension, ModelClass, SchemeFamily};
use cavity_noise::model::{constraint_residuals, CavityCoefficients};
use cavity_noise::{io as fileio, tol};

const EXIT_CONSTRAINT: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cavity-noise",
    version,
    about = "Model, verify, and simulate realistic cavities with unwanted noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compose a replacement-scheme file into a coefficient file.
    Compose(ComposeArgs),
    /// Check a coefficient file against the constraint manifold.
    Verify(VerifyArgs),
    /// Jacobian-rank completeness check of a scheme family.
    Rank(RankArgs),
    /// Simulate mean-field or photon-number trajectories to CSV.
    Simulate(SimulateArgs),
    /// Rewrite a coefficient file in a minimal noise basis.
    Reduce(ReduceArgs),
    /// Report analytic and discretized commutator structure.
    Commutator(CommutatorArgs),
}

#[derive(Args)]
struct ComposeArgs {
    /// Scheme file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Coefficient file to write.
    #[arg(long)]
    output: PathBuf,
    /// Verification tolerance for the residual report.
    #[arg(long, default_value_t = tol::DEFAULT_VERIFY_TOL)]
    tol: f64,
    /// Also write the JSON report to this path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Coefficient file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Verification tolerance.
    #[arg(long, default_value_t = tol::DEFAULT_VERIFY_TOL)]
    tol: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    /// Scheme family: complete | no_feedback | no_mirror_loss.
    #[arg(long)]
    family: String,
    /// Target manifold class (defaults to the family's own class).
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Central finite-difference step.
    #[arg(long, default_value_t = tol::DEFAULT_FD_STEP)]
    fd_step: f64,
    /// Relative singular-value threshold.
    #[arg(long, default_value_t = tol::DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Coefficient file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// End of the time grid (starts at 0).
    #[arg(long)]
    t_max: f64,
    /// Number of grid intervals.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Initial photon number (free-decay mode).
    #[arg(long, conflicts_with_all = ["a0_re", "a0_im", "drive_re", "drive_im"])]
    n0: Option<f64>,
    /// Initial coherent amplitude, real part (mean-field mode).
    #[arg(long)]
    a0_re: Option<f64>,
    /// Initial coherent amplitude, imaginary part.
    #[arg(long)]
    a0_im: Option<f64>,
    /// Constant drive on port 1, real part.
    #[arg(long)]
    drive_re: Option<f64>,
    /// Constant drive on port 1, imaginary part.
    #[arg(long)]
    drive_im: Option<f64>,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Coefficient file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Reduced coefficient file to write.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CommutatorArgs {
    /// Coefficient file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Oracle bin width.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Oracle horizon.
    #[arg(long, default_value_t = 5.0)]
    t_max: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    input: String,
    input_hash: String,
}

impl Provenance {
    fn new(path: &Path, bytes: &[u8]) -> Self {
        Self {
            tool: "cavity-noise",
            version: env!("CARGO_PKG_VERSION"),
            input: path.display().to_string(),
            input_hash: format!("{:016x}", fnv1a(bytes)),
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct ResidualReport {
    decay_residual: f64,
    unitarity_residuals: Vec<f64>,
    cross_residuals: Vec<ComplexOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inequality_slacks: Option<[f64; 4]>,
    max_residual: f64,
    tol: f64,
    passed: bool,
}

fn residual_report(c: &CavityCoefficients, tolerance: f64) -> ResidualReport {
    let r = constraint_residuals(c, tolerance);
    ResidualReport {
        decay_residual: r.decay_residual,
        unitarity_residuals: r.unitarity_residuals.clone(),
        cross_residuals: r.cross_residuals.iter().map(|z| ComplexOut::from(*z)).collect(),
        inequality_slacks: r.inequality_slacks,
        max_residual: r.max_residual(),
        tol: tolerance,
        passed: r.passed,
    }
}

fn main() -> ExitCode {
    // Usage problems are parse errors under the exit-code contract.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PARSE)
            };
        }
    };

    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &CavityError) -> u8 {
    match e {
        CavityError::Parse(_) | CavityError::Io(_) => EXIT_PARSE,
        _ => EXIT_NUMERIC,
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CavityError> {
    fs::read(path).map_err(|e| CavityError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CavityError> {
    fs::write(path, contents).map_err(|e| CavityError::Io(format!("{}: {e}", path.display())))
}

fn emit_report<T: Serialize>(report: &T, path: &Option<PathBuf>) -> Result<(), CavityError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CavityError::Io(format!("report serialization: {e}")))?;
    text.push('\n');
    print!("{text}");
    if let Some(p) = path {
        write_file(p, &text)?;
    }
    Ok(())
}

fn load_coefficients(path: &Path) -> Result<(CavityCoefficients, Provenance), CavityError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| CavityError::Parse(format!("{}: {e}", path.display())))?;
    let c = fileio::coefficients_from_json(&text)?;
    Ok((c, Provenance::new(path, &bytes)))
}

fn run(cli: Cli) -> Result<ExitCode, CavityError> {
    match cli.command {
        Command::Compose(args) => run_compose(args),
        Command::Verify(args) => run_verify(args),
        Command::Rank(args) => run_rank(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Reduce(args) => run_reduce(args),
        Command::Commutator(args) => run_commutator(args),
    }
}

#[derive(Serialize)]
struct ComposeReport {
    provenance: Provenance,
    output: String,
    gamma: f64,
    omega: f64,
    noise_dim: usize,
    ports: usize,
    residuals: ResidualReport,
}

fn run_compose(args: ComposeArgs) -> Result<ExitCode, CavityError> {
    let bytes = read_file(&args.input)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| CavityError::Parse(format!("{}: {e}", args.input.display())))?;
    let spec = fileio::scheme_from_json(&text)?;
    let model = spec.compose()?;
    write_file(&args.output, &fileio::coefficients_to_json(&model))?;
    let report = ComposeReport {
        provenance: Provenance::new(&args.input, &bytes),
        output: args.output.display().to_string(),
        gamma: model.gamma(),
        omega: model.omega(),
        noise_dim: model.noise_dim(),
        ports: model.port_count(),
        residuals: residual_report(&model, args.tol),
    };
    emit_report(&report, &args.report)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    provenance: Provenance,
    residuals: ResidualReport,
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, CavityError> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CavityError::InvalidRate {
            what: "tol",
            value: args.tol,
        });
    }
    let (model, provenance) = load_coefficients(&args.input)?;
    let report = VerifyReport {
        provenance,
        residuals: residual_report(&model, args.tol),
    };
    let passed = report.residuals.passed;
    emit_report(&report, &args.report)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CONSTRAINT)
    })
}

#[derive(Serialize)]
struct RankReport {
    family: String,
    target: String,
    samples: usize,
    seed: u64,
    fd_step: f64,
    rank_tol: f64,
    modal_rank: usize,
    expected: usize,
    modal_fraction: f64,
    complete: bool,
    expected_full_manifold: usize,
    complete_vs_full_manifold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_singular_value_gap: Option<f64>,
    singular_values: Vec<f64>,
    tool_version: &'static str,
}

fn run_rank(args: RankArgs) -> Result<ExitCode, CavityError> {
    let family: SchemeFamily = args.family.parse()?;
    let target: ModelClass = match &args.target {
        Some(t) => t.parse()?,
        None => family.own_class(),
    };
    let verdict = completeness_check(
        family,
        target,
        args.samples,
        args.seed,
        args.fd_step,
        args.rank_tol,
    )?;
    let full = manifold_dimension(ModelClass::NoisyOneSided);
    let report = RankReport {
        family: family.to_string(),
        target: target.to_string(),
        samples: args.samples,
        seed: args.seed,
        fd_step: args.fd_step,
        rank_tol: args.rank_tol,
        modal_rank: verdict.modal_rank,
        expected: verdict.expected,
        modal_fraction: verdict.modal_fraction,
        complete: verdict.complete,
        expected_full_manifold: full,
        complete_vs_full_manifold: verdict.modal_rank == full
            && verdict.modal_fraction >= cavity_noise::manifold::MODAL_FRACTION_REQUIRED,
        min_singular_value_gap: verdict.min_gap,
        singular_values: verdict.singular_values,
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    emit_report(&report, &args.report)?;
    Ok(ExitCode::SUCCESS)
}

/// CSV table with one row per grid point, full double precision.
fn trajectory_csv(traj: &TrajectorySeries) -> String {
    let mut out = String::from("t,re_mean,im_mean,photon_number");
    for p in 1..=traj.out_flux.len() {
        out.push_str(&format!(",out_flux_p{p}"));
    }
    out.push('\n');
    for i in 0..traj.times.len() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            traj.times[i], traj.mean_amp[i].re, traj.mean_amp[i].im, traj.photon_number[i]
        ));
        for flux in &traj.out_flux {
            out.push_str(&format!(",{:.16e}", flux[i]));
        }
        out.push('\n');
    }
    out
}

fn run_simulate(args: SimulateArgs) -> Result<ExitCode, CavityError> {
    let (model, _) = load_coefficients(&args.input)?;
    if !(args.t_max.is_finite() && args.t_max > 0.0) {
        return Err(CavityError::InvalidRate {
            what: "t_max",
            value: args.t_max,
        });
    }
    if args.steps == 0 {
        return Err(CavityError::InvalidGrid("steps must be positive".into()));
    }
    let times: Vec<f64> = (0..=args.steps)
        .map(|i| args.t_max * i as f64 / args.steps as f64)
        .collect();

    let mean_mode = args.a0_re.is_some()
        || args.a0_im.is_some()
        || args.drive_re.is_some()
        || args.drive_im.is_some();
    let traj = if let Some(n0) = args.n0 {
        simulate_photon_number(&model, n0, &times)?
    } else if mean_mode {
        let a0 = Complex64::new(args.a0_re.unwrap_or(0.0), args.a0_im.unwrap_or(0.0));
        let beta = Complex64::new(args.drive_re.unwrap_or(0.0), args.drive_im.unwrap_or(0.0));
        let mut drives = vec![vec![Complex64::from(0.0); times.len()]; model.port_count()];
        drives[0] = vec![beta; times.len()];
        simulate_mean(&model, &drives, a0, &times)?
    } else {
        return Err(CavityError::Parse(
            "simulate needs either --n0 or mean-field flags (--a0-re/--a0-im/--drive-re/--drive-im)"
                .into(),
        ));
    };

    let csv = trajectory_csv(&traj);
    match &args.output {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ReduceReport {
    provenance: Provenance,
    output: String,
    noise_dim_before: usize,
    noise_dim_after: usize,
    max_gram_change: f64,
}

fn run_reduce(args: ReduceArgs) -> Result<ExitCode, CavityError> {
    let (model, provenance) = load_coefficients(&args.input)?;
    let reduced = reduce_basis(&model);
    let g0 = model_gram(&model);
    let g1 = model_gram(&reduced);
    let mut max_change: f64 = 0.0;
    for i in 0..g0.dim() {
        for j in 0..g0.dim() {
            max_change = max_change.max((g0.matrix[(i, j)] - g1.matrix[(i, j)]).norm());
        }
    }
    write_file(&args.output, &fileio::coefficients_to_json(&reduced))?;
    let report = ReduceReport {
        provenance,
        output: args.output.display().to_string(),
        noise_dim_before: model.noise_dim(),
        noise_dim_after: reduced.noise_dim(),
        max_gram_change: max_change,
    };
    emit_report(&report, &args.report)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct PortKernelReport {
    port: usize,
    singular_coeff: f64,
    smooth_coeff: ComplexOut,
    transient_coeff: ComplexOut,
}

#[derive(Serialize)]
struct CommutatorReport {
    provenance: Provenance,
    analytic: Vec<PortKernelReport>,
    dt: f64,
    t_max: f64,
    bins: usize,
    max_cavity_deviation: f64,
    max_output_deviation: f64,
    max_offdiagonal_commutator: f64,
}

fn run_commutator(args: CommutatorArgs) -> Result<ExitCode, CavityError> {
    let (model, provenance) = load_coefficients(&args.input)?;
    let analytic = (0..model.port_count())
        .map(|p| {
            let k = output_commutator_kernel(&model, p);
            PortKernelReport {
                port: p + 1,
                singular_coeff: k.singular_coeff,
                smooth_coeff: k.smooth_coeff.into(),
                transient_coeff: k.transient_coeff.into(),
            }
        })
        .collect();
    let oracle = discretized_commutator_oracle(&model, args.dt, args.t_max)?;
    let report = CommutatorReport {
        provenance,
        analytic,
        dt: oracle.dt,
        t_max: oracle.t_max,
        bins: oracle.bins,
        max_cavity_deviation: oracle.max_cavity_deviation,
        max_output_deviation: oracle.max_output_deviation,
        max_offdiagonal_commutator: oracle.max_offdiagonal_commutator,
    };
    emit_report(&report, &args.report)?;
    Ok(ExitCode::SUCCESS)
}
