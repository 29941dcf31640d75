use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use stefan_hhl::report::{Backend, OutputFormat, SCHEMA};
use stefan_hhl::run::{exit_code, run, tolerance_from_env, RunConfig, TOLERANCE_ENV};

#[derive(Parser)]
#[command(
    name = "stefan-hhl",
    version,
    about = "Inverse Stefan problems: heat-series assembly, classical and HHL solves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one or more problem files and emit reports.
    Solve(SolveArgs),
    /// Print the JSON schema of the report format.
    Schema,
}

#[derive(Args)]
#[command(after_help = format!(
    "Exit codes: 0 verified, 1 error, 2 residual check failed.\n\
     The residual tolerance (default 1e-6) is read from {TOLERANCE_ENV}."
))]
struct SolveArgs {
    /// Problem-definition files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "classical")]
    backend: Backend,
    /// Clock register size n_l; required for the hhl and both backends.
    #[arg(long)]
    clock_qubits: Option<usize>,
    /// Override the series truncation N.
    #[arg(long)]
    truncation: Option<usize>,
    /// Override the collocation count k (two-phase problems).
    #[arg(long)]
    collocation: Option<usize>,
    /// Comma-separated probe times for residual checks.
    #[arg(long, value_delimiter = ',')]
    probe_times: Option<Vec<f64>>,
    /// Report path for a single file; a directory when several are given.
    /// Reports go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Number of problem files solved concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory receiving `<stem>.matrix.txt` for each problem.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Directory receiving `<stem>.state.txt` (final HHL statevector).
    #[arg(long)]
    dump_state: Option<PathBuf>,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned())
}

fn configs(args: &SolveArgs, tolerance: f64) -> Vec<RunConfig> {
    let many = args.files.len() > 1;
    args.files
        .iter()
        .map(|file| {
            let name = stem(file);
            let output_path = args.out.as_ref().map(|out| {
                if many {
                    out.join(format!("{name}.{}", args.format.extension()))
                } else {
                    out.clone()
                }
            });
            RunConfig {
                problem_file: file.clone(),
                backend: args.backend,
                clock_qubits: args.clock_qubits,
                truncation: args.truncation,
                collocation_count: args.collocation,
                probe_times: args.probe_times.clone(),
                output_path,
                output_format: args.format,
                tolerance,
                dump_matrix: args.dump_matrix.as_ref().map(|d| d.join(format!("{name}.matrix.txt"))),
                dump_state: args.dump_state.as_ref().map(|d| d.join(format!("{name}.state.txt"))),
            }
        })
        .collect()
}

fn solve(args: SolveArgs) -> i32 {
    let tolerance = match tolerance_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if args.files.len() > 1 {
        if let Some(dir) = &args.out {
            if let Err(e) = std::fs::create_dir_all(dir) {
                eprintln!("error: io: {}: {e}", dir.display());
                return 1;
            }
        }
    }
    for dir in [&args.dump_matrix, &args.dump_state].into_iter().flatten() {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: io: {}: {e}", dir.display());
            return 1;
        }
    }
    let cfgs = configs(&args, tolerance);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let results: Vec<_> = pool.install(|| cfgs.par_iter().map(run).collect());

    let mut code = 0;
    for (cfg, result) in cfgs.iter().zip(&results) {
        match result {
            Ok(outcome) => {
                if cfg.output_path.is_none() {
                    print!("{}", outcome.rendered);
                }
                if !outcome.report.verified {
                    eprintln!(
                        "{}: residual check failed (boundary {:.3e}, pde {:.3e}, tolerance {:e})",
                        cfg.problem_file.display(),
                        outcome.report.boundary_max_residual,
                        outcome.report.pde_max_residual,
                        cfg.tolerance
                    );
                }
            }
            Err(e) => eprintln!("error: {}: {e}", cfg.problem_file.display()),
        }
        code = match (code, exit_code(result)) {
            (1, _) | (_, 1) => 1,
            (a, b) => a.max(b),
        };
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Schema => {
            print!("{SCHEMA}");
            0
        }
    };
    ExitCode::from(code as u8)
}
