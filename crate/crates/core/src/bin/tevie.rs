use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tevie::cli::{run, ExitStatus, Mode, RunManifest, SolverFlags};
use tevie::solver::Preconditioner;

#[derive(Debug, Parser)]
#[command(name = "tevie", version, about = "2D TE volume integral equation solver")]
struct Args {
    /// Scene configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long)]
    restart: Option<usize>,
    /// none | symbol_diagonal
    #[arg(long)]
    precond: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, hide = true, default_value_t = 0.0)]
    perturb_kernel: f64,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(ExitStatus::ConfigError.code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(ExitStatus::ConfigError.code() as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if let Ok(v) = std::env::var("TEVIE_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    return fail(format!("cannot set up {n} threads: {e}"));
                }
            }
            _ => return fail(format!("TEVIE_THREADS must be a positive integer, got {v:?}")),
        }
    }
    let precond = match args
        .precond
        .as_deref()
        .map(str::parse::<Preconditioner>)
        .transpose()
    {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let manifest = RunManifest {
        config: args.config,
        mode: args.mode,
        out_dir: args.out,
        solver: SolverFlags {
            tol: args.tol,
            maxit: args.maxit,
            restart: args.restart,
            precond,
        },
        seed: args.seed,
        kernel_perturbation: args.perturb_kernel,
    };
    let outcome = run(&manifest);
    print!("{}", outcome.summary.render());
    if let Some(d) = &outcome.diagnostic {
        eprintln!("error: {d}");
    }
    ExitCode::from(outcome.status.code() as u8)
}
