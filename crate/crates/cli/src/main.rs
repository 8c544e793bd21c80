use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hyperfrob::geometry::ProblemFile;
use hyperfrob::pipeline::{run, Mode, RunConfig, CACHE_DIR_ENV, DEFAULT_MEMORY_LIMIT};
use hyperfrob::zeta::DEFAULT_COUNT_CAP;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Plan,
    Basis,
    Matrix,
    Bounds,
    Zeta,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Plan => Mode::Plan,
            ModeArg::Basis => Mode::Basis,
            ModeArg::Matrix => Mode::Matrix,
            ModeArg::Bounds => Mode::Bounds,
            ModeArg::Zeta => Mode::Zeta,
            ModeArg::Full => Mode::Full,
        }
    }
}

/// Frobenius matrices and Picard-number bounds for smooth projective hypersurfaces.
#[derive(Debug, Parser)]
#[command(name = "hyperfrob", version)]
struct Cli {
    /// Problem file (TOML).
    problem: PathBuf,

    #[arg(long, value_enum, default_value = "full")]
    mode: ModeArg,

    /// Target precision r (matrix known modulo p^r).
    #[arg(long = "precision", short = 'r')]
    precision: Option<u64>,

    /// Override the series truncation s; output is stamped heuristic.
    #[arg(long)]
    prescreen: Option<u64>,

    /// Worker threads (0 = all available).
    #[arg(long, default_value_t = 0)]
    workers: usize,

    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,

    /// Count points over F_{p^i} for i = 1..=imax.
    #[arg(long, default_value_t = 3)]
    imax: u32,

    /// Maximum number of candidate points per extension.
    #[arg(long, default_value_t = DEFAULT_COUNT_CAP)]
    count_cap: u64,

    /// Memory limit in bytes for the matrix stage.
    #[arg(long, default_value_t = DEFAULT_MEMORY_LIMIT)]
    memory_limit: u64,

    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Write the matrix in text form here.
    #[arg(long)]
    matrix_out: Option<PathBuf>,

    /// Print the JSON report on stdout instead of the summary.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let problem = match ProblemFile::read(&cli.problem) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("hyperfrob: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let config = RunConfig {
        mode: cli.mode.into(),
        precision: cli.precision,
        prescreen: cli.prescreen,
        workers: cli.workers,
        cache_dir: cli.cache_dir,
        i_max: cli.imax,
        count_cap: cli.count_cap,
        memory_limit: cli.memory_limit,
        inline_matrix: cli.matrix_out.is_none(),
        report_path: cli.report,
        matrix_out: cli.matrix_out,
    };
    let out = run(&config, &problem);
    if cli.json {
        print!("{}", out.report.to_json());
    } else {
        print!("{}", out.report.summary());
    }
    if let Some(e) = &out.report.error {
        eprintln!("hyperfrob: {}", e.message);
    }
    ExitCode::from(out.exit_code as u8)
}
