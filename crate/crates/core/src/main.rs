use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qtrace::record::Tolerances;
use qtrace::suite::{eval_functional, format_value, run_suite, EvalParams, ReportFormat, Suite, TrialConfig};
use qtrace::Error;

#[derive(Parser)]
#[command(name = "qtrace", version, about = "Deformed matrix trace functionals and their verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print a report.
    Run {
        /// Suite name, or `all` (repeatable).
        #[arg(long = "suite", default_value = "all")]
        suites: Vec<String>,
        /// Matrix dimension (repeatable).
        #[arg(long = "dim")]
        dims: Vec<usize>,
        /// Deformation parameter (repeatable).
        #[arg(long = "q", allow_negative_numbers = true)]
        qs: Vec<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "tol-eq")]
        tol_eq: Option<f64>,
        #[arg(long = "tol-dir")]
        tol_dir: Option<f64>,
        #[arg(long = "tol-opt")]
        tol_opt: Option<f64>,
        /// Output file (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// `json` or `csv`.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Evaluate one functional on matrices read from JSON files.
    Eval {
        /// tsallis, relative_functional, phi, gibbs_objective or tsallis_entropy
        name: String,
        files: Vec<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        /// Contraction file (repeatable, one per term for phi).
        #[arg(long = "h")]
        h: Vec<PathBuf>,
    },
}

fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Run { suites, dims, qs, trials, seed, tol_eq, tol_dir, tol_opt, out, format } => {
            let format: ReportFormat = format.parse()?;
            let defaults = TrialConfig::default();
            let t = defaults.tolerances;
            let config = TrialConfig {
                suites: Suite::parse_list(&suites)?,
                dims: if dims.is_empty() { defaults.dims } else { dims },
                q_grid: if qs.is_empty() { defaults.q_grid } else { qs },
                trials: trials.unwrap_or(defaults.trials),
                seed: seed.unwrap_or(defaults.seed),
                tolerances: Tolerances {
                    eq_tol_scale: tol_eq.unwrap_or(t.eq_tol_scale),
                    dir_slack: tol_dir.unwrap_or(t.dir_slack),
                    opt_tol_rel: tol_opt.unwrap_or(t.opt_tol_rel),
                },
            };
            let report = run_suite(&config)?;
            let text = report.render(format);
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                }
                None => print!("{text}"),
            }
            for r in report.records.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {} q={} n={} worst_violation={:e}", r.theorem, r.q, r.n, r.worst_violation);
            }
            Ok(report.all_passed())
        }
        Command::Eval { name, files, p, q, h } => {
            let value = eval_functional(&name, &files, &EvalParams { p, q, h })?;
            println!("{}", format_value(value));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
