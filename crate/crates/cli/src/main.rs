use clap::{Args, Parser, Subcommand};
use mimo_coverage_cli::{config, config_hash, load, run, validate, Format, RunConfig, Sweep, EXIT_INVALID, EXIT_NUMERIC, EXIT_OK};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Thread count for Monte Carlo and sweep evaluation.
const THREADS_ENV: &str = "MIMO_COVERAGE_THREADS";

#[derive(Parser)]
#[command(name = "mimo-coverage", version, about = "Coverage, outage and secrecy metrics of multi-antenna Poisson networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a config (and its sweep, if any).
    Run(RunArgs),
    /// Evaluate a config over a sweep given on the command line or in the config.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to sweep; `name.i` addresses element i of an array.
        #[arg(long, requires = "grid")]
        param: Option<String>,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "param")]
        grid: Option<Vec<f64>>,
    },
    /// Check a config without evaluating it.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Also require the config hash to equal this value.
        #[arg(long)]
        expect_hash: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Output path; `-` for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn load_or_report(path: &Path) -> Result<RunConfig, i32> {
    load(path).map_err(|d| {
        eprintln!("error: {d}");
        EXIT_INVALID
    })
}

fn report(diags: &[config::Diagnostic]) {
    for d in diags {
        eprintln!("error: {d}");
    }
}

fn execute(args: RunArgs, sweep: Option<Sweep>, require_sweep: bool) -> i32 {
    let mut cfg = match load_or_report(&args.config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(s) = sweep {
        cfg.sweep = Some(s);
    }
    if require_sweep && cfg.sweep.is_none() {
        eprintln!("error: sweep: no sweep in the config; pass --param and --grid");
        return EXIT_INVALID;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    let mut output = cfg.output.clone().unwrap_or_default();
    if let Some(p) = args.out {
        output.path = Some(p);
    }
    if let Some(f) = args.format {
        output.format = f;
    }
    let table = match run(&cfg) {
        Ok(t) => t,
        Err(d) => {
            report(&d);
            return EXIT_INVALID;
        }
    };
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match output.path.as_deref() {
        Some(p) if p.as_os_str() != "-" => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: writing {}: {e}", p.display());
                return EXIT_NUMERIC;
            }
        }
        _ => print!("{text}"),
    }
    let failed = table.rows.iter().filter(|r| r.flag.starts_with("error")).count();
    if failed > 0 {
        eprintln!("{failed} row(s) failed numerically; see the flag column");
        return EXIT_NUMERIC;
    }
    EXIT_OK
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID as u8 } else { EXIT_OK as u8 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    let code = match cli.command {
        Command::Run(args) => execute(args, None, false),
        Command::Sweep { run, param, grid } => {
            let sweep = param.zip(grid).map(|(param, grid)| Sweep { param, grid });
            execute(run, sweep, true)
        }
        Command::Validate { config, expect_hash } => match load_or_report(&config) {
            Err(code) => code,
            Ok(cfg) => {
                let diags = validate(&cfg);
                let hash = config_hash(&cfg);
                if !diags.is_empty() {
                    report(&diags);
                    EXIT_INVALID
                } else if expect_hash.as_deref().is_some_and(|h| !h.eq_ignore_ascii_case(&hash)) {
                    eprintln!("error: config hash {hash} does not match the expected value");
                    EXIT_INVALID
                } else {
                    println!("ok {hash}");
                    EXIT_OK
                }
            }
        },
    };
    ExitCode::from(code as u8)
}
