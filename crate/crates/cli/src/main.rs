use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orcon::analysis::{StationarityClass, Tolerances};
use orcon::homotopy::HomotopyConfig;
use orcon_cli::commands::{self, BenchOverrides, ProfileRequest};
use orcon_cli::config::{BenchmarkSpec, ExperimentConfig};
use orcon_cli::CliError;

#[derive(Parser)]
#[command(name = "orcon", version, about = "Or-constrained optimization: benchmarks, certificates and profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark experiment described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        starts: Option<usize>,
        /// Comma-separated method ids, e.g. relax-sc,relax-fb.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Certify a stationarity class (W, M or S) at a point read from a file.
    Verify {
        problem: String,
        point: PathBuf,
        class: String,
        /// Take the problem parameters from this config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        eps_act: f64,
        /// Absolute stationarity tolerance; 1e-6·max(1, ‖∇f‖) when omitted.
        #[arg(long)]
        eps_stat: Option<f64>,
    },
    /// Compare every gradient of a problem with finite differences.
    Gradcheck {
        problem: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recompute profile.csv and profile.svg from a results CSV.
    Profile {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Supplies the known optimum, δ and the feasibility tolerance.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        f_min: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
}

/// The problem named on the command line, with parameters from the config
/// when one is given.
fn problem_spec(id: &str, config: Option<&PathBuf>) -> Result<BenchmarkSpec, CliError> {
    let spec = BenchmarkSpec::from_id(id)?;
    match config {
        None => Ok(spec),
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.benchmark.id() != spec.id() {
                return Err(CliError::Input(format!(
                    "{} describes `{}`, not `{id}`",
                    path.display(),
                    cfg.benchmark.id()
                )));
            }
            Ok(cfg.benchmark)
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    match cli.command {
        Command::Bench { config, out: dir, seed, starts, methods } => {
            let cfg = BenchOverrides { out: dir, seed, starts, methods }.apply(ExperimentConfig::load(&config)?);
            commands::bench(&cfg, out)
        }
        Command::Verify { problem, point, class, config, eps_act, eps_stat } => {
            let class: StationarityClass = class.parse()?;
            let problem = problem_spec(&problem, config.as_ref())?.build()?;
            let x = commands::read_point(&point)?;
            let tol = Tolerances { eps_act, eps_stat };
            commands::verify(&problem, &x, class, &tol, out)
        }
        Command::Gradcheck { problem, config, probes, seed } => {
            let problem = problem_spec(&problem, config.as_ref())?.build()?;
            commands::gradcheck(&problem, probes, seed, out)
        }
        Command::Profile { results, out: dir, config, delta, f_min, methods } => {
            let cfg = config.as_deref().map(ExperimentConfig::load).transpose()?;
            let known = match (f_min, &cfg) {
                (Some(f), _) => Some(f),
                (None, Some(c)) => c.benchmark.build()?.known_optimum.map(|k| k.f_min),
                (None, None) => None,
            };
            let delta = delta.or(cfg.as_ref().map(ExperimentConfig::delta)).unwrap_or(1.0);
            if !(delta >= 0.0) {
                return Err(CliError::Input("delta must be nonnegative".into()));
            }
            let feas_tol = cfg.as_ref().map_or(HomotopyConfig::<f64>::default().or_tol, |c| c.homotopy.apply().or_tol);
            let default_out = results.parent().map(PathBuf::from).unwrap_or_default();
            let title = match &cfg {
                Some(c) => format!("{} (δ = {delta})", c.benchmark.id()),
                None => format!("profile (δ = {delta})"),
            };
            let req = ProfileRequest {
                results,
                out: dir.unwrap_or(default_out),
                methods: methods.or(cfg.and_then(|c| c.methods)),
                known,
                delta,
                feas_tol,
                title,
            };
            commands::profile(&req, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let result = run(cli, &mut lock);
    let _ = lock.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("orcon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
