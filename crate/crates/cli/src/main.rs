use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fdaa_cli::curves::{write_curves, write_hints};
use fdaa_cli::experiment::{read_summary, write_run_dir};
use fdaa_cli::{run_experiments, replay_record, synthesize, write_method_suite, CliError, ExperimentConfig, ReplayOptions, ReplayReport, SuiteSpec, SynthSpec};
use fdaa_core::assessment::FmlVariant;
use fdaa_core::go::{parse_sgf, serialize_sgf, Color};
use fdaa_core::pipeline::CommentarySource;
use fdaa_engine::{EngineConfig, EngineKind, StubSettings};
use fdaa_service::{AppState, ServiceConfig};

#[derive(Parser)]
#[command(name = "fdaa", version, about = "Fuzzy game-situation assessment for Go records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Stub,
    Gtp,
    Http,
}

#[derive(clap::Args)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "stub")]
    engine: Engine,
    /// Engine program and arguments for `--engine gtp`.
    #[arg(long = "engine-cmd", num_args = 1.., allow_hyphen_values = true)]
    engine_cmd: Vec<String>,
    /// Endpoint URL for `--engine http`.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 20000)]
    simulations: u32,
    /// Side the stub's win rates drift toward.
    #[arg(long)]
    bias: Option<Color>,
    /// Ply from which the stub reads the position as balanced.
    #[arg(long)]
    settle_after: Option<u32>,
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            kind: match self.engine {
                Engine::Stub => EngineKind::Stub,
                Engine::Gtp => EngineKind::GtpSubprocess,
                Engine::Http => EngineKind::RemoteHttp,
            },
            endpoint: self.endpoint.clone(),
            command: self.engine_cmd.clone(),
            simulation_setting: self.simulations,
            timeout_ms: self.timeout_ms,
            seed: self.seed,
            bias: self.bias,
            settle_after: self.settle_after,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Replay one SGF record and print its commentary.
    Replay {
        sgf: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value = "2")]
        fml: FmlVariant,
        /// Verdict method behind the commentary.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        method: u8,
        /// Directory for the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment suite described by a TOML file.
    Experiment {
        config: PathBuf,
        #[arg(long, default_value = "fdaa-run")]
        out: PathBuf,
    },
    /// Print the accuracy table of a finished experiment.
    Report { run_dir: PathBuf },
    /// Export per-move curves and hint aggregates from a replay report.
    Curves {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic record from stub self-play.
    Synth {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 120)]
        moves: u32,
        #[arg(long, default_value_t = 20000)]
        simulations: u32,
        #[arg(long)]
        bias: Option<Color>,
        #[arg(long)]
        settle_after: Option<u32>,
        /// Result to record, such as `B+R`.
        #[arg(long)]
        result: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a stub game suite and the experiment file that compares the
    /// two verdict methods on it.
    SynthSuite {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the live assessment service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Directory for per-game event logs.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Replay {
            sgf,
            engine,
            fml,
            method,
            out,
        } => {
            let record = parse_sgf(&read_input(&sgf)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", sgf.display())))?;
            let name = sgf
                .file_stem()
                .map_or("game".into(), |s| s.to_string_lossy().into_owned());
            let options = ReplayOptions {
                engine: engine.config(),
                fml,
                source: if method == 1 {
                    CommentarySource::Method1
                } else {
                    CommentarySource::Method2
                },
            };
            let report = replay_record(&name, &record, &options)?;
            if let Some(dir) = out {
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                write_output(&dir.join(format!("{name}.report.json")), &json)?;
            }
            match &report.report.commentary_text {
                Some(text) => print!("{text}"),
                None => println!("{name}: too few moves for a commentary"),
            }
            if let Some(e) = report.error {
                return Err(CliError::Engine(format!("partial report: {e}")));
            }
        }
        Command::Experiment { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let (summary, reports) = run_experiments(&config)?;
            write_run_dir(&out, &summary, &reports)?;
            print!("{}", summary.render());
        }
        Command::Report { run_dir } => {
            print!("{}", read_summary(&run_dir)?.render());
        }
        Command::Curves { report, out } => {
            let text = read_input(&report)?;
            let report: ReplayReport = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", report.display())))?;
            fs::create_dir_all(&out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
            let rows = write_curves(&report.report, &out.join("curves.csv"))?;
            write_hints(&out, &[&report])?;
            println!("{rows} rows written to {}", out.join("curves.csv").display());
        }
        Command::Synth {
            seed,
            moves,
            simulations,
            bias,
            settle_after,
            result,
            out,
        } => {
            let settings = StubSettings {
                seed,
                simulation_setting: simulations,
                bias,
                settle_after,
            };
            let spec = SynthSpec {
                result,
                ..SynthSpec::new(settings, moves)
            };
            write_output(&out, &serialize_sgf(&synthesize(&spec)))?;
        }
        Command::SynthSuite { out } => {
            let config =
                write_method_suite(&out.join("games"), &SuiteSpec::default())?.relative_to(&out);
            let path = out.join("suite.toml");
            write_output(&path, &config.to_toml())?;
            println!("{}", path.display());
        }
        Command::Serve { addr, log_dir } => {
            if let Some(dir) = &log_dir {
                fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Engine(e.to_string()))?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .map_err(|e| CliError::Usage(format!("cannot bind {addr}: {e}")))?;
                tracing::info!(%addr, "serving");
                let state = AppState::new(ServiceConfig {
                    log_dir,
                    ..ServiceConfig::default()
                });
                fdaa_service::serve(listener, state)
                    .await
                    .map_err(|e| CliError::Engine(e.to_string()))
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
