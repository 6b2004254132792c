use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use witsep::demo::{run_demo, DEMOS};
use witsep::ingest::{self, RunConfig, SEEDS_ENV};
use witsep::separation::Engine;

/// Exit status for command-line usage errors (0–2 are verdicts).
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "witsep",
    version,
    about = "Search for entanglement witnesses in measured expectation data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Separate a measured point from the separable set, or report membership.
    ///
    /// Exit status: 0 witness found, 1 member, 2 unverified, >2 error.
    Wsep(WsepArgs),
    /// Run a canned scenario.
    Demo {
        #[arg(value_parser = DEMOS)]
        name: String,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Ellipsoid,
}

#[derive(Args)]
struct OptArgs {
    /// Random seesaw starts per optimization.
    #[arg(long, env = SEEDS_ENV, default_value_t = 50)]
    seeds: usize,
    /// RNG seed for starts and verification samples.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Seesaw stopping tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Seesaw iteration cap per start.
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Run starts on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct WsepArgs {
    /// JSON expectation file.
    #[arg(long)]
    input: PathBuf,
    /// Weak separation tolerance.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, value_enum, default_value = "ellipsoid")]
    engine: EngineArg,
    /// Separable samples used to re-check a witness.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[command(flatten)]
    opt: OptArgs,
    /// Print the verdict as JSON.
    #[arg(long)]
    json: bool,
    /// Include wall-clock time in the output.
    #[arg(long)]
    timing: bool,
}

impl OptArgs {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            seeds: self.seeds,
            seed: self.seed,
            tolerance: self.tolerance,
            max_iters: self.max_iters,
            parallel: !self.sequential,
            ..RunConfig::default()
        }
    }
}

fn wsep(args: &WsepArgs) -> Result<u8, ingest::IngestError> {
    let cfg = RunConfig {
        delta: args.delta,
        engine: match args.engine {
            EngineArg::Ellipsoid => Engine::Ellipsoid,
        },
        verification_samples: args.samples,
        ..args.opt.run_config()
    };
    cfg.validate()?;
    let (basis, point) = ingest::ingest(&args.input, &cfg)?;
    let report = ingest::run_wsep(&cfg, &basis, &point)?;
    if args.json {
        let v = ingest::verdict_json(&report, &basis, args.timing);
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
    } else {
        print!("{}", ingest::verdict_text(&report, &basis));
        if args.timing {
            println!("  wall time {:.3}s", report.wall_time.as_secs_f64());
        }
    }
    Ok(ingest::verdict_exit_code(&report.verdict) as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Wsep(args) => match wsep(&args) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Demo { name, opt, json } => {
            let cfg = opt.run_config();
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            match run_demo(&name, &cfg.solver_config()) {
                Ok(r) if json => {
                    println!("{}", serde_json::to_string_pretty(&r.json).expect("serializable"));
                    ExitCode::SUCCESS
                }
                Ok(r) => {
                    print!("{}", r.text);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(13)
                }
            }
        }
    }
}
