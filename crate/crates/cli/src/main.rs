use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scriptswap::commands::{self, parse_profile, parse_regimes, SimSelection};
use scriptswap::verify::{self, Battery, Check};
use scriptswap::{exit, CliError, Format, Overrides, Result, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "scriptswap", version, about = "Solve and simulate the two-student script-swapping exam game")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; the built-in reference game is used when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output format (default: csv for sweep, table otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    n: Option<u64>,

    /// Seed for simulation and the verification draws.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Parameter swept by `sweep`.
    #[arg(long, global = true, value_name = "NAME")]
    axis: Option<String>,

    /// Sweep grid as start:stop:steps.
    #[arg(long, global = true, value_name = "A:B:STEPS")]
    grid: Option<String>,

    /// Comma-separated sweep outputs.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    outputs: Option<Vec<String>>,

    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Payoff matrix, equilibria, thresholds and proposition verdicts.
    Solve,
    /// Detection thresholds computed three ways.
    Threshold {
        /// Also locate ability-ratio transitions with θ_B fixed at this value.
        #[arg(long, value_name = "THETA_B")]
        ratio: Option<f64>,
    },
    /// Evaluate outputs along one parameter axis.
    Sweep,
    /// Monte Carlo estimates of every cell against the closed forms.
    Simulate {
        /// Comma-separated profiles (PP, PNP, NPP, NPNP); all by default.
        #[arg(long, value_name = "LIST")]
        profile: Option<String>,
        /// swap, traditional or both.
        #[arg(long, default_value = "both")]
        regime: String,
    },
    /// Welfare of each profile under both regimes.
    Welfare,
    /// Run the verification battery; exits 1 if any check fails.
    Verify {
        /// Comma-separated subset of checks.
        #[arg(long, value_name = "LIST")]
        checks: Option<String>,
        /// Print the available checks and exit.
        #[arg(long)]
        list: bool,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io { path: path.clone(), source: e }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Io { path: PathBuf::from("<stdout>"), source: e })
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Input(String::from("--threads must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Input(format!("cannot start thread pool: {}", e)))?;
    }
    let overrides = Overrides {
        n: cli.n,
        seed: cli.seed,
        axis: cli.axis.clone(),
        grid: cli.grid.clone(),
        outputs: cli.outputs.clone(),
    };
    let config = RunConfig::load_or_default(cli.config.as_deref())?.apply(&overrides)?;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Sweep => Format::Csv,
        _ => Format::Table,
    });
    let out = cli.out.as_ref();
    match cli.command {
        Command::Solve => emit(&commands::solve(&config, format)?, out)?,
        Command::Threshold { ratio } => emit(&commands::threshold(&config, ratio, format)?, out)?,
        Command::Sweep => emit(&commands::sweep(&config, format)?, out)?,
        Command::Simulate { profile, regime } => {
            let mut selection = SimSelection { regimes: parse_regimes(&regime)?, ..SimSelection::default() };
            if let Some(list) = profile {
                selection.profiles = list.split(',').map(parse_profile).collect::<Result<_>>()?;
            }
            emit(&commands::simulate(&config, &selection, format)?, out)?;
        }
        Command::Welfare => emit(&commands::welfare_cmd(&config, format)?, out)?,
        Command::Verify { checks, list } => {
            if list {
                let names: Vec<String> = Check::ALL
                    .iter()
                    .map(|c| match c.criterion() {
                        Some(k) => format!("{} ({})", c.name(), k),
                        None => String::from(c.name()),
                    })
                    .collect();
                emit(&format!("{}\n", names.join("\n")), out)?;
                return Ok(exit::OK);
            }
            let checks = match checks {
                Some(list) => Check::parse_list(&list)?,
                None => Check::ALL.to_vec(),
            };
            let battery = Battery::new(config);
            let outcomes = battery.run_all(&checks);
            emit(&verify::render(&outcomes, battery.seed, format)?, out)?;
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(exit::VERIFY_FAILED);
            }
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::BAD_INPUT as u8 } else { exit::OK as u8 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let mut message = format!("error: {}", e);
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                if !message.contains(&s.to_string()) {
                    message.push_str(&format!(": {}", s));
                }
                source = s.source();
            }
            eprintln!("{}", message);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
