use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crn_cli::config::Solver;
use crn_cli::{
    execute, resolve_seeds, write_output, CliError, Command, Format, RunManifest, SolverOverrides,
};
use crn_core::sim::Policy;

#[derive(Parser)]
#[command(
    name = "crn",
    version,
    about = "Cognitive radio relay selection, spectrum sharing and network simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Relay selection on seeded Rayleigh channel draws.
    SelectRelay(Common),
    /// Solve the spectrum-sharing problem once per seed.
    Share {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run the network simulator once per seed and policy.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Policies to run (default: the one in the config).
        #[arg(long, value_delimiter = ',')]
        policy: Option<Vec<Policy>>,
        /// Write every packet event as line-delimited JSON.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Mean sharing optimum over a grid of link counts and SINR floors.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_delimiter = ',', value_name = "LIST")]
        links: Option<Vec<usize>>,
        #[arg(
            long = "gamma-db",
            value_delimiter = ',',
            value_name = "LIST",
            allow_hyphen_values = true
        )]
        gamma_db: Option<Vec<f64>>,
    },
    /// Paired-seed policy comparison across node counts.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "clsss,static-random")]
        policy: Vec<Policy>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Overrides for the scenario file's solver settings.
#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_name = "brute-force|pso")]
    solver: Option<Solver>,
    #[arg(long, value_name = "N")]
    swarm_size: Option<usize>,
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    #[arg(long, value_name = "W")]
    inertia: Option<f64>,
    #[arg(long, value_name = "C1")]
    cognitive: Option<f64>,
    #[arg(long, value_name = "C2")]
    social: Option<f64>,
    #[arg(long, value_name = "VMAX")]
    velocity_clamp: Option<f64>,
    /// Fitness deducted per violated SINR constraint.
    #[arg(long, value_name = "P")]
    penalty: Option<f64>,
}

impl SolverArgs {
    fn overrides(&self) -> SolverOverrides {
        SolverOverrides {
            solver: self.solver,
            swarm_size: self.swarm_size,
            iterations: self.iterations,
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            velocity_clamp: self.velocity_clamp,
            penalty: self.penalty,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Use seeds 0..N.
    #[arg(long, value_name = "N", conflicts_with = "seed_list")]
    seeds: Option<u64>,
    /// Use exactly these seeds.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    seed_list: Option<Vec<u64>>,
    /// Output file (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

fn manifest(cli: Cli) -> Result<RunManifest, CliError> {
    let (command, common) = match &cli.command {
        Cmd::SelectRelay(c) => (Command::SelectRelay, c),
        Cmd::Share { common, .. } => (Command::Share, common),
        Cmd::Simulate { common, .. } => (Command::Simulate, common),
        Cmd::Sweep { common, .. } => (Command::Sweep, common),
        Cmd::Compare { common, .. } => (Command::Compare, common),
    };
    let mut m = RunManifest::new(
        command,
        resolve_seeds(common.seeds, common.seed_list.clone())?,
    )?;
    m.config_path = common.config.clone();
    m.output_path = common.out.clone();
    m.format = match common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    match cli.command {
        Cmd::Simulate { policy, trace, .. } => {
            m.policies = policy;
            m.trace_path = trace;
        }
        Cmd::Share { solver, .. } => m.solver = solver.overrides(),
        Cmd::Sweep {
            links,
            gamma_db,
            solver,
            ..
        } => {
            m.solver = solver.overrides();
            m.links = links;
            m.gamma_db = gamma_db;
        }
        Cmd::Compare { policy, .. } => m.policies = Some(policy),
        Cmd::SelectRelay(_) => {}
    }
    Ok(m)
}

fn fail(err: CliError) -> ExitCode {
    eprintln!("{}", err.record_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(CliError::Usage(
                e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""),
            ))
        }
    };
    let result = manifest(cli).and_then(|m| {
        let table = execute(&m)?;
        write_output(&table, &m)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
