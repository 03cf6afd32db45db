use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use persuade_cli::commands::{self, GenSpec, LowerBoundSpec, Outcome};
use persuade_cli::sweep::Format;
use persuade_cli::{CliError, Family, Mode, SchemeName};
use persuade_core::benchmarks::STABLE_CAP;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "persuade", version, about = "Signaling schemes for network best-shot games")]
struct Cli {
    /// Seed for randomized constructions and Monte Carlo checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a generated graph as JSON.
    Gen {
        /// double-star, k-star-clique:<stars>, triangle-centers, clique-leaves, light-clique, or mix.
        family: String,
        /// Size parameter of the family.
        #[arg(long)]
        size: Option<usize>,
        /// Semicolon-separated components for `mix`, e.g. "path3;edge(1/2)".
        #[arg(long)]
        components: Option<String>,
    },
    /// Compute OPT, OPT^IR and OPT^stable.
    Bench {
        graph: PathBuf,
        #[arg(long, default_value_t = STABLE_CAP)]
        cap: usize,
    },
    /// Build and certify a signaling scheme.
    Construct {
        graph: PathBuf,
        #[arg(long)]
        scheme: String,
        /// Weight threshold for `ternary-minw`; defaults to the smallest edge weight.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Compute the slack report of a scheme.
    Verify {
        graph: PathBuf,
        scheme: PathBuf,
        /// Estimate by sampling with this many draws.
        #[arg(long)]
        mc: Option<usize>,
    },
    /// Check a dual lower-bound certificate over all grid labelings.
    Lowerbound {
        graph: PathBuf,
        #[arg(long)]
        grid: String,
        /// Test function values; searched over step functions when omitted.
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long = "C")]
        c_bound: Option<String>,
    },
    /// Run a construction over a graph family and fit the cost exponent.
    Sweep {
        #[arg(long)]
        family: String,
        /// Comma-separated sizes, or a range like 4..64.
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        scheme: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_one(text: &str) -> Result<persuade_core::BigRational, CliError> {
    persuade_core::scalar::parse_ratio(text).ok_or_else(|| CliError::Input(format!("not a number: `{text}`")))
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Input(format!("bad size list `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    text.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mode = match cli.mode {
        ModeArg::Float => Mode::Float,
        ModeArg::Rational => Mode::Rational,
    };
    match &cli.command {
        Command::Gen { family, size, components } => {
            let spec = if family == "mix" {
                GenSpec::Mix(components.clone().ok_or_else(|| CliError::Input("mix needs --components".into()))?)
            } else {
                let size = size.ok_or_else(|| CliError::Input("missing --size".into()))?;
                GenSpec::Family { family: family.parse()?, size }
            };
            commands::gen(&spec, mode)
        }
        Command::Bench { graph, cap } => commands::bench(&commands::parse_graph(&read(graph)?)?, *cap, mode),
        Command::Construct { graph, scheme, delta } => {
            let g = commands::parse_graph(&read(graph)?)?;
            let delta = delta.as_deref().map(parse_one).transpose()?;
            commands::construct(&g, scheme.parse()?, cli.seed, delta.as_ref(), mode)
        }
        Command::Verify { graph, scheme, mc } => {
            let g = commands::parse_graph(&read(graph)?)?;
            commands::verify(&g, &read(scheme)?, *mc, cli.seed, mode)
        }
        Command::Lowerbound { graph, grid, f, c_bound } => {
            let g = commands::parse_graph(&read(graph)?)?;
            let spec = LowerBoundSpec {
                grid: commands::parse_number_list(grid)?,
                f: f.as_deref().map(|p| read(p).and_then(|t| commands::parse_test_function(&t))).transpose()?,
                c_bound: c_bound.as_deref().map(parse_one).transpose()?,
            };
            commands::lowerbound(&g, &spec, mode)
        }
        Command::Sweep { family, sizes, scheme, format } => {
            let family: Family = family.parse()?;
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            let name: SchemeName = scheme.parse()?;
            commands::sweep(&family, &parse_sizes(sizes)?, name, cli.seed, mode, format)
        }
    }
}

fn emit(cli: &Cli, body: &[u8]) -> anyhow::Result<()> {
    use std::io::Write;
    match &cli.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(body).context("writing stdout"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome.body) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            match outcome.failure {
                Some(reason) => {
                    eprintln!("verification failed: {reason}");
                    ExitCode::from(4)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
