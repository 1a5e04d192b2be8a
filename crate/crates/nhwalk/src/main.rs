use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nhwalk::{execute, summarize, ConfigInput, Experiment, OutputTable, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Command {
    HnSpectrum,
    HnProfile,
    HnKappaEdges,
    WalkEvolve,
    WalkSpectrum,
    TmKappa,
    /// Condense a table produced by one of the experiments.
    Summarize,
}

/// Non-Hermitian delocalization experiments.
///
/// Results are written as CSV (to --out, or stdout) with the resolved configuration echoed in
/// a `#` header. Worker threads: NHWALK_THREADS (default: all processors).
#[derive(Parser, Debug)]
#[command(name = "nhwalk", version)]
struct Cli {
    command: Command,
    /// Table to condense (summarize only)
    table: Option<PathBuf>,
    /// TOML configuration file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// number of sites
    #[arg(long = "L")]
    sites: Option<usize>,
    /// single non-Hermiticity parameter
    #[arg(long, conflicts_with = "g_list", allow_negative_numbers = true)]
    g: Option<f64>,
    /// strictly increasing comma-separated list of g values
    #[arg(long = "g-list", value_delimiter = ',', allow_negative_numbers = true)]
    g_list: Option<Vec<f64>>,
    /// disorder half-width: V_x uniform on [-W, W]
    #[arg(long = "W")]
    disorder: Option<f64>,
    /// walk time steps
    #[arg(long = "T")]
    steps: Option<usize>,
    /// transfer-matrix product length
    #[arg(long = "N")]
    products: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// periodic or open
    #[arg(long)]
    boundary: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self.command {
            Command::HnSpectrum => Experiment::HnSpectrum,
            Command::HnProfile => Experiment::HnProfile,
            Command::HnKappaEdges => Experiment::HnKappaEdges,
            Command::WalkEvolve => Experiment::WalkEvolve,
            Command::WalkSpectrum => Experiment::WalkSpectrum,
            Command::TmKappa => Experiment::TmKappa,
            Command::Summarize => return None,
        })
    }

    fn overrides(&self) -> ConfigInput {
        ConfigInput {
            experiment: self.experiment(),
            sites: self.sites,
            g: self.g,
            g_list: self.g_list.clone(),
            disorder: self.disorder,
            boundary: self.boundary.clone(),
            steps: self.steps,
            products: self.products,
            seed: self.seed,
            realizations: self.realizations,
            out: self.out.as_ref().map(|p| p.display().to_string()),
            ..ConfigInput::default()
        }
    }
}

fn run_experiment(cli: &Cli) -> Result<(), RunError> {
    let file = match &cli.config {
        Some(path) => ConfigInput::from_toml(&std::fs::read_to_string(path)?)?,
        None => ConfigInput::default(),
    };
    let config = file.overlay(cli.overrides()).resolve()?;
    let table = execute(&config)?;
    if config.out.is_none() {
        print!("{}", table.to_csv());
    }
    Ok(())
}

fn run_summary(cli: &Cli) -> Result<(), RunError> {
    let Some(path) = &cli.table else {
        return Err(nhwalk::ValidationError::new("table", "summarize needs a table file").into());
    };
    let table = OutputTable::parse(&std::fs::read_to_string(path)?)?;
    print!("{}", summarize(&table)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Summarize => run_summary(&cli),
        _ if cli.table.is_some() => Err(nhwalk::ValidationError::new(
            "table",
            "positional table argument is only for summarize",
        )
        .into()),
        _ => run_experiment(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nhwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
