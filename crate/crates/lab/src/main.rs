use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use isodrast_lab::records::write_records;
use isodrast_lab::{run_check_suite, run_experiment, ConfigError, Experiment, ExperimentConfig, Format, ResultRecord};

#[derive(Parser)]
#[command(name = "isodrast", version, about = "Invariant checks and experiments on weighted isotropic loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config; the bundled default is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for record and series files. Records go to stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Record encoding.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Adds wall-clock `runtime_ms` to every record (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite.
    Check,
    /// Run one configured experiment.
    Run {
        #[arg(value_enum)]
        experiment: Experiment,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn load(path: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default_config()),
    }
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn emit(cli: &Cli, stem: &str, records: &[ResultRecord], series: &[isodrast_lab::Series]) -> io::Result<()> {
    let format = Format::from(cli.format);
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_records(records, format, create(dir, &format!("{stem}.{}", format.extension()))?)?;
            for s in series {
                s.write(create(dir, &format!("{}.csv", s.name))?)?;
            }
        }
        None => write_records(records, format, io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let seed = cli.seed.unwrap_or(config.seed);
    let (stem, records, series) = match cli.command {
        Command::Check => ("checks", run_check_suite(&config, seed, cli.timing), vec![]),
        Command::Run { experiment } => match run_experiment(&config, experiment, cli.timing) {
            Ok(out) => (experiment.name(), out.records, out.series),
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
    };
    if let Err(e) = emit(&cli, stem, &records, &series) {
        eprintln!("cannot write output: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let failed: Vec<&ResultRecord> = records.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAIL {}: residual {} > tolerance {}{}", r.name, r.residual, r.tolerance,
            r.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default());
    }
    eprintln!("{}: {} records, {} failed", stem, records.len(), failed.len());
    let _ = io::stderr().flush();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
