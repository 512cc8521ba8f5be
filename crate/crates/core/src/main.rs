use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use povindex::io::{
    cmd_estimate, cmd_simulate, write_simulation_outputs, AnalysisConfig, CiSelection, IndexSelection,
    MethodSelection, OutputFormat, SimulationFile, BUNDLED_GRID_CONFIG,
};
use povindex::simulation::{threads_from_env, CellKind};
use povindex::{PovError, Result};

#[derive(Parser)]
#[command(name = "povindex", version, about = "Sen and SST poverty index estimation and inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate indices and intervals from a CSV income column.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Column header, or 0-based column index.
        #[arg(long, default_value = "income")]
        column: String,
        #[arg(long)]
        poverty_line: f64,
        #[arg(long, value_enum, default_value = "both")]
        index: IndexSelection,
        #[arg(long, value_enum, default_value = "all")]
        method: MethodSelection,
        #[arg(long, value_enum, default_value = "none")]
        ci: CiSelection,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long, default_value = ",")]
        delimiter: String,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Omit the generation time from JSON reports.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Run the Monte Carlo grid and write table CSVs plus report.csv/report.json.
    Simulate {
        /// TOML configuration; defaults to the bundled `paper_tables` grid.
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, default_value = "simulation-output")]
        out_dir: PathBuf,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn delimiter_byte(s: &str) -> Result<u8> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(PovError::Config(format!("delimiter must be a single ASCII character, got {s:?}"))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate {
            input,
            column,
            poverty_line,
            index,
            method,
            ci,
            alpha,
            format,
            delimiter,
            output,
            no_timestamp,
        } => {
            let config = AnalysisConfig {
                input,
                column,
                delimiter: delimiter_byte(&delimiter)?,
                poverty_line,
                index,
                method,
                ci,
                alpha,
                format,
                timestamp: !no_timestamp && format == OutputFormat::Json,
            };
            let body = cmd_estimate(&config)?.render(format)?;
            match output {
                Some(path) => fs::write(&path, body).map_err(|e| PovError::Io(format!("{}: {e}", path.display())))?,
                None => emit(&body),
            }
        }
        Command::Simulate { config, reps, seed, z, out_dir } => {
            let mut file = match config.as_deref() {
                None | Some("paper_tables") => SimulationFile::parse(BUNDLED_GRID_CONFIG)?,
                Some(path) => SimulationFile::load(path.as_ref())?,
            };
            if let Some(r) = reps {
                file.reps = r;
            }
            if let Some(s) = seed {
                file.seed = s;
            }
            if let Some(z) = z {
                file.z = z;
            }
            if file.threads.is_none() {
                file.threads = threads_from_env();
            }
            file.monte_carlo().validate()?;
            let report = cmd_simulate(&file)?;
            let written = write_simulation_outputs(&report, &out_dir)?;
            let mut table = format!(
                "{:<32} {:>4} {:>4} {:<9} {:>11} {:>11} {:>9} {:>10} {:>5} {:>9}\n",
                "distribution", "n", "idx", "method", "bias", "mse", "coverage", "avg_len", "fail", "mc_se"
            );
            let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
            for c in &report.cells {
                let (fail, a, b, cov, len) = match c.kind {
                    CellKind::Estimator => ("-".to_string(), opt(c.bias), opt(c.mse), "-".into(), "-".into()),
                    CellKind::Interval => (c.failures.to_string(), "-".into(), "-".into(), opt(c.coverage), opt(c.avg_length)),
                };
                table += &format!(
                    "{:<32} {:>4} {:>4} {:<9} {:>11} {:>11} {:>9} {:>10} {:>5} {:>9.6}\n",
                    c.distribution.label(),
                    c.n,
                    c.index.as_str(),
                    c.method,
                    a,
                    b,
                    cov,
                    len,
                    fail,
                    c.mc_se
                );
            }
            emit(&table);
            eprintln!("wrote {} files to {}", written.len(), out_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are configuration errors (exit 4); help and version exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
