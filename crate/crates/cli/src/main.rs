use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use squid_harmonics_cli::commands::{run, Command};
use squid_harmonics_cli::config::{FitBlock, OdrBlock, OutputBlock, RunConfig};
use squid_harmonics_cli::envelope::{envelope_path, write_atomically, ResultEnvelope, TableInfo};
use squid_harmonics_cli::CliError;

#[derive(Parser)]
#[command(
    name = "squidharm",
    version,
    about = "Spectra, fits and observables of SQUIDs with higher Josephson harmonics"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone)]
struct Common {
    /// Run config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output table (CSV); the envelope goes to <out>.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Args, Clone)]
struct WithData {
    #[command(flatten)]
    common: Common,
    /// Input table; overrides the path in the config.
    #[arg(long)]
    data: Option<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Transition frequencies over a flux and offset-charge grid.
    Spectrum(Common),
    /// Four-parameter fit of a transition dataset.
    Fit(WithData),
    /// Errors-in-variables line fit of E_J2/E_J1 against E_J1.
    Odr(WithData),
    /// Synthetic transition dataset.
    Synth(Common),
    /// Supercurrent extrema and rectification efficiency.
    Diode(Common),
    /// Full circuit against the reduced single-mode model.
    Multimode(Common),
    /// Resonator pull over a flux grid.
    Dispersive(Common),
}

fn execute(sub: Sub) -> Result<(), CliError> {
    let (command, common, data) = match sub {
        Sub::Spectrum(c) => (Command::Spectrum, c, None),
        Sub::Fit(w) => (Command::Fit, w.common, w.data),
        Sub::Odr(w) => (Command::Odr, w.common, w.data),
        Sub::Synth(c) => (Command::Synth, c, None),
        Sub::Diode(c) => (Command::Diode, c, None),
        Sub::Multimode(c) => (Command::Multimode, c, None),
        Sub::Dispersive(c) => (Command::Dispersive, c, None),
    };
    let mut config = RunConfig::load(&common.config.to_string_lossy())?;
    if let Some(seed) = common.seed {
        config.seed = Some(seed);
    }
    if let Some(out) = &common.out {
        config.output = Some(OutputBlock {
            path: Some(out.to_string_lossy().into_owned()),
        });
    }
    if let Some(data) = data {
        match command {
            Command::Fit => config.fit.get_or_insert_with(FitBlock::default).data = Some(data),
            Command::Odr => config.odr.get_or_insert_with(OdrBlock::default).data = Some(data),
            _ => unreachable!(),
        }
    }
    let out = config
        .output
        .as_ref()
        .and_then(|o| o.path.clone())
        .map(PathBuf::from)
        .ok_or_else(|| CliError::config("no output path: pass --out or set output.path"))?;
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }

    let start = Instant::now();
    let output = run(command, &config)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    if common.verbose {
        eprintln!("{}: {} rows in {wall_time_s:.3} s", command.name(), output.rows);
        for note in &output.notes {
            eprintln!("note: {note}");
        }
    }
    let envelope = ResultEnvelope {
        command: command.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.to_toml(),
        wall_time_s,
        table: TableInfo {
            path: out.to_string_lossy().into_owned(),
            header: output.header,
            rows: output.rows,
        },
        payload: output.payload,
        notes: output.notes,
    };
    let env_path = envelope_path(&out);
    let json = envelope.to_json()?;
    write_atomically(&[(&out, &output.table), (&env_path, &json)])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
