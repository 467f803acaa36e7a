//! `vocalcrypt`: protect speech recordings, check them, and attack them.

mod commands;
mod config;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::FileConfig;
use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "vocalcrypt",
    version,
    about = "Masking-threshold pseudo-timbre protection for speech"
)]
pub struct Cli {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct PayloadArgs {
    /// 64-bit payload key in hex.
    #[arg(long)]
    pub key: Option<String>,
    /// `keyed` (default) or `decoy`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Decoy recording whose DCT signs become the payload (decoy mode).
    #[arg(long, value_name = "WAV")]
    pub decoy: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct EmbedArgs {
    /// Payload bands, e.g. `1-7` or `1,3,5`.
    #[arg(long)]
    pub bands: Option<String>,
    /// Noise-to-mask limit in dB (negative).
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub nmr_limit: Option<f64>,
    /// Skip bands whose threshold is within this many dB of the absolute floor.
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub skip_floor: Option<f64>,
    /// `clamp` (default) or `reject` for output samples outside [-1, 1].
    #[arg(long)]
    pub clip: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed the payload and write the protected WAV plus its sidecar.
    Protect {
        input: PathBuf,
        output: PathBuf,
        /// Sidecar path; defaults to OUTPUT with `.sidecar` appended.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[command(flatten)]
        payload: PayloadArgs,
        #[command(flatten)]
        embed: EmbedArgs,
    },
    /// Read the payload back and print the bit error rate per band.
    Verify {
        input: PathBuf,
        sidecar: PathBuf,
        #[command(flatten)]
        payload: PayloadArgs,
        /// Warn when the overall BER exceeds this.
        #[arg(long)]
        max_ber: Option<f64>,
    },
    /// Write the masking analysis of every frame and band as a text table.
    Analyze {
        input: PathBuf,
        /// Report path, `-` for standard output.
        report: Option<PathBuf>,
        #[command(flatten)]
        embed: EmbedArgs,
    },
    /// Apply an attack: `resample:HZ`, `denoise[:BETA[:FLOOR]]`, `noise:SNR[:SEED]`, `requantize:BITS`.
    Attack {
        input: PathBuf,
        output: PathBuf,
        spec: Option<String>,
        /// Seed for `noise` when the spec gives none.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare two clips: SNR, segmental SNR, LSD, per-band NMR and, with a sidecar, BER.
    Metrics {
        original: PathBuf,
        processed: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[command(flatten)]
        payload: PayloadArgs,
        /// Report path; standard output when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time protection of every WAV in a directory.
    Bench {
        dir: PathBuf,
        /// Worker threads; 1 measures a single core.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        key: Option<String>,
        #[command(flatten)]
        embed: EmbedArgs,
    },
}

fn run() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return Err(Failure::Usage(e.to_string().trim_end().to_string())),
        Err(e) => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
    };
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    commands::dispatch(cli.command, &file)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
