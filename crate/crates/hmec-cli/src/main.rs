//! `hmec` — encrypt, decrypt and analyze files with the hybrid
//! message-embedded chaotic cipher.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hmec::cipher::Mode;
use hmec_cli::commands::{self, AnalysisTest, AnalyzeOptions, KeygenOptions};
use hmec_cli::CliError;

#[derive(Parser)]
#[command(
    name = "hmec",
    version,
    about = "Hybrid message-embedded chaotic cipher: file encryption and cryptanalysis",
    after_help = "Exit codes: 2 usage, 3 key file, 4 I/O, 5 cipher input rejected, \
                  6 malformed container, 7 invalid parameter."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Lenient,
}

impl From<ModeArg> for Mode {
    fn from(arg: ModeArg) -> Self {
        match arg {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Lenient => Mode::Lenient,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt a file into a ciphertext container
    Encrypt {
        /// Key file path
        #[arg(long)]
        key: PathBuf,
        /// Input file
        #[arg(long = "in")]
        input: PathBuf,
        /// Output container
        #[arg(long = "out")]
        output: PathBuf,
        /// Override the key file's embedding mode
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Decrypt a ciphertext container
    Decrypt {
        /// Key file path
        #[arg(long)]
        key: PathBuf,
        /// Input container
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Generate a key file; unspecified fields are drawn at random
    Keygen {
        /// Output path (stdout when omitted)
        #[arg(long = "out")]
        output: Option<PathBuf>,
        /// Logistic parameter in [3.57, 4.0], 9 decimal places
        #[arg(long)]
        r: Option<f64>,
        /// Initial state in (0, 1)
        #[arg(long)]
        x0: Option<f64>,
        /// Pre-mix iterations per symbol, in [1, 1000]
        #[arg(long)]
        n1: Option<u32>,
        /// Post-mix iterations per symbol, in [1, 1000]
        #[arg(long)]
        n2: Option<u32>,
        /// Hill matrix entries, row-major: a,b,c,d (determinant must be odd)
        #[arg(long)]
        hill: Option<String>,
        /// Embedding mode recorded in the key file
        #[arg(long, value_enum, default_value = "lenient")]
        mode: ModeArg,
        /// RNG seed for reproducible keys
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export logistic-map orbit samples as CSV (`k,x`)
    Orbit {
        /// Map parameter
        #[arg(long)]
        r: f64,
        /// Start state in (0, 1)
        #[arg(long)]
        x0: f64,
        /// Number of samples, including x0
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Output path (stdout when omitted)
        #[arg(long = "out")]
        output: Option<PathBuf>,
        /// Allow r outside [3.57, 4.0] to plot non-chaotic regimes
        #[arg(long)]
        override_region: bool,
    },
    /// Run cryptanalysis tests and write a `test,subject,metric,value` CSV
    Analyze {
        /// Key file path
        #[arg(long)]
        key: PathBuf,
        /// Directory of plaintext files (a synthetic 20-text corpus is used
        /// when omitted)
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Comma-separated subset of: sensitivity,keysens,identifiability,kpa,keyspace
        #[arg(long)]
        tests: Option<String>,
        /// Report path (stdout when omitted)
        #[arg(long = "out")]
        output: Option<PathBuf>,
        /// Where to write the attack's candidate list (`rank,r,matched_bytes`)
        #[arg(long)]
        kpa_out: Option<PathBuf>,
        /// Grid lower bound (requires --grid-max and --grid-step)
        #[arg(long)]
        grid_min: Option<f64>,
        /// Grid upper bound
        #[arg(long)]
        grid_max: Option<f64>,
        /// Grid step
        #[arg(long)]
        grid_step: Option<f64>,
        /// Random plaintext bit flips per corpus text
        #[arg(long, default_value_t = 50)]
        flips: usize,
        /// Key increment for the key-sensitivity test
        #[arg(long, default_value_t = 1e-9)]
        delta_r: f64,
        /// Output bytes compared by the identifiability scan
        #[arg(long, default_value_t = 64)]
        output_bytes: usize,
        /// Output-equality tolerance; 0 compares ciphertext bytes exactly,
        /// a positive value compares raw keystream states
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
        /// Known plaintext prefix length for the attack
        #[arg(long, default_value_t = 5)]
        prefix_len: usize,
        /// Seed for corpus synthesis and flip positions
        #[arg(long, default_value_t = 0x484d_4543)]
        seed: u64,
    },
}

fn parse_hill(text: &str) -> Result<[[u8; 2]; 2], CliError> {
    let entries: Vec<u8> = text
        .split(',')
        .map(|part| part.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--hill expects four integers, got `{text}`")))?;
    if entries.len() != 4 {
        return Err(CliError::Usage(format!(
            "--hill expects four integers, got {}",
            entries.len()
        )));
    }
    Ok([[entries[0], entries[1]], [entries[2], entries[3]]])
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encrypt {
            key,
            input,
            output,
            mode,
        } => commands::encrypt_file(&key, &input, &output, mode.map(Mode::from)),
        Command::Decrypt { key, input, output } => commands::decrypt_file(&key, &input, &output),
        Command::Keygen {
            output,
            r,
            x0,
            n1,
            n2,
            hill,
            mode,
            seed,
        } => {
            let opts = KeygenOptions {
                r,
                x0,
                n1,
                n2,
                hill: hill.as_deref().map(parse_hill).transpose()?,
                mode: mode.into(),
                seed,
            };
            commands::keygen(&opts, output.as_deref())
        }
        Command::Orbit {
            r,
            x0,
            n,
            output,
            override_region,
        } => commands::orbit(r, x0, n, output.as_deref(), override_region),
        Command::Analyze {
            key,
            corpus,
            tests,
            output,
            kpa_out,
            grid_min,
            grid_max,
            grid_step,
            flips,
            delta_r,
            output_bytes,
            tolerance,
            prefix_len,
            seed,
        } => {
            let grid = match (grid_min, grid_max, grid_step) {
                (None, None, None) => None,
                (Some(lo), Some(hi), Some(step)) => Some((lo, hi, step)),
                _ => {
                    return Err(CliError::Usage(
                        "--grid-min, --grid-max and --grid-step must be given together".into(),
                    ))
                }
            };
            let mut opts = AnalyzeOptions::new(key);
            opts.corpus_dir = corpus;
            if let Some(list) = tests {
                opts.tests = AnalysisTest::parse_list(&list)?;
            }
            opts.out = output;
            opts.kpa_out = kpa_out;
            opts.grid = grid;
            opts.flips = flips;
            opts.delta_r = delta_r;
            opts.output_bytes = output_bytes;
            opts.tolerance = tolerance;
            opts.prefix_len = prefix_len;
            opts.seed = seed;
            commands::analyze(&opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
