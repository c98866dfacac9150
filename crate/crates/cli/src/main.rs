//! `fica`: finite-field linear ICA from the command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 capacity exceeded,
//! 3 verification failure.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "fica", version, about = "Linear ICA over prime fields")]
pub struct Cli {
    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted (except for `compress`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sum of the d smallest combination entropies.
    Bound(InputArgs),
    /// Greedy linear ICA.
    Glica {
        #[command(flatten)]
        input: InputArgs,
        /// Write the unmixing matrix W here.
        #[arg(long)]
        mixing_matrix: Option<PathBuf>,
    },
    /// Block-iterative greedy linear ICA.
    Bloglica {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        blocks: BlockArgs,
        /// Write the composed unmixing matrix W here.
        #[arg(long)]
        mixing_matrix: Option<PathBuf>,
    },
    /// Non-linear baseline: largest probabilities to the lowest-entropy words.
    Orderperm(InputArgs),
    /// Generate a sample file.
    Gen {
        #[command(subcommand)]
        source: GenSource,
    },
    /// Compress a sample file into a self-describing blob.
    Compress {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = CodecMode::Glica)]
        mode: CodecMode,
        #[command(flatten)]
        blocks: BlockArgs,
    },
    /// Restore the sample file from a blob.
    Decompress {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Bits per symbol of every coding scheme on a sample file.
    RateReport {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        blocks: BlockArgs,
        /// Charge the Huffman dictionary as a canonical code instead of
        /// `n0` raw words.
        #[arg(long)]
        realistic_dictionary: bool,
        /// Also report the untransformed and block-transformed codecs.
        #[arg(long)]
        all: bool,
    },
    /// Run a registered experiment and emit its rows.
    Experiment {
        name: String,
        /// Dimension(s): `8`, `4,8,12` or `2..10`.
        #[arg(long)]
        d: Option<String>,
        /// Field order(s).
        #[arg(long)]
        q: Option<String>,
        /// Sample count(s).
        #[arg(long)]
        n: Option<String>,
        /// Block count(s).
        #[arg(long)]
        blocks: Option<String>,
        /// Any other parameter, as `key=value`.
        #[arg(short = 'P', long = "param", value_parser = parse_key_value)]
        params: Vec<(String, String)>,
    },
    /// Run the acceptance criteria; exits with 3 if any fails.
    Verify {
        /// Only these criteria (repeatable); all by default.
        #[arg(long)]
        criterion: Vec<u8>,
    },
}

/// Input file, given positionally or as `--in FILE`; `-` reads stdin.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Sample file (`q d n` header) or pmf file (`q d` header).
    #[arg(value_name = "INPUT")]
    positional: Option<PathBuf>,
    #[arg(long = "in", value_name = "FILE")]
    flag: Option<PathBuf>,
}

impl InputArgs {
    pub fn path(&self) -> &std::path::Path {
        self.positional
            .as_deref()
            .or(self.flag.as_deref())
            .expect("clap requires one input")
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct BlockArgs {
    #[arg(long, default_value_t = 2)]
    pub blocks: usize,
    #[arg(long, default_value_t = 20)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CodecMode {
    None,
    Glica,
    Bloglica,
}

#[derive(Subcommand, Debug)]
pub enum GenSource {
    /// Zipf draws over q^d symbols under a random symbol-to-word map.
    Zipf {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.01)]
        s: f64,
    },
    /// Beta-binomial draws over 2^d symbols under a random map.
    Betabin {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        a: f64,
        #[arg(long, default_value_t = 3.0)]
        b: f64,
    },
    /// Independent bits, optionally mixed by a random invertible matrix.
    Bernoulli {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// One probability for every component, or d comma-separated ones.
        #[arg(long, default_value = "0.4")]
        p: String,
        /// Mix the sources with a random non-monomial invertible matrix.
        #[arg(long)]
        mix: bool,
        /// Write the mixing matrix here (implies --mix).
        #[arg(long)]
        mixing_matrix: Option<PathBuf>,
    },
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<fica::Error>() {
        Some(fica::Error::Capacity(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
