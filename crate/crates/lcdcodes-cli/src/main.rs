//! Batch command-line front end for the `lcdcodes` library: parse plain-text
//! code files, run complementary-dual and complementary-pair checks, and emit
//! count, classification, catalog-verification and masking-demo reports.
//!
//! Exit codes follow the batch convention: `0` on success, `1` when a
//! check-style command reaches a negative verdict, `2` on any input error
//! (unknown ring, malformed file, exceeded enumeration budget, bad flags).
//! Reports written under `--out` are deterministic — no timestamps, fixed
//! field order — so repeated runs are byte-identical.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcdcodes::enumerate::Variant;

mod commands;
mod input;
mod output;

/// Top-level argument grammar.
#[derive(Parser)]
#[command(
    name = "lcdcodes",
    version,
    about = "Complementary-dual codes and complementary pairs over mixed chain-ring alphabets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Inner-product flavour, a shorthand for the Frobenius exponent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// The untwisted product (h = 0).
    Euclidean,
    /// The conjugate-twisted product (h = w/2, needs even automorphism order).
    Hermitian,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Euclidean => Variant::Euclidean,
            VariantArg::Hermitian => Variant::Hermitian,
        }
    }
}

/// Ambient-shape selection for the census-style commands.
#[derive(Args)]
pub struct ShapeArgs {
    /// Chain ring of the first block: Z4, Z8, Z9, Z27, F4u2, F8u2 or F9u2.
    #[arg(long)]
    pub ring: String,

    /// Quotient depth: the second block lives over R/γ^s R.
    #[arg(long, default_value_t = 1)]
    pub s: usize,

    /// The two block lengths.
    #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
    pub blocks: Vec<usize>,
}

/// One code input: a plain-text code file or a bundled fixture.
#[derive(Args)]
pub struct CodeInput {
    /// Code file (header lines `ring`/`s`/`blocks`, then `|`-separated rows).
    pub file: Option<PathBuf>,

    /// Bundled fixture key (for example `example43`) instead of a file.
    #[arg(long, conflicts_with = "file")]
    pub builtin: Option<String>,
}

/// A pair of code inputs generating the two member codes.
#[derive(Args)]
pub struct PairInput {
    /// The two code files generating C and D.
    #[arg(num_args = 0..=2)]
    pub files: Vec<PathBuf>,

    /// Bundled pair key (`example61` or `example62`) instead of files.
    #[arg(long, conflicts_with = "files")]
    pub builtin: Option<String>,
}

/// Report destination and worker-pool flags shared by every command.
#[derive(Args)]
pub struct OutputArgs {
    /// Directory for machine-readable reports (JSON, CSV, transcripts).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads for the parallel sweeps; defaults to all cores.
    /// Results are independent of this setting.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Decide whether a code is complementary dual for a Galois inner product.
    Check {
        #[command(flatten)]
        input: CodeInput,

        /// Frobenius exponent of the inner product.
        #[arg(long, default_value_t = 0, conflicts_with = "variant")]
        h: usize,

        /// Resolve the exponent from a named product instead of `--h`.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Print a generator matrix of the dual code, in code-file syntax.
    Dual {
        #[command(flatten)]
        input: CodeInput,

        /// Frobenius exponent of the inner product.
        #[arg(long, default_value_t = 0)]
        h: usize,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Report a code's type, size and exact minimum distances.
    Distance {
        #[command(flatten)]
        input: CodeInput,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Compare closed-form, census and printed-reference counts of
    /// complementary-dual codes over one ambient shape.
    Counts {
        #[command(flatten)]
        shape: ShapeArgs,

        /// Which inner product to count for.
        #[arg(long, value_enum, default_value_t = VariantArg::Euclidean)]
        variant: VariantArg,

        /// Largest ambient-module size the census is allowed to walk.
        #[arg(long)]
        budget: Option<u64>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// List every non-zero complementary-dual code of one ambient shape.
    Enumerate {
        #[command(flatten)]
        shape: ShapeArgs,

        /// Frobenius exponent of the inner product.
        #[arg(long, default_value_t = 0, conflicts_with = "variant")]
        h: usize,

        /// Resolve the exponent from a named product instead of `--h`.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,

        /// Largest ambient-module size the census is allowed to walk.
        #[arg(long)]
        budget: Option<u64>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Group the complementary-dual codes of one ambient shape into
    /// monomial-equivalence classes.
    Classify {
        #[command(flatten)]
        shape: ShapeArgs,

        /// Frobenius exponent of the inner product.
        #[arg(long, default_value_t = 0, conflicts_with = "variant")]
        h: usize,

        /// Resolve the exponent from a named product instead of `--h`.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,

        /// Largest ambient-module size the census is allowed to walk.
        #[arg(long)]
        budget: Option<u64>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Verify a classified catalog: every entry complementary dual, every
    /// claimed Lee distance exact, entries pairwise monomially inequivalent.
    VerifyAppendix {
        /// Catalog file in the bundled table format.
        file: Option<PathBuf>,

        /// Bundled catalog key (for example `appendixA1`) instead of a file.
        #[arg(long, conflicts_with = "file")]
        builtin: Option<String>,

        /// Also require one listed entry per census equivalence class.
        #[arg(long)]
        complete: bool,

        /// Largest ambient-module size the completeness census may walk.
        #[arg(long)]
        budget: Option<u64>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Decide whether two codes form a complementary pair of the module.
    Lcp {
        #[command(flatten)]
        pair: PairInput,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Walk a direct-sum masking scheme end to end: encode, recover, masked
    /// operation, fault injection, side-channel probes.
    DsmDemo {
        #[command(flatten)]
        pair: PairInput,

        /// Sensitive message, whitespace-separated entries.
        #[arg(long)]
        x: Option<String>,

        /// Mask message, whitespace-separated entries.
        #[arg(long)]
        y: Option<String>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Walk the two-user adder channel built on a complementary pair.
    AdderDemo {
        #[command(flatten)]
        pair: PairInput,

        /// First user's message, whitespace-separated entries.
        #[arg(long)]
        x: Option<String>,

        /// Second user's message, whitespace-separated entries.
        #[arg(long)]
        y: Option<String>,

        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
