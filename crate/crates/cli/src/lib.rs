//! Command implementations behind the `divmon` binary.
//!
//! Each command produces an [`Outcome`]: an exit code, human-readable text
//! and a flat `key = value` report.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use divmon_core::Report;

mod commands;

pub use commands::run_command;

#[derive(Debug, Parser)]
#[command(name = "divmon", version, about = "Left divisibility monoids: axiom check, normal forms, transducers, automatic structures")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Skip the axiom check before constructions.
    #[arg(long, global = true)]
    pub assume_checked: bool,
    /// Worker threads for the library's parallel scans.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Write the key-value report to PATH (`-` replaces the normal output).
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a presentation is a left divisibility monoid.
    Check { file: PathBuf },
    /// List the hypercubes.
    Hypercubes { file: PathBuf },
    /// Build and serialize the normalizing transducer.
    Synthesize {
        file: PathBuf,
        /// Build the machine over the hypercube alphabet.
        #[arg(long)]
        augmented: bool,
        /// Emit Graphviz instead of the machine format.
        #[arg(long)]
        dot: bool,
        #[arg(short, long, value_name = "OUT")]
        output: Option<PathBuf>,
    },
    /// Right normal form of a word, from a presentation or a machine file.
    Normalize {
        input: PathBuf,
        word: String,
        /// Print run and step counts.
        #[arg(long)]
        stats: bool,
    },
    /// Decide whether two words present the same element.
    Equal { file: PathBuf, u: String, v: String },
    /// Hypercube graph queries.
    Graph {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        reach: Option<Vec<String>>,
        /// Strong connectivity of the non-central cubes.
        #[arg(long)]
        scc: bool,
    },
    /// Normal-language, equality and multiplier automata.
    Automatic {
        file: PathBuf,
        /// Restrict to the multipliers of one cube, e.g. `[x y]` or `z`.
        #[arg(long, value_name = "CUBE")]
        multiplier: Option<String>,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
        /// Emit Graphviz for the selected machines.
        #[arg(long)]
        dot: bool,
        /// Check the machines against the oracle on normal pairs up to this element length.
        #[arg(long, value_name = "L")]
        sweep: Option<usize>,
        #[arg(short, long, value_name = "OUT")]
        output: Option<PathBuf>,
    },
    /// Run the property suite against the oracle.
    Verify {
        file: PathBuf,
        #[arg(long, value_name = "L", default_value_t = 6)]
        max_len: usize,
        /// Check this machine file instead of a freshly synthesized one.
        #[arg(long, value_name = "PATH")]
        machine: Option<PathBuf>,
    },
    /// Step-count scaling of transducer normalization.
    Bench {
        file: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 512)]
        max_n: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub report: Report,
}

impl Outcome {
    pub const OK: u8 = 0;
    pub const DOMAIN: u8 = 1;
    pub const USAGE: u8 = 2;

    fn new(command: &str) -> Self {
        let mut report = Report::new();
        report.comment(format!("divmon {command}"));
        report.set("command", command);
        Outcome {
            code: Self::OK,
            text: String::new(),
            report,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn finish(mut self, code: u8) -> Self {
        self.code = code;
        self.report.set("exit_code", code);
        self
    }
}

pub(crate) fn read_file(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))
}
