#![allow(clippy::result_large_err)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use torq_core::io::{self, Document, ParseMode};
use torq_core::Error;

mod commands;
mod report;

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "torq", version, about = "Toric quotients of systems of fans")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputMode::Human, global = true)]
    out: OutputMode,

    /// Reject unknown fields and numeric vector entries (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,

    /// Accept unknown fields and numeric vector entries with warnings.
    #[arg(long, global = true)]
    lenient: bool,

    /// Worker threads for covering decisions; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Human,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompareMode {
    Exact,
    Unimodular,
}

/// Names of the objects a verb works on. Missing names default to the unique
/// object of the right type in the document.
#[derive(clap::Args, Debug, Clone)]
pub struct Inputs {
    /// Input document (`.torq.json`); bundled corpus names are accepted too.
    pub input: PathBuf,

    #[arg(long)]
    pub system: Option<String>,

    #[arg(long)]
    pub sublattice: Option<String>,

    #[arg(long)]
    pub map: Option<String>,

    /// Target fan of the map.
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(clap::Args, Debug, Clone)]
pub struct LoopFlags {
    /// Safety cap on merge steps.
    #[arg(long, default_value_t = torq_core::quotient::DEFAULT_ITERATION_CAP)]
    pub iteration_cap: usize,

    /// Omit the merge trace from the report.
    #[arg(long)]
    pub no_trace: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quotient fan of a system by a sublattice.
    Quotient {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        flags: LoopFlags,
    },
    /// Sufficient conditions for the quotient to be categorical.
    Certify {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        flags: LoopFlags,
    },
    /// Whether the map is surjective onto the support of the target fan.
    WeaklyProper {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Equivalence classes of cones under the map.
    Classes {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Orbits over a target cone and the stabilizer lattice.
    Fibers {
        #[command(flatten)]
        inputs: Inputs,
        /// Target cone.
        #[arg(long)]
        cone: String,
    },
    /// Whether the map factors through a second map on the same system.
    Factors {
        #[command(flatten)]
        inputs: Inputs,
        /// Lattice map of the morphism to factor through.
        #[arg(long)]
        via_map: String,
        /// Target fan of the morphism to factor through.
        #[arg(long)]
        via_target: String,
    },
    /// Restriction of a system to a cone inside its support.
    Restrict {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        cone: String,
    },
    /// Whether a selection of cones is saturated. Uses the map when given,
    /// otherwise the quotient by the sublattice.
    Saturated {
        #[command(flatten)]
        inputs: Inputs,
        /// Comma-separated cone names or chart indices.
        #[arg(long)]
        sub: String,
        #[command(flatten)]
        flags: LoopFlags,
    },
    /// Compares the quotient of a saturated selection with its image in the
    /// full quotient.
    Uniformity {
        #[command(flatten)]
        inputs: Inputs,
        /// Comma-separated cone names or chart indices.
        #[arg(long)]
        sub: String,
        #[arg(long, value_enum, default_value_t = CompareMode::Unimodular)]
        mode: CompareMode,
        #[command(flatten)]
        flags: LoopFlags,
    },
    /// Parses and validates a document.
    Validate {
        input: PathBuf,
    },
}

impl Command {
    fn verb(&self) -> &'static str {
        match self {
            Command::Quotient { .. } => "quotient",
            Command::Certify { .. } => "certify",
            Command::WeaklyProper { .. } => "weakly-proper",
            Command::Classes { .. } => "classes",
            Command::Fibers { .. } => "fibers",
            Command::Factors { .. } => "factors",
            Command::Restrict { .. } => "restrict",
            Command::Saturated { .. } => "saturated",
            Command::Uniformity { .. } => "uniformity",
            Command::Validate { .. } => "validate",
        }
    }

    fn input(&self) -> &PathBuf {
        match self {
            Command::Quotient { inputs, .. }
            | Command::Certify { inputs, .. }
            | Command::WeaklyProper { inputs }
            | Command::Classes { inputs }
            | Command::Fibers { inputs, .. }
            | Command::Factors { inputs, .. }
            | Command::Restrict { inputs, .. }
            | Command::Saturated { inputs, .. }
            | Command::Uniformity { inputs, .. } => &inputs.input,
            Command::Validate { input } => input,
        }
    }
}

/// Reads a document from disk, falling back to the bundled corpus.
fn load(path: &PathBuf, mode: ParseMode) -> Result<(Document, Vec<String>), Error> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default();
            match io::corpus(name) {
                Some(t) if !path.exists() => t.to_string(),
                _ => {
                    return Err(Error::Schema {
                        path: path.display().to_string(),
                        line: None,
                        message: format!("cannot read input: {e}"),
                    })
                }
            }
        }
    };
    let parsed = io::parse_with(&text, mode)?;
    Ok((parsed.document, parsed.warnings))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let mode = if cli.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    };
    let verb = cli.command.verb();
    let outcome = load(cli.command.input(), mode).and_then(|(doc, warnings)| {
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        commands::run(&cli.command, &doc, warnings)
    });
    match outcome {
        Ok(report) => {
            emit(cli.out, &report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            if cli.out == OutputMode::Json {
                print!("{}", io::to_text(&report::error_envelope(verb, &e)));
            }
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}

fn emit(mode: OutputMode, report: &Report) {
    match mode {
        OutputMode::Json => print!("{}", io::to_text(&report.envelope())),
        OutputMode::Human => print!("{}", report.human),
    }
}
