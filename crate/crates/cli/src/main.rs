mod commands;
mod failure;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser)]
#[command(name = "nrc", version, about = "Traced evaluation, adaptation, provenance and slicing for NRC queries")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// The result in collection notation.
    Value,
    /// The result as JSON; bags are arrays with repeated elements.
    ValueJson,
    /// The trace in text form.
    Trace,
    /// The trace as lossless JSON, suitable for `adapt`.
    TraceJson,
    /// The output store file.
    Store,
    /// The trace as a Graphviz graph.
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a query over a store file, recording its trace.
    Run {
        query: PathBuf,
        store: PathBuf,
        /// Label receiving the result.
        #[arg(long, default_value = "out")]
        dest: String,
        #[arg(long, value_enum, default_value = "value")]
        emit: Emit,
        /// Also write every artifact into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Adapt a trace (JSON) to an edited input store.
    Adapt {
        trace: PathBuf,
        /// The input store the trace was recorded on.
        store: PathBuf,
        /// JSON array of `{"label": .., "value": <constructor>}` edits.
        edits: PathBuf,
        /// The traced query; enables the comparison against re-evaluation.
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "trace-json")]
        emit: Emit,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Extract provenance annotations from a trace.
    Provenance {
        /// A query (`.nrc`, needs STORE), a trace JSON (`.json`) or a trace text file.
        input: PathBuf,
        store: Option<PathBuf>,
        #[arg(long)]
        kind: String,
        /// Semiring instance: nat, bool or poly.
        #[arg(long)]
        instance: Option<String>,
        /// Input annotations; identity annotations by default.
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// Compare against annotated evaluation of the query and print MATCH.
        #[arg(long)]
        check_oracle: bool,
        /// Print annotations of input labels too.
        #[arg(long)]
        all: bool,
        /// Print the annotated result (semiring kinds) instead of the map.
        #[arg(long)]
        readback: bool,
        #[arg(long, default_value = "out")]
        dest: String,
    },
    /// Slice a trace backward from output labels or forward from input labels.
    Slice {
        /// A query (`.nrc`, needs STORE), a trace JSON (`.json`) or a trace text file.
        input: PathBuf,
        store: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', conflicts_with = "slice_forward", required_unless_present = "slice_forward")]
        slice_backward: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        slice_forward: Vec<String>,
        /// Fold projections and scalar steps into their uses.
        #[arg(long, conflicts_with = "dot")]
        simplify: bool,
        /// Draw the whole trace with removed nodes dimmed.
        #[arg(long)]
        dot: bool,
        #[arg(long, default_value = "out")]
        dest: String,
    },
    /// Run the property suite on generated programs.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per property.
        #[arg(long, default_value_t = 100)]
        size: usize,
    },
    /// Add a CSV table to a store file (or a new one) and print it.
    LoadTable {
        /// Collection label and env variable name; rows become NAMEi.
        name: String,
        csv: PathBuf,
        #[arg(long)]
        into: Option<PathBuf>,
        /// Variable bound to the table; NAME uppercased by default.
        #[arg(long)]
        var: Option<String>,
    },
}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Run { query, store, dest, emit, out_dir } => commands::run(&query, &store, &dest, emit, out_dir.as_deref()),
        Cmd::Adapt { trace, store, edits, query, emit, out_dir } => {
            commands::adapt_trace(&trace, &store, &edits, query.as_deref(), emit, out_dir.as_deref())
        }
        Cmd::Provenance { input, store, kind, instance, annotations, check_oracle, all, readback, dest } => {
            let opts = commands::ProvenanceOpts { kind, instance, annotations, check_oracle, all, readback };
            commands::provenance(&input, store.as_deref(), &dest, &opts)
        }
        Cmd::Slice { input, store, slice_backward, slice_forward, simplify, dot, dest } => {
            let (forward, focus) = if slice_forward.is_empty() { (false, slice_backward) } else { (true, slice_forward) };
            commands::slice(&input, store.as_deref(), &dest, forward, &focus, simplify, dot)
        }
        Cmd::Check { seed, size } => commands::check(seed, size),
        Cmd::LoadTable { name, csv, into, var } => commands::load_table(&name, &csv, into.as_deref(), var),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { failure::USAGE } else { 0 });
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            // Library errors embed their sources in their own message.
            let mut msg = String::new();
            for cause in f.error.chain().map(|c| c.to_string()) {
                if !msg.contains(&cause) {
                    msg = if msg.is_empty() { cause } else { format!("{msg}: {cause}") };
                }
            }
            eprintln!("nrc: {msg}");
            ExitCode::from(f.code)
        }
    }
}
