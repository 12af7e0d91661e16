//! Command line, file formats and run records for the `pseudoentropy` crate.

pub mod cli;
pub mod commands;
pub mod io;
pub mod record;

use clap::Parser;

use crate::cli::{Cli, Format};
use crate::commands::{execute, report_path, Context};
use crate::record::{render_table, timestamp, RunRecord, TOOL, VERSION};

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let ctx = Context { threads: cli.threads, write_files: true };
    let outcome = match execute(&cli.command, ctx) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {f}");
            return f.exit_code();
        }
    };
    let exit_code = outcome.exit_code();
    let record = RunRecord {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: args.iter().skip(1).cloned().collect(),
        config: serde_json::to_value(&cli).expect("configuration is plain data"),
        seed: outcome.seed,
        timestamp: timestamp(),
        exit_code,
        outputs: outcome.outputs,
    };
    if let Some(path) = report_path(&cli.command) {
        if let Err(e) = std::fs::write(path, record.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    match cli.format {
        Format::Json => print!("{}", record.to_json()),
        Format::Table => print!("{}", render_table(&record.outputs)),
    }
    exit_code
}
