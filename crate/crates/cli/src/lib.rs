//! The `dicke` command-line tool as a library, so that its recipes can be
//! driven from tests.

pub mod args;
mod commands;
pub mod config;
pub mod error;
pub mod reproduce;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::{Map, Value};

use crate::args::{Cli, Command, ReproduceArgs};
use crate::commands::{Destination, Outcome};
use crate::config::FileConfig;
pub use crate::error::CliError;
pub use crate::reproduce::{reproduce, Figure, Reproduction};
use crate::table::Format;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "DICKE_THREADS";

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let outcome = match &cli.command {
        Command::Energy(a) => commands::energy(a, &file)?,
        Command::Evolve(a) => commands::evolve_cmd(a, &file)?,
        Command::GroundState(a) => commands::ground(a, &file)?,
        Command::Sweep(a) => commands::sweep(a, &file)?,
        Command::PhaseDiagram(a) => commands::phase_diagram(a, &file)?,
        Command::CriticalAlpha(a) => commands::critical(a, &file)?,
        Command::Lyapunov(a) => commands::lyapunov(a, &file)?,
        Command::Poincare(a) => commands::poincare_cmd(a, &file)?,
        Command::ShellIc(a) => commands::shell_ic(a, &file)?,
        Command::Reproduce(a) => return run_reproduce(a, &file, stdout),
    };
    emit(outcome, stdout, stderr)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn line(v: &Value) -> String {
    serde_json::to_string(v).expect("json encoding")
}

fn emit(outcome: Outcome, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let Outcome { command, table, scalar, summary, failure, destination } = outcome;
    let table = table.renamed(destination.naming);
    if scalar {
        if let Some(path) = &destination.path {
            write_file(path, &table.encode(destination.format, true))?;
        }
        writeln!(stdout, "{}", line(&table.to_json(true)))?;
    } else {
        let mut head = Map::new();
        head.insert("command".into(), command.into());
        head.insert("rows".into(), table.rows.len().into());
        head.insert("out".into(), destination.path.as_ref().map(|p| p.display().to_string()).into());
        head.extend(summary);
        let summary_line = line(&Value::Object(head));
        match &destination.path {
            Some(path) => {
                write_file(path, &table.encode(destination.format, false))?;
                writeln!(stdout, "{summary_line}")?;
            }
            None => {
                stdout.write_all(table.encode(destination.format, false).as_bytes())?;
                writeln!(stderr, "{summary_line}")?;
            }
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn run_reproduce(a: &ReproduceArgs, file: &FileConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    file.check_blocks("reproduce", &[])?;
    let m = &file.model;
    if m.gamma.is_some() || m.alpha.is_some() || m.omega.is_some() || m.omega0.is_some() || file.initial.state.is_some() {
        return Err(CliError::Usage("reproduce uses the caption parameters; remove [model] and [initial]".into()));
    }
    let dest = Destination::resolve(&a.output, file, Format::Csv);
    let dir = dest.path.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let r = reproduce(a.figure)?;
    let ext = match dest.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut files = Vec::new();
    for (name, table) in &r.tables {
        let path = dir.join(format!("{name}.{ext}"));
        let table = table.clone().renamed(dest.naming);
        let path_name = if ext == "json" { dir.join(format!("{name}_data.json")) } else { path };
        write_file(&path_name, &table.encode(dest.format, false))?;
        files.push(path_name.display().to_string());
    }
    let verdict_path = dir.join(format!("{}.json", r.figure));
    let mut verdict = r.verdict.clone();
    if let Value::Object(m) = &mut verdict {
        m.insert("files".into(), files.into());
    }
    write_file(&verdict_path, &format!("{}\n", line(&verdict)))?;
    writeln!(stdout, "{}", line(&verdict))?;
    Ok(())
}
