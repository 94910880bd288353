mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use commands::Cli;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure modes of a run and the exit code each maps to.
enum Failure {
    /// Bad command line, bad input file or violated precondition.
    Usage(String, &'static str),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(..) => 2,
            Failure::Internal(_) => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Usage(msg, kind) => json!({ "kind": kind, "message": msg }),
            Failure::Internal(msg) => json!({ "kind": "internal", "message": msg }),
        }
    }
}

impl From<hardylab::Error> for Failure {
    fn from(e: hardylab::Error) -> Self {
        use hardylab::Error;
        let kind = match &e {
            Error::Input(_) => "input",
            Error::Precondition(_) => "precondition",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        };
        Failure::Usage(e.to_string(), kind)
    }
}

fn configure_threads() {
    let Ok(raw) = std::env::var("HARDYLAB_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // only fails if a pool already exists, which cannot happen this early
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("ignoring HARDYLAB_THREADS={raw:?}: expected a positive integer"),
    }
}

fn emit(out: &Value) {
    let mut text = serde_json::to_string_pretty(out).expect("report serialization cannot fail");
    text.push('\n');
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let echo: Vec<String> = argv.iter().skip(1).cloned().collect();

    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let f = Failure::Usage(first.trim_start_matches("error: ").to_string(), "usage");
            eprint!("{text}");
            emit(&json!({ "tool_version": TOOL_VERSION, "command_echo": echo, "wall_time_ms": 0.0, "error": f.to_json() }));
            return ExitCode::from(f.code());
        }
    };
    configure_threads();

    let start = Instant::now();
    let no_timing = cli.no_timing;
    let outcome = std::panic::catch_unwind(|| commands::run(cli.command));
    let wall_time_ms = if no_timing { 0.0 } else { start.elapsed().as_secs_f64() * 1e3 };

    let result = match outcome {
        Ok(r) => r,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Err(Failure::Internal(msg))
        }
    };
    match result {
        Ok(value) => {
            emit(&json!({
                "tool_version": TOOL_VERSION,
                "command_echo": echo,
                "wall_time_ms": wall_time_ms,
                "result": value,
            }));
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (Failure::Usage(msg, _) | Failure::Internal(msg)) = &f;
            eprintln!("error: {msg}");
            emit(&json!({
                "tool_version": TOOL_VERSION,
                "command_echo": echo,
                "wall_time_ms": wall_time_ms,
                "error": f.to_json(),
            }));
            ExitCode::from(f.code())
        }
    }
}
