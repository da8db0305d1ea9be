mod args;
mod check;
mod commands;

use std::ffi::OsString;
use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Output directory for relative output paths.
pub const OUTPUT_DIR_VAR: &str = "TWOPOINT_OUTPUT_DIR";

/// Error with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl fmt::Display) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }

    pub fn budget(message: impl fmt::Display) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    pub fn invariant(message: impl fmt::Display) -> Self {
        Failure {
            code: 3,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let argv = match with_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(f) => return report(f),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return report(Failure::validation("--threads must be at least 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return report(Failure::validation(e));
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("error: {}", f.message);
    ExitCode::from(f.code)
}

/// Appends `--key value` for every entry of the `--config` JSON object whose
/// flag is not already on the command line.
fn with_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let a = a.to_string_lossy();
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(rest) = a.strip_prefix("--config=") {
            path = Some(rest.into());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::validation(format!("bad config JSON: {e}")))?;
    let serde_json::Value::Object(map) = value else {
        return Err(Failure::validation("config must be a JSON object"));
    };
    let present: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if present.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        let text = match v {
            serde_json::Value::Null | serde_json::Value::Bool(false) => continue,
            serde_json::Value::Bool(true) => {
                argv.push(flag.into());
                continue;
            }
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Array(items) => items
                .iter()
                .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                .collect::<Vec<_>>()
                .join(","),
            serde_json::Value::Object(_) => return Err(Failure::validation(format!("config key {key:?} is an object"))),
        };
        argv.push(flag.into());
        argv.push(text.into());
    }
    Ok(argv)
}
