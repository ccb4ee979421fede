use std::io;
use std::process::{Command, Output};

pub const PYTHON: &str = "python3";

pub fn available() -> bool {
    Command::new(PYTHON).arg("--version").output().is_ok_and(|o| o.status.success())
}

/// Writes `source` to a temporary `generated.py` and runs it.
pub fn run_source(source: &str) -> io::Result<Output> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("generated.py");
    std::fs::write(&path, source)?;
    Command::new(PYTHON).arg(&path).output()
}

/// Standard output of the program, or a description of how it failed.
pub fn stdout_of(source: &str) -> Result<String, String> {
    let out = run_source(source).map_err(|e| format!("cannot run {PYTHON}: {e}"))?;
    if !out.status.success() {
        return Err(format!("exit {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}
