//! Helpers for the acceptance suite in `tests/acceptance.rs`.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

/// Outcome of one numbered criterion.
#[derive(Debug, Clone)]
pub struct Check {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: u8, title: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Self { id, title, pass, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("criterion {} ({}): {verdict}  {}", self.id, self.title, self.detail)
    }
}

/// Collects checks, optionally echoing each line as it lands.
#[derive(Debug, Default)]
pub struct Report {
    checks: Vec<Check>,
    echo: bool,
}

impl Report {
    pub fn echoing() -> Self {
        Self { checks: Vec::new(), echo: true }
    }

    pub fn record(&mut self, check: Check) {
        if self.echo {
            // straight to the stream so the lines survive the test harness capture
            let _ = writeln!(std::io::stderr(), "{}", check.line());
        }
        self.checks.push(check);
    }

    pub fn failed(&self) -> Vec<u8> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.id).collect()
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }
}

/// Runs the `dicke` tool in-process: (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dicke_cli::run(std::iter::once("dicke").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

/// Runs `dicke reproduce <figure>` into `dir` and reads back the verdict file.
pub fn reproduce_verdict(figure: &str, dir: &Path) -> Result<Value, String> {
    let dir_str = dir.to_str().ok_or("non-utf8 directory")?;
    let (code, _, err) = cli(&["reproduce", figure, "--out", dir_str]);
    if code != 0 {
        return Err(format!("reproduce {figure} exited {code}: {}", err.trim()));
    }
    let text = std::fs::read_to_string(dir.join(format!("{figure}.json"))).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

/// Number field of a verdict, NaN when missing.
pub fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or(f64::NAN)
}
