//! External shapes over a line protocol.
//!
//! The tool writes one JSON array of `n` parameters per line to the child's
//! standard input and reads back one JSON array of `n + 1` embedding
//! coordinates per line. The child keeps running between requests and is
//! closed when the handle drops.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use crate::error::{CliError, CliResult};

pub struct ShapeProcess {
    command: String,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    calls: usize,
}

impl ShapeProcess {
    /// Runs `command` through `sh -c`.
    pub fn spawn(command: &str) -> CliResult<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| CliError::Subprocess(format!("cannot start `{command}`: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().map(BufReader::new);
        let Some(stdout) = stdout else {
            return Err(CliError::Subprocess(format!("`{command}` has no standard output")));
        };
        Ok(ShapeProcess { command: command.to_string(), child, stdin, stdout, calls: 0 })
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    /// One round trip. Errors are plain strings so the call can serve as a
    /// finite-difference callback.
    pub fn eval(&mut self, u: &[f64]) -> Result<Vec<f64>, String> {
        let request = serde_json::to_string(u).map_err(|e| e.to_string())?;
        let stdin = self.stdin.as_mut().ok_or("standard input closed")?;
        writeln!(stdin, "{request}")
            .and_then(|_| stdin.flush())
            .map_err(|e| format!("`{}`: write failed: {e}", self.command))?;
        let mut line = String::new();
        let read = self.stdout.read_line(&mut line).map_err(|e| format!("`{}`: read failed: {e}", self.command))?;
        if read == 0 {
            return Err(format!("`{}` closed its output after {} replies", self.command, self.calls));
        }
        self.calls += 1;
        serde_json::from_str::<Vec<f64>>(line.trim())
            .map_err(|e| format!("`{}` reply {} is not a JSON number array: {e}", self.command, self.calls))
    }
}

impl Drop for ShapeProcess {
    fn drop(&mut self) {
        drop(self.stdin.take());
        if !matches!(self.child.try_wait(), Ok(Some(_))) {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}

/// Serves `f` over the same protocol, one reply per request line.
pub fn serve<R: BufRead, W: Write, F>(input: R, mut output: W, mut f: F) -> CliResult<()>
where
    F: FnMut(&[f64]) -> CliResult<Vec<f64>>,
{
    for line in input.lines() {
        let line = line.map_err(|e| CliError::Subprocess(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let u: Vec<f64> = serde_json::from_str(&line).map_err(|e| CliError::json("request", &e))?;
        let x = f(&u)?;
        let reply = serde_json::to_string(&x).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(output, "{reply}").map_err(|e| CliError::Subprocess(e.to_string()))?;
        output.flush().map_err(|e| CliError::Subprocess(e.to_string()))?;
    }
    Ok(())
}
