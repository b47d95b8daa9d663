use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How to reach an external forecaster process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterConfig {
    /// Executable to spawn.
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    /// Per-window wall-clock budget in seconds.
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    /// Opaque blob forwarded verbatim as `model_config`.
    #[serde(default)]
    pub config: serde_json::Value,
}

fn default_timeout_secs() -> u64 {
    300
}

/// One request line written to the adapter's standard input.
#[derive(Debug, Clone, Serialize)]
pub struct AdapterRequest<'a> {
    pub protocol: u32,
    pub model_config: &'a serde_json::Value,
    pub tenor: &'a str,
    pub horizon: usize,
    pub train_dates: Vec<String>,
    pub train_values: &'a [f64],
    pub stationary_input: bool,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
struct AdapterResponse {
    #[serde(default)]
    forecast: Option<Vec<f64>>,
    #[serde(default)]
    error: Option<String>,
}

/// Spawns the adapter, writes one request line, reads one response line,
/// and validates the forecast (exactly `horizon` finite values).
///
/// Every failure mode — spawn failure, nonzero exit, malformed response,
/// timeout — comes back as [`Error::Adapter`] so the engine can record a
/// skipped window instead of crashing.
pub fn external_forecast(adapter: &AdapterConfig, request: &AdapterRequest) -> Result<Vec<f64>> {
    let line = serde_json::to_string(request)
        .map_err(|e| Error::Adapter(format!("request serialization failed: {e}")))?;

    let mut child = Command::new(&adapter.command)
        .args(&adapter.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Adapter(format!("failed to spawn {}: {e}", adapter.command)))?;

    let mut stdin = child
        .stdin
        .take()
        .ok_or_else(|| Error::Adapter("adapter stdin unavailable".into()))?;
    let stdout = child
        .stdout
        .take()
        .ok_or_else(|| Error::Adapter("adapter stdout unavailable".into()))?;

    if let Err(e) = stdin
        .write_all(line.as_bytes())
        .and_then(|_| stdin.write_all(b"\n"))
    {
        let _ = child.kill();
        let _ = child.wait();
        return Err(Error::Adapter(format!("failed to write request: {e}")));
    }
    drop(stdin); // close the pipe so line-at-a-time adapters can finish

    // Read the response on a detached helper thread so the timeout also
    // covers adapters that hang without producing output. The thread is not
    // joined: grandchildren of a killed adapter can keep the pipe open
    // arbitrarily long, and the parked thread costs nothing.
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let mut reader = BufReader::new(stdout);
        let mut buf = String::new();
        let outcome = reader.read_line(&mut buf).map(|_| buf);
        let _ = tx.send(outcome);
    });

    let timeout = Duration::from_secs(adapter.timeout_secs);
    let line = match rx.recv_timeout(timeout) {
        Ok(Ok(line)) => line,
        Ok(Err(e)) => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(Error::Adapter(format!("failed to read response: {e}")));
        }
        Err(_) => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(Error::Adapter(format!(
                "timed out after {}s waiting for response",
                adapter.timeout_secs
            )));
        }
    };

    let status = child
        .wait()
        .map_err(|e| Error::Adapter(format!("failed to reap adapter: {e}")))?;
    if !status.success() {
        return Err(Error::Adapter(format!(
            "adapter exited with status {status}"
        )));
    }

    if line.trim().is_empty() {
        return Err(Error::Adapter("adapter produced no response line".into()));
    }
    let response: AdapterResponse = serde_json::from_str(line.trim())
        .map_err(|e| Error::Adapter(format!("malformed response: {e}")))?;
    if let Some(message) = response.error {
        return Err(Error::Adapter(format!("adapter reported: {message}")));
    }
    let forecast = response
        .forecast
        .ok_or_else(|| Error::Adapter("response has neither forecast nor error".into()))?;
    if forecast.len() != request.horizon {
        return Err(Error::Adapter(format!(
            "forecast length {} does not match horizon {}",
            forecast.len(),
            request.horizon
        )));
    }
    if forecast.iter().any(|v| !v.is_finite()) {
        return Err(Error::Adapter("forecast contains non-finite values".into()));
    }
    Ok(forecast)
}
