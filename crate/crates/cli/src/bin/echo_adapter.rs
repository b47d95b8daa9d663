//! Reference adapter for the line-delimited JSON forecast protocol.
//!
//! Reads one request from standard input and answers with the last training
//! value repeated `horizon` times — the adapter-side equivalent of the
//! naive forecast. Useful as a conformance fixture and as a template for
//! real adapters.

use std::io::{BufRead, Write};

use serde::Deserialize;

#[derive(Deserialize)]
struct Request {
    protocol: u32,
    horizon: usize,
    train_values: Vec<f64>,
}

fn main() {
    let stdin = std::io::stdin();
    let mut line = String::new();
    if stdin.lock().read_line(&mut line).is_err() || line.trim().is_empty() {
        respond_error("no request on stdin");
        return;
    }
    match serde_json::from_str::<Request>(line.trim()) {
        Ok(req) => {
            if req.protocol != 1 {
                respond_error(&format!("unsupported protocol {}", req.protocol));
                return;
            }
            match req.train_values.last() {
                Some(last) => {
                    let forecast = vec![*last; req.horizon];
                    let body = serde_json::json!({ "forecast": forecast });
                    println!("{body}");
                    let _ = std::io::stdout().flush();
                }
                None => respond_error("empty training window"),
            }
        }
        Err(e) => respond_error(&format!("malformed request: {e}")),
    }
}

fn respond_error(message: &str) {
    let body = serde_json::json!({ "error": message });
    println!("{body}");
    let _ = std::io::stdout().flush();
}
