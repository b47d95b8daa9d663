use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Walk-forward scheme: fixed-length window advanced by the step, or a
/// window growing from a fixed origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Sliding,
    Expanding,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Sliding => write!(f, "sliding"),
            Scheme::Expanding => write!(f, "expanding"),
        }
    }
}

/// Index spans of one window: train `[train_start, train_end)`, test
/// `[test_start, test_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpan {
    pub train_start: usize,
    pub train_end: usize,
    pub test_start: usize,
    pub test_end: usize,
}

/// Complete walk-forward plan over a panel of known length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub scheme: Scheme,
    pub initial_window: usize,
    pub step: usize,
    pub horizon: usize,
    pub windows: Vec<WindowSpan>,
}

/// Enumerates walk-forward windows until the data can no longer supply a
/// full test span: `floor((n − w − h)/s) + 1` windows for both schemes.
pub fn generate_windows(
    n: usize,
    scheme: Scheme,
    initial_window: usize,
    step: usize,
    horizon: usize,
) -> Result<WindowPlan> {
    if initial_window == 0 || horizon == 0 {
        return Err(Error::Input(
            "window size and horizon must be positive".into(),
        ));
    }
    if step == 0 {
        return Err(Error::Input("step must be positive".into()));
    }
    if n < initial_window + horizon {
        return Err(Error::Input(format!(
            "panel of {n} rows cannot fit an initial window of {initial_window} plus horizon {horizon}"
        )));
    }

    let count = (n - initial_window - horizon) / step + 1;
    let mut windows = Vec::with_capacity(count);
    for i in 0..count {
        let offset = i * step;
        let (train_start, train_end) = match scheme {
            Scheme::Sliding => (offset, offset + initial_window),
            Scheme::Expanding => (0, initial_window + offset),
        };
        windows.push(WindowSpan {
            train_start,
            train_end,
            test_start: train_end,
            test_end: train_end + horizon,
        });
    }
    Ok(WindowPlan {
        scheme,
        initial_window,
        step,
        horizon,
        windows,
    })
}
