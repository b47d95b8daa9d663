use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use super::aggregate::AggregateReport;
use super::leaderboard::leaderboard;
use crate::cv::{ResultStatus, RunProvenance, Scheme, WindowResult};
use crate::forecast::HyperParams;
use crate::{Error, Result};

/// Output format selector for `report`-style rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for EmitFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            "markdown" | "md" => Ok(EmitFormat::Markdown),
            other => Err(Error::Config(format!(
                "unknown format {other:?} (expected csv, json, or markdown)"
            ))),
        }
    }
}

/// What to write and where.
#[derive(Debug, Clone)]
pub struct EmitOptions {
    pub output_dir: PathBuf,
    pub per_block: bool,
}

/// Column order of the per-window CSV.
pub const WINDOWS_CSV_HEADER: &str =
    "model,scheme,stationary,block,window_index,train_start,train_end,tenor,horizon,rmse,mape,fallback,seed";

fn provenance_comment(p: &RunProvenance) -> String {
    format!(
        "# curvecast {} config_hash={} seed={} tenors={}",
        p.version,
        p.config_hash,
        p.seed,
        p.tenors.join(",")
    )
}

fn float_field(v: f64) -> String {
    if v.is_finite() {
        // Display for f64 is shortest-round-trip, so parsing recovers the
        // exact bits.
        format!("{v}")
    } else {
        String::new()
    }
}

/// One CSV row in the pinned column order.
pub fn render_windows_csv_row(r: &WindowResult) -> String {
    let status = match r.status {
        ResultStatus::Ok => "false",
        ResultStatus::Fallback => "true",
        ResultStatus::Skipped => "skipped",
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.model_id,
        r.scheme,
        r.stationary_input,
        r.block,
        r.window_index,
        r.train_start,
        r.train_end,
        r.tenor,
        r.horizon,
        float_field(r.rmse),
        float_field(r.mape),
        status,
        r.seed
    )
}

/// Full per-window CSV: provenance comment, header, one row per result.
pub fn render_windows_csv(results: &[WindowResult], provenance: &RunProvenance) -> String {
    let mut out = String::new();
    out.push_str(&provenance_comment(provenance));
    out.push('\n');
    out.push_str(WINDOWS_CSV_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&render_windows_csv_row(r));
        out.push('\n');
    }
    out
}

/// Provenance fields recoverable from a CSV comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvProvenance {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    /// Tenor column order of the run's panel, when recorded.
    pub tenors: Vec<String>,
}

/// Parses a per-window CSV back into results (hyperparams are not stored in
/// the CSV and come back as `HyperParams::None`).
pub fn parse_windows_csv(text: &str) -> Result<(Vec<WindowResult>, Option<CsvProvenance>)> {
    let mut provenance = None;
    let mut header_seen = false;
    let mut results = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut version = None;
            let mut hash = None;
            let mut seed = None;
            let mut tenors = Vec::new();
            for token in comment.split_whitespace() {
                if let Some(h) = token.strip_prefix("config_hash=") {
                    hash = Some(h.to_string());
                } else if let Some(s) = token.strip_prefix("seed=") {
                    seed = s.parse::<u64>().ok();
                } else if let Some(t) = token.strip_prefix("tenors=") {
                    tenors = t.split(',').map(str::to_string).collect();
                } else if token != "curvecast" {
                    version = Some(token.to_string());
                }
            }
            if let (Some(config_hash), Some(seed)) = (hash, seed) {
                provenance = Some(CsvProvenance {
                    version: version.unwrap_or_default(),
                    config_hash,
                    seed,
                    tenors,
                });
            }
            continue;
        }
        if !header_seen {
            if line != WINDOWS_CSV_HEADER {
                return Err(Error::Parse(format!(
                    "line {}: unexpected header {line:?}",
                    lineno + 1
                )));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(Error::Parse(format!(
                "line {}: expected 13 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse_date = |s: &str| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d")
                .map_err(|e| Error::Parse(format!("line {}: bad date {s:?}: {e}", lineno + 1)))
        };
        let parse_num = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: bad {what} {s:?}", lineno + 1)))
        };
        let scheme = match fields[1] {
            "sliding" => Scheme::Sliding,
            "expanding" => Scheme::Expanding,
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown scheme {other:?}",
                    lineno + 1
                )))
            }
        };
        let status = match fields[11] {
            "false" => ResultStatus::Ok,
            "true" => ResultStatus::Fallback,
            "skipped" => ResultStatus::Skipped,
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown fallback flag {other:?}",
                    lineno + 1
                )))
            }
        };
        let (rmse, mape) = if status == ResultStatus::Skipped {
            (f64::NAN, f64::NAN)
        } else {
            (
                parse_num(fields[9], "rmse")?,
                parse_num(fields[10], "mape")?,
            )
        };
        results.push(WindowResult {
            model_id: fields[0].to_string(),
            hyperparams: HyperParams::None,
            scheme,
            stationary_input: fields[2]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad stationary flag", lineno + 1)))?,
            block: fields[3]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad block", lineno + 1)))?,
            window_index: fields[4]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad window index", lineno + 1)))?,
            train_start: parse_date(fields[5])?,
            train_end: parse_date(fields[6])?,
            tenor: fields[7].to_string(),
            horizon: fields[8]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad horizon", lineno + 1)))?,
            rmse,
            mape,
            status,
            seed: fields[12]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad seed", lineno + 1)))?,
        });
    }
    if !header_seen {
        return Err(Error::Parse("no header row found".into()));
    }
    Ok((results, provenance))
}

/// Markdown leaderboard shaped like the comparison tables: one row per
/// model configuration, RMSE/MAPE columns per tenor, per-family best in
/// italics and overall best in bold, six decimals.
pub fn render_markdown(report: &AggregateReport) -> Result<String> {
    let lb = leaderboard(report)?;
    let mut out = String::new();
    out.push_str(&format!(
        "# Forecast accuracy (horizon {} business days)\n\n",
        lb.horizon
    ));
    out.push_str(&format!(
        "Run: seed {}, config `{}`, {} windows, version {}.\n\n",
        report.provenance.seed,
        report.provenance.config_hash,
        report.provenance.window_count,
        report.provenance.version
    ));

    out.push_str("| Model |");
    for tenor in &lb.tenors {
        out.push_str(&format!(" {tenor} RMSE | {tenor} MAPE |"));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &lb.tenors {
        out.push_str("---|---|");
    }
    out.push('\n');
    for row in &lb.rows {
        out.push_str(&format!("| {} |", row.label));
        for cell in &row.cells {
            match cell {
                Some(c) => {
                    out.push_str(&format!(
                        " {} | {} |",
                        mark(c.rmse, c.rmse_family_best, c.rmse_overall_best),
                        mark(c.mape, c.mape_family_best, c.mape_overall_best)
                    ));
                }
                None => out.push_str(" — | — |"),
            }
        }
        out.push('\n');
    }
    out.push_str(
        "\n*italic* = best configuration within the model family; \
         **bold** = best across all models (per tenor and metric).\n",
    );
    Ok(out)
}

fn mark(value: f64, family_best: bool, overall_best: bool) -> String {
    let text = format!("{value:.6}");
    match (overall_best, family_best) {
        (true, _) => format!("**{text}**"),
        (false, true) => format!("*{text}*"),
        (false, false) => text,
    }
}

/// Per-block series suitable for plotting metric-vs-block curves.
pub fn render_block_csv(report: &AggregateReport) -> String {
    let mut out = String::new();
    out.push_str(&provenance_comment(&report.provenance));
    out.push('\n');
    out.push_str(
        "model,scheme,stationary,tenor,horizon,block,windows,mean_rmse,mean_mape,std_rmse,std_mape\n",
    );
    for g in &report.groups {
        for bs in &g.per_block {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                g.key.model_id,
                g.key.scheme,
                g.key.stationary_input,
                g.key.tenor,
                g.key.horizon,
                bs.block,
                bs.stats.windows,
                float_field(bs.stats.mean_rmse),
                float_field(bs.stats.mean_mape),
                float_field(bs.stats.std_rmse),
                float_field(bs.stats.std_mape),
            ));
        }
    }
    out
}

/// Writes the full report file set and returns the written paths:
/// `windows.csv`, `aggregate.json`, `leaderboard.md`, and (optionally)
/// `blocks.csv`.
pub fn emit(
    report: &AggregateReport,
    results: &[WindowResult],
    options: &EmitOptions,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&options.output_dir)
        .map_err(|e| Error::Emission(format!("{}: {e}", options.output_dir.display())))?;
    let mut written = Vec::new();

    let mut write = |name: &str, contents: String| -> Result<()> {
        let path = options.output_dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| Error::Emission(format!("{}: {e}", path.display())))?;
        written.push(path);
        Ok(())
    };

    write(
        "windows.csv",
        render_windows_csv(results, &report.provenance),
    )?;
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Emission(format!("aggregate serialization failed: {e}")))?;
    write("aggregate.json", json + "\n")?;
    write("leaderboard.md", render_markdown(report)?)?;
    if options.per_block {
        write("blocks.csv", render_block_csv(report))?;
    }
    Ok(written)
}

/// Re-reads a written per-window CSV and rebuilds the aggregate from it,
/// carrying the provenance comment along.
pub fn load_results(path: &Path) -> Result<(Vec<WindowResult>, Option<CsvProvenance>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Emission(format!("{}: {e}", path.display())))?;
    parse_windows_csv(&text)
}
