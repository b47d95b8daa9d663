use chrono::NaiveDate;

use crate::{Error, Result};

/// One downloaded series: a ticker plus date-ordered observations, where a
/// missing value (FRED's `.`) is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    ticker: String,
    observations: Vec<(NaiveDate, Option<f64>)>,
}

impl RawSeries {
    /// Validates strictly increasing dates and finite nonnegative yields.
    pub fn new(
        ticker: impl Into<String>,
        observations: Vec<(NaiveDate, Option<f64>)>,
    ) -> Result<Self> {
        let ticker = ticker.into();
        for pair in observations.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Parse(format!(
                    "{ticker}: dates not strictly increasing at {}",
                    pair[1].0
                )));
            }
        }
        for (date, value) in &observations {
            if let Some(v) = value {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::Parse(format!(
                        "{ticker}: invalid yield {v} on {date}"
                    )));
                }
            }
        }
        Ok(Self {
            ticker,
            observations,
        })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn observations(&self) -> &[(NaiveDate, Option<f64>)] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Count of non-missing observations.
    pub fn value_count(&self) -> usize {
        self.observations
            .iter()
            .filter(|(_, v)| v.is_some())
            .count()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.observations.first().map(|(d, _)| *d)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.observations.last().map(|(d, _)| *d)
    }
}

/// Parses a FRED CSV payload: a `DATE,<TICKER>` header (newer exports use
/// `observation_date`) followed by `YYYY-MM-DD,<value-or-dot>` rows, where
/// `.` marks a missing value.
pub fn parse_fred_csv(payload: &[u8]) -> Result<RawSeries> {
    let text = std::str::from_utf8(payload)
        .map_err(|e| Error::Parse(format!("payload is not UTF-8: {e}")))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty payload".into()))?;
    let mut header_fields = header.trim_start_matches('\u{feff}').split(',');
    let date_col = header_fields.next().map(str::trim).unwrap_or_default();
    if !date_col.eq_ignore_ascii_case("date") && !date_col.eq_ignore_ascii_case("observation_date")
    {
        return Err(Error::Parse(format!(
            "unexpected header: first column {date_col:?} is not DATE"
        )));
    }
    let ticker = header_fields
        .next()
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .ok_or_else(|| Error::Parse("header has no ticker column".into()))?
        .to_string();

    let mut observations = Vec::new();
    for (row, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let (date_str, value_str) = line.split_once(',').ok_or_else(|| {
            Error::Parse(format!(
                "row {}: expected `date,value`, got {line:?}",
                row + 1
            ))
        })?;
        let date = NaiveDate::parse_from_str(date_str.trim(), "%Y-%m-%d")
            .map_err(|e| Error::Parse(format!("row {}: bad date {date_str:?}: {e}", row + 1)))?;
        let value_str = value_str.trim();
        let value = if value_str == "." || value_str.is_empty() {
            None
        } else {
            Some(value_str.parse::<f64>().map_err(|_| {
                Error::Parse(format!("row {}: unparseable value {value_str:?}", row + 1))
            })?)
        };
        if let Some((prev, _)) = observations.last() {
            if date <= *prev {
                return Err(Error::Parse(format!(
                    "row {}: date {date} not after previous {prev}",
                    row + 1
                )));
            }
        }
        observations.push((date, value));
    }
    RawSeries::new(ticker, observations)
}

/// Re-serializes a series in the FRED CSV format (inverse of
/// [`parse_fred_csv`] up to trailing whitespace).
pub fn serialize_fred_csv(series: &RawSeries) -> String {
    let mut out = format!("DATE,{}\n", series.ticker());
    for (date, value) in series.observations() {
        match value {
            Some(v) => out.push_str(&format!("{date},{}\n", format_yield(*v))),
            None => out.push_str(&format!("{date},.\n")),
        }
    }
    out
}

/// FRED publishes yields with two decimals ("4.50"); shorter values are
/// padded so a parse → serialize round trip reproduces the file, while
/// higher-precision values keep their shortest exact form.
fn format_yield(v: f64) -> String {
    let shortest = format!("{v}");
    match shortest.split_once('.') {
        Some((_, frac)) if frac.len() >= 2 => shortest,
        _ => format!("{v:.2}"),
    }
}
