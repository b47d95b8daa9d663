use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::fred::RawSeries;
use crate::numerics::Matrix;
use crate::{Error, Result};

/// Treatment of extended gaps (longer than the routine forward-fill limit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillPolicy {
    /// Carry the last pre-gap value across the gap, with `missing_mask`
    /// set so the synthesized cells stay identifiable.
    Carry,
    /// Drop the gap rows from the panel entirely.
    DropTenorRows,
}

/// How one tenor's column was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesProvenance {
    pub source: String,
    pub fill_policy: String,
    /// Holiday/short-gap forward fills (mask stays false).
    pub routine_fills: usize,
    /// Cells synthesized across extended gaps (mask true under carry).
    pub gap_fills: usize,
    pub gap_spans: Vec<(NaiveDate, NaiveDate)>,
}

/// Alignment options. `max_routine_gap` is the longest run of consecutive
/// missing business days still treated as routine (holidays, single-day
/// gaps); anything longer is an extended gap handled by `policy`.
#[derive(Debug, Clone)]
pub struct AlignmentOptions {
    pub tenors: Vec<String>,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub policy: FillPolicy,
    pub max_routine_gap: usize,
}

impl Default for AlignmentOptions {
    fn default() -> Self {
        Self {
            tenors: super::DEFAULT_TICKERS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            start: NaiveDate::from_ymd_opt(1977, 2, 15).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2024, 1, 11).expect("valid date"),
            policy: FillPolicy::Carry,
            max_routine_gap: 5,
        }
    }
}

/// Aligned multi-tenor daily yield matrix on a business-day index.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldPanel {
    index: Vec<NaiveDate>,
    tenors: Vec<String>,
    values: Vec<f64>,
    missing_mask: Vec<bool>,
    provenance: BTreeMap<String, SeriesProvenance>,
}

impl YieldPanel {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn n_tenors(&self) -> usize {
        self.tenors.len()
    }

    pub fn index(&self) -> &[NaiveDate] {
        &self.index
    }

    pub fn tenors(&self) -> &[String] {
        &self.tenors
    }

    pub fn tenor_position(&self, tenor: &str) -> Option<usize> {
        self.tenors.iter().position(|t| t == tenor)
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.tenors.len() + col]
    }

    /// True where the cell was synthesized across an extended gap.
    #[inline]
    pub fn is_masked(&self, row: usize, col: usize) -> bool {
        self.missing_mask[row * self.tenors.len() + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i, col)).collect()
    }

    pub fn provenance(&self) -> &BTreeMap<String, SeriesProvenance> {
        &self.provenance
    }

    /// Rows `range` of all tenors as a dense matrix.
    pub fn submatrix(&self, range: Range<usize>) -> Matrix {
        Matrix::from_fn(range.len(), self.n_tenors(), |i, j| {
            self.value(range.start + i, j)
        })
    }
}

/// Aligns the raw series onto the union of their business-day calendars.
///
/// Isolated missing values are forward-filled from the previous business
/// day; extended gaps follow `options.policy`. Deterministic: identical
/// inputs produce an identical panel including provenance counts.
pub fn align_panel(series: &[RawSeries], options: &AlignmentOptions) -> Result<YieldPanel> {
    let mut by_ticker: BTreeMap<&str, &RawSeries> = BTreeMap::new();
    for s in series {
        by_ticker.insert(s.ticker(), s);
    }
    let mut ordered = Vec::with_capacity(options.tenors.len());
    for tenor in &options.tenors {
        let s = by_ticker
            .get(tenor.as_str())
            .ok_or_else(|| Error::Config(format!("tenor {tenor} missing from input series")))?;
        ordered.push(*s);
    }

    // Business-day index: union of row dates inside the configured span.
    let mut dates: BTreeSet<NaiveDate> = BTreeSet::new();
    for s in &ordered {
        for (date, _) in s.observations() {
            if *date >= options.start && *date <= options.end {
                dates.insert(*date);
            }
        }
    }
    let index: Vec<NaiveDate> = dates.into_iter().collect();
    if index.is_empty() {
        return Err(Error::Alignment(format!(
            "no observations between {} and {}",
            options.start, options.end
        )));
    }

    let n = index.len();
    let m = ordered.len();
    let mut values = vec![f64::NAN; n * m];
    let mut mask = vec![false; n * m];
    let mut drop_rows: BTreeSet<usize> = BTreeSet::new();
    let mut provenance = BTreeMap::new();

    for (j, s) in ordered.iter().enumerate() {
        let lookup: BTreeMap<NaiveDate, Option<f64>> = s.observations().iter().cloned().collect();
        // Last value strictly before the index start seeds fills at the top.
        let mut last: Option<f64> = s
            .observations()
            .iter()
            .take_while(|(d, _)| *d < options.start)
            .filter_map(|(_, v)| *v)
            .last();

        let mut prov = SeriesProvenance {
            source: "fred-csv".into(),
            fill_policy: match options.policy {
                FillPolicy::Carry => "carry".into(),
                FillPolicy::DropTenorRows => "drop-tenor-rows".into(),
            },
            routine_fills: 0,
            gap_fills: 0,
            gap_spans: Vec::new(),
        };

        let mut i = 0;
        while i < n {
            if let Some(v) = lookup.get(&index[i]).copied().flatten() {
                values[i * m + j] = v;
                last = Some(v);
                i += 1;
                continue;
            }
            // Start of a missing run.
            let run_start = i;
            while i < n && lookup.get(&index[i]).copied().flatten().is_none() {
                i += 1;
            }
            let run_len = i - run_start;
            let seed = last.ok_or_else(|| {
                Error::Alignment(format!(
                    "{}: cannot forward-fill at series start ({})",
                    s.ticker(),
                    index[run_start]
                ))
            })?;
            if run_len <= options.max_routine_gap {
                for row in run_start..i {
                    values[row * m + j] = seed;
                }
                prov.routine_fills += run_len;
            } else {
                match options.policy {
                    FillPolicy::Carry => {
                        for row in run_start..i {
                            values[row * m + j] = seed;
                            mask[row * m + j] = true;
                        }
                        prov.gap_fills += run_len;
                        prov.gap_spans.push((index[run_start], index[i - 1]));
                    }
                    FillPolicy::DropTenorRows => {
                        for row in run_start..i {
                            values[row * m + j] = seed; // placeholder; row dropped below
                            drop_rows.insert(row);
                        }
                        prov.gap_spans.push((index[run_start], index[i - 1]));
                    }
                }
            }
        }
        provenance.insert(s.ticker().to_string(), prov);
    }

    let (index, values, mask) = if drop_rows.is_empty() {
        (index, values, mask)
    } else {
        let mut new_index = Vec::with_capacity(n - drop_rows.len());
        let mut new_values = Vec::with_capacity((n - drop_rows.len()) * m);
        let mut new_mask = Vec::with_capacity((n - drop_rows.len()) * m);
        for row in 0..n {
            if drop_rows.contains(&row) {
                continue;
            }
            new_index.push(index[row]);
            new_values.extend_from_slice(&values[row * m..(row + 1) * m]);
            new_mask.extend_from_slice(&mask[row * m..(row + 1) * m]);
        }
        (new_index, new_values, new_mask)
    };

    // Post-alignment invariants: finite values everywhere, and no row that
    // is synthesized in every tenor.
    for (i, chunk) in values.chunks(m).enumerate() {
        if chunk.iter().any(|v| !v.is_finite()) {
            return Err(Error::Alignment(format!("non-finite cell on {}", index[i])));
        }
    }
    if mask.chunks(m).any(|row| row.iter().all(|&b| b)) {
        return Err(Error::Alignment(
            "a panel row is synthesized in every tenor".into(),
        ));
    }

    Ok(YieldPanel {
        index,
        tenors: options.tenors.clone(),
        values,
        missing_mask: mask,
        provenance,
    })
}

/// A contiguous training slice plus its test span; the unit of one
/// fit-forecast-score step. Borrows the panel, so window mutation can never
/// touch panel data.
#[derive(Debug, Clone, Copy)]
pub struct SeriesWindow<'a> {
    panel: &'a YieldPanel,
    train: (usize, usize),
    test: (usize, usize),
}

/// Cuts `[start, start+train_len)` and the following `horizon` rows.
pub fn slice_window(
    panel: &YieldPanel,
    start: usize,
    train_len: usize,
    horizon: usize,
) -> Result<SeriesWindow<'_>> {
    let end = start
        .checked_add(train_len)
        .and_then(|t| t.checked_add(horizon))
        .ok_or_else(|| Error::Bounds("window span overflows".into()))?;
    if train_len == 0 || horizon == 0 {
        return Err(Error::Bounds(
            "window needs nonzero train length and horizon".into(),
        ));
    }
    if end > panel.len() {
        return Err(Error::Bounds(format!(
            "window [{start}, {end}) exceeds panel length {}",
            panel.len()
        )));
    }
    Ok(SeriesWindow {
        panel,
        train: (start, start + train_len),
        test: (start + train_len, end),
    })
}

impl<'a> SeriesWindow<'a> {
    pub fn panel(&self) -> &'a YieldPanel {
        self.panel
    }

    pub fn train_range(&self) -> Range<usize> {
        self.train.0..self.train.1
    }

    pub fn test_range(&self) -> Range<usize> {
        self.test.0..self.test.1
    }

    pub fn train_len(&self) -> usize {
        self.train.1 - self.train.0
    }

    pub fn horizon(&self) -> usize {
        self.test.1 - self.test.0
    }

    pub fn train_series(&self, col: usize) -> Vec<f64> {
        self.train_range()
            .map(|i| self.panel.value(i, col))
            .collect()
    }

    pub fn test_series(&self, col: usize) -> Vec<f64> {
        self.test_range()
            .map(|i| self.panel.value(i, col))
            .collect()
    }

    pub fn train_dates(&self) -> &'a [NaiveDate] {
        &self.panel.index()[self.train_range()]
    }

    pub fn train_matrix(&self) -> Matrix {
        self.panel.submatrix(self.train_range())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::parse_fred_csv;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    /// Ten business days starting 2020-01-06 (a Monday).
    fn biz_days() -> Vec<NaiveDate> {
        vec![
            date(2020, 1, 6),
            date(2020, 1, 7),
            date(2020, 1, 8),
            date(2020, 1, 9),
            date(2020, 1, 10),
            date(2020, 1, 13),
            date(2020, 1, 14),
            date(2020, 1, 15),
            date(2020, 1, 16),
            date(2020, 1, 17),
        ]
    }

    fn series_from(ticker: &str, values: &[Option<f64>]) -> RawSeries {
        let obs: Vec<(NaiveDate, Option<f64>)> =
            biz_days().into_iter().zip(values.iter().cloned()).collect();
        RawSeries::new(ticker, obs).unwrap()
    }

    fn options(tenors: &[&str]) -> AlignmentOptions {
        AlignmentOptions {
            tenors: tenors.iter().map(|s| s.to_string()).collect(),
            start: date(2020, 1, 6),
            end: date(2020, 1, 17),
            policy: FillPolicy::Carry,
            max_routine_gap: 2,
        }
    }

    #[test]
    fn aligns_full_series() {
        let a = series_from("A", &[Some(1.0); 10]);
        let b = series_from("B", &[Some(2.0); 10]);
        let panel = align_panel(&[a, b], &options(&["A", "B"])).unwrap();
        assert_eq!(panel.len(), 10);
        assert_eq!(panel.n_tenors(), 2);
        assert_eq!(panel.index()[0], date(2020, 1, 6));
        assert_eq!(panel.value(3, 1), 2.0);
        assert!(!panel.is_masked(3, 1));
    }

    #[test]
    fn single_missing_day_is_routine_fill() {
        let mut vals = vec![Some(1.0); 10];
        vals[4] = None;
        let a = series_from("A", &vals);
        let b = series_from("B", &[Some(2.0); 10]);
        let panel = align_panel(&[a, b], &options(&["A", "B"])).unwrap();
        assert_eq!(panel.value(4, 0), 1.0);
        assert!(!panel.is_masked(4, 0));
        assert_eq!(panel.provenance()["A"].routine_fills, 1);
        assert_eq!(panel.provenance()["A"].gap_fills, 0);
    }

    #[test]
    fn extended_gap_carries_with_mask() {
        let mut vals: Vec<Option<f64>> = (0..10).map(|i| Some(1.0 + i as f64)).collect();
        for slot in vals.iter_mut().take(7).skip(3) {
            *slot = None; // 4 consecutive missing > max_routine_gap = 2
        }
        let a = series_from("A", &vals);
        let b = series_from("B", &[Some(2.0); 10]);
        let panel = align_panel(&[a, b], &options(&["A", "B"])).unwrap();
        for row in 3..7 {
            assert_eq!(panel.value(row, 0), 3.0, "carried last pre-gap value");
            assert!(panel.is_masked(row, 0));
        }
        assert!(!panel.is_masked(7, 0));
        let prov = &panel.provenance()["A"];
        assert_eq!(prov.gap_fills, 4);
        assert_eq!(prov.gap_spans, vec![(date(2020, 1, 9), date(2020, 1, 14))]);
    }

    #[test]
    fn drop_tenor_rows_removes_gap_rows() {
        let mut vals: Vec<Option<f64>> = (0..10).map(|i| Some(1.0 + i as f64)).collect();
        for slot in vals.iter_mut().take(7).skip(3) {
            *slot = None;
        }
        let a = series_from("A", &vals);
        let b = series_from("B", &[Some(2.0); 10]);
        let mut opts = options(&["A", "B"]);
        opts.policy = FillPolicy::DropTenorRows;
        let panel = align_panel(&[a, b], &opts).unwrap();
        assert_eq!(panel.len(), 6);
        assert!(!panel.index().contains(&date(2020, 1, 10)));
    }

    #[test]
    fn holiday_row_fills_every_tenor() {
        let mut vals_a = vec![Some(1.0); 10];
        let mut vals_b = vec![Some(2.0); 10];
        vals_a[5] = None;
        vals_b[5] = None;
        let panel = align_panel(
            &[series_from("A", &vals_a), series_from("B", &vals_b)],
            &options(&["A", "B"]),
        )
        .unwrap();
        assert_eq!(panel.value(5, 0), 1.0);
        assert_eq!(panel.value(5, 1), 2.0);
        assert!(!panel.is_masked(5, 0) && !panel.is_masked(5, 1));
    }

    #[test]
    fn missing_tenor_is_config_error() {
        let a = series_from("A", &[Some(1.0); 10]);
        let err = align_panel(&[a], &options(&["A", "B"])).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn unseedable_start_is_alignment_error() {
        let mut vals = vec![Some(1.0); 10];
        vals[0] = None;
        let a = series_from("A", &vals);
        let b = series_from("B", &[Some(2.0); 10]);
        let err = align_panel(&[a, b], &options(&["A", "B"])).unwrap_err();
        assert!(matches!(err, Error::Alignment(_)), "{err}");
    }

    #[test]
    fn seeds_from_observations_before_span() {
        let payload = "DATE,A\n2020-01-03,0.5\n2020-01-06,.\n2020-01-07,1.0\n";
        let a = parse_fred_csv(payload.as_bytes()).unwrap();
        let mut opts = options(&["A"]);
        opts.start = date(2020, 1, 6);
        opts.end = date(2020, 1, 7);
        let panel = align_panel(&[a], &opts).unwrap();
        assert_eq!(panel.value(0, 0), 0.5);
    }

    #[test]
    fn alignment_is_deterministic() {
        let mut vals: Vec<Option<f64>> = (0..10).map(|i| Some(1.0 + i as f64)).collect();
        vals[4] = None;
        let a = series_from("A", &vals);
        let b = series_from("B", &[Some(2.0); 10]);
        let p1 = align_panel(&[a.clone(), b.clone()], &options(&["A", "B"])).unwrap();
        let p2 = align_panel(&[a, b], &options(&["A", "B"])).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn window_slicing_bounds() {
        let a = series_from("A", &[Some(1.0); 10]);
        let panel = align_panel(&[a], &options(&["A"])).unwrap();
        let w = slice_window(&panel, 0, 6, 2).unwrap();
        assert_eq!(w.train_range(), 0..6);
        assert_eq!(w.test_range(), 6..8);
        assert_eq!(w.train_series(0).len(), 6);
        assert_eq!(w.test_series(0), vec![1.0, 1.0]);
        assert_eq!(w.train_dates().len(), 6);
        assert!(matches!(
            slice_window(&panel, 9, 6, 2),
            Err(Error::Bounds(_))
        ));
        assert!(matches!(
            slice_window(&panel, 0, 10, 1),
            Err(Error::Bounds(_))
        ));
    }
}
