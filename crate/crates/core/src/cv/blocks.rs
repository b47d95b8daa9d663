use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::windows::{Scheme, WindowPlan};
use crate::{Error, Result};

/// Inclusive `[start, end]` pair of dates describing one training window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateSpan {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

/// One hyperparameter time block: the first and last training windows that
/// belong to it, for each scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeBlock {
    pub id: usize,
    pub sliding_start: DateSpan,
    pub sliding_end: DateSpan,
    pub expanding_start: DateSpan,
    pub expanding_end: DateSpan,
}

/// The nine hyperparameter time blocks of the benchmark protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeBlockTable {
    pub blocks: Vec<TimeBlock>,
}

fn d(y: i32, m: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, day).expect("valid block table date")
}

fn span(a: NaiveDate, b: NaiveDate) -> DateSpan {
    DateSpan { start: a, end: b }
}

impl Default for TimeBlockTable {
    fn default() -> Self {
        // (sliding start, sliding end, expanding start, expanding end) per block.
        let rows: [(
            NaiveDate,
            NaiveDate,
            NaiveDate,
            NaiveDate,
            NaiveDate,
            NaiveDate,
        ); 9] = [
            (
                d(1977, 2, 15),
                d(1981, 2, 13),
                d(1982, 2, 16),
                d(1986, 2, 14),
                d(1981, 2, 13),
                d(1986, 2, 14),
            ),
            (
                d(1982, 2, 23),
                d(1986, 2, 21),
                d(1987, 2, 24),
                d(1991, 2, 22),
                d(1986, 2, 21),
                d(1991, 2, 22),
            ),
            (
                d(1987, 3, 3),
                d(1991, 3, 1),
                d(1992, 3, 3),
                d(1996, 3, 1),
                d(1991, 3, 1),
                d(1996, 3, 1),
            ),
            (
                d(1992, 3, 10),
                d(1996, 3, 8),
                d(1997, 3, 11),
                d(2001, 3, 9),
                d(1996, 3, 8),
                d(2001, 3, 9),
            ),
            (
                d(1997, 3, 18),
                d(2001, 3, 16),
                d(2002, 3, 12),
                d(2006, 3, 10),
                d(2001, 3, 16),
                d(2006, 3, 10),
            ),
            (
                d(2002, 3, 19),
                d(2006, 3, 17),
                d(2007, 3, 20),
                d(2011, 3, 18),
                d(2006, 3, 17),
                d(2011, 3, 18),
            ),
            (
                d(2007, 3, 27),
                d(2011, 3, 25),
                d(2012, 3, 27),
                d(2016, 3, 25),
                d(2011, 3, 25),
                d(2016, 3, 25),
            ),
            (
                d(2012, 4, 3),
                d(2016, 4, 1),
                d(2017, 4, 4),
                d(2021, 4, 2),
                d(2016, 4, 1),
                d(2021, 4, 2),
            ),
            (
                d(2017, 4, 11),
                d(2021, 4, 9),
                d(2019, 12, 17),
                d(2023, 12, 15),
                d(2021, 4, 9),
                d(2023, 12, 15),
            ),
        ];
        let origin = d(1977, 2, 15);
        let blocks = rows
            .iter()
            .enumerate()
            .map(|(id, row)| TimeBlock {
                id,
                sliding_start: span(row.0, row.1),
                sliding_end: span(row.2, row.3),
                expanding_start: span(origin, row.4),
                expanding_end: span(origin, row.5),
            })
            .collect();
        Self { blocks }
    }
}

impl TimeBlockTable {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn end_window_end(&self, block: usize, scheme: Scheme) -> NaiveDate {
        match scheme {
            Scheme::Sliding => self.blocks[block].sliding_end.end,
            Scheme::Expanding => self.blocks[block].expanding_end.end,
        }
    }
}

/// Maps every window of the plan to a block id.
///
/// A window belongs to the earliest block whose end-window end date is on
/// or after the window's train-end date; windows falling in the small
/// inter-block gaps attach to the later block, and windows past the last
/// tabulated end attach to the last block.
pub fn assign_blocks(
    plan: &WindowPlan,
    table: &TimeBlockTable,
    index: &[NaiveDate],
) -> Result<Vec<usize>> {
    if table.is_empty() {
        return Err(Error::Config("time block table is empty".into()));
    }
    let mut assignments = Vec::with_capacity(plan.windows.len());
    for w in &plan.windows {
        if w.train_end == 0 || w.train_end > index.len() {
            return Err(Error::Bounds(format!(
                "window train end {} outside panel index of length {}",
                w.train_end,
                index.len()
            )));
        }
        let train_end_date = index[w.train_end - 1];
        let block = (0..table.len())
            .find(|&b| train_end_date <= table.end_window_end(b, plan.scheme))
            .unwrap_or(table.len() - 1);
        assignments.push(block);
    }
    Ok(assignments)
}
