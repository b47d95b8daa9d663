//! Scoring, aggregation, ranking, and report emission.

mod aggregate;
mod emit;
mod leaderboard;
mod metrics;

pub use aggregate::{
    aggregate, AggregateReport, BlockStats, GroupAggregate, GroupKey, MetricStats,
};
pub use emit::{
    emit, load_results, parse_windows_csv, render_block_csv, render_markdown, render_windows_csv,
    render_windows_csv_row, CsvProvenance, EmitFormat, EmitOptions, WINDOWS_CSV_HEADER,
};
pub use leaderboard::{leaderboard, Leaderboard, LeaderboardCell, LeaderboardRow};
pub use metrics::{mape, rmse};
