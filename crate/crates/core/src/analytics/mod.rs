//! Descriptive statistics over a [`Dataset`](crate::model::Dataset):
//! frequency rankings, cross-tabs, temporal histograms, hotspots, night-hour
//! series and per-city profiles.
//!
//! Every function is pure. Functions that take `records` accept any iterator
//! of `&ViolationRecord`, so callers narrow the scope with ordinary iterator
//! filters.

use alloc::string::String;
use thiserror::Error;

mod night;
mod profile;
mod spatial;
mod stats;
mod tables;
mod temporal;

pub use night::{
    is_night_event, night_duration_series, night_series, pearson_correlation, per_capita_ratio,
    NightSeries, NightWindow,
};
pub use profile::{city_profile, CityProfile, ProfileConfig};
pub(crate) use profile::dominant_label;
pub use spatial::{
    hotspot_detect, location_counts, location_distribution_stats, HotspotCell, HotspotReport,
    DEFAULT_HOTSPOT_THRESHOLD,
};
pub use stats::{round_to, summary_stats, SummaryStats};
pub use tables::{
    categorize_violation, crosstab, dimension_breakdown, rank_violations, Breakdown,
    BreakdownRow, Category, CategoryMap, CrossTab, Dimension, FrequencyRow, FrequencyTable,
};
pub use temporal::{detect_peaks, temporal_histogram, Axis, Histogram, DEFAULT_MIN_PROMINENCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("empty input")]
    EmptyInput,
    #[error("top_k must be at least 1")]
    InvalidTopK,
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("unknown city `{0}`")]
    UnknownCity(String),
    #[error("no census row for city `{0}`")]
    MissingCensus(String),
    #[error("month {month} covers {present} of {expected} days")]
    IncompleteMonth { month: u32, present: u32, expected: u32 },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("population is zero")]
    ZeroPopulation,
}
