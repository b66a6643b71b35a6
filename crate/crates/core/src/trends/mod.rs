//! Hashtag volume series, trend-episode detection, coverage estimates.
//!
//! Trending is modeled by a surrogate rule: a hashtag trends while its
//! rolling 30-minute volume stays at or above 5,000 tweets. Both numbers are
//! configurable.

mod coverage;
mod episodes;
mod series;

pub use coverage::{
    estimate_coverage, trend_summary, trend_summary_for, CoverageAggregate, CoverageReport,
    HashtagCoverage, TrendSummary,
};
pub use episodes::{detect_trend, window_sums, TrendEpisode, TrendParams};
pub use series::{build_series, build_series_many, VolumeSeries};
