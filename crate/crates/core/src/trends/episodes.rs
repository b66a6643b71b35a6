use chrono::Duration;
use serde::Serialize;

use super::VolumeSeries;
use crate::time::Timestamp;
use crate::{Error, Result};

/// Surrogate trending rule: a rolling window sum at or above `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrendParams {
    pub window: Duration,
    pub threshold: u64,
    /// How long the window sum must stay below threshold to end an episode.
    pub clear_after: Duration,
}

impl Default for TrendParams {
    fn default() -> Self {
        TrendParams {
            window: Duration::minutes(30),
            threshold: 5000,
            clear_after: Duration::minutes(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrendEpisode {
    pub hashtag: String,
    pub onset_at: Timestamp,
    pub cleared_at: Option<Timestamp>,
    pub peak_window_count: u64,
    /// Tweets in the series from its start through the episode end.
    pub total_tweets: u64,
}

impl TrendEpisode {
    pub fn duration(&self) -> Option<Duration> {
        self.cleared_at.map(|c| c - self.onset_at)
    }
}

/// Rolling sums: entry `i` covers the `k` bins ending at bin `i`.
pub fn window_sums(counts: &[u64], k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(counts.len());
    let mut sum = 0u64;
    for (i, &c) in counts.iter().enumerate() {
        sum += c;
        if i >= k {
            sum -= counts[i - k];
        }
        out.push(sum);
    }
    out
}

/// Scan the series for trend episodes. A window is stepped one bin at a
/// time; an episode opens at the end of the first window reaching the
/// threshold and clears at the end of the first below-threshold window of a
/// run lasting at least `clear_after`. Time after the last bin counts as
/// empty, so a corpus cut off mid-trend reports a clear at the cut.
pub fn detect_trend(series: &VolumeSeries, params: &TrendParams) -> Result<Vec<TrendEpisode>> {
    let bin = series.bin_width();
    if params.window < bin || params.window <= Duration::zero() {
        return Err(Error::Config(format!(
            "trend window {} must be at least the bin width {}",
            params.window, bin
        )));
    }
    if params.threshold == 0 {
        return Err(Error::Config("trend threshold must be positive".into()));
    }
    let k = (params.window.num_seconds() / series.bin_secs) as usize;
    let clear_bins = (params.clear_after.num_seconds() + series.bin_secs - 1).div_euclid(series.bin_secs).max(1) as usize;
    let mut counts = series.counts.clone();
    counts.resize(counts.len() + k + clear_bins, 0);
    let sums = window_sums(&counts, k);
    let window_end = |i: usize| series.bin_start(i + 1);

    let mut cumulative = Vec::with_capacity(sums.len());
    let mut acc = 0u64;
    for &c in &counts {
        acc += c;
        cumulative.push(acc);
    }

    let mut episodes = Vec::new();
    let mut open: Option<(usize, u64)> = None;
    let mut below_since: Option<usize> = None;
    for (i, &s) in sums.iter().enumerate() {
        match open.as_mut() {
            None => {
                if s >= params.threshold {
                    open = Some((i, s));
                    below_since = None;
                }
            }
            Some((onset, peak)) => {
                if s >= params.threshold {
                    *peak = (*peak).max(s);
                    below_since = None;
                    continue;
                }
                let first_below = *below_since.get_or_insert(i);
                if i + 1 - first_below >= clear_bins {
                    episodes.push(TrendEpisode {
                        hashtag: series.hashtag.clone(),
                        onset_at: window_end(*onset),
                        cleared_at: Some(window_end(first_below)),
                        peak_window_count: *peak,
                        total_tweets: cumulative[first_below],
                    });
                    open = None;
                    below_since = None;
                }
            }
        }
    }
    if let Some((onset, peak)) = open {
        episodes.push(TrendEpisode {
            hashtag: series.hashtag.clone(),
            onset_at: window_end(onset),
            cleared_at: None,
            peak_window_count: peak,
            total_tweets: acc,
        });
    }
    Ok(episodes)
}
