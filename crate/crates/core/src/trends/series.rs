use std::collections::HashMap;

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::time::Timestamp;
use crate::{Error, Result};

/// Tweet counts per fixed-width bin. Bins are aligned to the Unix epoch, so
/// 15-minute bins also line up with IST quarter hours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeSeries {
    pub hashtag: String,
    pub bin_secs: i64,
    /// Start of the first bin; meaningless when `counts` is empty.
    pub start: Timestamp,
    pub counts: Vec<u64>,
    pub includes_retweets: bool,
}

impl VolumeSeries {
    pub fn bin_width(&self) -> Duration {
        Duration::seconds(self.bin_secs)
    }

    pub fn bin_start(&self, i: usize) -> Timestamp {
        self.start + Duration::seconds(self.bin_secs * i as i64)
    }

    /// (bin start, count) pairs.
    pub fn bins(&self) -> impl Iterator<Item = (Timestamp, u64)> + '_ {
        self.counts.iter().enumerate().map(|(i, &n)| (self.bin_start(i), n))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Count in the bin containing `at`, zero outside the series.
    pub fn count_at(&self, at: Timestamp) -> u64 {
        let off = (at - self.start).num_seconds();
        if off < 0 {
            return 0;
        }
        self.counts.get((off / self.bin_secs) as usize).copied().unwrap_or(0)
    }

    /// Series over the given instants, spanning first to last.
    pub fn from_timestamps(
        hashtag: &str,
        times: &[Timestamp],
        bin_width: Duration,
        includes_retweets: bool,
    ) -> Result<Self> {
        let bin_secs = checked_bin_secs(bin_width)?;
        let span = times.iter().min().zip(times.iter().max()).map(|(a, b)| (*a, *b));
        let mut s = Self::zeros(hashtag, span, bin_secs, includes_retweets);
        for t in times {
            let i = ((t.timestamp() - s.start.timestamp()) / bin_secs) as usize;
            s.counts[i] += 1;
        }
        Ok(s)
    }

    fn zeros(hashtag: &str, span: Option<(Timestamp, Timestamp)>, bin_secs: i64, includes_retweets: bool) -> Self {
        let (start, counts) = match span {
            Some((first, last)) => {
                let a = first.timestamp().div_euclid(bin_secs);
                let b = last.timestamp().div_euclid(bin_secs);
                (a * bin_secs, vec![0; (b - a + 1) as usize])
            }
            None => (0, Vec::new()),
        };
        VolumeSeries {
            hashtag: hashtag.to_string(),
            bin_secs,
            start: DateTime::<Utc>::from_timestamp(start, 0).expect("in range"),
            counts,
            includes_retweets,
        }
    }
}

fn checked_bin_secs(bin_width: Duration) -> Result<i64> {
    let secs = bin_width.num_seconds();
    if secs < 1 || Duration::seconds(secs) != bin_width {
        return Err(Error::Config(format!(
            "bin width must be a positive whole number of seconds, got {bin_width}"
        )));
    }
    Ok(secs)
}

/// Volume series for one hashtag. An unknown hashtag yields zeros over the
/// corpus span.
pub fn build_series(
    hashtag: &str,
    corpus: &Corpus,
    bin_width: Duration,
    include_retweets: bool,
) -> Result<VolumeSeries> {
    let times: Vec<Timestamp> = corpus
        .tweets()
        .iter()
        .filter(|t| t.has_hashtag(hashtag) && (include_retweets || !t.counts_as_retweet()))
        .map(|t| t.created_at)
        .collect();
    if times.is_empty() {
        let bin_secs = checked_bin_secs(bin_width)?;
        return Ok(VolumeSeries::zeros(hashtag, corpus.span(), bin_secs, include_retweets));
    }
    VolumeSeries::from_timestamps(hashtag, &times, bin_width, include_retweets)
}

/// Series for several hashtags from one corpus pass, in input order.
pub fn build_series_many(
    hashtags: &[String],
    corpus: &Corpus,
    bin_width: Duration,
    include_retweets: bool,
) -> Result<Vec<VolumeSeries>> {
    checked_bin_secs(bin_width)?;
    let wanted: HashMap<&str, usize> = hashtags.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();
    let mut times: Vec<Vec<Timestamp>> = vec![Vec::new(); hashtags.len()];
    for t in corpus.tweets() {
        if !include_retweets && t.counts_as_retweet() {
            continue;
        }
        for h in &t.hashtags {
            if let Some(&i) = wanted.get(h.as_str()) {
                times[i].push(t.created_at);
            }
        }
    }
    hashtags
        .par_iter()
        .zip(times.par_iter())
        .map(|(h, ts)| {
            if ts.is_empty() {
                build_series(h, corpus, bin_width, include_retweets)
            } else {
                VolumeSeries::from_timestamps(h, ts, bin_width, include_retweets)
            }
        })
        .collect()
}
