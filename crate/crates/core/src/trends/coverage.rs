use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::TrendEpisode;
use crate::corpus::{clean_hashtag, median, Corpus, TrendSnapshot};
use crate::detection::HashtagVerdict;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HashtagCoverage {
    pub hashtag: String,
    /// Corpus tweets under the hashtag, retweets included.
    pub corpus_count: u64,
    /// Largest count reported by any snapshot.
    pub reported_count: u64,
    /// corpus_count / reported_count, capped at 1.
    pub coverage: f64,
    /// The corpus holds more tweets than were ever reported.
    pub over_report: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageAggregate {
    pub hashtags: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    /// Capped corpus total over reported total.
    pub pooled: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Sorted by hashtag.
    pub per_hashtag: Vec<HashtagCoverage>,
    /// Absent when no snapshot hashtag occurs in the corpus.
    pub aggregate: Option<CoverageAggregate>,
}

/// Compare corpus volume against counts reported by trend snapshots.
/// Snapshot entries without a count, or whose hashtag never occurs in the
/// corpus, are skipped.
pub fn estimate_coverage(corpus: &Corpus, snapshots: &[TrendSnapshot]) -> CoverageReport {
    let mut reported: BTreeMap<String, u64> = BTreeMap::new();
    for e in snapshots.iter().flat_map(|s| &s.entries) {
        if let Some(n) = e.reported_tweet_count.filter(|&n| n > 0) {
            let r = reported.entry(clean_hashtag(&e.hashtag)).or_default();
            *r = (*r).max(n);
        }
    }

    let mut counts: HashMap<&str, u64> = HashMap::new();
    for t in corpus.tweets() {
        for h in &t.hashtags {
            if reported.contains_key(h.as_str()) {
                *counts.entry(h).or_default() += 1;
            }
        }
    }

    let per_hashtag: Vec<HashtagCoverage> = reported
        .iter()
        .filter_map(|(tag, &rep)| {
            let n = *counts.get(tag.as_str())?;
            Some(HashtagCoverage {
                hashtag: tag.clone(),
                corpus_count: n,
                reported_count: rep,
                coverage: (n as f64 / rep as f64).min(1.0),
                over_report: n > rep,
            })
        })
        .collect();

    let aggregate = (!per_hashtag.is_empty()).then(|| {
        let fr: Vec<f64> = per_hashtag.iter().map(|c| c.coverage).collect();
        let capped: u64 = per_hashtag.iter().map(|c| c.corpus_count.min(c.reported_count)).sum();
        let rep: u64 = per_hashtag.iter().map(|c| c.reported_count).sum();
        CoverageAggregate {
            hashtags: fr.len(),
            min: fr.iter().copied().fold(f64::INFINITY, f64::min),
            max: fr.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            median: median(fr).expect("non-empty"),
            pooled: capped as f64 / rep as f64,
        }
    });
    CoverageReport { per_hashtag, aggregate }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSummary {
    pub campaigns: usize,
    pub trending: usize,
    pub not_trending: usize,
    pub episodes: usize,
    /// Mean over cleared episodes.
    pub mean_episode_minutes: Option<f64>,
    /// Mean over trending campaigns of their largest episode total.
    pub mean_total_tweets: Option<f64>,
}

/// Summary over an explicit set of campaign hashtags.
pub fn trend_summary_for(episodes: &[TrendEpisode], campaigns: &[&str]) -> TrendSummary {
    let campaigns: BTreeSet<&str> = campaigns.iter().copied().collect();
    let mut best: BTreeMap<&str, u64> = BTreeMap::new();
    let mut durations = Vec::new();
    let mut n_episodes = 0;
    for e in episodes {
        if !campaigns.contains(e.hashtag.as_str()) {
            continue;
        }
        n_episodes += 1;
        let b = best.entry(&e.hashtag).or_default();
        *b = (*b).max(e.total_tweets);
        if let Some(d) = e.duration() {
            durations.push(d.num_seconds() as f64 / 60.0);
        }
    }
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let totals: Vec<f64> = best.values().map(|&n| n as f64).collect();
    TrendSummary {
        campaigns: campaigns.len(),
        trending: best.len(),
        not_trending: campaigns.len() - best.len(),
        episodes: n_episodes,
        mean_episode_minutes: mean(&durations),
        mean_total_tweets: mean(&totals),
    }
}

/// Summary over the hashtags flagged at the standard threshold.
pub fn trend_summary(episodes: &[TrendEpisode], verdicts: &[HashtagVerdict]) -> TrendSummary {
    let campaigns: Vec<&str> = verdicts
        .iter()
        .filter(|v| v.label.is_suspicious())
        .map(|v| v.hashtag.as_str())
        .collect();
    trend_summary_for(episodes, &campaigns)
}
