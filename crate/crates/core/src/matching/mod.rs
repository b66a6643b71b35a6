//! Linking tweets to template-bank entries.
//!
//! Three tiers are tried, best first:
//!
//! * **Exact**: canonical forms are equal and the tweet's canonical form is at
//!   least [`EXACT_MIN_CHARS`] scalars long.
//! * **Spaceless**: the forms are equal once whitespace is removed; same gate.
//! * **Fuzzy(d)**: Levenshtein distance `d <= 5` between canonical forms, for
//!   tweets at least [`FUZZY_MIN_CHARS`] long.

mod distance;
mod index;

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Tweet};
use crate::textnorm::normalize_with;
use crate::time::Timestamp;
use crate::{Error, Result};

pub use distance::{edit_distance_bounded, BoundedLevenshtein};
pub use index::{Hit, TemplateIndex, TemplateRef};

pub const EXACT_MIN_CHARS: usize = 20;
pub const FUZZY_MIN_CHARS: usize = 50;
pub const MAX_FUZZY_DISTANCE: usize = 5;

/// Match quality; variant order is rank order, so `Ord` picks the best tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchTier {
    Exact,
    Spaceless,
    Fuzzy(u8),
}

impl MatchTier {
    pub fn fuzzy(distance: usize) -> Result<Self> {
        if (1..=MAX_FUZZY_DISTANCE).contains(&distance) {
            Ok(MatchTier::Fuzzy(distance as u8))
        } else {
            Err(Error::Invariant(format!("fuzzy distance {distance} outside 1..=5")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatchTier::Exact => "exact",
            MatchTier::Spaceless => "spaceless",
            MatchTier::Fuzzy(_) => "fuzzy",
        }
    }

    /// Edit distance reported alongside the tier; zero for the equality tiers.
    pub fn distance(&self) -> usize {
        match self {
            MatchTier::Fuzzy(d) => usize::from(*d),
            _ => 0,
        }
    }
}

impl fmt::Display for MatchTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchTier::Fuzzy(d) => write!(f, "fuzzy({d})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "MatchLine", try_from = "MatchLine")]
pub struct MatchRecord {
    pub tweet_id: String,
    pub bank_id: String,
    pub template_index: usize,
    pub tier: MatchTier,
    pub is_retweet: bool,
    pub matched_at: Timestamp,
}

impl MatchRecord {
    fn sort_key(&self) -> (&str, &str, usize) {
        (&self.tweet_id, &self.bank_id, self.template_index)
    }
}

impl Ord for MatchRecord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then(self.tier.cmp(&other.tier))
    }
}

impl PartialOrd for MatchRecord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// On-disk layout of a match record.
#[derive(Serialize, Deserialize)]
struct MatchLine {
    tweet_id: String,
    bank_id: String,
    template_index: usize,
    tier: String,
    distance: usize,
    is_retweet: bool,
    created_at: Timestamp,
}

impl From<MatchRecord> for MatchLine {
    fn from(r: MatchRecord) -> Self {
        MatchLine {
            tweet_id: r.tweet_id,
            bank_id: r.bank_id,
            template_index: r.template_index,
            tier: r.tier.name().to_string(),
            distance: r.tier.distance(),
            is_retweet: r.is_retweet,
            created_at: r.matched_at,
        }
    }
}

impl TryFrom<MatchLine> for MatchRecord {
    type Error = String;

    fn try_from(l: MatchLine) -> std::result::Result<Self, String> {
        let tier = match l.tier.as_str() {
            "exact" => MatchTier::Exact,
            "spaceless" => MatchTier::Spaceless,
            "fuzzy" => MatchTier::fuzzy(l.distance).map_err(|e| e.to_string())?,
            other => return Err(format!("unknown match tier {other:?}")),
        };
        Ok(MatchRecord {
            tweet_id: l.tweet_id,
            bank_id: l.bank_id,
            template_index: l.template_index,
            tier,
            is_retweet: l.is_retweet,
            matched_at: l.created_at,
        })
    }
}

/// Text used for matching: a leading `RT @handle:` marker is dropped so
/// that retweets of a template compare against the template itself.
pub fn matchable_text(raw: &str) -> &str {
    let t = raw.trim_start();
    let Some(rest) = t.strip_prefix("RT @") else {
        return raw;
    };
    let handle_end = rest
        .find(|c: char| !(c.is_alphanumeric() || c == '_'))
        .unwrap_or(rest.len());
    let rest = &rest[handle_end..];
    rest.strip_prefix(':').unwrap_or(rest)
}

fn record(tweet: &Tweet, index: &TemplateIndex, hit: &Hit) -> MatchRecord {
    let r = index.template_ref(hit.entry);
    MatchRecord {
        tweet_id: tweet.tweet_id.clone(),
        bank_id: r.bank_id.to_string(),
        template_index: r.template_index,
        tier: hit.tier,
        is_retweet: tweet.counts_as_retweet(),
        matched_at: tweet.created_at,
    }
}

/// Every (bank, template) pair the tweet matches, each at its best tier,
/// ordered by bank id then template index.
pub fn match_tweet_all(tweet: &Tweet, index: &TemplateIndex) -> Vec<MatchRecord> {
    let form = normalize_with(matchable_text(&tweet.raw_text), index.options());
    let mut hits = index.lookup(&form);
    hits.sort_by(|a, b| index.order_key(a.entry).cmp(&index.order_key(b.entry)));
    hits.iter().map(|h| record(tweet, index, h)).collect()
}

/// Best match for one tweet; ties go to the lowest bank id, then the lowest
/// template index.
pub fn match_tweet(tweet: &Tweet, index: &TemplateIndex) -> Option<MatchRecord> {
    let form = normalize_with(matchable_text(&tweet.raw_text), index.options());
    index
        .lookup(&form)
        .into_iter()
        .min_by(|a, b| {
            a.tier
                .cmp(&b.tier)
                .then_with(|| index.order_key(a.entry).cmp(&index.order_key(b.entry)))
        })
        .map(|h| record(tweet, index, &h))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TierCounts {
    pub exact: usize,
    pub spaceless: usize,
    /// Indexed by distance - 1.
    pub fuzzy: [usize; MAX_FUZZY_DISTANCE],
}

impl TierCounts {
    pub fn add(&mut self, tier: MatchTier) {
        match tier {
            MatchTier::Exact => self.exact += 1,
            MatchTier::Spaceless => self.spaceless += 1,
            MatchTier::Fuzzy(d) => self.fuzzy[usize::from(d) - 1] += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.exact + self.spaceless + self.fuzzy.iter().sum::<usize>()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchOutput {
    /// Sorted by tweet id, bank id, template index.
    pub records: Vec<MatchRecord>,
    pub counts: TierCounts,
}

impl MatchOutput {
    /// Number of distinct tweets with at least one match.
    pub fn matched_tweets(&self) -> usize {
        let mut n = 0;
        let mut last: Option<&str> = None;
        for r in &self.records {
            if last != Some(r.tweet_id.as_str()) {
                n += 1;
                last = Some(&r.tweet_id);
            }
        }
        n
    }
}

/// Match every tweet on `workers` threads. The output does not depend on
/// the worker count.
pub fn match_corpus(corpus: &Corpus, index: &TemplateIndex, workers: usize) -> Result<MatchOutput> {
    if workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let mut records: Vec<MatchRecord> = pool.install(|| {
        corpus
            .tweets()
            .par_iter()
            .flat_map_iter(|t| {
                let form = normalize_with(matchable_text(&t.raw_text), index.options());
                let hits = index.lookup(&form);
                hits.into_iter()
                    .map(|h| record(t, index, &h))
                    .collect::<Vec<_>>()
            })
            .collect()
    });
    records.sort_unstable();

    let mut counts = TierCounts::default();
    for r in &records {
        counts.add(r.tier);
    }
    Ok(MatchOutput { records, counts })
}
