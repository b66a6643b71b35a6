use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Tweet};
use crate::matching::{edit_distance_bounded, EXACT_MIN_CHARS, FUZZY_MIN_CHARS, MAX_FUZZY_DISTANCE};
use crate::textnorm::normalize;
use crate::{Error, Result};

/// How eligible originals are grouped into duplicates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DupGrouping {
    /// Identical canonical forms.
    #[default]
    Exact,
    /// Also joins canonicals of at least 50 scalars within edit distance 5.
    Fuzzy,
}

/// Which tweets the volume gate counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum VolumeBasis {
    #[default]
    AllTweets,
    Originals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NotEvaluated,
    Organic,
    Suspicious,
    SuspiciousConservative,
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::NotEvaluated => "not_evaluated",
            Label::Organic => "organic",
            Label::Suspicious => "suspicious",
            Label::SuspiciousConservative => "suspicious_conservative",
        }
    }

    /// Flagged at the standard threshold (conservative flags included).
    pub fn is_suspicious(&self) -> bool {
        matches!(self, Label::Suspicious | Label::SuspiciousConservative)
    }
}

/// Repeated-content counts for one hashtag.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RatioStats {
    pub volume: usize,
    pub original_volume: usize,
    pub eligible_volume: usize,
    pub repeated_count: usize,
    /// Absent when no original is long enough to be eligible.
    pub duplicate_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashtagVerdict {
    pub hashtag: String,
    pub volume: usize,
    pub original_volume: usize,
    pub eligible_volume: usize,
    pub repeated_count: usize,
    pub duplicate_ratio: Option<f64>,
    pub seed_participants: usize,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Flag when the ratio is strictly above this.
    pub standard: f64,
    /// Flag conservatively when the ratio is at least this.
    pub conservative: f64,
    pub min_volume: usize,
    pub min_seed: usize,
    pub volume_basis: VolumeBasis,
    pub grouping: DupGrouping,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            standard: 0.20,
            conservative: 0.35,
            min_volume: 500,
            min_seed: 5,
            volume_basis: VolumeBasis::AllTweets,
            grouping: DupGrouping::Exact,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("standard", self.standard), ("conservative", self.conservative)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} threshold must be in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    pub fn label(&self, volume: usize, original_volume: usize, seeds: usize, ratio: Option<f64>) -> Label {
        let gated = match self.volume_basis {
            VolumeBasis::AllTweets => volume,
            VolumeBasis::Originals => original_volume,
        };
        if gated < self.min_volume || seeds < self.min_seed {
            return Label::NotEvaluated;
        }
        match ratio {
            Some(r) if r > self.standard && r >= self.conservative => Label::SuspiciousConservative,
            Some(r) if r > self.standard => Label::Suspicious,
            _ => Label::Organic,
        }
    }
}

/// Repeated count over a set of eligible canonical forms.
fn repeated_count(canonicals: &[&str], grouping: DupGrouping) -> usize {
    match grouping {
        DupGrouping::Exact => {
            let mut groups: HashMap<&str, usize> = HashMap::new();
            for c in canonicals {
                *groups.entry(c).or_default() += 1;
            }
            groups.values().filter(|&&n| n >= 2).sum()
        }
        DupGrouping::Fuzzy => fuzzy_repeated_count(canonicals),
    }
}

fn fuzzy_repeated_count(canonicals: &[&str]) -> usize {
    let n = canonicals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let lens: Vec<usize> = canonicals.iter().map(|c| c.chars().count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (lens[i], canonicals[i]));

    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if lens[j] > lens[i] + MAX_FUZZY_DISTANCE {
                break;
            }
            let joined = canonicals[i] == canonicals[j]
                || (lens[i] >= FUZZY_MIN_CHARS
                    && lens[j] >= FUZZY_MIN_CHARS
                    && edit_distance_bounded(canonicals[i], canonicals[j], MAX_FUZZY_DISTANCE).is_some());
            if joined {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        *sizes.entry(find(&mut parent, i)).or_default() += 1;
    }
    sizes.values().filter(|&&s| s >= 2).sum()
}

fn ratio_stats<'a>(tweets: impl Iterator<Item = (&'a Tweet, Option<&'a str>)>, grouping: DupGrouping) -> RatioStats {
    let mut stats = RatioStats::default();
    let mut eligible: Vec<&str> = Vec::new();
    for (t, canonical) in tweets {
        stats.volume += 1;
        if t.counts_as_retweet() {
            continue;
        }
        stats.original_volume += 1;
        if let Some(c) = canonical {
            eligible.push(c);
        }
    }
    stats.eligible_volume = eligible.len();
    stats.repeated_count = repeated_count(&eligible, grouping);
    if stats.eligible_volume > 0 {
        stats.duplicate_ratio = Some(stats.repeated_count as f64 / stats.eligible_volume as f64);
    }
    stats
}

/// Canonical form of an original tweet if it passes the length gate.
fn eligible_canonical(t: &Tweet) -> Option<String> {
    if t.counts_as_retweet() {
        return None;
    }
    let f = normalize(&t.raw_text);
    (f.char_len >= EXACT_MIN_CHARS).then_some(f.canonical)
}

/// Repeated-content ratio for one hashtag. Retweets count toward volume only.
pub fn duplicate_ratio(hashtag: &str, corpus: &Corpus) -> RatioStats {
    duplicate_ratio_with(hashtag, corpus, DupGrouping::Exact)
}

pub fn duplicate_ratio_with(hashtag: &str, corpus: &Corpus, grouping: DupGrouping) -> RatioStats {
    let tweets: Vec<(&Tweet, Option<String>)> = corpus
        .tweets()
        .iter()
        .filter(|t| t.has_hashtag(hashtag))
        .map(|t| (t, eligible_canonical(t)))
        .collect();
    ratio_stats(tweets.iter().map(|(t, c)| (*t, c.as_deref())), grouping)
}

/// Verdicts for every hashtag in the corpus, sorted by ratio descending
/// (absent ratios last), then hashtag.
pub fn classify_hashtags(
    corpus: &Corpus,
    seeds: &BTreeSet<String>,
    thresholds: &Thresholds,
) -> Result<Vec<HashtagVerdict>> {
    thresholds.validate()?;
    let tweets = corpus.tweets();
    let canonicals: Vec<Option<String>> = tweets.par_iter().map(eligible_canonical).collect();

    let mut by_tag: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, t) in tweets.iter().enumerate() {
        for h in &t.hashtags {
            by_tag.entry(h).or_default().push(i);
        }
    }
    let by_tag: Vec<(&str, Vec<usize>)> = by_tag.into_iter().collect();

    let mut verdicts: Vec<HashtagVerdict> = by_tag
        .par_iter()
        .map(|(tag, idx)| {
            let stats = ratio_stats(
                idx.iter().map(|&i| (&tweets[i], canonicals[i].as_deref())),
                thresholds.grouping,
            );
            let seed_participants = idx
                .iter()
                .map(|&i| &tweets[i])
                .filter(|t| !t.counts_as_retweet() && seeds.contains(&t.author_id))
                .map(|t| t.author_id.as_str())
                .collect::<BTreeSet<_>>()
                .len();
            HashtagVerdict {
                hashtag: tag.to_string(),
                label: thresholds.label(stats.volume, stats.original_volume, seed_participants, stats.duplicate_ratio),
                volume: stats.volume,
                original_volume: stats.original_volume,
                eligible_volume: stats.eligible_volume,
                repeated_count: stats.repeated_count,
                duplicate_ratio: stats.duplicate_ratio,
                seed_participants,
            }
        })
        .collect();

    verdicts.sort_by(|a, b| {
        let by_ratio = match (a.duplicate_ratio, b.duplicate_ratio) {
            (Some(x), Some(y)) => y.total_cmp(&x),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        };
        by_ratio.then_with(|| a.hashtag.cmp(&b.hashtag))
    });
    Ok(verdicts)
}
