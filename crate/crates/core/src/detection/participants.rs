use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::corpus::{Corpus, TemplateBank};
use crate::matching::MatchRecord;

/// A participant is core when it joined more than this many campaigns.
pub const CORE_MIN_CAMPAIGNS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParticipantRecord {
    pub author_id: String,
    pub campaigns_joined: BTreeSet<String>,
    pub template_tweets_posted: usize,
    pub core: bool,
}

/// One row of the campaigns-joined histogram.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ContributionBin {
    pub participants: usize,
    pub template_tweets: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ParticipationSummary {
    /// Distinct participants per campaign (bank id).
    pub per_campaign: BTreeMap<String, usize>,
    pub mean_participants: f64,
    /// Campaigns joined -> participants and their template tweets.
    pub histogram: BTreeMap<usize, ContributionBin>,
    pub core_participants: usize,
    pub template_tweets: usize,
}

fn rank(r: &MatchRecord) -> (crate::matching::MatchTier, &str, usize) {
    (r.tier, &r.bank_id, r.template_index)
}

/// Pick the campaign a matched tweet belongs to: the bank whose campaign
/// hashtag the tweet carries, otherwise the best-tier match. Ties go to the
/// lowest bank id. `records` must all belong to one tweet.
pub fn attribute<'r>(
    records: &[&'r MatchRecord],
    tweet_hashtags: &[String],
    campaign_tags: &HashMap<&str, &str>,
) -> Option<&'r MatchRecord> {
    let carries_tag = |r: &MatchRecord| {
        campaign_tags
            .get(r.bank_id.as_str())
            .is_some_and(|tag| tweet_hashtags.iter().any(|h| h == tag))
    };
    let tagged = records
        .iter()
        .copied()
        .filter(|r| carries_tag(r))
        .min_by(|a, b| rank(a).cmp(&rank(b)));
    tagged.or_else(|| records.iter().copied().min_by(|a, b| rank(a).cmp(&rank(b))))
}

/// Attribute each matched original tweet to one campaign. Returns
/// (author_id, bank_id) per tweet, ordered by tweet id.
pub fn attributed_originals<'a>(
    records: &'a [MatchRecord],
    corpus: &'a Corpus,
    banks: &[TemplateBank],
) -> Vec<(&'a str, &'a str)> {
    let campaign_tags: HashMap<&str, &str> = banks
        .iter()
        .map(|b| (b.bank_id.as_str(), b.campaign_hashtag.as_str()))
        .collect();

    let mut by_tweet: BTreeMap<&str, Vec<&MatchRecord>> = BTreeMap::new();
    for r in records {
        by_tweet.entry(&r.tweet_id).or_default().push(r);
    }

    by_tweet
        .into_iter()
        .filter_map(|(tweet_id, recs)| {
            let tweet = corpus.get(tweet_id)?;
            if tweet.counts_as_retweet() {
                return None;
            }
            let r = attribute(&recs, &tweet.hashtags, &campaign_tags)?;
            Some((tweet.author_id.as_str(), r.bank_id.as_str()))
        })
        .collect()
}

/// Participants from matched original tweets. Retweets and records whose
/// tweet is missing from the corpus are ignored. Output is sorted by author.
pub fn classify_participants(
    records: &[MatchRecord],
    corpus: &Corpus,
    banks: &[TemplateBank],
) -> (Vec<ParticipantRecord>, ParticipationSummary) {
    let mut by_author: BTreeMap<&str, (BTreeSet<String>, usize)> = BTreeMap::new();
    for (author, bank) in attributed_originals(records, corpus, banks) {
        let e = by_author.entry(author).or_default();
        e.0.insert(bank.to_string());
        e.1 += 1;
    }

    let participants: Vec<ParticipantRecord> = by_author
        .into_iter()
        .map(|(author, (campaigns, posted))| ParticipantRecord {
            author_id: author.to_string(),
            core: campaigns.len() > CORE_MIN_CAMPAIGNS,
            campaigns_joined: campaigns,
            template_tweets_posted: posted,
        })
        .collect();

    let mut summary = ParticipationSummary::default();
    for p in &participants {
        for c in &p.campaigns_joined {
            *summary.per_campaign.entry(c.clone()).or_default() += 1;
        }
        let bin = summary.histogram.entry(p.campaigns_joined.len()).or_default();
        bin.participants += 1;
        bin.template_tweets += p.template_tweets_posted;
        summary.template_tweets += p.template_tweets_posted;
        summary.core_participants += usize::from(p.core);
    }
    if !summary.per_campaign.is_empty() {
        summary.mean_participants = summary.per_campaign.values().sum::<usize>() as f64
            / summary.per_campaign.len() as f64;
    }
    (participants, summary)
}

/// Share of template tweets posted by core participants; 0 when there are
/// no template tweets.
pub fn core_contribution_share(participants: &[ParticipantRecord]) -> f64 {
    let total: usize = participants.iter().map(|p| p.template_tweets_posted).sum();
    if total == 0 {
        return 0.0;
    }
    let core: usize = participants
        .iter()
        .filter(|p| p.core)
        .map(|p| p.template_tweets_posted)
        .sum();
    core as f64 / total as f64
}

/// Authors of matched original tweets, the default seed set.
pub fn seed_participants_from_matches(records: &[MatchRecord], corpus: &Corpus) -> BTreeSet<String> {
    records
        .iter()
        .filter_map(|r| corpus.get(&r.tweet_id))
        .filter(|t| !t.counts_as_retweet())
        .map(|t| t.author_id.clone())
        .collect()
}
