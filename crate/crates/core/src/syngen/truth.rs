use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::config::PerturbationKind;
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum TweetLabel {
    Organic,
    Campaign {
        bank_id: String,
        template_index: usize,
        perturbed: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kind: Option<PerturbationKind>,
        /// Within the matcher's tiers of its template.
        reachable: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum AuthorLabel {
    Organic,
    Participant { bank_ids: BTreeSet<String> },
    Core { bank_ids: BTreeSet<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignTruth {
    pub bank_id: String,
    pub hashtag: String,
    pub launch_at: Timestamp,
    pub participants: usize,
    pub originals: usize,
    pub retweets: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub campaigns: Vec<CampaignTruth>,
    pub city_hashtags: Vec<String>,
    pub topic_hashtags: Vec<String>,
    pub tweets: BTreeMap<String, TweetLabel>,
    pub authors: BTreeMap<String, AuthorLabel>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum TruthLine {
    Campaign(CampaignTruth),
    Organic { hashtag: String, kind: String },
    Tweet {
        tweet_id: String,
        #[serde(flatten)]
        label: TweetLabel,
    },
    Author {
        author_id: String,
        #[serde(flatten)]
        label: AuthorLabel,
    },
}

impl GroundTruth {
    pub fn campaign_hashtags(&self) -> Vec<&str> {
        self.campaigns.iter().map(|c| c.hashtag.as_str()).collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut line = |l: &TruthLine| -> std::io::Result<()> {
            serde_json::to_writer(&mut out, l)?;
            out.write_all(b"\n")
        };
        for c in &self.campaigns {
            line(&TruthLine::Campaign(c.clone()))?;
        }
        for h in &self.city_hashtags {
            line(&TruthLine::Organic { hashtag: h.clone(), kind: "city".into() })?;
        }
        for h in &self.topic_hashtags {
            line(&TruthLine::Organic { hashtag: h.clone(), kind: "topic".into() })?;
        }
        for (id, label) in &self.tweets {
            line(&TruthLine::Tweet { tweet_id: id.clone(), label: label.clone() })?;
        }
        for (id, label) in &self.authors {
            line(&TruthLine::Author { author_id: id.clone(), label: label.clone() })?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> std::result::Result<Self, String> {
        let mut t = GroundTruth::default();
        for (i, l) in input.lines().enumerate() {
            let l = l.map_err(|e| e.to_string())?;
            if l.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&l).map_err(|e| format!("line {}: {e}", i + 1))? {
                TruthLine::Campaign(c) => t.campaigns.push(c),
                TruthLine::Organic { hashtag, kind } if kind == "city" => t.city_hashtags.push(hashtag),
                TruthLine::Organic { hashtag, .. } => t.topic_hashtags.push(hashtag),
                TruthLine::Tweet { tweet_id, label } => {
                    t.tweets.insert(tweet_id, label);
                }
                TruthLine::Author { author_id, label } => {
                    t.authors.insert(author_id, label);
                }
            }
        }
        Ok(t)
    }
}
