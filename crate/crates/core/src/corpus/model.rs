use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::time::Timestamp;
use crate::{Error, Result};

/// One post. Hashtags are stored lowercase without the leading `#`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub tweet_id: String,
    pub author_id: String,
    pub created_at: Timestamp,
    pub raw_text: String,
    pub hashtags: Vec<String>,
    /// `None` when the source carried no retweet flag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_retweet: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweet_of: Option<String>,
}

impl Tweet {
    /// Resolved retweet flag; an absent flag counts as an original.
    pub fn counts_as_retweet(&self) -> bool {
        self.is_retweet.unwrap_or(false)
    }

    pub fn has_hashtag(&self, tag: &str) -> bool {
        self.hashtags.iter().any(|h| h == tag)
    }
}

/// Extract hashtags from free text: `#` followed by letters, digits or
/// underscores, lowercased, first-occurrence order, deduplicated.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((_, c)) = chars.next() {
        if c != '#' {
            continue;
        }
        let mut tag = String::new();
        while let Some(&(_, n)) = chars.peek() {
            if n.is_alphanumeric() || n == '_' {
                tag.extend(n.to_lowercase());
                chars.next();
            } else {
                break;
            }
        }
        if !tag.is_empty() && !out.contains(&tag) {
            out.push(tag);
        }
    }
    out
}

/// Lowercase a hashtag and drop any leading `#`.
pub fn clean_hashtag(tag: &str) -> String {
    tag.trim().trim_start_matches('#').to_lowercase()
}

/// An immutable, id-indexed set of tweets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    /// Build a corpus; tweet ids must be unique.
    pub fn new(tweets: Vec<Tweet>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(tweets.len());
        for (i, t) in tweets.iter().enumerate() {
            if by_id.insert(t.tweet_id.clone(), i).is_some() {
                return Err(Error::Invariant(format!(
                    "duplicate tweet_id {} in corpus",
                    t.tweet_id
                )));
            }
        }
        Ok(Corpus { tweets, by_id })
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn get(&self, tweet_id: &str) -> Option<&Tweet> {
        self.by_id.get(tweet_id).map(|&i| &self.tweets[i])
    }

    pub fn into_tweets(self) -> Vec<Tweet> {
        self.tweets
    }

    /// Earliest and latest `created_at`, if any tweets exist.
    pub fn span(&self) -> Option<(Timestamp, Timestamp)> {
        let first = self.tweets.iter().map(|t| t.created_at).min()?;
        let last = self.tweets.iter().map(|t| t.created_at).max()?;
        Some((first, last))
    }

    /// All hashtags that occur in the corpus, sorted.
    pub fn hashtags(&self) -> BTreeSet<&str> {
        self.tweets
            .iter()
            .flat_map(|t| t.hashtags.iter().map(String::as_str))
            .collect()
    }
}

/// A pre-written list of tweets tied to one campaign hashtag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateBank {
    pub bank_id: String,
    pub campaign_hashtag: String,
    pub launch_at: Option<Timestamp>,
    pub templates: Vec<String>,
    pub source_url: Option<String>,
}

impl TemplateBank {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.templates.is_empty() {
            return Err("bank has no templates".into());
        }
        if let Some(i) = self.templates.iter().position(|t| t.trim().is_empty()) {
            return Err(format!("template {i} is blank"));
        }
        if self.campaign_hashtag.is_empty() {
            return Err("campaign hashtag is empty".into());
        }
        if self.campaign_hashtag.chars().any(char::is_whitespace) {
            return Err(format!(
                "campaign hashtag {:?} contains whitespace",
                self.campaign_hashtag
            ));
        }
        Ok(())
    }
}

/// A chat message. `sent_at` keeps millisecond precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMessage {
    pub group_id: String,
    pub sender_id: String,
    pub sent_at: Timestamp,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRoster {
    pub group_id: String,
    pub member_ids: BTreeSet<String>,
    pub admin_ids: BTreeSet<String>,
}

impl GroupRoster {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.member_ids.is_empty() {
            return Err(format!("group {} has no members", self.group_id));
        }
        if let Some(a) = self.admin_ids.iter().find(|a| !self.member_ids.contains(*a)) {
            return Err(format!("admin {a} is not a member of group {}", self.group_id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendEntry {
    pub hashtag: String,
    #[serde(default)]
    pub reported_tweet_count: Option<u64>,
}

/// One capture of a trending-topics list. Entries are in rank order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendSnapshot {
    pub captured_at: Timestamp,
    pub location: String,
    pub entries: Vec<TrendEntry>,
}
