//! Trend-alert parsing and sender forensics for group-chat corpora.
//!
//! A message counts as an alert when it carries a hashtag together with at
//! least one of a date, a time or a Google Docs link. The literal header
//! "Trend Alert" is not required.

mod grammar;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, FixedOffset, TimeZone, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::GroupMessage;
use crate::time::{ist, Timestamp};

pub use grammar::{DateRule, TimeRule};

pub const EXCERPT_CHARS: usize = 280;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlertSource {
    pub group_id: String,
    pub sender_id: String,
    pub sent_at: Timestamp,
}

/// Rules that fired while parsing one alert.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarTrace {
    pub date_rule: Option<DateRule>,
    pub year_defaulted: bool,
    pub time_rule: Option<TimeRule>,
    pub has_doc_link: bool,
}

impl GrammarTrace {
    /// True when the schedule relied on the assumed-morning rule.
    pub fn heuristic(&self) -> bool {
        self.time_rule == Some(TimeRule::DottedAssumedAm)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendAlert {
    pub source: AlertSource,
    pub hashtag: String,
    /// Present only when both a date and a time were recognized.
    pub scheduled_at: Option<Timestamp>,
    pub doc_links: Vec<String>,
    pub raw_excerpt: String,
    pub grammar: GrammarTrace,
}

/// Parser settings: the year assumed for dates without one, and the zone in
/// which alert dates and times are written.
#[derive(Debug, Clone, Copy)]
pub struct AlertParser {
    pub default_year: i32,
    pub zone: FixedOffset,
}

impl AlertParser {
    pub fn new(default_year: i32) -> Self {
        AlertParser {
            default_year,
            zone: ist(),
        }
    }

    pub fn parse(&self, message: &GroupMessage) -> Option<TrendAlert> {
        let text = &message.text;
        let hashtag = grammar::first_hashtag(text)?;
        let date = grammar::find_date(text, self.default_year);
        let time = grammar::find_time(text, date.as_ref().map(|d| d.span));
        let doc_links = grammar::doc_links(text);
        if date.is_none() && time.is_none() && doc_links.is_empty() {
            return None;
        }

        let scheduled_at = match (&date, &time) {
            (Some(d), Some(t)) => self
                .zone
                .from_local_datetime(&d.date.and_time(t.time))
                .single()
                .map(|local| local.with_timezone(&Utc)),
            _ => None,
        };

        Some(TrendAlert {
            source: AlertSource {
                group_id: message.group_id.clone(),
                sender_id: message.sender_id.clone(),
                sent_at: message.sent_at,
            },
            hashtag,
            scheduled_at,
            raw_excerpt: text.chars().take(EXCERPT_CHARS).collect(),
            grammar: GrammarTrace {
                date_rule: date.as_ref().map(|d| d.rule),
                year_defaulted: date.as_ref().is_some_and(|d| d.year_defaulted),
                time_rule: time.as_ref().map(|t| t.rule),
                has_doc_link: !doc_links.is_empty(),
            },
            doc_links,
        })
    }

    /// Parse every message in parallel; output keeps input order.
    pub fn parse_all(&self, messages: &[GroupMessage]) -> Vec<TrendAlert> {
        messages
            .par_iter()
            .filter_map(|m| self.parse(m))
            .collect()
    }
}

/// Parse with the default year taken from the message's own send date.
pub fn parse_alert(message: &GroupMessage) -> Option<TrendAlert> {
    let year = message.sent_at.with_timezone(&ist()).year();
    AlertParser::new(year).parse(message)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderProfile {
    pub sender_id: String,
    pub alert_count: usize,
    /// Distinct groups the sender posted alerts to.
    pub groups_reached: usize,
    /// Smallest gap between the same sender posting byte-identical text to
    /// two different groups.
    pub min_cross_group_latency_ms: Option<i64>,
}

pub fn profile_senders(alerts: &[TrendAlert], messages: &[GroupMessage]) -> Vec<SenderProfile> {
    let mut per_sender: BTreeMap<&str, (usize, BTreeSet<&str>)> = BTreeMap::new();
    for a in alerts {
        let e = per_sender.entry(&a.source.sender_id).or_default();
        e.0 += 1;
        e.1.insert(&a.source.group_id);
    }

    let mut sorted: Vec<&GroupMessage> = messages
        .iter()
        .filter(|m| per_sender.contains_key(m.sender_id.as_str()))
        .collect();
    sorted.sort_by(|a, b| {
        (&a.sender_id, &a.text, a.sent_at, &a.group_id).cmp(&(&b.sender_id, &b.text, b.sent_at, &b.group_id))
    });

    // Within one (sender, text) run ordered by time, the closest pair from
    // different groups is always adjacent.
    let mut latency: BTreeMap<&str, i64> = BTreeMap::new();
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.sender_id == b.sender_id && a.text == b.text && a.group_id != b.group_id {
            let gap = (b.sent_at - a.sent_at).num_milliseconds();
            latency
                .entry(&a.sender_id)
                .and_modify(|l| *l = (*l).min(gap))
                .or_insert(gap);
        }
    }

    per_sender
        .into_iter()
        .map(|(sender, (count, groups))| SenderProfile {
            sender_id: sender.to_string(),
            alert_count: count,
            groups_reached: groups.len(),
            min_cross_group_latency_ms: latency.get(sender).copied(),
        })
        .collect()
}

/// Senders whose cross-group reposts came faster than `latency_threshold_ms`
/// and who reached at least `min_groups` groups, fastest first.
pub fn flag_automation(
    profiles: &[SenderProfile],
    latency_threshold_ms: i64,
    min_groups: usize,
) -> Vec<String> {
    let mut flagged: Vec<(i64, &str)> = profiles
        .iter()
        .filter(|p| p.groups_reached >= min_groups)
        .filter_map(|p| {
            p.min_cross_group_latency_ms
                .filter(|&l| l < latency_threshold_ms)
                .map(|l| (l, p.sender_id.as_str()))
        })
        .collect();
    flagged.sort();
    flagged.into_iter().map(|(_, s)| s.to_string()).collect()
}

pub const DEFAULT_AUTOMATION_LATENCY_MS: i64 = 1_000;
pub const DEFAULT_AUTOMATION_MIN_GROUPS: usize = 2;
