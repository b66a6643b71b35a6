use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{FixedOffset, NaiveDate};
use serde::Serialize;

use super::HashtagVerdict;
use crate::corpus::Corpus;
use crate::time::YearMonth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScopeEstimate {
    pub month: YearMonth,
    pub suspicious_count: usize,
    pub conservative_count: usize,
}

/// Local date with the most tweets (retweets included) for each requested
/// hashtag; ties go to the earlier date.
pub fn peak_days(corpus: &Corpus, hashtags: &HashSet<&str>, offset: FixedOffset) -> HashMap<String, NaiveDate> {
    let mut daily: HashMap<&str, BTreeMap<NaiveDate, usize>> = HashMap::new();
    for t in corpus.tweets() {
        let day = t.created_at.with_timezone(&offset).date_naive();
        for h in &t.hashtags {
            if hashtags.contains(h.as_str()) {
                *daily.entry(h).or_default().entry(day).or_default() += 1;
            }
        }
    }
    daily
        .into_iter()
        .filter_map(|(tag, days)| {
            let best = days.iter().map(|(d, n)| (*n, std::cmp::Reverse(*d))).max()?;
            Some((tag.to_string(), best.1 .0))
        })
        .collect()
}

/// Flagged hashtags per month of their peak day, with every month of the
/// corpus span present.
pub fn scope_by_month(verdicts: &[HashtagVerdict], corpus: &Corpus, offset: FixedOffset) -> Vec<ScopeEstimate> {
    let Some((first, last)) = corpus.span() else {
        return Vec::new();
    };
    let flagged: HashSet<&str> = verdicts
        .iter()
        .filter(|v| v.label.is_suspicious())
        .map(|v| v.hashtag.as_str())
        .collect();
    let peaks = peak_days(corpus, &flagged, offset);

    let mut months: BTreeMap<YearMonth, ScopeEstimate> = YearMonth::of(&first.with_timezone(&offset))
        .through(YearMonth::of(&last.with_timezone(&offset)))
        .into_iter()
        .map(|m| {
            (
                m,
                ScopeEstimate {
                    month: m,
                    suspicious_count: 0,
                    conservative_count: 0,
                },
            )
        })
        .collect();

    for v in verdicts.iter().filter(|v| v.label.is_suspicious()) {
        let Some(day) = peaks.get(&v.hashtag) else {
            continue;
        };
        if let Some(e) = months.get_mut(&YearMonth::of_date(*day)) {
            e.suspicious_count += 1;
            if v.label == super::Label::SuspiciousConservative {
                e.conservative_count += 1;
            }
        }
    }
    months.into_values().collect()
}
