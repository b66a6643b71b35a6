use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::model::{Corpus, GroupRoster, TemplateBank};

/// Mark tweets whose text starts with `RT @` as retweets when the source
/// carried no flag. Explicit flags are never changed.
pub fn infer_retweets(corpus: Corpus) -> Corpus {
    let tweets = corpus
        .into_tweets()
        .into_iter()
        .map(|mut t| {
            if t.is_retweet.is_none() && t.raw_text.trim_start().starts_with("RT @") {
                t.is_retweet = Some(true);
            }
            t
        })
        .collect();
    Corpus::new(tweets).expect("ids were unique before inference")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub groups: usize,
    pub distinct_members: usize,
    /// groups joined -> number of members
    pub groups_per_member: BTreeMap<usize, usize>,
    /// group size -> number of groups
    pub members_per_group: BTreeMap<usize, usize>,
    pub median_admins: f64,
}

pub fn group_stats(rosters: &[GroupRoster]) -> GroupSummary {
    let mut memberships: HashMap<&str, usize> = HashMap::new();
    let mut members_per_group = BTreeMap::new();
    for r in rosters {
        for m in &r.member_ids {
            *memberships.entry(m.as_str()).or_default() += 1;
        }
        *members_per_group.entry(r.member_ids.len()).or_default() += 1;
    }
    let mut groups_per_member = BTreeMap::new();
    for &n in memberships.values() {
        *groups_per_member.entry(n).or_default() += 1;
    }
    let admins: Vec<f64> = rosters.iter().map(|r| r.admin_ids.len() as f64).collect();
    GroupSummary {
        groups: rosters.len(),
        distinct_members: memberships.len(),
        groups_per_member,
        members_per_group,
        median_admins: median(admins).unwrap_or(0.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BankSummary {
    pub banks: usize,
    pub mean_templates: f64,
    pub median_templates: f64,
    pub min_templates: usize,
    pub max_templates: usize,
    /// Share of templates containing at least one digit.
    pub digit_share: f64,
}

pub fn bank_stats(banks: &[TemplateBank]) -> BankSummary {
    let sizes: Vec<usize> = banks.iter().map(|b| b.templates.len()).collect();
    let total: usize = sizes.iter().sum();
    let with_digit = banks
        .iter()
        .flat_map(|b| &b.templates)
        .filter(|t| t.chars().any(char::is_numeric))
        .count();
    BankSummary {
        banks: banks.len(),
        mean_templates: if banks.is_empty() {
            0.0
        } else {
            total as f64 / banks.len() as f64
        },
        median_templates: median(sizes.iter().map(|&s| s as f64).collect()).unwrap_or(0.0),
        min_templates: sizes.iter().copied().min().unwrap_or(0),
        max_templates: sizes.iter().copied().max().unwrap_or(0),
        digit_share: if total == 0 {
            0.0
        } else {
            with_digit as f64 / total as f64
        },
    }
}

pub(crate) fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}
