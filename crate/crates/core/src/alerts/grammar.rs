//! Date, time and link recognition for trend-alert messages.

use std::sync::LazyLock;

use chrono::{NaiveDate, NaiveTime};
use regex::Regex;
use serde::{Deserialize, Serialize};

/// Which grammar rule produced a component, for audit output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateRule {
    /// "19th March, 2019", "8th February 2019", "19 March"
    DayMonthName,
    /// "19/03/2019"
    SlashNumeric,
    /// "19-03-2019"
    DashNumeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeRule {
    /// "9 a.m.", "9.00 a.m.", "9:00 AM"
    Meridiem,
    /// "21:00"
    TwentyFourHour,
    /// "Time: 9.00" with no meridiem, read as morning
    DottedAssumedAm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DateMatch {
    pub date: NaiveDate,
    pub rule: DateRule,
    pub year_defaulted: bool,
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TimeMatch {
    pub time: NaiveTime,
    pub rule: TimeRule,
}

static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#([\p{L}\p{M}\p{N}_]+)").unwrap());

static DAY_MONTH: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(\d{1,2})(?:st|nd|rd|th)?\s*(?:of\s+)?(jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)\b\.?(?:,?\s*(\d{4})\b)?",
    )
    .unwrap()
});

static NUMERIC_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(\d{1,2})([/-])(\d{1,2})([/-])(\d{4})\b").unwrap());

static MERIDIEM_TIME: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(\d{1,2})(?:[.:](\d{2}))?\s*([ap])\.?\s?m\b\.?").unwrap()
});

static COLON_TIME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b([01]?\d|2[0-3]):([0-5]\d)\b").unwrap());

static DOTTED_AFTER_TIME_LABEL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\btime\s*[:\-]?\s*(\d{1,2})\.([0-5]\d)\b").unwrap());

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+|\bdocs\.google\.com\S*").unwrap());

pub(crate) fn first_hashtag(text: &str) -> Option<String> {
    HASHTAG
        .captures(text)
        .map(|c| c[1].to_lowercase())
}

fn month_number(name: &str) -> Option<u32> {
    let n = name.to_ascii_lowercase();
    let months = [
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    ];
    months
        .iter()
        .position(|m| n.starts_with(m))
        .map(|i| i as u32 + 1)
}

/// First recognizable date. Invalid calendar dates are skipped.
pub(crate) fn find_date(text: &str, default_year: i32) -> Option<DateMatch> {
    let mut found: Vec<DateMatch> = Vec::new();
    for c in DAY_MONTH.captures_iter(text) {
        let day: u32 = c[1].parse().ok()?;
        let Some(month) = month_number(&c[2]) else { continue };
        let (year, year_defaulted) = match c.get(3) {
            Some(y) => (y.as_str().parse().ok()?, false),
            None => (default_year, true),
        };
        if let Some(date) = NaiveDate::from_ymd_opt(year, month, day) {
            let m = c.get(0).unwrap();
            found.push(DateMatch {
                date,
                rule: DateRule::DayMonthName,
                year_defaulted,
                span: (m.start(), m.end()),
            });
            break;
        }
    }
    for c in NUMERIC_DATE.captures_iter(text) {
        if c[2] != c[4] {
            continue;
        }
        let (Ok(day), Ok(month), Ok(year)) = (c[1].parse(), c[3].parse(), c[5].parse()) else {
            continue;
        };
        if let Some(date) = NaiveDate::from_ymd_opt(year, month, day) {
            let m = c.get(0).unwrap();
            found.push(DateMatch {
                date,
                rule: if &c[2] == "/" {
                    DateRule::SlashNumeric
                } else {
                    DateRule::DashNumeric
                },
                year_defaulted: false,
                span: (m.start(), m.end()),
            });
            break;
        }
    }
    found.into_iter().min_by_key(|d| d.span.0)
}

/// First recognizable time, ignoring anything inside `skip` (the date span).
pub(crate) fn find_time(text: &str, skip: Option<(usize, usize)>) -> Option<TimeMatch> {
    let outside = |start: usize, end: usize| match skip {
        Some((s, e)) => end <= s || start >= e,
        None => true,
    };

    let mut found: Vec<(usize, TimeMatch)> = Vec::new();
    if let Some((pos, t)) = MERIDIEM_TIME.captures_iter(text).find_map(|c| {
        let m = c.get(0).unwrap();
        if !outside(m.start(), m.end()) {
            return None;
        }
        let hour: u32 = c[1].parse().ok()?;
        let minute: u32 = c.get(2).map_or(Some(0), |m| m.as_str().parse().ok())?;
        if !(1..=12).contains(&hour) {
            return None;
        }
        let pm = c[3].eq_ignore_ascii_case("p");
        let hour24 = match (hour, pm) {
            (12, false) => 0,
            (12, true) => 12,
            (h, false) => h,
            (h, true) => h + 12,
        };
        NaiveTime::from_hms_opt(hour24, minute, 0).map(|t| (m.start(), t))
    }) {
        found.push((
            pos,
            TimeMatch {
                time: t,
                rule: TimeRule::Meridiem,
            },
        ));
    }
    if let Some((pos, t)) = COLON_TIME.captures_iter(text).find_map(|c| {
        let m = c.get(0).unwrap();
        if !outside(m.start(), m.end()) || overlaps_meridiem(text, m.start()) {
            return None;
        }
        let h: u32 = c[1].parse().ok()?;
        let mi: u32 = c[2].parse().ok()?;
        NaiveTime::from_hms_opt(h, mi, 0).map(|t| (m.start(), t))
    }) {
        found.push((
            pos,
            TimeMatch {
                time: t,
                rule: TimeRule::TwentyFourHour,
            },
        ));
    }
    if let Some((pos, t)) = DOTTED_AFTER_TIME_LABEL.captures_iter(text).find_map(|c| {
        let m = c.get(1).unwrap();
        if !outside(m.start(), c.get(0).unwrap().end()) || overlaps_meridiem(text, m.start()) {
            return None;
        }
        let h: u32 = c[1].parse().ok()?;
        let mi: u32 = c[2].parse().ok()?;
        if !(1..=12).contains(&h) {
            return None;
        }
        NaiveTime::from_hms_opt(h % 12, mi, 0).map(|t| (m.start(), t))
    }) {
        found.push((
            pos,
            TimeMatch {
                time: t,
                rule: TimeRule::DottedAssumedAm,
            },
        ));
    }
    found.into_iter().min_by_key(|(p, _)| *p).map(|(_, t)| t)
}

/// True when a meridiem time starts at `pos`; the meridiem rule owns it.
fn overlaps_meridiem(text: &str, pos: usize) -> bool {
    MERIDIEM_TIME
        .find_at(text, pos)
        .is_some_and(|m| m.start() == pos)
}

/// Google Docs links, deduplicated in order of first appearance.
pub(crate) fn doc_links(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for m in URL.find_iter(text) {
        let url = m
            .as_str()
            .trim_end_matches(['.', ',', ';', ':', '!', '?', ')', ']', '"', '\'']);
        if url.to_ascii_lowercase().contains("docs.google.com") && !out.iter().any(|u| u == url) {
            out.push(url.to_string());
        }
    }
    out
}
