//! Timestamp helpers shared by ingestion and reporting.
//!
//! All instants are stored as UTC. Rendering applies a display offset that
//! defaults to Indian Standard Time (+05:30).

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, FixedOffset, NaiveDate, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Timestamp = DateTime<Utc>;

/// IST, +05:30.
pub fn ist() -> FixedOffset {
    FixedOffset::east_opt(5 * 3600 + 30 * 60).expect("valid offset")
}

/// Offset used when rendering timestamps in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisplayOffset(pub FixedOffset);

impl Default for DisplayOffset {
    fn default() -> Self {
        DisplayOffset(ist())
    }
}

impl DisplayOffset {
    pub fn render(&self, at: &Timestamp) -> String {
        at.with_timezone(&self.0)
            .to_rfc3339_opts(SecondsFormat::AutoSi, false)
    }

    pub fn offset(&self) -> FixedOffset {
        self.0
    }
}

impl FromStr for DisplayOffset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("display offset must look like +05:30, got {s:?}"));
        let s = s.trim();
        if s.eq_ignore_ascii_case("z") || s.eq_ignore_ascii_case("utc") {
            return Ok(DisplayOffset(FixedOffset::east_opt(0).unwrap()));
        }
        let (sign, rest) = match s.as_bytes().first() {
            Some(b'+') => (1, &s[1..]),
            Some(b'-') => (-1, &s[1..]),
            _ => return Err(bad()),
        };
        let (h, m) = rest.split_once(':').ok_or_else(bad)?;
        let h: i32 = h.parse().map_err(|_| bad())?;
        let m: i32 = m.parse().map_err(|_| bad())?;
        if !(0..=23).contains(&h) || !(0..=59).contains(&m) {
            return Err(bad());
        }
        FixedOffset::east_opt(sign * (h * 3600 + m * 60))
            .map(DisplayOffset)
            .ok_or_else(bad)
    }
}

impl fmt::Display for DisplayOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parse an RFC 3339 timestamp that carries an explicit offset.
pub fn parse_rfc3339(s: &str) -> std::result::Result<Timestamp, String> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("malformed timestamp {s:?}: {e}"))
}

/// True when `at` falls exactly on a half-hour boundary.
pub fn on_half_hour_grid(at: &Timestamp) -> bool {
    at.timestamp().rem_euclid(1800) == 0 && at.timestamp_subsec_nanos() == 0
}

/// A calendar month, used for monthly scope reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn of<Tz: TimeZone>(at: &DateTime<Tz>) -> Self {
        YearMonth {
            year: at.year(),
            month: at.month(),
        }
    }

    pub fn of_date(date: NaiveDate) -> Self {
        YearMonth {
            year: date.year(),
            month: date.month(),
        }
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            YearMonth {
                year: self.year + 1,
                month: 1,
            }
        } else {
            YearMonth {
                year: self.year,
                month: self.month + 1,
            }
        }
    }

    /// Inclusive range of months from `self` to `last`.
    pub fn through(self, last: YearMonth) -> Vec<YearMonth> {
        let mut out = Vec::new();
        let mut cur = self;
        while cur <= last {
            out.push(cur);
            cur = cur.next();
        }
        out
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_round_trip() {
        let off: DisplayOffset = "+05:30".parse().unwrap();
        assert_eq!(off, DisplayOffset::default());
        assert!("0530".parse::<DisplayOffset>().is_err());
        let neg: DisplayOffset = "-03:00".parse().unwrap();
        assert_eq!(neg.0.local_minus_utc(), -3 * 3600);
    }

    #[test]
    fn renders_in_ist() {
        let t = parse_rfc3339("2019-03-19T03:30:00Z").unwrap();
        assert_eq!(DisplayOffset::default().render(&t), "2019-03-19T09:00:00+05:30");
    }

    #[test]
    fn half_hour_grid() {
        assert!(on_half_hour_grid(&parse_rfc3339("2019-03-19T09:30:00+05:30").unwrap()));
        assert!(!on_half_hour_grid(&parse_rfc3339("2019-03-19T09:31:00+05:30").unwrap()));
    }

    #[test]
    fn month_span() {
        let a = YearMonth { year: 2018, month: 11 };
        let b = YearMonth { year: 2019, month: 2 };
        let span = a.through(b);
        assert_eq!(span.len(), 4);
        assert_eq!(span[2].to_string(), "2019-01");
    }
}
