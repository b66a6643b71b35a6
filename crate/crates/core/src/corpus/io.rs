//! Line-delimited readers and writers for every corpus file format.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::model::{
    clean_hashtag, extract_hashtags, Corpus, GroupMessage, GroupRoster, TemplateBank, Tweet,
    TrendSnapshot,
};
use crate::time::{on_half_hour_grid, parse_rfc3339, Timestamp};
use crate::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Abort on the first rejected line instead of skipping it.
    pub strict: bool,
    /// Corpus metadata end date; tweets after it are rejected.
    pub end_date: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejects: Vec<Reject>,
}

#[derive(Deserialize)]
struct TweetLine {
    tweet_id: String,
    author_id: String,
    created_at: String,
    raw_text: String,
    #[serde(default)]
    hashtags: Option<Vec<String>>,
    #[serde(default)]
    is_retweet: Option<bool>,
    #[serde(default)]
    retweet_of: Option<String>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Read a tweets file. Duplicate ids keep the first occurrence.
pub fn ingest_tweets(path: &Path, opts: &IngestOptions) -> Result<(Corpus, IngestReport)> {
    read_tweets(open(path)?, path, opts)
}

pub fn read_tweets<R: BufRead>(
    reader: R,
    source: &Path,
    opts: &IngestOptions,
) -> Result<(Corpus, IngestReport)> {
    let mut tweets = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut report = IngestReport::default();

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_tweet_line(&line, opts).and_then(|t| {
            if seen.contains(&t.tweet_id) {
                Err(format!("duplicate tweet_id {}", t.tweet_id))
            } else {
                Ok(t)
            }
        });
        match parsed {
            Ok(t) => {
                seen.insert(t.tweet_id.clone());
                tweets.push(t);
            }
            Err(reason) if opts.strict => {
                return Err(Error::Record {
                    path: source.to_path_buf(),
                    line: lineno,
                    reason,
                })
            }
            Err(reason) => report.rejects.push(Reject {
                line: lineno,
                reason,
            }),
        }
    }
    report.accepted = tweets.len();
    Ok((Corpus::new(tweets)?, report))
}

fn parse_tweet_line(line: &str, opts: &IngestOptions) -> std::result::Result<Tweet, String> {
    let raw: TweetLine = serde_json::from_str(line).map_err(|e| format!("bad record: {e}"))?;
    if raw.tweet_id.is_empty() {
        return Err("empty tweet_id".into());
    }
    let created_at = parse_rfc3339(&raw.created_at)?;
    if let Some(end) = opts.end_date {
        if created_at > end {
            return Err(format!(
                "created_at {} is after corpus end date {}",
                raw.created_at, end
            ));
        }
    }
    if raw.is_retweet == Some(false) && raw.retweet_of.is_some() {
        return Err("retweet_of set on a tweet flagged as original".into());
    }
    let hashtags = match raw.hashtags {
        Some(tags) => {
            let mut out: Vec<String> = Vec::with_capacity(tags.len());
            for t in tags.iter().map(|t| clean_hashtag(t)) {
                if !t.is_empty() && !out.contains(&t) {
                    out.push(t);
                }
            }
            out
        }
        None => extract_hashtags(&raw.raw_text),
    };
    Ok(Tweet {
        tweet_id: raw.tweet_id,
        author_id: raw.author_id,
        created_at,
        raw_text: raw.raw_text,
        hashtags,
        is_retweet: raw.is_retweet,
        retweet_of: raw.retweet_of,
    })
}

/// Write any serializable records one JSON document per line.
pub fn write_jsonl<'a, T, I, W>(mut out: W, records: I) -> std::io::Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
    W: Write,
{
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_tweets<W: Write>(out: W, corpus: &Corpus) -> std::io::Result<()> {
    write_jsonl(out, corpus.tweets())
}

/// Read a line-delimited file of records, validating each one. Every failure
/// is fatal and names the offending line.
pub fn read_jsonl<T, F>(path: &Path, validate: F) -> Result<Vec<T>>
where
    T: DeserializeOwned,
    F: Fn(&T) -> std::result::Result<(), String>,
{
    let reader = open(path)?;
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec_err = |reason: String| Error::Record {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let rec: T = serde_json::from_str(&line).map_err(|e| rec_err(format!("bad record: {e}")))?;
        validate(&rec).map_err(rec_err)?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_messages(path: &Path) -> Result<Vec<GroupMessage>> {
    read_jsonl(path, |_: &GroupMessage| Ok(()))
}

pub fn read_rosters(path: &Path) -> Result<Vec<GroupRoster>> {
    read_jsonl(path, GroupRoster::validate)
}

/// Snapshots imported from archive files must sit on the half-hour grid.
pub fn read_snapshots(path: &Path) -> Result<Vec<TrendSnapshot>> {
    read_jsonl(path, |s: &TrendSnapshot| {
        if on_half_hour_grid(&s.captured_at) {
            Ok(())
        } else {
            Err(format!("captured_at {} is not on the half-hour grid", s.captured_at))
        }
    })
}

/// Parse a template bank document.
///
/// Leading `key: value` header lines (`hashtag`, `launch_at`, `source_url`,
/// `bank_id`) are followed by one template per line. Blank lines are ignored.
pub fn parse_bank(text: &str, default_id: &str, source: &Path) -> Result<TemplateBank> {
    let err = |reason: String| Error::Bank {
        path: source.to_path_buf(),
        reason,
    };
    let mut bank_id = default_id.to_string();
    let mut hashtag = None;
    let mut launch_at = None;
    let mut source_url = None;
    let mut templates = Vec::new();
    let mut in_header = true;

    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        if in_header {
            if let Some((key, value)) = line.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "hashtag" => {
                        hashtag = Some(clean_hashtag(value));
                        continue;
                    }
                    "launch_at" => {
                        launch_at = Some(parse_rfc3339(value).map_err(err)?);
                        continue;
                    }
                    "source_url" => {
                        source_url = Some(value.to_string());
                        continue;
                    }
                    "bank_id" => {
                        bank_id = value.to_string();
                        continue;
                    }
                    _ => {}
                }
            }
            in_header = false;
        }
        templates.push(line.trim_end_matches('\r').to_string());
    }

    let bank = TemplateBank {
        bank_id,
        campaign_hashtag: hashtag.ok_or_else(|| err("missing `hashtag:` header".into()))?,
        launch_at,
        templates,
        source_url,
    };
    bank.validate().map_err(err)?;
    Ok(bank)
}

pub fn render_bank(bank: &TemplateBank) -> String {
    let mut s = format!("bank_id: {}\nhashtag: {}\n", bank.bank_id, bank.campaign_hashtag);
    if let Some(at) = bank.launch_at {
        s.push_str(&format!("launch_at: {}\n", at.to_rfc3339()));
    }
    if let Some(url) = &bank.source_url {
        s.push_str(&format!("source_url: {url}\n"));
    }
    s.push('\n');
    for t in &bank.templates {
        s.push_str(t);
        s.push('\n');
    }
    s
}

pub fn load_bank(path: &Path) -> Result<TemplateBank> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_bank(&text, &stem, path)
}

/// Load every `*.txt` bank in a directory, ordered by file name.
pub fn load_banks_dir(dir: &Path) -> Result<Vec<TemplateBank>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            paths.push(path);
        }
    }
    paths.sort();
    let banks = paths
        .iter()
        .map(|p| load_bank(p))
        .collect::<Result<Vec<_>>>()?;
    let mut ids = HashSet::new();
    for b in &banks {
        if !ids.insert(b.bank_id.as_str()) {
            return Err(Error::Bank {
                path: dir.to_path_buf(),
                reason: format!("duplicate bank_id {}", b.bank_id),
            });
        }
    }
    Ok(banks)
}
