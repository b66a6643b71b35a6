//! Domain model, file ingestion and descriptive statistics.

mod io;
mod model;
mod stats;

pub use io::{
    ingest_tweets, load_bank, load_banks_dir, parse_bank, read_jsonl, read_messages,
    read_rosters, read_snapshots, read_tweets, render_bank, write_jsonl, write_tweets,
    IngestOptions, IngestReport, Reject,
};
pub use model::{
    clean_hashtag, extract_hashtags, Corpus, GroupMessage, GroupRoster, TemplateBank, TrendEntry,
    TrendSnapshot, Tweet,
};
pub use stats::{bank_stats, group_stats, infer_retweets, BankSummary, GroupSummary};
pub(crate) use stats::median;
