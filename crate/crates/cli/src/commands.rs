//! Argument definitions and subcommand dispatch.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use chrono::{Duration, FixedOffset};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use trendforge_core::alerts::{DEFAULT_AUTOMATION_LATENCY_MS, DEFAULT_AUTOMATION_MIN_GROUPS};
use trendforge_core::corpus::{
    bank_stats, clean_hashtag, group_stats, read_jsonl, read_rosters, write_tweets, IngestOptions,
};
use trendforge_core::detection::{
    classify_hashtags, classify_participants, core_contribution_share, scope_by_month,
    seed_participants_from_matches, DupGrouping, HashtagVerdict, Thresholds, VolumeBasis,
};
use trendforge_core::matching::{match_corpus, MatchRecord, TemplateIndex};
use trendforge_core::syngen::{downsample, generate, write_bundle, SynthConfig};
use trendforge_core::textnorm::{normalize_with, NormalizeOptions};
use trendforge_core::time::{parse_rfc3339, DisplayOffset};
use trendforge_core::trends::{estimate_coverage, trend_summary, trend_summary_for, TrendParams};

use crate::error::{CliResult, Failure};
use crate::output::{json_pretty, jsonl, write_file, Bundle};
use crate::report::{
    alert_forensics, coverage_csv, episodes_csv, episodes_for, grammar_report_csv, load_banks, load_messages,
    load_snapshots, load_tweets, parse_alerts, participant_records_jsonl, participants_csv, require_file,
    run_pipeline, scope_csv, series_csv, validate_trend, verdicts_csv, RunConfig,
};

#[derive(Debug, Parser)]
#[command(name = "trendforge", version, about = "Forensics for template-driven hashtag campaigns")]
pub struct Cli {
    /// Worker threads for parallel stages
    #[arg(long, global = true, env = "TRENDFORGE_WORKERS", default_value_t = default_workers())]
    pub workers: usize,

    /// UTC offset used when rendering timestamps and bucketing days and months
    #[arg(long, global = true, default_value = "+05:30", value_parser = parse_offset)]
    pub offset: FixedOffset,

    #[command(subcommand)]
    pub command: Command,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn parse_offset(s: &str) -> Result<FixedOffset, String> {
    s.parse::<FixedOffset>()
        .map_err(|e| format!("expected an offset like +05:30: {e}"))
}

fn parse_timestamp(s: &str) -> Result<chrono::DateTime<chrono::Utc>, String> {
    parse_rfc3339(s)
}

#[derive(Debug, Args)]
pub struct TweetsArgs {
    /// Line-delimited tweet records
    #[arg(long)]
    pub tweets: PathBuf,

    /// Abort on the first malformed or duplicate tweet line
    #[arg(long)]
    pub strict: bool,

    /// Reject tweets created after this RFC 3339 instant
    #[arg(long, value_parser = parse_timestamp)]
    pub end_date: Option<chrono::DateTime<chrono::Utc>>,
}

impl TweetsArgs {
    fn options(&self) -> IngestOptions {
        IngestOptions {
            strict: self.strict,
            end_date: self.end_date,
        }
    }
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Flag a hashtag when its repeated-content ratio is strictly above this
    #[arg(long, default_value = "0.20")]
    pub standard: f64,

    /// Conservative flag when the ratio is at least this
    #[arg(long, default_value = "0.35")]
    pub conservative: f64,

    /// Minimum hashtag volume, retweets included, before a hashtag is evaluated
    #[arg(long, default_value = "500")]
    pub min_volume: usize,

    /// Minimum distinct seed participants posting originals under the hashtag
    #[arg(long, default_value = "5")]
    pub min_seed: usize,

    /// Apply the volume gate to original tweets only
    #[arg(long)]
    pub min_volume_originals: bool,

    /// Count near-duplicates (edit distance up to 5) as repeats
    #[arg(long)]
    pub fuzzy_dup: bool,
}

impl ThresholdArgs {
    fn thresholds(&self) -> CliResult<Thresholds> {
        let t = Thresholds {
            standard: self.standard,
            conservative: self.conservative,
            min_volume: self.min_volume,
            min_seed: self.min_seed,
            volume_basis: if self.min_volume_originals {
                VolumeBasis::Originals
            } else {
                VolumeBasis::AllTweets
            },
            grouping: if self.fuzzy_dup {
                DupGrouping::Fuzzy
            } else {
                DupGrouping::Exact
            },
        };
        t.validate()?;
        Ok(t)
    }
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    /// Rolling window for the trend rule, in minutes
    #[arg(long, default_value = "30")]
    pub window_minutes: i64,

    /// Tweets within one window needed to count as trending
    #[arg(long, default_value = "5000")]
    pub trend_threshold: u64,

    /// Minutes the window sum must stay below threshold to end an episode
    #[arg(long, default_value = "30")]
    pub clear_after_minutes: i64,
}

impl TrendArgs {
    fn params(&self) -> CliResult<TrendParams> {
        let p = TrendParams {
            window: Duration::minutes(self.window_minutes),
            threshold: self.trend_threshold,
            clear_after: Duration::minutes(self.clear_after_minutes),
        };
        validate_trend(&p)?;
        Ok(p)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a tweets file and report rejected lines
    Ingest {
        #[command(flatten)]
        tweets: TweetsArgs,
        /// Write the accepted tweets here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Template bank directory to summarize
        #[arg(long)]
        banks: Option<PathBuf>,
        /// Group rosters to summarize
        #[arg(long)]
        rosters: Option<PathBuf>,
    },
    /// Print the canonical and spaceless forms of each input line
    Normalize {
        /// Read lines from standard input
        #[arg(long, required = true)]
        stdin: bool,
        /// Keep letter case
        #[arg(long)]
        no_casefold: bool,
    },
    /// Extract trend alerts from group messages
    ParseAlerts {
        #[arg(long)]
        messages: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a CSV naming the grammar rule behind each alert
        #[arg(long)]
        grammar_report: Option<PathBuf>,
        /// Year assumed for dates written without one (default: each message's send year)
        #[arg(long)]
        default_year: Option<i32>,
        /// Cross-group repost gap below which a sender is flagged as automated
        #[arg(long, default_value_t = DEFAULT_AUTOMATION_LATENCY_MS)]
        latency_ms: i64,
        /// Groups a sender must reach to be flagged
        #[arg(long, default_value_t = DEFAULT_AUTOMATION_MIN_GROUPS)]
        min_groups: usize,
    },
    /// Link tweets to template-bank entries
    Match {
        #[command(flatten)]
        tweets: TweetsArgs,
        /// Directory of template bank documents
        #[arg(long)]
        banks: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify campaign participants and write the participation histogram
    Participants {
        #[command(flatten)]
        tweets: TweetsArgs,
        #[arg(long)]
        banks: PathBuf,
        /// Match records from `match`
        #[arg(long)]
        matches: PathBuf,
        /// Histogram CSV
        #[arg(long)]
        out: PathBuf,
        /// Per-participant records
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Compute repeated-content ratios and label hashtags
    Detect {
        #[command(flatten)]
        tweets: TweetsArgs,
        /// Match records; seed participants are derived from them when --seeds is absent
        #[arg(long)]
        matches: Option<PathBuf>,
        /// Seed participant ids, one per line
        #[arg(long)]
        seeds: Option<PathBuf>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// Verdict records
        #[arg(long)]
        out: PathBuf,
        /// Verdict CSV for plotting
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build volume series and detect trend episodes
    Trends {
        #[command(flatten)]
        tweets: TweetsArgs,
        /// Comma-separated hashtags
        #[arg(long, value_delimiter = ',', conflicts_with = "verdicts", required_unless_present = "verdicts")]
        hashtags: Vec<String>,
        /// Verdict records; every suspicious hashtag is analyzed
        #[arg(long)]
        verdicts: Option<PathBuf>,
        #[command(flatten)]
        trend: TrendArgs,
        /// Series bin width in seconds
        #[arg(long, default_value = "60")]
        bin_seconds: i64,
        /// Count original tweets only
        #[arg(long)]
        exclude_retweets: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Count flagged hashtags per month
    Scope {
        #[command(flatten)]
        tweets: TweetsArgs,
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare corpus volumes with trend-archive counts
    Coverage {
        #[command(flatten)]
        tweets: TweetsArgs,
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a labeled synthetic corpus
    Synth {
        /// TOML configuration (default: built-in configuration)
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Keep this fraction of tweets after generation
        #[arg(long)]
        downsample: Option<f64>,
        /// Remove retweets preferentially when downsampling
        #[arg(long, requires = "downsample")]
        bias_retweets: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the whole pipeline and write the report bundle
    Report {
        #[command(flatten)]
        tweets: TweetsArgs,
        #[arg(long)]
        banks: PathBuf,
        /// Group messages for alert forensics
        #[arg(long)]
        messages: Option<PathBuf>,
        /// Trend-archive snapshots for coverage
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[command(flatten)]
        trend: TrendArgs,
        /// Year assumed for alert dates written without one (default: each message's send year)
        #[arg(long)]
        default_year: Option<i32>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let bytes = json_pretty(value)?;
    std::io::stdout()
        .write_all(&bytes)
        .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))
}

fn load_matches(path: &Path) -> CliResult<Vec<MatchRecord>> {
    require_file(path)?;
    Ok(read_jsonl(path, |_: &MatchRecord| Ok(()))?)
}

fn load_verdicts(path: &Path) -> CliResult<Vec<HashtagVerdict>> {
    require_file(path)?;
    Ok(read_jsonl(path, |_: &HashtagVerdict| Ok(()))?)
}

fn load_seeds(path: &Path) -> CliResult<BTreeSet<String>> {
    require_file(path)?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

pub fn run(cli: Cli) -> CliResult<()> {
    if cli.workers == 0 {
        return Err(Failure::input("--workers must be at least 1"));
    }
    // Stages that do not take a worker count use rayon's global pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build_global();
    let offset = DisplayOffset(cli.offset);

    match cli.command {
        Command::Ingest {
            tweets,
            out,
            banks,
            rosters,
        } => {
            let (corpus, report) = load_tweets(&tweets.tweets, &tweets.options())?;
            let banks = banks.as_deref().map(load_banks).transpose()?;
            let rosters = match rosters {
                Some(p) => {
                    require_file(&p)?;
                    Some(read_rosters(&p)?)
                }
                None => None,
            };
            if let Some(out) = out {
                let mut bytes = Vec::new();
                write_tweets(&mut bytes, &corpus).map_err(|e| Failure::invariant(e.to_string()))?;
                write_file(&out, &bytes)?;
            }
            print_json(&serde_json::json!({
                "ingest": report,
                "hashtags": corpus.hashtags().len(),
                "banks": banks.as_deref().map(bank_stats),
                "groups": rosters.as_deref().map(group_stats),
            }))
        }

        Command::Normalize { stdin: _, no_casefold } => {
            let opts = NormalizeOptions { casefold: !no_casefold };
            let stdin = std::io::stdin();
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            for line in stdin.lock().lines() {
                let line = line.map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
                let f = normalize_with(&line, opts);
                writeln!(out, "{}\t{}", f.canonical, f.spaceless)
                    .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))?;
            }
            out.flush().map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))
        }

        Command::ParseAlerts {
            messages,
            out,
            grammar_report,
            default_year,
            latency_ms,
            min_groups,
        } => {
            let messages = load_messages(&messages)?;
            let alerts = parse_alerts(&messages, default_year);
            let grammar = grammar_report.map(|p| grammar_report_csv(&alerts, offset).map(|b| (p, b))).transpose()?;
            let forensics = alert_forensics(alerts, &messages, latency_ms, min_groups);
            write_file(&out, &jsonl(&forensics)?)?;
            if let Some((path, bytes)) = grammar {
                write_file(&path, &bytes)?;
            }
            let automated: BTreeSet<&str> = forensics
                .iter()
                .filter(|f| f.sender_automated)
                .map(|f| f.alert.source.sender_id.as_str())
                .collect();
            print_json(&serde_json::json!({
                "messages": messages.len(),
                "alerts": forensics.len(),
                "scheduled": forensics.iter().filter(|f| f.alert.scheduled_at.is_some()).count(),
                "automated_senders": automated,
            }))
        }

        Command::Match { tweets, banks, out } => {
            let (corpus, _) = load_tweets(&tweets.tweets, &tweets.options())?;
            let banks = load_banks(&banks)?;
            let index = TemplateIndex::build(&banks);
            let output = match_corpus(&corpus, &index, cli.workers)?;
            write_file(&out, &jsonl(&output.records)?)?;
            print_json(&output.counts)
        }

        Command::Participants {
            tweets,
            banks,
            matches,
            out,
            records,
        } => {
            let (corpus, _) = load_tweets(&tweets.tweets, &tweets.options())?;
            let banks = load_banks(&banks)?;
            let matches = load_matches(&matches)?;
            let (participants, summary) = classify_participants(&matches, &corpus, &banks);
            write_file(&out, &participants_csv(&summary)?)?;
            if let Some(path) = records {
                write_file(&path, &participant_records_jsonl(&participants)?)?;
            }
            print_json(&serde_json::json!({
                "participants": participants.len(),
                "core_participants": summary.core_participants,
                "mean_participants_per_campaign": summary.mean_participants,
                "core_contribution_share": core_contribution_share(&participants),
            }))
        }

        Command::Detect {
            tweets,
            matches,
            seeds,
            thresholds,
            out,
            csv,
        } => {
            let th = thresholds.thresholds()?;
            let (corpus, _) = load_tweets(&tweets.tweets, &tweets.options())?;
            let seeds = match (seeds, matches) {
                (Some(path), _) => load_seeds(&path)?,
                (None, Some(path)) => seed_participants_from_matches(&load_matches(&path)?, &corpus),
                (None, None) => return Err(Failure::input("detect needs --seeds or --matches")),
            };
            let verdicts = classify_hashtags(&corpus, &seeds, &th)?;
            let csv_bytes = csv.map(|p| verdicts_csv(&verdicts).map(|b| (p, b))).transpose()?;
            write_file(&out, &jsonl(&verdicts)?)?;
            if let Some((path, bytes)) = csv_bytes {
                write_file(&path, &bytes)?;
            }
            print_json(&serde_json::json!({
                "hashtags": verdicts.len(),
                "suspicious": verdicts.iter().filter(|v| v.label.is_suspicious()).count(),
                "suspicious_conservative": verdicts
                    .iter()
                    .filter(|v| v.label == trendforge_core::detection::Label::SuspiciousConservative)
                    .count(),
            }))
        }

        Command::Trends {
            tweets,
            hashtags,
            verdicts,
            trend,
            bin_seconds,
            exclude_retweets,
            out_dir,
        } => {
            let params = trend.params()?;
            if bin_seconds <= 0 {
                return Err(Failure::input("--bin-seconds must be positive"));
            }
            let (corpus, _) = load_tweets(&tweets.tweets, &tweets.options())?;
            let verdicts = verdicts.as_deref().map(load_verdicts).transpose()?;
            let tags: Vec<String> = match &verdicts {
                Some(v) => v
                    .iter()
                    .filter(|v| v.label.is_suspicious())
                    .map(|v| v.hashtag.clone())
                    .collect(),
                None => hashtags
                    .iter()
                    .map(|h| clean_hashtag(h))
                    .filter(|h| !h.is_empty())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            };
            let results = episodes_for(
                &corpus,
                &tags,
                &params,
                Duration::seconds(bin_seconds),
                !exclude_retweets,
            )?;
            let mut bundle = Bundle::new();
            for (series, _) in &results {
                bundle.add(
                    Path::new("series").join(format!("{}.csv", series.hashtag)),
                    series_csv(series, offset)?,
                );
            }
            let episodes: Vec<_> = results.into_iter().flat_map(|(_, e)| e).collect();
            bundle.add("episodes.csv", episodes_csv(&episodes, offset)?);
            let summary = match &verdicts {
                Some(v) => trend_summary(&episodes, v),
                None => trend_summary_for(&episodes, &tags.iter().map(String::as_str).collect::<Vec<_>>()),
            };
            bundle.add("summary.json", json_pretty(&summary)?);
            bundle.commit(&out_dir)?;
            print_json(&summary)
        }

        Command::Scope { tweets, verdicts, out } => {
            let (corpus, _) = load_tweets(&tweets.tweets, &tweets.options())?;
            let verdicts = load_verdicts(&verdicts)?;
            let scope = scope_by_month(&verdicts, &corpus, offset.offset());
            write_file(&out, &scope_csv(&scope)?)?;
            print_json(&scope)
        }

        Command::Coverage { tweets, snapshots, out } => {
            let (corpus, _) = load_tweets(&tweets.tweets, &tweets.options())?;
            let snapshots = load_snapshots(&snapshots)?;
            let report = estimate_coverage(&corpus, &snapshots);
            write_file(&out, &coverage_csv(&report)?)?;
            print_json(&report.aggregate)
        }

        Command::Synth {
            config,
            seed,
            downsample: keep,
            bias_retweets,
            out_dir,
        } => {
            let cfg = match config {
                Some(path) => {
                    require_file(&path)?;
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
                    SynthConfig::from_toml(&text)?
                }
                None => SynthConfig::default(),
            };
            let mut synthetic = generate(&cfg, seed)?;
            let generated = synthetic.corpus.len();
            if let Some(keep) = keep {
                synthetic.corpus = downsample(&synthetic.corpus, keep, seed, bias_retweets)?.corpus;
            }
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| Failure::input(format!("cannot create {}: {e}", out_dir.display())))?;
            write_bundle(&out_dir, &synthetic)?;
            print_json(&serde_json::json!({
                "generated_tweets": generated,
                "written_tweets": synthetic.corpus.len(),
                "campaigns": synthetic.truth.campaigns.len(),
                "banks": synthetic.banks.len(),
                "messages": synthetic.messages.len(),
            }))
        }

        Command::Report {
            tweets,
            banks,
            messages,
            snapshots,
            thresholds,
            trend,
            default_year,
            out_dir,
        } => {
            let mut cfg = RunConfig::new(&tweets.tweets, banks, out_dir);
            cfg.ingest = tweets.options();
            cfg.messages = messages;
            cfg.snapshots = snapshots;
            cfg.thresholds = thresholds.thresholds()?;
            cfg.trend = trend.params()?;
            cfg.offset = offset;
            cfg.default_year = default_year;
            cfg.workers = cli.workers;
            let summary = run_pipeline(&cfg)?;
            print_json(&summary)
        }
    }
}
