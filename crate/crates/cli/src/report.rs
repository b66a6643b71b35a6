//! Report rendering and the full `report` pipeline.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;

use trendforge_core::alerts::{
    flag_automation, parse_alert, profile_senders, AlertParser, TrendAlert,
    DEFAULT_AUTOMATION_LATENCY_MS, DEFAULT_AUTOMATION_MIN_GROUPS,
};
use trendforge_core::corpus::{
    clean_hashtag, ingest_tweets, load_banks_dir, read_messages, read_snapshots, Corpus, GroupMessage,
    IngestOptions, IngestReport, TemplateBank, TrendSnapshot,
};
use trendforge_core::detection::{
    classify_hashtags, classify_participants, scope_by_month, seed_participants_from_matches, HashtagVerdict,
    Label, ParticipantRecord, ParticipationSummary, ScopeEstimate, Thresholds,
};
use trendforge_core::matching::{match_corpus, MatchOutput, TemplateIndex};
use trendforge_core::time::DisplayOffset;
use trendforge_core::trends::{
    build_series, detect_trend, estimate_coverage, trend_summary, CoverageReport, TrendEpisode, TrendParams,
    TrendSummary, VolumeSeries,
};

use crate::error::{CliResult, Failure};
use crate::output::{csv_bytes, jsonl, json_pretty, Bundle};

/// Everything one `report` run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tweets: PathBuf,
    pub banks: PathBuf,
    pub messages: Option<PathBuf>,
    pub snapshots: Option<PathBuf>,
    pub ingest: IngestOptions,
    pub thresholds: Thresholds,
    pub trend: TrendParams,
    pub offset: DisplayOffset,
    /// Year for alert dates written without one; the send year when unset.
    pub default_year: Option<i32>,
    pub automation_latency_ms: i64,
    pub automation_min_groups: usize,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(tweets: impl Into<PathBuf>, banks: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            tweets: tweets.into(),
            banks: banks.into(),
            messages: None,
            snapshots: None,
            ingest: IngestOptions::default(),
            thresholds: Thresholds::default(),
            trend: TrendParams::default(),
            offset: DisplayOffset::default(),
            default_year: None,
            automation_latency_ms: DEFAULT_AUTOMATION_LATENCY_MS,
            automation_min_groups: DEFAULT_AUTOMATION_MIN_GROUPS,
            workers: 1,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        self.thresholds.validate()?;
        if self.workers == 0 {
            return Err(Failure::input("worker count must be at least 1"));
        }
        validate_trend(&self.trend)
    }
}

pub fn validate_trend(p: &TrendParams) -> CliResult<()> {
    if p.window <= chrono::Duration::zero() || p.clear_after < chrono::Duration::zero() {
        return Err(Failure::input("trend window must be positive and clear-after nonnegative"));
    }
    if p.threshold == 0 {
        return Err(Failure::input("trend threshold must be at least 1"));
    }
    Ok(())
}

pub const REPORT_FILES: [&str; 7] = [
    "matches.jsonl",
    "participants.csv",
    "verdicts.csv",
    "episodes.csv",
    "scope.csv",
    "coverage.csv",
    "alert_forensics.jsonl",
];

pub fn load_tweets(path: &Path, opts: &IngestOptions) -> CliResult<(Corpus, IngestReport)> {
    require_file(path)?;
    Ok(ingest_tweets(path, opts)?)
}

pub fn load_banks(dir: &Path) -> CliResult<Vec<TemplateBank>> {
    if !dir.exists() {
        return Err(Failure::input(format!("banks directory {} does not exist", dir.display())));
    }
    let banks = load_banks_dir(dir)?;
    if banks.is_empty() {
        return Err(Failure::input(format!("no template banks found in {}", dir.display())));
    }
    Ok(banks)
}

pub fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::input(format!("input file {} does not exist", path.display())))
    }
}

pub fn load_messages(path: &Path) -> CliResult<Vec<GroupMessage>> {
    require_file(path)?;
    Ok(read_messages(path)?)
}

pub fn load_snapshots(path: &Path) -> CliResult<Vec<TrendSnapshot>> {
    require_file(path)?;
    Ok(read_snapshots(path)?)
}

/// An alert with its sender's forensic profile attached.
#[derive(Debug, Clone, Serialize)]
pub struct AlertForensics {
    #[serde(flatten)]
    pub alert: TrendAlert,
    pub heuristic: bool,
    pub sender_groups_reached: usize,
    pub sender_min_latency_ms: Option<i64>,
    pub sender_automated: bool,
}

pub fn parse_alerts(messages: &[GroupMessage], default_year: Option<i32>) -> Vec<TrendAlert> {
    match default_year {
        Some(y) => AlertParser::new(y).parse_all(messages),
        None => messages.iter().filter_map(parse_alert).collect(),
    }
}

pub fn alert_forensics(
    alerts: Vec<TrendAlert>,
    messages: &[GroupMessage],
    latency_ms: i64,
    min_groups: usize,
) -> Vec<AlertForensics> {
    let profiles = profile_senders(&alerts, messages);
    let automated: BTreeSet<String> = flag_automation(&profiles, latency_ms, min_groups).into_iter().collect();
    alerts
        .into_iter()
        .map(|alert| {
            let p = profiles
                .iter()
                .find(|p| p.sender_id == alert.source.sender_id)
                .expect("every alert sender has a profile");
            AlertForensics {
                heuristic: alert.grammar.heuristic(),
                sender_groups_reached: p.groups_reached,
                sender_min_latency_ms: p.min_cross_group_latency_ms,
                sender_automated: automated.contains(&alert.source.sender_id),
                alert,
            }
        })
        .collect()
}

pub fn grammar_report_csv(alerts: &[TrendAlert], offset: DisplayOffset) -> CliResult<Vec<u8>> {
    csv_bytes(
        &[
            "group_id",
            "sender_id",
            "sent_at",
            "hashtag",
            "scheduled_at",
            "date_rule",
            "year_defaulted",
            "time_rule",
            "has_doc_link",
            "heuristic",
        ],
        |w| {
            for a in alerts {
                let g = &a.grammar;
                w.write_record([
                    a.source.group_id.clone(),
                    a.source.sender_id.clone(),
                    offset.render(&a.source.sent_at),
                    a.hashtag.clone(),
                    a.scheduled_at.map(|t| offset.render(&t)).unwrap_or_default(),
                    g.date_rule.map(|r| enum_name(&r)).unwrap_or_default(),
                    g.year_defaulted.to_string(),
                    g.time_rule.map(|r| enum_name(&r)).unwrap_or_default(),
                    g.has_doc_link.to_string(),
                    g.heuristic().to_string(),
                ])?;
            }
            Ok(())
        },
    )
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Participation histogram: number of campaigns joined against participants
/// and the template tweets they posted.
pub fn participants_csv(summary: &ParticipationSummary) -> CliResult<Vec<u8>> {
    csv_bytes(&["campaigns_joined", "participants", "template_tweets"], |w| {
        for (joined, bin) in &summary.histogram {
            w.write_record([joined.to_string(), bin.participants.to_string(), bin.template_tweets.to_string()])?;
        }
        Ok(())
    })
}

pub fn participant_records_jsonl(records: &[ParticipantRecord]) -> CliResult<Vec<u8>> {
    jsonl(records)
}

pub fn verdicts_csv(verdicts: &[HashtagVerdict]) -> CliResult<Vec<u8>> {
    csv_bytes(
        &[
            "hashtag",
            "volume",
            "original_volume",
            "eligible_volume",
            "repeated_count",
            "duplicate_ratio",
            "seed_participants",
            "label",
        ],
        |w| {
            for v in verdicts {
                w.write_record([
                    v.hashtag.clone(),
                    v.volume.to_string(),
                    v.original_volume.to_string(),
                    v.eligible_volume.to_string(),
                    v.repeated_count.to_string(),
                    v.duplicate_ratio.map(|r| format!("{r:.6}")).unwrap_or_default(),
                    v.seed_participants.to_string(),
                    v.label.name().to_string(),
                ])?;
            }
            Ok(())
        },
    )
}

pub fn episodes_csv(episodes: &[TrendEpisode], offset: DisplayOffset) -> CliResult<Vec<u8>> {
    csv_bytes(
        &[
            "hashtag",
            "onset_at",
            "cleared_at",
            "duration_minutes",
            "peak_window_count",
            "total_tweets",
        ],
        |w| {
            for e in episodes {
                w.write_record([
                    e.hashtag.clone(),
                    offset.render(&e.onset_at),
                    e.cleared_at.map(|t| offset.render(&t)).unwrap_or_default(),
                    e.duration().map(|d| d.num_minutes().to_string()).unwrap_or_default(),
                    e.peak_window_count.to_string(),
                    e.total_tweets.to_string(),
                ])?;
            }
            Ok(())
        },
    )
}

pub fn series_csv(series: &VolumeSeries, offset: DisplayOffset) -> CliResult<Vec<u8>> {
    csv_bytes(&["bin_start", "count"], |w| {
        for (start, count) in series.bins() {
            w.write_record([offset.render(&start), count.to_string()])?;
        }
        Ok(())
    })
}

pub fn scope_csv(scope: &[ScopeEstimate]) -> CliResult<Vec<u8>> {
    csv_bytes(&["month", "suspicious", "suspicious_conservative"], |w| {
        for s in scope {
            w.write_record([
                format!("{:04}-{:02}", s.month.year, s.month.month),
                s.suspicious_count.to_string(),
                s.conservative_count.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn coverage_csv(report: &CoverageReport) -> CliResult<Vec<u8>> {
    csv_bytes(&["hashtag", "corpus_count", "reported_count", "coverage", "over_report"], |w| {
        for c in &report.per_hashtag {
            w.write_record([
                c.hashtag.clone(),
                c.corpus_count.to_string(),
                c.reported_count.to_string(),
                format!("{:.6}", c.coverage),
                c.over_report.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Hashtags whose trend status is reported: every bank's campaign hashtag
/// plus every hashtag flagged suspicious.
pub fn trend_hashtags(banks: &[TemplateBank], verdicts: &[HashtagVerdict]) -> Vec<String> {
    let mut tags: BTreeSet<String> = banks
        .iter()
        .map(|b| clean_hashtag(&b.campaign_hashtag))
        .filter(|t| !t.is_empty())
        .collect();
    tags.extend(verdicts.iter().filter(|v| v.label.is_suspicious()).map(|v| v.hashtag.clone()));
    tags.into_iter().collect()
}

pub fn episodes_for(
    corpus: &Corpus,
    hashtags: &[String],
    params: &TrendParams,
    bin: chrono::Duration,
    include_retweets: bool,
) -> CliResult<Vec<(VolumeSeries, Vec<TrendEpisode>)>> {
    hashtags
        .iter()
        .map(|h| {
            let series = build_series(h, corpus, bin, include_retweets)?;
            let eps = detect_trend(&series, params)?;
            Ok((series, eps))
        })
        .collect()
}

/// Cross-checks between stages; a failure here is a bug, not bad input.
fn check_invariants(verdicts: &[HashtagVerdict], scope: &[ScopeEstimate], th: &Thresholds) -> CliResult<()> {
    for v in verdicts {
        if v.label == Label::SuspiciousConservative && !v.duplicate_ratio.is_some_and(|r| r > th.standard) {
            return Err(Failure::invariant(format!(
                "#{} is conservatively flagged but not above the standard threshold",
                v.hashtag
            )));
        }
    }
    if let Some(s) = scope.iter().find(|s| s.conservative_count > s.suspicious_count) {
        return Err(Failure::invariant(format!(
            "{}: conservative count exceeds standard count",
            s.month
        )));
    }
    Ok(())
}

/// Headline numbers printed after a run.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub tweets: usize,
    pub rejected_lines: usize,
    pub banks: usize,
    pub match_records: usize,
    pub participants: usize,
    pub core_participants: usize,
    pub evaluated_hashtags: usize,
    pub suspicious: usize,
    pub suspicious_conservative: usize,
    pub trends: TrendSummary,
    pub alerts: usize,
    pub automated_senders: usize,
    pub coverage_median: Option<f64>,
    pub files: Vec<String>,
}

/// Run every stage and render the seven report files without touching disk.
pub fn build_report(cfg: &RunConfig) -> CliResult<(Bundle, ReportSummary)> {
    cfg.validate()?;

    let (corpus, ingest) = load_tweets(&cfg.tweets, &cfg.ingest)?;
    let banks = load_banks(&cfg.banks)?;
    let messages = cfg.messages.as_deref().map(load_messages).transpose()?.unwrap_or_default();
    let snapshots = cfg.snapshots.as_deref().map(load_snapshots).transpose()?.unwrap_or_default();

    let index = TemplateIndex::build(&banks);
    let MatchOutput { records, .. } = match_corpus(&corpus, &index, cfg.workers)?;
    let (participants, participation) = classify_participants(&records, &corpus, &banks);
    let seeds = seed_participants_from_matches(&records, &corpus);
    let verdicts = classify_hashtags(&corpus, &seeds, &cfg.thresholds)?;
    let scope = scope_by_month(&verdicts, &corpus, cfg.offset.offset());
    check_invariants(&verdicts, &scope, &cfg.thresholds)?;

    let tags = trend_hashtags(&banks, &verdicts);
    let episodes: Vec<TrendEpisode> = episodes_for(&corpus, &tags, &cfg.trend, chrono::Duration::minutes(1), true)?
        .into_iter()
        .flat_map(|(_, e)| e)
        .collect();
    let trends = trend_summary(&episodes, &verdicts);
    let coverage = estimate_coverage(&corpus, &snapshots);
    let alerts = parse_alerts(&messages, cfg.default_year);
    let forensics = alert_forensics(alerts, &messages, cfg.automation_latency_ms, cfg.automation_min_groups);

    let mut bundle = Bundle::new();
    bundle.add(REPORT_FILES[0], jsonl(&records)?);
    bundle.add(REPORT_FILES[1], participants_csv(&participation)?);
    bundle.add(REPORT_FILES[2], verdicts_csv(&verdicts)?);
    bundle.add(REPORT_FILES[3], episodes_csv(&episodes, cfg.offset)?);
    bundle.add(REPORT_FILES[4], scope_csv(&scope)?);
    bundle.add(REPORT_FILES[5], coverage_csv(&coverage)?);
    bundle.add(REPORT_FILES[6], jsonl(&forensics)?);

    let summary = ReportSummary {
        tweets: corpus.len(),
        rejected_lines: ingest.rejects.len(),
        banks: banks.len(),
        match_records: records.len(),
        participants: participants.len(),
        core_participants: participation.core_participants,
        evaluated_hashtags: verdicts.iter().filter(|v| v.label != Label::NotEvaluated).count(),
        suspicious: verdicts.iter().filter(|v| v.label.is_suspicious()).count(),
        suspicious_conservative: verdicts
            .iter()
            .filter(|v| v.label == Label::SuspiciousConservative)
            .count(),
        trends,
        alerts: forensics.len(),
        automated_senders: forensics
            .iter()
            .filter(|f| f.sender_automated)
            .map(|f| f.alert.source.sender_id.as_str())
            .collect::<BTreeSet<_>>()
            .len(),
        coverage_median: coverage.aggregate.map(|a| a.median),
        files: bundle.names().map(|p| p.display().to_string()).collect(),
    };
    Ok((bundle, summary))
}

/// Build the report and write it to `cfg.out_dir`. Nothing is written when
/// any stage fails.
pub fn run_pipeline(cfg: &RunConfig) -> CliResult<ReportSummary> {
    let (mut bundle, summary) = build_report(cfg)?;
    bundle.add("summary.json", json_pretty(&summary)?);
    bundle.commit(&cfg.out_dir)?;
    Ok(summary)
}
