//! Seeded synthetic corpora: organic background traffic plus planted
//! template campaigns, with ground-truth labels.
//!
//! Every random choice comes from a ChaCha stream derived from the seed and
//! a fixed stream id, so output is identical for identical inputs whatever
//! the thread count.

mod config;
mod text;
mod timing;
mod truth;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Timelike, Utc};
use rand::distr::weighted::WeightedIndex;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal};
use rayon::prelude::*;

use crate::corpus::{
    clean_hashtag, extract_hashtags, render_bank, write_jsonl, Corpus, GroupMessage, GroupRoster,
    TemplateBank, TrendEntry, TrendSnapshot, Tweet,
};
use crate::matching::{edit_distance_bounded, EXACT_MIN_CHARS, FUZZY_MIN_CHARS, MAX_FUZZY_DISTANCE};
use crate::textnorm::normalize;
use crate::time::{ist, Timestamp};
use crate::{Error, Result};

pub use config::{
    CampaignSpec, ChatSpec, OrganicSpec, ParticipationSpec, PerturbationKind, Ramp, SynthConfig,
};
pub use text::CITIES;
pub use timing::RateCurve;
pub use truth::{AuthorLabel, CampaignTruth, GroundTruth, TweetLabel};

const STREAM_VOCAB: u64 = 1;
const STREAM_PLAN: u64 = 2;
const STREAM_PARTICIPANTS: u64 = 3;
const STREAM_ORGANIC: u64 = 4;
const STREAM_CHAT: u64 = 5;
const STREAM_DOWNSAMPLE: u64 = 6;
const STREAM_CAMPAIGN_BASE: u64 = 1_000;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A generated corpus with its side inputs and labels.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub corpus: Corpus,
    pub banks: Vec<TemplateBank>,
    pub messages: Vec<GroupMessage>,
    pub rosters: Vec<GroupRoster>,
    pub snapshots: Vec<TrendSnapshot>,
    pub truth: GroundTruth,
}

/// A campaign spec with every optional field decided.
#[derive(Debug, Clone)]
struct Plan {
    spec: CampaignSpec,
    hashtag: String,
    bank_id: String,
    launch_at: Timestamp,
    members: Vec<(String, bool)>,
    originals: usize,
    retweets: usize,
}

/// Whether a perturbed text stays within the matcher's reach of its
/// template.
pub fn reachable(text: &str, template: &str) -> bool {
    let a = normalize(text);
    let b = normalize(template);
    if a.char_len < EXACT_MIN_CHARS {
        return false;
    }
    if a.canonical == b.canonical || a.spaceless == b.spaceless {
        return true;
    }
    a.char_len >= FUZZY_MIN_CHARS
        && b.char_len >= FUZZY_MIN_CHARS
        && edit_distance_bounded(&a.canonical, &b.canonical, MAX_FUZZY_DISTANCE).is_some()
}

fn plan_campaigns(cfg: &SynthConfig, seed: u64, vocab: &text::Vocab) -> Vec<Plan> {
    let mut rng = stream_rng(seed, STREAM_PLAN);
    let mut specs = cfg.campaign.clone();
    let taken: HashSet<String> = specs.iter().map(|s| clean_hashtag(&s.hashtag)).collect();
    for i in 0..cfg.auto_campaigns {
        loop {
            let name = format!(
                "{}{}{:02}",
                capitalized(&vocab.latin_word(&mut rng)),
                capitalized(&vocab.latin_word(&mut rng)),
                i
            );
            if !taken.contains(&clean_hashtag(&name)) {
                specs.push(CampaignSpec::new(&name));
                break;
            }
        }
    }

    // Campaigns without a launch time are spread evenly, one per slot.
    let first_day = (cfg.start.with_timezone(&ist()) + Duration::days(1)).date_naive();
    let last_day = (cfg.end.with_timezone(&ist()) - Duration::days(1)).date_naive();
    let days = (last_day - first_day).num_days().max(0);
    let unscheduled = specs.iter().filter(|s| s.launch_at.is_none()).count().max(1) as i64;
    let mut slot = 0;

    let p = &cfg.participation;
    let sigma = p.participants_sigma;
    let lognormal = LogNormal::new(p.mean_participants.ln() - sigma * sigma / 2.0, sigma).expect("validated");

    let mut plans = Vec::with_capacity(specs.len());
    for (i, spec) in specs.into_iter().enumerate() {
        let launch_at = spec.launch_at.unwrap_or_else(|| {
            let day = first_day + Duration::days(days * slot / unscheduled);
            slot += 1;
            let hour = *[9, 9, 9, 10, 18, 20].choose(&mut rng).unwrap();
            ist()
                .from_local_datetime(&day.and_hms_opt(hour, 0, 0).unwrap())
                .unwrap()
                .to_utc()
        });
        let participants = spec
            .n_participants
            .unwrap_or_else(|| (lognormal.sample(&mut rng).round() as usize).max(1));
        let (originals, retweets) = match spec.total_tweets {
            Some(total) => {
                let o = ((total as f64 / (1.0 + spec.retweet_multiplier)).round() as usize).clamp(1, total.max(1));
                (o, total.saturating_sub(o))
            }
            None => {
                let o = ((participants as f64 * spec.posts_per_participant).round() as usize).max(1);
                (o, (o as f64 * spec.retweet_multiplier).round() as usize)
            }
        };
        plans.push(Plan {
            hashtag: clean_hashtag(&spec.hashtag),
            bank_id: format!("bank-{i:03}"),
            launch_at,
            members: vec![(String::new(), false); participants.min(originals)],
            originals,
            retweets,
            spec,
        });
    }
    plans
}

fn capitalized(w: &str) -> String {
    let mut c = w.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

/// Fill each plan's member list from a shared core pool and a growing pool
/// of occasional participants.
fn assign_participants(plans: &mut [Plan], p: &ParticipationSpec, seed: u64) {
    let mut rng = stream_rng(seed, STREAM_PARTICIPANTS);
    let slots: usize = plans.iter().map(|pl| pl.members.len()).sum();
    let core: Vec<String> = (0..(p.core_share * slots as f64).round() as usize)
        .map(|i| format!("p{i:06}"))
        .collect();
    let mut next_id = core.len();
    let mut occasional: Vec<String> = Vec::new();

    for plan in plans.iter_mut() {
        let want = plan.members.len();
        let mut members: Vec<(String, bool)> = Vec::with_capacity(want);
        let mut joined: HashSet<String> = HashSet::new();
        for c in &core {
            if members.len() < want && rng.random_bool(p.core_join_prob) {
                joined.insert(c.clone());
                members.push((c.clone(), true));
            }
        }
        let mut fresh: Vec<String> = Vec::new();
        while members.len() < want {
            let mut pick = None;
            if !occasional.is_empty() && rng.random_bool(p.repeat_prob) {
                for _ in 0..5 {
                    let cand = occasional.choose(&mut rng).unwrap();
                    if !joined.contains(cand) {
                        pick = Some(cand.clone());
                        break;
                    }
                }
            }
            let id = pick.unwrap_or_else(|| {
                let id = format!("p{next_id:06}");
                next_id += 1;
                fresh.push(id.clone());
                id
            });
            joined.insert(id.clone());
            members.push((id, false));
        }
        occasional.extend(fresh);
        plan.members = members;
    }
}

struct CampaignOutput {
    bank: TemplateBank,
    tweets: Vec<Tweet>,
    labels: Vec<(String, TweetLabel)>,
}

fn generate_campaign(
    ci: usize,
    plan: &Plan,
    vocab: &text::Vocab,
    organic_authors: usize,
    p: &ParticipationSpec,
    seed: u64,
) -> CampaignOutput {
    let mut rng = stream_rng(seed, STREAM_CAMPAIGN_BASE + ci as u64);
    let spec = &plan.spec;
    let display_tag = spec.hashtag.trim_start_matches('#');
    let templates: Vec<String> = (0..spec.n_templates)
        .map(|_| text::template(vocab, display_tag, &mut rng))
        .collect();
    let bank = TemplateBank {
        bank_id: plan.bank_id.clone(),
        campaign_hashtag: plan.hashtag.clone(),
        launch_at: Some(plan.launch_at),
        templates: templates.clone(),
        source_url: Some(format!("https://docs.google.com/document/d/{}", plan.bank_id)),
    };

    // Every member posts once, the rest follow posting weights.
    let mut authors: Vec<usize> = (0..plan.members.len()).collect();
    if plan.originals > authors.len() {
        let weights: Vec<f64> = plan
            .members
            .iter()
            .map(|(_, core)| if *core { p.core_weight } else { 1.0 })
            .collect();
        let dist = WeightedIndex::new(&weights).expect("positive weights");
        authors.extend((authors.len()..plan.originals).map(|_| dist.sample(&mut rng)));
    }
    authors.shuffle(&mut rng);

    let curve = RateCurve::new(&spec.ramp, plan.launch_at);
    let times = curve.sample_sorted(plan.originals, &mut rng);
    let mut tweets = Vec::with_capacity(plan.originals + plan.retweets);
    let mut labels = Vec::with_capacity(plan.originals + plan.retweets);
    for (j, (at, &a)) in times.iter().zip(&authors).enumerate() {
        let template_index = rng.random_range(0..templates.len());
        let template = &templates[template_index];
        let kind = if rng.random_bool(spec.perturbation_rate) {
            spec.kinds.choose(&mut rng).copied()
        } else {
            None
        };
        let raw_text = match kind {
            Some(k) => text::perturb(template, k, vocab, &mut rng),
            None => template.clone(),
        };
        let id = format!("c{ci:03}-{j:06}");
        labels.push((
            id.clone(),
            TweetLabel::Campaign {
                bank_id: plan.bank_id.clone(),
                template_index,
                perturbed: kind.is_some(),
                kind,
                reachable: reachable(&raw_text, template),
            },
        ));
        tweets.push(Tweet {
            tweet_id: id,
            author_id: plan.members[a].0.clone(),
            created_at: *at,
            hashtags: extract_hashtags(&raw_text),
            raw_text,
            is_retweet: Some(false),
            retweet_of: None,
        });
    }

    for j in 0..plan.retweets {
        let mut at = curve.sample(&mut rng);
        let before = times.partition_point(|t| *t <= at);
        let oi = if before == 0 { 0 } else { rng.random_range(0..before) };
        at = at.max(times[oi] + Duration::seconds(1));
        let original = &tweets[oi];
        let retweeter = if rng.random_bool(0.5) {
            plan.members.choose(&mut rng).unwrap().0.clone()
        } else {
            format!("u{:06}", rng.random_range(0..organic_authors))
        };
        let raw_text = format!("RT @{}: {}", original.author_id, original.raw_text);
        let id = format!("c{ci:03}-rt{j:06}");
        labels.push((id.clone(), labels[oi].1.clone()));
        tweets.push(Tweet {
            tweet_id: id,
            author_id: retweeter,
            created_at: at,
            hashtags: extract_hashtags(&raw_text),
            raw_text,
            is_retweet: Some(true),
            retweet_of: Some(original.tweet_id.clone()),
        });
    }
    CampaignOutput { bank, tweets, labels }
}

fn uniform_time(start: Timestamp, end: Timestamp, rng: &mut ChaCha8Rng) -> Timestamp {
    let span = (end - start).num_milliseconds();
    start + Duration::milliseconds(rng.random_range(0..span))
}

struct OrganicOutput {
    tweets: Vec<Tweet>,
    cities: Vec<String>,
    topics: Vec<String>,
}

fn generate_organic(
    cfg: &SynthConfig,
    vocab: &text::Vocab,
    participants: &[String],
    taken: &HashSet<String>,
    seed: u64,
) -> OrganicOutput {
    let o = &cfg.organic;
    let mut rng = stream_rng(seed, STREAM_ORGANIC);
    let cities: Vec<String> = CITIES[..o.cities].iter().map(|c| c.to_string()).collect();
    let mut topics: Vec<String> = Vec::new();
    let mut used: HashSet<String> = taken.iter().cloned().collect();
    used.extend(cities.iter().map(|c| clean_hashtag(c)));
    while topics.len() < o.topics {
        let t = format!("{}Talk", capitalized(&vocab.latin_word(&mut rng)));
        if used.insert(clean_hashtag(&t)) {
            topics.push(t);
        }
    }

    let mut counts: Vec<(String, usize)> = cities.iter().map(|c| (c.clone(), o.tweets_per_city)).collect();
    if !topics.is_empty() {
        let mut per_topic = vec![0usize; topics.len()];
        for _ in 0..o.topic_tweets {
            per_topic[rng.random_range(0..topics.len())] += 1;
        }
        counts.extend(topics.iter().cloned().zip(per_topic));
    }

    let exp = Exp::new(1.0 / 3600.0).expect("positive rate");
    let mut tweets = Vec::new();
    let mut n = 0usize;
    for (tag, originals) in counts {
        let first = tweets.len();
        for _ in 0..originals {
            let author = if !participants.is_empty() && rng.random_bool(o.participant_share) {
                participants.choose(&mut rng).unwrap().clone()
            } else {
                format!("u{:06}", rng.random_range(0..o.authors))
            };
            let raw_text = if tweets.len() > first && rng.random_bool(o.dup_rate) {
                let prev: &Tweet = &tweets[rng.random_range(first..tweets.len())];
                prev.raw_text.clone()
            } else {
                text::organic_text(vocab, &tag, &mut rng)
            };
            tweets.push(Tweet {
                tweet_id: format!("o{n:08}"),
                author_id: author,
                created_at: uniform_time(cfg.start, cfg.end, &mut rng),
                hashtags: extract_hashtags(&raw_text),
                raw_text,
                is_retweet: Some(false),
                retweet_of: None,
            });
            n += 1;
        }
        let last = tweets.len();
        if last == first {
            continue;
        }
        let retweets = (originals as f64 * o.retweet_rate).round() as usize;
        for _ in 0..retweets {
            let src = &tweets[rng.random_range(first..last)];
            let delay = Duration::seconds(exp.sample(&mut rng) as i64 + 1);
            let raw_text = format!("RT @{}: {}", src.author_id, src.raw_text);
            let t = Tweet {
                tweet_id: format!("o{n:08}"),
                author_id: format!("u{:06}", rng.random_range(0..o.authors)),
                created_at: (src.created_at + delay).min(cfg.end),
                hashtags: extract_hashtags(&raw_text),
                raw_text,
                is_retweet: Some(true),
                retweet_of: Some(src.tweet_id.clone()),
            };
            tweets.push(t);
            n += 1;
        }
    }
    OrganicOutput { tweets, cities, topics }
}

fn ceil_half_hour(t: Timestamp) -> Timestamp {
    let s = t.timestamp();
    let up = if s.rem_euclid(1800) == 0 && t.nanosecond() == 0 { s } else { (s.div_euclid(1800) + 1) * 1800 };
    DateTime::<Utc>::from_timestamp(up, 0).expect("in range")
}

/// Half-hourly trend-list captures reporting each campaign's cumulative
/// volume while it is active, up to a final capture after its last tweet.
fn snapshots(campaign_tweets: &[(String, Vec<Timestamp>)]) -> Vec<TrendSnapshot> {
    let mut grid: BTreeMap<Timestamp, Vec<TrendEntry>> = BTreeMap::new();
    for (tag, times) in campaign_tweets {
        let (Some(first), Some(last)) = (times.first(), times.last()) else {
            continue;
        };
        let mut at = ceil_half_hour(*first);
        let end = ceil_half_hour(*last);
        while at <= end {
            let n = times.partition_point(|t| *t <= at) as u64;
            grid.entry(at).or_default().push(TrendEntry {
                hashtag: tag.clone(),
                reported_tweet_count: Some(n),
            });
            at += Duration::minutes(30);
        }
    }
    grid.into_iter()
        .map(|(captured_at, entries)| TrendSnapshot {
            captured_at,
            location: "India".into(),
            entries,
        })
        .collect()
}

fn chat(cfg: &SynthConfig, plans: &[Plan], organic_authors: usize, seed: u64) -> (Vec<GroupMessage>, Vec<GroupRoster>) {
    let c = &cfg.chat;
    let mut rng = stream_rng(seed, STREAM_CHAT);
    if c.groups == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut people: Vec<String> = plans.iter().flat_map(|p| p.members.iter().map(|m| m.0.clone())).collect();
    people.sort();
    people.dedup();
    people.extend((0..organic_authors.min(2000)).map(|i| format!("u{i:06}")));

    let mut members: Vec<BTreeSet<String>> = (0..c.groups)
        .map(|_| people.choose_multiple(&mut rng, c.members_per_group.max(1)).cloned().collect())
        .collect();
    let group_id = |g: usize| format!("g{g:03}");
    let mut messages = Vec::new();

    // One hub account relays every campaign's alert into the first group.
    let hub = "hub-000".to_string();
    members[0].insert(hub.clone());
    for (ci, plan) in plans.iter().enumerate() {
        let local = plan.launch_at.with_timezone(&ist());
        let doc = format!("https://docs.google.com/document/d/{}", plan.bank_id);
        let lead = Duration::minutes(rng.random_range(12 * 60..48 * 60));
        let posted = plan.launch_at - lead;
        messages.push(GroupMessage {
            group_id: group_id(0),
            sender_id: hub.clone(),
            sent_at: posted,
            text: text::alert_text(&plan.spec.hashtag.replace('#', ""), local, &doc, &mut rng),
        });
        for k in 0..rng.random_range(1..=3) {
            let sender = format!("sender-{ci:03}-{k}");
            let alert = text::alert_text(&plan.spec.hashtag.replace('#', ""), local, &doc, &mut rng);
            let at = posted + Duration::minutes(rng.random_range(1..120));
            let automated = rng.random_bool(c.automated_share);
            let n_groups = if automated { rng.random_range(2..=c.groups.clamp(2, 5)) } else { 1 };
            let mut groups: Vec<usize> = (0..c.groups).collect();
            groups.shuffle(&mut rng);
            let mut gap = Duration::zero();
            for &g in groups.iter().take(n_groups.min(c.groups)) {
                members[g].insert(sender.clone());
                messages.push(GroupMessage {
                    group_id: group_id(g),
                    sender_id: sender.clone(),
                    sent_at: at + gap,
                    text: alert.clone(),
                });
                gap += if automated {
                    Duration::milliseconds(rng.random_range(5..300))
                } else {
                    Duration::minutes(rng.random_range(5..90))
                };
            }
        }
    }
    for _ in 0..c.chatter_messages {
        let g = rng.random_range(0..c.groups);
        let sender = members[g].iter().collect::<Vec<_>>().choose(&mut rng).map(|s| s.to_string()).unwrap();
        messages.push(GroupMessage {
            group_id: group_id(g),
            sender_id: sender,
            sent_at: uniform_time(cfg.start, cfg.end, &mut rng),
            text: text::chatter(&mut rng),
        });
    }
    messages.sort_by(|a, b| (a.sent_at, &a.group_id, &a.sender_id).cmp(&(b.sent_at, &b.group_id, &b.sender_id)));

    let rosters = members
        .into_iter()
        .enumerate()
        .map(|(g, m)| {
            let n_admins = rng.random_range(1..=3).min(m.len());
            let admins: BTreeSet<String> = m.iter().collect::<Vec<_>>().choose_multiple(&mut rng, n_admins).map(|s| s.to_string()).collect();
            GroupRoster {
                group_id: group_id(g),
                member_ids: m,
                admin_ids: admins,
            }
        })
        .collect();
    (messages, rosters)
}

/// Build a labeled synthetic corpus.
pub fn generate(cfg: &SynthConfig, seed: u64) -> Result<Synthetic> {
    cfg.validate()?;
    let o = &cfg.organic;
    let vocab = text::Vocab::generate(o.vocab_size, o.zipf_exponent, o.devanagari_share, &mut stream_rng(seed, STREAM_VOCAB));
    let mut plans = plan_campaigns(cfg, seed, &vocab);
    assign_participants(&mut plans, &cfg.participation, seed);

    let outputs: Vec<CampaignOutput> = plans
        .par_iter()
        .enumerate()
        .map(|(ci, plan)| generate_campaign(ci, plan, &vocab, o.authors, &cfg.participation, seed))
        .collect();

    let mut participants: Vec<String> = plans.iter().flat_map(|p| p.members.iter().map(|m| m.0.clone())).collect();
    participants.sort();
    participants.dedup();
    let taken: HashSet<String> = plans.iter().map(|p| p.hashtag.clone()).collect();
    let organic = generate_organic(cfg, &vocab, &participants, &taken, seed);
    let (messages, rosters) = chat(cfg, &plans, o.authors, seed);

    let mut truth = GroundTruth {
        city_hashtags: organic.cities.iter().map(|c| clean_hashtag(c)).collect(),
        topic_hashtags: organic.topics.iter().map(|c| clean_hashtag(c)).collect(),
        ..GroundTruth::default()
    };
    let mut banks = Vec::with_capacity(outputs.len());
    let mut campaign_times = Vec::with_capacity(outputs.len());
    let mut tweets: Vec<Tweet> = Vec::new();
    let mut joined: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (plan, out) in plans.iter().zip(outputs) {
        truth.campaigns.push(CampaignTruth {
            bank_id: plan.bank_id.clone(),
            hashtag: plan.hashtag.clone(),
            launch_at: plan.launch_at,
            participants: plan.members.len(),
            originals: plan.originals,
            retweets: plan.retweets,
        });
        for t in out.tweets.iter().filter(|t| !t.counts_as_retweet()) {
            joined.entry(t.author_id.clone()).or_default().insert(plan.bank_id.clone());
        }
        let mut times: Vec<Timestamp> = out.tweets.iter().map(|t| t.created_at).collect();
        times.sort();
        campaign_times.push((plan.hashtag.clone(), times));
        truth.tweets.extend(out.labels);
        tweets.extend(out.tweets);
        banks.push(out.bank);
    }
    for t in &organic.tweets {
        truth.tweets.insert(t.tweet_id.clone(), TweetLabel::Organic);
    }
    tweets.extend(organic.tweets);
    tweets.sort_by(|a, b| (a.created_at, &a.tweet_id).cmp(&(b.created_at, &b.tweet_id)));

    for t in &tweets {
        let label = match joined.get(&t.author_id) {
            Some(b) if b.len() > crate::detection::CORE_MIN_CAMPAIGNS => AuthorLabel::Core { bank_ids: b.clone() },
            Some(b) => AuthorLabel::Participant { bank_ids: b.clone() },
            None => AuthorLabel::Organic,
        };
        truth.authors.entry(t.author_id.clone()).or_insert(label);
    }

    Ok(Synthetic {
        corpus: Corpus::new(tweets)?,
        banks,
        messages,
        rosters,
        snapshots: snapshots(&campaign_times),
        truth,
    })
}

/// Launch times and volumes alone, for timeline studies that do not need
/// text: `n` instants drawn from the campaign's rate curve.
pub fn sample_timeline(ramp: &Ramp, launch_at: Timestamp, n: usize, seed: u64, stream: u64) -> Vec<Timestamp> {
    RateCurve::new(ramp, launch_at).sample_sorted(n, &mut stream_rng(seed, stream))
}

#[derive(Debug, Clone)]
pub struct Downsampled {
    pub corpus: Corpus,
    /// Ids of the removed tweets, in corpus order. Labels of the kept
    /// tweets are unchanged.
    pub removed: Vec<String>,
}

/// Keep each tweet with probability `keep`. With `bias_retweets`, retweets
/// are kept at half the rate of originals where possible while the overall
/// expected retention stays `keep`.
pub fn downsample(corpus: &Corpus, keep: f64, seed: u64, bias_retweets: bool) -> Result<Downsampled> {
    if !(keep > 0.0 && keep <= 1.0) {
        return Err(Error::Config(format!("keep fraction must be in (0, 1], got {keep}")));
    }
    let n = corpus.len().max(1) as f64;
    let r = corpus.tweets().iter().filter(|t| t.counts_as_retweet()).count() as f64 / n;
    let (p_orig, p_rt) = if bias_retweets && r > 0.0 && r < 1.0 {
        let p_rt = keep / 2.0;
        let p_orig = (keep - r * p_rt) / (1.0 - r);
        if p_orig <= 1.0 {
            (p_orig, p_rt)
        } else {
            (1.0, (keep - (1.0 - r)) / r)
        }
    } else {
        (keep, keep)
    };

    let mut rng = stream_rng(seed, STREAM_DOWNSAMPLE);
    let mut kept = Vec::with_capacity(corpus.len());
    let mut removed = Vec::new();
    for t in corpus.tweets() {
        let p = if t.counts_as_retweet() { p_rt } else { p_orig };
        if rng.random_bool(p.clamp(0.0, 1.0)) {
            kept.push(t.clone());
        } else {
            removed.push(t.tweet_id.clone());
        }
    }
    Ok(Downsampled {
        corpus: Corpus::new(kept)?,
        removed,
    })
}

/// Write a generated bundle in the formats the ingest commands read:
/// tweets.jsonl, banks/*.txt, messages.jsonl, rosters.jsonl,
/// snapshots.jsonl and truth.jsonl.
pub fn write_bundle(dir: &Path, s: &Synthetic) -> Result<()> {
    let banks_dir = dir.join("banks");
    fs::create_dir_all(&banks_dir).map_err(|e| Error::io(&banks_dir, e))?;
    for b in &s.banks {
        let path = banks_dir.join(format!("{}.txt", b.bank_id));
        fs::write(&path, render_bank(b)).map_err(|e| Error::io(&path, e))?;
    }
    let write = |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>| -> Result<()> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))
    };
    write("tweets.jsonl", &|w| write_jsonl(w, s.corpus.tweets()))?;
    write("messages.jsonl", &|w| write_jsonl(w, &s.messages))?;
    write("rosters.jsonl", &|w| write_jsonl(w, &s.rosters))?;
    write("snapshots.jsonl", &|w| write_jsonl(w, &s.snapshots))?;
    write("truth.jsonl", &|w| s.truth.write_jsonl(w))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::duplicate_ratio;
    use crate::matching::{match_corpus, MatchTier, TemplateIndex};

    fn small() -> SynthConfig {
        SynthConfig {
            auto_campaigns: 3,
            organic: OrganicSpec {
                cities: 5,
                tweets_per_city: 200,
                topic_tweets: 200,
                topics: 4,
                authors: 300,
                ..OrganicSpec::default()
            },
            chat: ChatSpec {
                groups: 4,
                members_per_group: 20,
                chatter_messages: 20,
                automated_share: 0.5,
            },
            ..SynthConfig::default()
        }
    }

    fn bundle_bytes(s: &Synthetic) -> Vec<u8> {
        let dir = tempfile::tempdir().unwrap();
        write_bundle(dir.path(), s).unwrap();
        let mut out = Vec::new();
        let mut paths: Vec<_> = walk(dir.path());
        paths.sort();
        for p in paths {
            out.extend(p.strip_prefix(dir.path()).unwrap().to_string_lossy().as_bytes());
            out.extend(fs::read(&p).unwrap());
        }
        out
    }

    fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
        let mut out = Vec::new();
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                out.extend(walk(&p));
            } else {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate(&small(), 11).unwrap();
        let b = generate(&small(), 11).unwrap();
        assert_eq!(bundle_bytes(&a), bundle_bytes(&b));
        let c = generate(&small(), 12).unwrap();
        assert_ne!(a.corpus, c.corpus);
    }

    #[test]
    fn labels_cover_everything() {
        let s = generate(&small(), 3).unwrap();
        assert_eq!(s.truth.tweets.len(), s.corpus.len());
        for t in s.corpus.tweets() {
            assert!(s.truth.tweets.contains_key(&t.tweet_id));
            assert!(s.truth.authors.contains_key(&t.author_id));
        }
        assert_eq!(s.banks.len(), 3);
        assert!(s.banks.iter().all(|b| b.templates.len() == 60 && b.validate().is_ok()));
        assert!(s.rosters.iter().all(|r| r.validate().is_ok()));
        assert!(s.snapshots.iter().all(|x| crate::time::on_half_hour_grid(&x.captured_at)));
    }

    #[test]
    fn campaign_tweets_derive_from_their_template() {
        let s = generate(&small(), 5).unwrap();
        let banks: BTreeMap<&str, &TemplateBank> = s.banks.iter().map(|b| (b.bank_id.as_str(), b)).collect();
        let mut perturbed = 0;
        for t in s.corpus.tweets().iter().filter(|t| !t.counts_as_retweet()) {
            if let TweetLabel::Campaign { bank_id, template_index, perturbed: p, kind, reachable: r } = &s.truth.tweets[&t.tweet_id] {
                let template = &banks[bank_id.as_str()].templates[*template_index];
                assert_eq!(*p, kind.is_some());
                if !p {
                    assert_eq!(&t.raw_text, template);
                } else {
                    perturbed += 1;
                }
                assert_eq!(*r, reachable(&t.raw_text, template));
                if matches!(kind, Some(PerturbationKind::AppendHashtag | PerturbationKind::AppendMention)) {
                    assert!(t.raw_text.starts_with(template.as_str()));
                    assert!(r);
                }
            }
        }
        assert!(perturbed > 0);
    }

    #[test]
    fn unperturbed_originals_match_exactly() {
        let mut cfg = small();
        cfg.auto_campaigns = 0;
        let mut spec = CampaignSpec::new("ZeroNoise");
        spec.perturbation_rate = 0.0;
        spec.n_participants = Some(40);
        cfg.campaign.push(spec);
        let s = generate(&cfg, 9).unwrap();
        let index = TemplateIndex::build(&s.banks);
        let m = match_corpus(&s.corpus, &index, 2).unwrap();
        let originals: BTreeSet<&str> = s
            .corpus
            .tweets()
            .iter()
            .filter(|t| !t.counts_as_retweet() && t.tweet_id.starts_with('c'))
            .map(|t| t.tweet_id.as_str())
            .collect();
        assert!(!originals.is_empty());
        for id in &originals {
            let best = m.records.iter().filter(|r| r.tweet_id == *id).map(|r| r.tier).min();
            assert_eq!(best, Some(MatchTier::Exact), "{id}");
        }
    }

    #[test]
    fn organic_cities_stay_below_repeat_threshold() {
        let mut cfg = small();
        cfg.organic.cities = 20;
        cfg.organic.tweets_per_city = 600;
        let s = generate(&cfg, 21).unwrap();
        let below = s
            .truth
            .city_hashtags
            .iter()
            .filter(|c| duplicate_ratio(c, &s.corpus).duplicate_ratio.unwrap() < 0.2)
            .count();
        assert!(below as f64 >= 0.95 * s.truth.city_hashtags.len() as f64, "{below}");
    }

    #[test]
    fn participants_draw_around_mean() {
        let mut cfg = small();
        cfg.auto_campaigns = 40;
        cfg.organic.tweets_per_city = 10;
        let s = generate(&cfg, 2).unwrap();
        let mean = s.truth.campaigns.iter().map(|c| c.participants as f64).sum::<f64>() / 40.0;
        assert!((mean - 141.0).abs() < 20.0, "{mean}");
    }

    #[test]
    fn downsample_contract() {
        let s = generate(&small(), 4).unwrap();
        let same = downsample(&s.corpus, 1.0, 1, false).unwrap();
        assert_eq!(same.corpus, s.corpus);
        assert!(same.removed.is_empty());

        let tweets: Vec<Tweet> = (0..10_000)
            .map(|i| Tweet {
                tweet_id: i.to_string(),
                author_id: "a".into(),
                created_at: Utc.timestamp_opt(i, 0).unwrap(),
                raw_text: String::new(),
                hashtags: vec![],
                is_retweet: Some(i % 2 == 0),
                retweet_of: None,
            })
            .collect();
        let c = Corpus::new(tweets).unwrap();
        let d = downsample(&c, 0.65, 7, false).unwrap();
        // sd = sqrt(10000 * 0.65 * 0.35) ~ 47.7; allow four.
        assert!((d.corpus.len() as i64 - 6500).abs() < 191, "{}", d.corpus.len());

        let b = downsample(&c, 0.65, 7, true).unwrap();
        let kept_rt = b.corpus.tweets().iter().filter(|t| t.counts_as_retweet()).count() as f64 / 5000.0;
        let kept_orig = b.corpus.tweets().iter().filter(|t| !t.counts_as_retweet()).count() as f64 / 5000.0;
        assert!(kept_orig > kept_rt, "{kept_orig} {kept_rt}");
        assert!((b.corpus.len() as i64 - 6500).abs() < 191);
        assert!(downsample(&c, 0.0, 1, false).is_err());
    }

    #[test]
    fn truth_round_trip() {
        let s = generate(&small(), 8).unwrap();
        let mut buf = Vec::new();
        s.truth.write_jsonl(&mut buf).unwrap();
        let back = GroundTruth::read_jsonl(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, s.truth);
    }

    #[test]
    fn toml_config() {
        let cfg = SynthConfig::from_toml(
            r##"
            auto_campaigns = 0
            start = "2019-03-01T00:00:00+05:30"
            end = "2019-03-31T00:00:00+05:30"

            [organic]
            cities = 3

            [[campaign]]
            hashtag = "#ModiMeinHaiDum"
            launch_at = "2019-03-19T09:00:00+05:30"
            n_templates = 100
            n_participants = 416
            total_tweets = 46000
            kinds = ["append-hashtag", "single-word-swap"]

            [campaign.ramp]
            burst_rate = 250.0
            "##,
        )
        .unwrap();
        assert_eq!(cfg.campaign[0].n_templates, 100);
        assert_eq!(cfg.campaign[0].ramp.burst_rate, 250.0);
        assert_eq!(cfg.campaign[0].ramp.rise_minutes, 30.0);
        assert_eq!(cfg.campaign[0].kinds.len(), 2);
        assert!(SynthConfig::from_toml("bogus = 1").is_err());
        assert!(SynthConfig::from_toml("[[campaign]]\nhashtag = \"x\"\nperturbation_rate = 2.0").is_err());
    }

    #[test]
    fn ramp_shape() {
        let launch = ist().with_ymd_and_hms(2019, 3, 19, 9, 0, 0).unwrap().to_utc();
        let curve = RateCurve::new(&Ramp::default(), launch);
        assert_eq!(curve.start().with_timezone(&ist()).format("%H:%M").to_string(), "07:47");
        let times = sample_timeline(&Ramp::default(), launch, 5000, 1, 1);
        let before_burst = times.iter().filter(|t| **t < launch - Duration::minutes(10)).count();
        assert!(before_burst < 200, "{before_burst}");
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
    }
}
