use chrono::{Duration, TimeZone};
use serde::{Deserialize, Serialize};

use crate::time::{ist, Timestamp};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    AppendHashtag,
    AppendMention,
    PunctuationChange,
    SingleWordSwap,
}

impl PerturbationKind {
    pub const ALL: [PerturbationKind; 4] = [
        PerturbationKind::AppendHashtag,
        PerturbationKind::AppendMention,
        PerturbationKind::PunctuationChange,
        PerturbationKind::SingleWordSwap,
    ];
}

/// Relative posting rate around a campaign launch: a trickle, a linear rise
/// starting `lead_minutes` before launch, then exponential decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ramp {
    pub trickle_rate: f64,
    pub trickle_minutes: f64,
    pub lead_minutes: f64,
    pub rise_minutes: f64,
    pub burst_rate: f64,
    pub half_life_minutes: f64,
    /// Length of the decay tail, in half-lives.
    pub tail_half_lives: f64,
}

impl Default for Ramp {
    fn default() -> Self {
        Ramp {
            trickle_rate: 2.0,
            trickle_minutes: 63.0,
            lead_minutes: 10.0,
            rise_minutes: 30.0,
            burst_rate: 300.0,
            half_life_minutes: 120.0,
            tail_half_lives: 4.0,
        }
    }
}

impl Ramp {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("trickle_rate", self.trickle_rate),
            ("trickle_minutes", self.trickle_minutes),
            ("lead_minutes", self.lead_minutes),
            ("rise_minutes", self.rise_minutes),
            ("burst_rate", self.burst_rate),
            ("tail_half_lives", self.tail_half_lives),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("ramp.{name} must be a nonnegative number, got {v}")));
            }
        }
        if !(self.half_life_minutes.is_finite() && self.half_life_minutes > 0.0) {
            return Err(Error::Config("ramp.half_life_minutes must be positive".into()));
        }
        if self.burst_rate == 0.0 && self.trickle_rate == 0.0 {
            return Err(Error::Config("ramp has zero rate everywhere".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub hashtag: String,
    /// Spread evenly over the corpus span when absent.
    #[serde(default)]
    pub launch_at: Option<Timestamp>,
    #[serde(default = "default_templates")]
    pub n_templates: usize,
    /// Drawn log-normally around `ParticipationSpec::mean_participants`
    /// when absent.
    #[serde(default)]
    pub n_participants: Option<usize>,
    #[serde(default = "default_perturbation_rate")]
    pub perturbation_rate: f64,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<PerturbationKind>,
    #[serde(default)]
    pub ramp: Ramp,
    #[serde(default = "default_retweet_multiplier")]
    pub retweet_multiplier: f64,
    /// Originals per participant on average, used when `total_tweets` is
    /// absent.
    #[serde(default = "default_posts_per_participant")]
    pub posts_per_participant: f64,
    /// Originals plus retweets; overrides `posts_per_participant`.
    #[serde(default)]
    pub total_tweets: Option<usize>,
}

fn default_templates() -> usize {
    60
}
fn default_perturbation_rate() -> f64 {
    0.3
}
fn default_kinds() -> Vec<PerturbationKind> {
    PerturbationKind::ALL.to_vec()
}
fn default_retweet_multiplier() -> f64 {
    1.5
}
fn default_posts_per_participant() -> f64 {
    3.0
}

impl CampaignSpec {
    pub fn new(hashtag: &str) -> Self {
        CampaignSpec {
            hashtag: hashtag.to_string(),
            launch_at: None,
            n_templates: default_templates(),
            n_participants: None,
            perturbation_rate: default_perturbation_rate(),
            kinds: default_kinds(),
            ramp: Ramp::default(),
            retweet_multiplier: default_retweet_multiplier(),
            posts_per_participant: default_posts_per_participant(),
            total_tweets: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("campaign #{}: {m}", self.hashtag)));
        if crate::corpus::clean_hashtag(&self.hashtag).is_empty() {
            return Err(Error::Config("campaign hashtag is empty".into()));
        }
        if self.n_templates == 0 {
            return bad("n_templates must be at least 1".into());
        }
        if self.n_participants == Some(0) {
            return bad("n_participants must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.perturbation_rate) {
            return bad(format!("perturbation_rate {} is outside [0, 1]", self.perturbation_rate));
        }
        if self.perturbation_rate > 0.0 && self.kinds.is_empty() {
            return bad("perturbation_rate is positive but no kinds are listed".into());
        }
        for (name, v) in [
            ("retweet_multiplier", self.retweet_multiplier),
            ("posts_per_participant", self.posts_per_participant),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be nonnegative, got {v}"));
            }
        }
        self.ramp.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrganicSpec {
    /// City hashtags, taken from the built-in list of 50.
    pub cities: usize,
    pub tweets_per_city: usize,
    /// Tweets under generic topic hashtags.
    pub topic_tweets: usize,
    pub topics: usize,
    pub authors: usize,
    /// Chance that an organic original repeats an earlier one verbatim.
    pub dup_rate: f64,
    /// Retweets per organic original.
    pub retweet_rate: f64,
    /// Share of organic originals written by campaign participants.
    pub participant_share: f64,
    pub vocab_size: usize,
    pub zipf_exponent: f64,
    pub devanagari_share: f64,
}

impl Default for OrganicSpec {
    fn default() -> Self {
        OrganicSpec {
            cities: 50,
            tweets_per_city: 700,
            topic_tweets: 4000,
            topics: 40,
            authors: 4000,
            dup_rate: 0.05,
            retweet_rate: 0.4,
            participant_share: 0.15,
            vocab_size: 3000,
            zipf_exponent: 1.05,
            devanagari_share: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticipationSpec {
    pub mean_participants: f64,
    pub participants_sigma: f64,
    /// Core pool size as a share of all participant slots.
    pub core_share: f64,
    /// Chance a core member joins any given campaign.
    pub core_join_prob: f64,
    /// Relative posting weight of core members.
    pub core_weight: f64,
    /// Chance an occasional slot is filled by someone who already joined
    /// another campaign.
    pub repeat_prob: f64,
}

impl Default for ParticipationSpec {
    fn default() -> Self {
        ParticipationSpec {
            mean_participants: 141.0,
            participants_sigma: 0.35,
            core_share: 0.018,
            core_join_prob: 0.5,
            core_weight: 1.2,
            repeat_prob: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChatSpec {
    pub groups: usize,
    pub members_per_group: usize,
    pub chatter_messages: usize,
    /// Share of alert senders that copy an alert to several groups within
    /// milliseconds.
    pub automated_share: f64,
}

impl Default for ChatSpec {
    fn default() -> Self {
        ChatSpec {
            groups: 12,
            members_per_group: 60,
            chatter_messages: 400,
            automated_share: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub start: Timestamp,
    pub end: Timestamp,
    /// Extra campaigns with generated names and default parameters.
    pub auto_campaigns: usize,
    pub organic: OrganicSpec,
    pub participation: ParticipationSpec,
    pub chat: ChatSpec,
    pub campaign: Vec<CampaignSpec>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            start: ist().with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap().to_utc(),
            end: ist().with_ymd_and_hms(2019, 4, 30, 23, 59, 59).unwrap().to_utc(),
            auto_campaigns: 20,
            organic: OrganicSpec::default(),
            participation: ParticipationSpec::default(),
            chat: ChatSpec::default(),
            campaign: Vec::new(),
        }
    }
}

impl SynthConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SynthConfig = toml::from_str(text).map_err(|e| Error::Config(format!("synth config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.end <= self.start {
            return Err(Error::Config("synth config: end must be after start".into()));
        }
        if self.end - self.start < Duration::days(1) {
            return Err(Error::Config("synth config: span must cover at least one day".into()));
        }
        let o = &self.organic;
        if o.cities > super::text::CITIES.len() {
            return Err(Error::Config(format!(
                "organic.cities is {}, only {} are available",
                o.cities,
                super::text::CITIES.len()
            )));
        }
        if o.authors == 0 || o.vocab_size < 10 {
            return Err(Error::Config("organic.authors must be positive and vocab_size at least 10".into()));
        }
        for (name, v) in [
            ("organic.dup_rate", o.dup_rate),
            ("organic.participant_share", o.participant_share),
            ("organic.devanagari_share", o.devanagari_share),
            ("participation.core_share", self.participation.core_share),
            ("participation.core_join_prob", self.participation.core_join_prob),
            ("participation.repeat_prob", self.participation.repeat_prob),
            ("chat.automated_share", self.chat.automated_share),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        if !(o.retweet_rate.is_finite() && o.retweet_rate >= 0.0) || !(o.zipf_exponent > 0.0) {
            return Err(Error::Config("organic.retweet_rate must be nonnegative and zipf_exponent positive".into()));
        }
        let p = &self.participation;
        if !(p.mean_participants >= 1.0 && p.participants_sigma >= 0.0 && p.core_weight > 0.0) {
            return Err(Error::Config("participation parameters out of range".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.campaign {
            c.validate()?;
            if !seen.insert(crate::corpus::clean_hashtag(&c.hashtag)) {
                return Err(Error::Config(format!("campaign #{} listed twice", c.hashtag)));
            }
        }
        Ok(())
    }
}
