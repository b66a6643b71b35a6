//! Participant classification, repeated-content ratios, hashtag verdicts and
//! monthly scope estimates.

mod participants;
mod ratio;
mod scope;

pub use participants::{
    attribute, attributed_originals, classify_participants, core_contribution_share,
    seed_participants_from_matches, ContributionBin, ParticipantRecord, ParticipationSummary,
    CORE_MIN_CAMPAIGNS,
};
pub use ratio::{
    classify_hashtags, duplicate_ratio, duplicate_ratio_with, DupGrouping, HashtagVerdict, Label,
    RatioStats, Thresholds, VolumeBasis,
};
pub use scope::{peak_days, scope_by_month, ScopeEstimate};
