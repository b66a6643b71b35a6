use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use super::config::PerturbationKind;

pub const CITIES: [&str; 50] = [
    "Mumbai", "Delhi", "Bengaluru", "Hyderabad", "Ahmedabad", "Chennai", "Kolkata", "Surat",
    "Pune", "Jaipur", "Lucknow", "Kanpur", "Nagpur", "Indore", "Thane", "Bhopal",
    "Visakhapatnam", "Patna", "Vadodara", "Ghaziabad", "Ludhiana", "Agra", "Nashik",
    "Faridabad", "Meerut", "Rajkot", "Varanasi", "Srinagar", "Aurangabad", "Dhanbad",
    "Amritsar", "Allahabad", "Ranchi", "Howrah", "Coimbatore", "Jabalpur", "Gwalior",
    "Vijayawada", "Jodhpur", "Madurai", "Raipur", "Kota", "Guwahati", "Chandigarh",
    "Solapur", "Bareilly", "Moradabad", "Mysuru", "Gurugram", "Aligarh",
];

const LATIN_SYLLABLES: [&str; 40] = [
    "ka", "ra", "ma", "ta", "na", "vi", "sha", "de", "pra", "gan", "dhi", "mo", "bha", "ja",
    "lo", "kal", "in", "dia", "sam", "var", "pur", "nat", "ho", "se", "jan", "tra", "vik",
    "as", "de", "sh", "bu", "li", "ro", "ye", "ga", "tu", "ne", "khi", "par", "ost",
];

const DEVANAGARI_SYLLABLES: [&str; 24] = [
    "क", "मा", "रा", "ना", "वि", "श", "दे", "प्र", "ग", "धी", "मो", "भा", "जा", "लो", "स",
    "ह", "ट", "नी", "रे", "की", "ब", "चु", "व", "य",
];

const CHATTER: [&str; 8] = [
    "good morning friends",
    "jai hind",
    "please share with everyone",
    "thank you all for the support",
    "meeting postponed to next week",
    "happy holi to all members",
    "who is coming tomorrow?",
    "great work team",
];

/// Zipf-weighted word list.
pub struct Vocab {
    words: Vec<String>,
    zipf: Zipf<f64>,
}

impl Vocab {
    pub fn generate(size: usize, exponent: f64, devanagari_share: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut seen = HashSet::new();
        let mut words = Vec::with_capacity(size);
        while words.len() < size {
            let devanagari = rng.random_bool(devanagari_share);
            let n = rng.random_range(2..=4);
            let w: String = (0..n)
                .map(|_| {
                    if devanagari {
                        *DEVANAGARI_SYLLABLES.choose(rng).unwrap()
                    } else {
                        *LATIN_SYLLABLES.choose(rng).unwrap()
                    }
                })
                .collect();
            if seen.insert(w.clone()) {
                words.push(w);
            }
        }
        let zipf = Zipf::new(size as f64, exponent).expect("validated parameters");
        Vocab { words, zipf }
    }

    pub fn zipf_word(&self, rng: &mut ChaCha8Rng) -> &str {
        let rank = self.zipf.sample(rng) as usize;
        &self.words[rank.clamp(1, self.words.len()) - 1]
    }

    pub fn uniform_word(&self, rng: &mut ChaCha8Rng) -> &str {
        self.words.choose(rng).unwrap()
    }

    /// An ASCII word usable as a hashtag or handle.
    pub fn latin_word(&self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let w = self.uniform_word(rng);
            if w.is_ascii() {
                return w.to_string();
            }
        }
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// A pre-written tweet: at least 55 canonical scalars of mostly mid-rank
/// words, some punctuation and numbers, ending with the campaign hashtag.
pub fn template(vocab: &Vocab, hashtag: &str, rng: &mut ChaCha8Rng) -> String {
    let mut words: Vec<String> = Vec::new();
    let mut len = 0;
    let target = rng.random_range(55..140);
    while len < target {
        let w = if rng.random_bool(0.08) {
            rng.random_range(2..5000).to_string()
        } else {
            vocab.uniform_word(rng).to_string()
        };
        len += w.chars().count() + 1;
        words.push(w);
    }
    words[0] = capitalize(&words[0]);
    let mut text = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            text.push(if rng.random_bool(0.1) { ',' } else { ' ' });
            if text.ends_with(',') {
                text.push(' ');
            }
        }
        text.push_str(w);
    }
    text.push_str(if rng.random_bool(0.3) { "! " } else { ". " });
    text.push('#');
    text.push_str(hashtag);
    text
}

/// Apply one perturbation to a template tweet.
pub fn perturb(text: &str, kind: PerturbationKind, vocab: &Vocab, rng: &mut ChaCha8Rng) -> String {
    match kind {
        PerturbationKind::AppendHashtag => {
            format!("{text} #{}", capitalize(&vocab.latin_word(rng)))
        }
        PerturbationKind::AppendMention => format!("{text} @{}_{}", vocab.latin_word(rng), rng.random_range(1..999)),
        PerturbationKind::PunctuationChange => {
            let options = [
                text.replacen(". #", "!! #", 1),
                text.replacen(", ", " ", 1),
                text.replacen(' ', ", ", 1),
                format!("{text} !!"),
            ];
            let changed: Vec<&String> = options.iter().filter(|o| o.as_str() != text).collect();
            changed.choose(rng).map(|s| s.to_string()).unwrap_or_else(|| format!("{text}!"))
        }
        PerturbationKind::SingleWordSwap => {
            let words: Vec<&str> = text.split(' ').collect();
            let swappable: Vec<usize> = words
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.starts_with('#') && w.chars().all(|c| c.is_alphanumeric()))
                .map(|(i, _)| i)
                .collect();
            let Some(&i) = swappable.choose(rng) else {
                return format!("{text} {}", vocab.uniform_word(rng));
            };
            let mut replacement = vocab.uniform_word(rng).to_string();
            while replacement == words[i] {
                replacement = vocab.uniform_word(rng).to_string();
            }
            let mut out: Vec<String> = words.iter().map(|w| w.to_string()).collect();
            out[i] = replacement;
            out.join(" ")
        }
    }
}

/// Everyday chatter under a hashtag.
pub fn organic_text(vocab: &Vocab, hashtag: &str, rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(3..=18);
    let mut words: Vec<String> = (0..n).map(|_| vocab.zipf_word(rng).to_string()).collect();
    let tag = format!("#{hashtag}");
    let pos = if rng.random_bool(0.7) { words.len() } else { rng.random_range(0..=words.len()) };
    words.insert(pos, tag);
    if rng.random_bool(0.15) {
        words.push(format!("https://t.co/{}{}", vocab.latin_word(rng), rng.random_range(10..99)));
    }
    if rng.random_bool(0.1) {
        words.insert(0, format!("@{}", vocab.latin_word(rng)));
    }
    words.join(" ")
}

pub fn chatter(rng: &mut ChaCha8Rng) -> String {
    CHATTER.choose(rng).unwrap().to_string()
}

fn ordinal(day: u32) -> String {
    let suffix = match (day % 10, day % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{day}{suffix}")
}

/// A mobilization message in one of two layouts.
pub fn alert_text(
    hashtag: &str,
    local: chrono::DateTime<chrono::FixedOffset>,
    doc_url: &str,
    rng: &mut ChaCha8Rng,
) -> String {
    use chrono::{Datelike, Timelike};
    let (h, m) = (local.hour(), local.minute());
    let (h12, mer) = match h {
        0 => (12, "a.m."),
        1..=11 => (h, "a.m."),
        12 => (12, "p.m."),
        _ => (h - 12, "p.m."),
    };
    let time = if m == 0 && rng.random_bool(0.5) {
        format!("{h12} {mer}")
    } else {
        format!("{h12}.{m:02} {mer}")
    };
    let date = format!("{} {} {}", ordinal(local.day()), local.format("%B"), local.year());
    if rng.random_bool(0.5) {
        format!(
            "Trend Alert: #{hashtag} Date: {date} Time: {time} For sample tweets reference : {doc_url} Note - Please don't just copy paste the sample tweets, please alter it a bit."
        )
    } else {
        format!("#{hashtag}  Time: {time} Date: {date}\nSample tweets: {doc_url}")
    }
}
