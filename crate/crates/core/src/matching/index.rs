use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use super::distance::{char_histogram, histogram_lower_bound, BoundedLevenshtein, CharHistogram};
use super::{MatchTier, EXACT_MIN_CHARS, FUZZY_MIN_CHARS, MAX_FUZZY_DISTANCE};
use crate::corpus::TemplateBank;
use crate::textnorm::{normalize_bank_with, NormalForm, NormalizeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateRef<'a> {
    pub bank_id: &'a str,
    pub template_index: usize,
}

/// A matched index entry with its best tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub entry: usize,
    pub tier: MatchTier,
}

#[derive(Debug, Clone)]
struct Entry {
    bank: usize,
    template_index: usize,
}

#[derive(Debug, Clone)]
struct FuzzyCandidate {
    entry: usize,
    chars: Box<[char]>,
    hist: CharHistogram,
}

/// Lookup structures over every usable template of a set of banks.
#[derive(Debug, Clone, Default)]
pub struct TemplateIndex {
    options: NormalizeOptions,
    bank_ids: Vec<String>,
    entries: Vec<Entry>,
    exact: HashMap<String, Vec<usize>>,
    spaceless: HashMap<String, Vec<usize>>,
    /// Keyed by canonical scalar length.
    fuzzy: BTreeMap<usize, Vec<FuzzyCandidate>>,
}

thread_local! {
    static SCRATCH: RefCell<BoundedLevenshtein> = RefCell::new(BoundedLevenshtein::new());
}

impl TemplateIndex {
    pub fn build(banks: &[TemplateBank]) -> Self {
        Self::build_with(banks, NormalizeOptions::default())
    }

    pub fn build_with(banks: &[TemplateBank], options: NormalizeOptions) -> Self {
        let mut idx = TemplateIndex {
            options,
            ..Default::default()
        };
        for (b, bank) in banks.iter().enumerate() {
            idx.bank_ids.push(bank.bank_id.clone());
            for t in normalize_bank_with(bank, options) {
                if !t.usable {
                    continue;
                }
                let entry = idx.entries.len();
                idx.entries.push(Entry {
                    bank: b,
                    template_index: t.index,
                });
                let chars: Box<[char]> = t.form.canonical.chars().collect();
                let hist = char_histogram(&chars);
                idx.fuzzy
                    .entry(t.form.char_len)
                    .or_default()
                    .push(FuzzyCandidate { entry, chars, hist });
                idx.exact.entry(t.form.canonical).or_default().push(entry);
                idx.spaceless.entry(t.form.spaceless).or_default().push(entry);
            }
        }
        idx
    }

    pub fn options(&self) -> NormalizeOptions {
        self.options
    }

    /// Number of usable templates indexed.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn template_ref(&self, entry: usize) -> TemplateRef<'_> {
        let e = &self.entries[entry];
        TemplateRef {
            bank_id: &self.bank_ids[e.bank],
            template_index: e.template_index,
        }
    }

    pub(crate) fn order_key(&self, entry: usize) -> (&str, usize) {
        let r = self.template_ref(entry);
        (r.bank_id, r.template_index)
    }

    pub fn exact_entries(&self, canonical: &str) -> Vec<TemplateRef<'_>> {
        self.refs(self.exact.get(canonical))
    }

    pub fn spaceless_entries(&self, spaceless: &str) -> Vec<TemplateRef<'_>> {
        self.refs(self.spaceless.get(spaceless))
    }

    /// Entries in each fuzzy length bucket.
    pub fn fuzzy_bucket_sizes(&self) -> BTreeMap<usize, usize> {
        self.fuzzy.iter().map(|(k, v)| (*k, v.len())).collect()
    }

    fn refs(&self, ids: Option<&Vec<usize>>) -> Vec<TemplateRef<'_>> {
        ids.map(|v| v.iter().map(|&e| self.template_ref(e)).collect())
            .unwrap_or_default()
    }

    /// All entries matching a normalized tweet, each at its best tier.
    pub fn lookup(&self, form: &NormalForm) -> Vec<Hit> {
        let mut hits: Vec<Hit> = Vec::new();
        if form.char_len < EXACT_MIN_CHARS {
            return hits;
        }
        if let Some(ids) = self.exact.get(&form.canonical) {
            hits.extend(ids.iter().map(|&entry| Hit {
                entry,
                tier: MatchTier::Exact,
            }));
        }
        if let Some(ids) = self.spaceless.get(&form.spaceless) {
            for &entry in ids {
                if !hits.iter().any(|h| h.entry == entry) {
                    hits.push(Hit {
                        entry,
                        tier: MatchTier::Spaceless,
                    });
                }
            }
        }
        if form.char_len < FUZZY_MIN_CHARS {
            return hits;
        }

        let chars: Vec<char> = form.canonical.chars().collect();
        let hist = char_histogram(&chars);
        let lo = form.char_len.saturating_sub(MAX_FUZZY_DISTANCE);
        let hi = form.char_len + MAX_FUZZY_DISTANCE;
        SCRATCH.with(|scratch| {
            let mut scratch = scratch.borrow_mut();
            for bucket in self.fuzzy.range(lo..=hi).map(|(_, v)| v) {
                for cand in bucket {
                    if histogram_lower_bound(&hist, &cand.hist) > MAX_FUZZY_DISTANCE
                        || hits.iter().any(|h| h.entry == cand.entry)
                    {
                        continue;
                    }
                    if let Some(d) = scratch.distance(&chars, &cand.chars, MAX_FUZZY_DISTANCE) {
                        let tier = if d == 0 {
                            MatchTier::Exact
                        } else {
                            MatchTier::Fuzzy(d as u8)
                        };
                        hits.push(Hit {
                            entry: cand.entry,
                            tier,
                        });
                    }
                }
            }
        });
        hits
    }
}
