//! Canonical text form shared by every matching tier.
//!
//! Normalization runs these steps in order:
//!
//! 1. strip URL tokens (`http://`, `https://`, `www.` up to the next whitespace)
//! 2. strip hashtags (`#` plus letters, digits, underscores)
//! 3. strip mentions (`@` plus letters, digits, underscores)
//! 4. Unicode lowercase (optional, on by default)
//! 5. replace every character that is neither alphanumeric nor whitespace
//!    with a space
//! 6. collapse whitespace runs to a single space
//! 7. trim
//!
//! Each stripped token is replaced by one space so that stripping never glues
//! neighbouring words together.

use serde::{Deserialize, Serialize};

use crate::corpus::TemplateBank;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub canonical: String,
    pub spaceless: String,
    /// Unicode scalar count of `canonical`.
    pub char_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizeOptions {
    pub casefold: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { casefold: true }
    }
}

pub fn normalize(text: &str) -> NormalForm {
    normalize_with(text, NormalizeOptions::default())
}

pub fn normalize_with(text: &str, opts: NormalizeOptions) -> NormalForm {
    let s = strip_urls(text);
    let s = strip_marked(&s, '#');
    let s = strip_marked(&s, '@');
    let s = if opts.casefold { s.to_lowercase() } else { s };

    let mut canonical = String::with_capacity(s.len());
    let mut spaceless = String::with_capacity(s.len());
    let mut char_len = 0;
    let mut pending_space = false;
    for c in s.chars() {
        if c.is_alphanumeric() {
            if pending_space && !canonical.is_empty() {
                canonical.push(' ');
                char_len += 1;
            }
            pending_space = false;
            canonical.push(c);
            spaceless.push(c);
            char_len += 1;
        } else {
            pending_space = true;
        }
    }
    NormalForm {
        canonical,
        spaceless,
        char_len,
    }
}

const URL_PREFIXES: [&str; 3] = ["http://", "https://", "www."];

fn url_prefix_at(s: &str) -> bool {
    URL_PREFIXES.iter().any(|p| {
        s.len() >= p.len()
            && s.is_char_boundary(p.len())
            && s[..p.len()].eq_ignore_ascii_case(p)
    })
}

/// A URL token starts at the beginning of the text or after a character that
/// is not alphanumeric, and runs to the next whitespace.
fn strip_urls(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev_alnum = false;
    let mut iter = text.char_indices();
    while let Some((i, c)) = iter.next() {
        if !prev_alnum && (c == 'h' || c == 'H' || c == 'w' || c == 'W') && url_prefix_at(&text[i..]) {
            for (_, n) in iter.by_ref() {
                if n.is_whitespace() {
                    break;
                }
            }
            out.push(' ');
            prev_alnum = false;
            continue;
        }
        prev_alnum = c.is_alphanumeric();
        out.push(c);
    }
    out
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn strip_marked(text: &str, marker: char) -> String {
    if !text.contains(marker) {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == marker {
            while chars.peek().is_some_and(|&n| is_word_char(n)) {
                chars.next();
            }
            out.push(' ');
        } else {
            out.push(c);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedTemplate {
    pub index: usize,
    pub form: NormalForm,
    /// False when the canonical form is empty; such templates never match.
    pub usable: bool,
}

pub fn normalize_bank(bank: &TemplateBank) -> Vec<NormalizedTemplate> {
    normalize_bank_with(bank, NormalizeOptions::default())
}

pub fn normalize_bank_with(bank: &TemplateBank, opts: NormalizeOptions) -> Vec<NormalizedTemplate> {
    bank.templates
        .iter()
        .enumerate()
        .map(|(index, t)| {
            let form = normalize_with(t, opts);
            NormalizedTemplate {
                index,
                usable: !form.canonical.is_empty(),
                form,
            }
        })
        .collect()
}
