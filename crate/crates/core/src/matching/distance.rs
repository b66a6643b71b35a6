//! Bounded Levenshtein distance over Unicode scalar values.

/// Reusable buffers for [`BoundedLevenshtein::distance`].
#[derive(Debug, Default, Clone)]
pub struct BoundedLevenshtein {
    prev: Vec<u32>,
    cur: Vec<u32>,
}

impl BoundedLevenshtein {
    pub fn new() -> Self {
        Self::default()
    }

    /// Levenshtein distance (unit costs) if it is at most `bound`.
    ///
    /// Only cells within `bound` of the diagonal are evaluated and the scan
    /// stops as soon as a whole row exceeds the bound, so the work is
    /// O(bound * min(len)).
    pub fn distance(&mut self, a: &[char], b: &[char], bound: usize) -> Option<usize> {
        let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
        let (a, b) = (&a[prefix..], &b[prefix..]);
        let suffix = a
            .iter()
            .rev()
            .zip(b.iter().rev())
            .take_while(|(x, y)| x == y)
            .count();
        let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
        let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let (n, m) = (a.len(), b.len());

        if m - n > bound {
            return None;
        }
        if n == 0 {
            return Some(m);
        }

        let k = bound;
        let inf = (k + 1) as u32;
        self.prev.clear();
        self.prev.resize(m + 1, inf);
        self.cur.clear();
        self.cur.resize(m + 1, inf);
        for j in 0..=m.min(k) {
            self.prev[j] = j as u32;
        }

        for i in 1..=n {
            let lo = i.saturating_sub(k).max(1);
            let hi = (i + k).min(m);
            self.cur[lo - 1] = if lo == 1 && i <= k { i as u32 } else { inf };
            let ai = a[i - 1];
            let mut row_min = self.cur[lo - 1];
            for j in lo..=hi {
                let sub = self.prev[j - 1] + u32::from(ai != b[j - 1]);
                let del = self.prev[j] + 1;
                let ins = self.cur[j - 1] + 1;
                let v = sub.min(del).min(ins).min(inf);
                self.cur[j] = v;
                row_min = row_min.min(v);
            }
            if row_min > k as u32 {
                return None;
            }
            std::mem::swap(&mut self.prev, &mut self.cur);
        }

        let d = self.prev[m] as usize;
        (d <= k).then_some(d)
    }
}

/// Levenshtein distance between `a` and `b` if it does not exceed `bound`.
pub fn edit_distance_bounded(a: &str, b: &str, bound: usize) -> Option<usize> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    BoundedLevenshtein::new().distance(&a, &b, bound)
}

/// Number of histogram bins used by the character-count lower bound.
pub(crate) const HIST_BINS: usize = 64;

pub(crate) type CharHistogram = [u16; HIST_BINS];

pub(crate) fn char_histogram(chars: &[char]) -> CharHistogram {
    let mut h = [0u16; HIST_BINS];
    for &c in chars {
        let bin = ((c as u32).wrapping_mul(0x9E37_79B1) >> 26) as usize;
        h[bin] = h[bin].saturating_add(1);
    }
    h
}

/// Lower bound on the edit distance from binned character counts: every edit
/// removes at most one surplus character on each side.
pub(crate) fn histogram_lower_bound(a: &CharHistogram, b: &CharHistogram) -> usize {
    // 64 bins of u16 cannot overflow a u32 sum; wrapping ops keep the loop
    // vectorizable when overflow checks are on.
    let mut surplus_a = 0u32;
    let mut surplus_b = 0u32;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (u32::from(*x), u32::from(*y));
        surplus_a = surplus_a.wrapping_add(x.saturating_sub(y));
        surplus_b = surplus_b.wrapping_add(y.saturating_sub(x));
    }
    surplus_a.max(surplus_b) as usize
}
