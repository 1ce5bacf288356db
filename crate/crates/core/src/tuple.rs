//! Word arithmetic over `Σ = {0, .., s-1}`.
//!
//! Words are indexed lexicographically with the first coordinate most
//! significant. This order is used by every table, bitset and file format
//! in the crate.

use crate::error::{Error, Result};

/// Largest number of table cells or predicate tuples we are willing to
/// enumerate.
pub const MAX_VOLUME: usize = 1 << 32;

/// `order^len`, or a structural error when it exceeds [`MAX_VOLUME`].
pub fn volume(order: usize, len: usize) -> Result<usize> {
    let exp = u32::try_from(len).map_err(|_| Error::Structural(format!("length {len} too large")))?;
    match order.checked_pow(exp) {
        Some(v) if v <= MAX_VOLUME => Ok(v),
        _ => Err(Error::Structural(format!("{order}^{len} exceeds the supported table size"))),
    }
}

#[inline]
pub fn index_of(word: &[u8], order: usize) -> usize {
    word.iter().fold(0usize, |acc, &x| acc * order + x as usize)
}

/// Writes the word with lexicographic index `index` into `out`.
pub fn word_at(mut index: usize, order: usize, out: &mut [u8]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % order) as u8;
        index /= order;
    }
}

/// Advances `word` to its lexicographic successor. Returns `false` (and
/// leaves the all-zero word) after the last word.
#[inline]
pub fn advance(word: &mut [u8], order: usize) -> bool {
    for slot in word.iter_mut().rev() {
        if (*slot as usize) + 1 < order {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// Calls `f` on every word of length `len` in lexicographic order.
pub fn for_each_word(order: usize, len: usize, mut f: impl FnMut(&[u8])) {
    let mut word = vec![0u8; len];
    loop {
        f(&word);
        if !advance(&mut word, order) {
            break;
        }
    }
}

/// Like [`for_each_word`], stopping at the first `Some` returned by `f`.
pub fn find_word<T>(order: usize, len: usize, mut f: impl FnMut(&[u8]) -> Option<T>) -> Option<T> {
    let mut word = vec![0u8; len];
    loop {
        if let Some(t) = f(&word) {
            return Some(t);
        }
        if !advance(&mut word, order) {
            return None;
        }
    }
}

/// All words of length `len`, in lexicographic order.
pub fn all_words(order: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for_each_word(order, len, |w| out.push(w.to_vec()));
    out
}

/// `x̄^{(k)}`: the word with coordinate `k` removed.
pub fn without(word: &[u8], k: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(word.len().saturating_sub(1));
    out.extend_from_slice(&word[..k]);
    out.extend_from_slice(&word[k + 1..]);
    out
}

/// `x̄^{(k)} # y`: the word with `y` inserted at coordinate `k`.
pub fn with_inserted(word: &[u8], k: usize, y: u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(word.len() + 1);
    out.extend_from_slice(&word[..k]);
    out.push(y);
    out.extend_from_slice(&word[k..]);
    out
}

/// Hamming distance between two words of equal length.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// The `r`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut current: Vec<usize> = (0..r).collect();
    loop {
        out.push(current.clone());
        // rightmost slot that can still move
        let Some(i) = (0..r).rev().find(|&i| current[i] < n - r + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..r {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Subsets of `0..n` with size in `sizes`, ordered by size, then
/// lexicographically.
pub fn subsets_by_size(n: usize, sizes: std::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
    sizes.flat_map(|r| combinations(n, r)).collect()
}
