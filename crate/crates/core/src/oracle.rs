//! Quadratic reference implementations used to check every fast path.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{SparseSet, SparseVec};

/// `(A + B) ∩ [lo, hi]` by enumerating every pair.
pub fn brute_sumset(a: &SparseSet, b: &SparseSet, lo: i64, hi: i64) -> SparseSet {
    let mut sums: Vec<i64> = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            let s = x + y;
            if s >= lo && s <= hi {
                sums.push(s);
            }
        }
    }
    sums.sort_unstable();
    sums.dedup();
    if a.is_signed() || b.is_signed() {
        SparseSet::signed_from_unsorted(sums)
    } else {
        SparseSet::from_sorted_unchecked(sums)
    }
}

/// `(f ⋆ g)` restricted to indices in `[lo, hi]`.
pub fn brute_convolve(f: &SparseVec, g: &SparseVec, lo: i64, hi: i64) -> Result<SparseVec> {
    let bound = f.value_bound().min(g.value_bound());
    let mut acc: BTreeMap<i64, u128> = BTreeMap::new();
    for &(i, x) in f.entries() {
        for &(j, y) in g.entries() {
            let s = i + j;
            if s >= lo && s <= hi {
                *acc.entry(s).or_default() += x as u128 * y as u128;
            }
        }
    }
    let mut entries = Vec::with_capacity(acc.len());
    for (s, v) in acc {
        if v > bound as u128 {
            return Err(Error::ValueOverflow { value: v, bound });
        }
        entries.push((s, v as u64));
    }
    Ok(SparseVec::from_sorted_unchecked(entries, bound))
}

/// `S(X, t)`: all subset sums of `X` that are at most `t`, by Bellman's DP.
pub fn brute_subset_sums(x: &SparseSet, t: i64) -> SparseSet {
    if t < 0 {
        return SparseSet::empty();
    }
    let mut reach = vec![false; t as usize + 1];
    reach[0] = true;
    let mut hi = 0usize;
    for v in x.iter().filter(|&v| v > 0 && v <= t) {
        let v = v as usize;
        let top = (hi + v).min(t as usize);
        for s in (v..=top).rev() {
            if reach[s - v] {
                reach[s] = true;
            }
        }
        hi = top;
    }
    SparseSet::from_sorted_unchecked(
        reach.iter().enumerate().filter(|(_, &r)| r).map(|(s, _)| s as i64).collect(),
    )
}

/// `|X+Y|·|Z|·|W| ≤ |X+Z|·|Z+W|·|W+Y|`, evaluated exactly.
pub fn ruzsa_check(x: &SparseSet, y: &SparseSet, z: &SparseSet, w: &SparseSet) -> bool {
    let size = |p: &SparseSet, q: &SparseSet| brute_sumset(p, q, i64::MIN, i64::MAX).len() as u128;
    let lhs = size(x, y) * z.len() as u128 * w.len() as u128;
    let rhs = size(x, z) * size(z, w) * size(w, y);
    lhs <= rhs
}
