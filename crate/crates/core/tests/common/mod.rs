//! Brute-force references written independently of the library's own oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sumset_kit::{SparseSet, SparseVec};

pub fn sums(a: &[i64], b: &[i64], lo: i64, hi: i64) -> Vec<i64> {
    let mut out = BTreeSet::new();
    for &x in a {
        for &y in b {
            if (lo..=hi).contains(&(x + y)) {
                out.insert(x + y);
            }
        }
    }
    out.into_iter().collect()
}

pub fn products(f: &[(i64, u64)], g: &[(i64, u64)], lo: i64, hi: i64) -> Vec<(i64, u64)> {
    let mut out: BTreeMap<i64, u64> = BTreeMap::new();
    for &(i, x) in f {
        for &(j, y) in g {
            if (lo..=hi).contains(&(i + j)) {
                *out.entry(i + j).or_default() += x * y;
            }
        }
    }
    out.into_iter().collect()
}

pub fn subset_sums(x: &[i64], t: i64) -> Vec<i64> {
    let mut reach = BTreeSet::from([0i64]);
    for &v in x {
        let next: Vec<i64> = reach.iter().map(|s| s + v).filter(|&s| s <= t).collect();
        reach.extend(next);
    }
    reach.into_iter().filter(|&s| s <= t).collect()
}

pub fn random_set(rng: &mut ChaCha8Rng, max_len: usize, max_val: i64) -> SparseSet {
    let len = rng.gen_range(1..=max_len);
    SparseSet::from_unsorted((0..len).map(|_| rng.gen_range(0..=max_val))).unwrap()
}

pub fn weighted(rng: &mut ChaCha8Rng, s: &SparseSet, max_w: u64) -> SparseVec {
    SparseVec::new(s.iter().map(|i| (i, rng.gen_range(1..=max_w))).collect()).unwrap()
}

pub fn log2(x: usize) -> f64 {
    (x.max(1) as f64).log2()
}
