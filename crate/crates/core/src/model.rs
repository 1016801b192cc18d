//! Domain types shared by every solver: sorted integer sets, sparse
//! non-negative vectors and restricted-sumset instances.

use crate::error::{Error, Result};

/// Largest magnitude any convolution value may take unless configured otherwise.
pub const DEFAULT_VALUE_BOUND: u64 = (1 << 62) - 1;

/// A strictly increasing sequence of integers.
///
/// Elements are non-negative unless the set was built with
/// [`SparseSet::new_signed`]; signed sets only show up in the hardness
/// encoders, which shift them back before handing them to a solver.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseSet {
    elems: Vec<i64>,
    signed: bool,
}

fn check_increasing(elems: &[i64]) -> Result<()> {
    match elems.windows(2).position(|w| w[0] >= w[1]) {
        Some(pos) => Err(Error::NotStrictlyIncreasing(pos + 1)),
        None => Ok(()),
    }
}

impl SparseSet {
    pub fn new(elems: Vec<i64>) -> Result<Self> {
        check_increasing(&elems)?;
        if let Some(&first) = elems.first() {
            if first < 0 {
                return Err(Error::NegativeElement(first));
            }
        }
        Ok(Self { elems, signed: false })
    }

    pub fn new_signed(elems: Vec<i64>) -> Result<Self> {
        check_increasing(&elems)?;
        Ok(Self { elems, signed: true })
    }

    /// Sorts and deduplicates arbitrary input.
    pub fn from_unsorted<I: IntoIterator<Item = i64>>(iter: I) -> Result<Self> {
        let mut elems: Vec<i64> = iter.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        Self::new(elems)
    }

    pub fn signed_from_unsorted<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        let mut elems: Vec<i64> = iter.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        Self { elems, signed: true }
    }

    /// Caller guarantees the invariants; checked in debug builds.
    pub(crate) fn from_sorted_unchecked(elems: Vec<i64>) -> Self {
        debug_assert!(check_increasing(&elems).is_ok());
        debug_assert!(elems.first().map_or(true, |&x| x >= 0));
        Self { elems, signed: false }
    }

    /// Sorted distinct input; the signed flag is set only if needed.
    pub(crate) fn from_sorted_any(elems: Vec<i64>) -> Self {
        debug_assert!(check_increasing(&elems).is_ok());
        let signed = elems.first().is_some_and(|&x| x < 0);
        Self { elems, signed }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(x: i64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn min(&self) -> Option<i64> {
        self.elems.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.elems.last().copied()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.elems.iter().copied()
    }

    /// Elements `A_lo ..= A_hi` with 1-based indices.
    pub fn index_range(&self, lo: usize, hi: usize) -> &[i64] {
        &self.elems[lo - 1..hi]
    }

    pub fn is_subset_of(&self, other: &SparseSet) -> bool {
        let mut it = other.elems.iter().peekable();
        'outer: for &x in &self.elems {
            while let Some(&&y) = it.peek() {
                if y < x {
                    it.next();
                } else if y == x {
                    it.next();
                    continue 'outer;
                } else {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// `{ x ÷ d }` with floor division, deduplicated.
    pub fn div_floor(&self, d: i64) -> SparseSet {
        assert!(d > 0);
        let mut elems: Vec<i64> = self.elems.iter().map(|&x| x.div_euclid(d)).collect();
        elems.dedup();
        Self { elems, signed: self.signed }
    }

    /// Adds `by` to every element. The result is unsigned iff all elements
    /// end up non-negative and `self` was unsigned or became non-negative.
    pub fn shifted(&self, by: i64) -> Result<SparseSet> {
        let mut elems = Vec::with_capacity(self.elems.len());
        for &x in &self.elems {
            elems.push(x.checked_add(by).ok_or(Error::Overflow("set shift"))?);
        }
        if elems.first().map_or(true, |&x| x >= 0) {
            Ok(Self { elems, signed: false })
        } else {
            Ok(Self { elems, signed: true })
        }
    }

    /// Elements inside `[lo, hi]`.
    pub fn restrict(&self, lo: i64, hi: i64) -> SparseSet {
        let start = self.elems.partition_point(|&x| x < lo);
        let end = self.elems.partition_point(|&x| x <= hi);
        Self {
            elems: self.elems[start..end.max(start)].to_vec(),
            signed: self.signed,
        }
    }

    pub fn union(&self, other: &SparseSet) -> SparseSet {
        let mut elems = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            let (x, y) = (self.elems[i], other.elems[j]);
            if x < y {
                elems.push(x);
                i += 1;
            } else if y < x {
                elems.push(y);
                j += 1;
            } else {
                elems.push(x);
                i += 1;
                j += 1;
            }
        }
        elems.extend_from_slice(&self.elems[i..]);
        elems.extend_from_slice(&other.elems[j..]);
        Self { elems, signed: self.signed || other.signed }
    }
}

impl<'a> IntoIterator for &'a SparseSet {
    type Item = &'a i64;
    type IntoIter = std::slice::Iter<'a, i64>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

/// Sparse vector of strictly positive integer values at strictly increasing
/// non-negative indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(i64, u64)>,
    value_bound: u64,
}

impl SparseVec {
    pub fn new(entries: Vec<(i64, u64)>) -> Result<Self> {
        Self::with_bound(entries, DEFAULT_VALUE_BOUND)
    }

    pub fn with_bound(entries: Vec<(i64, u64)>, value_bound: u64) -> Result<Self> {
        if let Some(pos) = entries.windows(2).position(|w| w[0].0 >= w[1].0) {
            return Err(Error::NotStrictlyIncreasing(pos + 1));
        }
        for &(idx, val) in &entries {
            if idx < 0 {
                return Err(Error::NegativeElement(idx));
            }
            if val == 0 {
                return Err(Error::ZeroValue(idx));
            }
            if val > value_bound {
                return Err(Error::ValueOverflow { value: val as u128, bound: value_bound });
            }
        }
        Ok(Self { entries, value_bound })
    }

    pub(crate) fn from_sorted_unchecked(entries: Vec<(i64, u64)>, value_bound: u64) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(i, v)| i >= 0 && v > 0 && v <= value_bound));
        Self { entries, value_bound }
    }

    /// The 0/1 indicator vector of a set.
    pub fn indicator(set: &SparseSet) -> Self {
        assert!(!set.is_signed(), "indicator vectors need non-negative indices");
        Self {
            entries: set.iter().map(|x| (x, 1)).collect(),
            value_bound: DEFAULT_VALUE_BOUND,
        }
    }

    pub fn entries(&self) -> &[(i64, u64)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(i64, u64)> {
        self.entries
    }

    pub fn value_bound(&self) -> u64 {
        self.value_bound
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: i64) -> Option<u64> {
        self.entries
            .binary_search_by_key(&idx, |&(i, _)| i)
            .ok()
            .map(|pos| self.entries[pos].1)
    }

    pub fn support(&self) -> SparseSet {
        SparseSet::from_sorted_unchecked(self.entries.iter().map(|&(i, _)| i).collect())
    }

    pub fn total_mass(&self) -> u128 {
        self.entries.iter().map(|&(_, v)| v as u128).sum()
    }

    /// Entries with index in `[lo, hi]`.
    pub fn restrict(&self, lo: i64, hi: i64) -> SparseVec {
        let start = self.entries.partition_point(|&(i, _)| i < lo);
        let end = self.entries.partition_point(|&(i, _)| i <= hi);
        Self {
            entries: self.entries[start..end.max(start)].to_vec(),
            value_bound: self.value_bound,
        }
    }

    /// Keeps only entries whose index belongs to `set`.
    pub fn restrict_to(&self, set: &[i64]) -> SparseVec {
        let entries = self
            .entries
            .iter()
            .filter(|(i, _)| set.binary_search(i).is_ok())
            .copied()
            .collect();
        Self { entries, value_bound: self.value_bound }
    }
}

/// A restricted sumset instance: compute `(A + B) ∩ [lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub a: SparseSet,
    pub b: SparseSet,
    pub lo: i64,
    pub hi: i64,
    pub out_estimate: Option<u64>,
}

impl Instance {
    pub fn new(a: SparseSet, b: SparseSet, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("lo {lo} > hi {hi}")));
        }
        Ok(Self { a, b, lo, hi, out_estimate: None })
    }

    pub fn prefix(a: SparseSet, b: SparseSet, u: i64) -> Result<Self> {
        Self::new(a, b, 0, u)
    }

    pub fn with_estimate(mut self, est: u64) -> Self {
        self.out_estimate = Some(est);
        self
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// True when `max(A) + min(B) ≤ hi` and `min(A) + max(B) ≤ hi`.
    pub fn is_normalized(&self) -> bool {
        match (self.a.min(), self.a.max(), self.b.min(), self.b.max()) {
            (Some(amin), Some(amax), Some(bmin), Some(bmax)) => {
                amax + bmin <= self.hi && amin + bmax <= self.hi
            }
            _ => false,
        }
    }
}

/// Drops elements of `A` (resp. `B`) that cannot take part in any sum `≤ hi`.
///
/// Returns [`Error::EmptyAfterNormalize`] when one side becomes empty, in
/// which case `(A + B) ∩ [lo, hi]` is empty.
pub fn normalize(inst: &Instance) -> Result<Instance> {
    let (Some(amin), Some(bmin)) = (inst.a.min(), inst.b.min()) else {
        return Err(Error::EmptyAfterNormalize);
    };
    let a_keep = inst.a.as_slice().partition_point(|&a| a + bmin <= inst.hi);
    let b_keep = inst.b.as_slice().partition_point(|&b| b + amin <= inst.hi);
    if a_keep == 0 || b_keep == 0 {
        return Err(Error::EmptyAfterNormalize);
    }
    let trim = |s: &SparseSet, k: usize| SparseSet {
        elems: s.as_slice()[..k].to_vec(),
        signed: s.is_signed(),
    };
    Ok(Instance {
        a: trim(&inst.a, a_keep),
        b: trim(&inst.b, b_keep),
        lo: inst.lo,
        hi: inst.hi,
        out_estimate: inst.out_estimate,
    })
}
