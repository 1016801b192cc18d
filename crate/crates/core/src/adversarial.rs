//! Structured hard inputs: constant-weight codes lifted to digit sets whose
//! matched sumsets are large and mismatched ones small, the resulting
//! instances on which every rectangle covering is expensive, and encoders
//! for Boolean matrix products and sliding-window Hamming distance.

use crate::error::{Error, Result};
use crate::interval::{convolve_interval, solve_interval};
use crate::model::{Instance, SparseSet, SparseVec};
use crate::oracle::brute_sumset;

/// Brute-force verification is skipped above this many element pairs.
const VERIFY_PAIRS: u128 = 200_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CodeFamily {
    pub code_len: u32,
    pub code_delta: f64,
    /// Bit `k` of a codeword is its `k`-th coordinate.
    pub codewords: Vec<u64>,
}

impl CodeFamily {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn min_distance(&self) -> Option<u32> {
        let w = &self.codewords;
        (0..w.len()).flat_map(|i| (i + 1..w.len()).map(move |j| (w[i] ^ w[j]).count_ones())).min()
    }

    pub fn as_strings(&self) -> Vec<String> {
        self.codewords
            .iter()
            .map(|&c| (0..self.code_len).map(|k| if c >> k & 1 == 1 { '1' } else { '0' }).collect())
            .collect()
    }
}

/// Greedy constant-weight code: weight-`t/2` words in increasing order of
/// their bit mask, keeping each word at distance `≥ δt` from all kept ones.
pub fn greedy_code(code_len: u32, code_delta: f64) -> Result<CodeFamily> {
    if code_len == 0 || code_len % 2 == 1 || code_len > 30 {
        return Err(Error::InvalidParameter(format!("code length must be even and in [2, 30], got {code_len}")));
    }
    if !(0.0..0.5).contains(&code_delta) {
        return Err(Error::InvalidParameter(format!("code delta must lie in [0, 1/2), got {code_delta}")));
    }
    let need = code_delta * code_len as f64;
    let mut picked: Vec<u64> = Vec::new();
    for mask in 0u64..(1 << code_len) {
        if mask.count_ones() != code_len / 2 {
            continue;
        }
        if picked.iter().all(|&p| (p ^ mask).count_ones() as f64 >= need) {
            picked.push(mask);
        }
    }
    Ok(CodeFamily { code_len, code_delta, codewords: picked })
}

#[derive(Clone, Debug)]
pub struct XYFamily {
    pub base: i64,
    pub code: CodeFamily,
    pub sigma: i64,
    /// `⌈2^{δt/2}·m^{(1−δ/2)t}⌉ + 1`.
    pub alpha: u64,
    pub alpha_exact: f64,
    pub x_sets: Vec<SparseSet>,
    pub y_sets: Vec<SparseSet>,
    /// Whether all cross sumsets were checked against `alpha`.
    pub verified_cross: bool,
}

impl XYFamily {
    pub fn g(&self) -> usize {
        self.x_sets.len()
    }
}

/// All numbers whose base-`m` digits outside the mask are zero.
fn digit_set(mask: u64, len: u32, base: i64) -> SparseSet {
    let mut vals = vec![0i64];
    let mut place = 1i64;
    for k in 0..len {
        if mask >> k & 1 == 1 {
            vals = vals.iter().flat_map(|&v| (0..base).map(move |d| v + d * place)).collect();
        }
        place *= base;
    }
    SparseSet::from_unsorted(vals).expect("digit sums are non-negative")
}

pub fn build_xy_family(base: i64, code: &CodeFamily) -> Result<XYFamily> {
    if base < 2 {
        return Err(Error::InvalidParameter(format!("base must be at least 2, got {base}")));
    }
    let t = code.code_len;
    let sigma = base.checked_pow(t).ok_or(Error::Overflow("base^code_len"))?;
    let d = code.code_delta;
    let alpha_exact = 2f64.powf(d * t as f64 / 2.0) * (base as f64).powf((1.0 - d / 2.0) * t as f64);
    let alpha = (alpha_exact - 1e-9).ceil() as u64 + 1;
    let full = (1u64 << t) - 1;
    let x_sets: Vec<SparseSet> = code.codewords.iter().map(|&c| digit_set(c, t, base)).collect();
    let y_sets: Vec<SparseSet> = code.codewords.iter().map(|&c| digit_set(full ^ c, t, base)).collect();

    let g = x_sets.len() as u128;
    let mut verified_cross = false;
    if sigma <= 1_000_000 {
        let root = base.pow(t / 2) as usize;
        for (x, y) in x_sets.iter().zip(&y_sets) {
            assert_eq!((x.len(), y.len()), (root, root), "digit sets must have σ^(1/2) elements");
            assert_eq!(brute_sumset(x, y, 0, i64::MAX).len() as i64, sigma, "matched sumset must have σ elements");
        }
        if g * g * sigma as u128 <= VERIFY_PAIRS {
            for (i, x) in x_sets.iter().enumerate() {
                for (j, y) in y_sets.iter().enumerate() {
                    if i != j {
                        let s = brute_sumset(x, y, 0, i64::MAX).len() as u64;
                        assert!(s <= alpha, "cross sumset {i},{j} has {s} > α = {alpha} elements");
                    }
                }
            }
            verified_cross = true;
        }
    }
    Ok(XYFamily { base, code: code.clone(), sigma, alpha, alpha_exact, x_sets, y_sets, verified_cross })
}

#[derive(Clone, Debug)]
pub struct HardInstance {
    pub instance: Instance,
    pub g: usize,
    pub sigma: i64,
    pub alpha: u64,
    /// The block separation `M = 100(σ + g)`.
    pub big_m: i64,
    /// `(A-block, B-block)` index ranges of every `X_i` and `Y_j`, 1-based.
    pub a_blocks: Vec<(usize, usize)>,
    pub b_blocks: Vec<(usize, usize)>,
    /// Whether the output bound and diagonal structure were brute-verified.
    pub verified: bool,
}

impl HardInstance {
    /// Every rectangle covering of this instance costs at least this much.
    pub fn cost_lower_bound(&self) -> f64 {
        self.g as f64 * self.sigma as f64 / 4.0
    }

    pub fn out_upper_bound(&self) -> u128 {
        (self.g as u128).pow(2) * self.alpha as u128 + 2 * self.sigma as u128 + 1
    }
}

/// Places `X_i` on the `i`-th block of `A` and `Y_j` on block `g − j` of `B`
/// so that only the matched odd diagonal and the strictly lower blocks land
/// in `[u]`.
pub fn build_hard_instance(fam: &XYFamily) -> Result<HardInstance> {
    let g = fam.g();
    if g < 2 {
        return Err(Error::InvalidParameter(format!("need at least two codewords, got {g}")));
    }
    let sigma = fam.sigma;
    let big_m = sigma.checked_add(g as i64).and_then(|v| v.checked_mul(100)).ok_or(Error::Overflow("M"))?;
    let m2 = big_m.checked_mul(big_m).ok_or(Error::Overflow("M^2"))?;
    let gm2 = m2.checked_mul(g as i64).ok_or(Error::Overflow("g·M^2"))?;
    let u = gm2.checked_add(2 * sigma).ok_or(Error::Overflow("u"))?;
    gm2.checked_add(g as i64 * big_m + 2 * sigma).ok_or(Error::Overflow("largest sum"))?;

    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 1..=g as i64 {
        let e = if i % 2 == 0 { i } else { 0 };
        let shift = i * m2 + e * big_m;
        a.extend(fam.x_sets[i as usize - 1].iter().map(|x| x + shift));
    }
    for j in (1..=g as i64).rev() {
        let shift = (g as i64 - j) * m2;
        b.extend(fam.y_sets[j as usize - 1].iter().map(|y| y + shift));
    }
    let root = fam.x_sets[0].len();
    let a_blocks: Vec<(usize, usize)> = (0..g).map(|k| (k * root + 1, (k + 1) * root)).collect();
    // B is laid out with Y_g first, so Y_j occupies block g − j.
    let b_blocks: Vec<(usize, usize)> = (1..=g).map(|j| ((g - j) * root + 1, (g - j + 1) * root)).collect();
    let a = SparseSet::new(a)?;
    let b = SparseSet::new(b)?;
    assert_eq!(a.len(), g * root);
    assert_eq!(b.len(), g * root);
    let instance = Instance::prefix(a, b, u)?;

    let mut hard = HardInstance { instance, g, sigma, alpha: fam.alpha, big_m, a_blocks, b_blocks, verified: false };
    if (hard.instance.a.len() as u128) * (hard.instance.b.len() as u128) <= VERIFY_PAIRS {
        verify_hard_instance(&hard);
        hard.verified = true;
    }
    Ok(hard)
}

fn verify_hard_instance(h: &HardInstance) {
    let (a, b, u) = (&h.instance.a, &h.instance.b, h.instance.hi);
    let gm2 = h.g as i64 * h.big_m * h.big_m;
    for i in 1..=h.g {
        let (ai, bi) = (h.a_blocks[i - 1], h.b_blocks[i - 1]);
        let x = SparseSet::new(a.index_range(ai.0, ai.1).to_vec()).unwrap();
        let y = SparseSet::new(b.index_range(bi.0, bi.1).to_vec()).unwrap();
        let s = brute_sumset(&x, &y, i64::MIN, i64::MAX);
        if i % 2 == 0 {
            assert!(s.restrict(0, u).is_empty(), "even diagonal block {i} reaches [u]");
        } else {
            assert!(s.min().unwrap() >= gm2 && s.max().unwrap() <= gm2 + 2 * h.sigma, "odd diagonal block {i} escapes");
        }
    }
    let out = brute_sumset(a, b, 0, u).len() as u128;
    assert!(out <= h.out_upper_bound(), "out = {out} exceeds g²α + 2σ + 1 = {}", h.out_upper_bound());
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// The exponent `c(δ, m)` with covering cost `Ω(out^c)` on the hard family.
pub fn lower_bound_exponent(code_delta: f64, base: i64) -> Result<f64> {
    if !(code_delta > 0.0 && code_delta < 0.5) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1/2), got {code_delta}")));
    }
    if base < 2 {
        return Err(Error::InvalidParameter(format!("base must be at least 2, got {base}")));
    }
    let h = binary_entropy(code_delta);
    let lm = (base as f64).log2();
    let num = (1.0 - h) + lm;
    let den = ((2.0 - 2.0 * h + code_delta / 2.0) + (1.0 - code_delta / 2.0) * lm).max(lm);
    Ok(num / den)
}

/// A signed reduction instance plus the non-negative copy handed to solvers.
#[derive(Clone, Debug)]
pub struct Encoded {
    pub signed: Instance,
    pub shifted: Instance,
    /// Added to every element of `B` and to both ends of the interval.
    pub shift: i64,
    pub n: usize,
    pub big_m: i64,
}

/// Boolean `n × n` matrices, row major.
pub type BoolMatrix = Vec<Vec<bool>>;

fn check_square(m: &BoolMatrix, n: usize) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter(format!("expected a {n}×{n} matrix")));
    }
    Ok(())
}

/// Encodes a Boolean product `Ā·B̄` as an interval-restricted sumset.
pub fn encode_bmm(abar: &BoolMatrix, bbar: &BoolMatrix) -> Result<Encoded> {
    let n = abar.len();
    if n == 0 {
        return Err(Error::InvalidParameter("matrices must be non-empty".into()));
    }
    check_square(abar, n)?;
    check_square(bbar, n)?;
    let ni = n as i64;
    let big_m = 10 * (ni * ni + ni) + 1;
    let m2 = big_m.checked_mul(big_m).ok_or(Error::Overflow("M^2"))?;
    ni.checked_mul(m2).ok_or(Error::Overflow("n·M^2"))?;
    let mut a = Vec::with_capacity(n * n);
    let mut b = Vec::with_capacity(n * n);
    for r in 1..=ni {
        for i in 1..=ni {
            a.push(r * m2 + abar[i as usize - 1][r as usize - 1] as i64 * big_m + i);
        }
        for j in 1..=ni {
            b.push(-r * m2 + bbar[r as usize - 1][j as usize - 1] as i64 * big_m + ni * j);
        }
    }
    let (lo, hi) = (2 * big_m + ni + 1, 2 * big_m + ni * ni + ni);
    let a = SparseSet::from_unsorted(a)?;
    let b = SparseSet::signed_from_unsorted(b);
    let shift = -b.min().unwrap();
    let signed = Instance::new(a.clone(), b.clone(), lo, hi)?;
    let shifted = Instance::new(a, b.shifted(shift)?, lo + shift, hi + shift)?;
    Ok(Encoded { signed, shifted, shift, n, big_m })
}

impl Encoded {
    /// Reads the product off `(A + B) ∩ [ℓ, u]` of the shifted instance.
    pub fn decode_bmm(&self, sums: &SparseSet) -> BoolMatrix {
        let n = self.n as i64;
        (1..=n)
            .map(|i| (1..=n).map(|j| sums.contains(2 * self.big_m + i + n * j + self.shift)).collect())
            .collect()
    }

    /// Reads Hamming distances off the multiplicities on `[1, n]` of the shifted instance.
    pub fn decode_swhd(&self, conv: &SparseVec) -> Vec<usize> {
        (1..=self.n as i64).map(|i| self.n - conv.get(i + self.shift).unwrap_or(0) as usize).collect()
    }
}

pub fn naive_bmm(abar: &BoolMatrix, bbar: &BoolMatrix) -> BoolMatrix {
    let n = abar.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).any(|r| abar[i][r] && bbar[r][j])).collect()).collect()
}

pub fn bmm_via_sumset(abar: &BoolMatrix, bbar: &BoolMatrix) -> Result<BoolMatrix> {
    let enc = encode_bmm(abar, bbar)?;
    let s = &enc.shifted;
    Ok(enc.decode_bmm(&solve_interval(&s.a, &s.b, s.lo, s.hi)))
}

/// Encodes sliding-window Hamming distance of a length-`n` pattern against
/// the windows of a length-`2n` text starting at offsets `1..=n`.
pub fn encode_swhd(text: &[u32], pattern: &[u32]) -> Result<Encoded> {
    let n = pattern.len();
    if n == 0 || text.len() != 2 * n {
        return Err(Error::InvalidParameter(format!(
            "text length {} must be twice the non-empty pattern length {n}",
            text.len()
        )));
    }
    let ni = n as i64;
    let big_m = 100 * ni;
    let a: Vec<i64> = text.iter().enumerate().map(|(k, &c)| big_m * c as i64 + k as i64 + 1).collect();
    let b: Vec<i64> = pattern.iter().enumerate().map(|(k, &c)| -big_m * c as i64 - k as i64 - 1).collect();
    let a = SparseSet::from_unsorted(a)?;
    let b = SparseSet::signed_from_unsorted(b);
    let shift = -b.min().unwrap();
    let signed = Instance::new(a.clone(), b.clone(), 1, ni)?;
    let shifted = Instance::new(a, b.shifted(shift)?, 1 + shift, ni + shift)?;
    Ok(Encoded { signed, shifted, shift, n, big_m })
}

pub fn naive_swhd(text: &[u32], pattern: &[u32]) -> Vec<usize> {
    let n = pattern.len();
    (1..=n).map(|i| (0..n).filter(|&j| text[i + j] != pattern[j]).count()).collect()
}

pub fn swhd_via_convolution(text: &[u32], pattern: &[u32]) -> Result<Vec<usize>> {
    let enc = encode_swhd(text, pattern)?;
    let s = &enc.shifted;
    let conv = convolve_interval(&SparseVec::indicator(&s.a), &SparseVec::indicator(&s.b), s.lo, s.hi)?;
    Ok(enc.decode_swhd(&conv))
}
