//! Number-theoretic transforms over two fixed primes below 2^62, with
//! Montgomery multiplication and CRT recombination.

use std::sync::OnceLock;

/// `2^50 · 61 · 67 + 1`.
pub const P1: u64 = 4_601_552_919_265_804_289;
/// `2^44 · 262111 + 1`.
pub const P2: u64 = 4_611_105_476_287_922_177;
const GENERATOR: u64 = 3;

/// Largest transform length either prime supports.
pub const MAX_LOG_LEN: u32 = 44;

pub struct Field {
    pub p: u64,
    /// `-p^{-1} mod 2^64`.
    n_prime: u64,
    /// `2^128 mod p`, used to enter Montgomery form.
    r2: u64,
    one: u64,
    two_adicity: u32,
}

impl Field {
    fn new(p: u64) -> Self {
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Self {
            p,
            n_prime: inv.wrapping_neg(),
            r2,
            one: r,
            two_adicity: (p - 1).trailing_zeros(),
        }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.n_prime);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    /// Standard residue to Montgomery form.
    #[inline(always)]
    pub fn enter(&self, x: u64) -> u64 {
        self.mul(x % self.p, self.r2)
    }

    #[inline(always)]
    pub fn enter_wide(&self, x: u128) -> u64 {
        self.enter((x % self.p as u128) as u64)
    }

    #[inline(always)]
    pub fn leave(&self, x: u64) -> u64 {
        self.redc(x as u128)
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.one;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Primitive `2^log_len`-th root of unity, in Montgomery form.
    fn root(&self, log_len: u32, inverse: bool) -> u64 {
        assert!(log_len <= self.two_adicity, "transform too long for this prime");
        let g = self.enter(GENERATOR);
        let w = self.pow(g, (self.p - 1) >> log_len);
        if inverse {
            self.pow(w, self.p - 2)
        } else {
            w
        }
    }

    /// In-place transform of a power-of-two length buffer in Montgomery form.
    pub fn transform(&self, a: &mut [u64], inverse: bool) {
        let n = a.len();
        assert!(n.is_power_of_two());
        if n == 1 {
            return;
        }
        let log_n = n.trailing_zeros();
        let shift = usize::BITS - log_n;
        for i in 0..n {
            let j = i.reverse_bits() >> shift;
            if i < j {
                a.swap(i, j);
            }
        }
        let w = self.root(log_n, inverse);
        let mut tw = Vec::with_capacity(n / 2);
        let mut cur = self.one;
        for _ in 0..n / 2 {
            tw.push(cur);
            cur = self.mul(cur, w);
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for chunk in a.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (k, (x, y)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let v = self.mul(*y, tw[k * stride]);
                    let u = *x;
                    *x = self.add(u, v);
                    *y = self.sub(u, v);
                }
            }
            len <<= 1;
        }
        if inverse {
            let n_inv = self.pow(self.enter(n as u64), self.p - 2);
            for x in a.iter_mut() {
                *x = self.mul(*x, n_inv);
            }
        }
    }
}

pub fn field(idx: usize) -> &'static Field {
    static FIELDS: OnceLock<[Field; 2]> = OnceLock::new();
    &FIELDS.get_or_init(|| [Field::new(P1), Field::new(P2)])[idx]
}

/// Number of moduli needed to represent every value below `bound` exactly,
/// or `None` when even the product of both primes is too small.
pub fn moduli_for(bound: u128) -> Option<usize> {
    if bound < P1 as u128 {
        Some(1)
    } else if bound < P1 as u128 * P2 as u128 {
        Some(2)
    } else {
        None
    }
}

/// Butterfly count of one transform of length `n`.
pub fn butterflies(n: usize) -> u64 {
    (n as u64 / 2) * n.trailing_zeros() as u64
}

/// Recombines residues modulo `P1` and `P2` into the unique value below `P1·P2`.
pub fn crt(r1: u64, r2: u64) -> u128 {
    static INV: OnceLock<u64> = OnceLock::new();
    let inv = *INV.get_or_init(|| {
        let f = field(1);
        f.leave(f.pow(f.enter(P1), P2 - 2))
    });
    let diff = (r2 as u128 + P2 as u128 - (r1 % P2) as u128) % P2 as u128;
    let t = diff * inv as u128 % P2 as u128;
    r1 as u128 + P1 as u128 * t
}

/// Linear convolution of standard-form residues, modulo field `idx`.
pub fn convolve_mod(a: &[u64], b: &[u64], idx: usize) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let f = field(idx);
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa = vec![0u64; n];
    let mut fb = vec![0u64; n];
    for (d, &x) in fa.iter_mut().zip(a) {
        *d = f.enter(x);
    }
    for (d, &x) in fb.iter_mut().zip(b) {
        *d = f.enter(x);
    }
    f.transform(&mut fa, false);
    f.transform(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = f.mul(*x, *y);
    }
    f.transform(&mut fa, true);
    fa.truncate(out_len);
    fa.iter().map(|&x| f.leave(x)).collect()
}
