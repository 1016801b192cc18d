//! Prefix coverings that may overshoot `u` by a `ζ` fraction.
//!
//! After padding `u` to a power of two, both sets are cut into value ranges
//! of width `ζu/2`. Every kept block pair has smallest sum at most `u`, so
//! its largest sum is below `(1+ζ)u`; on each block diagonal the kept
//! sumsets are disjoint, which bounds the cost by `O(ζ⁻¹)` times the output
//! on `[(1+ζ)u]`.

use crate::covering::{materialize_sumset, Covering, IndexRect};
use crate::engine::Ctx;
use crate::error::{Error, Result};
use crate::interval::empty_run;
use crate::model::{normalize, Instance, SparseSet};
use crate::output_size::CoveredRun;

/// `ζ` rounded down to a power of two, as `(ℓ, 2^-ℓ)`.
pub fn round_zeta(zeta: f64) -> Result<(u32, f64)> {
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(Error::InvalidParameter(format!("zeta must lie in (0, 1], got {zeta}")));
    }
    let mut l = 0;
    while 0.5f64.powi(l as i32) > zeta {
        l += 1;
    }
    Ok((l, 0.5f64.powi(l as i32)))
}

/// Index blocks of a sorted slice grouped by `x div width`.
fn value_blocks(v: &[i64], width: i64) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut cur = None;
    for (k, &x) in v.iter().enumerate() {
        let key = x.div_euclid(width);
        if cur == Some(key) {
            out.last_mut().unwrap().1 = k + 1;
        } else {
            out.push((k + 1, k + 1));
            cur = Some(key);
        }
    }
    out
}

/// A unique rectangle covering of `(A, B, [u])` whose rectangles only
/// produce sums below `(1+ζ)u` after padding.
pub fn find_relaxed_covering(a: &SparseSet, b: &SparseSet, u: i64, zeta: f64) -> Result<Covering> {
    let (l, zr) = round_zeta(zeta)?;
    if u < 1 {
        return Err(Error::InvalidParameter(format!("u must be at least 1, got {u}")));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(Covering::unique(Vec::new()));
    }
    let padded = (u as u64).next_power_of_two() as i64;
    let shift = padded - u;
    let width = if l + 1 >= 63 { 1 } else { (padded >> (l + 1)).max(1) };
    let slack = (zr * padded as f64).floor() as i64;
    let a_shifted: Vec<i64> = a.iter().map(|x| x + shift).collect();
    let av = a_shifted.as_slice();
    let bv = b.as_slice();
    let a_blocks = value_blocks(av, width);
    let b_blocks = value_blocks(bv, width);
    let mut rects = Vec::new();
    for &(i_lo, i_hi) in &a_blocks {
        for &(j_lo, j_hi) in &b_blocks {
            if av[i_lo - 1] + bv[j_lo - 1] > padded {
                break;
            }
            assert!(
                av[i_hi - 1] + bv[j_hi - 1] <= padded + slack,
                "kept block pair overshoots (1+ζ)u"
            );
            rects.push(IndexRect::new(i_lo, i_hi, j_lo, j_hi));
        }
    }
    Ok(Covering::unique(rects))
}

/// Exact `(A + B) ∩ [u]` through the relaxed covering.
pub fn solve_prefix_relaxed(a: &SparseSet, b: &SparseSet, u: i64, zeta: f64) -> Result<SparseSet> {
    Ok(solve_prefix_relaxed_with(a, b, u, zeta, &mut Ctx::default())?.result)
}

pub fn solve_prefix_relaxed_with(a: &SparseSet, b: &SparseSet, u: i64, zeta: f64, ctx: &mut Ctx) -> Result<CoveredRun> {
    round_zeta(zeta)?;
    let inst = Instance { a: a.clone(), b: b.clone(), lo: 0, hi: u, out_estimate: None };
    if a.is_empty() || b.is_empty() || u < 0 {
        return Ok(empty_run(inst));
    }
    let norm = match normalize(&inst) {
        Ok(n) => n,
        Err(Error::EmptyAfterNormalize) => return Ok(empty_run(inst)),
        Err(e) => return Err(e),
    };
    let covering = if u == 0 {
        Covering::whole(norm.a.len(), norm.b.len())
    } else {
        find_relaxed_covering(&norm.a, &norm.b, u, zeta)?
    };
    let (result, cost) = materialize_sumset(&norm, &covering, ctx)?;
    Ok(CoveredRun { result, covering, out_estimate: 0, cost, trace: Vec::new(), instance: norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::validate_covering;
    use crate::oracle::brute_sumset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(v: &[i64]) -> SparseSet {
        SparseSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zeta_rounding() {
        assert_eq!(round_zeta(1.0).unwrap(), (0, 1.0));
        assert_eq!(round_zeta(0.3).unwrap(), (2, 0.25));
        assert_eq!(round_zeta(0.125).unwrap(), (3, 0.125));
        assert!(round_zeta(0.0).is_err());
        assert!(round_zeta(1.5).is_err());
    }

    #[test]
    fn coarsest_grid() {
        let a: Vec<i64> = (0..20).map(|i| i * 3).collect();
        let (a, b) = (set(&a), set(&a));
        let cov = find_relaxed_covering(&a, &b, 57, 1.0).unwrap();
        assert!(cov.len() <= 4);
        let inst = Instance::prefix(a, b, 57).unwrap();
        assert!(validate_covering(&inst, &cov).is_unique_rectangle_covering());
    }

    #[test]
    fn quarter_zeta_on_interval() {
        let a: Vec<i64> = (1..=32).collect();
        let (a, b) = (set(&a), set(&a));
        let inst = normalize(&Instance::prefix(a, b, 32).unwrap()).unwrap();
        let cov = find_relaxed_covering(&inst.a, &inst.b, 32, 0.25).unwrap();
        assert!(validate_covering(&inst, &cov).is_unique_rectangle_covering());
    }

    #[test]
    fn examples() {
        assert_eq!(solve_prefix_relaxed(&set(&[5]), &set(&[6]), 3, 0.5).unwrap(), set(&[]));
        assert_eq!(solve_prefix_relaxed(&set(&[1, 2]), &set(&[1, 2, 3]), 4, 0.5).unwrap(), set(&[2, 3, 4]));
        assert_eq!(solve_prefix_relaxed(&set(&[0]), &set(&[0]), 0, 1.0).unwrap(), set(&[0]));
    }

    #[test]
    fn random_instances_within_cost_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..120 {
            let zeta = [1.0, 0.5, 0.25, 0.125][trial % 4];
            let a = SparseSet::from_unsorted((0..rng.gen_range(1..100)).map(|_| rng.gen_range(0..3000))).unwrap();
            let b = SparseSet::from_unsorted((0..rng.gen_range(1..100)).map(|_| rng.gen_range(0..3000))).unwrap();
            let u = rng.gen_range(1..4000);
            let run = solve_prefix_relaxed_with(&a, &b, u, zeta, &mut Ctx::default()).unwrap();
            assert_eq!(run.result, brute_sumset(&a, &b, 0, u));
            if run.covering.is_empty() {
                continue;
            }
            let rep = validate_covering(&run.instance, &run.covering);
            assert!(rep.is_unique_rectangle_covering());
            let wide = brute_sumset(&a, &b, 0, u + (zeta * u as f64).floor() as i64).len() as f64;
            assert!(rep.cost as f64 <= 16.0 / zeta * wide, "cost {} vs {}", rep.cost, wide);
        }
    }
}
