//! Random instances shared by the integration tests. Everything draws from a
//! ChaCha stream keyed by `MUMFORD_SEED` so failures replay.
#![allow(dead_code)]

use mumford::bt_tree::{Moebius, TreeVertex};
use mumford::criterion::{evaluate, BranchData};
use mumford::valfield::{FieldParams, LaurentElem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x6d75_6d66;

pub fn seed() -> u64 {
    std::env::var("MUMFORD_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// Independent stream per test so adding draws in one test does not shift another.
pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Nonzero exact element with valuation in `[lo, hi]` (`t`-units) and up to
/// three more terms within four steps of the leading one.
pub fn rand_elem(rng: &mut impl Rng, k: &FieldParams, lo: i64, hi: i64) -> LaurentElem {
    let e = k.e() as i64;
    let q = k.residue_field().order();
    let v = rng.gen_range(lo * e..=hi * e);
    let mut terms = vec![(v, rng.gen_range(1..q))];
    for _ in 0..rng.gen_range(0..=3) {
        terms.push((v + rng.gen_range(1..=4), rng.gen_range(0..q)));
    }
    terms.sort();
    terms.dedup_by_key(|t| t.0);
    LaurentElem::from_terms(k, terms.into_iter().filter(|t| t.1 != 0), None).unwrap()
}

/// Element of valuation exactly in `[lo, hi]`, or zero with probability 1/8.
pub fn rand_elem_or_zero(rng: &mut impl Rng, k: &FieldParams, lo: i64, hi: i64) -> LaurentElem {
    if rng.gen_ratio(1, 8) {
        LaurentElem::zero(k)
    } else {
        rand_elem(rng, k, lo, hi)
    }
}

pub fn rand_points(rng: &mut impl Rng, k: &FieldParams, r: usize, lo: i64, hi: i64) -> Vec<LaurentElem> {
    loop {
        let a: Vec<LaurentElem> = (0..r).map(|_| rand_elem_or_zero(rng, k, lo, hi)).collect();
        let distinct = (0..r).all(|i| (i + 1..r).all(|j| !(&a[i] - &a[j]).is_zero()));
        if distinct {
            return a;
        }
    }
}

pub fn rand_branch_data(rng: &mut impl Rng, k: &FieldParams, r: usize, lo: i64, hi: i64) -> BranchData {
    let a = rand_points(rng, k, r, lo, hi);
    let l = (0..r).map(|_| rand_elem(rng, k, lo, hi)).collect();
    BranchData::new(a, l).unwrap()
}

/// Criterion-satisfying data with all valuations in `[lo, hi]`, by rejection.
pub fn rand_mumford(rng: &mut impl Rng, k: &FieldParams, r: usize, lo: i64, hi: i64) -> BranchData {
    loop {
        let bd = rand_branch_data(rng, k, r, lo, hi);
        if evaluate(&bd).is_mumford {
            return bd;
        }
    }
}

/// Criterion-violating data, by rejection.
pub fn rand_violating(rng: &mut impl Rng, k: &FieldParams, r: usize, lo: i64, hi: i64) -> BranchData {
    loop {
        let bd = rand_branch_data(rng, k, r, lo, hi);
        if !evaluate(&bd).is_mumford {
            return bd;
        }
    }
}

/// Invertible exact matrix with entries of valuation in `[lo, hi]` or zero.
pub fn rand_moebius(rng: &mut impl Rng, k: &FieldParams, lo: i64, hi: i64) -> Moebius {
    loop {
        let m: Vec<LaurentElem> = (0..4).map(|_| rand_elem_or_zero(rng, k, lo, hi)).collect();
        let [a, b, c, d]: [LaurentElem; 4] = m.try_into().unwrap();
        if let Ok(g) = Moebius::new(a, b, c, d) {
            return g;
        }
    }
}

pub fn rand_vertex(rng: &mut impl Rng, k: &FieldParams, lo: i64, hi: i64) -> TreeVertex {
    let c = rand_elem_or_zero(rng, k, lo, hi);
    TreeVertex::new(&c, rng.gen_range(lo..=hi + 2)).unwrap()
}

pub fn field(p: u32, f: u32, e: u32) -> FieldParams {
    FieldParams::new(p, f, e).unwrap()
}
