//! Finite fields `F_{p^f}` with small order.
//!
//! Elements are `u32` indices whose base-`p` digits are the coefficients of a
//! polynomial in the generator `z` (least significant digit = constant term).
//! The defining polynomial is the lexicographically first monic irreducible of
//! degree `f` whose root generates the multiplicative group, so that every run
//! reproduces the same representation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::FieldError;

/// Largest field order supported (log/exp tables are materialized).
pub const MAX_ORDER: u64 = 1 << 20;

#[derive(Debug)]
pub struct Gf {
    p: u32,
    f: u32,
    q: u32,
    /// Monic modulus, coefficients low to high, length `f + 1`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn cache() -> &'static Mutex<HashMap<(u32, u32), Arc<Gf>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Gf>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Gf {
    /// Fetch (building on first use) the field of order `p^f`.
    pub fn get(p: u32, f: u32) -> Result<Arc<Gf>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if f == 0 {
            return Err(FieldError::BadDegree(f));
        }
        let q = (p as u64).checked_pow(f).filter(|&q| q <= MAX_ORDER);
        let Some(q) = q else {
            return Err(FieldError::TooLarge { p, f });
        };
        let mut guard = cache().lock().expect("field cache poisoned");
        if let Some(gf) = guard.get(&(p, f)) {
            return Ok(gf.clone());
        }
        let gf = Arc::new(Gf::build(p, f, q as u32));
        guard.insert((p, f), gf.clone());
        Ok(gf)
    }

    fn build(p: u32, f: u32, q: u32) -> Gf {
        if f == 1 {
            // generator: smallest primitive root mod p
            for g in 1..p.max(2) {
                if let Some((exp, log)) = tables_prime(p, g) {
                    return Gf { p, f, q, modulus: vec![p - g % p, 1], exp, log };
                }
            }
            // p = 2
            return Gf { p, f, q, modulus: vec![1, 1], exp: vec![1], log: vec![0, 0] };
        }
        // enumerate monic polynomials of degree f in lexicographic order of
        // their lower coefficients (constant term least significant)
        let count = q;
        for idx in 0..count {
            let mut modulus = digits(idx, p, f);
            modulus.push(1);
            if modulus[0] == 0 {
                continue;
            }
            if let Some((exp, log)) = tables_poly(p, f, q, &modulus) {
                return Gf { p, f, q, modulus, exp, log };
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Coefficient digits of an element over `F_p`, constant term first.
    pub fn to_digits(&self, a: u32) -> Vec<u32> {
        digits(a, self.p, self.f)
    }

    pub fn from_digits(&self, ds: &[u32]) -> u32 {
        ds.iter()
            .take(self.f as usize)
            .rev()
            .fold(0u32, |acc, &d| acc * self.p + d % self.p)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// The generator `z` (root of the modulus).
    pub fn generator(&self) -> u32 {
        if self.f == 1 {
            if self.q == 2 {
                1
            } else {
                self.exp[1]
            }
        } else {
            self.p
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.f {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
            b /= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.f {
            let d = (self.p - a % self.p) % self.p;
            out += d * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let s = (self.log[a as usize] + self.log[b as usize]) % n;
        self.exp[s as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        let l = self.log[a as usize];
        Some(self.exp[((n - l) % n) as usize])
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (k % n)) % n) as usize]
    }

    /// Frobenius `a ↦ a^p`.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    /// Unique `p`-th root (inverse Frobenius).
    pub fn pth_root(&self, a: u32) -> u32 {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// Absolute trace to `F_p`.
    pub fn trace(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut cur = a;
        for _ in 0..self.f {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur);
        }
        acc
    }

    /// Smallest `y` with `y^p - y = c`, if one exists in this field.
    pub fn artin_schreier_root(&self, c: u32) -> Option<u32> {
        (0..self.q).find(|&y| self.sub(self.frobenius(y), y) == c)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

fn digits(mut a: u32, p: u32, f: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(f as usize);
    for _ in 0..f {
        out.push(a % p);
        a /= p;
    }
    out
}

fn tables_prime(p: u32, g: u32) -> Option<(Vec<u32>, Vec<u32>)> {
    if p == 2 {
        return None;
    }
    let n = p - 1;
    let mut exp = vec![0u32; n as usize];
    let mut log = vec![0u32; p as usize];
    let mut cur = 1u64;
    for k in 0..n {
        if k > 0 && cur == 1 {
            return None;
        }
        exp[k as usize] = cur as u32;
        log[cur as usize] = k;
        cur = cur * g as u64 % p as u64;
    }
    if cur != 1 {
        return None;
    }
    Some((exp, log))
}

/// Multiply the polynomial `a` (digits) by `z` modulo `modulus`.
fn times_z(a: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let f = a.len();
    let top = a[f - 1];
    let mut out = vec![0u32; f];
    for k in (1..f).rev() {
        out[k] = a[k - 1];
    }
    out[0] = 0;
    if top != 0 {
        for k in 0..f {
            out[k] = (out[k] + p - (top * modulus[k]) % p) % p;
        }
    }
    out
}

fn tables_poly(p: u32, f: u32, q: u32, modulus: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
    let n = q - 1;
    let mut exp = vec![0u32; n as usize];
    let mut log = vec![u32::MAX; q as usize];
    let mut cur = vec![0u32; f as usize];
    cur[0] = 1;
    for k in 0..n {
        let idx = cur.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        if log[idx as usize] != u32::MAX {
            return None;
        }
        exp[k as usize] = idx;
        log[idx as usize] = k;
        cur = times_z(&cur, modulus, p);
    }
    if cur.iter().rev().fold(0u32, |acc, &d| acc * p + d) != 1 {
        return None;
    }
    log[0] = 0;
    Some((exp, log))
}

fn embed_cache() -> &'static Mutex<HashMap<(u32, u32, u32), u32>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), u32>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Image of the generator of `small` inside `big` (the smallest root of the
/// modulus of `small`). Requires `small.degree()` to divide `big.degree()`.
pub fn embedding_image(small: &Gf, big: &Gf) -> Option<u32> {
    if small.p != big.p || !big.f.is_multiple_of(small.f) {
        return None;
    }
    if small.f == 1 {
        return Some(0);
    }
    let key = (small.p, small.f, big.f);
    if let Some(&r) = embed_cache().lock().expect("embed cache poisoned").get(&key) {
        return Some(r);
    }
    let root = big.elements().find(|&x| {
        // evaluate modulus at x
        let mut acc = 0u32;
        for &c in small.modulus.iter().rev() {
            acc = big.add(big.mul(acc, x), big.from_int(c as i64));
        }
        acc == 0
    })?;
    embed_cache().lock().expect("embed cache poisoned").insert(key, root);
    Some(root)
}

/// Map an element of `small` into `big` along [`embedding_image`].
pub fn embed(small: &Gf, big: &Gf, a: u32) -> Option<u32> {
    if small.f == big.f {
        return Some(a);
    }
    let rho = embedding_image(small, big)?;
    let ds = small.to_digits(a);
    let mut acc = 0u32;
    for &d in ds.iter().rev() {
        acc = big.add(big.mul(acc, rho), big.from_int(d as i64));
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Gf::get(5, 1).unwrap();
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.inv(2), Some(3));
        assert_eq!(f.add(4, 3), 2);
        assert_eq!(f.neg(1), 4);
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn f4_is_a_field() {
        let f = Gf::get(2, 2).unwrap();
        for a in 1..4 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        // z^2 = z + 1
        let z = f.generator();
        assert_eq!(f.mul(z, z), f.add(z, 1));
    }

    #[test]
    fn field_axioms_small_fields() {
        for (p, d) in [(2, 1), (2, 3), (3, 1), (3, 2), (5, 2), (7, 1)] {
            let f = Gf::get(p, d).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                for b in f.elements() {
                    for c in [0, 1, f.generator()] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
                assert_eq!(f.frobenius(f.pth_root(a)), a);
            }
        }
    }

    #[test]
    fn artin_schreier_residue_solvability_matches_trace() {
        for (p, d) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let f = Gf::get(p, d).unwrap();
            for c in f.elements() {
                assert_eq!(f.artin_schreier_root(c).is_some(), f.trace(c) == 0);
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = Gf::get(2, 2).unwrap();
        let big = Gf::get(2, 4).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                let ab = embed(&small, &big, small.mul(a, b)).unwrap();
                let ea = embed(&small, &big, a).unwrap();
                let eb = embed(&small, &big, b).unwrap();
                assert_eq!(ab, big.mul(ea, eb));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Gf::get(4, 1).is_err());
        assert!(Gf::get(3, 0).is_err());
    }
}
