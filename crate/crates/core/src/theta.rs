//! Truncated theta products for a group generated by parabolic elements:
//! the uniformizing function `x(z)` with `x(P₁) = 0`, `x(P₂) = 1`,
//! `x(u) = ∞`, its expansions at the fixed points, and the coefficients
//! `λ₁, λ₂` read off from them.
//!
//! All products run over reduced words of bounded length. Expansions at `P_i`
//! use the word set closed under left multiplication by powers of `s_i`, which
//! makes the truncated product exactly `s_i`-invariant.

use crate::bt_tree::{Moebius, P1Point};
use crate::error::{GroupError, ThetaError};
use crate::groups::{enumerate_words, huti_check, make_parabolic, GroupData, WordEvaluator, WordNF};
use crate::valfield::{FieldParams, LaurentElem, Rational, Valu};

#[derive(Clone, Debug)]
pub struct ThetaConfig {
    pub group: GroupData,
    pub u: LaurentElem,
    /// Word-length cutoff `L`.
    pub cutoff: usize,
}

impl ThetaConfig {
    /// Checks `P₁ = 0`, `P₂ ∉ {0, ∞}`, `|P_i| < |P₂|` for `i ≠ 2`,
    /// `|u| = |u − P₂| = |P₂|` and `|η| < |P₂|`.
    pub fn new(group: GroupData, u: LaurentElem, cutoff: usize) -> Result<Self, ThetaError> {
        match huti_check(&group, &P1Point::Finite(u.clone()), 0) {
            Ok(_) => Ok(ThetaConfig { group, u, cutoff }),
            Err(GroupError::PreconditionViolated(s)) => Err(ThetaError::NotNormalForm(s)),
            Err(GroupError::AssertionFailed { item, word }) => {
                Err(ThetaError::NotNormalForm(format!("assertion ({}) fails at {}", item, word)))
            }
            Err(e) => Err(e.into()),
        }
    }

    /// The pair `s₁` fixing `0` with `η = 1`, `s₂` fixing `1` with
    /// `η = t^{−d}`, normalized by [`ThetaConfig::from_pair`].
    pub fn standard(p: u32, d: i64, cutoff: usize) -> Result<Self, ThetaError> {
        let params = FieldParams::new(p, if p == 2 { 2 } else { 1 }, 1)?;
        let eta = LaurentElem::t_pow(&params, -d);
        Ok(ThetaConfig::from_pair(&LaurentElem::one(&params), &eta, None, cutoff)?.0)
    }

    /// `s₁` fixing `0` with `η = 1` and `s₂` fixing `P₂` with the given `η`.
    /// When this violates the normal form, both are conjugated by an element
    /// of the centralizer of `s₁` moving `P₂` to `π^{k−1}`, `k = val_π η`;
    /// `η` is unchanged by it. The flag reports whether that happened.
    /// Without `u`, `u = ω·P₂` for a residue `ω ∉ {0, 1}`.
    pub fn from_pair(
        p2: &LaurentElem,
        eta: &LaurentElem,
        u: Option<&LaurentElem>,
        cutoff: usize,
    ) -> Result<(Self, bool), ThetaError> {
        let params = p2.params().clone();
        let k = eta.val_pi().ok_or(ThetaError::NonNegativeEtaValuation)?;
        if k >= 0 {
            return Err(ThetaError::NonNegativeEtaValuation);
        }
        if p2.is_zero() {
            return Err(ThetaError::NotNormalForm("P_2 = 0".into()));
        }
        let s1 = make_parabolic(&P1Point::Finite(LaurentElem::zero(&params)), &LaurentElem::one(&params))?;
        let default_u = |p2: &LaurentElem| -> Result<LaurentElem, ThetaError> {
            let gf = params.residue_field();
            if gf.order() == 2 {
                return Err(ThetaError::NotNormalForm("over F_2 no u has |u| = |u - P_2| = |P_2|".into()));
            }
            let omega = if params.p() == 2 { gf.generator() } else { gf.from_int(2) };
            Ok(p2.scale(omega))
        };
        let attempt = |p2: &LaurentElem| -> Result<Self, ThetaError> {
            let s2 = make_parabolic(&P1Point::Finite(p2.clone()), eta)?;
            let group = GroupData::new(vec![s1.clone(), s2], None)?;
            let u = match u {
                Some(u) => u.clone(),
                None => default_u(p2)?,
            };
            ThetaConfig::new(group, u, cutoff)
        };
        match attempt(p2) {
            Ok(cfg) => Ok((cfg, false)),
            Err(ThetaError::NotNormalForm(_)) if u.is_none() => {
                let target = LaurentElem::from_terms(&params, [(k - 1, 1u32)], None)?;
                Ok((attempt(&target)?, true))
            }
            Err(e) => Err(e),
        }
    }

    pub fn params(&self) -> &FieldParams {
        self.u.params()
    }

    pub fn p(&self) -> u32 {
        self.group.p
    }

    /// `P_i` for `i ∈ {1, 2}` (1-based, as in `λ₁, λ₂`).
    pub fn fixed_point(&self, i: usize) -> LaurentElem {
        match &self.group.gens[i - 1].fixed_point {
            P1Point::Finite(x) => x.clone(),
            P1Point::Infinity => unreachable!("checked finite on construction"),
        }
    }

    pub fn p2(&self) -> LaurentElem {
        self.fixed_point(2)
    }

    /// `η` of `s₂`, from its normal form when known.
    pub fn eta(&self) -> Result<LaurentElem, ThetaError> {
        if let Some((_, eta)) = &self.group.gens[1].normal_form {
            return Ok(eta.clone());
        }
        Ok(crate::bt_tree::mirror_distance(&self.group.gens[0].matrix, &self.group.gens[1].matrix)?.eta)
    }

    pub fn with_cutoff(&self, cutoff: usize) -> ThetaConfig {
        ThetaConfig { cutoff, ..self.clone() }
    }
}

/// `h = [[1, 0], [c, 1]]` with `c = 1/target − 1/p2`. It commutes with
/// `z ↦ z/(1 + z)`, sends `p2` to `target`, and conjugates the parabolic
/// fixing `p2` with parameter `η` to the one fixing `target` with the same `η`.
pub fn centralizer_move(p2: &LaurentElem, target: &LaurentElem) -> Result<Moebius, ThetaError> {
    let params = p2.params();
    let one = LaurentElem::one(params);
    let c = &target.inv()? - &p2.inv()?;
    Ok(Moebius::new(one.clone(), LaurentElem::zero(params), c, one)?)
}

/// Which words enter a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordSet {
    /// All reduced words of length `≤ L`.
    Plain,
    /// `s_i^j γ` for `γ` of length `≤ L` not starting with `s_i` (0-based `i`).
    Saturated(usize),
}

pub fn word_set(cfg: &ThetaConfig, set: WordSet) -> Vec<WordNF> {
    let words = enumerate_words(&cfg.group, cfg.cutoff);
    match set {
        WordSet::Plain => words,
        WordSet::Saturated(i) => {
            let mut out = Vec::new();
            for w in words.iter().filter(|w| w.first_index() != Some(i)) {
                out.push(w.clone());
                for j in 1..cfg.p() {
                    out.push(WordNF::letter(i, j).mul(w, cfg.p()));
                }
            }
            out
        }
    }
}

/// `(γ(P₁), γ(u))` for every word.
fn orbit(cfg: &ThetaConfig, words: &[WordNF]) -> Result<Vec<(P1Point, P1Point)>, ThetaError> {
    let ev = WordEvaluator::new(&cfg.group);
    let p1 = P1Point::Finite(cfg.fixed_point(1));
    let u = P1Point::Finite(cfg.u.clone());
    words
        .iter()
        .map(|w| {
            let g = ev.eval(w);
            Ok((g.apply_point(&p1)?, g.apply_point(&u)?))
        })
        .collect()
}

/// `a/b`, exactly `1` when the two are the same element.
fn ratio(a: &LaurentElem, b: &LaurentElem) -> Result<LaurentElem, ThetaError> {
    if a == b {
        return Ok(LaurentElem::one(a.params()));
    }
    Ok(a.checked_div(b)?)
}

fn alpha_over(cfg: &ThetaConfig, orb: &[(P1Point, P1Point)]) -> Result<LaurentElem, ThetaError> {
    let p2 = cfg.p2();
    let mut acc = LaurentElem::one(cfg.params());
    for (gp, gu) in orb {
        let f = match (gp, gu) {
            (P1Point::Finite(a), P1Point::Finite(b)) => {
                let den = &p2 - a;
                if den.is_zero() {
                    return Err(ThetaError::NotNormalForm("P_2 lies on the orbit of P_1".into()));
                }
                (&p2 - b).checked_div(&den)?
            }
            // the factor tends to −1 or −1 times a constant; drop the infinite part
            (P1Point::Infinity, P1Point::Finite(b)) => &p2 - b,
            (P1Point::Finite(a), P1Point::Infinity) => (&p2 - a).inv()?,
            _ => unreachable!("P_1 and u have disjoint orbits"),
        };
        acc = &acc * &f;
    }
    Ok(acc)
}

/// `α = Π (P₂ − γu)/(P₂ − γP₁)` over words of length `≤ L`.
pub fn theta_alpha(cfg: &ThetaConfig) -> Result<LaurentElem, ThetaError> {
    let words = word_set(cfg, WordSet::Plain);
    alpha_over(cfg, &orbit(cfg, &words)?)
}

/// `x(z)` over the given word set, as a product of normalized factors
/// `(z − γP₁)(P₂ − γu) / ((z − γu)(P₂ − γP₁))`.
pub fn theta_x_over(cfg: &ThetaConfig, set: WordSet, z: &LaurentElem) -> Result<LaurentElem, ThetaError> {
    let words = word_set(cfg, set);
    let orb = orbit(cfg, &words)?;
    let p2 = cfg.p2();
    let mut acc = LaurentElem::one(cfg.params());
    for (gp, gu) in &orb {
        let f = match (gp, gu) {
            (P1Point::Finite(a), P1Point::Finite(b)) => {
                let zb = z - b;
                if zb.is_zero() {
                    return Err(ThetaError::PoleAtOrbitPoint);
                }
                &ratio(&(z - a), &(&p2 - a))? * &ratio(&(&p2 - b), &zb)?
            }
            (P1Point::Infinity, P1Point::Finite(b)) => {
                let zb = z - b;
                if zb.is_zero() {
                    return Err(ThetaError::PoleAtOrbitPoint);
                }
                ratio(&(&p2 - b), &zb)?
            }
            (P1Point::Finite(a), P1Point::Infinity) => ratio(&(z - a), &(&p2 - a))?,
            _ => unreachable!("P_1 and u have disjoint orbits"),
        };
        acc = &acc * &f;
    }
    Ok(acc)
}

pub fn theta_x(cfg: &ThetaConfig, z: &LaurentElem) -> Result<LaurentElem, ThetaError> {
    theta_x_over(cfg, WordSet::Plain, z)
}

#[derive(Clone, Debug)]
pub struct SeriesExpansion {
    /// 1 or 2.
    pub center: usize,
    /// Coefficients of `x(P_i + w)` in `w`; equal to `α c_{i,n}`.
    pub x_coeffs: Vec<LaurentElem>,
    /// `c_{i,n}`.
    pub coeffs: Vec<LaurentElem>,
    /// `α` over the same word set.
    pub alpha: LaurentElem,
    /// The expansion converges for `|w| ≤ |t|^radius`, strictly inside every
    /// `|P_i − γ(u)|`.
    pub radius: Rational,
    pub words: usize,
}

fn series_mul(a: &[LaurentElem], b: &[LaurentElem]) -> Vec<LaurentElem> {
    let n = a.len();
    let params = a[0].params();
    (0..n)
        .map(|k| {
            let mut s = LaurentElem::zero(params);
            for j in 0..=k {
                if a[j].is_exact_zero() || b[k - j].is_exact_zero() {
                    continue;
                }
                s = &s + &(&a[j] * &b[k - j]);
            }
            s
        })
        .collect()
}

/// Power series of `x` at `P_i` up to `w^order`, `order ≥ p`.
pub fn expand_at(cfg: &ThetaConfig, i: usize, order: usize) -> Result<SeriesExpansion, ThetaError> {
    assert!(i == 1 || i == 2, "center index is 1 or 2");
    let order = order.max(cfg.p() as usize);
    let params = cfg.params().clone();
    let center = cfg.fixed_point(i);
    let p2 = cfg.p2();
    let words = word_set(cfg, WordSet::Saturated(i - 1));
    let orb = orbit(cfg, &words)?;
    let zero = LaurentElem::zero(&params);
    let one = LaurentElem::one(&params);
    let mut acc: Vec<LaurentElem> = (0..=order).map(|n| if n == 0 { one.clone() } else { zero.clone() }).collect();
    let mut radius: Option<Rational> = None;
    for (gp, gu) in &orb {
        let mut f = vec![zero.clone(); order + 1];
        let bump = |b: &LaurentElem, radius: &mut Option<Rational>| -> Result<(), ThetaError> {
            let v = b.valuation().finite().ok_or(ThetaError::RadiusViolation)?;
            *radius = Some(radius.map_or(v, |r| r.max(v)));
            Ok(())
        };
        match (gp, gu) {
            (P1Point::Finite(a), P1Point::Finite(b)) => {
                // κ (w + A)/(w + B) = κ [A/B + Σ_{n≥1} (−1)^{n−1} (1 − A/B) w^n / B^n]
                let aa = &center - a;
                let bb = &center - b;
                bump(&bb, &mut radius)?;
                let kappa = (&p2 - b).checked_div(&(&p2 - a))?;
                let q = aa.checked_div(&bb)?;
                f[0] = &kappa * &q;
                let binv = bb.inv()?;
                let mut term = &(&one - &q) * &kappa;
                for c in f.iter_mut().skip(1) {
                    term = &term * &binv;
                    *c = term.clone();
                    term = -&term;
                }
            }
            (P1Point::Infinity, P1Point::Finite(b)) => {
                // (P₂ − γu)/(w + B)
                let bb = &center - b;
                bump(&bb, &mut radius)?;
                let binv = bb.inv()?;
                let mut term = &(&p2 - b) * &binv;
                for c in f.iter_mut() {
                    *c = term.clone();
                    term = -&(&term * &binv);
                }
            }
            (P1Point::Finite(a), P1Point::Infinity) => {
                // (w + A)/(P₂ − γP₁)
                let den = (&p2 - a).inv()?;
                f[0] = &(&center - a) * &den;
                f[1] = den;
            }
            _ => unreachable!("P_1 and u have disjoint orbits"),
        }
        acc = series_mul(&acc, &f);
    }
    let alpha = alpha_over(cfg, &orb)?;
    let coeffs = acc.iter().map(|c| c.checked_div(&alpha)).collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesExpansion {
        center: i,
        x_coeffs: acc,
        coeffs,
        alpha,
        radius: radius.unwrap_or_else(|| Rational::from_integer(0)) + 1,
        words: orb.len(),
    })
}

/// `(val λ₁, val λ₂)` lower bounds `((p−1)·val η − p·val P₂, −p·val η + p·val P₂)`.
pub fn lambda_bounds(eta: &LaurentElem, p2: &LaurentElem, p: u32) -> Result<(Valu, Valu), ThetaError> {
    let ve = eta.valuation().finite().ok_or(ThetaError::NonNegativeEtaValuation)?;
    if ve >= Rational::from_integer(0) {
        return Err(ThetaError::NonNegativeEtaValuation);
    }
    let vp = p2.valuation().finite().ok_or_else(|| ThetaError::NotNormalForm("P_2 = 0".into()))?;
    let p = Rational::from_integer(p as i64);
    Ok((Valu::Finite((p - 1) * ve - p * vp), Valu::Finite(-p * ve + p * vp)))
}

#[derive(Clone, Debug)]
pub struct LambdaRecovery {
    pub lambda1: LaurentElem,
    pub lambda2: LaurentElem,
    pub alpha: LaurentElem,
    pub bounds: (Valu, Valu),
    /// `val(λ_i(L) − λ_i(L − 1))`; `None` at `L = 0`.
    pub stability: Option<(Valu, Valu)>,
}

impl LambdaRecovery {
    pub fn bounds_hold(&self) -> bool {
        self.lambda1.valuation() >= self.bounds.0 && self.lambda2.valuation() >= self.bounds.1
    }
}

fn lambdas_at(cfg: &ThetaConfig) -> Result<(LaurentElem, LaurentElem), ThetaError> {
    let p = cfg.p() as usize;
    let e1 = expand_at(cfg, 1, p)?;
    let e2 = expand_at(cfg, 2, p)?;
    let p2 = cfg.p2();
    let k = -&(&p2 * &p2).checked_div(&cfg.eta()?)?;
    let l2 = &k.pow(p as i64)? * &e2.x_coeffs[p];
    let l1 = e1.x_coeffs[p].clone();
    for (name, l) in [("lambda_1", &l1), ("lambda_2", &l2)] {
        if l.is_zero() {
            return Err(ThetaError::PrecisionExhausted(format!("{} vanishes to working precision", name)));
        }
    }
    Ok((l1, l2))
}

/// `λ₁ = α c_{1,p}` and `λ₂ = (−P₂² η⁻¹)^p α c_{2,p}`.
pub fn recover_lambda(cfg: &ThetaConfig) -> Result<LambdaRecovery, ThetaError> {
    let (lambda1, lambda2) = lambdas_at(cfg)?;
    let stability = if cfg.cutoff == 0 {
        None
    } else {
        let (m1, m2) = lambdas_at(&cfg.with_cutoff(cfg.cutoff - 1))?;
        Some(((&lambda1 - &m1).valuation(), (&lambda2 - &m2).valuation()))
    };
    Ok(LambdaRecovery {
        bounds: lambda_bounds(&cfg.eta()?, &cfg.p2(), cfg.p())?,
        alpha: theta_alpha(cfg)?,
        lambda1,
        lambda2,
        stability,
    })
}

/// `n`-th Newton divided difference of `w ↦ x(P_i + w)` on the nodes
/// `w_k = t^{K+k}`, `k = 0..=n`, computed from direct evaluations. For a
/// power series this equals the `w^n` coefficient up to terms of valuation
/// at least `K` above the next coefficient.
pub fn divided_difference(cfg: &ThetaConfig, i: usize, n: usize, k0: i64) -> Result<LaurentElem, ThetaError> {
    let center = cfg.fixed_point(i);
    let nodes: Vec<LaurentElem> = (0..=n as i64).map(|k| LaurentElem::t_pow(cfg.params(), k0 + k)).collect();
    let mut table = nodes
        .iter()
        .map(|w| theta_x_over(cfg, WordSet::Saturated(i - 1), &(&center + w)))
        .collect::<Result<Vec<_>, _>>()?;
    for level in 1..=n {
        for j in (level..=n).rev() {
            let num = &table[j] - &table[j - 1];
            table[j] = num.checked_div(&(&nodes[j] - &nodes[j - level]))?;
        }
    }
    Ok(table[n].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &LaurentElem) -> Valu {
        x.valuation()
    }

    #[test]
    fn conjugator_gives_standard_pair() {
        for p in [2u32, 3] {
            for d in 1..=3 {
                let cfg = ThetaConfig::standard(p, d, 0).unwrap();
                let k = cfg.params().clone();
                let one = LaurentElem::one(&k);
                let raw = make_parabolic(&P1Point::Finite(one), &LaurentElem::t_pow(&k, -d)).unwrap();
                let h = centralizer_move(&LaurentElem::one(&k), &cfg.p2()).unwrap();
                assert!(raw.matrix.conjugate_by(&h).same_as(&cfg.group.gens[1].matrix));
                assert!(cfg.group.gens[0].matrix.conjugate_by(&h).same_as(&cfg.group.gens[0].matrix));
            }
        }
    }

    #[test]
    fn raw_standard_pair_is_rejected() {
        let k = FieldParams::new(3, 1, 1).unwrap();
        let s1 = make_parabolic(&P1Point::Finite(LaurentElem::zero(&k)), &LaurentElem::one(&k)).unwrap();
        let s2 = make_parabolic(&P1Point::Finite(LaurentElem::one(&k)), &LaurentElem::t_pow(&k, -2)).unwrap();
        let g = GroupData::new(vec![s1, s2], None).unwrap();
        assert!(matches!(ThetaConfig::new(g, LaurentElem::from_int(&k, 2), 2), Err(ThetaError::NotNormalForm(_))));
    }

    #[test]
    fn alpha_and_x_identities() {
        for p in [2u32, 3] {
            let cfg = ThetaConfig::standard(p, 2, 0).unwrap();
            let p2 = cfg.p2();
            let a0 = theta_alpha(&cfg).unwrap();
            assert!(a0.eq_to_precision(&(&p2 - &cfg.u).checked_div(&p2).unwrap()));
            for l in 0..=4 {
                let cfg = cfg.with_cutoff(l);
                assert_eq!(v(&theta_alpha(&cfg).unwrap()), Valu::int(0));
                assert!(theta_x(&cfg, &p2).unwrap().is_int(1));
                assert!(theta_x(&cfg, &cfg.fixed_point(1)).unwrap().is_exact_zero());
            }
            assert_eq!(theta_x(&cfg, &cfg.u).unwrap_err(), ThetaError::PoleAtOrbitPoint);
        }
    }

    #[test]
    fn alpha_converges() {
        // partial products are not monotone in L, but their tails shrink
        let cfg = ThetaConfig::standard(3, 2, 0).unwrap();
        let alphas: Vec<LaurentElem> = (0..=7).map(|l| theta_alpha(&cfg.with_cutoff(l)).unwrap()).collect();
        let tails: Vec<Valu> = (0..6)
            .map(|l| (l + 1..alphas.len()).map(|m| (&alphas[l] - &alphas[m]).valuation()).min().unwrap())
            .collect();
        assert!(tails.windows(2).all(|w| w[1] >= w[0]), "{:?}", tails);
        assert!(tails[5] > tails[0], "{:?}", tails);
    }

    #[test]
    fn x_is_nearly_invariant() {
        let cfg = ThetaConfig::standard(3, 1, 0).unwrap();
        let k = cfg.params().clone();
        let z = &LaurentElem::t_pow(&k, 1) + &LaurentElem::t_pow(&k, 3);
        let s2 = &cfg.group.gens[1].matrix;
        let sz = s2.apply_point(&P1Point::Finite(z.clone())).unwrap();
        let sz = sz.finite().unwrap().clone();
        let gaps: Vec<Valu> = (1..=4)
            .map(|l| {
                let c = cfg.with_cutoff(l);
                (&theta_x(&c, &sz).unwrap() - &theta_x(&c, &z).unwrap()).valuation()
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] >= w[0]), "{:?}", gaps);
        assert!(gaps[2] > gaps[0] && gaps[3] > gaps[1], "{:?}", gaps);
    }

    #[test]
    fn expansions() {
        for p in [2u32, 3] {
            let cfg = ThetaConfig::standard(p, 1, 3).unwrap();
            let e1 = expand_at(&cfg, 1, p as usize + 1).unwrap();
            assert!(e1.x_coeffs[0].is_zero());
            for n in 1..p as usize {
                assert!(e1.coeffs[n].is_zero());
            }
            assert!(!e1.x_coeffs[p as usize].is_zero());
            let e2 = expand_at(&cfg, 2, p as usize).unwrap();
            assert!(e2.x_coeffs[0].is_int(1) || (&e2.x_coeffs[0] - &LaurentElem::one(cfg.params())).val_pi_capped() >= 40);
            for n in 1..p as usize {
                assert!(e2.coeffs[n].val_pi_capped() >= 40, "{}", e2.coeffs[n]);
            }
        }
    }

    #[test]
    fn divided_difference_matches_series() {
        for p in [2u32, 3] {
            let cfg = ThetaConfig::standard(p, 2, 2).unwrap();
            for i in [1usize, 2] {
                let e = expand_at(&cfg, i, 2 * p as usize).unwrap();
                let dd = divided_difference(&cfg, i, p as usize, 6).unwrap();
                let xp = &e.x_coeffs[p as usize];
                let gap = (&dd - xp).valuation();
                let base = e.x_coeffs[p as usize + 1..].iter().map(|c| c.valuation()).min().unwrap();
                assert!(gap >= base + Valu::int(6), "i={} p={} gap {} base {}", i, p, gap, base);
            }
        }
    }

    #[test]
    fn bounds_formula() {
        let k = FieldParams::new(3, 1, 1).unwrap();
        let t = |n| LaurentElem::t_pow(&k, n);
        assert_eq!(lambda_bounds(&t(-2), &t(0), 3).unwrap(), (Valu::int(-4), Valu::int(6)));
        assert_eq!(lambda_bounds(&t(-1), &t(-1), 3).unwrap(), (Valu::int(1), Valu::int(0)));
        assert_eq!(lambda_bounds(&t(1), &t(0), 3).unwrap_err(), ThetaError::NonNegativeEtaValuation);
        let k2 = FieldParams::new(2, 1, 1).unwrap();
        let t2 = |n| LaurentElem::t_pow(&k2, n);
        assert_eq!(lambda_bounds(&t2(-1), &t2(0), 2).unwrap(), (Valu::int(-1), Valu::int(2)));
    }

    #[test]
    fn recovered_lambdas() {
        for p in [2u32, 3] {
            for d in 1..=3 {
                let cfg = ThetaConfig::standard(p, d, 3).unwrap();
                let rec = recover_lambda(&cfg).unwrap();
                assert!(rec.bounds_hold(), "p={} d={} {} {}", p, d, rec.lambda1, rec.lambda2);
                let sum = rec.lambda1.valuation() + rec.lambda2.valuation();
                assert!(sum >= Valu::int(d), "p={} d={} sum {}", p, d, sum);
            }
        }
    }

    #[test]
    fn round_trip_through_covering() {
        use crate::covering::run_suite;
        use crate::criterion::{evaluate, BranchData};
        for p in [2u32, 3] {
            for d in 1..=3 {
                let short = recover_lambda(&ThetaConfig::standard(p, d, 2).unwrap()).unwrap();
                let cfg = ThetaConfig::standard(p, d, 4).unwrap();
                let rec = recover_lambda(&cfg).unwrap();
                let (m2, m4) = (short.stability.unwrap(), rec.stability.unwrap());
                assert!(m4.0 > m2.0 && m4.1 > m2.1);
                let k = cfg.params();
                let bd = BranchData::new(vec![LaurentElem::zero(k), LaurentElem::one(k)], vec![rec.lambda1, rec.lambda2]).unwrap();
                assert!(evaluate(&bd).is_mumford);
                assert!(run_suite(&bd).unwrap().all_pass());
            }
        }
    }
}
