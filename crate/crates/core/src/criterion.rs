//! Branch data of `y^p − y = Σ λ_i/(x − a_i)` and the valuation criterion
//! `val λ_i + val λ_j > 2 val(a_i − a_j)` for every pair.

use crate::bt_tree::Moebius;
use crate::error::CriterionError;
use crate::valfield::{FieldParams, LaurentElem, Rational};

#[derive(Clone, Debug)]
pub struct BranchData {
    params: FieldParams,
    a: Vec<LaurentElem>,
    lambda: Vec<LaurentElem>,
}

impl BranchData {
    /// Validates distinct branch points and nonzero `λ_i`. The genus bound is
    /// checked by [`is_mumford`], not here.
    pub fn new(a: Vec<LaurentElem>, lambda: Vec<LaurentElem>) -> Result<Self, CriterionError> {
        if a.len() != lambda.len() {
            return Err(CriterionError::LengthMismatch);
        }
        if a.len() < 2 {
            return Err(CriterionError::TooFewBranchPoints);
        }
        let params = a[0].params().clone();
        if a.iter().chain(lambda.iter()).any(|x| x.params() != &params) {
            return Err(crate::error::FieldError::ParamsMismatch.into());
        }
        for (i, l) in lambda.iter().enumerate() {
            if l.is_zero() {
                return Err(CriterionError::ZeroLambda(i));
            }
        }
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if (&a[i] - &a[j]).is_zero() {
                    return Err(CriterionError::DuplicateBranchPoints(i, j));
                }
            }
        }
        Ok(BranchData { params, a, lambda })
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p()
    }

    pub fn r(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[LaurentElem] {
        &self.a
    }

    pub fn lambda(&self) -> &[LaurentElem] {
        &self.lambda
    }

    /// `val λ_i` in `t`-units.
    pub fn val_lambda(&self, i: usize) -> Rational {
        self.lambda[i].valuation().finite().expect("lambda is nonzero")
    }

    /// `val(a_i − a_j)` in `t`-units.
    pub fn val_diff(&self, i: usize, j: usize) -> Rational {
        (&self.a[i] - &self.a[j]).valuation().finite().expect("branch points are distinct")
    }

    /// `val λ_i + val λ_j − 2 val(a_i − a_j)`.
    pub fn margin(&self, i: usize, j: usize) -> Rational {
        self.val_lambda(i) + self.val_lambda(j) - self.val_diff(i, j) * 2
    }

    /// Same data with the pairs `(a_i, λ_i)` reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> BranchData {
        BranchData {
            params: self.params.clone(),
            a: perm.iter().map(|&i| self.a[i].clone()).collect(),
            lambda: perm.iter().map(|&i| self.lambda[i].clone()).collect(),
        }
    }
}

/// `(p − 1)(r − 1)`.
pub fn genus(p: u32, r: usize) -> u64 {
    (p as u64 - 1) * (r as u64).saturating_sub(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub is_mumford: bool,
    /// First violating pair `(i, j)`, `i < j`, 0-based.
    pub witness: Option<(usize, usize)>,
    /// `margins[i][j]`, `None` on the diagonal.
    pub margins: Vec<Vec<Option<Rational>>>,
}

/// The criterion without the genus restriction.
pub fn evaluate(bd: &BranchData) -> Verdict {
    let r = bd.r();
    let mut margins = vec![vec![None; r]; r];
    let mut witness = None;
    for i in 0..r {
        for j in 0..r {
            if i != j {
                margins[i][j] = Some(bd.margin(i, j));
            }
        }
    }
    'outer: for i in 0..r {
        for j in i + 1..r {
            if margins[i][j].unwrap() <= Rational::from_integer(0) {
                witness = Some((i, j));
                break 'outer;
            }
        }
    }
    Verdict { is_mumford: witness.is_none(), witness, margins }
}

pub fn is_mumford(bd: &BranchData) -> Result<Verdict, CriterionError> {
    let g = genus(bd.p(), bd.r());
    if g < 2 {
        return Err(CriterionError::GenusTooSmall(g));
    }
    Ok(evaluate(bd))
}

/// Rewrite the branch data in the coordinate `X = g(x)`. Returns the new data
/// and the constant `Σ λ_i d/(b − a_i d)` split off the right-hand side,
/// where `g⁻¹ = [[b, c], [d, e]]`.
pub fn moebius_transform(bd: &BranchData, g: &Moebius) -> Result<(BranchData, LaurentElem), CriterionError> {
    let ginv = g.inverse();
    let [b, c, d, e] = ginv.entries();
    let det = &(b * e) - &(c * d);
    let mut a2 = Vec::with_capacity(bd.r());
    let mut l2 = Vec::with_capacity(bd.r());
    let mut constant = LaurentElem::zero(bd.params());
    for i in 0..bd.r() {
        let ai = &bd.a[i];
        let li = &bd.lambda[i];
        let den = b - &(ai * d);
        if den.is_zero() {
            return Err(CriterionError::BranchPointSentToInfinity(i));
        }
        let num = &(ai * e) - c;
        a2.push(num.checked_div(&den)?);
        let den2 = &den * &den;
        l2.push((li * &det).checked_div(&den2)?);
        constant = &constant + &(li * d).checked_div(&den)?;
    }
    Ok((BranchData::new(a2, l2)?, constant))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> FieldParams {
        FieldParams::new(3, 1, 1).unwrap()
    }

    fn bd(_k: &FieldParams, a: &[LaurentElem], l: &[LaurentElem]) -> BranchData {
        BranchData::new(a.to_vec(), l.to_vec()).unwrap()
    }

    #[test]
    fn genus_values() {
        assert_eq!(genus(3, 3), 4);
        assert_eq!(genus(2, 3), 2);
        assert_eq!(genus(3, 2), 2);
    }

    #[test]
    fn verdict_examples() {
        let k = k3();
        let z = LaurentElem::zero(&k);
        let o = LaurentElem::one(&k);
        let t = LaurentElem::t_pow(&k, 1);
        let v = is_mumford(&bd(&k, &[z.clone(), o.clone()], &[t.clone(), t.clone()])).unwrap();
        assert!(v.is_mumford);
        assert_eq!(v.margins[0][1], Some(Rational::from_integer(2)));
        let v = is_mumford(&bd(&k, &[z.clone(), o.clone()], &[o.clone(), o.clone()])).unwrap();
        assert!(!v.is_mumford);
        assert_eq!(v.witness, Some((0, 1)));
        let t3 = LaurentElem::t_pow(&k, 3);
        let v = is_mumford(&bd(&k, &[z, o, t.clone()], &[t3.clone(), t3.clone(), t3])).unwrap();
        assert!(v.is_mumford);
        assert_eq!(v.margins[0][2], Some(Rational::from_integer(4)));
    }

    #[test]
    fn genus_guard_and_validation() {
        let k = FieldParams::new(2, 1, 1).unwrap();
        let z = LaurentElem::zero(&k);
        let o = LaurentElem::one(&k);
        let d = bd(&k, &[z.clone(), o.clone()], &[o.clone(), o.clone()]);
        assert_eq!(is_mumford(&d).unwrap_err(), CriterionError::GenusTooSmall(1));
        assert!(matches!(
            BranchData::new(vec![z.clone(), z.clone()], vec![o.clone(), o.clone()]),
            Err(CriterionError::DuplicateBranchPoints(0, 1))
        ));
        assert!(matches!(BranchData::new(vec![z, o.clone()], vec![o, LaurentElem::zero(&k)]), Err(CriterionError::ZeroLambda(1))));
    }

    #[test]
    fn transform_identity_and_scaling() {
        let k = k3();
        let z = LaurentElem::zero(&k);
        let o = LaurentElem::one(&k);
        let t = LaurentElem::t_pow(&k, 1);
        let d = bd(&k, &[z.clone(), o.clone()], &[t.clone(), t.clone()]);
        let (d2, c) = moebius_transform(&d, &Moebius::identity(&k)).unwrap();
        assert!(c.is_zero());
        for i in 0..2 {
            assert!(d2.a()[i].eq_to_precision(&d.a()[i]));
            assert!(d2.lambda()[i].eq_to_precision(&d.lambda()[i]));
        }
        let s = LaurentElem::t_pow(&k, -2);
        let (d3, c) = moebius_transform(&d, &Moebius::diag(s.clone()).unwrap()).unwrap();
        assert!(c.is_zero());
        for i in 0..2 {
            assert!(d3.a()[i].eq_to_precision(&(&s * &d.a()[i])));
            assert!(d3.lambda()[i].eq_to_precision(&(&s * &d.lambda()[i])));
        }
        assert_eq!(evaluate(&d3).margins, evaluate(&d).margins);
    }
}
