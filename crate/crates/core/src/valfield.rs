//! Truncated Laurent series over `F_{p^f}` in a uniformizer `π = t^{1/e}`.
//!
//! Valuations are normalized so that `val(π) = 1` internally; the public
//! [`Valu`] type reports them in `t`-units (a rational with denominator
//! dividing `e`), which is what stays invariant under [`extend_field`].
//! Absolute values are never materialized: `|x| < |y|` is always evaluated as
//! `val(x) > val(y)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::FieldError;
use crate::gf::{self, Gf};

pub type Rational = Ratio<i64>;

/// Relative precision (in `π`-units) used when an exact element has to be
/// inverted and the caller gave no explicit cap.
pub const DEFAULT_REL_PREC: i64 = 64;

/// The field `K = F_{p^f}((π))`, `π^e = t`.
#[derive(Clone)]
pub struct FieldParams {
    p: u32,
    f: u32,
    e: u32,
    gf: Arc<Gf>,
}

impl FieldParams {
    pub fn new(p: u32, f: u32, e: u32) -> Result<Self, FieldError> {
        if e == 0 {
            return Err(FieldError::BadRamification(e));
        }
        let gf = Gf::get(p, f)?;
        Ok(FieldParams { p, f, e, gf })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn residue_field(&self) -> &Gf {
        &self.gf
    }

    /// Convert a `t`-unit exponent into `π`-units, if it lies in the value group.
    pub fn to_pi_units(&self, v: Rational) -> Result<i64, FieldError> {
        let scaled = v * Rational::from_integer(self.e as i64);
        if scaled.is_integer() {
            Ok(scaled.to_integer())
        } else {
            Err(FieldError::ExponentNotInValueGroup {
                num: *v.numer(),
                den: *v.denom(),
                e: self.e,
            })
        }
    }

    pub fn to_t_units(&self, k: i64) -> Rational {
        Rational::new(k, self.e as i64)
    }
}

impl PartialEq for FieldParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.e == other.e
    }
}

impl Eq for FieldParams {}

impl fmt::Debug for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldParams(p={}, f={}, e={})", self.p, self.f, self.e)
    }
}

/// A valuation in `t`-units, or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valu {
    Finite(Rational),
    Infinity,
}

impl Valu {
    pub fn int(n: i64) -> Valu {
        Valu::Finite(Rational::from_integer(n))
    }

    pub fn finite(self) -> Option<Rational> {
        match self {
            Valu::Finite(r) => Some(r),
            Valu::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valu::Infinity)
    }
}

impl Add for Valu {
    type Output = Valu;
    fn add(self, rhs: Valu) -> Valu {
        match (self, rhs) {
            (Valu::Finite(a), Valu::Finite(b)) => Valu::Finite(a + b),
            _ => Valu::Infinity,
        }
    }
}

impl fmt::Display for Valu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valu::Finite(r) => write!(f, "{}", r),
            Valu::Infinity => write!(f, "inf"),
        }
    }
}

/// Element of `K` known modulo `π^prec` (`prec = None` means exact).
///
/// Stored densely: `coeffs[k]` is the coefficient of `π^(start + k)`. The first
/// and last stored coefficients are nonzero, and every stored exponent is
/// below `prec`.
#[derive(Clone)]
pub struct LaurentElem {
    params: FieldParams,
    start: i64,
    coeffs: Vec<u32>,
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn add_prec(a: Option<i64>, k: i64) -> Option<i64> {
    a.map(|x| x.saturating_add(k))
}

impl LaurentElem {
    fn normalized(params: FieldParams, start: i64, mut coeffs: Vec<u32>, prec: Option<i64>) -> Self {
        if let Some(p) = prec {
            let keep = (p - start).max(0) as usize;
            if coeffs.len() > keep {
                coeffs.truncate(keep);
            }
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|&c| c != 0);
        match lead {
            None => LaurentElem { params, start: 0, coeffs: Vec::new(), prec },
            Some(k) => {
                coeffs.drain(..k);
                LaurentElem { params, start: start + k as i64, coeffs, prec }
            }
        }
    }

    pub fn zero(params: &FieldParams) -> Self {
        LaurentElem { params: params.clone(), start: 0, coeffs: Vec::new(), prec: None }
    }

    /// Zero known only modulo `π^prec`.
    pub fn zero_to(params: &FieldParams, prec: i64) -> Self {
        LaurentElem { params: params.clone(), start: 0, coeffs: Vec::new(), prec: Some(prec) }
    }

    pub fn one(params: &FieldParams) -> Self {
        Self::from_int(params, 1)
    }

    pub fn from_int(params: &FieldParams, n: i64) -> Self {
        let c = params.gf.from_int(n);
        Self::monomial(params, c, 0)
    }

    /// Residue-field constant.
    pub fn constant(params: &FieldParams, c: u32) -> Self {
        Self::monomial(params, c, 0)
    }

    /// `c · π^k`, exact.
    pub fn monomial(params: &FieldParams, c: u32, k: i64) -> Self {
        Self::normalized(params.clone(), k, vec![c], None)
    }

    /// `t^n = π^(e n)`, exact.
    pub fn t_pow(params: &FieldParams, n: i64) -> Self {
        Self::monomial(params, 1, n * params.e as i64)
    }

    /// Build from `(π-exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(params: &FieldParams, terms: I, prec: Option<i64>) -> Result<Self, FieldError>
    where
        I: IntoIterator<Item = (i64, u32)>,
    {
        let terms: Vec<(i64, u32)> = terms.into_iter().collect();
        let q = params.gf.order();
        if let Some(&(_, c)) = terms.iter().find(|(_, c)| *c >= q) {
            return Err(FieldError::BadCoefficient(c));
        }
        if terms.is_empty() {
            return Ok(LaurentElem { params: params.clone(), start: 0, coeffs: Vec::new(), prec });
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![0u32; (hi - lo + 1) as usize];
        for (k, c) in terms {
            let slot = &mut coeffs[(k - lo) as usize];
            *slot = params.gf.add(*slot, c);
        }
        Ok(Self::normalized(params.clone(), lo, coeffs, prec))
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// Precision in `t`-units (`None` = exact).
    pub fn precision_t(&self) -> Option<Rational> {
        self.prec.map(|k| self.params.to_t_units(k))
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True when no nonzero coefficient is known (zero to precision).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Valuation in `π`-units, `None` if zero to precision.
    pub fn val_pi(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Lower bound for the valuation in `π`-units: exact for nonzero
    /// elements, the precision for zero-to-precision elements, `i64::MAX`
    /// for exact zero.
    pub fn val_pi_capped(&self) -> i64 {
        match (self.val_pi(), self.prec) {
            (Some(v), _) => v,
            (None, Some(p)) => p,
            (None, None) => i64::MAX,
        }
    }

    pub fn valuation(&self) -> Valu {
        match self.val_pi() {
            Some(v) => Valu::Finite(self.params.to_t_units(v)),
            None => Valu::Infinity,
        }
    }

    pub fn leading_coeff(&self) -> Option<u32> {
        self.coeffs.first().copied()
    }

    pub fn coeff(&self, k: i64) -> u32 {
        if k < self.start || k >= self.start + self.coeffs.len() as i64 {
            0
        } else {
            self.coeffs[(k - self.start) as usize]
        }
    }

    /// Nonzero terms as `(π-exponent, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(k, &c)| (self.start + k as i64, c))
    }

    /// Is this a single exact monomial?
    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.params == other.params {
            Ok(())
        } else {
            Err(FieldError::ParamsMismatch)
        }
    }

    /// Lower the precision to `cap` (never raises it).
    pub fn truncate(&self, cap: i64) -> Self {
        let prec = min_prec(self.prec, Some(cap));
        Self::normalized(self.params.clone(), self.start, self.coeffs.clone(), prec)
    }

    /// Reduce modulo `π^level` and record `level` as the precision.
    pub fn reduce_mod(&self, level: i64) -> Self {
        Self::normalized(self.params.clone(), self.start, self.coeffs.clone(), Some(level))
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let gf = &self.params.gf;
        let prec = min_prec(self.prec, other.prec);
        if other.coeffs.is_empty() {
            return self.truncate_opt(prec);
        }
        if self.coeffs.is_empty() {
            let o = if negate { other.neg_ref() } else { other.clone() };
            return o.truncate_opt(prec);
        }
        let lo = self.start.min(other.start);
        let mut hi = (self.start + self.coeffs.len() as i64).max(other.start + other.coeffs.len() as i64);
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        if hi <= lo {
            return LaurentElem { params: self.params.clone(), start: 0, coeffs: Vec::new(), prec };
        }
        let mut coeffs = vec![0u32; (hi - lo) as usize];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let idx = self.start + k as i64 - lo;
            if idx < coeffs.len() as i64 {
                coeffs[idx as usize] = c;
            }
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            let idx = other.start + k as i64 - lo;
            if idx < coeffs.len() as i64 {
                let slot = &mut coeffs[idx as usize];
                *slot = if negate { gf.sub(*slot, c) } else { gf.add(*slot, c) };
            }
        }
        Self::normalized(self.params.clone(), lo, coeffs, prec)
    }

    fn truncate_opt(&self, prec: Option<i64>) -> Self {
        match prec {
            Some(p) => self.truncate(p),
            None => self.clone(),
        }
    }

    fn neg_ref(&self) -> Self {
        let gf = &self.params.gf;
        LaurentElem {
            params: self.params.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|&c| gf.neg(c)).collect(),
            prec: self.prec,
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let gf = &self.params.gf;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(&self.params);
        }
        let vx = self.val_pi_capped();
        let vy = other.val_pi_capped();
        let prec = min_prec(
            other.prec.map(|p| p.saturating_add(vx)),
            self.prec.map(|p| p.saturating_add(vy)),
        );
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return LaurentElem { params: self.params.clone(), start: 0, coeffs: Vec::new(), prec };
        }
        let start = self.start + other.start;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - start).max(0) as usize);
        }
        let mut coeffs = vec![0u32; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 || i >= len {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                if b != 0 {
                    coeffs[k] = gf.add(coeffs[k], gf.mul(a, b));
                }
            }
        }
        Self::normalized(self.params.clone(), start, coeffs, prec)
    }

    /// Multiply by a residue-field scalar.
    pub fn scale(&self, c: u32) -> Self {
        let gf = &self.params.gf;
        if c == 0 {
            return LaurentElem { params: self.params.clone(), start: 0, coeffs: Vec::new(), prec: None };
        }
        LaurentElem {
            params: self.params.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|&a| gf.mul(a, c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by `π^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentElem {
            params: self.params.clone(),
            start: self.start + k,
            coeffs: self.coeffs.clone(),
            prec: add_prec(self.prec, k),
        }
    }

    /// Inverse with at most `rel` relative precision (fewer if `self` is
    /// itself known to less).
    pub fn inv_rel(&self, rel: i64) -> Result<Self, FieldError> {
        let gf = &self.params.gf;
        let Some(v) = self.val_pi() else {
            return Err(FieldError::DivisionByZeroToPrecision);
        };
        let c0inv = gf.inv(self.coeffs[0]).expect("leading coefficient is nonzero");
        if self.coeffs.len() == 1 && self.prec.is_none() {
            return Ok(Self::monomial(&self.params, c0inv, -v));
        }
        let avail = self.prec.map(|p| p - v);
        let r = match avail {
            Some(a) => a.min(rel),
            None => rel,
        }
        .max(1) as usize;
        // normalized unit u = self / (c0 π^v), w = 1/u
        let u: Vec<u32> = self.coeffs.iter().take(r).map(|&c| gf.mul(c, c0inv)).collect();
        let mut w = vec![0u32; r];
        w[0] = 1;
        for k in 1..r {
            let mut acc = 0u32;
            for j in 1..=k.min(u.len() - 1) {
                if u[j] != 0 && w[k - j] != 0 {
                    acc = gf.add(acc, gf.mul(u[j], w[k - j]));
                }
            }
            w[k] = gf.neg(acc);
        }
        let coeffs: Vec<u32> = w.into_iter().map(|c| gf.mul(c, c0inv)).collect();
        Ok(Self::normalized(self.params.clone(), -v, coeffs, Some(-v + r as i64)))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        self.inv_rel(DEFAULT_REL_PREC)
    }

    /// `self / other` with the default relative precision for exact divisors.
    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        if self.is_exact_zero() {
            if other.is_zero() {
                return Err(FieldError::DivisionByZeroToPrecision);
            }
            return Ok(Self::zero(&self.params));
        }
        let inv = other.inv()?;
        Ok(self.mul_ref(&inv))
    }

    /// `self / other`, computing just enough of the inverse for the quotient
    /// to be known modulo `π^cap` (when the operands allow it).
    pub fn div_to(&self, other: &Self, cap: i64) -> Result<Self, FieldError> {
        self.check(other)?;
        let Some(vy) = other.val_pi() else {
            return Err(FieldError::DivisionByZeroToPrecision);
        };
        if self.is_exact_zero() {
            return Ok(Self::zero(&self.params));
        }
        let vx = self.val_pi_capped();
        let rel = cap.saturating_sub(vx).saturating_add(vy).max(1);
        let inv = other.inv_rel(rel)?;
        Ok(self.mul_ref(&inv).truncate(cap))
    }

    /// Integer power; negative exponents go through [`LaurentElem::inv`].
    pub fn pow(&self, n: i64) -> Result<Self, FieldError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one(&self.params);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul_ref(&sq);
            }
        }
        Ok(acc)
    }

    /// `x ↦ x^p`, exact on coefficients; precision scales by `p`.
    pub fn frobenius(&self) -> Self {
        let gf = &self.params.gf;
        let p = self.params.p as i64;
        let terms = self.terms().map(|(k, c)| (k * p, gf.frobenius(c)));
        Self::from_terms(&self.params, terms, self.prec.map(|x| x.saturating_mul(p)))
            .expect("frobenius keeps coefficients in range")
    }

    /// Inverse Frobenius; requires every exponent to be divisible by `p`.
    pub fn pth_root(&self) -> Option<Self> {
        let gf = &self.params.gf;
        let p = self.params.p as i64;
        if self.terms().any(|(k, _)| k.rem_euclid(p) != 0) {
            return None;
        }
        let terms = self.terms().map(|(k, c)| (k / p, gf.pth_root(c)));
        let prec = self.prec.map(|x| x.div_euclid(p) + i64::from(x.rem_euclid(p) != 0));
        Some(Self::from_terms(&self.params, terms, prec).expect("in range"))
    }

    /// Equal modulo the smaller of the two precisions.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.params == other.params && (self - other).is_zero()
    }

    /// `self` equals the integer `n` modulo its precision.
    pub fn is_int(&self, n: i64) -> bool {
        (self - &Self::from_int(&self.params, n)).is_zero()
    }
}

impl fmt::Debug for LaurentElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LaurentElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gf = &self.params.gf;
        let e = self.params.e as i64;
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.terms() {
            let coef = coeff_string(gf, c);
            let exp = Rational::new(k, e);
            let mono = if exp.is_zero() {
                String::new()
            } else if exp == Rational::from_integer(1) {
                "t".to_string()
            } else if exp.is_integer() {
                format!("t^{}", exp)
            } else {
                format!("t^({})", exp)
            };
            parts.push(match (coef.as_str(), mono.is_empty()) {
                (_, true) => coef,
                ("1", false) => mono,
                (_, false) => format!("{}*{}", coef, mono),
            });
        }
        if let Some(p) = self.prec {
            let exp = Rational::new(p, e);
            if exp.is_integer() {
                parts.push(format!("O(t^{})", exp));
            } else {
                parts.push(format!("O(t^({}))", exp));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn coeff_string(gf: &Gf, c: u32) -> String {
    if gf.degree() == 1 {
        return c.to_string();
    }
    let ds = gf.to_digits(c);
    let mut monos = Vec::new();
    for (k, &d) in ds.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let m = match k {
            0 => d.to_string(),
            1 if d == 1 => "z".to_string(),
            1 => format!("{}*z", d),
            _ if d == 1 => format!("z^{}", k),
            _ => format!("{}*z^{}", d, k),
        };
        monos.push(m);
    }
    if monos.len() == 1 {
        monos.pop().unwrap()
    } else {
        format!("({})", monos.join("+"))
    }
}

impl<'a> Add<&'a LaurentElem> for &'a LaurentElem {
    type Output = LaurentElem;
    fn add(self, rhs: &'a LaurentElem) -> LaurentElem {
        assert!(self.params == rhs.params, "{}", FieldError::ParamsMismatch);
        self.combine(rhs, false)
    }
}

impl<'a> Sub<&'a LaurentElem> for &'a LaurentElem {
    type Output = LaurentElem;
    fn sub(self, rhs: &'a LaurentElem) -> LaurentElem {
        assert!(self.params == rhs.params, "{}", FieldError::ParamsMismatch);
        self.combine(rhs, true)
    }
}

impl<'a> Mul<&'a LaurentElem> for &'a LaurentElem {
    type Output = LaurentElem;
    fn mul(self, rhs: &'a LaurentElem) -> LaurentElem {
        assert!(self.params == rhs.params, "{}", FieldError::ParamsMismatch);
        self.mul_ref(rhs)
    }
}

impl Neg for &LaurentElem {
    type Output = LaurentElem;
    fn neg(self) -> LaurentElem {
        self.neg_ref()
    }
}

impl PartialEq for LaurentElem {
    /// Representational equality: same field, same known terms, same precision.
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.start == other.start
            && self.coeffs == other.coeffs
            && self.prec == other.prec
    }
}

impl Eq for LaurentElem {}

impl std::hash::Hash for LaurentElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.params.p, self.params.f, self.params.e).hash(state);
        self.start.hash(state);
        self.coeffs.hash(state);
        self.prec.hash(state);
    }
}

/// Operation selector for [`laurent_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Second operand of [`laurent_arith`]: another element, or an integer
/// exponent for `Pow`.
pub enum Operand<'a> {
    Elem(&'a LaurentElem),
    Int(i64),
}

pub fn laurent_arith(kind: ArithKind, x: &LaurentElem, y: Operand<'_>) -> Result<LaurentElem, FieldError> {
    match (kind, y) {
        (ArithKind::Pow, Operand::Int(n)) => x.pow(n),
        (ArithKind::Pow, Operand::Elem(_)) => Err(FieldError::ParamsMismatch),
        (k, Operand::Int(n)) => {
            let y = LaurentElem::from_int(&x.params, n);
            laurent_arith(k, x, Operand::Elem(&y))
        }
        (k, Operand::Elem(y)) => {
            x.check(y)?;
            match k {
                ArithKind::Add => Ok(x + y),
                ArithKind::Sub => Ok(x - y),
                ArithKind::Mul => Ok(x * y),
                ArithKind::Div => x.checked_div(y),
                ArithKind::Pow => unreachable!(),
            }
        }
    }
}

/// Outcome of [`artin_schreier_solve`].
#[derive(Clone, Debug, PartialEq)]
pub enum ArtinSchreier {
    Solved(LaurentElem),
    /// The smallest extension (ramification `e′`, residue degree `f′`) the
    /// leading-term analysis asks for.
    ExtensionRequired { ramification: u32, residue_degree: u32 },
}

/// Solve `y^p - y = c`. Exact inputs are solved modulo `π^DEFAULT_REL_PREC`
/// past their valuation; see [`artin_schreier_solve_to`].
pub fn artin_schreier_solve(c: &LaurentElem) -> ArtinSchreier {
    let cap = match c.prec {
        Some(p) => p,
        None => c.val_pi().unwrap_or(0).max(0) + DEFAULT_REL_PREC,
    };
    artin_schreier_solve_to(c, cap)
}

pub fn artin_schreier_solve_to(c: &LaurentElem, cap: i64) -> ArtinSchreier {
    let params = c.params.clone();
    let gf = &params.gf;
    let p = params.p as i64;
    let mut rem = c.truncate(cap);
    let mut y = LaurentElem::zero(&params);

    // polar part: peel leading terms that are p-th powers
    while let Some(v) = rem.val_pi().filter(|&v| v < 0) {
        if v % p != 0 {
            return ArtinSchreier::ExtensionRequired { ramification: params.p, residue_degree: 1 };
        }
        let rho = gf.pth_root(rem.coeffs[0]);
        let term = LaurentElem::monomial(&params, rho, v / p);
        let image = &term.frobenius() - &term;
        rem = &rem - &image;
        y = &y + &term;
    }

    // constant term: residue equation
    let c0 = rem.coeff(0);
    if c0 != 0 {
        match gf.artin_schreier_root(c0) {
            Some(y0) => {
                let term = LaurentElem::constant(&params, y0);
                let image = &term.frobenius() - &term;
                rem = &rem - &image;
                y = &y + &term;
            }
            None => {
                return ArtinSchreier::ExtensionRequired { ramification: 1, residue_degree: params.p };
            }
        }
    }

    // positive part: y = -Σ rem^{p^k}
    let mut acc = LaurentElem::zero_to(&params, cap);
    let mut power = rem;
    while !power.is_zero() && power.val_pi_capped() < cap {
        acc = &acc - &power;
        power = power.frobenius().truncate(cap);
    }
    ArtinSchreier::Solved((&y + &acc).truncate(cap))
}

/// Re-express `x` over `F_{p^{f f′}}((t^{1/(e e′)}))`.
pub fn extend_field(x: &LaurentElem, e_ext: u32, f_ext: u32) -> Result<LaurentElem, FieldError> {
    if e_ext == 0 {
        return Err(FieldError::BadRamification(e_ext));
    }
    if f_ext == 0 {
        return Err(FieldError::BadDegree(f_ext));
    }
    let small = &x.params;
    let big = FieldParams::new(small.p, small.f * f_ext, small.e * e_ext)?;
    let scale = e_ext as i64;
    let terms: Vec<(i64, u32)> = x
        .terms()
        .map(|(k, c)| (k * scale, gf::embed(&small.gf, &big.gf, c).expect("subfield embedding exists")))
        .collect();
    LaurentElem::from_terms(&big, terms, x.prec.map(|p| p * scale))
}

/// Compare two valuations as absolute values: `Less` means `|x| < |y|`.
pub fn cmp_abs(x: Valu, y: Valu) -> Ordering {
    y.cmp(&x)
}

/// Floor of a rational.
pub fn floor_rat(r: Rational) -> i64 {
    r.floor().to_integer()
}

pub fn ceil_rat(r: Rational) -> i64 {
    r.ceil().to_integer()
}

pub fn abs_rat(r: Rational) -> Rational {
    r.abs()
}
