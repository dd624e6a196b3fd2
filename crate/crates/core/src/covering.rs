//! Affinoid covering of the line adapted to branch data, and the shape of the
//! residue ring of the cover over each piece.
//!
//! Radii are tracked as exponents: `Radius::Pow(v)` is `|t|^v`, so a larger
//! exponent is a smaller radius. A piece is a closed ball with finitely many
//! open holes; whether a point lies in a piece only depends on the tuple of
//! its distances to the branch points.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use crate::criterion::{evaluate, BranchData};
use crate::error::CoveringError;
use crate::gf::Gf;
use crate::valfield::{artin_schreier_solve, ArtinSchreier, LaurentElem, Rational, Valu};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Radius {
    Zero,
    /// `|t|^v`.
    Pow(Rational),
    Infinite,
}

impl Ord for Radius {
    fn cmp(&self, other: &Self) -> Ordering {
        use Radius::*;
        match (self, other) {
            (Zero, Zero) | (Infinite, Infinite) => Ordering::Equal,
            (Zero, _) | (_, Infinite) => Ordering::Less,
            (_, Zero) | (Infinite, _) => Ordering::Greater,
            (Pow(a), Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Radius {
    pub fn one() -> Radius {
        Radius::Pow(Rational::zero())
    }

    /// `|x|` for an element of valuation `v`.
    pub fn of_val(v: Valu) -> Radius {
        match v {
            Valu::Finite(r) => Radius::Pow(r),
            Valu::Infinity => Radius::Zero,
        }
    }

    pub fn of(x: &LaurentElem) -> Radius {
        Radius::of_val(x.valuation())
    }

    /// Valuation form; `None` for the infinite radius.
    pub fn to_valu(self) -> Option<Valu> {
        match self {
            Radius::Zero => Some(Valu::Infinity),
            Radius::Pow(v) => Some(Valu::Finite(v)),
            Radius::Infinite => None,
        }
    }

    pub fn exponent(self) -> Option<Rational> {
        match self {
            Radius::Pow(v) => Some(v),
            _ => None,
        }
    }

    /// Product of radii. `0 · ∞` does not occur in the construction and is
    /// treated as `0`.
    pub fn mul(self, other: Radius) -> Radius {
        use Radius::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Infinite, _) | (_, Infinite) => Infinite,
            (Pow(a), Pow(b)) => Pow(a + b),
        }
    }

    pub fn inv(self) -> Radius {
        match self {
            Radius::Zero => Radius::Infinite,
            Radius::Infinite => Radius::Zero,
            Radius::Pow(v) => Radius::Pow(-v),
        }
    }

    pub fn div(self, other: Radius) -> Radius {
        self.mul(other.inv())
    }

    /// A radius strictly between `self < other`.
    pub fn between(self, other: Radius) -> Radius {
        use Radius::*;
        match (self, other) {
            (Zero, Pow(v)) => Pow(v + 1),
            (Pow(a), Pow(b)) => Pow((a + b) / 2),
            (Pow(a), Infinite) => Pow(a - 1),
            _ => Pow(Rational::zero()),
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Zero => write!(f, "0"),
            Radius::Infinite => write!(f, "inf"),
            Radius::Pow(v) if v.is_integer() => write!(f, "|t|^{}", v),
            Radius::Pow(v) => write!(f, "|t|^({})", v),
        }
    }
}

/// Where a threshold comes from. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Epsilon,
    Lambda,
    /// `|a_i − a_j|`.
    Diff(usize),
    /// `|a_i − a_j|² / |λ_j|`.
    Quotient(usize),
    /// Geometric mean of `|λ_i|` and the quotient for `j`.
    Midpoint(usize),
    /// Geometric mean of `|a_i − a_j| < |a_i − a_k|`.
    Gap(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdEntry {
    pub exp: Rational,
    pub tags: Vec<Tag>,
}

#[derive(Clone, Debug)]
pub struct ThresholdTable {
    /// Row `i` lists the finite thresholds for `a_i` by increasing radius.
    pub rows: Vec<Vec<ThresholdEntry>>,
    /// Ramification over the base field that makes every entry a value of
    /// the field.
    pub ramification: u32,
}

impl ThresholdTable {
    /// Number of annuli around `a_i`.
    pub fn m(&self, i: usize) -> usize {
        self.rows[i].len() + 1
    }

    /// `α_{i,k}` for `0 ≤ k ≤ M_i`.
    pub fn alpha(&self, i: usize, k: usize) -> Radius {
        if k == 0 {
            Radius::Zero
        } else if k == self.m(i) {
            Radius::Infinite
        } else {
            Radius::Pow(self.rows[i][k - 1].exp)
        }
    }

    fn exps(&self, i: usize, tag: impl Fn(&Tag) -> bool) -> Option<Rational> {
        self.rows[i].iter().find(|e| e.tags.iter().any(&tag)).map(|e| e.exp)
    }

    /// `|λ_i| < T_{i,j} < |a_i − a_j|²/|λ_j|` for every ordered pair.
    pub fn separation_holds(&self, bd: &BranchData) -> bool {
        let r = bd.r();
        (0..r).all(|i| {
            (0..r).filter(|&j| j != i).all(|j| {
                let Some(t) = self.exps(i, |g| *g == Tag::Midpoint(j)) else {
                    return false;
                };
                let q = bd.val_diff(i, j) * 2 - bd.val_lambda(j);
                bd.val_lambda(i) > t && t > q
            })
        })
    }
}

pub fn build_thresholds(bd: &BranchData) -> Result<ThresholdTable, CoveringError> {
    let verdict = evaluate(bd);
    if let Some((i, j)) = verdict.witness {
        return Err(CoveringError::CriterionViolated(i, j));
    }
    Ok(build_thresholds_unchecked(bd))
}

/// The same table without the criterion guard, so that the downstream checks
/// can be watched failing on bad input.
pub fn build_thresholds_unchecked(bd: &BranchData) -> ThresholdTable {
    let r = bd.r();
    let e = bd.params().e() as i64;
    let mut rows = Vec::with_capacity(r);
    let mut ramification = bd.params().e();
    for i in 0..r {
        let mut raw: Vec<(Rational, Tag)> = vec![(bd.val_lambda(i), Tag::Lambda)];
        for j in (0..r).filter(|&j| j != i) {
            let d = bd.val_diff(i, j);
            let q = d * 2 - bd.val_lambda(j);
            raw.push((d, Tag::Diff(j)));
            raw.push((q, Tag::Quotient(j)));
            raw.push(((bd.val_lambda(i) + q) / 2, Tag::Midpoint(j)));
            for k in (0..r).filter(|&k| k != i) {
                let dk = bd.val_diff(i, k);
                if d > dk {
                    raw.push(((d + dk) / 2, Tag::Gap(j, k)));
                }
            }
        }
        let top = raw.iter().map(|x| x.0).max().expect("row is nonempty");
        raw.push((top + 1, Tag::Epsilon));
        raw.sort_by(|x, y| y.0.cmp(&x.0));
        let mut row: Vec<ThresholdEntry> = Vec::new();
        for (exp, tag) in raw {
            match row.last_mut() {
                Some(last) if last.exp == exp => last.tags.push(tag),
                _ => row.push(ThresholdEntry { exp, tags: vec![tag] }),
            }
        }
        if row.iter().any(|x| (x.exp * e).denom() != &1) {
            ramification = bd.params().e() * 2;
        }
        rows.push(row);
    }
    ThresholdTable { rows, ramification }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hole {
    pub index: usize,
    pub center: LaurentElem,
    /// Open radius; `Zero` only for the hole at the piece center, meaning the
    /// center itself belongs to the piece.
    pub radius: Radius,
}

/// `{ |x − d₀| ≤ β } ∖ ⋃ { |x − d_ν| < ρ_ν }` with `holes[0]` centered at `d₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub index: Vec<usize>,
    /// Defining annuli `α_{i,n_i} ≤ |x − a_i| ≤ α_{i,n_i+1}`.
    pub bounds: Vec<(Radius, Radius)>,
    pub center_index: usize,
    pub center: LaurentElem,
    pub outer: Radius,
    pub holes: Vec<Hole>,
}

impl Piece {
    /// `|b₁|`, the radius of the hole at the center.
    pub fn b1(&self) -> Radius {
        self.holes[0].radius
    }

    /// `|b₂| = β`.
    pub fn b2(&self) -> Radius {
        self.outer
    }

    /// Membership from the defining annuli, given `|x − a_i|` for all `i`.
    pub fn admits(&self, dists: &[Radius]) -> bool {
        self.bounds.iter().zip(dists).all(|((lo, hi), d)| lo <= d && d <= hi)
    }

    /// Membership from the normal form.
    pub fn contains(&self, x: &LaurentElem) -> bool {
        if Radius::of(&(x - &self.center)) > self.outer {
            return false;
        }
        !self.holes.iter().any(|h| Radius::of(&(x - &h.center)) < h.radius)
    }

    /// Violations of the normal-form shape; empty when the piece is a ball
    /// with disjoint holes sitting at distance `|b₁|` or `|b₂|` from the center.
    pub fn normal_form_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let b1 = self.b1();
        for (k, h) in self.holes.iter().enumerate() {
            if h.radius > self.outer {
                out.push(format!("hole {} is larger than the outer ball", k));
            }
            if k == 0 {
                continue;
            }
            let dk = Radius::of(&(&h.center - &self.center));
            if dk > self.outer {
                out.push(format!("hole {} lies outside the outer ball", k));
            }
            if h.radius != dk {
                out.push(format!("hole {} has radius {} but sits at distance {}", k, h.radius, dk));
            }
            if dk != b1 && dk != self.outer {
                out.push(format!("hole {} sits at distance {} (neither b1 nor b2)", k, dk));
            }
            for (l, g) in self.holes.iter().enumerate().take(k) {
                let d = Radius::of(&(&h.center - &g.center));
                if d < h.radius.max(g.radius) {
                    out.push(format!("holes {} and {} overlap", l, k));
                }
            }
        }
        out
    }
}

fn dist_ij(bd: &BranchData, i: usize, j: usize) -> Radius {
    Radius::Pow(bd.val_diff(i, j))
}

/// Index tuples `n` whose pairwise boundary coincidences are allowed.
pub fn in_j(tt: &ThresholdTable, bd: &BranchData, n: &[usize]) -> bool {
    let r = bd.r();
    for i in 0..r {
        for j in (0..r).filter(|&j| j != i) {
            let d = dist_ij(bd, i, j);
            if d == tt.alpha(i, n[i] + 1) && d == tt.alpha(j, n[j] + 1) {
                return false;
            }
        }
    }
    true
}

/// Intersect the annuli of `n` by ball calculus. `None` when empty.
pub fn build_piece(tt: &ThresholdTable, bd: &BranchData, n: &[usize]) -> Option<Piece> {
    let r = bd.r();
    let bounds: Vec<(Radius, Radius)> = (0..r).map(|i| (tt.alpha(i, n[i]), tt.alpha(i, n[i] + 1))).collect();
    let (l, beta) = (0..r).map(|i| (i, bounds[i].1)).min_by(|x, y| x.1.cmp(&y.1)).expect("r >= 2");
    let mut inside = Vec::new();
    for j in 0..r {
        let d = if j == l { Radius::Zero } else { dist_ij(bd, l, j) };
        if d > bounds[j].1 {
            return None;
        }
        if d <= beta {
            if bounds[j].0 > beta {
                return None;
            }
            inside.push(j);
        } else if d < bounds[j].0 {
            return None;
        }
    }
    // drop holes swallowed by bigger (or equal, lower-index) holes
    let survives = |j: usize| {
        !inside.iter().any(|&k| {
            k != j
                && bounds[k].0 > Radius::Zero
                && dist_ij(bd, j, k) < bounds[k].0
                && (bounds[j].0 < bounds[k].0 || (bounds[j].0 == bounds[k].0 && k < j))
        })
    };
    let kept: Vec<usize> = inside.iter().copied().filter(|&j| survives(j)).collect();
    let l0 = *kept.iter().min_by(|&&x, &&y| bounds[x].0.cmp(&bounds[y].0).then(x.cmp(&y)))?;
    let mut holes = vec![Hole { index: l0, center: bd.a()[l0].clone(), radius: bounds[l0].0 }];
    for &j in kept.iter().filter(|&&j| j != l0) {
        holes.push(Hole { index: j, center: bd.a()[j].clone(), radius: bounds[j].0 });
    }
    Some(Piece {
        index: n.to_vec(),
        bounds,
        center_index: l0,
        center: bd.a()[l0].clone(),
        outer: beta,
        holes,
    })
}

fn for_each_index(tt: &ThresholdTable, r: usize, mut f: impl FnMut(&[usize])) {
    let mut n = vec![0usize; r];
    loop {
        f(&n);
        let mut k = 0;
        loop {
            if k == r {
                return;
            }
            n[k] += 1;
            if n[k] < tt.m(k) {
                break;
            }
            n[k] = 0;
            k += 1;
        }
    }
}

/// The nonempty pieces with index in `J`, in lexicographic order of `n`
/// (last coordinate slowest).
pub fn enumerate_pieces(tt: &ThresholdTable, bd: &BranchData) -> Vec<Piece> {
    let mut out = Vec::new();
    for_each_index(tt, bd.r(), |n| {
        if in_j(tt, bd, n) {
            if let Some(piece) = build_piece(tt, bd, n) {
                out.push(piece);
            }
        }
    });
    out
}

/// Every index tuple in `J`, empty or not.
pub fn j_indices(tt: &ThresholdTable, bd: &BranchData) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_index(tt, bd.r(), |n| {
        if in_j(tt, bd, n) {
            out.push(n.to_vec());
        }
    });
    out
}

/// Points nearest to `a_j` at distance `ρ` have `|x − a_i| = max(ρ, |a_i − a_j|)`.
/// Returns the closed range of `ρ` for which this lies in the annuli `bounds`.
pub fn branch_interval(bounds: &[(Radius, Radius)], bd: &BranchData, j: usize) -> Option<(Radius, Radius)> {
    let (mut lo, mut hi) = (Radius::Zero, Radius::Infinite);
    for (i, &(l, h)) in bounds.iter().enumerate() {
        if i == j {
            lo = lo.max(l);
            hi = hi.min(h);
            continue;
        }
        let d = dist_ij(bd, i, j);
        if d > h {
            return None;
        } else if d < l {
            lo = lo.max(l);
            hi = hi.min(h);
        } else {
            hi = hi.min(h);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Distance tuple of the point at distance `ρ` from `a_j` on its branch.
pub fn branch_tuple(bd: &BranchData, j: usize, rho: Radius) -> Vec<Radius> {
    (0..bd.r()).map(|i| if i == j { rho } else { rho.max(dist_ij(bd, i, j)) }).collect()
}

#[derive(Clone, Debug)]
pub struct CoverCertificate {
    /// Per branch point `j`: consecutive closed ranges of `ρ` from `0` to
    /// `∞`, each with the index of a piece covering it.
    pub branches: Vec<Vec<(Radius, Radius, usize)>>,
}

pub fn verify_cover(pieces: &[Piece], bd: &BranchData) -> Result<CoverCertificate, CoveringError> {
    let r = bd.r();
    let mut branches = Vec::with_capacity(r);
    for j in 0..r {
        let mut ivs: Vec<(Radius, Radius, usize)> = pieces
            .iter()
            .enumerate()
            .filter_map(|(k, pc)| branch_interval(&pc.bounds, bd, j).map(|(lo, hi)| (lo, hi, k)))
            .collect();
        ivs.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
        let mut chain: Vec<(Radius, Radius, usize)> = Vec::new();
        let mut reach: Option<Radius> = None;
        let gap = |from: Option<Radius>, to: Radius| {
            let rho = match from {
                None => Radius::Zero,
                Some(f) => f.between(to),
            };
            let tuple = branch_tuple(bd, j, rho).into_iter().map(|x| x.to_valu().unwrap_or(Valu::Infinity)).collect();
            CoveringError::NotCovering { tuple }
        };
        for (lo, hi, k) in ivs {
            match reach {
                None if lo > Radius::Zero => return Err(gap(None, lo)),
                Some(rc) if lo > rc => return Err(gap(Some(rc), lo)),
                Some(rc) if hi <= rc => continue,
                _ => {}
            }
            chain.push((lo, hi, k));
            reach = Some(hi);
        }
        match reach {
            Some(Radius::Infinite) => {}
            other => return Err(gap(other, Radius::Infinite)),
        }
        branches.push(chain);
    }
    Ok(CoverCertificate { branches })
}

/// `inf_{u ∈ piece} |a − u|` in valuation form (`Infinity` when `a` lies in
/// the piece).
pub fn dist_to_piece(a: &LaurentElem, piece: &Piece) -> Valu {
    let d0 = Radius::of(&(a - &piece.center));
    if d0 > piece.outer {
        return d0.to_valu().expect("finite distance");
    }
    for h in &piece.holes {
        if Radius::of(&(a - &h.center)) < h.radius {
            return h.radius.to_valu().expect("holes are bounded");
        }
    }
    Valu::Infinity
}

/// `sup_{u ∈ piece} |a − u|`.
pub fn sup_dist(a: &LaurentElem, piece: &Piece) -> Radius {
    Radius::of(&(a - &piece.center)).max(piece.outer)
}

/// `|z_i|_sp` for `z_i = λ_i/(x − a_i)` on the piece; `Infinite` when `a_i`
/// lies in the piece.
pub fn sup_norm_zi(piece: &Piece, bd: &BranchData, i: usize) -> Radius {
    let d = Radius::of_val(dist_to_piece(&bd.a()[i], piece));
    Radius::of(&bd.lambda()[i]).div(d)
}

/// Leading term of a scalar in the completed algebraic closure, enough to
/// read off absolute values and residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lead {
    Zero,
    Term { val: Rational, coeff: u32 },
    Infinite,
}

impl Lead {
    pub fn of(x: &LaurentElem) -> Lead {
        match (x.valuation(), x.leading_coeff()) {
            (Valu::Finite(val), Some(coeff)) => Lead::Term { val, coeff },
            _ => Lead::Zero,
        }
    }

    /// `t^v` viewed as the pure power of that radius.
    pub fn of_radius(r: Radius) -> Lead {
        match r {
            Radius::Zero => Lead::Zero,
            Radius::Infinite => Lead::Infinite,
            Radius::Pow(val) => Lead::Term { val, coeff: 1 },
        }
    }

    pub fn radius(self) -> Radius {
        match self {
            Lead::Zero => Radius::Zero,
            Lead::Infinite => Radius::Infinite,
            Lead::Term { val, .. } => Radius::Pow(val),
        }
    }

    pub fn mul(self, other: Lead, k: &Gf) -> Lead {
        match (self, other) {
            (Lead::Zero, _) | (_, Lead::Zero) => Lead::Zero,
            (Lead::Infinite, _) | (_, Lead::Infinite) => Lead::Infinite,
            (Lead::Term { val: a, coeff: c }, Lead::Term { val: b, coeff: d }) => {
                Lead::Term { val: a + b, coeff: k.mul(c, d) }
            }
        }
    }

    pub fn inv(self, k: &Gf) -> Lead {
        match self {
            Lead::Zero => Lead::Infinite,
            Lead::Infinite => Lead::Zero,
            Lead::Term { val, coeff } => Lead::Term { val: -val, coeff: k.inv(coeff).expect("nonzero") },
        }
    }

    pub fn div(self, other: Lead, k: &Gf) -> Lead {
        self.mul(other.inv(k), k)
    }

    /// Residue class for `|x| ≤ 1`, `None` otherwise.
    pub fn residue(self) -> Option<u32> {
        match self {
            Lead::Zero => Some(0),
            Lead::Infinite => None,
            Lead::Term { val, coeff } => match val.cmp(&Rational::zero()) {
                Ordering::Less => None,
                Ordering::Equal => Some(coeff),
                Ordering::Greater => Some(0),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionCase {
    LambdaEmpty,
    /// `|b₁′| ≤ |b₂′| ≤ 1`.
    SmallB2,
    /// `1 ≤ |b₁′| ≤ |b₂′|`.
    BigB1,
    /// `|b₁′| < 1 < |b₂′|`; never produced by a criterion-satisfying input.
    Straddling,
}

/// Shape of the residue ring; the `u32` payloads are residues in `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingShape {
    /// `p` disjoint copies of the reduction of the piece. The payload is the
    /// residue `c` of the piece's annulus `st = c`; `None` for a disc.
    SplitSheets(Option<u32>),
    /// `t(y′^p − y′) = 0`.
    NodalSplit,
    /// `t(y′^p − y′) = c` with `c ≠ 0`.
    RationalGraph(u32),
    /// `y″w = 0`.
    NodePair,
    /// `y″w = c` with `c ≠ 0`.
    SmoothGm(u32),
    /// A localization of `k[w]`.
    Line,
}

impl RingShape {
    pub fn name(&self) -> &'static str {
        match self {
            RingShape::SplitSheets(_) => "SPLIT_SHEETS",
            RingShape::NodalSplit => "NODAL_SPLIT",
            RingShape::RationalGraph(_) => "RATIONAL_GRAPH",
            RingShape::NodePair => "NODE_PAIR",
            RingShape::SmoothGm(_) => "SMOOTH_GM",
            RingShape::Line => "LINE",
        }
    }
}

/// Plane curve `A(Y)·X + B(Y) = 0` over the residue field. Coefficients are
/// listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneModel {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl PlaneModel {
    /// Jacobian test. Since the equation is linear in `X`, the components are
    /// the lines `Y = y₀` for roots of `g = gcd(A, B)` and the graph of
    /// `X = −B/A`, all rational. Singular points sit over roots of `g` and
    /// are ordinary double points exactly when such roots are simple roots
    /// of `A`.
    pub fn is_split_degenerate(&self, k: &Gf) -> bool {
        let a = poly::trim(self.a.clone());
        let b = poly::trim(self.b.clone());
        if a.is_empty() {
            return !b.is_empty() && poly::degree(&poly::gcd(k, &b, &poly::deriv(k, &b))) == Some(0);
        }
        let g = poly::gcd(k, &a, &b);
        let h = poly::gcd(k, &g, &poly::deriv(k, &a));
        poly::degree(&h) == Some(0)
    }
}

mod poly {
    use crate::gf::Gf;

    pub fn trim(mut v: Vec<u32>) -> Vec<u32> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn degree(v: &[u32]) -> Option<usize> {
        v.len().checked_sub(1)
    }

    pub fn deriv(k: &Gf, v: &[u32]) -> Vec<u32> {
        trim(v.iter().enumerate().skip(1).map(|(i, &c)| k.mul(k.from_int(i as i64), c)).collect())
    }

    fn rem(k: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut a = a.to_vec();
        let lead_inv = k.inv(*b.last().expect("nonzero divisor")).expect("nonzero");
        while a.len() >= b.len() {
            let c = k.mul(*a.last().expect("nonempty"), lead_inv);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = k.sub(a[shift + i], k.mul(c, bi));
            }
            a = trim(a);
        }
        a
    }

    pub fn gcd(k: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = rem(k, &x, &y);
            x = y;
            y = r;
        }
        x
    }
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub lambda_set: Vec<usize>,
    pub m: Option<usize>,
    pub case: ReductionCase,
    /// `dist(a_i, piece)` for every `i`.
    pub dists: Vec<Radius>,
    pub b1p: Option<Lead>,
    pub b2p: Option<Lead>,
    pub cp: Option<LaurentElem>,
    /// `|λ_i/(x − a_i) + λ_i/(a_i − a_m)| < 1` on the piece for `i ∈ Λ ∖ {m}`.
    pub f_small: bool,
    /// Extension `(e′, f′)` needed to solve `C″^p − C″ = C − C′`, if any.
    pub shift_extension: Option<(u32, u32)>,
    pub shape: RingShape,
    pub model: PlaneModel,
    pub passes_condition: bool,
}

fn base_shape(b1: Lead, b2: Lead, k: &Gf) -> (RingShape, PlaneModel) {
    if b1 == Lead::Zero || b2 == Lead::Infinite {
        // disc: the line X = 0
        return (RingShape::SplitSheets(None), PlaneModel { a: vec![1], b: vec![] });
    }
    let c = b1.div(b2, k).residue().expect("b1 is at most b2");
    // st − c, linear in s
    (RingShape::SplitSheets(Some(c)), PlaneModel { a: vec![0, 1], b: vec![k.neg(c)] })
}

pub fn classify_reduction(piece: &Piece, bd: &BranchData) -> Result<ReductionReport, CoveringError> {
    let k = bd.params().residue_field();
    let r = bd.r();
    let dists: Vec<Radius> = (0..r).map(|i| Radius::of_val(dist_to_piece(&bd.a()[i], piece))).collect();
    let lambda_set: Vec<usize> = (0..r).filter(|&i| dists[i] <= Radius::of(&bd.lambda()[i])).collect();
    let b1 = Lead::of_radius(piece.b1());
    let b2 = Lead::of_radius(piece.b2());
    let e2 = bd.params().e() as i64 * 2;
    for rad in [piece.b1(), piece.b2()] {
        if let Some(v) = rad.exponent() {
            if (v * e2).denom() != &1 {
                return Err(CoveringError::RadiusNotInValueGroup(Valu::Finite(v)));
            }
        }
    }

    if lambda_set.is_empty() {
        let (shape, model) = base_shape(b1, b2, k);
        let passes_condition = model.is_split_degenerate(k);
        return Ok(ReductionReport {
            lambda_set,
            m: None,
            case: ReductionCase::LambdaEmpty,
            dists,
            b1p: None,
            b2p: None,
            cp: None,
            f_small: true,
            shift_extension: None,
            shape,
            model,
            passes_condition,
        });
    }

    let m = *lambda_set.iter().min_by(|&&x, &&y| dists[x].cmp(&dists[y])).expect("nonempty");
    if let Some(&j) = lambda_set.iter().find(|&&j| j != m && dists[j] == dists[m]) {
        return Err(CoveringError::MultipleMinimizers(m.min(j), m.max(j)));
    }

    let am = &bd.a()[m];
    let sup_m = sup_dist(am, piece);
    let mut f_small = true;
    for &i in lambda_set.iter().filter(|&&i| i != m) {
        let ai = &bd.a()[i];
        // |x − a_i| must be constant on the piece
        if sup_dist(ai, piece) != dists[i] {
            f_small = false;
            continue;
        }
        let bound = Radius::of(&bd.lambda()[i]).mul(sup_m).div(dists[i].mul(dist_ij(bd, i, m)));
        if bound >= Radius::one() {
            f_small = false;
        }
    }

    let lm = Lead::of(&bd.lambda()[m]);
    let (b1p, b2p, cp) = if dists[m] == piece.b1() {
        (lm.div(b2, k), lm.div(b1, k), LaurentElem::zero(bd.params()))
    } else {
        let delta = am - &piece.center;
        let ld = Lead::of(&delta);
        let dd = ld.mul(ld, k);
        let cp = bd.lambda()[m].checked_div(&delta)?;
        (lm.mul(b1, k).div(dd, k), lm.mul(b2, k).div(dd, k), cp)
    };

    let mut c = LaurentElem::zero(bd.params());
    for &i in lambda_set.iter().filter(|&&i| i != m) {
        c = &c - &bd.lambda()[i].checked_div(&(&bd.a()[i] - am))?;
    }
    let shift_extension = match artin_schreier_solve(&(&c - &cp)) {
        ArtinSchreier::Solved(_) => None,
        ArtinSchreier::ExtensionRequired { ramification, residue_degree } => Some((ramification, residue_degree)),
    };

    let (r1, r2, one) = (b1p.radius(), b2p.radius(), Radius::one());
    let (case, (shape, model)) = if r1 <= r2 && r2 <= one {
        let sm = if r2 < one {
            base_shape(b1p, b2p, k)
        } else {
            let c = b1p.residue().expect("|b1'| <= 1");
            let mut a = vec![0u32; k.p() as usize + 1];
            a[1] = k.neg(1);
            a[k.p() as usize] = 1;
            let shape = if c == 0 { RingShape::NodalSplit } else { RingShape::RationalGraph(c) };
            (shape, PlaneModel { a, b: vec![k.neg(c)] })
        };
        (ReductionCase::SmallB2, sm)
    } else if one <= r1 && r1 <= r2 {
        let sm = if b2p == Lead::Infinite {
            (RingShape::Line, PlaneModel { a: vec![1], b: vec![] })
        } else {
            // residue of ξ/ξ′ = (b₁′/b₂′)^{1/p}
            let q = b1p.div(b2p, k).residue().expect("|b1'| <= |b2'|");
            let c = k.pth_root(q);
            let shape = if c == 0 { RingShape::NodePair } else { RingShape::SmoothGm(c) };
            (shape, PlaneModel { a: vec![0, 1], b: vec![k.neg(c)] })
        };
        (ReductionCase::BigB1, sm)
    } else {
        (ReductionCase::Straddling, base_shape(b1p, b2p, k))
    };
    let passes_condition = case != ReductionCase::Straddling && f_small && model.is_split_degenerate(k);
    Ok(ReductionReport {
        lambda_set,
        m: Some(m),
        case,
        dists,
        b1p: Some(b1p),
        b2p: Some(b2p),
        cp: Some(cp),
        f_small,
        shift_extension,
        shape,
        model,
        passes_condition,
    })
}

/// Outcome of running the whole construction on one input.
#[derive(Clone, Debug)]
pub struct CoveringSuite {
    pub table: ThresholdTable,
    pub pieces: Vec<Piece>,
    pub certificate: CoverCertificate,
    pub reports: Vec<ReductionReport>,
    pub normal_form_failures: Vec<(usize, String)>,
}

impl CoveringSuite {
    pub fn all_pass(&self) -> bool {
        self.normal_form_failures.is_empty() && self.reports.iter().all(|r| r.passes_condition)
    }
}

/// Thresholds, pieces, cover check and per-piece classification.
pub fn run_suite(bd: &BranchData) -> Result<CoveringSuite, CoveringError> {
    let table = build_thresholds(bd)?;
    let pieces = enumerate_pieces(&table, bd);
    let certificate = verify_cover(&pieces, bd)?;
    let mut reports = Vec::with_capacity(pieces.len());
    let mut normal_form_failures = Vec::new();
    for (k, pc) in pieces.iter().enumerate() {
        for v in pc.normal_form_violations() {
            normal_form_failures.push((k, v));
        }
        reports.push(classify_reduction(pc, bd)?);
    }
    Ok(CoveringSuite { table, pieces, certificate, reports, normal_form_failures })
}

/// Pieces as nodes, joined when their ranges touch on some branch.
pub fn cover_dot(pieces: &[Piece], bd: &BranchData) -> String {
    let mut out = String::from("graph cover {\n");
    for (k, pc) in pieces.iter().enumerate() {
        out.push_str(&format!(
            "  p{} [label=\"n={:?}\\nc=a{} b1={} b2={}\"];\n",
            k,
            pc.index,
            pc.center_index + 1,
            pc.b1(),
            pc.b2()
        ));
    }
    let ranges: Vec<Vec<Option<(Radius, Radius)>>> = pieces
        .iter()
        .map(|pc| (0..bd.r()).map(|j| branch_interval(&pc.bounds, bd, j)).collect())
        .collect();
    for x in 0..pieces.len() {
        for y in x + 1..pieces.len() {
            let touch = (0..bd.r()).any(|j| match (ranges[x][j], ranges[y][j]) {
                (Some((l1, h1)), Some((l2, h2))) => h1 == l2 || h2 == l1,
                _ => false,
            });
            if touch {
                out.push_str(&format!("  p{} -- p{};\n", x, y));
            }
        }
    }
    out.push_str("}\n");
    out
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|x - a{}| <= {}", self.center_index + 1, self.outer)?;
        for h in &self.holes {
            if h.radius > Radius::Zero {
                write!(f, ", |x - a{}| >= {}", h.index + 1, h.radius)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::FieldParams;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn two_point(p: u32, la: i64, lb: i64) -> BranchData {
        let k = FieldParams::new(p, 1, 1).unwrap();
        BranchData::new(
            vec![LaurentElem::zero(&k), LaurentElem::one(&k)],
            vec![LaurentElem::t_pow(&k, la), LaurentElem::t_pow(&k, lb)],
        )
        .unwrap()
    }

    fn three_point() -> BranchData {
        let k = FieldParams::new(3, 1, 1).unwrap();
        BranchData::new(
            vec![LaurentElem::zero(&k), LaurentElem::one(&k), LaurentElem::t_pow(&k, 1)],
            vec![LaurentElem::t_pow(&k, 3), LaurentElem::t_pow(&k, 2), LaurentElem::t_pow(&k, 4)],
        )
        .unwrap()
    }

    #[test]
    fn radius_order() {
        let rs = [Radius::Zero, Radius::Pow(r(3)), Radius::Pow(r(-1)), Radius::Infinite];
        for w in rs.windows(2) {
            assert!(w[0] < w[1]);
            let m = w[0].between(w[1]);
            assert!(w[0] < m && m < w[1]);
        }
    }

    #[test]
    fn thresholds_two_points() {
        let bd = two_point(3, 1, 1);
        let tt = build_thresholds(&bd).unwrap();
        let exps: Vec<Rational> = tt.rows[0].iter().map(|e| e.exp).collect();
        assert_eq!(exps, vec![r(2), r(1), r(0), r(-1)]);
        assert_eq!(tt.m(0), 5);
        assert!(tt.rows[0][2].tags.contains(&Tag::Diff(1)) && tt.rows[0][2].tags.contains(&Tag::Midpoint(1)));
        assert_eq!(tt.rows[0][0].tags, vec![Tag::Epsilon]);
        assert!(tt.separation_holds(&bd));
        assert_eq!(tt.ramification, 1);

        let swapped = build_thresholds(&bd.permuted(&[1, 0])).unwrap();
        assert_eq!(swapped.rows[0].iter().map(|e| e.exp).collect::<Vec<_>>(), exps);

        let bad = two_point(3, 0, 0);
        assert_eq!(build_thresholds(&bad).unwrap_err(), CoveringError::CriterionViolated(0, 1));
    }

    #[test]
    fn odd_midpoints_need_ramification() {
        let tt = build_thresholds(&two_point(3, 2, 1)).unwrap();
        assert_eq!(tt.ramification, 2);
        assert!(tt.rows[0].iter().any(|e| e.exp == Rational::new(1, 2)));
    }

    #[test]
    fn expected_pieces_present() {
        let bd = two_point(3, 1, 1);
        let tt = build_thresholds(&bd).unwrap();
        let pieces = enumerate_pieces(&tt, &bd);
        // annulus |t|^2 <= |x| <= |t|^1 and the small ball |x| <= |t|^2
        assert!(pieces.iter().any(|pc| pc.center_index == 0
            && pc.b1() == Radius::Pow(r(2))
            && pc.b2() == Radius::Pow(r(1))
            && pc.holes.len() == 1));
        assert!(pieces.iter().any(|pc| pc.center_index == 0 && pc.b1() == Radius::Zero && pc.b2() == Radius::Pow(r(2))));
        // incompatible radii: |x| <= |t|^2 and |x - 1| <= |t|^2
        assert!(build_piece(&tt, &bd, &[0, 0]).is_none());
    }

    #[test]
    fn nonempty_pieces_match_branch_scan() {
        let bd = three_point();
        let tt = build_thresholds(&bd).unwrap();
        for n in j_indices(&tt, &bd) {
            let bounds: Vec<_> = (0..bd.r()).map(|i| (tt.alpha(i, n[i]), tt.alpha(i, n[i] + 1))).collect();
            let seen = (0..bd.r()).any(|j| branch_interval(&bounds, &bd, j).is_some());
            assert_eq!(build_piece(&tt, &bd, &n).is_some(), seen, "n = {:?}", n);
        }
    }

    #[test]
    fn cover_and_removal() {
        let bd = three_point();
        let tt = build_thresholds(&bd).unwrap();
        let pieces = enumerate_pieces(&tt, &bd);
        let cert = verify_cover(&pieces, &bd).unwrap();
        assert_eq!(cert.branches.len(), 3);
        for chain in &cert.branches {
            assert_eq!(chain.first().unwrap().0, Radius::Zero);
            assert_eq!(chain.last().unwrap().1, Radius::Infinite);
        }
        let last = pieces.iter().position(|pc| pc.outer == Radius::Infinite).unwrap();
        let mut fewer = pieces.clone();
        fewer.remove(last);
        match verify_cover(&fewer, &bd) {
            Err(CoveringError::NotCovering { tuple }) => {
                assert!(!pieces.iter().any(|pc| pc.index != pieces[last].index
                    && pc.admits(&tuple.iter().map(|v| Radius::of_val(*v)).collect::<Vec<_>>())));
            }
            other => panic!("expected NotCovering, got {:?}", other.map(|_| ())),
        }
        assert!(verify_cover(&enumerate_pieces(&build_thresholds(&two_point(2, 1, 2)).unwrap(), &two_point(2, 1, 2)), &two_point(2, 1, 2)).is_ok());
    }

    #[test]
    fn branch_points_sit_in_small_balls() {
        let bd = three_point();
        let tt = build_thresholds(&bd).unwrap();
        let pieces = enumerate_pieces(&tt, &bd);
        for i in 0..bd.r() {
            let holding: Vec<&Piece> = pieces.iter().filter(|pc| pc.contains(&bd.a()[i])).collect();
            assert!(!holding.is_empty());
            for pc in holding {
                assert_eq!(pc.center_index, i);
                assert_eq!(pc.b1(), Radius::Zero);
                assert_eq!(pc.b2(), tt.alpha(i, 1));
                assert_eq!(pc.holes.len(), 1);
                for j in (0..bd.r()).filter(|&j| j != i) {
                    assert!(!pc.contains(&bd.a()[j]));
                }
            }
        }
    }

    #[test]
    fn distances_to_pieces() {
        let bd = three_point();
        let tt = build_thresholds(&bd).unwrap();
        let pieces = enumerate_pieces(&tt, &bd);
        for pc in &pieces {
            assert_eq!(dist_to_piece(&pc.center, pc) == Valu::Infinity, pc.b1() == Radius::Zero);
            for a in bd.a() {
                let d = Radius::of_val(dist_to_piece(a, pc));
                assert!(d == Radius::Zero || d == pc.b1() || d >= pc.b2(), "{} {}", pc, d);
            }
        }
        // hole of radius |t|: a point of the hole is at distance |t|
        let k = bd.params().clone();
        let pc = pieces.iter().find(|pc| pc.holes.iter().any(|h| h.radius == Radius::Pow(r(1)))).unwrap();
        let h = pc.holes.iter().find(|h| h.radius == Radius::Pow(r(1))).unwrap();
        let inside = &h.center + &LaurentElem::t_pow(&k, 5);
        assert_eq!(dist_to_piece(&inside, pc), Valu::Finite(r(1)));
        let far = LaurentElem::t_pow(&k, -7);
        let ball = pieces.iter().find(|pc| pc.outer < Radius::Infinite).unwrap();
        assert_eq!(dist_to_piece(&far, ball), Valu::Finite(r(-7)));
    }

    #[test]
    fn sup_norms() {
        let bd = two_point(3, 1, 1);
        let tt = build_thresholds(&bd).unwrap();
        let pc = build_piece(&tt, &bd, &[0, 3]).unwrap();
        // a_1 in the piece
        assert_eq!(sup_norm_zi(&pc, &bd, 0), Radius::Infinite);
        // |x - a_2| = 1 on it, |λ_2| = |t|
        assert_eq!(sup_norm_zi(&pc, &bd, 1), Radius::Pow(r(1)));
        let pc = build_piece(&tt, &bd, &[1, 3]).unwrap();
        assert_eq!(Radius::of_val(dist_to_piece(&bd.a()[0], &pc)), Radius::Pow(r(2)));
        assert_eq!(sup_norm_zi(&pc, &bd, 0), Radius::Pow(r(-1)));
        let pc = build_piece(&tt, &bd, &[2, 3]).unwrap();
        assert_eq!(sup_norm_zi(&pc, &bd, 0), Radius::one());
    }

    #[test]
    fn normal_form_agrees_with_annuli() {
        let bd = three_point();
        let k = bd.params().clone();
        let tt = build_thresholds(&bd).unwrap();
        let pieces = enumerate_pieces(&tt, &bd);
        let mut samples = Vec::new();
        for a in bd.a() {
            for v in -5..7 {
                for c in 1..3 {
                    samples.push(a + &LaurentElem::monomial(&k, c, v));
                }
            }
        }
        for x in &samples {
            let dists: Vec<Radius> = bd.a().iter().map(|a| Radius::of(&(x - a))).collect();
            for pc in &pieces {
                assert_eq!(pc.contains(x), pc.admits(&dists), "{} at {}", pc, x);
            }
        }
    }

    #[test]
    fn reductions_pass_and_shapes() {
        let bd = three_point();
        let suite = run_suite(&bd).unwrap();
        assert!(suite.all_pass());
        let names: Vec<&str> = suite.reports.iter().map(|r| r.shape.name()).collect();
        for want in ["SPLIT_SHEETS", "NODAL_SPLIT", "NODE_PAIR", "LINE"] {
            assert!(names.contains(&want), "{}", want);
        }
        for rep in &suite.reports {
            assert_eq!(rep.case == ReductionCase::LambdaEmpty, rep.lambda_set.is_empty());
            if rep.shape == RingShape::NodalSplit {
                let (b1, b2) = (rep.b1p.unwrap().radius(), rep.b2p.unwrap().radius());
                assert!(b1 < Radius::one() && b2 == Radius::one());
            }
            if rep.shape == RingShape::NodePair {
                let (b1, b2) = (rep.b1p.unwrap().radius(), rep.b2p.unwrap().radius());
                assert!(Radius::one() <= b1 && b1 < b2 && b2 < Radius::Infinite);
            }
        }
    }

    #[test]
    fn violating_input_is_caught_downstream() {
        let bd = two_point(3, 0, 0);
        let tt = build_thresholds_unchecked(&bd);
        let pieces = enumerate_pieces(&tt, &bd);
        let failures = pieces
            .iter()
            .filter(|pc| !matches!(classify_reduction(pc, &bd), Ok(rep) if rep.passes_condition))
            .count();
        assert!(failures > 0);
    }

    #[test]
    fn plane_model_jacobian() {
        let k = Gf::get(3, 1).unwrap();
        // t(y^3 - y) = 0: three nodes
        assert!(PlaneModel { a: vec![0, 2, 0, 1], b: vec![] }.is_split_degenerate(&k));
        // t·y^2 = 0: the line y = 0 is doubled
        assert!(!PlaneModel { a: vec![0, 0, 1], b: vec![] }.is_split_degenerate(&k));
        // y·x - y^2 = 0: cusp-free but tangent at the origin
        assert!(!PlaneModel { a: vec![0, 0, 1], b: vec![0, 0, 2] }.is_split_degenerate(&k));
        assert!(PlaneModel { a: vec![0, 1], b: vec![2] }.is_split_degenerate(&k));
        assert!(PlaneModel { a: vec![], b: vec![0, 1] }.is_split_degenerate(&k));
        assert!(!PlaneModel { a: vec![], b: vec![0, 0, 1] }.is_split_degenerate(&k));
    }
}
