//! The Bruhat–Tits tree of `PGL₂(K)`.
//!
//! A vertex is the ball `{x : val(x − a) ≥ n}` written `(a, n)`; it stands for
//! the lattice class spanned by the columns of `[[π^n, a], [0, 1]]`. Levels are
//! in `π`-units of the current field. The tree is rooted at the end `∞`: the
//! parent of `(a, n)` is `(a, n − 1)`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{FieldError, TreeError};
use crate::valfield::{FieldParams, LaurentElem};

/// A point of `P¹(K)`: an end of the tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum P1Point {
    Finite(LaurentElem),
    Infinity,
}

impl P1Point {
    pub fn finite(&self) -> Option<&LaurentElem> {
        match self {
            P1Point::Finite(a) => Some(a),
            P1Point::Infinity => None,
        }
    }
}

impl std::fmt::Display for P1Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            P1Point::Finite(a) => write!(f, "{}", a),
            P1Point::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeVertex {
    center: LaurentElem,
    level: i64,
}

/// Either an end or a vertex; the third argument of [`meet_vertex`].
#[derive(Clone, Debug)]
pub enum EndOrVertex {
    End(P1Point),
    Vertex(TreeVertex),
}

/// `val(a − b)` in `π`-units, failing when the difference vanishes to precision.
pub fn val_diff(a: &LaurentElem, b: &LaurentElem) -> Result<i64, TreeError> {
    let d = a - b;
    match (d.val_pi(), d.precision()) {
        (Some(v), _) => Ok(v),
        (None, None) => Err(TreeError::CoincidentEnds),
        (None, Some(p)) => Err(TreeError::InsufficientPrecision { needed: p + 1, have: p }),
    }
}

impl TreeVertex {
    /// `(a mod π^n, n)`.
    pub fn new(a: &LaurentElem, n: i64) -> Result<Self, TreeError> {
        if let Some(p) = a.precision() {
            if p < n {
                return Err(TreeError::InsufficientPrecision { needed: n, have: p });
            }
        }
        Ok(TreeVertex { center: a.reduce_mod(n), level: n })
    }

    /// `v₁ = (0, 0)`, the class of the standard lattice.
    pub fn root(params: &FieldParams) -> Self {
        TreeVertex { center: LaurentElem::zero_to(params, 0), level: 0 }
    }

    pub fn center(&self) -> &LaurentElem {
        &self.center
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn params(&self) -> &FieldParams {
        self.center.params()
    }

    /// Does the ball contain `x`?
    pub fn contains(&self, x: &LaurentElem) -> bool {
        (x - &self.center).val_pi_capped() >= self.level
    }

    /// Is `self` an ancestor of (or equal to) `other`, i.e. does the ball of
    /// `self` contain that of `other`?
    pub fn is_ancestor_of(&self, other: &TreeVertex) -> bool {
        self.level <= other.level && (&other.center - &self.center).val_pi_capped() >= self.level
    }

    pub fn parent(&self) -> TreeVertex {
        TreeVertex { center: self.center.reduce_mod(self.level - 1), level: self.level - 1 }
    }

    /// The `q` children `(a + cπ^n, n + 1)`.
    pub fn children(&self) -> Vec<TreeVertex> {
        let params = self.params().clone();
        params
            .residue_field()
            .elements()
            .map(|c| {
                let step = LaurentElem::monomial(&params, c, self.level);
                let a = (&self.center + &step).reduce_mod(self.level + 1);
                TreeVertex { center: a, level: self.level + 1 }
            })
            .collect()
    }

    pub fn neighbors(&self) -> Vec<TreeVertex> {
        let mut out = vec![self.parent()];
        out.extend(self.children());
        out
    }

    /// `h = [[π^n, a], [0, 1]]`, which carries `v₁` to this vertex.
    pub fn frame(&self) -> Moebius {
        let params = self.params();
        let a = lift_exact(&self.center);
        Moebius::from_entries_unchecked([
            LaurentElem::monomial(params, 1, self.level),
            a,
            LaurentElem::zero(params),
            LaurentElem::one(params),
        ])
    }

    /// Canonical DOT label.
    pub fn label(&self) -> String {
        let c = lift_exact(&self.center);
        format!("({}, {})", c, self.level)
    }
}

/// Forget the precision of a reduced center: the representative itself is exact.
fn lift_exact(a: &LaurentElem) -> LaurentElem {
    LaurentElem::from_terms(a.params(), a.terms(), None).expect("coefficients already in range")
}

/// `d((a, m), (b, n)) = m + n − 2 min(m, n, val(a − b))`.
pub fn distance(v: &TreeVertex, w: &TreeVertex) -> i64 {
    let vd = (&v.center - &w.center).val_pi_capped();
    let j = v.level.min(w.level).min(vd);
    v.level + w.level - 2 * j
}

/// First vertex after `v` on the path from `v` to `w` (`v ≠ w`).
pub fn step_toward(v: &TreeVertex, w: &TreeVertex) -> TreeVertex {
    let vd = (&v.center - &w.center).val_pi_capped();
    let j = v.level.min(w.level).min(vd);
    if v.level > j {
        v.parent()
    } else {
        TreeVertex { center: w.center.reduce_mod(v.level + 1), level: v.level + 1 }
    }
}

/// All vertices of the path from `v` to `w`, both included.
pub fn path(v: &TreeVertex, w: &TreeVertex) -> Vec<TreeVertex> {
    let mut out = vec![v.clone()];
    let mut cur = v.clone();
    while cur != *w {
        cur = step_toward(&cur, w);
        out.push(cur.clone());
    }
    out
}

/// An undirected edge, stored shallow end first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge(pub TreeVertex, pub TreeVertex);

impl Edge {
    pub fn new(a: TreeVertex, b: TreeVertex) -> Self {
        if a.level <= b.level {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }
}

/// Generalized node: a vertex, a finite end (level `∞`), or the end `∞`.
#[derive(Clone, Debug)]
enum Node {
    Ball(LaurentElem, Option<i64>),
    Top,
}

fn node_of_end(x: &P1Point) -> Node {
    match x {
        P1Point::Finite(a) => Node::Ball(a.clone(), None),
        P1Point::Infinity => Node::Top,
    }
}

fn node_of(x: &EndOrVertex) -> Node {
    match x {
        EndOrVertex::End(p) => node_of_end(p),
        EndOrVertex::Vertex(v) => Node::Ball(v.center.clone(), Some(v.level)),
    }
}

fn opt_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Lowest common ancestor in the tree rooted at `∞`.
fn lca(x: &Node, y: &Node) -> Result<Node, TreeError> {
    match (x, y) {
        (Node::Top, _) | (_, Node::Top) => Ok(Node::Top),
        (Node::Ball(a, m), Node::Ball(b, n)) => {
            let lvl = opt_min(*m, *n);
            let d = a - b;
            let vd = match (d.val_pi(), d.precision()) {
                (Some(v), _) => Some(v),
                (None, None) => None,
                (None, Some(p)) => {
                    if lvl.is_some_and(|l| l <= p) {
                        Some(p)
                    } else {
                        return Err(TreeError::InsufficientPrecision { needed: lvl.unwrap_or(p + 1), have: p });
                    }
                }
            };
            Ok(Node::Ball(a.clone(), opt_min(lvl, vd)))
        }
    }
}

fn node_level(x: &Node) -> Option<Option<i64>> {
    match x {
        Node::Top => None,
        Node::Ball(_, l) => Some(*l),
    }
}

/// Median of three nodes: the deepest of the pairwise meets.
fn median(x: &Node, y: &Node, z: &Node) -> Result<TreeVertex, TreeError> {
    let cands = [lca(x, y)?, lca(y, z)?, lca(x, z)?];
    let mut best: Option<(i64, &LaurentElem)> = None;
    for c in &cands {
        match node_level(c) {
            None => {}
            Some(None) => return Err(TreeError::CoincidentEnds),
            Some(Some(l)) => {
                if let Node::Ball(a, _) = c {
                    if best.is_none_or(|(bl, _)| l > bl) {
                        best = Some((l, a));
                    }
                }
            }
        }
    }
    let (l, a) = best.ok_or(TreeError::CoincidentEnds)?;
    TreeVertex::new(a, l)
}

/// The vertex where the geodesics joining `a`, `b`, `c` meet; with `c` a
/// vertex, the projection of `c` to the geodesic `(a, b)`.
pub fn meet_vertex(a: &P1Point, b: &P1Point, c: &EndOrVertex) -> Result<TreeVertex, TreeError> {
    if a == b {
        return Err(TreeError::CoincidentEnds);
    }
    if let EndOrVertex::End(e) = c {
        if e == a || e == b {
            return Err(TreeError::CoincidentEnds);
        }
    }
    median(&node_of_end(a), &node_of_end(b), &node_of(c))
}

/// Projection of `v` onto the geodesic between two ends.
pub fn project(a: &P1Point, b: &P1Point, v: &TreeVertex) -> Result<TreeVertex, TreeError> {
    meet_vertex(a, b, &EndOrVertex::Vertex(v.clone()))
}

/// Element of `PGL₂(K)`, stored scaled so the smallest entry valuation is 0
/// and the first such entry has leading coefficient 1.
#[derive(Clone, Debug)]
pub struct Moebius {
    m: [LaurentElem; 4],
}

impl Moebius {
    fn from_entries_unchecked(m: [LaurentElem; 4]) -> Self {
        let mut g = Moebius { m };
        g.canonicalize();
        g
    }

    /// `[[a, b], [c, d]]`, acting by `z ↦ (az + b)/(cz + d)`.
    pub fn new(a: LaurentElem, b: LaurentElem, c: LaurentElem, d: LaurentElem) -> Result<Self, TreeError> {
        let params = a.params().clone();
        for x in [&b, &c, &d] {
            if x.params() != &params {
                return Err(FieldError::ParamsMismatch.into());
            }
        }
        let g = Moebius { m: [a, b, c, d] };
        if g.raw_det().is_zero() {
            return Err(TreeError::Singular);
        }
        let mut g = g;
        g.canonicalize();
        Ok(g)
    }

    pub fn identity(params: &FieldParams) -> Self {
        Moebius {
            m: [
                LaurentElem::one(params),
                LaurentElem::zero(params),
                LaurentElem::zero(params),
                LaurentElem::one(params),
            ],
        }
    }

    /// `z ↦ z + b`.
    pub fn translation(b: LaurentElem) -> Self {
        let params = b.params().clone();
        Self::from_entries_unchecked([LaurentElem::one(&params), b, LaurentElem::zero(&params), LaurentElem::one(&params)])
    }

    /// `z ↦ a z`.
    pub fn diag(a: LaurentElem) -> Result<Self, TreeError> {
        let params = a.params().clone();
        Self::new(a, LaurentElem::zero(&params), LaurentElem::zero(&params), LaurentElem::one(&params))
    }

    fn canonicalize(&mut self) {
        let vals: Vec<i64> = self.m.iter().map(|x| x.val_pi_capped()).collect();
        let mn = *vals.iter().min().unwrap();
        if mn == i64::MAX {
            return;
        }
        let lead_idx = (0..4).find(|&i| self.m[i].val_pi() == Some(mn));
        let scale = match lead_idx {
            Some(i) => {
                let gf = self.m[i].params().residue_field();
                gf.inv(self.m[i].leading_coeff().unwrap()).unwrap()
            }
            None => 1,
        };
        for x in self.m.iter_mut() {
            *x = x.shift(-mn).scale(scale);
        }
    }

    pub fn entries(&self) -> &[LaurentElem; 4] {
        &self.m
    }

    pub fn params(&self) -> &FieldParams {
        self.m[0].params()
    }

    fn raw_det(&self) -> LaurentElem {
        let [a, b, c, d] = &self.m;
        &(a * d) - &(b * c)
    }

    pub fn det(&self) -> LaurentElem {
        self.raw_det()
    }

    pub fn trace(&self) -> LaurentElem {
        &self.m[0] + &self.m[3]
    }

    pub fn compose(&self, other: &Moebius) -> Moebius {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Self::from_entries_unchecked([
            &(a * e) + &(b * g),
            &(a * f) + &(b * h),
            &(c * e) + &(d * g),
            &(c * f) + &(d * h),
        ])
    }

    /// Inverse in `PGL₂` (the adjugate).
    pub fn inverse(&self) -> Moebius {
        let [a, b, c, d] = &self.m;
        Self::from_entries_unchecked([d.clone(), -b, -c, a.clone()])
    }

    pub fn pow(&self, n: i64) -> Moebius {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Moebius::identity(self.params());
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Moebius) -> Moebius {
        h.compose(self).compose(&h.inverse())
    }

    pub fn is_identity(&self) -> bool {
        let [a, b, c, d] = &self.m;
        b.is_zero() && c.is_zero() && (a - d).is_zero()
    }

    /// Equal as elements of `PGL₂`, to precision.
    pub fn same_as(&self, other: &Moebius) -> bool {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        // proportionality: all 2x2 minors of the stacked rows vanish
        [(a, f, b, e), (a, g, c, e), (a, h, d, e), (b, g, c, f), (b, h, d, f), (c, h, d, g)]
            .iter()
            .all(|(x, y, z, w)| (&(*x * *y) - &(*z * *w)).is_zero())
    }

    pub fn apply_point(&self, z: &P1Point) -> Result<P1Point, TreeError> {
        let [a, b, c, d] = &self.m;
        let (num, den) = match z {
            P1Point::Infinity => (a.clone(), c.clone()),
            P1Point::Finite(x) => (&(a * x) + b, &(c * x) + d),
        };
        if den.is_zero() {
            if den.is_exact() {
                return Ok(P1Point::Infinity);
            }
            return Err(TreeError::InsufficientPrecision {
                needed: den.precision().unwrap() + 1,
                have: den.precision().unwrap(),
            });
        }
        Ok(P1Point::Finite(num.checked_div(&den)?))
    }

    /// Action on vertices: reduce the columns of `g·h` to the form
    /// `[[π^m, b], [0, 1]]` by `GL₂(O)` column operations.
    pub fn apply_vertex(&self, v: &TreeVertex) -> Result<TreeVertex, TreeError> {
        let [g11, g12, g21, g22] = &self.m;
        let a = lift_exact(&v.center);
        let n = v.level;
        let top1 = g11.shift(n);
        let top2 = &(g11 * &a) + g12;
        let bot1 = g21.shift(n);
        let bot2 = &(g21 * &a) + g22;
        let det = self.raw_det().shift(n);
        let Some(vdet) = det.val_pi() else {
            return Err(TreeError::Singular);
        };
        let (top, bot) = if bot2.val_pi_capped() <= bot1.val_pi_capped() { (top2, bot2) } else { (top1, bot1) };
        let Some(vb) = bot.val_pi() else {
            return Err(TreeError::InsufficientPrecision {
                needed: bot.precision().unwrap_or(0) + 1,
                have: bot.precision().unwrap_or(0),
            });
        };
        let m = vdet - 2 * vb;
        let b = top.div_to(&bot, m)?;
        TreeVertex::new(&b, m)
    }

    /// Distance `g` moves `v`: `val det X − 2 min val X` for `X = h⁻¹ g h`.
    pub fn displacement(&self, v: &TreeVertex) -> i64 {
        let h = v.frame();
        let x = h.inverse().compose(self).compose(&h);
        lattice_distance_of(&x)
    }

    pub fn is_fixed(&self, v: &TreeVertex) -> bool {
        self.displacement(v) == 0
    }

    /// Fixed points in `P¹(K)` of a parabolic element (exactly one).
    pub fn parabolic_fixed_point(&self) -> Result<P1Point, TreeError> {
        let [a, b, c, d] = &self.m;
        let params = self.params().clone();
        if self.is_identity() {
            return Err(TreeError::NotParabolic);
        }
        let amd = a - d;
        if params.p() == 2 {
            if !amd.is_zero() {
                return Err(TreeError::NotParabolic);
            }
            if c.is_zero() {
                return Ok(P1Point::Infinity);
            }
            let q = b.checked_div(c)?;
            return q.pth_root().map(P1Point::Finite).ok_or(TreeError::NotParabolic);
        }
        let disc = &(&amd * &amd) + &(&LaurentElem::from_int(&params, 4) * &(b * c));
        if !disc.is_zero() {
            return Err(TreeError::NotParabolic);
        }
        if c.is_zero() {
            return Ok(P1Point::Infinity);
        }
        let two_c = &LaurentElem::from_int(&params, 2) * c;
        Ok(P1Point::Finite(amd.checked_div(&two_c)?))
    }
}

impl PartialEq for Moebius {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// `val det X − 2 min_{ij} val X_ij`: the distance from `v₁` to `X v₁`.
pub fn lattice_distance_of(x: &Moebius) -> i64 {
    let vdet = x.raw_det().val_pi_capped();
    let mn = x.m.iter().map(|e| e.val_pi_capped()).min().unwrap();
    vdet - 2 * mn
}

/// Lattice-class distance through `h_v⁻¹ h_w`.
pub fn lattice_distance(v: &TreeVertex, w: &TreeVertex) -> i64 {
    lattice_distance_of(&v.frame().inverse().compose(&w.frame()))
}

/// Möbius map sending `p1 ↦ 0` and `p2 ↦ ∞`.
pub fn moebius_to_zero_infinity(p1: &P1Point, p2: &P1Point, params: &FieldParams) -> Result<Moebius, TreeError> {
    let one = LaurentElem::one(params);
    let zero = LaurentElem::zero(params);
    match (p1, p2) {
        (P1Point::Finite(x), P1Point::Finite(y)) => Moebius::new(one.clone(), -x, one, -y),
        (P1Point::Infinity, P1Point::Finite(y)) => Moebius::new(zero, one.clone(), one, -y),
        (P1Point::Finite(x), P1Point::Infinity) => Moebius::new(one.clone(), -x, zero, one),
        (P1Point::Infinity, P1Point::Infinity) => Err(TreeError::CoincidentEnds),
    }
}

/// Result of [`mirror_distance`].
#[derive(Clone, Debug)]
pub struct MirrorData {
    pub d: i64,
    /// Vertex of `M(γ₁)` closest to `M(γ₂)`.
    pub xi1: TreeVertex,
    /// Vertex of `M(γ₂)` closest to `M(γ₁)`.
    pub xi2: TreeVertex,
    /// `T` with `T γ₁ T⁻¹ = [[1,0],[1,1]]`, `T γ₂ T⁻¹ = [[1,η],[0,1]]`.
    pub normalizer: Moebius,
    pub eta: LaurentElem,
}

/// Distance between the mirrors of two parabolic elements, from their joint
/// normal form.
pub fn mirror_distance(g1: &Moebius, g2: &Moebius) -> Result<MirrorData, TreeError> {
    let params = g1.params().clone();
    let p1 = g1.parabolic_fixed_point()?;
    let p2 = g2.parabolic_fixed_point()?;
    let same = match (&p1, &p2) {
        (P1Point::Infinity, P1Point::Infinity) => true,
        (P1Point::Finite(x), P1Point::Finite(y)) => (x - y).is_zero(),
        _ => false,
    };
    if same {
        return Err(TreeError::MirrorsIntersect);
    }
    let h = moebius_to_zero_infinity(&p1, &p2, &params)?;
    let n1 = g1.conjugate_by(&h);
    let n2 = g2.conjugate_by(&h);
    // n1 = x[[1,0],[c,1]], n2 = x[[1,w],[0,1]]
    let c = n1.m[2].checked_div(&n1.m[0])?;
    let w = n2.m[1].checked_div(&n2.m[0])?;
    if c.is_zero() || w.is_zero() {
        return Err(TreeError::NotParabolic);
    }
    let dscale = Moebius::diag(c.clone())?;
    let t = dscale.compose(&h);
    let eta = &c * &w;
    let ve = eta.val_pi().ok_or(TreeError::NotParabolic)?;
    if ve >= 0 {
        return Err(TreeError::MirrorsIntersect);
    }
    let tinv = t.inverse();
    let xi1 = tinv.apply_vertex(&TreeVertex::root(&params))?;
    let xi2 = tinv.apply_vertex(&TreeVertex::new(&LaurentElem::zero(&params), ve)?)?;
    Ok(MirrorData { d: -ve, xi1, xi2, normalizer: t, eta })
}

/// Vertices on the geodesic from `a` to `b`, listed from the `a` side. Each
/// infinite direction is cut `depth` steps beyond the junction.
pub fn geodesic_vertices(a: &P1Point, b: &P1Point, depth: i64) -> Result<Vec<TreeVertex>, TreeError> {
    match (a, b) {
        (P1Point::Finite(x), P1Point::Finite(y)) => {
            let j = val_diff(x, y)?;
            let mut out = Vec::new();
            for n in (j..=j + depth).rev() {
                out.push(TreeVertex::new(x, n)?);
            }
            for n in j + 1..=j + depth {
                out.push(TreeVertex::new(y, n)?);
            }
            Ok(out)
        }
        (P1Point::Finite(x), P1Point::Infinity) => {
            // centred at |x|, or at the unit ball when x = 0
            let base = x.val_pi().unwrap_or(0).clamp(-depth, depth);
            (base - depth..=base + depth).rev().map(|n| TreeVertex::new(x, n)).collect()
        }
        (P1Point::Infinity, P1Point::Finite(_)) => {
            let mut v = geodesic_vertices(b, a, depth)?;
            v.reverse();
            Ok(v)
        }
        (P1Point::Infinity, P1Point::Infinity) => Err(TreeError::CoincidentEnds),
    }
}

/// Is the set of `true` flags a contiguous run?
pub fn is_segment(flags: &[bool]) -> bool {
    let first = flags.iter().position(|&f| f);
    let last = flags.iter().rposition(|&f| f);
    match (first, last) {
        (Some(i), Some(j)) => flags[i..=j].iter().all(|&f| f),
        _ => true,
    }
}

/// Result of a fixed-vertex scan along the geodesic joining two fixed points.
#[derive(Clone, Debug)]
pub struct GeodesicScan {
    pub path: Vec<TreeVertex>,
    pub fixed1: Vec<bool>,
    pub fixed2: Vec<bool>,
}

impl GeodesicScan {
    pub fn convex(&self) -> bool {
        is_segment(&self.fixed1) && is_segment(&self.fixed2)
    }

    /// `(d, ξ₁, ξ₂)` read off the scan, if both mirrors were seen.
    pub fn closest(&self) -> Option<(i64, TreeVertex, TreeVertex)> {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, _) in self.fixed1.iter().enumerate().filter(|(_, &f)| f) {
            for (j, _) in self.fixed2.iter().enumerate().filter(|(_, &f)| f) {
                let d = distance(&self.path[i], &self.path[j]);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        best.map(|(d, i, j)| (d, self.path[i].clone(), self.path[j].clone()))
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph geodesic {\n");
        for (i, v) in self.path.iter().enumerate() {
            let mark = match (self.fixed1[i], self.fixed2[i]) {
                (true, true) => ", style=filled, fillcolor=purple",
                (true, false) => ", style=filled, fillcolor=lightblue",
                (false, true) => ", style=filled, fillcolor=salmon",
                _ => "",
            };
            let _ = writeln!(s, "  v{} [label=\"{}\"{}];", i, v.label(), mark);
        }
        for i in 1..self.path.len() {
            let _ = writeln!(s, "  v{} -- v{};", i - 1, i);
        }
        s.push_str("}\n");
        s
    }
}

/// Walk the geodesic between the fixed points of `g1` and `g2` and test
/// membership in each mirror vertex by vertex.
pub fn scan_mirrors(g1: &Moebius, g2: &Moebius, depth: i64) -> Result<GeodesicScan, TreeError> {
    let p1 = g1.parabolic_fixed_point()?;
    let p2 = g2.parabolic_fixed_point()?;
    let path = geodesic_vertices(&p1, &p2, depth)?;
    let fixed1 = path.iter().map(|v| g1.is_fixed(v)).collect();
    let fixed2 = path.iter().map(|v| g2.is_fixed(v)).collect();
    Ok(GeodesicScan { path, fixed1, fixed2 })
}

/// Branch of a hull: the end `points[point]` is reached from the hull node
/// `attach`; the points `(a_point, ρ)` with `ρ` in `(lower, ∞]` belong to
/// this branch and no earlier one.
#[derive(Clone, Debug)]
pub struct HullBranch {
    pub point: usize,
    pub attach: usize,
    /// `None` means the branch runs all the way to the end `∞`.
    pub lower: Option<i64>,
    pub lower_closed: bool,
}

/// The subtree spanned by a finite set of ends.
#[derive(Clone, Debug)]
pub struct HullTree {
    pub points: Vec<P1Point>,
    pub nodes: Vec<TreeVertex>,
    pub edges: Vec<(usize, usize, i64)>,
    pub branches: Vec<HullBranch>,
    /// Projection of `v₁` to the hull.
    pub base: usize,
}

pub fn hull_tree(points: &[P1Point]) -> Result<HullTree, TreeError> {
    if points.len() < 2 {
        return Err(TreeError::DuplicatePoints);
    }
    let params = points
        .iter()
        .find_map(|p| p.finite().map(|a| a.params().clone()))
        .ok_or(TreeError::DuplicatePoints)?;
    // pairwise valuations, also detecting duplicates
    let n = points.len();
    let mut vals = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            match (&points[i], &points[j]) {
                (P1Point::Finite(x), P1Point::Finite(y)) => {
                    let v = val_diff(x, y).map_err(|e| match e {
                        TreeError::CoincidentEnds => TreeError::DuplicatePoints,
                        other => other,
                    })?;
                    vals[i][j] = Some(v);
                    vals[j][i] = Some(v);
                }
                (P1Point::Infinity, P1Point::Infinity) => return Err(TreeError::DuplicatePoints),
                _ => {}
            }
        }
    }
    let mut set: BTreeSet<(i64, Vec<(i64, u32)>)> = BTreeSet::new();
    let mut nodes: Vec<TreeVertex> = Vec::new();
    let mut push = |v: TreeVertex, nodes: &mut Vec<TreeVertex>| -> usize {
        let key = (v.level, v.center.terms().collect::<Vec<_>>());
        if set.insert(key) {
            nodes.push(v.clone());
            nodes.len() - 1
        } else {
            nodes.iter().position(|w| *w == v).unwrap()
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let m = median(&node_of_end(&points[i]), &node_of_end(&points[j]), &node_of_end(&points[k]))?;
                push(m, &mut nodes);
            }
        }
    }
    let v1 = TreeVertex::root(&params);
    let mut base: Option<TreeVertex> = None;
    for i in 0..n {
        for j in i + 1..n {
            let pr = project(&points[i], &points[j], &v1)?;
            if base.as_ref().is_none_or(|b| distance(&pr, &v1) < distance(b, &v1)) {
                base = Some(pr);
            }
        }
    }
    let base = push(base.unwrap(), &mut nodes);
    // parent of each node: deepest strict ancestor among nodes
    let mut edges = Vec::new();
    for (i, v) in nodes.iter().enumerate() {
        let parent = nodes
            .iter()
            .enumerate()
            .filter(|(j, w)| *j != i && w.is_ancestor_of(v))
            .max_by_key(|(_, w)| w.level);
        if let Some((j, w)) = parent {
            edges.push((j, i, v.level - w.level));
        }
    }
    let has_inf = points.iter().any(|p| matches!(p, P1Point::Infinity));
    let finite: Vec<usize> = (0..n).filter(|&i| points[i].finite().is_some()).collect();
    let global_min = finite
        .iter()
        .flat_map(|&i| finite.iter().filter_map(move |&j| if i != j { Some((i, j)) } else { None }))
        .filter_map(|(i, j)| vals[i][j])
        .min();
    let mut branches = Vec::new();
    for (pos, &i) in finite.iter().enumerate() {
        let a = points[i].finite().unwrap();
        let earlier = finite[..pos].iter().filter_map(|&k| vals[i][k]).max();
        let (lower, lower_closed) = match earlier {
            Some(l) => (Some(l), false),
            None if has_inf => (None, false),
            None => (global_min, true),
        };
        let attach = nodes
            .iter()
            .enumerate()
            .filter(|(_, w)| w.contains(a))
            .max_by_key(|(_, w)| w.level)
            .map(|(j, _)| j)
            .unwrap_or(base);
        branches.push(HullBranch { point: i, attach, lower, lower_closed });
    }
    if has_inf {
        let i = points.iter().position(|p| matches!(p, P1Point::Infinity)).unwrap();
        let attach = (0..nodes.len()).min_by_key(|&j| nodes[j].level).unwrap();
        branches.push(HullBranch { point: i, attach, lower: None, lower_closed: false });
    }
    Ok(HullTree { points: points.to_vec(), nodes, edges, branches, base })
}

impl HullTree {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph hull {\n");
        for (i, v) in self.nodes.iter().enumerate() {
            let extra = if i == self.base { ", shape=box" } else { "" };
            let _ = writeln!(s, "  n{} [label=\"{}\"{}];", i, v.label(), extra);
        }
        for (a, b, len) in &self.edges {
            let _ = writeln!(s, "  n{} -- n{} [label=\"{}\"];", a, b, len);
        }
        for br in &self.branches {
            let _ = writeln!(s, "  e{} [label=\"{}\", shape=plaintext];", br.point, self.points[br.point]);
            let _ = writeln!(s, "  n{} -- e{} [style=dashed];", br.attach, br.point);
        }
        s.push_str("}\n");
        s
    }
}
