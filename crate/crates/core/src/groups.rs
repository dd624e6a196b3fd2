//! Order-`p` generators, words in the free product `⟨s_1⟩ * … * ⟨s_r⟩`, the
//! Schottky subgroup, generator normalization against edge foldings, and the
//! valuation checks along orbits used by the theta product.
//!
//! Generators are indexed from 0 internally; `Display` prints them from 1.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::bt_tree::{distance, mirror_distance, path, step_toward, Edge, MirrorData, Moebius, P1Point, TreeVertex};
use crate::error::{GroupError, TreeError};
use crate::valfield::{FieldParams, LaurentElem};

/// An element of order `p` with a unique fixed point.
#[derive(Clone, Debug)]
pub struct ParabolicGen {
    pub matrix: Moebius,
    pub fixed_point: P1Point,
    /// `(P, η)` when built from the `η`-form.
    pub normal_form: Option<(P1Point, LaurentElem)>,
}

impl ParabolicGen {
    /// Wrap an arbitrary matrix, checking that it is parabolic.
    pub fn from_matrix(matrix: Moebius) -> Result<Self, GroupError> {
        let fixed_point = matrix.parabolic_fixed_point()?;
        Ok(ParabolicGen { matrix, fixed_point, normal_form: None })
    }
}

/// The parabolic element fixing `P` with parameter `η`:
/// `[[1,0],[η,1]]` at `0`, `[[1,η],[0,1]]` at `∞`, and otherwise
/// `[[P(P−η), ηP²], [−η, P(P+η)]]`.
pub fn make_parabolic(point: &P1Point, eta: &LaurentElem) -> Result<ParabolicGen, GroupError> {
    if eta.is_zero() {
        return Err(TreeError::NotParabolic.into());
    }
    let params = eta.params().clone();
    let one = LaurentElem::one(&params);
    let zero = LaurentElem::zero(&params);
    let matrix = match point {
        P1Point::Infinity => Moebius::new(one.clone(), eta.clone(), zero, one)?,
        P1Point::Finite(pt) if pt.is_zero() => Moebius::new(one.clone(), zero, eta.clone(), one)?,
        P1Point::Finite(pt) => {
            let pp = pt * pt;
            Moebius::new(pt * &(pt - eta), eta * &pp, -eta, pt * &(pt + eta))?
        }
    };
    Ok(ParabolicGen { matrix, fixed_point: point.clone(), normal_form: Some((point.clone(), eta.clone())) })
}

/// Reduced word `s_{i_1}^{n_1} ⋯ s_{i_m}^{n_m}` with `1 ≤ n_k ≤ p − 1` and
/// adjacent indices distinct.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WordNF {
    letters: Vec<(usize, u32)>,
}

impl WordNF {
    pub fn identity() -> Self {
        WordNF { letters: Vec::new() }
    }

    pub fn letter(i: usize, n: u32) -> Self {
        WordNF { letters: vec![(i, n)] }
    }

    /// Reduce an arbitrary sequence of powers modulo `p`.
    pub fn from_letters(letters: &[(usize, u32)], p: u32) -> Self {
        let mut w = WordNF::identity();
        for &(i, n) in letters {
            w.push(i, n, p);
        }
        w
    }

    fn push(&mut self, i: usize, n: u32, p: u32) {
        let n = n % p;
        if n == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some((j, m)) if *j == i => {
                let s = (*m + n) % p;
                if s == 0 {
                    self.letters.pop();
                } else {
                    *m = s;
                }
            }
            _ => self.letters.push((i, n)),
        }
    }

    pub fn letters(&self) -> &[(usize, u32)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first_index(&self) -> Option<usize> {
        self.letters.first().map(|l| l.0)
    }

    pub fn mul(&self, other: &WordNF, p: u32) -> WordNF {
        let mut w = self.clone();
        for &(i, n) in &other.letters {
            w.push(i, n, p);
        }
        w
    }

    pub fn inverse(&self, p: u32) -> WordNF {
        WordNF { letters: self.letters.iter().rev().map(|&(i, n)| (i, p - n)).collect() }
    }
}

impl fmt::Display for WordNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(i, n)| if n == 1 { format!("s{}", i + 1) } else { format!("s{}^{}", i + 1, n) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A family of parabolic generators, with the auxiliary point `u` when known.
#[derive(Clone, Debug)]
pub struct GroupData {
    pub p: u32,
    pub gens: Vec<ParabolicGen>,
    pub u: Option<P1Point>,
}

impl GroupData {
    pub fn new(gens: Vec<ParabolicGen>, u: Option<P1Point>) -> Result<Self, GroupError> {
        let first = gens.first().ok_or(GroupError::TooFewGenerators(1))?;
        let p = first.matrix.params().p();
        Ok(GroupData { p, gens, u })
    }

    pub fn r(&self) -> usize {
        self.gens.len()
    }

    pub fn params(&self) -> &FieldParams {
        self.gens[0].matrix.params()
    }

    /// Is the first generator's fixed point exactly `0`?
    pub fn p1_is_zero(&self) -> bool {
        matches!(&self.gens[0].fixed_point, P1Point::Finite(x) if x.is_zero())
    }
}

/// All reduced words of length `≤ max_len` over `r` generators of order `p`,
/// shortest first.
pub fn enumerate_words_rp(r: usize, p: u32, max_len: usize) -> Vec<WordNF> {
    let mut out = vec![WordNF::identity()];
    let mut frontier = vec![WordNF::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            let last = w.letters.last().map(|l| l.0);
            for i in 0..r {
                if Some(i) == last {
                    continue;
                }
                for n in 1..p {
                    let mut v = w.clone();
                    v.letters.push((i, n));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn enumerate_words(g: &GroupData, max_len: usize) -> Vec<WordNF> {
    enumerate_words_rp(g.r(), g.p, max_len)
}

/// Number of reduced words of length exactly `m`: `r(r−1)^{m−1}(p−1)^m`.
pub fn word_count(r: usize, p: u32, m: usize) -> u64 {
    if m == 0 {
        return 1;
    }
    (r as u64) * (r as u64 - 1).pow(m as u32 - 1) * (p as u64 - 1).pow(m as u32)
}

/// Evaluates words, caching generator powers.
pub struct WordEvaluator<'a> {
    g: &'a GroupData,
    powers: HashMap<(usize, u32), Moebius>,
}

impl<'a> WordEvaluator<'a> {
    pub fn new(g: &'a GroupData) -> Self {
        let mut powers = HashMap::new();
        for (i, gen) in g.gens.iter().enumerate() {
            let mut acc = gen.matrix.clone();
            powers.insert((i, 1), acc.clone());
            for n in 2..g.p {
                acc = acc.compose(&gen.matrix);
                powers.insert((i, n), acc.clone());
            }
        }
        WordEvaluator { g, powers }
    }

    pub fn eval(&self, w: &WordNF) -> Moebius {
        let mut acc = Moebius::identity(self.g.params());
        for l in &w.letters {
            acc = acc.compose(&self.powers[l]);
        }
        acc
    }
}

pub fn eval_word(g: &GroupData, w: &WordNF) -> Moebius {
    WordEvaluator::new(g).eval(w)
}

/// `s_i^n s_{i+1}^{−n}` for `1 ≤ i ≤ r − 1`, `1 ≤ n ≤ p − 1`.
pub fn schottky_gens(g: &GroupData) -> Vec<WordNF> {
    schottky_words(g.r(), g.p)
}

pub fn schottky_words(r: usize, p: u32) -> Vec<WordNF> {
    let mut out = Vec::new();
    for i in 0..r.saturating_sub(1) {
        for n in 1..p {
            out.push(WordNF { letters: vec![(i, n), (i + 1, p - n)] });
        }
    }
    out
}

/// Pairwise mirror data; `xi[i][j]` is the vertex of `M(s_i)` closest to `M(s_j)`.
#[derive(Clone, Debug)]
pub struct MirrorTable {
    pub d: Vec<Vec<i64>>,
    pub xi: Vec<Vec<Option<TreeVertex>>>,
}

impl MirrorTable {
    pub fn compute(g: &GroupData) -> Result<Self, GroupError> {
        let r = g.r();
        let mut d = vec![vec![0; r]; r];
        let mut xi = vec![vec![None; r]; r];
        for i in 0..r {
            for j in i + 1..r {
                let MirrorData { d: dij, xi1, xi2, .. } = mirror_distance(&g.gens[i].matrix, &g.gens[j].matrix)?;
                d[i][j] = dij;
                d[j][i] = dij;
                xi[i][j] = Some(xi1);
                xi[j][i] = Some(xi2);
            }
        }
        Ok(MirrorTable { d, xi })
    }

    /// `Σ_{i,j} dist(M(s_i), M(s_j))` over ordered pairs.
    pub fn metric(&self) -> i64 {
        self.d.iter().flatten().sum()
    }

    pub fn max_distance(&self) -> i64 {
        self.d.iter().flatten().copied().max().unwrap_or(0)
    }

    /// `e_i(j)`: the edge of `[ξ_i(j), ξ_j(i)]` at `ξ_i(j)`.
    pub fn exit_edge(&self, i: usize, j: usize) -> Edge {
        let a = self.xi[i][j].clone().unwrap();
        let b = self.xi[j][i].clone().unwrap();
        Edge::new(a.clone(), step_toward(&a, &b))
    }
}

/// One conjugation step of [`normalize_generators`].
#[derive(Clone, Debug)]
pub struct Rewrite {
    pub m: usize,
    pub n: u32,
    pub conjugated: Vec<usize>,
    pub metric_before: i64,
    pub metric_after: i64,
}

#[derive(Clone, Debug)]
pub struct NormalizeReport {
    pub data: GroupData,
    pub rewrites: Vec<Rewrite>,
    /// `w_i` with `s_i' = w_i s_i w_i^{-1}` (words in the input generators).
    pub conjugators: Vec<WordNF>,
    pub radius: i64,
}

/// Edges where a folding is looked for: paths between all `ξ_i(j)`, plus
/// mirror edges within `radius` of each `ξ_i(j)`.
fn candidate_edges(g: &GroupData, table: &MirrorTable, radius: i64) -> HashSet<Edge> {
    let r = g.r();
    let xis: Vec<(usize, TreeVertex)> = (0..r)
        .flat_map(|i| (0..r).filter_map(move |j| table.xi[i][j].clone().map(|v| (i, v))))
        .collect();
    let mut edges = HashSet::new();
    for (a, (_, v)) in xis.iter().enumerate() {
        for (_, w) in xis.iter().skip(a + 1) {
            let pth = path(v, w);
            for win in pth.windows(2) {
                edges.insert(Edge::new(win[0].clone(), win[1].clone()));
            }
        }
    }
    for (i, v) in &xis {
        let s = &g.gens[*i].matrix;
        let mut seen: HashSet<TreeVertex> = HashSet::new();
        seen.insert(v.clone());
        let mut queue = VecDeque::from([(v.clone(), 0i64)]);
        while let Some((x, depth)) = queue.pop_front() {
            if depth >= radius {
                continue;
            }
            for y in x.neighbors() {
                if s.is_fixed(&y) {
                    edges.insert(Edge::new(x.clone(), y.clone()));
                    if seen.insert(y.clone()) {
                        queue.push_back((y, depth + 1));
                    }
                }
            }
        }
    }
    edges
}

/// Look for distinct candidate edges with `e = s_m^n(e′)`.
fn find_folding(g: &GroupData, edges: &HashSet<Edge>) -> Result<Option<(usize, u32)>, GroupError> {
    let ev = WordEvaluator::new(g);
    for m in 0..g.r() {
        for n in 1..g.p {
            let h = ev.eval(&WordNF::letter(m, n));
            for e in edges {
                let img = Edge::new(h.apply_vertex(&e.0)?, h.apply_vertex(&e.1)?);
                if img != *e && edges.contains(&img) {
                    return Ok(Some((m, n)));
                }
            }
        }
    }
    Ok(None)
}

/// Conjugate the generators in `set` by `s_m^n`.
fn conjugate_subfamily(g: &GroupData, m: usize, n: u32, set: &[usize]) -> Result<GroupData, GroupError> {
    let h = eval_word(g, &WordNF::letter(m, n));
    let mut out = g.clone();
    for &i in set {
        let mat = g.gens[i].matrix.conjugate_by(&h);
        let fixed_point = h.apply_point(&g.gens[i].fixed_point)?;
        out.gens[i] = ParabolicGen { matrix: mat, fixed_point, normal_form: None };
    }
    Ok(out)
}

/// Rewrite the family by conjugations inside `N` until no edge of the
/// spanned subtree is folded onto another by a generator power (within the
/// search radius). Each rewrite strictly lowers the sum of pairwise mirror
/// distances.
pub fn normalize_generators(g: &GroupData, radius: Option<i64>) -> Result<NormalizeReport, GroupError> {
    let p = g.p;
    let r = g.r();
    let mut conjugators = vec![WordNF::identity(); r];
    if r < 2 {
        return Ok(NormalizeReport { data: g.clone(), rewrites: Vec::new(), conjugators, radius: 0 });
    }
    let mut cur = g.clone();
    let mut table = MirrorTable::compute(&cur)?;
    let radius = radius.unwrap_or(2 * table.max_distance());
    let mut rewrites = Vec::new();
    loop {
        let edges = candidate_edges(&cur, &table, radius);
        let Some((m, n)) = find_folding(&cur, &edges)? else {
            break;
        };
        let before = table.metric();
        // classes of exit edges at M(s_m)
        let mut classes: Vec<(Edge, Vec<usize>)> = Vec::new();
        for j in (0..r).filter(|&j| j != m) {
            let e = table.exit_edge(m, j);
            match classes.iter_mut().find(|(f, _)| *f == e) {
                Some((_, v)) => v.push(j),
                None => classes.push((e, vec![j])),
            }
        }
        let mut accepted = None;
        for (_, set) in &classes {
            let cand = conjugate_subfamily(&cur, m, n, set)?;
            let ct = MirrorTable::compute(&cand)?;
            if ct.metric() < before {
                accepted = Some((cand, ct, set.clone()));
                break;
            }
        }
        let Some((cand, ct, set)) = accepted else {
            return Err(GroupError::SearchRadiusExceeded { radius });
        };
        // s_m^n in input generators is w_m s_m^n w_m^{-1}
        let wm = &conjugators[m];
        let conj = wm.mul(&WordNF::letter(m, n), p).mul(&wm.inverse(p), p);
        for &i in &set {
            conjugators[i] = conj.mul(&conjugators[i], p);
        }
        rewrites.push(Rewrite { m, n, conjugated: set, metric_before: before, metric_after: ct.metric() });
        cur = cand;
        table = ct;
    }
    Ok(NormalizeReport { data: cur, rewrites, conjugators, radius })
}

/// Counts of passed checks per assertion of [`huti_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HutiReport {
    pub words_checked: usize,
    pub passed: [usize; 6],
}

fn val_point(x: &P1Point) -> Option<i64> {
    match x {
        P1Point::Finite(a) => Some(a.val_pi_capped()),
        P1Point::Infinity => None,
    }
}

/// Valuation checks along orbits of `P_i` and `u` for all words of length
/// `≤ max_len`, in a coordinate with `P_1 = 0` and `s_2` fixing `P_2`:
///
/// 1. `val s_2^n(P_1) = val η`
/// 2. `val s_2^n(u) = val P_2`
/// 3. `val s_1^n(u) = 0`
/// 4. `val γ(P_i) > val P_2` for `i ≠ 2`
/// 5. `val(γ(u) − P_2) = val P_2`
/// 6. `val γ(P_1) ≥ val γ(u)`
pub fn huti_check(g: &GroupData, u: &P1Point, max_len: usize) -> Result<HutiReport, GroupError> {
    let pre = |s: &str| GroupError::PreconditionViolated(s.to_string());
    if g.r() < 2 {
        return Err(GroupError::TooFewGenerators(2));
    }
    if !g.p1_is_zero() {
        return Err(pre("P_1 = 0"));
    }
    let p2 = match &g.gens[1].fixed_point {
        P1Point::Finite(x) if !x.is_zero() => x.clone(),
        _ => return Err(pre("P_2 finite and nonzero")),
    };
    let v2 = p2.val_pi_capped();
    for (i, gen) in g.gens.iter().enumerate() {
        if i != 1 && val_point(&gen.fixed_point).is_none_or(|v| v <= v2) {
            return Err(pre("|P_i| < |P_2| for i != 2"));
        }
    }
    let uu = match u {
        P1Point::Finite(x) => x.clone(),
        P1Point::Infinity => return Err(pre("|u| = |u - P_2| = |P_2|")),
    };
    if uu.val_pi_capped() != v2 || (&uu - &p2).val_pi_capped() != v2 {
        return Err(pre("|u| = |u - P_2| = |P_2|"));
    }
    let md = mirror_distance(&g.gens[0].matrix, &g.gens[1].matrix)?;
    let veta = md.eta.val_pi_capped();
    if veta <= v2 {
        return Err(pre("|eta| < |P_2|"));
    }

    let ev = WordEvaluator::new(g);
    let mut report = HutiReport::default();
    let fail = |item: u8, w: &WordNF| GroupError::AssertionFailed { item, word: w.to_string() };
    let p1 = g.gens[0].fixed_point.clone();
    if max_len >= 1 {
        for n in 1..g.p {
            let w2 = WordNF::letter(1, n);
            let s2n = ev.eval(&w2);
            if val_point(&s2n.apply_point(&p1)?) != Some(veta) {
                return Err(fail(1, &w2));
            }
            report.passed[0] += 1;
            if val_point(&s2n.apply_point(u)?) != Some(v2) {
                return Err(fail(2, &w2));
            }
            report.passed[1] += 1;
            let w1 = WordNF::letter(0, n);
            if val_point(&ev.eval(&w1).apply_point(u)?) != Some(0) {
                return Err(fail(3, &w1));
            }
            report.passed[2] += 1;
        }
    }
    for w in enumerate_words(g, max_len) {
        let gam = ev.eval(&w);
        for (i, gen) in g.gens.iter().enumerate() {
            if i == 1 {
                continue;
            }
            if val_point(&gam.apply_point(&gen.fixed_point)?).is_none_or(|v| v <= v2) {
                return Err(fail(4, &w));
            }
            report.passed[3] += 1;
        }
        let gu = gam.apply_point(u)?;
        let gu_val = val_point(&gu);
        match &gu {
            P1Point::Finite(x) if (x - &p2).val_pi_capped() == v2 => report.passed[4] += 1,
            _ => return Err(fail(5, &w)),
        }
        let gp1 = val_point(&gam.apply_point(&p1)?);
        match (gp1, gu_val) {
            (Some(a), Some(b)) if a >= b => report.passed[5] += 1,
            _ => return Err(fail(6, &w)),
        }
        report.words_checked += 1;
    }
    Ok(report)
}

/// Does `γ` fix `v`, for every word of length `≤ max_len` other than the
/// identity? Returns the offending words: a sampled check that stabilizers
/// stay finite.
pub fn stabilizer_sample(g: &GroupData, v: &TreeVertex, max_len: usize) -> Vec<WordNF> {
    let ev = WordEvaluator::new(g);
    enumerate_words(g, max_len)
        .into_iter()
        .filter(|w| !w.is_empty())
        .filter(|w| ev.eval(w).is_fixed(v))
        .collect()
}

/// Displacement `d(v, γ v)` helper for tests and reports.
pub fn displacement(g: &Moebius, v: &TreeVertex) -> Result<i64, GroupError> {
    Ok(distance(v, &g.apply_vertex(v)?))
}
