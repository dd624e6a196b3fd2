//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! fails. Randomized criteria replay with `MUMFORD_SEED`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use mumford::bt_tree::{distance, lattice_distance, mirror_distance, path, scan_mirrors, P1Point};
use mumford::covering::{build_thresholds, run_suite};
use mumford::criterion::{evaluate, genus, is_mumford, moebius_transform, BranchData};
use mumford::error::{CoveringError, CriterionError, TreeError};
use mumford::groups::{huti_check, make_parabolic};
use mumford::theta::{expand_at, recover_lambda, theta_alpha, theta_x, ThetaConfig};
use mumford::valfield::{artin_schreier_solve, ArtinSchreier, LaurentElem, Valu, DEFAULT_REL_PREC};
use rand::Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Riemann-Hurwitz for a degree-`p` Artin-Schreier cover of the line with
/// `r` simple poles: each is totally ramified with different exponent `2(p−1)`.
fn genus_by_hurwitz(p: i64, r: i64) -> i64 {
    let two_g_minus_two = p * -2 + r * 2 * (p - 1);
    assert_eq!(two_g_minus_two % 2, 0);
    two_g_minus_two / 2 + 1
}

fn c1_genus() -> Result<String, String> {
    let mut n = 0;
    for p in [2u32, 3, 5, 7] {
        for r in 2..=6usize {
            if p == 2 && r == 2 {
                continue;
            }
            let g = genus(p, r) as i64;
            ensure(g == genus_by_hurwitz(p as i64, r as i64), || format!("p={} r={} gives {}", p, r, g))?;
            n += 1;
        }
    }
    Ok(format!("{} (p, r) pairs", n))
}

fn c2_criterion_invariance() -> Result<String, String> {
    let mut rng = rng(2);
    let (mut total, mut positive) = (0, 0);
    for &p in &[3u32, 2] {
        let k = field(p, 1, 1);
        for n in 0..50 {
            let r = rng.gen_range(if p == 2 { 3 } else { 2 }..=4);
            let bd = if n % 2 == 0 { rand_mumford(&mut rng, &k, r, -3, 3) } else { rand_branch_data(&mut rng, &k, r, -3, 3) };
            let (moved, g) = loop {
                let g = rand_moebius(&mut rng, &k, -2, 2);
                match moebius_transform(&bd, &g) {
                    Ok((m, _)) => break (m, g),
                    Err(CriterionError::BranchPointSentToInfinity(_)) => continue,
                    Err(e) => return Err(format!("transform failed: {}", e)),
                }
            };
            let before = is_mumford(&bd).map_err(|e| e.to_string())?;
            let after = is_mumford(&moved).map_err(|e| e.to_string())?;
            ensure(before.is_mumford == after.is_mumford, || {
                format!("verdict changed under {:?}: {:?} vs {:?}", g.entries(), bd.lambda(), moved.lambda())
            })?;
            ensure(before.margins == after.margins, || "margins changed".into())?;
            total += 1;
            positive += before.is_mumford as usize;
        }
    }
    Ok(format!("{} pairs, {} Mumford", total, positive))
}

fn c3_tree_oracles() -> Result<String, String> {
    let mut rng = rng(3);
    for p in [2u32, 3] {
        let k = field(p, 1, 1);
        for _ in 0..250 {
            let v = rand_vertex(&mut rng, &k, -4, 4);
            let w = rand_vertex(&mut rng, &k, -4, 4);
            let d = distance(&v, &w);
            ensure(d == lattice_distance(&v, &w), || format!("{} {}: formula {} vs lattice", v.label(), w.label(), d))?;
            ensure(d as usize + 1 == path(&v, &w).len(), || "path length disagrees".into())?;
        }
    }
    let k = field(3, 1, 1);
    for _ in 0..100 {
        let g = rand_moebius(&mut rng, &k, -2, 2);
        let v = rand_vertex(&mut rng, &k, -3, 3);
        let w = rand_vertex(&mut rng, &k, -3, 3);
        let gv = g.apply_vertex(&v).map_err(|e| e.to_string())?;
        let gw = g.apply_vertex(&w).map_err(|e| e.to_string())?;
        ensure(distance(&gv, &gw) == distance(&v, &w), || "Moebius action is not an isometry".into())?;
    }
    Ok("500 vertex pairs, 100 isometries".into())
}

fn c4_mirror_distance() -> Result<String, String> {
    let mut checked = 0;
    for p in [2u32, 3, 5] {
        let k = field(p, 1, 1);
        let t = |n| LaurentElem::t_pow(&k, n);
        let points = [
            P1Point::Finite(LaurentElem::zero(&k)),
            P1Point::Finite(LaurentElem::one(&k)),
            P1Point::Finite(t(1)),
            P1Point::Finite(t(-1)),
            P1Point::Finite(&LaurentElem::one(&k) + &t(2)),
            P1Point::Infinity,
        ];
        let etas1 = [LaurentElem::one(&k), t(-1), t(2)];
        let mut etas2 = Vec::new();
        for n in -6..=1 {
            etas2.push(t(n));
            if p > 2 {
                etas2.push(LaurentElem::monomial(&k, p - 1, n));
            }
        }
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                for e1 in &etas1 {
                    for e2 in &etas2 {
                        let g1 = make_parabolic(a, e1).map_err(|e| e.to_string())?.matrix;
                        let g2 = make_parabolic(b, e2).map_err(|e| e.to_string())?.matrix;
                        let nf = match mirror_distance(&g1, &g2) {
                            Ok(m) => m.d,
                            Err(TreeError::MirrorsIntersect) => 0,
                            Err(e) => return Err(e.to_string()),
                        };
                        if nf > 6 {
                            continue;
                        }
                        let scan = scan_mirrors(&g1, &g2, 16).map_err(|e| e.to_string())?;
                        let (sd, _, _) = scan
                            .closest()
                            .ok_or_else(|| format!("p={} {} {} eta {} {}: scan saw no fixed vertex (nf {})", p, a, b, e1, e2, nf))?;
                        ensure(sd == nf, || format!("p={} {} {} eta {} {}: normal form {} scan {}", p, a, b, e1, e2, nf, sd))?;
                        ensure(scan.convex(), || "fixed set along geodesic is not a segment".into())?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{} pairs", checked))
}

/// Every assertion of the covering suite on one instance, plus a sampling
/// check that random points land in some piece.
fn covering_checks(bd: &BranchData, rng: &mut impl Rng, samples: usize) -> Result<usize, String> {
    let s = match run_suite(bd) {
        Ok(s) => s,
        Err(CoveringError::MultipleMinimizers(i, j)) => return Err(format!("minimizer not unique: {} {}", i, j)),
        Err(e) => return Err(format!("{} on {:?} / {:?}", e, bd.a(), bd.lambda())),
    };
    ensure(s.normal_form_failures.is_empty(), || format!("normal form: {:?}", s.normal_form_failures))?;
    for (pc, rep) in s.pieces.iter().zip(&s.reports) {
        ensure(rep.lambda_set.is_empty() || rep.m.is_some(), || format!("no minimizer on {}", pc))?;
        ensure(rep.passes_condition, || format!("piece {} fails ({})", pc, rep.shape.name()))?;
    }
    let k = bd.params();
    for _ in 0..samples {
        let x = if rng.gen_ratio(1, 2) {
            let i = rng.gen_range(0..bd.r());
            &bd.a()[i] + &rand_elem(rng, k, -2, 6)
        } else {
            rand_elem_or_zero(rng, k, -5, 5)
        };
        ensure(s.pieces.iter().any(|pc| pc.contains(&x)), || format!("{} lies in no piece", x))?;
    }
    Ok(s.pieces.len())
}

fn c5_covering() -> Result<String, String> {
    let mut rng = rng(5);
    let mut pieces = 0;
    for n in 0..50 {
        let p = if n % 2 == 0 { 2 } else { 3 };
        let k = field(p, 1, 1);
        let r = rng.gen_range(2..=4);
        let bd = rand_mumford(&mut rng, &k, r, -3, 3);
        pieces += covering_checks(&bd, &mut rng, 20)?;
    }
    Ok(format!("50 instances, {} pieces", pieces))
}

fn c6_negative_control() -> Result<String, String> {
    let mut rng = rng(6);
    for n in 0..20 {
        let p = if n % 2 == 0 { 2 } else { 3 };
        let k = field(p, 1, 1);
        let r = rng.gen_range(3..=4);
        let bd = rand_violating(&mut rng, &k, r, -3, 3);
        let v = is_mumford(&bd).map_err(|e| e.to_string())?;
        let (i, j) = v.witness.ok_or("no witness")?;
        let margin = |i: usize, j: usize| {
            let d = (&bd.a()[i] - &bd.a()[j]).valuation();
            let s = bd.lambda()[i].valuation() + bd.lambda()[j].valuation();
            (s.finite().unwrap() - d.finite().unwrap() * 2).to_integer()
        };
        ensure(margin(i, j) <= 0, || format!("witness ({}, {}) has positive margin", i, j))?;
        let first = (0..r).flat_map(|a| (a + 1..r).map(move |b| (a, b))).find(|&(a, b)| margin(a, b) <= 0);
        ensure(first == Some((i, j)), || format!("witness ({}, {}) is not the first violation {:?}", i, j, first))?;
        match build_thresholds(&bd) {
            Err(CoveringError::CriterionViolated(a, b)) if (a, b) == (i, j) => {}
            other => return Err(format!("thresholds gave {:?}", other.map(|_| ()))),
        }
    }
    Ok("20 violating inputs rejected".into())
}

fn c7_theta_identities() -> Result<String, String> {
    let mut n = 0;
    for p in [2u32, 3] {
        for d in 1..=3 {
            for l in 0..=6 {
                let cfg = ThetaConfig::standard(p, d, l).map_err(|e| e.to_string())?;
                let k = cfg.params().clone();
                let x2 = theta_x(&cfg, &cfg.p2()).map_err(|e| e.to_string())?;
                ensure(x2.is_exact() && x2 == LaurentElem::one(&k), || format!("x(P2) = {}", x2))?;
                let x1 = theta_x(&cfg, &cfg.fixed_point(1)).map_err(|e| e.to_string())?;
                ensure(x1.is_exact_zero(), || format!("x(P1) = {}", x1))?;
                let a = theta_alpha(&cfg).map_err(|e| e.to_string())?;
                ensure(a.valuation() == Valu::int(0), || format!("val alpha = {}", a.valuation()))?;
                for i in [1, 2] {
                    let e = expand_at(&cfg, i, p as usize).map_err(|e| e.to_string())?;
                    let c = &e.coeffs[1];
                    ensure(c.val_pi_capped() >= 40, || format!("p={} d={} L={} c_{{{},1}} = {}", p, d, l, i, c))?;
                }
                n += 1;
            }
        }
    }
    Ok(format!("{} (p, d, L) configurations", n))
}

fn c8_round_trip() -> Result<String, String> {
    let mut rng = rng(8);
    let mut out = Vec::new();
    for p in [2u32, 3] {
        for d in 1..=3 {
            let cfg = ThetaConfig::standard(p, d, 6).map_err(|e| e.to_string())?;
            let rec = recover_lambda(&cfg).map_err(|e| e.to_string())?;
            let sum = rec.lambda1.valuation() + rec.lambda2.valuation();
            ensure(sum >= Valu::int(d) && d >= 1, || format!("p={} d={}: val(l1 l2) = {}", p, d, sum))?;
            ensure(rec.bounds_hold(), || format!("p={} d={}: bounds {:?} fail", p, d, rec.bounds))?;
            let k = cfg.params();
            let bd = BranchData::new(vec![LaurentElem::zero(k), LaurentElem::one(k)], vec![rec.lambda1.clone(), rec.lambda2.clone()])
                .map_err(|e| e.to_string())?;
            ensure(evaluate(&bd).is_mumford, || "recovered data fails the criterion".into())?;
            covering_checks(&bd, &mut rng, 20)?;
            let (m1, m2) = rec.stability.unwrap();
            out.push(format!("p{}d{}:{}/{}", p, d, m1, m2));
        }
    }
    Ok(format!("stability {}", out.join(" ")))
}

fn c9_artin_schreier() -> Result<String, String> {
    let mut rng = rng(9);
    for n in 0..100 {
        let p = [2u32, 3, 5][n % 3];
        let k = field(p, 1 + (n % 2) as u32, 1);
        let c = rand_elem(&mut rng, &k, 1, 6);
        let cap = c.val_pi().unwrap() + DEFAULT_REL_PREC;
        let y = match artin_schreier_solve(&c) {
            ArtinSchreier::Solved(y) => y,
            other => return Err(format!("{} gave {:?}", c, other)),
        };
        let residual = &(&y.pow(p as i64).map_err(|e| e.to_string())? - &y) - &c;
        ensure(residual.val_pi_capped() >= cap, || format!("residual {} for {}", residual, c))?;
    }
    for n in 0..20 {
        let p = [2u32, 3, 5][n % 3];
        let k = field(p, 1, 1);
        let (c, expected) = if n % 2 == 0 {
            // pole order prime to p
            let m = loop {
                let m = rng.gen_range(1..=7i64);
                if m % p as i64 != 0 {
                    break m;
                }
            };
            let c = &LaurentElem::monomial(&k, rng.gen_range(1..p), -m) + &rand_elem_or_zero(&mut rng, &k, 1 - m, 3);
            (c, ArtinSchreier::ExtensionRequired { ramification: p, residue_degree: 1 })
        } else {
            // y^p − y = c₀ has no root in F_p for c₀ ≠ 0; shift by a p-th-power pole
            let gf = k.residue_field();
            let c0 = rng.gen_range(1..p);
            assert!(gf.elements().all(|y| gf.sub(gf.pow(y, p as u64), y) != c0));
            let m = LaurentElem::monomial(&k, rng.gen_range(1..p), -1);
            let pole = &m.pow(p as i64).unwrap() - &m;
            let c = &(&LaurentElem::constant(&k, c0) + &pole) + &rand_elem_or_zero(&mut rng, &k, 1, 4);
            (c, ArtinSchreier::ExtensionRequired { ramification: 1, residue_degree: p })
        };
        let got = artin_schreier_solve(&c);
        ensure(got == expected, || format!("{}: expected {:?}, got {:?}", c, expected, got))?;
    }
    Ok("100 solved, 20 extensions detected".into())
}

fn c10_huti() -> Result<String, String> {
    let mut words = 0;
    for p in [2u32, 3] {
        for d in 1..=3 {
            let cfg = ThetaConfig::standard(p, d, 5).map_err(|e| e.to_string())?;
            let rep = huti_check(&cfg.group, &P1Point::Finite(cfg.u.clone()), 5).map_err(|e| format!("p={} d={}: {}", p, d, e))?;
            ensure(rep.passed.iter().all(|&c| c > 0), || format!("some assertion never exercised: {:?}", rep.passed))?;
            words += rep.words_checked;
        }
    }
    Ok(format!("{} words", words))
}

fn main() {
    let checks: [(&str, Check); 10] = [
        ("genus formula", c1_genus),
        ("criterion invariance", c2_criterion_invariance),
        ("tree oracles", c3_tree_oracles),
        ("mirror distance", c4_mirror_distance),
        ("covering suite", c5_covering),
        ("negative control", c6_negative_control),
        ("theta identities", c7_theta_identities),
        ("round trip", c8_round_trip),
        ("Artin-Schreier solver", c9_artin_schreier),
        ("orbit valuation checks", c10_huti),
    ];
    println!("acceptance (MUMFORD_SEED={})", seed());
    let mut failed = 0;
    for (n, (name, f)) in checks.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} {:<24} PASS  {} [{:.2}s]", n + 1, name, detail, secs),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {:<24} FAIL  {} [{:.2}s]", n + 1, name, why, secs);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
