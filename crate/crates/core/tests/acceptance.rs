//! Acceptance gate: one PASS/FAIL line per criterion. Each criterion runs the
//! library's claim checks and, where one exists, an oracle written here from
//! first principles.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::process::ExitCode;

use num_traits::{One, Zero};
use rand::Rng;

use stdvb::random::{self, random_bundle, random_matrix};
use stdvb::verify::{self, Chain};
use stdvb::{FiniteSite, Matrix, MorId, ObjId, ProjSite, Rational, RingDesc, RingElem, Sieve, StdBundle};

const SEED: u64 = 20_240_601;

type Check = Result<(), String>;
type Criterion = fn() -> Check;

fn claims(ids: &[(&str, usize)]) -> Check {
    for &(id, trials) in ids {
        let rep = verify::run(id, SEED, trials, false).map_err(|e| e.to_string())?;
        let r = &rep.results[0];
        if !r.passed {
            return Err(format!("{id}: {}", r.counterexample.clone().unwrap_or_default()));
        }
    }
    Ok(())
}

fn sites() -> [ProjSite; 2] {
    let q = RingDesc::rationals();
    [ProjSite::new(1, &q).unwrap(), ProjSite::new(2, &q).unwrap()]
}

fn kron_oracle(a: &Matrix, b: &Matrix) -> Vec<Vec<RingElem>> {
    let (p, q) = (b.rows(), b.cols());
    let mut out = vec![vec![RingElem::zero(a.ring()); a.cols() * q]; a.rows() * p];
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for k in 0..p {
                for l in 0..q {
                    out[i * p + k][j * q + l] = a.get(i, j) * b.get(k, l);
                }
            }
        }
    }
    out
}

fn block_oracle(a: &Matrix, b: &Matrix) -> Vec<Vec<RingElem>> {
    let mut out = vec![vec![RingElem::zero(a.ring()); a.cols() + b.cols()]; a.rows() + b.rows()];
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[i][j] = a.get(i, j).clone();
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            out[a.rows() + i][a.cols() + j] = b.get(i, j).clone();
        }
    }
    out
}

fn same(m: &Matrix, rows: &[Vec<RingElem>]) -> bool {
    m.rows() == rows.len()
        && rows
            .iter()
            .enumerate()
            .all(|(i, r)| m.cols() == r.len() && r.iter().enumerate().all(|(j, e)| m.get(i, j) == e))
}

fn criterion_1() -> Check {
    claims(&[("kron-assoc", 100), ("kron-1x1-comm", 100), ("kron-mixed", 100), ("notcommgen", 1)])?;
    let mut rng = random::rng(SEED);
    let ring = RingDesc::new(&["t", "s"], &["t"]).unwrap();
    for _ in 0..100 {
        let d: [usize; 4] = std::array::from_fn(|_| rng.gen_range(1..=4));
        let a = random_matrix(&mut rng, &ring, d[0], d[1], 2);
        let b = random_matrix(&mut rng, &ring, d[2], d[3], 2);
        if !same(&a.kron(&b).unwrap(), &kron_oracle(&a, &b)) {
            return Err(format!("kron order differs from the indexed oracle: A={a:?} B={b:?}"));
        }
    }
    Ok(())
}

fn members(s: &Sieve) -> BTreeSet<MorId> {
    s.members().clone()
}

/// All closed subsets of the arrows into `u`, found by brute force.
fn closed_sets(s: &FiniteSite, u: ObjId) -> Vec<BTreeSet<MorId>> {
    let into = s.arrows_into(u);
    let mut out = Vec::new();
    for bits in 0u32..1 << into.len() {
        let set: BTreeSet<MorId> = (0..into.len()).filter(|i| bits >> i & 1 == 1).map(|i| into[i]).collect();
        let closed =
            set.iter().all(|&m| s.arrows_into(s.source(m)).iter().all(|&g| set.contains(&s.compose(m, g).unwrap())));
        if closed {
            out.push(set);
        }
    }
    out
}

fn criterion_2() -> Check {
    claims(&[("sieve-closure", 1), ("sievecap", 1), ("strpb", 1)])?;
    for ps in sites() {
        let s = ps.site();
        for u in s.object_ids() {
            let closed = closed_sets(s, u);
            let sieves: Vec<Sieve> = closed.iter().map(|c| s.sieve_from_members(u, c.clone()).unwrap()).collect();
            let belongs = |c: &BTreeSet<MorId>| s.coverings(u).iter().any(|d| d.iter().all(|m| c.contains(m)));
            for (c, h) in closed.iter().zip(&sieves) {
                if s.sieve_belongs(h) != belongs(c) {
                    return Err(format!("covering verdict differs on `{}`: {c:?}", s.object(u).name));
                }
                for &g in s.arrows_into(u) {
                    let want: BTreeSet<MorId> = s
                        .arrows_into(s.source(g))
                        .iter()
                        .copied()
                        .filter(|&m| c.contains(&s.compose(g, m).unwrap()))
                        .collect();
                    if members(&s.sieve_pullback(g, h).unwrap()) != want {
                        return Err(format!("pullback along `{}` differs", s.arrow(g).name));
                    }
                }
                for (c2, h2) in closed.iter().zip(&sieves) {
                    let want: BTreeSet<MorId> = c.intersection(c2).copied().collect();
                    if members(&s.sieve_intersect(h, h2).unwrap()) != want {
                        return Err("intersection differs from the set intersection".into());
                    }
                    if belongs(c) && belongs(c2) && !belongs(&want) {
                        return Err(format!("covering sieves on `{}` meet in a non-covering sieve", s.object(u).name));
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_3() -> Check {
    claims(&[("sheaf-equiv", 100), ("section-pullback", 100), ("unitmap", 100), ("shffres", 100)])
}

fn criterion_4() -> Check {
    claims(&[
        ("ds-assoc", 100),
        ("ds-unit", 100),
        ("tp-assoc", 100),
        ("tp-unit", 100),
        ("tp-center", 100),
        ("tp-noncomm", 1),
    ])?;
    let mut rng = random::rng(SEED + 4);
    let sites = sites();
    for t in 0..100 {
        let ps = &sites[t % 2];
        let (r, q) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let e = random_bundle(&mut rng, ps, r, 2).unwrap();
        let f = random_bundle(&mut rng, ps, q, 2).unwrap();
        let sum = e.direct_sum(&f).unwrap();
        let prod = e.tensor(&f).unwrap();
        for &m in e.presheaf().restrictions().keys() {
            let (a, b) = (e.restriction(m).unwrap(), f.restriction(m).unwrap());
            if !same(sum.restriction(m).unwrap(), &block_oracle(a, b)) {
                return Err(format!("E⊕F along `{}` is not the block matrix", ps.site().arrow(m).name));
            }
            if !same(prod.restriction(m).unwrap(), &kron_oracle(a, b)) {
                return Err(format!("E⊗F along `{}` is not the Kronecker product", ps.site().arrow(m).name));
            }
        }
    }
    Ok(())
}

/// `f*E` stores `E` at the image arrow, verbatim.
fn pulled_back_verbatim(e: &StdBundle, f: &stdvb::SiteMorphism) -> bool {
    let p = e.pullback(f).unwrap();
    p.presheaf().restrictions().iter().all(|(&m, a)| e.restriction(f.map_arrow(m)).map(|b| a == b).unwrap_or(false))
}

fn criterion_5() -> Check {
    claims(&[("functvb", 25), ("ds-pullback", 25), ("tp-pullback", 25)])?;
    let mut rng = random::rng(SEED + 5);
    let chain = Chain::new(1).unwrap();
    for _ in 0..25 {
        let r = rng.gen_range(0..=3);
        let e = random_bundle(&mut rng, &chain.x, r, 2).unwrap();
        for f in [&chain.f, &chain.fg] {
            if !pulled_back_verbatim(&e, f) {
                return Err("pullback does not reuse the data at image arrows".into());
            }
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    claims(&[("oninf", 1), ("onfunc", 1), ("twist-tensor", 1)])?;
    let ps = &sites()[0];
    let s = ps.site();
    let ring = s.ring(ps.chart(0, &[0, 1]).unwrap()).clone();
    for n in -3..=3i64 {
        let o = ps.twisted_bundle(n).unwrap();
        // largest chart of U01 is U1, so along U01 → U0 the factor is (x0/x1)^n
        let want = RingElem::parse(&ring, &format!("x0/x1^{n}")).unwrap();
        let to_u0 = s.arrow_by_name("U01->U0").unwrap();
        let to_u1 = s.arrow_by_name("U01->U1").unwrap();
        if *o.restriction(to_u0).unwrap().get(0, 0) != want || !o.restriction(to_u1).unwrap().is_identity() {
            return Err(format!("O({n}) restrictions differ from (x0/x1)^n"));
        }
    }
    claims(&[("oninf-min-negative", 1)])
}

/// Rank of a rational matrix by plain Gaussian elimination.
fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let k = &rows[i][c] / &pivot;
                for j in 0..cols {
                    let d = &k * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Global sections of O(n) on the projective line as pairs
/// `f0 ∈ Q[x1/x0]`, `f1 ∈ Q[x0/x1]` with `f1(u) = u^n f0(1/u)`, degrees at
/// most `b`, counted by matching coefficients of `u`.
fn brute_force_h0(n: i64, b: i64) -> usize {
    let unknowns = 2 * (b + 1) as usize;
    let lo = (n - b).min(0);
    let hi = n.max(b);
    let mut rows = Vec::new();
    for k in lo..=hi {
        let mut row = vec![Rational::zero(); unknowns];
        for i in 0..=b {
            if n - i == k {
                row[i as usize] += Rational::one();
            }
        }
        if (0..=b).contains(&k) {
            row[(b + 1 + k) as usize] -= Rational::one();
        }
        rows.push(row);
    }
    unknowns - rank(rows)
}

fn criterion_7() -> Check {
    claims(&[("biproduct", 50), ("exact-split", 50), ("exact-tensor", 50), ("tensor-zero", 50), ("hom-dim", 1)])?;
    let ps = &sites()[0];
    for n in -3..=3i64 {
        let oracle = brute_force_h0(n, n.abs() + 3);
        let classical = (n + 1).max(0) as usize;
        let got = ps.global_sections_dim(n).map_err(|e| e.to_string())?;
        if oracle != classical || got != oracle {
            return Err(format!("n = {n}: library {got}, coefficient oracle {oracle}, classical {classical}"));
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    claims(&[("cocycle-roundtrip", 50), ("cocycle-twist", 1)])
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("Kronecker strictness", criterion_1),
        ("sieve calculus", criterion_2),
        ("section calculus", criterion_3),
        ("strict monoidal suite", criterion_4),
        ("pullback strictness", criterion_5),
        ("twisted bundles", criterion_6),
        ("morphisms and exactness", criterion_7),
        ("cocycle round trip", criterion_8),
    ];
    let mut all = true;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS criterion {} ({name})", k + 1),
            Err(why) => {
                all = false;
                println!("FAIL criterion {} ({name}): {why}", k + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
