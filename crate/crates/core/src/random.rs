//! Seeded generators for randomized checks: Laurent matrices, bundles glued
//! from random unit transitions, and random refinements of section
//! representatives.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bundle::{cocycle_build, StdBundle, Transitions};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::presheaf::{FreePresheaf, SectionRep};
use crate::projective::ProjSite;
use crate::ring::{rat, Ring, RingElem};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A sum of up to `terms` monomials with small integer coefficients and
/// exponents in `[-deg, deg]` (`[0, deg]` for non-invertible variables).
pub fn random_elem(rng: &mut Rng64, ring: &Ring, terms: usize, deg: i32) -> RingElem {
    let mut acc = RingElem::zero(ring);
    for _ in 0..rng.gen_range(0..=terms) {
        let exps: Vec<i32> =
            ring.invertible_mask().iter().map(|&inv| rng.gen_range(if inv { -deg } else { 0 }..=deg)).collect();
        let c = rng.gen_range(-3i64..=3);
        let m = RingElem::monomial(ring, rat(c), exps).expect("exponents respect invertibility");
        acc = &acc + &m;
    }
    acc
}

pub fn random_matrix(rng: &mut Rng64, ring: &Ring, rows: usize, cols: usize, deg: i32) -> Matrix {
    let entries = (0..rows * cols).map(|_| random_elem(rng, ring, 3, deg)).collect();
    Matrix::new(ring, rows, cols, entries).expect("entries over the ring")
}

/// A random invertible matrix with its inverse, as a product of elementary,
/// permutation and scaling factors.
pub fn random_invertible(rng: &mut Rng64, ring: &Ring, n: usize, deg: i32) -> (Matrix, Matrix) {
    let mut m = Matrix::identity(ring, n);
    let mut inv = Matrix::identity(ring, n);
    if n == 0 {
        return (m, inv);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let (f, fi) = match rng.gen_range(0..3) {
            0 if n > 1 => {
                let (i, j) = distinct_pair(rng, n);
                let c = random_elem(rng, ring, 2, deg);
                let mut e = Matrix::identity(ring, n);
                e.set(i, j, c.clone());
                let mut ei = Matrix::identity(ring, n);
                ei.set(i, j, -&c);
                (e, ei)
            }
            1 if n > 1 => {
                let (i, j) = distinct_pair(rng, n);
                let mut p = Matrix::identity(ring, n);
                p.set(i, i, RingElem::zero(ring));
                p.set(j, j, RingElem::zero(ring));
                p.set(i, j, RingElem::one(ring));
                p.set(j, i, RingElem::one(ring));
                (p.clone(), p)
            }
            _ => {
                let i = rng.gen_range(0..n);
                let c = [1i64, -1, 2, -2, 3][rng.gen_range(0..5)];
                let mut d = Matrix::identity(ring, n);
                d.set(i, i, RingElem::constant(ring, rat(c)));
                let mut di = Matrix::identity(ring, n);
                di.set(i, i, RingElem::constant(ring, rat(c).recip()));
                (d, di)
            }
        };
        m = m.matmul(&f).expect("square");
        inv = fi.matmul(&inv).expect("square");
    }
    (m, inv)
}

fn distinct_pair(rng: &mut Rng64, n: usize) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    (i, j)
}

/// Transitions `T_ij = B_j⁻¹ · diag((x_i/x_j)^{d_a}) · B_i` on the chart
/// cover of layer 0, with random twists `d_a ∈ [-deg, deg]` and random
/// invertible `B_k` over the chart rings.
pub fn random_transitions(rng: &mut Rng64, ps: &ProjSite, rank: usize, deg: i32) -> Result<Transitions> {
    let site = ps.site();
    let cover = ps.chart_cover(0);
    let twists: Vec<i64> = (0..rank).map(|_| rng.gen_range(-deg..=deg) as i64).collect();
    let mut b = Vec::new();
    for &c in &cover {
        b.push(random_invertible(rng, site.ring(site.source(c)), rank, 1));
    }
    let mut t = BTreeMap::new();
    for (i, &ci) in cover.iter().enumerate() {
        for (j, &cj) in cover.iter().enumerate() {
            let pb = site.pullback(ci, cj)?;
            let ring = site.ring(pb.apex);
            let mut d = Matrix::zeros(ring, rank, rank);
            if i == j {
                d = Matrix::identity(ring, rank);
            } else {
                let x = ps.ratio(pb.apex, i, j)?;
                for (a, &e) in twists.iter().enumerate() {
                    d.set(a, a, x.pow(e)?);
                }
            }
            let bi = b[i].0.hom_entrywise(site.hom(pb.left))?;
            let bj_inv = b[j].1.hom_entrywise(site.hom(pb.right))?;
            t.insert((i, j), bj_inv.matmul(&d)?.matmul(&bi)?);
        }
    }
    Ok(Transitions { rank, cover, t })
}

pub fn random_bundle(rng: &mut Rng64, ps: &ProjSite, rank: usize, deg: i32) -> Result<StdBundle> {
    let tr = random_transitions(rng, ps, rank, deg)?;
    cocycle_build(ps.site(), &tr)
}

/// The global section `x^α` of `O(n)` (`|α| = n`) on the chart cover:
/// `∏ (x_i/x_k)^{α_i}` on chart `k`.
pub fn monomial_section(ps: &ProjSite, o_n: &FreePresheaf, alpha: &[u32]) -> Result<SectionRep> {
    let site = ps.site();
    let cover = ps.chart_cover(0);
    let mut sections = Vec::new();
    for (k, &c) in cover.iter().enumerate() {
        let u = site.source(c);
        let mut v = RingElem::one(site.ring(u));
        for (i, &a) in alpha.iter().enumerate() {
            v = &v * &ps.ratio(u, i, k)?.pow(a as i64)?;
        }
        sections.push(vec![v]);
    }
    o_n.section(ps.terminal(), cover, sections)
}

/// Refines a representative `steps` times by replacing a random member with
/// its composites through a random declared covering of its source.
pub fn random_refinement(rng: &mut Rng64, p: &FreePresheaf, a: &SectionRep, steps: usize) -> Result<SectionRep> {
    let site = p.site();
    let mut cover = a.cover.clone();
    let mut sections = a.sections.clone();
    for _ in 0..steps {
        if cover.is_empty() {
            break;
        }
        let i = rng.gen_range(0..cover.len());
        let u = site.source(cover[i]);
        let Some(d) = site.coverings(u).choose(rng) else { continue };
        let c = cover.remove(i);
        let s = sections.remove(i);
        for (off, &m) in d.iter().enumerate() {
            cover.insert(i + off, site.compose(c, m)?);
            sections.insert(i + off, p.restrict(m, &s)?);
        }
    }
    p.section(a.object, cover, sections)
}
