//! The claim suite: every strict law the library is built to satisfy, as a
//! seeded, repeatable check.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::bundle::{
    canonical_split, cocycle_build, cocycle_extract, comparison_morphism, BundleMorphism, StdBundle, Transitions,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::presheaf::presheaf_pullback;
use crate::projective::{
    base_change, check_onfunc, check_oninf, layer_embedding, sample_base_change, ChartRule, ProjSite,
};
use crate::random::{
    self, monomial_section, random_bundle, random_elem, random_matrix, random_refinement, random_transitions, Rng64,
};
use crate::ring::{RingDesc, RingElem, RingHom};
use crate::site::{FiniteSite, ObjId, Sieve, SiteMorphism};
use rand::Rng;

/// `Err` carries a counterexample description.
pub type Outcome = std::result::Result<(), String>;

type Check = fn(&mut Rng64, usize) -> Result<Outcome>;

pub struct Claim {
    pub id: &'static str,
    pub statement: &'static str,
    check: Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub statement: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub trials: usize,
    pub results: Vec<ClaimResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn table(&self) -> String {
        let w = self.results.iter().map(|r| r.id.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {:w$}  {}", r.id, r.statement));
            if let Some(ms) = r.millis {
                out.push_str(&format!("  ({ms} ms)"));
            }
            out.push('\n');
            if let Some(c) = &r.counterexample {
                out.push_str(&format!("      {c}\n"));
            }
        }
        out
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Ok(Err(format!($($msg)*)));
        }
    };
}

pub fn claims() -> Vec<Claim> {
    vec![
        Claim { id: "kron-assoc", statement: "(A⊗B)⊗C = A⊗(B⊗C) exactly", check: kron_assoc },
        Claim { id: "kron-1x1-comm", statement: "A⊗B = B⊗A when either is 1x1", check: kron_1x1 },
        Claim { id: "kron-mixed", statement: "(A⊗B)(C⊗D) = AC⊗BD", check: kron_mixed },
        Claim {
            id: "notcommgen",
            statement: "(a,b)⊗(c,d) and (c,d)⊗(a,b) differ as ordered tuples",
            check: notcommgen,
        },
        Claim {
            id: "sieve-closure",
            statement: "generated sieves are closed under precomposition",
            check: sieve_closure,
        },
        Claim { id: "sievecap", statement: "the intersection of two covering sieves is covering", check: sievecap },
        Claim { id: "strpb", statement: "(fg)*H = g*(f*H) for sieves", check: strpb },
        Claim {
            id: "sheaf-equiv",
            statement: "equality of section representatives is an equivalence relation",
            check: sheaf_equiv,
        },
        Claim {
            id: "section-pullback",
            statement: "pulling sections back along fg equals pulling back along f then g",
            check: section_pullback,
        },
        Claim { id: "unitmap", statement: "the unit map is a bijection on sections of bundles", check: unitmap },
        Claim {
            id: "shffres",
            statement: "restriction to a smaller sieve or object reuses data and verdicts",
            check: shffres,
        },
        Claim { id: "ds-assoc", statement: "(E⊕F)⊕G = E⊕(F⊕G) as data", check: ds_assoc },
        Claim { id: "ds-unit", statement: "0⊕E = E = E⊕0 as data", check: ds_unit },
        Claim { id: "tp-assoc", statement: "(E⊗F)⊗G = E⊗(F⊗G) as data", check: tp_assoc },
        Claim { id: "tp-unit", statement: "O⊗E = E = E⊗O as data", check: tp_unit },
        Claim { id: "tp-center", statement: "E⊗L = L⊗E for line bundles L", check: tp_center },
        Claim { id: "tp-noncomm", statement: "some rank-2 pair has E⊗F ≠ F⊗E", check: tp_noncomm },
        Claim { id: "tp-mixed", statement: "(α∘α')⊗(β∘β') = (α⊗β)∘(α'⊗β')", check: tp_mixed },
        Claim { id: "functvb", statement: "(fg)*E = g*(f*E) as data", check: functvb },
        Claim { id: "ds-pullback", statement: "f*(E⊕F) = f*E⊕f*F as data", check: ds_pullback },
        Claim { id: "tp-pullback", statement: "f*(E⊗F) = f*E⊗f*F and f*O = O as data", check: tp_pullback },
        Claim { id: "oninf", statement: "i_∞*O(n) = O on the base", check: oninf },
        Claim {
            id: "oninf-min-negative",
            statement: "with the smallest-chart rule i_∞*O(n) ≠ O for some n",
            check: oninf_min_negative,
        },
        Claim { id: "onfunc", statement: "g*O(n) = O(n) under base change, and g*H = K", check: onfunc },
        Claim { id: "twist-tensor", statement: "O(m)⊗O(n) = O(m+n)", check: twist_tensor },
        Claim {
            id: "biproduct",
            statement: "injections and projections of E⊕F satisfy the biproduct identities",
            check: biproduct,
        },
        Claim {
            id: "exact-split", statement: "0→E→E⊕F→F→0 is exact with block witnesses", check: exact_split
        },
        Claim {
            id: "exact-tensor", statement: "S⊗D and D⊗S are exact for a split sequence S", check: exact_tensor
        },
        Claim { id: "tensor-zero", statement: "0⊗E = E⊗0 = 0", check: tensor_zero },
        Claim { id: "hom-dim", statement: "dim Hom(O, O(n)) = max(n+1, 0) on the projective line", check: hom_dim },
        Claim {
            id: "cocycle-roundtrip",
            statement: "extracting the transitions of a glued bundle returns them",
            check: cocycle_roundtrip,
        },
        Claim { id: "cocycle-twist", statement: "gluing T01 = x0/x1 gives O(1)", check: cocycle_twist },
    ]
}

pub fn claim_ids() -> Vec<&'static str> {
    claims().iter().map(|c| c.id).collect()
}

/// Runs `scope` (`"all"` or one claim id). Each claim gets its own stream
/// derived from `seed` and its position, so results do not depend on scope.
pub fn run(scope: &str, seed: u64, trials: usize, timings: bool) -> Result<Report> {
    let all = claims();
    if scope != "all" && !all.iter().any(|c| c.id == scope) {
        return Err(Error::UnknownClaim(scope.to_string()));
    }
    let mut results = Vec::new();
    for (i, c) in all.iter().enumerate() {
        if scope != "all" && c.id != scope {
            continue;
        }
        let mut rng = random::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
        let start = Instant::now();
        let outcome = match (c.check)(&mut rng, trials.max(1)) {
            Ok(o) => o,
            Err(e) => Err(format!("error: {e}")),
        };
        results.push(ClaimResult {
            id: c.id.to_string(),
            statement: c.statement.to_string(),
            passed: outcome.is_ok(),
            counterexample: outcome.err(),
            millis: timings.then(|| start.elapsed().as_millis()),
        });
    }
    Ok(Report { seed, trials, results })
}

fn laurent_ring() -> Result<crate::ring::Ring> {
    RingDesc::new(&["t", "s"], &["t"])
}

fn dims(rng: &mut Rng64) -> (usize, usize) {
    (rng.gen_range(1..=4), rng.gen_range(1..=4))
}

pub fn kron_assoc(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let ring = laurent_ring()?;
    for _ in 0..trials {
        let ms: Vec<Matrix> = (0..3)
            .map(|_| {
                let (r, c) = dims(rng);
                random_matrix(rng, &ring, r, c, 2)
            })
            .collect();
        let l = ms[0].kron(&ms[1])?.kron(&ms[2])?;
        let r = ms[0].kron(&ms[1].kron(&ms[2])?)?;
        ensure!(l == r, "A={:?} B={:?} C={:?}", ms[0], ms[1], ms[2]);
    }
    Ok(Ok(()))
}

pub fn kron_1x1(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let ring = laurent_ring()?;
    for _ in 0..trials {
        let a = random_matrix(rng, &ring, 1, 1, 2);
        let (r, c) = dims(rng);
        let b = random_matrix(rng, &ring, r, c, 2);
        ensure!(a.kron(&b)? == b.kron(&a)?, "a={a:?} B={b:?}");
    }
    Ok(Ok(()))
}

pub fn kron_mixed(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let ring = laurent_ring()?;
    for _ in 0..trials {
        let (m, n) = dims(rng);
        let (p, q) = dims(rng);
        let (k, l) = dims(rng);
        let a = random_matrix(rng, &ring, m, n, 1);
        let c = random_matrix(rng, &ring, n, k, 1);
        let b = random_matrix(rng, &ring, p, q, 1);
        let d = random_matrix(rng, &ring, q, l, 1);
        let lhs = a.kron(&b)?.matmul(&c.kron(&d)?)?;
        let rhs = a.matmul(&c)?.kron(&b.matmul(&d)?)?;
        ensure!(lhs == rhs, "A={a:?} B={b:?} C={c:?} D={d:?}");
    }
    Ok(Ok(()))
}

pub fn notcommgen(_: &mut Rng64, _: usize) -> Result<Outcome> {
    let ring = RingDesc::new(&["a", "b", "c", "d"], &[] as &[&str])?;
    let u = Matrix::parse(&ring, 1, 2, &["a", "b"])?;
    let v = Matrix::parse(&ring, 1, 2, &["c", "d"])?;
    let uv = Matrix::parse(&ring, 1, 4, &["a*c", "a*d", "b*c", "b*d"])?;
    let vu = Matrix::parse(&ring, 1, 4, &["a*c", "b*c", "a*d", "b*d"])?;
    ensure!(u.kron(&v)? == uv, "(a,b)⊗(c,d) = {:?}", u.kron(&v)?);
    ensure!(v.kron(&u)? == vu, "(c,d)⊗(a,b) = {:?}", v.kron(&u)?);
    ensure!(uv != vu, "orderings coincide");
    Ok(Ok(()))
}

fn small_sites() -> Result<Vec<ProjSite>> {
    let q = RingDesc::rationals();
    Ok(vec![ProjSite::new(1, &q)?, ProjSite::new(2, &q)?, ProjSite::with_infinity(&q)?])
}

/// Every sieve on `u`, as the distinct sieves generated by subsets of the
/// arrows into `u`.
fn all_sieves(s: &FiniteSite, u: ObjId) -> Result<Vec<Sieve>> {
    let into = s.arrows_into(u);
    assert!(into.len() < 16, "too many arrows into `{}` to enumerate", s.object(u).name);
    let mut out = Vec::new();
    for bits in 0u32..1 << into.len() {
        let gens: Vec<_> = (0..into.len()).filter(|i| bits >> i & 1 == 1).map(|i| into[i]).collect();
        let h = s.generate_sieve(u, &gens)?;
        if !out.contains(&h) {
            out.push(h);
        }
    }
    Ok(out)
}

pub fn sieve_closure(_: &mut Rng64, _: usize) -> Result<Outcome> {
    for ps in small_sites()? {
        let s = ps.site();
        for u in s.object_ids() {
            let closed = all_sieves(s, u)?;
            let into = s.arrows_into(u);
            for bits in 0u32..1 << into.len() {
                let gens: Vec<_> = (0..into.len()).filter(|i| bits >> i & 1 == 1).map(|i| into[i]).collect();
                let h = s.generate_sieve(u, &gens)?;
                ensure!(s.sieve_is_closed(&h), "sieve on `{}` not closed: {:?}", s.object(u).name, h);
                ensure!(gens.iter().all(|g| h.contains(*g)), "generators missing on `{}`", s.object(u).name);
                for k in closed.iter().filter(|k| gens.iter().all(|g| k.contains(*g))) {
                    ensure!(h.is_subset(k), "generated sieve on `{}` is not the smallest", s.object(u).name);
                }
            }
        }
    }
    Ok(Ok(()))
}

pub fn sievecap(_: &mut Rng64, _: usize) -> Result<Outcome> {
    for ps in small_sites()? {
        let s = ps.site();
        for u in s.object_ids() {
            let covering: Vec<Sieve> = all_sieves(s, u)?.into_iter().filter(|h| s.sieve_belongs(h)).collect();
            for a in &covering {
                for b in &covering {
                    let c = s.sieve_intersect(a, b)?;
                    ensure!(s.sieve_belongs(&c), "on `{}`: {:?} ∩ {:?}", s.object(u).name, a, b);
                    ensure!(s.sieve_is_closed(&c), "intersection not closed on `{}`", s.object(u).name);
                }
            }
        }
    }
    Ok(Ok(()))
}

pub fn strpb(_: &mut Rng64, _: usize) -> Result<Outcome> {
    for ps in small_sites()? {
        let s = ps.site();
        for u in s.object_ids() {
            let sieves = all_sieves(s, u)?;
            for &f in s.arrows_into(u) {
                for &g in s.arrows_into(s.source(f)) {
                    let fg = s.compose(f, g)?;
                    for h in &sieves {
                        let once = s.sieve_pullback(fg, h)?;
                        let twice = s.sieve_pullback(g, &s.sieve_pullback(f, h)?)?;
                        ensure!(once == twice, "along {} and {}", s.arrow(f).name, s.arrow(g).name);
                        if s.sieve_belongs(h) {
                            ensure!(s.sieve_belongs(&once), "pullback along {} stops covering", s.arrow(fg).name);
                        }
                    }
                }
            }
        }
    }
    let chain = Chain::new(1)?;
    let h = chain.x.chart_sieve();
    let once = chain.fg.pullback_sieve(&h)?;
    let twice = chain.g.pullback_sieve(&chain.f.pullback_sieve(&h)?)?;
    ensure!(once == twice, "sieve pullback along composite site morphisms");
    Ok(Ok(()))
}

fn random_sheaf_case(rng: &mut Rng64) -> Result<(ProjSite, StdBundle, crate::presheaf::SectionRep)> {
    let q = RingDesc::rationals();
    let r = rng.gen_range(1..=2);
    let ps = ProjSite::new(r, &q)?;
    let n = rng.gen_range(0..=2u32);
    let o_n = ps.twisted_bundle(n as i64)?;
    let mut alpha = vec![0u32; r + 1];
    for _ in 0..n {
        alpha[rng.gen_range(0..=r)] += 1;
    }
    let a = monomial_section(&ps, o_n.presheaf(), &alpha)?;
    Ok((ps, o_n, a))
}

pub fn sheaf_equiv(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    for _ in 0..trials {
        let (ps, o_n, a) = random_sheaf_case(rng)?;
        let p = o_n.presheaf();
        let b = random_refinement(rng, p, &a, 3)?;
        let c = random_refinement(rng, p, &b, 3)?;
        ensure!(p.sections_equal(&a, &a)?, "not reflexive");
        ensure!(p.sections_equal(&a, &b)? && p.sections_equal(&b, &a)?, "refinement not equal both ways");
        ensure!(p.sections_equal(&b, &c)? && p.sections_equal(&a, &c)?, "not transitive");
        // a different section is told apart
        let cover = a.cover.clone();
        let mut sections = a.sections.clone();
        for (s, &m) in sections.iter_mut().zip(&cover) {
            let ring = ps.site().ring(ps.site().source(m));
            s[0] = &s[0] * &RingElem::integer(ring, 2);
        }
        let d = p.section(a.object, cover, sections)?;
        ensure!(!p.sections_equal(&a, &d)? && !p.sections_equal(&d, &c)?, "a section equals twice itself");
    }
    Ok(Ok(()))
}

pub fn section_pullback(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    for _ in 0..trials {
        let (ps, o_n, a) = random_sheaf_case(rng)?;
        let p = o_n.presheaf();
        let s = ps.site();
        let a = random_refinement(rng, p, &a, 2)?;
        let into: Vec<_> = s.arrows_into(a.object).to_vec();
        let f = into[rng.gen_range(0..into.len())];
        let into_v: Vec<_> = s.arrows_into(s.source(f)).to_vec();
        let g = into_v[rng.gen_range(0..into_v.len())];
        let once = p.section_pullback(&a, s.compose(f, g)?)?;
        let twice = p.section_pullback(&p.section_pullback(&a, f)?, g)?;
        ensure!(p.sections_equal(&once, &twice)?, "along {} then {}", s.arrow(f).name, s.arrow(g).name);
        let id = p.section_pullback(&a, s.identity(a.object))?;
        ensure!(p.sections_equal(&id, &a)?, "pullback along the identity");
    }
    Ok(Ok(()))
}

/// Trials alternate between the two sites.
fn p1_p2() -> Result<[ProjSite; 2]> {
    let q = RingDesc::rationals();
    Ok([ProjSite::new(1, &q)?, ProjSite::new(2, &q)?])
}

pub fn unitmap(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let rank = rng.gen_range(0..=2);
        let e = random_bundle(rng, ps, rank, 2)?;
        let p = e.presheaf();
        let objs: Vec<ObjId> = p.ranks().keys().copied().collect();
        let u = objs[rng.gen_range(0..objs.len())];
        let ring = ps.site().ring(u).clone();
        let v: Vec<RingElem> = (0..rank).map(|_| random_elem(rng, &ring, 2, 2)).collect();
        let a = p.unit_section(u, v.clone())?;
        ensure!(p.unit_inverse(&a)? == v, "round trip on `{}`", ps.site().object(u).name);
        let b = random_refinement(rng, p, &a, 2)?;
        ensure!(p.unit_inverse(&b)? == v, "round trip through a refinement on `{}`", ps.site().object(u).name);
    }
    Ok(Ok(()))
}

pub fn shffres(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    for _ in 0..trials {
        let ps = ProjSite::new(1, &RingDesc::rationals())?;
        let s = ps.site();
        let rank = rng.gen_range(1..=2);
        let e = random_bundle(rng, &ps, rank, 2)?;
        let p = e.presheaf();
        let u01 = ps.chart(0, &[0, 1])?;
        let k = s.generate_sieve(ps.terminal(), &[s.structure_arrow(u01)?])?;
        let pk = p.restrict_sieve(&k)?;
        for (m, a) in pk.restrictions() {
            ensure!(a == p.restriction(*m)?, "restriction along {} changed", s.arrow(*m).name);
        }
        let ring = s.ring(u01).clone();
        let rank = p.rank_at(u01)?;
        let v: Vec<RingElem> = (0..rank).map(|_| random_elem(rng, &ring, 2, 2)).collect();
        let w: Vec<RingElem> =
            if rng.gen_bool(0.5) { v.clone() } else { (0..rank).map(|_| random_elem(rng, &ring, 2, 2)).collect() };
        let (a, b) = (pk.unit_section(u01, v)?, pk.unit_section(u01, w)?);
        ensure!(pk.sections_equal(&a, &b)? == p.sections_equal(&a, &b)?, "verdicts differ after restriction");
        let y = ps.chart(0, &[rng.gen_range(0..=1)])?;
        let small = e.restrict_small(y)?;
        let slice = s.slice(y)?;
        for (m, a) in small.presheaf().restrictions() {
            ensure!(a == p.restriction(slice.map_arrow(*m))?, "small restriction changed data");
        }
    }
    Ok(Ok(()))
}

fn bundle_triple(rng: &mut Rng64, ps: &ProjSite) -> Result<[StdBundle; 3]> {
    let b = |rng: &mut Rng64| -> Result<StdBundle> {
        let rank = rng.gen_range(0..=3);
        random_bundle(rng, ps, rank, 2)
    };
    Ok([b(rng)?, b(rng)?, b(rng)?])
}

pub fn ds_assoc(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, f, g] = bundle_triple(rng, ps)?;
        ensure!(e.direct_sum(&f)?.direct_sum(&g)? == e.direct_sum(&f.direct_sum(&g)?)?, "E={e:?} F={f:?} G={g:?}");
    }
    Ok(Ok(()))
}

pub fn ds_unit(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, _, _] = bundle_triple(rng, ps)?;
        let z = StdBundle::zero(ps.site(), &ps.chart_sieve())?;
        ensure!(z.direct_sum(&e)? == e && e.direct_sum(&z)? == e, "E={e:?}");
    }
    Ok(Ok(()))
}

pub fn tp_assoc(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, f, g] = bundle_triple(rng, ps)?;
        ensure!(e.tensor(&f)?.tensor(&g)? == e.tensor(&f.tensor(&g)?)?, "E={e:?} F={f:?} G={g:?}");
    }
    Ok(Ok(()))
}

pub fn tp_unit(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, _, _] = bundle_triple(rng, ps)?;
        let o = ps.trivial_bundle(1)?;
        ensure!(o.tensor(&e)? == e && e.tensor(&o)? == e, "E={e:?}");
    }
    Ok(Ok(()))
}

pub fn tp_center(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, _, _] = bundle_triple(rng, ps)?;
        let l = random_bundle(rng, ps, 1, 3)?;
        ensure!(e.tensor(&l)? == l.tensor(&e)?, "E={e:?} L={l:?}");
    }
    Ok(Ok(()))
}

/// `O ⊕ O(1)` and `O ⊕ O(2)`.
pub fn noncommuting_pair(ps: &ProjSite) -> Result<(StdBundle, StdBundle)> {
    let o = ps.trivial_bundle(1)?;
    Ok((o.direct_sum(&ps.twisted_bundle(1)?)?, o.direct_sum(&ps.twisted_bundle(2)?)?))
}

pub fn tp_noncomm(_: &mut Rng64, _: usize) -> Result<Outcome> {
    for r in 1..=2 {
        let ps = ProjSite::new(r, &RingDesc::rationals())?;
        let (e, f) = noncommuting_pair(&ps)?;
        ensure!(e.tensor(&f)? != f.tensor(&e)?, "E⊗F = F⊗E on P^{r}");
    }
    Ok(Ok(()))
}

/// Multiplication by a random global section of `O(d)`, as `O(m) → O(m+d)`.
pub fn section_morphism(rng: &mut Rng64, ps: &ProjSite, m: i64, d: u32) -> Result<BundleMorphism> {
    let site = ps.site();
    let cover = ps.chart_cover(0);
    let mut local = vec![RingElem::zero(site.ring(site.source(cover[0]))); cover.len()];
    local.iter_mut().zip(&cover).for_each(|(x, &c)| *x = RingElem::zero(site.ring(site.source(c))));
    for _ in 0..2 {
        let mut alpha = vec![0u32; ps.r() + 1];
        for _ in 0..d {
            alpha[rng.gen_range(0..=ps.r())] += 1;
        }
        let c = rng.gen_range(-3i64..=3);
        let rep = monomial_section(ps, ps.twisted_bundle(d as i64)?.presheaf(), &alpha)?;
        for (x, s) in local.iter_mut().zip(&rep.sections) {
            *x = &*x + &s[0].scale(&crate::ring::rat(c));
        }
    }
    let matrices = local.into_iter().map(Matrix::scalar).collect();
    BundleMorphism::new(Arc::new(ps.twisted_bundle(m)?), Arc::new(ps.twisted_bundle(m + d as i64)?), cover, matrices)
}

pub fn tp_mixed(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let a1 = section_morphism(rng, ps, 0, 1)?;
        let a2 = section_morphism(rng, ps, 1, 1)?;
        let b1 = section_morphism(rng, ps, -1, 1)?;
        let b2 = section_morphism(rng, ps, 0, 2)?;
        let lhs = a2.compose(&a1)?.tensor(&b2.compose(&b1)?)?;
        let rhs = a2.tensor(&b2)?.compose(&a1.tensor(&b1)?)?;
        ensure!(lhs.equals(&rhs)?, "tensor of composites differs");
        let id = BundleMorphism::identity(a1.source())?;
        ensure!(id.compose(&id)?.equals(&id)? && a1.compose(&id)?.equals(&a1)?, "identity laws");
    }
    Ok(Ok(()))
}

/// `Z → Y → X`: three stacked copies of `P^r` over `Q[a] → Q[s^±1] → Q[u^±1]`.
pub struct Chain {
    pub x: ProjSite,
    pub y: ProjSite,
    pub z: ProjSite,
    pub f: SiteMorphism,
    pub g: SiteMorphism,
    pub fg: SiteMorphism,
}

impl Chain {
    pub fn new(r: usize) -> Result<Self> {
        let h1 = sample_base_change()?;
        let b1 = h1.target().clone();
        let b2 = RingDesc::new(&["u"], &["u"])?;
        let h2 = RingHom::from_strings(&b1, &b2, &["u^3"])?;
        let b0 = h1.source().clone();
        let x = ProjSite::layered(r, &[b0, b1.clone(), b2.clone()], &[h1, h2.clone()])?;
        let y = ProjSite::layered(r, &[b1, b2.clone()], &[h2])?;
        let z = ProjSite::new(r, &b2)?;
        let f = layer_embedding(&y, 0, &x, 1)?;
        let g = layer_embedding(&z, 0, &y, 1)?;
        let fg = f.compose(&g)?;
        Ok(Chain { x, y, z, f, g, fg })
    }
}

pub fn functvb(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let chains = [Chain::new(1)?, Chain::new(2)?];
    for t in 0..trials {
        let c = &chains[t % 2];
        let rank = rng.gen_range(0..=3);
        let e = random_bundle(rng, &c.x, rank, 2)?;
        let once = e.pullback(&c.fg)?;
        let twice = e.pullback(&c.f)?.pullback(&c.g)?;
        ensure!(once == twice, "E={e:?}");
        ensure!(
            presheaf_pullback(&SiteMorphism::identity(c.x.site())?, e.presheaf())? == *e.presheaf(),
            "identity pullback"
        );
    }
    Ok(Ok(()))
}

pub fn ds_pullback(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let chains = [Chain::new(1)?, Chain::new(2)?];
    for t in 0..trials {
        let c = &chains[t % 2];
        let [e, f, _] = bundle_triple(rng, &c.x)?;
        ensure!(
            e.direct_sum(&f)?.pullback(&c.f)? == e.pullback(&c.f)?.direct_sum(&f.pullback(&c.f)?)?,
            "E={e:?} F={f:?}"
        );
    }
    Ok(Ok(()))
}

pub fn tp_pullback(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let chains = [Chain::new(1)?, Chain::new(2)?];
    for t in 0..trials {
        let c = &chains[t % 2];
        let [e, f, _] = bundle_triple(rng, &c.x)?;
        ensure!(e.tensor(&f)?.pullback(&c.fg)? == e.pullback(&c.fg)?.tensor(&f.pullback(&c.fg)?)?, "E={e:?} F={f:?}");
        let o = c.x.trivial_bundle(1)?.pullback(&c.f)?;
        ensure!(o == c.y.trivial_bundle(1)?, "f*O ≠ O");
    }
    let _ = &chains[0].z;
    Ok(Ok(()))
}

pub fn oninf(_: &mut Rng64, _: usize) -> Result<Outcome> {
    for n in -3..=3 {
        ensure!(check_oninf(n, ChartRule::Largest)?, "n = {n}");
    }
    let p1 = ProjSite::with_infinity(&RingDesc::rationals())?;
    let f = crate::projective::infinity_morphism(&p1)?;
    let pulled = f.pullback_sieve(&p1.chart_sieve())?;
    ensure!(pulled == f.source().maximal_sieve(f.source().terminal().unwrap()), "i_∞*H is not maximal");
    Ok(Ok(()))
}

pub fn oninf_min_negative(_: &mut Rng64, _: usize) -> Result<Outcome> {
    for n in -3..=3 {
        if n != 0 && !check_oninf(n, ChartRule::Smallest)? {
            return Ok(Ok(()));
        }
    }
    Ok(Err("i_∞*O(n) = O for every n in -3..=3 under the smallest-chart rule as well".into()))
}

pub fn onfunc(_: &mut Rng64, _: usize) -> Result<Outcome> {
    let f = sample_base_change()?;
    for r in 1..=2 {
        let bc = base_change(r, &f)?;
        for n in -3..=3 {
            ensure!(check_onfunc(&bc, n)?, "r = {r}, n = {n}");
        }
        ensure!(bc.map.pullback_sieve(&bc.x.chart_sieve())? == bc.y.chart_sieve(), "g*H ≠ K for r = {r}");
        let id = base_change(r, &RingHom::identity(f.source()))?;
        ensure!(check_onfunc(&id, 1)?, "identity base change");
    }
    Ok(Ok(()))
}

pub fn twist_tensor(_: &mut Rng64, _: usize) -> Result<Outcome> {
    for r in 1..=2 {
        let ps = ProjSite::new(r, &RingDesc::rationals())?;
        for m in -2..=2 {
            for n in -2..=2 {
                ensure!(
                    ps.twisted_bundle(m)?.tensor(&ps.twisted_bundle(n)?)? == ps.twisted_bundle(m + n)?,
                    "r = {r}, m = {m}, n = {n}"
                );
            }
        }
    }
    Ok(Ok(()))
}

pub fn biproduct(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, f, _] = bundle_triple(rng, ps)?;
        let (e, f) = (Arc::new(e), Arc::new(f));
        let [ie, i_f, pe, pf] = BundleMorphism::biproduct(&e, &f)?;
        let sum = BundleMorphism::identity(ie.target())?;
        ensure!(ie.compose(&pe)?.add(&i_f.compose(&pf)?)?.equals(&sum)?, "i_E p_E + i_F p_F ≠ 1");
        ensure!(pe.compose(&ie)?.equals(&BundleMorphism::identity(&e)?)?, "p_E i_E ≠ 1");
        ensure!(pf.compose(&i_f)?.equals(&BundleMorphism::identity(&f)?)?, "p_F i_F ≠ 1");
        ensure!(pe.compose(&i_f)?.equals(&BundleMorphism::zero(&f, &e)?)?, "p_E i_F ≠ 0");
        ensure!(pf.compose(&ie)?.equals(&BundleMorphism::zero(&e, &f)?)?, "p_F i_E ≠ 0");
    }
    Ok(Ok(()))
}

pub fn exact_split(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, f, _] = bundle_triple(rng, ps)?;
        let seq = canonical_split(&Arc::new(e), &Arc::new(f))?;
        if let Err(err) = seq.verify() {
            return Ok(Err(err.to_string()));
        }
    }
    Ok(Ok(()))
}

pub fn exact_tensor(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, f, _] = bundle_triple(rng, ps)?;
        let seq = canonical_split(&Arc::new(e), &Arc::new(f))?;
        let d = if rng.gen_bool(0.5) { ps.twisted_bundle(1)? } else { random_bundle(rng, ps, 2, 1)? };
        let d = Arc::new(d);
        for s in [seq.tensor_right(&d)?, seq.tensor_left(&d)?] {
            if let Err(err) = s.verify() {
                return Ok(Err(err.to_string()));
            }
        }
    }
    Ok(Ok(()))
}

pub fn tensor_zero(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let [e, _, _] = bundle_triple(rng, ps)?;
        let z = StdBundle::zero(ps.site(), &ps.chart_sieve())?;
        ensure!(z.tensor(&e)? == z && e.tensor(&z)? == z, "E={e:?}");
    }
    Ok(Ok(()))
}

pub fn hom_dim(_: &mut Rng64, _: usize) -> Result<Outcome> {
    let ps = ProjSite::new(1, &RingDesc::rationals())?;
    for n in -3..=3i64 {
        let got = ps.global_sections_dim(n)?;
        let want = (n + 1).max(0) as usize;
        ensure!(got == want, "n = {n}: {got} ≠ {want}");
    }
    Ok(Ok(()))
}

pub fn cocycle_roundtrip(rng: &mut Rng64, trials: usize) -> Result<Outcome> {
    let sites = p1_p2()?;
    for t in 0..trials {
        let ps = &sites[t % 2];
        let rank = if t % 2 == 0 { 1 } else { rng.gen_range(0..=3) };
        let tr: Transitions = random_transitions(rng, ps, rank, 3)?;
        let e = Arc::new(cocycle_build(ps.site(), &tr)?);
        ensure!(cocycle_extract(&e, &tr.cover)? == tr, "transitions changed: {:?}", tr.t);
        let cm = comparison_morphism(&e, &tr.cover)?;
        ensure!(cm.is_compatible()?, "comparison morphism incompatible");
    }
    Ok(Ok(()))
}

pub fn cocycle_twist(_: &mut Rng64, _: usize) -> Result<Outcome> {
    let ps = ProjSite::new(1, &RingDesc::rationals())?;
    let s = ps.site();
    let cover = ps.chart_cover(0);
    let mut t = std::collections::BTreeMap::new();
    for i in 0..2 {
        for j in 0..2 {
            let apex = s.pullback(cover[i], cover[j])?.apex;
            t.insert((i, j), Matrix::scalar(ps.ratio(apex, i, j)?));
        }
    }
    let built = cocycle_build(s, &Transitions { rank: 1, cover, t })?;
    ensure!(built == ps.twisted_bundle(1)?, "glued bundle differs from O(1)");
    Ok(Ok(()))
}
