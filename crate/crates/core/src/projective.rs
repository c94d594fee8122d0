//! Finite chart sites of projective space and the twisted line bundles.
//!
//! `P^r` over a base ring is modeled by the chart intersections `U_S`
//! (`S ⊆ {0,…,r}` nonempty) plus the terminal object `P = U_∅`. The ring of
//! `U_S` is the base ring with variables `x{i}/x{k}` for `i ≠ k = max S`,
//! where `x{i}/x{k}` is invertible iff `i ∈ S`. `U_S → U_T` exists iff
//! `S ⊇ T`, and `U_S ×_{U_T} U_S' = U_{S ∪ S'}`.
//!
//! Several copies of `P^r` over a chain of base rings can be stacked in
//! layers: layer `l` lies over layer `m ≤ l` through the composite base
//! change, so `U_{l,S} → U_{m,T}` exists iff `l ≥ m` and `S ⊇ T`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bundle::{hom_dimension, StdBundle};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::presheaf::FreePresheaf;
use crate::ring::{Ring, RingDesc, RingElem, RingHom};
use crate::site::{FiniteSite, MorId, ObjId, Sieve, SiteBuilder, SiteMorphism};

/// Which chart an object over several charts is trivialized on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartRule {
    Largest,
    Smallest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Chart { layer: usize, mask: u32 },
    Infinity,
    Empty,
}

#[derive(Clone, Debug)]
pub struct ProjSite {
    r: usize,
    bases: Vec<Ring>,
    site: Arc<FiniteSite>,
    kinds: Vec<Kind>,
    charts: BTreeMap<(usize, u32), ObjId>,
}

fn members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

fn max_of(mask: u32) -> usize {
    31 - mask.leading_zeros() as usize
}

fn mask_of(s: &[usize]) -> u32 {
    s.iter().fold(0, |m, &i| m | (1 << i))
}

/// Name of the ratio variable `x_i/x_k`.
pub fn ratio_name(i: usize, k: usize) -> String {
    format!("x{i}/x{k}")
}

struct Layers<'a> {
    r: usize,
    bases: &'a [Ring],
    /// `comp[m][l]`: base change from layer `m` to layer `l ≥ m`.
    comp: Vec<Vec<Option<RingHom>>>,
    rings: BTreeMap<(usize, u32), Ring>,
}

impl<'a> Layers<'a> {
    fn new(r: usize, bases: &'a [Ring], homs: &[RingHom]) -> Result<Self> {
        let n = bases.len();
        if homs.len() + 1 != n {
            return Err(Error::Site("one base change per pair of consecutive layers is required".into()));
        }
        let mut comp = vec![vec![None; n]; n];
        for m in 0..n {
            comp[m][m] = Some(RingHom::identity(&bases[m]));
            for l in m..n - 1 {
                let h = &homs[l];
                if h.source() != &bases[l] || h.target() != &bases[l + 1] {
                    return Err(Error::Site(format!("base change {l} has the wrong rings")));
                }
                let next = h.compose(comp[m][l].as_ref().unwrap())?;
                comp[m][l + 1] = Some(next);
            }
        }
        Ok(Layers { r, bases, comp, rings: BTreeMap::new() })
    }

    fn ring(&mut self, layer: usize, mask: u32) -> Result<Ring> {
        if let Some(r) = self.rings.get(&(layer, mask)) {
            return Ok(r.clone());
        }
        let base = &self.bases[layer];
        let ring = if mask == 0 || self.r == 0 {
            base.clone()
        } else {
            let k = max_of(mask);
            let mut vars: Vec<String> = base.variables().to_vec();
            let mut inv: Vec<String> = base.invertible_names().iter().map(|s| s.to_string()).collect();
            for i in (0..=self.r).filter(|&i| i != k) {
                let name = ratio_name(i, k);
                if mask & (1 << i) != 0 {
                    inv.push(name.clone());
                }
                vars.push(name);
            }
            RingDesc::new(&vars, &inv)?
        };
        self.rings.insert((layer, mask), ring.clone());
        Ok(ring)
    }

    /// `x_i/x_j` in the ring of `U_{layer,mask}`; `j` must lie in the mask.
    fn ratio(&mut self, layer: usize, mask: u32, i: usize, j: usize) -> Result<RingElem> {
        let ring = self.ring(layer, mask)?;
        let k = max_of(mask);
        let t = |x: usize| -> Result<RingElem> {
            if x == k {
                Ok(RingElem::one(&ring))
            } else {
                RingElem::var(&ring, &ratio_name(x, k))
            }
        };
        t(i)?.try_mul(&t(j)?.inverse()?)
    }

    /// Ring map for `U_{l,S} → U_{m,T}`.
    fn hom(&mut self, l: usize, s: u32, m: usize, t: u32) -> Result<RingHom> {
        let src = self.ring(m, t)?;
        let dst = self.ring(l, s)?;
        let base = self.comp[m][l].clone().unwrap();
        let mut images = Vec::with_capacity(src.nvars());
        for img in base.images() {
            images.push(img.embed(&dst)?);
        }
        if t != 0 && self.r > 0 {
            let k = max_of(t);
            for i in (0..=self.r).filter(|&i| i != k) {
                images.push(self.ratio(l, s, i, k)?);
            }
        }
        RingHom::new(&src, &dst, images)
    }
}

impl ProjSite {
    /// `P^r` over `base`.
    pub fn new(r: usize, base: &Ring) -> Result<Self> {
        Self::layered(r, std::slice::from_ref(base), &[])
    }

    /// Copies of `P^r` over `bases[0] → bases[1] → …`, with layer 0's `P` terminal.
    pub fn layered(r: usize, bases: &[Ring], homs: &[RingHom]) -> Result<Self> {
        Self::assemble(r, bases, homs, false)
    }

    /// `P^1` over `base` with the point `∞ = [0:1]` and the empty scheme added.
    pub fn with_infinity(base: &Ring) -> Result<Self> {
        Self::assemble(1, std::slice::from_ref(base), &[], true)
    }

    fn assemble(r: usize, bases: &[Ring], homs: &[RingHom], infinity: bool) -> Result<Self> {
        if r >= 31 {
            return Err(Error::Site("dimension out of range".into()));
        }
        let mut layers = Layers::new(r, bases, homs)?;
        let mut b = SiteBuilder::new();
        let mut kinds = Vec::new();
        let mut charts = BTreeMap::new();
        let full: u32 = (1 << (r + 1)) - 1;
        let first_mask = if r == 0 { 1 } else { 0 };
        for l in 0..bases.len() {
            for mask in first_mask..=full {
                let mut name = if mask == 0 || r == 0 {
                    "P".to_string()
                } else {
                    format!("U{}", members(mask).map(|i| i.to_string()).collect::<String>())
                };
                if l > 0 {
                    name = format!("{name}@{l}");
                }
                let o = b.object(name, &layers.ring(l, mask)?);
                kinds.push(Kind::Chart { layer: l, mask });
                charts.insert((l, mask), o);
            }
        }
        let mut chart_list: Vec<((usize, u32), ObjId)> = charts.iter().map(|(k, v)| (*k, *v)).collect();
        chart_list.sort_by_key(|(_, o)| *o);
        for &((l, s), a) in &chart_list {
            for &((m, t), c) in &chart_list {
                if a == c || l < m || s & t != t {
                    continue;
                }
                let name = format!("{}->{}", b_name(&b, a), b_name(&b, c));
                b.arrow(name, a, c, layers.hom(l, s, m, t)?)?;
            }
        }
        if infinity {
            let base = bases[0].clone();
            let u1 = charts[&(0, 0b10)];
            let p = charts[&(0, 0)];
            let xi = b.object("Xinf", &base);
            kinds.push(Kind::Infinity);
            let u1_ring = layers.ring(0, 0b10)?;
            let mut images: Vec<RingElem> =
                base.variables().iter().map(|v| RingElem::var(&base, v)).collect::<Result<_>>()?;
            images.push(RingElem::zero(&base));
            b.arrow("Xinf->U1", xi, u1, RingHom::new(&u1_ring, &base, images)?)?;
            b.arrow("Xinf->P", xi, p, RingHom::identity(&base))?;
            let zero = RingDesc::zero_ring();
            let e = b.object("Empty", &zero);
            kinds.push(Kind::Empty);
            let targets: Vec<ObjId> = (0..kinds.len() - 1).map(ObjId).collect();
            for t in targets {
                let tr = b_ring(&b, t);
                let name = format!("Empty->{}", b_name(&b, t));
                b.arrow(name, e, t, RingHom::to_zero(&tr))?;
            }
        }
        b.close_thin()?;
        let k2 = kinds.clone();
        let charts2 = charts.clone();
        b.pullbacks_by_meet(move |a, bb, c| meet(&k2, &charts2, a, bb, c))?;
        for (&(l, t), &o) in &charts {
            let id = b.identity(o);
            b.covering(o, vec![id]);
            if r == 0 {
                continue;
            }
            let fam: Vec<MorId> = (0..=r)
                .map(|k| {
                    let src = charts[&(l, t | (1 << k))];
                    b.arrow_between(src, o).expect("chart inclusion")
                })
                .collect();
            b.covering(o, fam);
        }
        for (i, k) in kinds.iter().enumerate() {
            match k {
                Kind::Infinity => {
                    let id = b.identity(ObjId(i));
                    b.covering(ObjId(i), vec![id]);
                }
                Kind::Empty => {
                    let id = b.identity(ObjId(i));
                    b.covering(ObjId(i), vec![id]);
                    b.covering(ObjId(i), vec![]);
                }
                Kind::Chart { .. } => {}
            }
        }
        let terminal = if r == 0 { charts[&(0, 1)] } else { charts[&(0, 0)] };
        b.terminal(terminal);
        let site = Arc::new(b.build()?);
        Ok(ProjSite { r, bases: bases.to_vec(), site, kinds, charts })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn base(&self, layer: usize) -> &Ring {
        &self.bases[layer]
    }

    pub fn layers(&self) -> usize {
        self.bases.len()
    }

    pub fn site(&self) -> &Arc<FiniteSite> {
        &self.site
    }

    pub fn terminal(&self) -> ObjId {
        self.site.terminal().unwrap()
    }

    /// `U_S` in the given layer; the empty set gives that layer's `P`.
    pub fn chart(&self, layer: usize, s: &[usize]) -> Result<ObjId> {
        let mask = if self.r == 0 { 1 } else { mask_of(s) };
        self.charts.get(&(layer, mask)).copied().ok_or_else(|| Error::Site(format!("no chart {s:?} in layer {layer}")))
    }

    pub fn infinity(&self) -> Option<ObjId> {
        self.kinds.iter().position(|k| *k == Kind::Infinity).map(ObjId)
    }

    /// `{U_k → P}` for the given layer.
    pub fn chart_cover(&self, layer: usize) -> Vec<MorId> {
        let p = self.chart(layer, &[]).unwrap();
        (0..=self.r)
            .map(|k| {
                let u = self.chart(layer, &[k]).unwrap();
                self.site.arrows_between(u, p).next().unwrap()
            })
            .collect()
    }

    /// The sieve on layer 0's `P` generated by `{U_k → P}`.
    pub fn chart_sieve(&self) -> Sieve {
        self.site.generate_sieve(self.terminal(), &self.chart_cover(0)).unwrap()
    }

    /// Layer-0 chart indices that `w` lies over.
    fn charts_over(&self, w: ObjId) -> Vec<usize> {
        (0..=self.r)
            .filter(|&k| {
                let u = self.chart(0, &[k]).unwrap();
                self.site.arrows_between(w, u).next().is_some()
            })
            .collect()
    }

    fn chart_of(&self, w: ObjId, rule: ChartRule) -> Result<usize> {
        let ks = self.charts_over(w);
        let pick = match rule {
            ChartRule::Largest => ks.last(),
            ChartRule::Smallest => ks.first(),
        };
        pick.copied().ok_or_else(|| Error::Site(format!("`{}` lies over no chart", self.site.object(w).name)))
    }

    /// `x_i/x_j` pulled back to `w`, which must lie over `U_j`.
    pub fn ratio(&self, w: ObjId, i: usize, j: usize) -> Result<RingElem> {
        let uj = self.chart(0, &[j])?;
        let m = self
            .site
            .arrows_between(w, uj)
            .next()
            .ok_or_else(|| Error::Site(format!("`{}` does not lie over U{j}", self.site.object(w).name)))?;
        let ring = self.site.ring(uj);
        let e = if i == j || self.r == 0 { RingElem::one(ring) } else { RingElem::var(ring, &ratio_name(i, j))? };
        self.site.hom(m).apply(&e)
    }

    /// `O(n)` on the chart sieve: along `g: W → V` the restriction is
    /// `(x_{c(V)}/x_{c(W)})^n`, with `c` the chart chosen by `rule`.
    pub fn twisted_bundle_with(&self, n: i64, rule: ChartRule) -> Result<StdBundle> {
        let s = &self.site;
        let h = self.chart_sieve();
        let objs = s.sieve_objects(&h)?;
        let mut chart = BTreeMap::new();
        for &o in &objs {
            chart.insert(o, self.chart_of(o, rule)?);
        }
        let ranks = objs.iter().map(|&o| (o, 1)).collect();
        let mut restrictions = BTreeMap::new();
        for g in s.arrow_ids().filter(|m| objs.contains(&s.target(*m))) {
            let (w, v) = (s.source(g), s.target(g));
            let e = self.ratio(w, chart[&v], chart[&w])?.pow(n)?;
            restrictions.insert(g, Matrix::scalar(e));
        }
        StdBundle::new(FreePresheaf::new(s.clone(), h, ranks, restrictions)?)
    }

    pub fn twisted_bundle(&self, n: i64) -> Result<StdBundle> {
        self.twisted_bundle_with(n, ChartRule::Largest)
    }

    /// `O^n` on the chart sieve.
    pub fn trivial_bundle(&self, n: usize) -> Result<StdBundle> {
        StdBundle::trivial(&self.site, &self.chart_sieve(), n)
    }

    /// `dim Hom(O, O(n))`, by coefficient matching with exponents up to `|n| + 1`.
    pub fn global_sections_dim(&self, n: i64) -> Result<usize> {
        let o = self.trivial_bundle(1)?;
        let on = self.twisted_bundle(n)?;
        hom_dimension(&o, &on, n.unsigned_abs() as i32 + 1)
    }
}

fn b_name(b: &SiteBuilder, o: ObjId) -> String {
    b.object_name(o).to_string()
}

fn b_ring(b: &SiteBuilder, o: ObjId) -> Ring {
    b.object_ring(o).clone()
}

fn meet(kinds: &[Kind], charts: &BTreeMap<(usize, u32), ObjId>, a: ObjId, b: ObjId, c: ObjId) -> Option<ObjId> {
    let empty = kinds.iter().position(|k| *k == Kind::Empty).map(ObjId);
    match (kinds[a.0], kinds[b.0]) {
        (Kind::Empty, _) | (_, Kind::Empty) => empty,
        (Kind::Infinity, Kind::Infinity) => Some(a),
        (Kind::Infinity, Kind::Chart { mask, .. }) => Some(if mask & 1 != 0 { empty? } else { a }),
        (Kind::Chart { mask, .. }, Kind::Infinity) => Some(if mask & 1 != 0 { empty? } else { b }),
        (Kind::Chart { layer: la, mask: sa }, Kind::Chart { layer: lb, mask: sb }) => {
            let Kind::Chart { layer: lc, .. } = kinds[c.0] else { return None };
            if la.min(lb) != lc {
                return None;
            }
            charts.get(&(la.max(lb), sa | sb)).copied()
        }
    }
}

/// The one-object site of the base, and `i_∞` from it into `P^1` with the
/// point at infinity.
pub fn infinity_morphism(p1: &ProjSite) -> Result<SiteMorphism> {
    let xi = p1.infinity().ok_or_else(|| Error::Site("site has no point at infinity".into()))?;
    let base = p1.base(0);
    let mut b = SiteBuilder::new();
    let x = b.object("X", base);
    let id = b.identity(x);
    b.covering(x, vec![id]);
    b.pullback(id, id, crate::site::Pullback { apex: x, left: id, right: id });
    b.terminal(x);
    let point = Arc::new(b.build()?);
    let s = p1.site();
    SiteMorphism::new(point, s.clone(), vec![xi], vec![s.identity(xi)])
}

/// `i_∞* O(n)` equals the trivial line bundle on the base, as data.
pub fn check_oninf(n: i64, rule: ChartRule) -> Result<bool> {
    let p1 = ProjSite::with_infinity(&RingDesc::rationals())?;
    let f = infinity_morphism(&p1)?;
    let pulled = p1.twisted_bundle_with(n, rule)?.pullback(&f)?;
    let point = f.source();
    let trivial = StdBundle::trivial(point, &point.maximal_sieve(point.terminal().unwrap()), 1)?;
    Ok(pulled == trivial)
}

/// The base change `P^r_Y → P^r_X` for `f: base_X → base_Y`: the standalone
/// `P^r_Y` site mapped onto layer 1 of the two-layer site.
pub struct BaseChange {
    pub x: ProjSite,
    pub y: ProjSite,
    pub map: SiteMorphism,
}

pub fn base_change(r: usize, f: &RingHom) -> Result<BaseChange> {
    let x = ProjSite::layered(r, &[f.source().clone(), f.target().clone()], std::slice::from_ref(f))?;
    let y = ProjSite::new(r, f.target())?;
    let map = layer_embedding(&y, 0, &x, 1)?;
    Ok(BaseChange { x, y, map })
}

/// Maps layers `from..` of `src` onto layers `to..` of `dst` by name.
pub fn layer_embedding(src: &ProjSite, from: usize, dst: &ProjSite, to: usize) -> Result<SiteMorphism> {
    if src.r != dst.r {
        return Err(Error::Site("projective sites of different dimension".into()));
    }
    let mut objects = Vec::new();
    for (i, k) in src.kinds.iter().enumerate() {
        let Kind::Chart { layer, mask } = *k else {
            return Err(Error::Site("only chart objects can be mapped".into()));
        };
        if layer < from {
            return Err(Error::Site("source layers below the embedding start".into()));
        }
        let o = dst
            .charts
            .get(&(layer - from + to, mask))
            .copied()
            .ok_or_else(|| Error::Site("target has too few layers".into()))?;
        debug_assert_eq!(ObjId(i), src.charts[&(layer, mask)]);
        objects.push(o);
    }
    let (s, t) = (src.site(), dst.site());
    let mut arrows = Vec::new();
    for m in s.arrow_ids() {
        let (a, b) = (objects[s.source(m).0], objects[s.target(m).0]);
        arrows.push(t.arrows_between(a, b).next().ok_or_else(|| Error::Site("missing image arrow".into()))?);
    }
    SiteMorphism::new(s.clone(), t.clone(), objects, arrows)
}

/// `g* O_X(n)` equals `O_Y(n)` as data, for `g: P^r_Y → P^r_X`.
pub fn check_onfunc(bc: &BaseChange, n: i64) -> Result<bool> {
    let pulled = bc.x.twisted_bundle(n)?.pullback(&bc.map)?;
    Ok(pulled == bc.y.twisted_bundle(n)?)
}

/// A fixed nontrivial base change `Q[a] → Q[s^±1]`, `a ↦ s^2 + 1`.
pub fn sample_base_change() -> Result<RingHom> {
    let x = RingDesc::new(&["a"], &[] as &[&str])?;
    let y = RingDesc::new(&["s"], &["s"])?;
    RingHom::from_strings(&x, &y, &["s^2 + 1"])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Ring {
        RingDesc::rationals()
    }

    #[test]
    fn p1_shape() {
        let p = ProjSite::new(1, &q()).unwrap();
        let names: Vec<_> = p.site().objects().iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, ["P", "U0", "U1", "U01"]);
        let u0 = p.site().ring(p.chart(0, &[0]).unwrap());
        assert_eq!(u0.variables(), ["x1/x0"]);
        assert!(!u0.is_invertible(0));
        let u01 = p.site().ring(p.chart(0, &[0, 1]).unwrap());
        assert_eq!(u01.variables(), ["x0/x1"]);
        assert!(u01.is_invertible(0));
        let rep = p.site().validate();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn p0_is_a_single_chart() {
        let p = ProjSite::new(0, &q()).unwrap();
        assert_eq!(p.site().objects().len(), 1);
        assert_eq!(p.chart_sieve(), p.site().maximal_sieve(p.terminal()));
        assert!(p.site().validate().is_valid());
        assert_eq!(p.twisted_bundle(3).unwrap(), p.trivial_bundle(1).unwrap());
    }

    #[test]
    fn p2_has_seven_charts() {
        let p = ProjSite::new(2, &q()).unwrap();
        assert_eq!(p.site().objects().len(), 8);
        let rep = p.site().validate();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn infinity_site_is_valid() {
        let p = ProjSite::with_infinity(&q()).unwrap();
        let rep = p.site().validate();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn layered_site_is_valid() {
        let f = sample_base_change().unwrap();
        let p = ProjSite::layered(1, &[f.source().clone(), f.target().clone()], &[f]).unwrap();
        let rep = p.site().validate();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn o1_restriction() {
        let p = ProjSite::new(1, &q()).unwrap();
        let o1 = p.twisted_bundle(1).unwrap();
        let s = p.site();
        let g = s.arrows_between(p.chart(0, &[0, 1]).unwrap(), p.chart(0, &[0]).unwrap()).next().unwrap();
        assert_eq!(o1.restriction(g).unwrap().get(0, 0).to_string(), "x0/x1");
        assert_eq!(p.twisted_bundle(0).unwrap(), p.trivial_bundle(1).unwrap());
    }

    #[test]
    fn smallest_rule_differs_as_data_but_standardizes_to_largest() {
        for r in 1..=2 {
            let p = ProjSite::new(r, &q()).unwrap();
            let s = p.site();
            let u01 = p.chart(0, &[0, 1]).unwrap();
            let to_u0 = s.arrows_between(u01, p.chart(0, &[0]).unwrap()).next().unwrap();
            for n in -2..=2i64 {
                let big = p.twisted_bundle_with(n, ChartRule::Largest).unwrap();
                let small = p.twisted_bundle_with(n, ChartRule::Smallest).unwrap();
                assert_eq!(big == small, n == 0, "r = {r}, n = {n}");
                if n != 0 {
                    assert_ne!(big.restriction(to_u0).unwrap(), small.restriction(to_u0).unwrap());
                }
                // φ_W = (x_M/x_m)^n with M, m the largest and smallest charts over W
                let mut phi = BTreeMap::new();
                for &w in small.presheaf().ranks().keys() {
                    let (hi, lo) =
                        (p.chart_of(w, ChartRule::Largest).unwrap(), p.chart_of(w, ChartRule::Smallest).unwrap());
                    phi.insert(w, Matrix::scalar(p.ratio(w, hi, lo).unwrap().pow(n).unwrap()));
                }
                assert_eq!(crate::bundle::standardize(small.presheaf(), &phi).unwrap(), big, "r = {r}, n = {n}");
            }
        }
    }

    #[test]
    fn oninf_examples() {
        for n in [0, 1, -3] {
            assert!(check_oninf(n, ChartRule::Largest).unwrap());
        }
        let p1 = ProjSite::with_infinity(&q()).unwrap();
        let f = infinity_morphism(&p1).unwrap();
        let x = f.source();
        assert_eq!(f.pullback_sieve(&p1.chart_sieve()).unwrap(), x.maximal_sieve(x.terminal().unwrap()));
    }

    #[test]
    fn onfunc_examples() {
        let f = sample_base_change().unwrap();
        for r in 1..=2 {
            let bc = base_change(r, &f).unwrap();
            assert_eq!(bc.map.pullback_sieve(&bc.x.chart_sieve()).unwrap(), bc.y.chart_sieve());
            for n in -2..=2 {
                assert!(check_onfunc(&bc, n).unwrap());
            }
            let id = base_change(r, &RingHom::identity(f.source())).unwrap();
            let o = id.x.twisted_bundle(2).unwrap();
            assert_eq!(o.pullback(&id.map).unwrap(), id.y.twisted_bundle(2).unwrap());
        }
    }

    #[test]
    fn ratio_needs_the_denominator_chart() {
        let p = ProjSite::new(2, &q()).unwrap();
        let u0 = p.chart(0, &[0]).unwrap();
        assert_eq!(p.ratio(u0, 2, 0).unwrap().to_string(), "x2/x0");
        assert!(p.ratio(u0, 0, 2).is_err());
        let u012 = p.chart(0, &[0, 1, 2]).unwrap();
        let x = p.ratio(u012, 0, 1).unwrap();
        assert_eq!(x.try_mul(&p.ratio(u012, 1, 0).unwrap()).unwrap(), RingElem::one(p.site().ring(u012)));
    }
}
