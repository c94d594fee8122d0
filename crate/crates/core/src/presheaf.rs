//! Free-valued presheaves on sieves and the section calculus of their
//! sheafification.
//!
//! A [`FreePresheaf`] on a sieve `H` of the terminal object assigns a rank to
//! every object of `C_H` and a matrix to every arrow between them. A section
//! `v` over `R(V)` restricts along `g: W → V` to `R(g) · g(v)`, so
//! functoriality reads `R(g ∘ h) = R(h) · h(R(g))`.
//!
//! Sections of the sheafification are never materialized. A [`SectionRep`] is
//! a family of local sections on a cover that agree on chosen overlaps, and
//! two representatives are equal when they agree on all chosen overlaps,
//! possibly after passing to declared coverings of the overlap.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linsolve;
use crate::matrix::Matrix;
use crate::ring::{Rational, RingElem};
use crate::site::{FiniteSite, MorId, ObjId, Sieve, SiteMorphism};

/// How many times equality may descend through declared coverings.
const LOCAL_DEPTH: usize = 3;
/// Largest coefficient system attempted when gluing.
const MAX_UNKNOWNS: usize = 40_000;

#[derive(Clone)]
pub struct FreePresheaf {
    site: Arc<FiniteSite>,
    sieve: Sieve,
    ranks: BTreeMap<ObjId, usize>,
    restrictions: BTreeMap<MorId, Matrix>,
}

impl PartialEq for FreePresheaf {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.site, &other.site) || *self.site == *other.site)
            && self.sieve == other.sieve
            && self.ranks == other.ranks
            && self.restrictions == other.restrictions
    }
}

impl Eq for FreePresheaf {}

impl fmt::Debug for FreePresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FreePresheaf {{")?;
        for (o, r) in &self.ranks {
            writeln!(f, "  rank {} = {r}", self.site.object(*o).name)?;
        }
        for (m, a) in &self.restrictions {
            writeln!(f, "  {} : {a:?}", self.site.arrow(*m).name)?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, Default)]
pub struct PresheafReport {
    pub violations: Vec<String>,
}

impl PresheafReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for PresheafReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Local sections `s_i` over a cover `{U_i → U}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionRep {
    pub object: ObjId,
    pub cover: Vec<MorId>,
    pub sections: Vec<Vec<RingElem>>,
}

impl FreePresheaf {
    /// Checks that the data is indexed by exactly `C_H` and has the right
    /// shapes and rings. Functoriality is checked by [`FreePresheaf::validate`].
    pub fn new(
        site: Arc<FiniteSite>,
        sieve: Sieve,
        ranks: BTreeMap<ObjId, usize>,
        restrictions: BTreeMap<MorId, Matrix>,
    ) -> Result<Self> {
        let objs = site.sieve_objects(&sieve).map_err(|e| Error::Presheaf(e.to_string()))?;
        if !site.sieve_is_closed(&sieve) {
            return Err(Error::Presheaf("sieve is not closed".into()));
        }
        if ranks.keys().copied().ne(objs.iter().copied()) {
            return Err(Error::Presheaf("ranks must be given for exactly the objects of the sieve".into()));
        }
        let arrows: Vec<MorId> = site.arrow_ids().filter(|&m| objs.contains(&site.target(m))).collect();
        if restrictions.keys().copied().ne(arrows.iter().copied()) {
            return Err(Error::Presheaf("restrictions must be given for exactly the arrows of the sieve".into()));
        }
        for (&m, a) in &restrictions {
            let (s, t) = (site.source(m), site.target(m));
            if a.rows() != ranks[&s] || a.cols() != ranks[&t] {
                return Err(Error::Presheaf(format!(
                    "restriction along `{}` is {}x{}, expected {}x{}",
                    site.arrow(m).name,
                    a.rows(),
                    a.cols(),
                    ranks[&s],
                    ranks[&t]
                )));
            }
            if a.ring() != site.ring(s) {
                return Err(Error::Presheaf(format!("restriction along `{}` over the wrong ring", site.arrow(m).name)));
            }
        }
        Ok(FreePresheaf { site, sieve, ranks, restrictions })
    }

    /// Rank `n` everywhere with identity restrictions.
    pub fn constant(site: Arc<FiniteSite>, sieve: Sieve, n: usize) -> Result<Self> {
        let objs = site.sieve_objects(&sieve)?;
        let ranks = objs.iter().map(|&o| (o, n)).collect();
        let restrictions = site
            .arrow_ids()
            .filter(|&m| objs.contains(&site.target(m)))
            .map(|m| (m, Matrix::identity(site.ring(site.source(m)), n)))
            .collect();
        Self::new(site, sieve, ranks, restrictions)
    }

    pub fn site(&self) -> &Arc<FiniteSite> {
        &self.site
    }

    pub fn sieve(&self) -> &Sieve {
        &self.sieve
    }

    pub fn ranks(&self) -> &BTreeMap<ObjId, usize> {
        &self.ranks
    }

    pub fn restrictions(&self) -> &BTreeMap<MorId, Matrix> {
        &self.restrictions
    }

    pub fn contains(&self, o: ObjId) -> bool {
        self.ranks.contains_key(&o)
    }

    pub fn rank_at(&self, o: ObjId) -> Result<usize> {
        self.ranks
            .get(&o)
            .copied()
            .ok_or_else(|| Error::Presheaf(format!("`{}` is not in the sieve", self.site.object(o).name)))
    }

    /// The common rank, if all objects share one.
    pub fn rank(&self) -> Option<usize> {
        let mut it = self.ranks.values();
        let first = *it.next()?;
        it.all(|&r| r == first).then_some(first)
    }

    pub fn restriction(&self, g: MorId) -> Result<&Matrix> {
        self.restrictions
            .get(&g)
            .ok_or_else(|| Error::Presheaf(format!("`{}` is not an arrow of the sieve", self.site.arrow(g).name)))
    }

    pub fn validate(&self) -> PresheafReport {
        let mut rep = PresheafReport::default();
        let s = &*self.site;
        for &o in self.ranks.keys() {
            if !self.restrictions[&s.identity(o)].is_identity() {
                rep.violations
                    .push(format!("restriction along the identity of `{}` is not the identity", s.object(o).name));
            }
        }
        for (&g, rg) in &self.restrictions {
            for &h in s.arrows_into(s.source(g)) {
                let Ok(gh) = s.compose(g, h) else {
                    rep.violations.push(format!("missing composite through `{}`", s.arrow(g).name));
                    continue;
                };
                let rh = &self.restrictions[&h];
                let expected = rg.hom_entrywise(s.hom(h)).and_then(|x| rh.matmul(&x));
                match expected {
                    Ok(e) if e == self.restrictions[&gh] => {}
                    _ => rep.violations.push(format!(
                        "restriction along {} ∘ {} is not the composite",
                        s.arrow(g).name,
                        s.arrow(h).name
                    )),
                }
            }
        }
        rep
    }

    /// `R(g) · g(v)`.
    pub fn restrict(&self, g: MorId, v: &[RingElem]) -> Result<Vec<RingElem>> {
        let r = self.restriction(g)?;
        if v.len() != r.cols() {
            return Err(Error::Dimension(format!("section of length {} for rank {}", v.len(), r.cols())));
        }
        let h = self.site.hom(g);
        let pushed = v.iter().map(|x| h.apply(x)).collect::<Result<Vec<_>>>()?;
        r.apply(&pushed)
    }

    fn check_vector(&self, o: ObjId, v: &[RingElem]) -> Result<()> {
        let n = self.rank_at(o)?;
        if v.len() != n {
            return Err(Error::Dimension(format!("section of length {} for rank {n}", v.len())));
        }
        if v.iter().any(|x| x.ring() != self.site.ring(o)) {
            return Err(Error::RingMismatch(format!("section not over the ring of `{}`", self.site.object(o).name)));
        }
        Ok(())
    }

    /// Builds a representative, checking agreement on every chosen overlap.
    pub fn section(&self, object: ObjId, cover: Vec<MorId>, sections: Vec<Vec<RingElem>>) -> Result<SectionRep> {
        if cover.len() != sections.len() {
            return Err(Error::Presheaf("one section per cover member is required".into()));
        }
        for (&c, s) in cover.iter().zip(&sections) {
            if self.site.target(c) != object {
                return Err(Error::Presheaf(format!(
                    "`{}` does not target the section's object",
                    self.site.arrow(c).name
                )));
            }
            self.check_vector(self.site.source(c), s)?;
        }
        let rep = SectionRep { object, cover, sections };
        if !self.agree(&rep, &rep)? {
            return Err(Error::Presheaf("local sections disagree on an overlap".into()));
        }
        Ok(rep)
    }

    pub fn unit_section(&self, object: ObjId, v: Vec<RingElem>) -> Result<SectionRep> {
        self.check_vector(object, &v)?;
        Ok(SectionRep { object, cover: vec![self.site.identity(object)], sections: vec![v] })
    }

    fn agree(&self, a: &SectionRep, b: &SectionRep) -> Result<bool> {
        for (&ci, si) in a.cover.iter().zip(&a.sections) {
            for (&cj, sj) in b.cover.iter().zip(&b.sections) {
                let pb = self.site.pullback(ci, cj)?;
                let x = self.restrict(pb.left, si)?;
                let y = self.restrict(pb.right, sj)?;
                if !self.locally_equal(pb.apex, &x, &y, LOCAL_DEPTH)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Equality in the separated quotient: equal, or equal after restricting
    /// to every member of some declared covering.
    pub fn locally_equal(&self, o: ObjId, x: &[RingElem], y: &[RingElem], depth: usize) -> Result<bool> {
        if x == y {
            return Ok(true);
        }
        if depth == 0 {
            return Ok(false);
        }
        'cov: for cov in self.site.coverings(o) {
            if cov.iter().any(|&c| self.site.is_isomorphism(c)) {
                continue;
            }
            for &c in cov {
                let (xc, yc) = (self.restrict(c, x)?, self.restrict(c, y)?);
                if !self.locally_equal(self.site.source(c), &xc, &yc, depth - 1)? {
                    continue 'cov;
                }
            }
            return Ok(true);
        }
        Ok(false)
    }

    pub fn sections_equal(&self, a: &SectionRep, b: &SectionRep) -> Result<bool> {
        if a.object != b.object {
            return Err(Error::Presheaf("comparing sections over different objects".into()));
        }
        self.agree(a, b)
    }

    /// `[{U_i ×_U V → V}, {p_i* s_i}]` for `f: V → U`.
    pub fn section_pullback(&self, a: &SectionRep, f: MorId) -> Result<SectionRep> {
        if self.site.target(f) != a.object {
            return Err(Error::Presheaf("pullback along an arrow not targeting the section's object".into()));
        }
        let mut cover = Vec::with_capacity(a.cover.len());
        let mut sections = Vec::with_capacity(a.cover.len());
        for (&c, s) in a.cover.iter().zip(&a.sections) {
            let pb = self.site.pullback(c, f)?;
            cover.push(pb.right);
            sections.push(self.restrict(pb.left, s)?);
        }
        Ok(SectionRep { object: self.site.source(f), cover, sections })
    }

    /// The vector `v` over `R(U)` whose unit section equals `a`.
    ///
    /// Solved by matching Laurent coefficients over a bounded exponent box;
    /// the answer is checked exactly before it is returned.
    pub fn unit_inverse(&self, a: &SectionRep) -> Result<Vec<RingElem>> {
        let u = a.object;
        let n = self.rank_at(u)?;
        let ring = self.site.ring(u).clone();
        if n == 0 {
            return Ok(Vec::new());
        }
        if ring.is_zero_ring() {
            return Ok(vec![RingElem::zero(&ring); n]);
        }
        let s = &*self.site;
        for (&c, sec) in a.cover.iter().zip(&a.sections) {
            if let Some(back) =
                s.arrows_between(u, s.source(c)).find(|&g| s.compose(c, g).is_ok_and(|cg| cg == s.identity(u)))
            {
                let v = self.restrict(back, sec)?;
                if self.sections_equal(&self.unit_section(u, v.clone())?, a)? {
                    return Ok(v);
                }
            }
        }
        let mut bound = 1;
        for (&c, sec) in a.cover.iter().zip(&a.sections) {
            let m = sec.iter().map(|x| x.max_abs_exponent()).max().unwrap_or(0);
            bound = bound.max(m + self.restriction(c)?.max_abs_exponent() + 1);
        }
        let bound = 2 * bound;
        let box_ = exponent_box(ring.invertible_mask(), bound);
        let unknowns = n * box_.len();
        if unknowns > MAX_UNKNOWNS {
            return Err(Error::Gluing(format!("{unknowns} unknowns exceed the solver limit")));
        }
        let mut eq_index: HashMap<(usize, usize, Vec<i32>), usize> = HashMap::new();
        let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); unknowns];
        let mut rhs_terms: Vec<(usize, Rational)> = Vec::new();
        let mut index = |key: (usize, usize, Vec<i32>)| {
            let len = eq_index.len();
            *eq_index.entry(key).or_insert(len)
        };
        for (i, (&c, sec)) in a.cover.iter().zip(&a.sections).enumerate() {
            let r = self.restriction(c)?;
            let h = s.hom(c);
            for (bi, e) in box_.iter().enumerate() {
                let img = h.apply(&RingElem::monomial(&ring, Rational::from_integer(1.into()), e.clone())?)?;
                for k in 0..n {
                    for row in 0..r.rows() {
                        let val = r.get(row, k).try_mul(&img)?;
                        for (exps, coeff) in val.terms() {
                            let eq = index((i, row, exps.clone()));
                            columns[k * box_.len() + bi].push((eq, coeff.clone()));
                        }
                    }
                }
            }
            for (row, x) in sec.iter().enumerate() {
                for (exps, coeff) in x.terms() {
                    rhs_terms.push((index((i, row, exps.clone())), coeff.clone()));
                }
            }
        }
        let neq = eq_index.len();
        let zero = Rational::from_integer(0.into());
        let mut rows = vec![vec![zero.clone(); unknowns]; neq];
        for (col, entries) in columns.into_iter().enumerate() {
            for (eq, c) in entries {
                rows[eq][col] += c;
            }
        }
        let mut rhs = vec![zero; neq];
        for (eq, c) in rhs_terms {
            rhs[eq] += c;
        }
        let sol = linsolve::solve(&rows, &rhs, unknowns)
            .ok_or_else(|| Error::Gluing("local sections do not come from a single section".into()))?;
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let terms = box_.iter().enumerate().map(|(bi, e)| (e.clone(), sol[k * box_.len() + bi].clone()));
            v.push(RingElem::from_terms(&ring, terms)?);
        }
        if !self.sections_equal(&self.unit_section(u, v.clone())?, a)? {
            return Err(Error::Gluing("solved section does not restrict to the given data".into()));
        }
        Ok(v)
    }

    /// `F|_K` for a sub-sieve `K ⊆ H`: the same data, restricted to `C_K`.
    pub fn restrict_sieve(&self, k: &Sieve) -> Result<FreePresheaf> {
        if !k.is_subset(&self.sieve) {
            return Err(Error::Presheaf("restriction to a sieve not contained in H".into()));
        }
        let objs = self.site.sieve_objects(k)?;
        let ranks = self.ranks.iter().filter(|(o, _)| objs.contains(o)).map(|(o, r)| (*o, *r)).collect();
        let restrictions = self
            .restrictions
            .iter()
            .filter(|(m, _)| objs.contains(&self.site.target(**m)))
            .map(|(m, a)| (*m, a.clone()))
            .collect();
        Ok(FreePresheaf { site: self.site.clone(), sieve: k.clone(), ranks, restrictions })
    }

    /// `F|_Y` on the slice site over `y`.
    pub fn restrict_small(&self, y: ObjId) -> Result<FreePresheaf> {
        self.rank_at(y)?;
        let forget = self.site.slice(y)?;
        presheaf_pullback(&forget, self)
    }
}

/// `f*F`: `(f*F)(Z) = F(f(Z))`, with the data reused verbatim.
pub fn presheaf_pullback(f: &SiteMorphism, p: &FreePresheaf) -> Result<FreePresheaf> {
    if !Arc::ptr_eq(f.target(), &p.site) && **f.target() != *p.site {
        return Err(Error::Presheaf("site morphism does not land in the presheaf's site".into()));
    }
    let sieve = f.pullback_sieve(&p.sieve)?;
    let src = f.source();
    let objs = src.sieve_objects(&sieve)?;
    let mut ranks = BTreeMap::new();
    for &o in &objs {
        ranks.insert(o, p.rank_at(f.map_object(o))?);
    }
    let mut restrictions = BTreeMap::new();
    for m in src.arrow_ids().filter(|&m| objs.contains(&src.target(m))) {
        restrictions.insert(m, p.restriction(f.map_arrow(m))?.clone());
    }
    Ok(FreePresheaf { site: src.clone(), sieve, ranks, restrictions })
}

/// All exponent vectors with entries in `[-b, b]` for invertible variables
/// and `[0, b]` otherwise.
pub(crate) fn exponent_box(invertible: &[bool], b: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for &inv in invertible {
        let lo = if inv { -b } else { 0 };
        out = out
            .into_iter()
            .flat_map(|e| {
                (lo..=b).map(move |x| {
                    let mut e = e.clone();
                    e.push(x);
                    e
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{RingDesc, RingHom};
    use crate::site::SiteBuilder;

    /// `X` covered by `A = Q[a^±]` and the point `B = Q`, glued along `AB = Q`.
    fn line_site() -> (Arc<FiniteSite>, Sieve) {
        let q = RingDesc::rationals();
        let ra = RingDesc::new(&["a"], &["a"]).unwrap();
        let mut b = SiteBuilder::new();
        let x = b.object("X", &q);
        let a = b.object("A", &ra);
        let bb = b.object("B", &q);
        let ab = b.object("AB", &q);
        let ax = b.arrow("A->X", a, x, RingHom::from_strings(&q, &ra, &[] as &[&str]).unwrap()).unwrap();
        let bx = b.arrow("B->X", bb, x, RingHom::identity(&q)).unwrap();
        b.arrow("AB->X", ab, x, RingHom::identity(&q)).unwrap();
        b.arrow("AB->A", ab, a, RingHom::from_strings(&ra, &q, &["1"]).unwrap()).unwrap();
        b.arrow("AB->B", ab, bb, RingHom::identity(&q)).unwrap();
        b.close_thin().unwrap();
        b.pullbacks_by_meet(move |p, q, _| {
            Some(if p == q || q == x {
                p
            } else if p == x {
                q
            } else {
                ab
            })
        })
        .unwrap();
        b.covering(x, vec![ax, bx]);
        for o in [x, a, bb, ab] {
            let id = b.identity(o);
            b.covering(o, vec![id]);
        }
        b.terminal(x);
        let s = Arc::new(b.build().unwrap());
        assert!(s.validate().is_valid(), "{}", s.validate());
        let h = s.generate_sieve(x, &[ax, bx]).unwrap();
        (s, h)
    }

    #[test]
    fn constant_presheaf_is_valid() {
        let (s, h) = line_site();
        let p = FreePresheaf::constant(s, h, 1).unwrap();
        assert!(p.validate().is_valid());
        assert_eq!(p.rank(), Some(1));
    }

    #[test]
    fn broken_functoriality_is_reported() {
        let (s, _) = line_site();
        let h = s.maximal_sieve(s.terminal().unwrap());
        let p = FreePresheaf::constant(s.clone(), h.clone(), 1).unwrap();
        assert!(p.validate().is_valid());
        let mut r = p.restrictions().clone();
        let g = s.arrow_by_name("AB->A").unwrap();
        r.insert(g, Matrix::parse(s.ring(s.source(g)), 1, 1, &["2"]).unwrap());
        let bad = FreePresheaf::new(s, h, p.ranks().clone(), r).unwrap();
        assert!(!bad.validate().is_valid(), "{bad:?}");
    }

    #[test]
    fn sections_and_gluing() {
        let (s, h) = line_site();
        let p = FreePresheaf::constant(s.clone(), h, 1).unwrap();
        let a = s.object_by_name("A").unwrap();
        let ra = s.ring(a).clone();
        let v = vec![RingElem::parse(&ra, "3*a^2 - a^-1").unwrap()];
        let sec = p.unit_section(a, v.clone()).unwrap();
        assert!(p.sections_equal(&sec, &sec).unwrap());
        assert_eq!(p.unit_inverse(&sec).unwrap(), v);

        // a section on A and on B glue over X iff they agree at a = 1
        let ax = s.arrow_by_name("A->X").unwrap();
        let bx = s.arrow_by_name("B->X").unwrap();
        let x = s.object_by_name("X").unwrap();
        let q = s.ring(x).clone();
        let glued = p
            .section(
                x,
                vec![ax, bx],
                vec![vec![RingElem::parse(&ra, "a + 1").unwrap()], vec![RingElem::integer(&q, 2)]],
            )
            .unwrap();
        assert!(p
            .section(x, vec![ax, bx], vec![vec![RingElem::parse(&ra, "a").unwrap()], vec![RingElem::integer(&q, 2)]])
            .is_err());
        let pulled = p.section_pullback(&glued, ax).unwrap();
        assert_eq!(p.unit_inverse(&pulled).unwrap(), vec![RingElem::parse(&ra, "a + 1").unwrap()]);
    }

    #[test]
    fn rank_zero_sections() {
        let (s, h) = line_site();
        let p = FreePresheaf::constant(s.clone(), h, 0).unwrap();
        let a = s.object_by_name("A").unwrap();
        let sec = p.unit_section(a, vec![]).unwrap();
        assert_eq!(p.unit_inverse(&sec).unwrap(), Vec::<RingElem>::new());
    }

    #[test]
    fn restrict_sieve_reuses_data() {
        let (s, h) = line_site();
        let p = FreePresheaf::constant(s.clone(), h.clone(), 2).unwrap();
        assert_eq!(p.restrict_sieve(&h).unwrap(), p);
        let x = s.object_by_name("X").unwrap();
        let k = s.generate_sieve(x, &[s.arrow_by_name("AB->X").unwrap()]).unwrap();
        let pk = p.restrict_sieve(&k).unwrap();
        assert_eq!(pk.ranks().len(), 1);
        for (m, a) in pk.restrictions() {
            assert_eq!(a, &p.restrictions()[m]);
        }
        assert!(p.restrict_sieve(&s.maximal_sieve(x)).is_err());
    }

    #[test]
    fn exponent_box_shape() {
        assert_eq!(exponent_box(&[true, false], 1).len(), 6);
        assert_eq!(exponent_box(&[], 3), vec![Vec::<i32>::new()]);
    }
}
