//! Standard vector bundles: free presheaves whose restriction matrices are
//! all square and invertible.
//!
//! Direct sums, tensor products and pullbacks are computed on the stored data
//! (block sums, Kronecker products, verbatim reuse), so the strict laws they
//! satisfy hold as equality of data rather than up to isomorphism.

mod cocycle;
mod exact;
mod morphism;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::presheaf::{presheaf_pullback, FreePresheaf, PresheafReport};
use crate::site::{FiniteSite, MorId, ObjId, Sieve, SiteMorphism};

pub use cocycle::{check_cocycle, cocycle_build, cocycle_extract, comparison_morphism, Transitions};
pub use exact::{canonical_split, ExactSequence, Splitting};
pub use morphism::{hom_dimension, BundleMorphism};

#[derive(Clone, PartialEq, Eq)]
pub struct StdBundle {
    data: FreePresheaf,
}

impl std::fmt::Debug for StdBundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.data.fmt(f)
    }
}

pub(crate) fn same_site(a: &Arc<FiniteSite>, b: &Arc<FiniteSite>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Presheaf functoriality plus square, invertible restriction matrices.
pub fn validate_bundle(p: &FreePresheaf) -> PresheafReport {
    let mut rep = p.validate();
    for (&m, a) in p.restrictions() {
        if !a.is_square() {
            rep.violations.push(format!("restriction along `{}` is not square", p.site().arrow(m).name));
        } else if !a.invertible() {
            rep.violations.push(format!("restriction along `{}` is not invertible", p.site().arrow(m).name));
        }
    }
    rep
}

impl StdBundle {
    pub fn new(data: FreePresheaf) -> Result<Self> {
        let rep = validate_bundle(&data);
        if !rep.is_valid() {
            return Err(Error::Bundle(rep.violations.join("; ")));
        }
        Ok(StdBundle { data })
    }

    /// `O^n` on the sieve `h`.
    pub fn trivial(site: &Arc<FiniteSite>, h: &Sieve, n: usize) -> Result<Self> {
        Ok(StdBundle { data: FreePresheaf::constant(site.clone(), h.clone(), n)? })
    }

    pub fn zero(site: &Arc<FiniteSite>, h: &Sieve) -> Result<Self> {
        Self::trivial(site, h, 0)
    }

    pub fn presheaf(&self) -> &FreePresheaf {
        &self.data
    }

    pub fn site(&self) -> &Arc<FiniteSite> {
        self.data.site()
    }

    pub fn sieve(&self) -> &Sieve {
        self.data.sieve()
    }

    pub fn rank(&self) -> Option<usize> {
        self.data.rank()
    }

    pub fn rank_at(&self, o: ObjId) -> Result<usize> {
        self.data.rank_at(o)
    }

    pub fn restriction(&self, g: MorId) -> Result<&Matrix> {
        self.data.restriction(g)
    }

    fn combine(
        &self,
        other: &StdBundle,
        op: impl Fn(&Matrix, &Matrix) -> Result<Matrix>,
        rank: impl Fn(usize, usize) -> usize,
    ) -> Result<StdBundle> {
        if !same_site(self.site(), other.site()) {
            return Err(Error::Bundle("bundles live on different sites".into()));
        }
        let site = self.site();
        let h = site.sieve_intersect(self.sieve(), other.sieve())?;
        let objs = site.sieve_objects(&h)?;
        let mut ranks = BTreeMap::new();
        for &o in &objs {
            ranks.insert(o, rank(self.rank_at(o)?, other.rank_at(o)?));
        }
        let mut restrictions = BTreeMap::new();
        for m in site.arrow_ids().filter(|m| objs.contains(&site.target(*m))) {
            restrictions.insert(m, op(self.restriction(m)?, other.restriction(m)?)?);
        }
        Ok(StdBundle { data: FreePresheaf::new(site.clone(), h, ranks, restrictions)? })
    }

    /// `E ⊕ F` on `H ∩ K`, restrictions `diag(E(g), F(g))`.
    pub fn direct_sum(&self, other: &StdBundle) -> Result<StdBundle> {
        self.combine(other, Matrix::block_diag, |a, b| a + b)
    }

    /// `E ⊗ F` on `H ∩ K`, restrictions `E(g) ⊗ F(g)`.
    pub fn tensor(&self, other: &StdBundle) -> Result<StdBundle> {
        self.combine(other, Matrix::kron, |a, b| a * b)
    }

    /// `f*E`, with the restriction data reused verbatim.
    pub fn pullback(&self, f: &SiteMorphism) -> Result<StdBundle> {
        Ok(StdBundle { data: presheaf_pullback(f, &self.data)? })
    }

    /// `E|_Y` on the slice site over `y`.
    pub fn restrict_small(&self, y: ObjId) -> Result<StdBundle> {
        Ok(StdBundle { data: self.data.restrict_small(y)? })
    }

    pub fn restrict_sieve(&self, k: &Sieve) -> Result<StdBundle> {
        Ok(StdBundle { data: self.data.restrict_sieve(k)? })
    }
}

/// Conjugates a locally free presheaf by trivializations `φ_V: O^n → E(V)`:
/// the new restriction along `g: W → V` is `φ_W⁻¹ · E(g) · g(φ_V)`.
pub fn standardize(e: &FreePresheaf, phi: &BTreeMap<ObjId, Matrix>) -> Result<StdBundle> {
    let site = e.site();
    let mut inverses = BTreeMap::new();
    for &o in e.ranks().keys() {
        let p = phi.get(&o).ok_or_else(|| Error::Bundle(format!("no trivialization at `{}`", site.object(o).name)))?;
        inverses.insert(
            o,
            p.inverse()
                .map_err(|_| Error::Bundle(format!("trivialization at `{}` is not invertible", site.object(o).name)))?,
        );
    }
    let mut restrictions = BTreeMap::new();
    for (&g, r) in e.restrictions() {
        let (w, v) = (site.source(g), site.target(g));
        let m = inverses[&w].matmul(r)?.matmul(&phi[&v].hom_entrywise(site.hom(g))?)?;
        restrictions.insert(g, m);
    }
    let data = FreePresheaf::new(site.clone(), e.sieve().clone(), e.ranks().clone(), restrictions)?;
    StdBundle::new(data)
}

/// A declared covering of the terminal object lying inside `h`.
pub fn covering_in(site: &FiniteSite, h: &Sieve) -> Result<Vec<MorId>> {
    site.belongs_witness(h)
        .map(|i| site.coverings(h.target())[i].clone())
        .ok_or_else(|| Error::Bundle("the sieve contains no declared covering".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::ProjSite;
    use crate::ring::{rat, RingDesc, RingElem};

    fn p1() -> ProjSite {
        ProjSite::new(1, &RingDesc::rationals()).unwrap()
    }

    #[test]
    fn trivial_and_twisted_are_valid() {
        let ps = p1();
        for n in 0..3 {
            let o = ps.trivial_bundle(n).unwrap();
            assert!(validate_bundle(o.presheaf()).is_valid());
            assert_eq!(o.rank(), Some(n));
        }
        assert_eq!(ps.twisted_bundle(1).unwrap().rank(), Some(1));
    }

    #[test]
    fn non_unit_restriction_is_rejected() {
        let ps = p1();
        let o = ps.trivial_bundle(1).unwrap();
        let s = ps.site();
        let m = s.arrow_by_name("U01->U1").unwrap();
        let mut r = o.presheaf().restrictions().clone();
        // [x0/x1 + 1] is not a unit of Q[x0/x1^±1]
        let ring = s.ring(s.source(m));
        r.insert(m, Matrix::parse(ring, 1, 1, &["x0/x1 + 1"]).unwrap());
        let p = FreePresheaf::new(s.clone(), o.sieve().clone(), o.presheaf().ranks().clone(), r).unwrap();
        assert!(!validate_bundle(&p).is_valid());
        assert!(StdBundle::new(p).is_err());
    }

    #[test]
    fn standardize_by_identity_and_scalars() {
        let ps = p1();
        let e = ps.twisted_bundle(2).unwrap();
        let ranks = e.presheaf().ranks();
        let s = ps.site();
        let id: BTreeMap<_, _> = ranks.keys().map(|&o| (o, Matrix::identity(s.ring(o), 1))).collect();
        assert_eq!(standardize(e.presheaf(), &id).unwrap(), e);
        // the same constant unit on every object cancels in rank 1
        let u: BTreeMap<_, _> =
            ranks.keys().map(|&o| (o, Matrix::scalar(RingElem::constant(s.ring(o), rat(-5))))).collect();
        assert_eq!(standardize(e.presheaf(), &u).unwrap(), e);
        let bad: BTreeMap<_, _> = ranks.keys().map(|&o| (o, Matrix::zeros(s.ring(o), 1, 1))).collect();
        assert!(standardize(e.presheaf(), &bad).is_err());
    }

    #[test]
    fn sum_ranks_add_and_tensor_ranks_multiply() {
        let ps = p1();
        let (a, b) = (ps.trivial_bundle(2).unwrap(), ps.twisted_bundle(1).unwrap());
        let b3 = b.direct_sum(&b).unwrap().direct_sum(&b).unwrap();
        assert_eq!(a.direct_sum(&b3).unwrap().rank(), Some(5));
        assert_eq!(a.tensor(&b3).unwrap().rank(), Some(6));
    }

    #[test]
    fn bundles_on_different_sites_do_not_combine() {
        let a = p1().trivial_bundle(1).unwrap();
        let b = ProjSite::new(2, &RingDesc::rationals()).unwrap().trivial_bundle(1).unwrap();
        assert!(a.direct_sum(&b).is_err());
    }

    #[test]
    fn linear_form_is_a_morphism() {
        let ps = p1();
        let s = ps.site();
        let cover = ps.chart_cover(0);
        let o = Arc::new(ps.trivial_bundle(1).unwrap());
        let o1 = Arc::new(ps.twisted_bundle(1).unwrap());
        let local = |a: &str, b: &str| {
            vec![
                Matrix::parse(s.ring(s.source(cover[0])), 1, 1, &[a]).unwrap(),
                Matrix::parse(s.ring(s.source(cover[1])), 1, 1, &[b]).unwrap(),
            ]
        };
        // 2·x0 + 3·x1
        let m = BundleMorphism::new(o.clone(), o1.clone(), cover.clone(), local("2 + 3*x1/x0", "2*x0/x1 + 3"));
        assert!(m.is_ok());
        // the chart values of x0 and x1 swapped are not compatible
        assert!(BundleMorphism::new(o.clone(), o1.clone(), cover.clone(), local("x1/x0", "x0/x1")).is_err());
        let id = BundleMorphism::identity(&o1).unwrap();
        let m = m.unwrap();
        assert!(id.compose(&m).unwrap().equals(&m).unwrap());
    }

    #[test]
    fn hom_dimensions_on_the_line() {
        let ps = p1();
        assert_eq!(ps.global_sections_dim(0).unwrap(), 1);
        assert_eq!(ps.global_sections_dim(2).unwrap(), 3);
        assert_eq!(ps.global_sections_dim(-1).unwrap(), 0);
        let o = ps.trivial_bundle(1).unwrap();
        let om1 = ps.twisted_bundle(-1).unwrap();
        assert_eq!(hom_dimension(&o, &om1, 6).unwrap(), 0);
    }

    #[test]
    fn trivial_transitions_are_identities() {
        let ps = p1();
        let e = ps.trivial_bundle(2).unwrap();
        let tr = cocycle_extract(&e, &ps.chart_cover(0)).unwrap();
        assert_eq!(tr.t.len(), 4);
        assert!(tr.t.values().all(Matrix::is_identity));
        check_cocycle(ps.site(), &tr).unwrap();
    }

    #[test]
    fn broken_cocycle_is_rejected() {
        let ps = p1();
        let mut tr = cocycle_extract(&ps.twisted_bundle(1).unwrap(), &ps.chart_cover(0)).unwrap();
        let t01 = tr.t[&(0, 1)].clone();
        // T10 should be the inverse of T01
        tr.t.insert((1, 0), t01);
        assert!(check_cocycle(ps.site(), &tr).is_err());
        assert!(cocycle_build(ps.site(), &tr).is_err());
    }

    #[test]
    fn split_sequence_tensored_with_o1() {
        let ps = p1();
        let e = Arc::new(ps.twisted_bundle(-1).unwrap());
        let f = Arc::new(ps.trivial_bundle(2).unwrap());
        let seq = canonical_split(&e, &f).unwrap();
        seq.verify().unwrap();
        let d = Arc::new(ps.twisted_bundle(1).unwrap());
        seq.tensor_right(&d).unwrap().verify().unwrap();
        seq.tensor_left(&d).unwrap().verify().unwrap();
    }

    #[test]
    fn tensor_with_zero_is_zero() {
        let ps = p1();
        let z = StdBundle::zero(ps.site(), &ps.chart_sieve()).unwrap();
        let e = ps.twisted_bundle(3).unwrap();
        assert_eq!(z.tensor(&e).unwrap(), z);
        assert_eq!(e.tensor(&z).unwrap().rank(), Some(0));
    }
}
