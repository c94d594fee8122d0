//! Bundle morphisms as compatible matrix families on a covering of the
//! terminal object.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linsolve;
use crate::matrix::Matrix;
use crate::presheaf::exponent_box;
use crate::ring::{Rational, RingElem};
use crate::site::{MorId, SiteMorphism};

use super::{covering_in, same_site, StdBundle};

/// `α: E → F` given by `α_i: E(U_i) → F(U_i)` on a cover `{U_i → X}`.
#[derive(Clone, Debug)]
pub struct BundleMorphism {
    source: Arc<StdBundle>,
    target: Arc<StdBundle>,
    cover: Vec<MorId>,
    matrices: Vec<Matrix>,
}

fn same_bundle(a: &Arc<StdBundle>, b: &Arc<StdBundle>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Common cover and paired values on it.
type Refined = (Vec<MorId>, Vec<(Matrix, Matrix)>);

impl BundleMorphism {
    /// Builds a morphism, checking shapes and compatibility on every chosen overlap.
    pub fn new(
        source: Arc<StdBundle>,
        target: Arc<StdBundle>,
        cover: Vec<MorId>,
        matrices: Vec<Matrix>,
    ) -> Result<Self> {
        let a = Self::unchecked(source, target, cover, matrices)?;
        if let Some((i, j)) = a.incompatibility()? {
            let s = a.site();
            return Err(Error::Morphism(format!(
                "local matrices on `{}` and `{}` disagree on their overlap",
                s.arrow(a.cover[i]).name,
                s.arrow(a.cover[j]).name
            )));
        }
        Ok(a)
    }

    pub(crate) fn unchecked(
        source: Arc<StdBundle>,
        target: Arc<StdBundle>,
        cover: Vec<MorId>,
        matrices: Vec<Matrix>,
    ) -> Result<Self> {
        if !same_site(source.site(), target.site()) {
            return Err(Error::Morphism("endpoints live on different sites".into()));
        }
        if cover.len() != matrices.len() {
            return Err(Error::Morphism("one matrix per cover member is required".into()));
        }
        let site = source.site().clone();
        let x = site.terminal().ok_or_else(|| Error::Morphism("site has no terminal object".into()))?;
        for (&c, m) in cover.iter().zip(&matrices) {
            if site.target(c) != x {
                return Err(Error::Morphism(format!("`{}` does not target the terminal", site.arrow(c).name)));
            }
            if !source.sieve().contains(c) || !target.sieve().contains(c) {
                return Err(Error::Morphism(format!(
                    "`{}` is outside the sieves of the endpoints",
                    site.arrow(c).name
                )));
            }
            let u = site.source(c);
            if m.rows() != target.rank_at(u)? || m.cols() != source.rank_at(u)? || m.ring() != site.ring(u) {
                return Err(Error::Morphism(format!("matrix on `{}` has the wrong shape or ring", site.arrow(c).name)));
            }
        }
        Ok(BundleMorphism { source, target, cover, matrices })
    }

    pub fn source(&self) -> &Arc<StdBundle> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StdBundle> {
        &self.target
    }

    pub fn cover(&self) -> &[MorId] {
        &self.cover
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    fn site(&self) -> &Arc<crate::site::FiniteSite> {
        self.source.site()
    }

    /// The value at `W` reached by `h: W → U_i`: `F(h) · h(α_i) · E(h)⁻¹`.
    pub fn value_along(&self, i: usize, h: MorId) -> Result<Matrix> {
        let s = self.site();
        let f = self.target.restriction(h)?;
        let e_inv = self.source.restriction(h)?.inverse()?;
        f.matmul(&self.matrices[i].hom_entrywise(s.hom(h))?)?.matmul(&e_inv)
    }

    /// The value at the source of `m: W → X`, through the first cover member `m` factors through.
    pub fn value_at(&self, m: MorId) -> Result<Matrix> {
        let s = self.site();
        for (i, &c) in self.cover.iter().enumerate() {
            if let Some(h) = s.factor_through(m, c) {
                return self.value_along(i, h);
            }
        }
        Err(Error::Morphism(format!("`{}` does not factor through the cover", s.arrow(m).name)))
    }

    fn incompatibility(&self) -> Result<Option<(usize, usize)>> {
        let s = self.site();
        for i in 0..self.cover.len() {
            for j in 0..self.cover.len() {
                let pb = s.pullback(self.cover[i], self.cover[j])?;
                if self.value_along(i, pb.left)? != self.value_along(j, pb.right)? {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_compatible(&self) -> Result<bool> {
        Ok(self.incompatibility()?.is_none())
    }

    /// Identity matrices on a declared covering inside `H`.
    pub fn identity(e: &Arc<StdBundle>) -> Result<Self> {
        let cover = covering_in(e.site(), e.sieve())?;
        let s = e.site();
        let matrices = cover
            .iter()
            .map(|&c| Ok(Matrix::identity(s.ring(s.source(c)), e.rank_at(s.source(c))?)))
            .collect::<Result<Vec<_>>>()?;
        Self::unchecked(e.clone(), e.clone(), cover, matrices)
    }

    pub fn zero(e: &Arc<StdBundle>, f: &Arc<StdBundle>) -> Result<Self> {
        let s = e.site();
        let h = s.sieve_intersect(e.sieve(), f.sieve())?;
        let cover = covering_in(s, &h)?;
        let matrices = cover
            .iter()
            .map(|&c| {
                let u = s.source(c);
                Ok(Matrix::zeros(s.ring(u), f.rank_at(u)?, e.rank_at(u)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::unchecked(e.clone(), f.clone(), cover, matrices)
    }

    /// Values of `self` and `other` on the common refinement of their covers.
    fn refined(&self, other: &BundleMorphism) -> Result<Refined> {
        let s = self.site();
        let x = s.terminal().unwrap();
        let r = s.common_refinement(x, &[self.cover.clone(), other.cover.clone()])?;
        let mut vals = Vec::with_capacity(r.members.len());
        for t in 0..r.members.len() {
            let a = self.value_along(r.choice[0][t], r.factor[0][t])?;
            let b = other.value_along(r.choice[1][t], r.factor[1][t])?;
            vals.push((a, b));
        }
        Ok((r.members, vals))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &BundleMorphism) -> Result<BundleMorphism> {
        if !same_bundle(&first.target, &self.source) {
            return Err(Error::Morphism("morphisms are not composable".into()));
        }
        let (cover, vals) = self.refined(first)?;
        let matrices = vals.iter().map(|(b, a)| b.matmul(a)).collect::<Result<Vec<_>>>()?;
        Self::unchecked(first.source.clone(), self.target.clone(), cover, matrices)
    }

    /// Equality as maps of sheaves: same endpoints and equal values on a common refinement.
    pub fn equals(&self, other: &BundleMorphism) -> Result<bool> {
        if !same_bundle(&self.source, &other.source) || !same_bundle(&self.target, &other.target) {
            return Ok(false);
        }
        let (_, vals) = self.refined(other)?;
        Ok(vals.iter().all(|(a, b)| a == b))
    }

    pub fn add(&self, other: &BundleMorphism) -> Result<BundleMorphism> {
        if !same_bundle(&self.source, &other.source) || !same_bundle(&self.target, &other.target) {
            return Err(Error::Morphism("adding morphisms with different endpoints".into()));
        }
        let (cover, vals) = self.refined(other)?;
        let matrices = vals.iter().map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        Self::unchecked(self.source.clone(), self.target.clone(), cover, matrices)
    }

    fn combine(
        &self,
        other: &BundleMorphism,
        bundle: impl Fn(&StdBundle, &StdBundle) -> Result<StdBundle>,
        op: impl Fn(&Matrix, &Matrix) -> Result<Matrix>,
    ) -> Result<BundleMorphism> {
        let source = Arc::new(bundle(&self.source, &other.source)?);
        let target = Arc::new(bundle(&self.target, &other.target)?);
        let (cover, vals) = self.refined(other)?;
        let matrices = vals.iter().map(|(a, b)| op(a, b)).collect::<Result<Vec<_>>>()?;
        Self::unchecked(source, target, cover, matrices)
    }

    /// `α ⊕ β: E ⊕ E' → F ⊕ F'`.
    pub fn direct_sum(&self, other: &BundleMorphism) -> Result<BundleMorphism> {
        self.combine(other, StdBundle::direct_sum, Matrix::block_diag)
    }

    /// `α ⊗ β: E ⊗ E' → F ⊗ F'`.
    pub fn tensor(&self, other: &BundleMorphism) -> Result<BundleMorphism> {
        self.combine(other, StdBundle::tensor, Matrix::kron)
    }

    /// Same morphism with `source`/`target` replaced by structurally equal bundles.
    pub fn with_endpoints(&self, source: Arc<StdBundle>, target: Arc<StdBundle>) -> Result<BundleMorphism> {
        if *source != *self.source || *target != *self.target {
            return Err(Error::Morphism("replacement endpoints differ".into()));
        }
        Ok(BundleMorphism { source, target, cover: self.cover.clone(), matrices: self.matrices.clone() })
    }

    /// Injections and projections of `E ⊕ F`: `(i_E, i_F, p_E, p_F)`.
    pub fn biproduct(e: &Arc<StdBundle>, f: &Arc<StdBundle>) -> Result<[BundleMorphism; 4]> {
        let sum = Arc::new(e.direct_sum(f)?);
        let s = e.site();
        let cover = covering_in(s, sum.sieve())?;
        let mut mats: [Vec<Matrix>; 4] = Default::default();
        for &c in &cover {
            let u = s.source(c);
            let r = s.ring(u);
            let (m, n) = (e.rank_at(u)?, f.rank_at(u)?);
            let (im, in_) = (Matrix::identity(r, m), Matrix::identity(r, n));
            mats[0].push(im.vstack(&Matrix::zeros(r, n, m))?);
            mats[1].push(Matrix::zeros(r, m, n).vstack(&in_)?);
            mats[2].push(im.hstack(&Matrix::zeros(r, m, n))?);
            mats[3].push(Matrix::zeros(r, n, m).hstack(&in_)?);
        }
        let [a, b, c, d] = mats;
        Ok([
            Self::new(e.clone(), sum.clone(), cover.clone(), a)?,
            Self::new(f.clone(), sum.clone(), cover.clone(), b)?,
            Self::new(sum.clone(), e.clone(), cover.clone(), c)?,
            Self::new(sum, f.clone(), cover, d)?,
        ])
    }

    /// `f*α` for a site morphism `f`, on a declared covering of the new terminal.
    pub fn pullback(&self, f: &SiteMorphism) -> Result<BundleMorphism> {
        let source = Arc::new(self.source.pullback(f)?);
        let target = Arc::new(self.target.pullback(f)?);
        let ys = f.source();
        let h = ys.sieve_intersect(source.sieve(), target.sieve())?;
        let cover = covering_in(ys, &h)?;
        let base = f.base_arrow()?;
        let xs = f.target();
        let mut matrices = Vec::with_capacity(cover.len());
        for &d in &cover {
            let m = xs.compose(base, f.map_arrow(d))?;
            matrices.push(self.value_at(m)?);
        }
        Self::unchecked(source, target, cover, matrices)
    }
}

/// Dimension over the rationals of the space of morphisms `E → F` whose local
/// matrices on a declared covering have exponents in `[-bound, bound]`.
///
/// Every solution found is a genuine morphism; the bound only limits which
/// ones are seen.
pub fn hom_dimension(e: &StdBundle, f: &StdBundle, bound: i32) -> Result<usize> {
    if !same_site(e.site(), f.site()) {
        return Err(Error::Morphism("bundles live on different sites".into()));
    }
    let s = e.site();
    let h = s.sieve_intersect(e.sieve(), f.sieve())?;
    let cover = covering_in(s, &h)?;
    // unknown blocks: for each cover member, each matrix entry, each monomial
    let mut offsets = Vec::new();
    let mut boxes = Vec::new();
    let mut shapes = Vec::new();
    let mut total = 0;
    for &c in &cover {
        let u = s.source(c);
        let b = exponent_box(s.ring(u).invertible_mask(), bound);
        let (r, k) = (f.rank_at(u)?, e.rank_at(u)?);
        offsets.push(total);
        total += r * k * b.len();
        boxes.push(b);
        shapes.push((r, k));
    }
    let mut eqs: HashMap<(usize, usize, usize, Vec<i32>), usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, Rational)> = Vec::new();
    for i in 0..cover.len() {
        for j in (i + 1)..cover.len() {
            let pb = s.pullback(cover[i], cover[j])?;
            let pair = i * cover.len() + j;
            for (side, idx, arrow) in [(1, i, pb.left), (-1, j, pb.right)] {
                let fr = f.restriction(arrow)?;
                let er = e.restriction(arrow)?.inverse()?;
                let hom = s.hom(arrow);
                let u = s.source(cover[idx]);
                let (r, k) = shapes[idx];
                for (bi, exps) in boxes[idx].iter().enumerate() {
                    let img =
                        hom.apply(&RingElem::monomial(s.ring(u), Rational::from_integer(1.into()), exps.clone())?)?;
                    for a in 0..r {
                        for b in 0..k {
                            // value contribution of the unit matrix E_{ab}·monomial
                            for row in 0..fr.rows() {
                                let left = fr.get(row, a).try_mul(&img)?;
                                if left.is_zero() {
                                    continue;
                                }
                                for col in 0..er.cols() {
                                    let val = left.try_mul(er.get(b, col))?;
                                    for (ex, c) in val.terms() {
                                        let n = eqs.len();
                                        let eq = *eqs.entry((pair, row, col, ex.clone())).or_insert(n);
                                        let var = offsets[idx] + (a * k + b) * boxes[idx].len() + bi;
                                        let c = if side == 1 { c.clone() } else { -c.clone() };
                                        entries.push((eq, var, c));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let zero = Rational::from_integer(0.into());
    let mut rows = vec![vec![zero; total]; eqs.len()];
    for (eq, var, c) in entries {
        rows[eq][var] += c;
    }
    Ok(linsolve::nullity(&rows, total))
}
