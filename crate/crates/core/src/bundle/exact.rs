//! Short exact sequences `0 → E → F → G → 0` witnessed by local splittings.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::site::MorId;

use super::{covering_in, BundleMorphism, StdBundle};

/// Local splittings `r_i: F(U_i) → E(U_i)`, `s_i: G(U_i) → F(U_i)`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub cover: Vec<MorId>,
    pub r: Vec<Matrix>,
    pub s: Vec<Matrix>,
}

#[derive(Clone, Debug)]
pub struct ExactSequence {
    pub alpha: BundleMorphism,
    pub beta: BundleMorphism,
    pub splitting: Splitting,
}

/// `0 → E → E ⊕ F → F → 0` with the block injections and projections.
pub fn canonical_split(e: &Arc<StdBundle>, f: &Arc<StdBundle>) -> Result<ExactSequence> {
    let [i_e, i_f, p_e, p_f] = BundleMorphism::biproduct(e, f)?;
    let splitting = Splitting { cover: i_e.cover().to_vec(), r: p_e.matrices().to_vec(), s: i_f.matrices().to_vec() };
    Ok(ExactSequence { alpha: i_e, beta: p_f, splitting })
}

/// Transports a local map `m: A(U) → B(U)` along `h: W → U`.
fn transport(a: &StdBundle, b: &StdBundle, m: &Matrix, h: MorId) -> Result<Matrix> {
    let site = a.site();
    b.restriction(h)?.matmul(&m.hom_entrywise(site.hom(h))?)?.matmul(&a.restriction(h)?.inverse()?)
}

impl ExactSequence {
    /// Checks `β ∘ α = 0` and, on every witness member,
    /// `r α = 1`, `β s = 1`, `α r + s β = 1`.
    pub fn verify(&self) -> Result<()> {
        let (e, f, g) = (self.alpha.source(), self.alpha.target(), self.beta.target());
        if **self.beta.source() != **f {
            return Err(Error::Exactness("α and β are not composable".into()));
        }
        let composite = self.beta.compose(&self.alpha)?;
        if !composite.equals(&BundleMorphism::zero(e, g)?)? {
            return Err(Error::Exactness("β ∘ α is not zero".into()));
        }
        let site = e.site();
        let sp = &self.splitting;
        if sp.cover.len() != sp.r.len() || sp.cover.len() != sp.s.len() {
            return Err(Error::Exactness("one witness pair per cover member is required".into()));
        }
        for ((&c, r), s) in sp.cover.iter().zip(&sp.r).zip(&sp.s) {
            let u = site.source(c);
            let ring = site.ring(u);
            let a = self.alpha.value_at(c)?;
            let b = self.beta.value_at(c)?;
            let name = &site.object(u).name;
            if r.matmul(&a)? != Matrix::identity(ring, e.rank_at(u)?) {
                return Err(Error::Exactness(format!("r α ≠ 1 on `{name}`")));
            }
            if b.matmul(s)? != Matrix::identity(ring, g.rank_at(u)?) {
                return Err(Error::Exactness(format!("β s ≠ 1 on `{name}`")));
            }
            if a.matmul(r)?.add(&s.matmul(&b)?)? != Matrix::identity(ring, f.rank_at(u)?) {
                return Err(Error::Exactness(format!("α r + s β ≠ 1 on `{name}`")));
            }
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.verify().is_ok()
    }

    fn tensor_with(&self, d: &Arc<StdBundle>, left: bool) -> Result<ExactSequence> {
        let id = BundleMorphism::identity(d)?;
        let (alpha, beta) = if left {
            (id.tensor(&self.alpha)?, id.tensor(&self.beta)?)
        } else {
            (self.alpha.tensor(&id)?, self.beta.tensor(&id)?)
        };
        let (e, f, g) = (self.alpha.source(), self.alpha.target(), self.beta.target());
        let site = e.site();
        let x = site.terminal().unwrap();
        let dcov = covering_in(site, d.sieve())?;
        let refined = site.common_refinement(x, &[self.splitting.cover.clone(), dcov])?;
        let mut sp = Splitting { cover: refined.members.clone(), r: Vec::new(), s: Vec::new() };
        for t in 0..refined.members.len() {
            let (i, h) = (refined.choice[0][t], refined.factor[0][t]);
            let w = site.source(refined.members[t]);
            let one = Matrix::identity(site.ring(w), d.rank_at(w)?);
            let r = transport(f, e, &self.splitting.r[i], h)?;
            let s = transport(g, f, &self.splitting.s[i], h)?;
            if left {
                sp.r.push(one.kron(&r)?);
                sp.s.push(one.kron(&s)?);
            } else {
                sp.r.push(r.kron(&one)?);
                sp.s.push(s.kron(&one)?);
            }
        }
        Ok(ExactSequence { alpha, beta, splitting: sp })
    }

    /// `S ⊗ D`, with witnesses `r ⊗ 1`, `s ⊗ 1`.
    pub fn tensor_right(&self, d: &Arc<StdBundle>) -> Result<ExactSequence> {
        self.tensor_with(d, false)
    }

    /// `D ⊗ S`, with witnesses `1 ⊗ r`, `1 ⊗ s`.
    pub fn tensor_left(&self, d: &Arc<StdBundle>) -> Result<ExactSequence> {
        self.tensor_with(d, true)
    }
}
