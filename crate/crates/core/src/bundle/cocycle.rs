//! Čech transition data of a bundle on a covering of the terminal object,
//! and the bundle glued back from such data.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::presheaf::FreePresheaf;
use crate::site::{FiniteSite, MorId, ObjId};

use super::{BundleMorphism, StdBundle};

/// `T_ij` over the chosen overlap `U_i ×_X U_j`, taking chart-`i`
/// coordinates to chart-`j` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transitions {
    pub rank: usize,
    pub cover: Vec<MorId>,
    pub t: BTreeMap<(usize, usize), Matrix>,
}

/// `T_ij = E(p_j)⁻¹ · E(p_i)` for the chosen projections `p_i`, `p_j`.
pub fn cocycle_extract(e: &StdBundle, cover: &[MorId]) -> Result<Transitions> {
    let site = e.site();
    if let Some(&c) = cover.iter().find(|&&c| !e.sieve().contains(c)) {
        return Err(Error::Cocycle(format!("`{}` is not in the bundle's sieve", site.arrow(c).name)));
    }
    let ranks: BTreeSet<usize> = cover.iter().map(|&c| e.rank_at(site.source(c))).collect::<Result<_>>()?;
    if ranks.len() > 1 {
        return Err(Error::Cocycle("rank is not constant on the cover".into()));
    }
    let mut t = BTreeMap::new();
    for (i, &ci) in cover.iter().enumerate() {
        for (j, &cj) in cover.iter().enumerate() {
            let pb = site.pullback(ci, cj)?;
            let m = e.restriction(pb.right)?.inverse()?.matmul(e.restriction(pb.left)?)?;
            t.insert((i, j), m);
        }
    }
    Ok(Transitions { rank: ranks.into_iter().next().unwrap_or(0), cover: cover.to_vec(), t })
}

fn entry(tr: &Transitions, i: usize, j: usize) -> Result<&Matrix> {
    tr.t.get(&(i, j)).ok_or_else(|| Error::Cocycle(format!("missing transition ({i},{j})")))
}

/// Checks shapes, `T_ii = 1` and `T_ik = T_jk · T_ij` on chosen triple overlaps.
pub fn check_cocycle(site: &FiniteSite, tr: &Transitions) -> Result<()> {
    let n = tr.cover.len();
    let x = site.terminal().ok_or_else(|| Error::Cocycle("site has no terminal object".into()))?;
    for &c in &tr.cover {
        if site.target(c) != x {
            return Err(Error::Cocycle(format!("`{}` does not target the terminal", site.arrow(c).name)));
        }
    }
    let mut pbs = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let pb = site.pullback(tr.cover[i], tr.cover[j])?;
            let m = entry(tr, i, j)?;
            if m.rows() != tr.rank || m.cols() != tr.rank || m.ring() != site.ring(pb.apex) {
                return Err(Error::Cocycle(format!("transition ({i},{j}) has the wrong shape or ring")));
            }
            if !m.invertible() {
                return Err(Error::Cocycle(format!("transition ({i},{j}) is not invertible")));
            }
            pbs.insert((i, j), pb);
        }
        if !entry(tr, i, i)?.is_identity() {
            return Err(Error::Cocycle(format!("transition ({i},{i}) is not the identity")));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let pij = pbs[&(i, j)];
            let to_x = site.compose(tr.cover[i], pij.left)?;
            for k in 0..n {
                let q = site.pullback(to_x, tr.cover[k])?;
                let to_i = site.compose(pij.left, q.left)?;
                let to_j = site.compose(pij.right, q.left)?;
                let pjk = pbs[&(j, k)];
                let pik = pbs[&(i, k)];
                let mjk = site.mediating_arrow(q.apex, &pjk, to_j, q.right).ok_or_else(|| {
                    Error::Cocycle(format!("no map from the triple overlap ({i},{j},{k}) to ({j},{k})"))
                })?;
                let mik = site.mediating_arrow(q.apex, &pik, to_i, q.right).ok_or_else(|| {
                    Error::Cocycle(format!("no map from the triple overlap ({i},{j},{k}) to ({i},{k})"))
                })?;
                let tij = entry(tr, i, j)?.hom_entrywise(site.hom(q.left))?;
                let tjk = entry(tr, j, k)?.hom_entrywise(site.hom(mjk))?;
                let tik = entry(tr, i, k)?.hom_entrywise(site.hom(mik))?;
                if tjk.matmul(&tij)? != tik {
                    return Err(Error::Cocycle(format!("T_{i}{k} ≠ T_{j}{k} · T_{i}{j}")));
                }
            }
        }
    }
    Ok(())
}

/// The chart of `w`: the largest cover index its structure arrow factors
/// through, with the factoring arrow.
fn chart(site: &FiniteSite, cover: &[MorId], w: ObjId) -> Result<(usize, MorId)> {
    let s = site.structure_arrow(w)?;
    for (i, &c) in cover.iter().enumerate().rev() {
        if let Some(h) = site.factor_through(s, c) {
            return Ok((i, h));
        }
    }
    Err(Error::Cocycle(format!("`{}` lies over no cover member", site.object(w).name)))
}

/// Glues a bundle on the sieve generated by the cover: sections over `W` are
/// written in the coordinates of `W`'s chart, and the restriction along
/// `g: W → V` is `T_{chart V, chart W}` pulled back to `W`.
pub fn cocycle_build(site: &Arc<FiniteSite>, tr: &Transitions) -> Result<StdBundle> {
    check_cocycle(site, tr)?;
    let x = site.terminal().unwrap();
    let h = site.generate_sieve(x, &tr.cover)?;
    let objs = site.sieve_objects(&h)?;
    let charts: BTreeMap<ObjId, (usize, MorId)> =
        objs.iter().map(|&o| Ok((o, chart(site, &tr.cover, o)?))).collect::<Result<_>>()?;
    let ranks = objs.iter().map(|&o| (o, tr.rank)).collect();
    let mut restrictions = BTreeMap::new();
    for g in site.arrow_ids().filter(|m| objs.contains(&site.target(*m))) {
        let (w, v) = (site.source(g), site.target(g));
        let (a, ha) = charts[&w];
        let (b, hb) = charts[&v];
        let via = site.compose(hb, g)?;
        let pb = site.pullback(tr.cover[b], tr.cover[a])?;
        let m = site
            .mediating_arrow(w, &pb, via, ha)
            .ok_or_else(|| Error::Cocycle(format!("`{}` has no map to its chart overlap", site.object(w).name)))?;
        restrictions.insert(g, entry(tr, b, a)?.hom_entrywise(site.hom(m))?);
    }
    StdBundle::new(FreePresheaf::new(site.clone(), h, ranks, restrictions)?)
}

/// The isomorphism `build(extract(E)) → E`, identity matrices on the cover.
pub fn comparison_morphism(e: &Arc<StdBundle>, cover: &[MorId]) -> Result<BundleMorphism> {
    let tr = cocycle_extract(e, cover)?;
    let built = Arc::new(cocycle_build(e.site(), &tr)?);
    let site = e.site();
    let matrices = cover.iter().map(|&c| Matrix::identity(site.ring(site.source(c)), tr.rank)).collect();
    BundleMorphism::new(built, e.clone(), cover.to_vec(), matrices)
}
