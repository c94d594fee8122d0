//! JSON forms of rings, matrices, sites, presheaves, bundles, morphisms and
//! cocycle dumps. Objects and arrows are referenced by name; ring elements
//! use their canonical text form.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bundle::{cocycle_extract, BundleMorphism, StdBundle};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::presheaf::FreePresheaf;
use crate::ring::{Ring, RingDesc, RingElem, RingHom};
use crate::site::{FiniteSite, MorId, ObjId, Pullback, Sieve, SiteBuilder};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingJson {
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default)]
    pub invertible: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub zero: bool,
}

impl RingJson {
    pub fn from_ring(r: &Ring) -> Self {
        if r.is_zero_ring() {
            return RingJson { variables: vec![], invertible: vec![], zero: true };
        }
        RingJson {
            variables: r.variables().to_vec(),
            invertible: r.invertible_names().into_iter().map(String::from).collect(),
            zero: false,
        }
    }

    pub fn to_ring(&self) -> Result<Ring> {
        if self.zero {
            return Ok(RingDesc::zero_ring());
        }
        RingDesc::new(&self.variables, &self.invertible)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix) -> Self {
        MatrixJson { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(|e| e.to_string()).collect() }
    }

    pub fn to_matrix(&self, ring: &Ring) -> Result<Matrix> {
        let entries = self.entries.iter().map(|s| RingElem::parse(ring, s)).collect::<Result<_>>()?;
        Matrix::new(ring, self.rows, self.cols, entries)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectJson {
    pub name: String,
    pub ring: RingJson,
}

/// `images` lists the image of each variable of the target ring, in the
/// source ring. Identity arrows are implicit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowJson {
    pub name: String,
    pub source: String,
    pub target: String,
    pub images: Vec<String>,
}

/// `[f, g, f∘g]`.
pub type CompositionJson = [String; 3];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PullbackJson {
    pub legs: [String; 2],
    pub apex: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringJson {
    pub object: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteJson {
    pub objects: Vec<ObjectJson>,
    #[serde(default)]
    pub arrows: Vec<ArrowJson>,
    #[serde(default)]
    pub composition: Vec<CompositionJson>,
    #[serde(default)]
    pub pullbacks: Vec<PullbackJson>,
    #[serde(default)]
    pub coverings: Vec<CoveringJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveJson {
    pub object: String,
    pub members: Vec<String>,
}

/// A presheaf or bundle: the site, the sieve, ranks by object and
/// restriction matrices by arrow.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresheafJson {
    pub site: SiteJson,
    pub sieve: SieveJson,
    pub ranks: BTreeMap<String, usize>,
    pub restrictions: BTreeMap<String, MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source: PresheafJson,
    pub target: PresheafJson,
    pub cover: Vec<String>,
    pub matrices: Vec<MatrixJson>,
}

fn obj(site: &FiniteSite, name: &str) -> Result<ObjId> {
    site.object_by_name(name).ok_or_else(|| Error::Site(format!("unknown object `{name}`")))
}

fn mor(site: &FiniteSite, name: &str) -> Result<MorId> {
    site.arrow_by_name(name).ok_or_else(|| Error::Site(format!("unknown arrow `{name}`")))
}

pub fn site_to_json(s: &FiniteSite) -> SiteJson {
    let oname = |o: ObjId| s.object(o).name.clone();
    let aname = |m: MorId| s.arrow(m).name.clone();
    let objects =
        s.objects().iter().map(|o| ObjectJson { name: o.name.clone(), ring: RingJson::from_ring(&o.ring) }).collect();
    let arrows = s
        .arrow_ids()
        .filter(|&m| !s.is_identity(m))
        .map(|m| {
            let a = s.arrow(m);
            ArrowJson {
                name: a.name.clone(),
                source: oname(a.source),
                target: oname(a.target),
                images: a.hom.images().iter().map(|e| e.to_string()).collect(),
            }
        })
        .collect();
    let composition = s
        .composition_table()
        .iter()
        .filter(|((f, g), _)| !s.is_identity(*f) && !s.is_identity(*g))
        .map(|(&(f, g), &fg)| [aname(f), aname(g), aname(fg)])
        .collect();
    let pullbacks = s
        .pullback_table()
        .iter()
        .map(|(&(f, g), pb)| PullbackJson {
            legs: [aname(f), aname(g)],
            apex: oname(pb.apex),
            left: aname(pb.left),
            right: aname(pb.right),
        })
        .collect();
    let coverings = s
        .object_ids()
        .flat_map(|o| s.coverings(o).iter().map(move |c| (o, c)))
        .map(|(o, c)| CoveringJson { object: oname(o), members: c.iter().map(|&m| aname(m)).collect() })
        .collect();
    SiteJson { objects, arrows, composition, pullbacks, coverings, terminal: s.terminal().map(oname) }
}

/// Builds the site without validating it; see [`FiniteSite::validate`].
pub fn site_from_json(j: &SiteJson) -> Result<FiniteSite> {
    let mut b = SiteBuilder::new();
    let mut rings: Vec<Ring> = Vec::new();
    let mut ids = BTreeMap::new();
    for o in &j.objects {
        let r = o.ring.to_ring()?;
        let r = match rings.iter().find(|x| **x == r) {
            Some(x) => x.clone(),
            None => {
                rings.push(r.clone());
                r
            }
        };
        if ids.insert(o.name.clone(), b.object(o.name.clone(), &r)).is_some() {
            return Err(Error::Site(format!("duplicate object `{}`", o.name)));
        }
    }
    let look = |n: &str| ids.get(n).copied().ok_or_else(|| Error::Site(format!("unknown object `{n}`")));
    let mut arrows = BTreeMap::new();
    for o in &j.objects {
        let id = look(&o.name)?;
        arrows.insert(format!("id_{}", o.name), b.identity(id));
    }
    for a in &j.arrows {
        let (s, t) = (look(&a.source)?, look(&a.target)?);
        let hom = RingHom::from_strings(b.object_ring(t), b.object_ring(s), &a.images)?;
        if arrows.insert(a.name.clone(), b.arrow(a.name.clone(), s, t, hom)?).is_some() {
            return Err(Error::Site(format!("duplicate arrow `{}`", a.name)));
        }
    }
    let arr = |n: &str| arrows.get(n).copied().ok_or_else(|| Error::Site(format!("unknown arrow `{n}`")));
    for [f, g, fg] in &j.composition {
        b.compose(arr(f)?, arr(g)?, arr(fg)?);
    }
    for p in &j.pullbacks {
        b.pullback(
            arr(&p.legs[0])?,
            arr(&p.legs[1])?,
            Pullback { apex: look(&p.apex)?, left: arr(&p.left)?, right: arr(&p.right)? },
        );
    }
    for c in &j.coverings {
        let members = c.members.iter().map(|m| arr(m)).collect::<Result<_>>()?;
        b.covering(look(&c.object)?, members);
    }
    if let Some(t) = &j.terminal {
        b.terminal(look(t)?);
    }
    b.build()
}

pub fn sieve_to_json(s: &FiniteSite, h: &Sieve) -> SieveJson {
    SieveJson {
        object: s.object(h.target()).name.clone(),
        members: h.members().iter().map(|&m| s.arrow(m).name.clone()).collect(),
    }
}

pub fn sieve_from_json(s: &FiniteSite, j: &SieveJson) -> Result<Sieve> {
    let members = j.members.iter().map(|m| mor(s, m)).collect::<Result<_>>()?;
    s.sieve_from_members(obj(s, &j.object)?, members)
}

pub fn presheaf_to_json(p: &FreePresheaf) -> PresheafJson {
    let s = p.site();
    PresheafJson {
        site: site_to_json(s),
        sieve: sieve_to_json(s, p.sieve()),
        ranks: p.ranks().iter().map(|(&o, &n)| (s.object(o).name.clone(), n)).collect(),
        restrictions: p
            .restrictions()
            .iter()
            .map(|(&m, a)| (s.arrow(m).name.clone(), MatrixJson::from_matrix(a)))
            .collect(),
    }
}

/// Checks shapes and index sets; functoriality is left to `validate`.
pub fn presheaf_from_json(j: &PresheafJson) -> Result<FreePresheaf> {
    let site = Arc::new(site_from_json(&j.site)?);
    presheaf_on(&site, j)
}

fn presheaf_on(site: &Arc<FiniteSite>, j: &PresheafJson) -> Result<FreePresheaf> {
    let sieve = sieve_from_json(site, &j.sieve)?;
    let ranks = j.ranks.iter().map(|(n, &r)| Ok((obj(site, n)?, r))).collect::<Result<_>>()?;
    let mut restrictions = BTreeMap::new();
    for (n, a) in &j.restrictions {
        let m = mor(site, n)?;
        restrictions.insert(m, a.to_matrix(site.ring(site.source(m)))?);
    }
    FreePresheaf::new(site.clone(), sieve, ranks, restrictions)
}

pub fn bundle_to_json(e: &StdBundle) -> PresheafJson {
    presheaf_to_json(e.presheaf())
}

pub fn bundle_from_json(j: &PresheafJson) -> Result<StdBundle> {
    StdBundle::new(presheaf_from_json(j)?)
}

/// Reads two bundles onto one shared site; their site descriptions must agree.
pub fn bundle_pair_from_json(a: &PresheafJson, b: &PresheafJson) -> Result<(StdBundle, StdBundle)> {
    let site = Arc::new(site_from_json(&a.site)?);
    if site_from_json(&b.site)? != *site {
        return Err(Error::Bundle("the two bundles live on different sites".into()));
    }
    Ok((StdBundle::new(presheaf_on(&site, a)?)?, StdBundle::new(presheaf_on(&site, b)?)?))
}

pub fn morphism_to_json(m: &BundleMorphism) -> MorphismJson {
    let s = m.source().site();
    MorphismJson {
        source: bundle_to_json(m.source()),
        target: bundle_to_json(m.target()),
        cover: m.cover().iter().map(|&c| s.arrow(c).name.clone()).collect(),
        matrices: m.matrices().iter().map(MatrixJson::from_matrix).collect(),
    }
}

pub fn morphism_from_json(j: &MorphismJson) -> Result<BundleMorphism> {
    let (e, f) = bundle_pair_from_json(&j.source, &j.target)?;
    let s = e.site().clone();
    let cover: Vec<MorId> = j.cover.iter().map(|n| mor(&s, n)).collect::<Result<_>>()?;
    if cover.len() != j.matrices.len() {
        return Err(Error::Morphism("one matrix per cover member is required".into()));
    }
    let matrices =
        cover.iter().zip(&j.matrices).map(|(&c, a)| a.to_matrix(s.ring(s.source(c)))).collect::<Result<_>>()?;
    BundleMorphism::new(Arc::new(e), Arc::new(f), cover, matrices)
}

/// A 1×1 transition prints as its entry, anything else as rows of entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransitionJson {
    Entry(String),
    Rows(Vec<Vec<String>>),
}

/// Transitions of `e` on `cover`, keyed `"(A,B)"` by the sources of the
/// ordered pair of cover members.
pub fn cocycle_dump(e: &StdBundle, cover: &[MorId]) -> Result<BTreeMap<String, TransitionJson>> {
    let s = e.site();
    let tr = cocycle_extract(e, cover)?;
    let name = |i: usize| s.object(s.source(cover[i])).name.clone();
    let mut out = BTreeMap::new();
    for (&(i, j), t) in &tr.t {
        let v = if t.rows() == 1 && t.cols() == 1 {
            TransitionJson::Entry(t.get(0, 0).to_string())
        } else {
            TransitionJson::Rows(
                (0..t.rows()).map(|r| (0..t.cols()).map(|c| t.get(r, c).to_string()).collect()).collect(),
            )
        };
        out.insert(format!("({},{})", name(i), name(j)), v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::ProjSite;

    #[test]
    fn site_round_trip() {
        for r in 1..=2 {
            let ps = ProjSite::new(r, &RingDesc::rationals()).unwrap();
            let j = site_to_json(ps.site());
            let text = serde_json::to_string(&j).unwrap();
            let back = site_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(&back, &**ps.site());
        }
        // identities are renumbered on reload, so compare reloaded forms
        let inf = ProjSite::with_infinity(&RingDesc::rationals()).unwrap();
        let once = site_from_json(&site_to_json(inf.site())).unwrap();
        let twice = site_from_json(&site_to_json(&once)).unwrap();
        assert_eq!(once, twice);
        assert!(once.validate().is_valid());
        assert_eq!(once.objects(), inf.site().objects());
    }

    #[test]
    fn bundle_round_trip() {
        let ps = ProjSite::new(1, &RingDesc::rationals()).unwrap();
        let e = ps.twisted_bundle(-2).unwrap().direct_sum(&ps.twisted_bundle(3).unwrap()).unwrap();
        let text = serde_json::to_string(&bundle_to_json(&e)).unwrap();
        let back = bundle_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn unknown_names_are_errors() {
        let ps = ProjSite::new(1, &RingDesc::rationals()).unwrap();
        let mut j = site_to_json(ps.site());
        j.arrows[0].target = "nowhere".into();
        assert!(site_from_json(&j).is_err());
    }

    #[test]
    fn o1_cocycle_dump() {
        let ps = ProjSite::new(1, &RingDesc::rationals()).unwrap();
        let d = cocycle_dump(&ps.twisted_bundle(1).unwrap(), &ps.chart_cover(0)).unwrap();
        assert_eq!(d["(U0,U1)"], TransitionJson::Entry("x0/x1".into()));
        assert_eq!(d["(U0,U0)"], TransitionJson::Entry("1".into()));
        let t = cocycle_dump(&ps.trivial_bundle(1).unwrap(), &ps.chart_cover(0)).unwrap();
        assert!(t.values().all(|v| *v == TransitionJson::Entry("1".into())));
        let z = cocycle_dump(&ps.trivial_bundle(0).unwrap(), &ps.chart_cover(0)).unwrap();
        assert!(z.values().all(|v| *v == TransitionJson::Rows(vec![])));
    }
}
