//! Finite models of Zariski sites.
//!
//! A [`FiniteSite`] is a finite category whose objects carry section rings and
//! whose arrows carry the induced ring maps (contravariant: an arrow `V → U`
//! carries `R(U) → R(V)`). Fiber products are *chosen*: the pullback table
//! fixes one apex and pair of projections per cospan, and every construction
//! that mentions `U_i ×_U U_j` uses exactly that entry.
//!
//! Coverings are declared per object. A family is treated as a covering when
//! the sieve it generates contains the sieve generated by some declared
//! covering of the same object, so the declared families act as a basis and
//! every refinement-saturated family covers as well.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{same_ring, Ring, RingHom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteObject {
    pub name: String,
    pub ring: Ring,
}

/// An arrow `source → target` together with the ring map
/// `R(target) → R(source)` it induces on sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: ObjId,
    pub target: ObjId,
    pub hom: RingHom,
}

/// Chosen fiber product of a cospan `(f: A → C, g: B → C)`:
/// `left: apex → A`, `right: apex → B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub apex: ObjId,
    pub left: MorId,
    pub right: MorId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSite {
    objects: Vec<SiteObject>,
    arrows: Vec<Arrow>,
    identities: Vec<MorId>,
    composition: BTreeMap<(MorId, MorId), MorId>,
    pullbacks: BTreeMap<(MorId, MorId), Pullback>,
    coverings: Vec<Vec<Vec<MorId>>>,
    terminal: Option<ObjId>,
    into: Vec<Vec<MorId>>,
    out_of: Vec<Vec<MorId>>,
}

#[derive(Default)]
pub struct SiteBuilder {
    objects: Vec<SiteObject>,
    arrows: Vec<Arrow>,
    identities: Vec<MorId>,
    composition: BTreeMap<(MorId, MorId), MorId>,
    pullbacks: BTreeMap<(MorId, MorId), Pullback>,
    coverings: Vec<Vec<Vec<MorId>>>,
    terminal: Option<ObjId>,
}

impl SiteBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an object and its identity arrow `id_<name>`.
    pub fn object(&mut self, name: impl Into<String>, ring: &Ring) -> ObjId {
        let name = name.into();
        let id = ObjId(self.objects.len());
        self.objects.push(SiteObject { name: name.clone(), ring: ring.clone() });
        let m = MorId(self.arrows.len());
        self.arrows.push(Arrow { name: format!("id_{name}"), source: id, target: id, hom: RingHom::identity(ring) });
        self.identities.push(m);
        self.coverings.push(Vec::new());
        id
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identities[o.0]
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o.0].name
    }

    pub fn object_ring(&self, o: ObjId) -> &Ring {
        &self.objects[o.0].ring
    }

    pub fn arrow(&mut self, name: impl Into<String>, source: ObjId, target: ObjId, hom: RingHom) -> Result<MorId> {
        let name = name.into();
        let (s, t) = (self.get_obj(source)?, self.get_obj(target)?);
        if !same_ring(hom.source(), &t.ring) || !same_ring(hom.target(), &s.ring) {
            return Err(Error::Site(format!("ring map of `{name}` does not go R(target) → R(source)")));
        }
        let m = MorId(self.arrows.len());
        self.arrows.push(Arrow { name, source, target, hom });
        Ok(m)
    }

    fn get_obj(&self, o: ObjId) -> Result<&SiteObject> {
        self.objects.get(o.0).ok_or_else(|| Error::Site(format!("no object {o:?}")))
    }

    /// Records `f ∘ g = fg`.
    pub fn compose(&mut self, f: MorId, g: MorId, fg: MorId) {
        self.composition.insert((f, g), fg);
    }

    fn unique_arrow(&self, a: ObjId, b: ObjId) -> Result<Option<MorId>> {
        let mut found = None;
        for (i, x) in self.arrows.iter().enumerate() {
            if x.source == a && x.target == b {
                if found.is_some() {
                    return Err(Error::Site(format!(
                        "category is not thin: several arrows {} → {}",
                        self.objects[a.0].name, self.objects[b.0].name
                    )));
                }
                found = Some(MorId(i));
            }
        }
        Ok(found)
    }

    /// Fills the composition table of a thin category (at most one arrow
    /// between any two objects).
    pub fn close_thin(&mut self) -> Result<()> {
        let mut between = HashMap::new();
        for a in 0..self.objects.len() {
            for b in 0..self.objects.len() {
                if let Some(m) = self.unique_arrow(ObjId(a), ObjId(b))? {
                    between.insert((ObjId(a), ObjId(b)), m);
                }
            }
        }
        for (gi, g) in self.arrows.iter().enumerate() {
            for (fi, f) in self.arrows.iter().enumerate() {
                if g.target != f.source {
                    continue;
                }
                let fg = between
                    .get(&(g.source, f.target))
                    .copied()
                    .ok_or_else(|| Error::Site(format!("composite {} ∘ {} has no arrow", f.name, g.name)))?;
                self.composition.insert((MorId(fi), MorId(gi)), fg);
            }
        }
        Ok(())
    }

    pub fn pullback(&mut self, f: MorId, g: MorId, pb: Pullback) {
        self.pullbacks.insert((f, g), pb);
    }

    /// Fills the pullback table of a thin category from a meet operation on
    /// objects: the apex of `(A → C, B → C)` is `meet(A, B, C)`, with the
    /// unique projections. `None` leaves the cospan without a chosen pullback.
    pub fn pullbacks_by_meet(&mut self, meet: impl Fn(ObjId, ObjId, ObjId) -> Option<ObjId>) -> Result<()> {
        let n = self.arrows.len();
        for fi in 0..n {
            for gi in 0..n {
                let (f, g) = (&self.arrows[fi], &self.arrows[gi]);
                if f.target != g.target {
                    continue;
                }
                let Some(apex) = meet(f.source, g.source, f.target) else { continue };
                let left = self.unique_arrow(apex, f.source)?;
                let right = self.unique_arrow(apex, g.source)?;
                match (left, right) {
                    (Some(left), Some(right)) => {
                        self.pullbacks.insert((MorId(fi), MorId(gi)), Pullback { apex, left, right });
                    }
                    _ => {
                        return Err(Error::Site(format!(
                            "meet {} of {} and {} lacks projections",
                            self.objects[apex.0].name, self.objects[f.source.0].name, self.objects[g.source.0].name
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn covering(&mut self, object: ObjId, members: Vec<MorId>) {
        if !self.coverings[object.0].contains(&members) {
            self.coverings[object.0].push(members);
        }
    }

    pub fn terminal(&mut self, o: ObjId) {
        self.terminal = Some(o);
    }

    pub fn arrow_between(&self, a: ObjId, b: ObjId) -> Option<MorId> {
        self.unique_arrow(a, b).ok().flatten()
    }

    pub fn build(mut self) -> Result<FiniteSite> {
        let n_obj = self.objects.len();
        for a in &self.arrows {
            if a.source.0 >= n_obj || a.target.0 >= n_obj {
                return Err(Error::Site(format!("arrow `{}` refers to a missing object", a.name)));
            }
        }
        for (i, a) in self.arrows.iter().enumerate() {
            let f = MorId(i);
            self.composition.insert((f, self.identities[a.source.0]), f);
            self.composition.insert((self.identities[a.target.0], f), f);
        }
        let n_arr = self.arrows.len();
        let bad = |m: &MorId| m.0 >= n_arr;
        if self.composition.iter().any(|((f, g), h)| bad(f) || bad(g) || bad(h)) {
            return Err(Error::Site("composition table refers to a missing arrow".into()));
        }
        for ((f, g), pb) in &self.pullbacks {
            if bad(f) || bad(g) || bad(&pb.left) || bad(&pb.right) || pb.apex.0 >= n_obj {
                return Err(Error::Site("pullback table refers to missing data".into()));
            }
        }
        for (o, covs) in self.coverings.iter().enumerate() {
            for c in covs {
                for m in c {
                    if bad(m) || self.arrows[m.0].target != ObjId(o) {
                        return Err(Error::Site(format!(
                            "covering of `{}` has a member not targeting it",
                            self.objects[o].name
                        )));
                    }
                }
            }
        }
        if let Some(t) = self.terminal {
            if t.0 >= n_obj {
                return Err(Error::Site("terminal object missing".into()));
            }
        }
        let mut into = vec![Vec::new(); n_obj];
        let mut out_of = vec![Vec::new(); n_obj];
        for (i, a) in self.arrows.iter().enumerate() {
            into[a.target.0].push(MorId(i));
            out_of[a.source.0].push(MorId(i));
        }
        Ok(FiniteSite {
            objects: self.objects,
            arrows: self.arrows,
            identities: self.identities,
            composition: self.composition,
            pullbacks: self.pullbacks,
            coverings: self.coverings,
            terminal: self.terminal,
            into,
            out_of,
        })
    }
}

/// Which group of axioms a validation failure belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Category,
    RingData,
    PullbackSquare,
    MissingPullback,
    /// Singleton isomorphism families cover.
    CoveringIsomorphism,
    /// Pullbacks of coverings cover.
    CoveringPullback,
    /// Composites of coverings of coverings cover.
    CoveringComposite,
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct SiteReport {
    pub violations: Vec<Violation>,
}

impl SiteReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    fn push(&mut self, axiom: Axiom, detail: String) {
        self.violations.push(Violation { axiom, detail });
    }
}

impl fmt::Display for SiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{:?}: {}", v.axiom, v.detail)?;
        }
        Ok(())
    }
}

/// A set of arrows into `target`, closed under precomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sieve {
    target: ObjId,
    members: BTreeSet<MorId>,
}

impl Sieve {
    pub fn target(&self) -> ObjId {
        self.target
    }

    pub fn members(&self) -> &BTreeSet<MorId> {
        &self.members
    }

    pub fn contains(&self, f: MorId) -> bool {
        self.members.contains(&f)
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.target == other.target && self.members.is_subset(&other.members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Common refinement of several coverings of one object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    /// Arrows into the refined object, in input index order (first covering major).
    pub members: Vec<MorId>,
    /// `choice[k][t]`: index of the member of covering `k` that member `t` factors through.
    pub choice: Vec<Vec<usize>>,
    /// `factor[k][t]`: the arrow from member `t`'s source into that member of covering `k`.
    pub factor: Vec<Vec<MorId>>,
}

impl FiniteSite {
    pub fn objects(&self) -> &[SiteObject] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjId> {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = MorId> {
        (0..self.arrows.len()).map(MorId)
    }

    pub fn object(&self, o: ObjId) -> &SiteObject {
        &self.objects[o.0]
    }

    pub fn arrow(&self, m: MorId) -> &Arrow {
        &self.arrows[m.0]
    }

    pub fn ring(&self, o: ObjId) -> &Ring {
        &self.objects[o.0].ring
    }

    pub fn source(&self, m: MorId) -> ObjId {
        self.arrows[m.0].source
    }

    pub fn target(&self, m: MorId) -> ObjId {
        self.arrows[m.0].target
    }

    pub fn hom(&self, m: MorId) -> &RingHom {
        &self.arrows[m.0].hom
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identities[o.0]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identities[self.source(m).0] == m
    }

    pub fn terminal(&self) -> Option<ObjId> {
        self.terminal
    }

    pub fn coverings(&self, o: ObjId) -> &[Vec<MorId>] {
        &self.coverings[o.0]
    }

    pub fn arrows_into(&self, o: ObjId) -> &[MorId] {
        &self.into[o.0]
    }

    pub fn arrows_from(&self, o: ObjId) -> &[MorId] {
        &self.out_of[o.0]
    }

    pub fn arrows_between(&self, a: ObjId, b: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.out_of[a.0].iter().copied().filter(move |&m| self.target(m) == b)
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o.name == name).map(ObjId)
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<MorId> {
        self.arrows.iter().position(|o| o.name == name).map(MorId)
    }

    pub fn composition_table(&self) -> &BTreeMap<(MorId, MorId), MorId> {
        &self.composition
    }

    pub fn pullback_table(&self) -> &BTreeMap<(MorId, MorId), Pullback> {
        &self.pullbacks
    }

    /// `f ∘ g` for `g: A → B`, `f: B → C`.
    pub fn compose(&self, f: MorId, g: MorId) -> Result<MorId> {
        self.composition
            .get(&(f, g))
            .copied()
            .ok_or_else(|| Error::Site(format!("no composite {} ∘ {}", self.arrow(f).name, self.arrow(g).name)))
    }

    pub fn pullback(&self, f: MorId, g: MorId) -> Result<Pullback> {
        self.pullbacks.get(&(f, g)).copied().ok_or_else(|| {
            Error::Site(format!("no chosen pullback of {} and {}", self.arrow(f).name, self.arrow(g).name))
        })
    }

    /// The unique arrow from `o` to the terminal object.
    pub fn structure_arrow(&self, o: ObjId) -> Result<MorId> {
        let t = self.terminal.ok_or_else(|| Error::Site("site has no terminal object".into()))?;
        let mut it = self.arrows_between(o, t);
        match (it.next(), it.next()) {
            (Some(m), None) => Ok(m),
            _ => Err(Error::Site(format!("`{}` has no unique arrow to the terminal", self.object(o).name))),
        }
    }

    /// Some `h` with `c ∘ h = f`, searched in arrow order.
    pub fn factor_through(&self, f: MorId, c: MorId) -> Option<MorId> {
        if self.target(f) != self.target(c) {
            return None;
        }
        self.arrows_between(self.source(f), self.source(c)).find(|&h| self.composition.get(&(c, h)) == Some(&f))
    }

    /// Arrow `m: w → pb.apex` with `pb.left ∘ m = a` and `pb.right ∘ m = b`.
    pub fn mediating_arrow(&self, w: ObjId, pb: &Pullback, a: MorId, b: MorId) -> Option<MorId> {
        self.arrows_between(w, pb.apex).find(|&m| {
            self.composition.get(&(pb.left, m)) == Some(&a) && self.composition.get(&(pb.right, m)) == Some(&b)
        })
    }

    pub fn is_isomorphism(&self, f: MorId) -> bool {
        let (s, t) = (self.source(f), self.target(f));
        self.arrows_between(t, s).any(|g| {
            self.composition.get(&(f, g)) == Some(&self.identity(t))
                && self.composition.get(&(g, f)) == Some(&self.identity(s))
        })
    }

    // ---- sieves ----

    /// The sieve of arrows into `target` factoring through some member of `family`.
    pub fn generate_sieve(&self, target: ObjId, family: &[MorId]) -> Result<Sieve> {
        if let Some(&m) = family.iter().find(|&&m| self.target(m) != target) {
            return Err(Error::Sieve(format!(
                "`{}` does not target `{}`",
                self.arrow(m).name,
                self.object(target).name
            )));
        }
        let mut members: BTreeSet<MorId> = family.iter().copied().collect();
        loop {
            let mut added = Vec::new();
            for &f in &members {
                for &g in self.arrows_into(self.source(f)) {
                    if let Some(&fg) = self.composition.get(&(f, g)) {
                        if !members.contains(&fg) {
                            added.push(fg);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            members.extend(added);
        }
        Ok(Sieve { target, members })
    }

    pub fn maximal_sieve(&self, target: ObjId) -> Sieve {
        Sieve { target, members: self.arrows_into(target).iter().copied().collect() }
    }

    pub fn empty_sieve(&self, target: ObjId) -> Sieve {
        Sieve { target, members: BTreeSet::new() }
    }

    /// Builds a sieve from an explicit member set, checking closure.
    pub fn sieve_from_members(&self, target: ObjId, members: BTreeSet<MorId>) -> Result<Sieve> {
        let s = Sieve { target, members };
        if s.members.iter().any(|&m| self.target(m) != target) {
            return Err(Error::Sieve("member with the wrong target".into()));
        }
        if !self.sieve_is_closed(&s) {
            return Err(Error::Sieve("member set is not closed under precomposition".into()));
        }
        Ok(s)
    }

    pub fn sieve_is_closed(&self, h: &Sieve) -> bool {
        h.members.iter().all(|&f| {
            self.arrows_into(self.source(f))
                .iter()
                .all(|&g| self.composition.get(&(f, g)).is_some_and(|fg| h.members.contains(fg)))
        })
    }

    pub fn sieve_member(&self, h: &Sieve, f: MorId) -> Result<bool> {
        if self.target(f) != h.target {
            return Err(Error::Sieve(format!("`{}` does not target the sieve's object", self.arrow(f).name)));
        }
        Ok(h.contains(f))
    }

    /// Index of a declared covering whose generated sieve lies inside `h`.
    pub fn belongs_witness(&self, h: &Sieve) -> Option<usize> {
        self.coverings(h.target).iter().position(|c| c.iter().all(|m| h.contains(*m)))
    }

    pub fn sieve_belongs(&self, h: &Sieve) -> bool {
        self.belongs_witness(h).is_some()
    }

    pub fn sieve_intersect(&self, a: &Sieve, b: &Sieve) -> Result<Sieve> {
        if a.target != b.target {
            return Err(Error::Sieve("intersection of sieves on different objects".into()));
        }
        Ok(Sieve { target: a.target, members: a.members.intersection(&b.members).copied().collect() })
    }

    /// `g*H` for `g: V → U` and `H` on `U`: arrows `h` into `V` with `g ∘ h ∈ H`.
    pub fn sieve_pullback(&self, g: MorId, h: &Sieve) -> Result<Sieve> {
        if self.target(g) != h.target {
            return Err(Error::Sieve("pullback along an arrow not targeting the sieve's object".into()));
        }
        let v = self.source(g);
        let members = self
            .arrows_into(v)
            .iter()
            .copied()
            .filter(|&k| self.composition.get(&(g, k)).is_some_and(|gk| h.contains(*gk)))
            .collect();
        Ok(Sieve { target: v, members })
    }

    /// Whether `family` covers `u`: its sieve contains a declared covering of `u`.
    pub fn is_covering(&self, u: ObjId, family: &[MorId]) -> bool {
        match self.generate_sieve(u, family) {
            Ok(s) => self.sieve_belongs(&s),
            Err(_) => false,
        }
    }

    /// Iterated chosen-pullback refinement of coverings of `u`.
    pub fn common_refinement(&self, u: ObjId, coverings: &[Vec<MorId>]) -> Result<Refinement> {
        let Some(first) = coverings.first() else {
            let id = self.identity(u);
            return Ok(Refinement { members: vec![id], choice: vec![], factor: vec![] });
        };
        for c in coverings {
            if c.iter().any(|&m| self.target(m) != u) {
                return Err(Error::Site("refinement of families on different objects".into()));
            }
        }
        let mut members: Vec<MorId> = first.clone();
        let mut choice = vec![(0..first.len()).collect::<Vec<_>>()];
        let mut factor = vec![first.iter().map(|&m| self.identity(self.source(m))).collect::<Vec<_>>()];
        for cov in &coverings[1..] {
            let mut nm = Vec::new();
            let mut nchoice: Vec<Vec<usize>> = vec![Vec::new(); choice.len() + 1];
            let mut nfactor: Vec<Vec<MorId>> = vec![Vec::new(); factor.len() + 1];
            for (t, &m) in members.iter().enumerate() {
                for (ci, &c) in cov.iter().enumerate() {
                    let pb = self.pullback(m, c)?;
                    nm.push(self.compose(m, pb.left)?);
                    for k in 0..choice.len() {
                        nchoice[k].push(choice[k][t]);
                        nfactor[k].push(self.compose(factor[k][t], pb.left)?);
                    }
                    nchoice[choice.len()].push(ci);
                    nfactor[factor.len()].push(pb.right);
                }
            }
            members = nm;
            choice = nchoice;
            factor = nfactor;
        }
        Ok(Refinement { members, choice, factor })
    }

    /// Objects `W` whose structure arrow lies in the sieve `h` on the terminal.
    pub fn sieve_objects(&self, h: &Sieve) -> Result<BTreeSet<ObjId>> {
        if Some(h.target) != self.terminal {
            return Err(Error::Sieve("sieve is not on the terminal object".into()));
        }
        Ok(h.members.iter().map(|&m| self.source(m)).collect())
    }

    // ---- validation ----

    pub fn validate(&self) -> SiteReport {
        let mut rep = SiteReport::default();
        self.check_category(&mut rep);
        self.check_rings(&mut rep);
        self.check_pullbacks(&mut rep);
        self.check_coverings(&mut rep);
        self.check_terminal(&mut rep);
        rep
    }

    fn check_category(&self, rep: &mut SiteReport) {
        for (o, &id) in self.identities.iter().enumerate() {
            if self.source(id) != ObjId(o) || self.target(id) != ObjId(o) {
                rep.push(Axiom::Category, format!("identity of `{}` is not an endomorphism", self.objects[o].name));
            }
        }
        for ((f, g), fg) in &self.composition {
            if self.target(*g) != self.source(*f)
                || self.source(*fg) != self.source(*g)
                || self.target(*fg) != self.target(*f)
            {
                rep.push(
                    Axiom::Category,
                    format!("composition entry {} ∘ {} is ill-typed", self.arrow(*f).name, self.arrow(*g).name),
                );
            }
        }
        for g in self.arrow_ids() {
            for &f in self.arrows_from(self.target(g)) {
                let Some(&fg) = self.composition.get(&(f, g)) else {
                    rep.push(
                        Axiom::Category,
                        format!("missing composite {} ∘ {}", self.arrow(f).name, self.arrow(g).name),
                    );
                    continue;
                };
                for &h in self.arrows_from(self.target(f)) {
                    let (Some(hf), Some(hfg)) = (self.composition.get(&(h, f)), self.composition.get(&(h, fg))) else {
                        continue;
                    };
                    if self.composition.get(&(*hf, g)) != Some(hfg) {
                        rep.push(
                            Axiom::Category,
                            format!(
                                "composition not associative on {}, {}, {}",
                                self.arrow(h).name,
                                self.arrow(f).name,
                                self.arrow(g).name
                            ),
                        );
                    }
                }
            }
        }
    }

    fn check_rings(&self, rep: &mut SiteReport) {
        for a in &self.arrows {
            if !same_ring(a.hom.source(), self.ring(a.target)) || !same_ring(a.hom.target(), self.ring(a.source)) {
                rep.push(Axiom::RingData, format!("ring map of `{}` has the wrong rings", a.name));
            }
        }
        for (o, &id) in self.identities.iter().enumerate() {
            if *self.hom(id) != RingHom::identity(&self.objects[o].ring) {
                rep.push(
                    Axiom::RingData,
                    format!("identity of `{}` carries a non-identity ring map", self.objects[o].name),
                );
            }
        }
        for ((f, g), fg) in &self.composition {
            match self.hom(*g).compose(self.hom(*f)) {
                Ok(h) if h == *self.hom(*fg) => {}
                _ => rep.push(
                    Axiom::RingData,
                    format!("ring maps not functorial on {} ∘ {}", self.arrow(*f).name, self.arrow(*g).name),
                ),
            }
        }
    }

    fn check_pullbacks(&self, rep: &mut SiteReport) {
        for ((f, g), pb) in &self.pullbacks {
            let ok = self.target(*f) == self.target(*g)
                && self.target(pb.left) == self.source(*f)
                && self.target(pb.right) == self.source(*g)
                && self.source(pb.left) == pb.apex
                && self.source(pb.right) == pb.apex
                && self.composition.contains_key(&(*f, pb.left))
                && self.composition.get(&(*f, pb.left)) == self.composition.get(&(*g, pb.right));
            if !ok {
                rep.push(
                    Axiom::PullbackSquare,
                    format!("pullback square of {} and {} does not commute", self.arrow(*f).name, self.arrow(*g).name),
                );
            }
        }
    }

    fn check_coverings(&self, rep: &mut SiteReport) {
        for f in self.arrow_ids() {
            if self.is_isomorphism(f) && !self.is_covering(self.target(f), &[f]) {
                rep.push(Axiom::CoveringIsomorphism, format!("{{{}}} is not a covering", self.arrow(f).name));
            }
        }
        for u in self.object_ids() {
            for (ci, cov) in self.coverings(u).iter().enumerate() {
                for &g in self.arrows_into(u) {
                    let mut fam = Vec::new();
                    let mut missing = false;
                    for &c in cov {
                        match self.pullbacks.get(&(c, g)) {
                            Some(pb) => fam.push(pb.right),
                            None => {
                                missing = true;
                                rep.push(
                                    Axiom::MissingPullback,
                                    format!(
                                        "no chosen pullback of {} along {}",
                                        self.arrow(c).name,
                                        self.arrow(g).name
                                    ),
                                );
                            }
                        }
                        if !self.pullbacks.contains_key(&(g, c)) {
                            rep.push(
                                Axiom::MissingPullback,
                                format!("no chosen pullback of {} along {}", self.arrow(g).name, self.arrow(c).name),
                            );
                        }
                    }
                    if !missing && !self.is_covering(self.source(g), &fam) {
                        rep.push(
                            Axiom::CoveringPullback,
                            format!(
                                "pullback of covering #{ci} of `{}` along {} is not a covering",
                                self.object(u).name,
                                self.arrow(g).name
                            ),
                        );
                    }
                }
                self.check_composites(u, ci, cov, rep);
            }
        }
    }

    fn check_composites(&self, u: ObjId, ci: usize, cov: &[MorId], rep: &mut SiteReport) {
        let options: Vec<&[Vec<MorId>]> = cov.iter().map(|&c| self.coverings(self.source(c))).collect();
        if options.iter().any(|o| o.is_empty()) {
            return;
        }
        let mut pick = vec![0usize; cov.len()];
        loop {
            let mut fam = Vec::new();
            for (k, &c) in cov.iter().enumerate() {
                for &e in &options[k][pick[k]] {
                    match self.composition.get(&(c, e)) {
                        Some(&ce) => fam.push(ce),
                        None => return,
                    }
                }
            }
            if !self.is_covering(u, &fam) {
                rep.push(
                    Axiom::CoveringComposite,
                    format!(
                        "composites of covering #{ci} of `{}` with choice {pick:?} do not cover",
                        self.object(u).name
                    ),
                );
            }
            let mut k = 0;
            loop {
                if k == pick.len() {
                    return;
                }
                pick[k] += 1;
                if pick[k] < options[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }

    fn check_terminal(&self, rep: &mut SiteReport) {
        let Some(t) = self.terminal else { return };
        for o in self.object_ids() {
            let n = self.arrows_between(o, t).count();
            if n != 1 {
                rep.push(Axiom::Terminal, format!("`{}` has {n} arrows to the terminal object", self.object(o).name));
            }
        }
    }

    /// The slice site over `y`, with its forgetful morphism back into `self`.
    ///
    /// Objects are arrows `w: W → y`; arrows are arrows `g` of `self` with
    /// `w' ∘ g = w`. Rings, ring maps, chosen pullbacks and coverings are
    /// inherited verbatim.
    pub fn slice(self: &Arc<Self>, y: ObjId) -> Result<SiteMorphism> {
        let mut b = SiteBuilder::new();
        let over: Vec<MorId> = self.arrows_into(y).to_vec();
        let mut obj_of: HashMap<MorId, ObjId> = HashMap::new();
        let mut base_obj = Vec::new();
        for &w in &over {
            let o = b.object(self.arrow(w).name.clone(), self.ring(self.source(w)));
            obj_of.insert(w, o);
            base_obj.push(self.source(w));
        }
        // slice arrow for (base arrow g, source slice object w)
        let mut arr_of: HashMap<(MorId, MorId), MorId> = HashMap::new();
        let mut base_arr: Vec<MorId> = Vec::new();
        for &w in &over {
            let id = b.identity(obj_of[&w]);
            arr_of.insert((self.identity(self.source(w)), w), id);
        }
        for &w in &over {
            for &wp in &over {
                for g in self.arrows_between(self.source(w), self.source(wp)) {
                    if self.is_identity(g) && w == wp {
                        continue;
                    }
                    if self.composition.get(&(wp, g)) != Some(&w) {
                        continue;
                    }
                    let name = format!("{}@{}", self.arrow(g).name, self.arrow(w).name);
                    let m = b.arrow(name, obj_of[&w], obj_of[&wp], self.hom(g).clone())?;
                    arr_of.insert((g, w), m);
                }
            }
        }
        let built_arrows = b.arrows.len();
        base_arr.resize(built_arrows, MorId(0));
        for ((g, _), m) in &arr_of {
            base_arr[m.0] = *g;
        }
        let target_struct = |m: MorId, b: &SiteBuilder| b.arrows[m.0].target;
        let over_of = |o: ObjId| over[o.0];
        for m in 0..built_arrows {
            let m = MorId(m);
            let g = base_arr[m.0];
            let w = over_of(b.arrows[m.0].source);
            let wp = over_of(target_struct(m, &b));
            for &h in self.arrows_from(self.target(g)) {
                let Some(&hg) = self.composition.get(&(h, g)) else { continue };
                let Some(&f2) = arr_of.get(&(h, wp)) else { continue };
                if let Some(&c) = arr_of.get(&(hg, w)) {
                    b.compose(f2, m, c);
                }
            }
        }
        for (&(f, wf), &sf) in &arr_of {
            for (&(g, wg), &sg) in &arr_of {
                if b.arrows[sf.0].target != b.arrows[sg.0].target {
                    continue;
                }
                let Some(pb) = self.pullbacks.get(&(f, g)) else { continue };
                let wp = self.compose(wf, pb.left)?;
                let (Some(&l), Some(&r)) = (arr_of.get(&(pb.left, wp)), arr_of.get(&(pb.right, wp))) else {
                    continue;
                };
                b.pullback(sf, sg, Pullback { apex: obj_of[&wp], left: l, right: r });
                let _ = wg;
            }
        }
        for &w in &over {
            for cov in self.coverings(self.source(w)) {
                let mut members = Vec::new();
                for &c in cov {
                    let wc = self.compose(w, c)?;
                    members.push(arr_of[&(c, wc)]);
                }
                b.covering(obj_of[&w], members);
            }
        }
        b.terminal(obj_of[&self.identity(y)]);
        let slice = Arc::new(b.build()?);
        SiteMorphism::new(slice, self.clone(), base_obj, base_arr)
    }
}

/// A functor between finite sites that preserves rings on the nose: the
/// source site's objects are reinterpreted as objects of the target site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteMorphism {
    source: Arc<FiniteSite>,
    target: Arc<FiniteSite>,
    objects: Vec<ObjId>,
    arrows: Vec<MorId>,
}

impl SiteMorphism {
    /// Builds and validates a site morphism. Both sites need a terminal object.
    pub fn new(
        source: Arc<FiniteSite>,
        target: Arc<FiniteSite>,
        objects: Vec<ObjId>,
        arrows: Vec<MorId>,
    ) -> Result<Self> {
        if objects.len() != source.objects.len() || arrows.len() != source.arrows.len() {
            return Err(Error::Site("site morphism maps have the wrong length".into()));
        }
        if objects.iter().any(|o| o.0 >= target.objects.len()) || arrows.iter().any(|m| m.0 >= target.arrows.len()) {
            return Err(Error::Site("site morphism refers to missing target data".into()));
        }
        if source.terminal.is_none() || target.terminal.is_none() {
            return Err(Error::Site("site morphisms need terminal objects on both sides".into()));
        }
        let f = SiteMorphism { source, target, objects, arrows };
        let v = f.violations();
        if !v.is_empty() {
            return Err(Error::Site(v.join("; ")));
        }
        Ok(f)
    }

    pub fn identity(site: &Arc<FiniteSite>) -> Result<Self> {
        Self::new(site.clone(), site.clone(), site.object_ids().collect(), site.arrow_ids().collect())
    }

    pub fn source(&self) -> &Arc<FiniteSite> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteSite> {
        &self.target
    }

    pub fn map_object(&self, o: ObjId) -> ObjId {
        self.objects[o.0]
    }

    pub fn map_arrow(&self, m: MorId) -> MorId {
        self.arrows[m.0]
    }

    pub fn object_map(&self) -> &[ObjId] {
        &self.objects
    }

    pub fn arrow_map(&self) -> &[MorId] {
        &self.arrows
    }

    /// The structure arrow of the image of the source terminal.
    pub fn base_arrow(&self) -> Result<MorId> {
        let t = self.source.terminal.expect("checked at construction");
        self.target.structure_arrow(self.map_object(t))
    }

    fn violations(&self) -> Vec<String> {
        let (s, t) = (&*self.source, &*self.target);
        let mut v = Vec::new();
        for o in s.object_ids() {
            if !same_ring(s.ring(o), t.ring(self.map_object(o))) {
                v.push(format!("`{}` changes ring", s.object(o).name));
            }
            if self.map_arrow(s.identity(o)) != t.identity(self.map_object(o)) {
                v.push(format!("identity of `{}` not preserved", s.object(o).name));
            }
        }
        for m in s.arrow_ids() {
            let fm = self.map_arrow(m);
            if t.source(fm) != self.map_object(s.source(m)) || t.target(fm) != self.map_object(s.target(m)) {
                v.push(format!("`{}` mapped to an arrow between the wrong objects", s.arrow(m).name));
            }
            if t.hom(fm) != s.hom(m) {
                v.push(format!("`{}` changes its ring map", s.arrow(m).name));
            }
        }
        for ((f, g), fg) in &s.composition {
            if t.composition.get(&(self.map_arrow(*f), self.map_arrow(*g))) != Some(&self.map_arrow(*fg)) {
                v.push(format!("composite {} ∘ {} not preserved", s.arrow(*f).name, s.arrow(*g).name));
            }
        }
        if !v.is_empty() {
            return v;
        }
        if self.base_arrow().is_err() {
            v.push("image of the terminal has no structure arrow".into());
        }
        for ((f, g), pb) in &s.pullbacks {
            if let Some(tpb) = t.pullbacks.get(&(self.map_arrow(*f), self.map_arrow(*g))) {
                let img = Pullback {
                    apex: self.map_object(pb.apex),
                    left: self.map_arrow(pb.left),
                    right: self.map_arrow(pb.right),
                };
                if *tpb != img {
                    v.push(format!("chosen pullback of {} and {} not preserved", s.arrow(*f).name, s.arrow(*g).name));
                }
            }
        }
        for u in s.object_ids() {
            for cov in s.coverings(u) {
                let img: Vec<MorId> = cov.iter().map(|&c| self.map_arrow(c)).collect();
                if !t.is_covering(self.map_object(u), &img) {
                    v.push(format!("a covering of `{}` does not map to a covering", s.object(u).name));
                }
            }
        }
        v
    }

    /// `self ∘ g` for `g: Z-site → Y-site` and `self: Y-site → X-site`.
    pub fn compose(&self, g: &SiteMorphism) -> Result<SiteMorphism> {
        if !Arc::ptr_eq(&g.target, &self.source) && *g.target != *self.source {
            return Err(Error::Site("site morphisms are not composable".into()));
        }
        let objects = g.objects.iter().map(|&o| self.map_object(o)).collect();
        let arrows = g.arrows.iter().map(|&m| self.map_arrow(m)).collect();
        Self::new(g.source.clone(), self.target.clone(), objects, arrows)
    }

    /// Pulls a sieve on the target terminal back to the source terminal:
    /// `h: Z → Y` is kept when `base ∘ F(h)` lies in the sieve.
    pub fn pullback_sieve(&self, h: &Sieve) -> Result<Sieve> {
        if Some(h.target) != self.target.terminal {
            return Err(Error::Sieve("sieve is not on the target terminal".into()));
        }
        let base = self.base_arrow()?;
        let y = self.source.terminal.unwrap();
        let mut members = BTreeSet::new();
        for &k in self.source.arrows_into(y) {
            let fk = self.target.compose(base, self.map_arrow(k))?;
            if h.contains(fk) {
                members.insert(k);
            }
        }
        Ok(Sieve { target: y, members })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDesc;

    /// `X` with two opens `A`, `B` and their intersection `AB`; chosen
    /// pullbacks are meets, coverings are `{A, B}` and identities.
    pub(crate) fn two_chart_site(with_pullback_covering: bool) -> FiniteSite {
        let q = RingDesc::rationals();
        let mut b = SiteBuilder::new();
        let x = b.object("X", &q);
        let a = b.object("A", &q);
        let bb = b.object("B", &q);
        let ab = b.object("AB", &q);
        let h = RingHom::identity(&q);
        let ax = b.arrow("A->X", a, x, h.clone()).unwrap();
        let bx = b.arrow("B->X", bb, x, h.clone()).unwrap();
        b.arrow("AB->X", ab, x, h.clone()).unwrap();
        let aba = b.arrow("AB->A", ab, a, h.clone()).unwrap();
        b.arrow("AB->B", ab, bb, h).unwrap();
        b.close_thin().unwrap();
        let meet = move |p: ObjId, q: ObjId, _c: ObjId| {
            if p == q {
                Some(p)
            } else if p == x {
                Some(q)
            } else if q == x {
                Some(p)
            } else {
                Some(ab)
            }
        };
        b.pullbacks_by_meet(meet).unwrap();
        b.covering(x, vec![ax, bx]);
        for o in [x, a, bb, ab] {
            let id = b.identity(o);
            b.covering(o, vec![id]);
        }
        if !with_pullback_covering {
            // drop the identity covering of A: the pullback of {A, B} along
            // A → X is {A, AB} → A, which then covers nothing declared.
            b.coverings[a.0].clear();
            let _ = aba;
        }
        b.terminal(x);
        b.build().unwrap()
    }

    fn one_object_site() -> FiniteSite {
        let mut b = SiteBuilder::new();
        let x = b.object("X", &RingDesc::rationals());
        let id = b.identity(x);
        b.covering(x, vec![id]);
        b.pullback(id, id, Pullback { apex: x, left: id, right: id });
        b.terminal(x);
        b.build().unwrap()
    }

    #[test]
    fn one_object_site_is_valid() {
        let rep = one_object_site().validate();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn two_chart_site_is_valid() {
        let rep = two_chart_site(true).validate();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn missing_pullback_covering_is_reported() {
        let rep = two_chart_site(false).validate();
        assert!(rep.has(Axiom::CoveringPullback), "{rep}");
    }

    #[test]
    fn generated_sieves() {
        let s = two_chart_site(true);
        let x = s.object_by_name("X").unwrap();
        let id = s.identity(x);
        assert_eq!(s.generate_sieve(x, &[id]).unwrap(), s.maximal_sieve(x));
        let cov = s.coverings(x)[0].clone();
        let h = s.generate_sieve(x, &cov).unwrap();
        assert!(s.sieve_is_closed(&h));
        assert!(h.contains(s.arrow_by_name("AB->X").unwrap()));
        assert!(!h.contains(id));
        assert!(s.sieve_belongs(&h));
        assert!(!s.sieve_belongs(&s.empty_sieve(x)));
        assert!(s.sieve_member(&h, s.arrow_by_name("AB->A").unwrap()).is_err());
    }

    #[test]
    fn intersection_of_chart_sieves() {
        let s = two_chart_site(true);
        let x = s.object_by_name("X").unwrap();
        let ha = s.generate_sieve(x, &[s.arrow_by_name("A->X").unwrap()]).unwrap();
        let hb = s.generate_sieve(x, &[s.arrow_by_name("B->X").unwrap()]).unwrap();
        let hab = s.generate_sieve(x, &[s.arrow_by_name("AB->X").unwrap()]).unwrap();
        assert_eq!(s.sieve_intersect(&ha, &hb).unwrap(), hab);
        assert_eq!(s.sieve_intersect(&ha, &ha).unwrap(), ha);
        assert_eq!(s.sieve_intersect(&ha, &s.maximal_sieve(x)).unwrap(), ha);
    }

    #[test]
    fn pullback_along_identity_and_refinement() {
        let s = two_chart_site(true);
        let x = s.object_by_name("X").unwrap();
        let cov = s.coverings(x)[0].clone();
        let h = s.generate_sieve(x, &cov).unwrap();
        assert_eq!(s.sieve_pullback(s.identity(x), &h).unwrap(), h);
        let r = s.common_refinement(x, std::slice::from_ref(&cov)).unwrap();
        assert_eq!(r.members, cov);
        let r = s.common_refinement(x, &[vec![s.identity(x)], cov.clone()]).unwrap();
        assert_eq!(r.members, cov);
        let r = s.common_refinement(x, &[cov.clone(), cov.clone()]).unwrap();
        let names: Vec<_> = r.members.iter().map(|&m| s.object(s.source(m)).name.as_str()).collect();
        assert_eq!(names, ["A", "AB", "AB", "B"]);
    }

    #[test]
    fn slice_over_a_chart() {
        let s = Arc::new(two_chart_site(true));
        let a = s.object_by_name("A").unwrap();
        let f = s.slice(a).unwrap();
        let sl = f.source();
        assert_eq!(sl.objects().len(), 2);
        assert!(sl.validate().is_valid(), "{}", sl.validate());
        assert_eq!(f.map_object(sl.terminal().unwrap()), a);
    }
}
