//! Explicit finite categories: objects, hom-sets, composition and
//! identities, given either by structures and their embeddings or by a
//! table loaded from file.
//!
//! Composition is written `compose(g, f)` for `g · f` (first `f`, then `g`).
//! The opposite category shares all data with its parent and only flips an
//! orientation flag, so `op(op(C)) == C` holds on the nose.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::structures::{canonical_form, enumerate_embeddings, Embedding, Structure};
use crate::verdict::{Budget, Status};

pub type ObjId = usize;
pub type MorphId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatObject {
    pub name: String,
    pub structure: Option<Structure>,
}

/// A morphism as stored, in the orientation of the underlying (non-opposite)
/// category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
    pub map: Option<Embedding>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Composition {
    /// Structure-backed: compose maps and look the result up.
    Maps(HashMap<(ObjId, ObjId, Vec<usize>), MorphId>),
    /// Explicit table keyed by `(g, f)` for `g · f`.
    Table(HashMap<(MorphId, MorphId), MorphId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Vec<CatObject>,
    morphisms: Vec<Morphism>,
    homs: Vec<Vec<Vec<MorphId>>>,
    identities: Vec<MorphId>,
    composition: Composition,
    opposite: bool,
}

/// File form of an abstract category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractCategoryFile {
    pub objects: Vec<String>,
    /// `"src->tgt"` to the ordered morphism ids of that hom-set.
    pub homs: BTreeMap<String, Vec<String>>,
    /// `"g∘f"` to the id of the composite.
    pub compose: BTreeMap<String, String>,
    pub identities: BTreeMap<String, String>,
}

impl FiniteCategory {
    /// Objects are the catalog entries, morphisms all embeddings between them.
    pub fn from_catalog(catalog: &Catalog) -> Result<Self> {
        let n = catalog.entries.len();
        let mut morphisms = Vec::new();
        let mut homs = vec![vec![Vec::new(); n]; n];
        let mut index = HashMap::new();
        for (a, ea) in catalog.entries.iter().enumerate() {
            for (b, eb) in catalog.entries.iter().enumerate() {
                for (i, emb) in enumerate_embeddings(&ea.structure, &eb.structure)?.into_iter().enumerate() {
                    let id = morphisms.len();
                    index.insert((a, b, emb.map.clone()), id);
                    homs[a][b].push(id);
                    morphisms.push(Morphism { name: format!("{}->{}#{}", ea.name, eb.name, i), src: a, tgt: b, map: Some(emb) });
                }
            }
        }
        let identities = (0..n)
            .map(|a| index[&(a, a, (0..catalog.entries[a].structure.size).collect::<Vec<_>>())])
            .collect();
        let objects = catalog
            .entries
            .iter()
            .map(|e| CatObject { name: e.name.clone(), structure: Some(e.structure.clone()) })
            .collect();
        Ok(FiniteCategory { objects, morphisms, homs, identities, composition: Composition::Maps(index), opposite: false })
    }

    /// Loads an abstract category. Compositions with an identity may be
    /// omitted from the table; everything else must be explicit.
    pub fn from_abstract(file: &AbstractCategoryFile) -> Result<Self> {
        let bad = |m: String| Error::InvalidCategory(m);
        let obj_index: HashMap<&str, ObjId> = file.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        if obj_index.len() != file.objects.len() {
            return Err(bad("duplicate object id".into()));
        }
        let n = file.objects.len();
        let mut homs = vec![vec![Vec::new(); n]; n];
        let mut morphisms = Vec::new();
        let mut morph_index: HashMap<String, MorphId> = HashMap::new();
        for (key, ids) in &file.homs {
            let (s, t) = key.split_once("->").ok_or_else(|| bad(format!("hom key '{key}' is not 'src->tgt'")))?;
            let s = *obj_index.get(s.trim()).ok_or_else(|| bad(format!("hom key '{key}': unknown source")))?;
            let t = *obj_index.get(t.trim()).ok_or_else(|| bad(format!("hom key '{key}': unknown target")))?;
            for id in ids {
                if morph_index.contains_key(id) {
                    return Err(bad(format!("morphism '{id}' appears in more than one hom-set")));
                }
                morph_index.insert(id.clone(), morphisms.len());
                homs[s][t].push(morphisms.len());
                morphisms.push(Morphism { name: id.clone(), src: s, tgt: t, map: None });
            }
        }
        let mut identities = vec![usize::MAX; n];
        for (obj, id) in &file.identities {
            let o = *obj_index.get(obj.as_str()).ok_or_else(|| bad(format!("identity for unknown object '{obj}'")))?;
            let m = *morph_index.get(id).ok_or_else(|| bad(format!("identity '{id}' is not a morphism")))?;
            if morphisms[m].src != o || morphisms[m].tgt != o {
                return Err(bad(format!("identity '{id}' is not an endomorphism of '{obj}'")));
            }
            identities[o] = m;
        }
        if let Some(o) = identities.iter().position(|&m| m == usize::MAX) {
            return Err(bad(format!("object '{}' has no identity", file.objects[o])));
        }
        let mut table = HashMap::new();
        for (key, result) in &file.compose {
            let (g, f) = key.split_once('∘').ok_or_else(|| bad(format!("compose key '{key}' is not 'g∘f'")))?;
            let lookup = |s: &str| morph_index.get(s.trim()).copied().ok_or_else(|| bad(format!("compose key '{key}': unknown morphism '{s}'")));
            let (g, f, r) = (lookup(g)?, lookup(f)?, lookup(result)?);
            if morphisms[f].tgt != morphisms[g].src {
                return Err(bad(format!("compose key '{key}': not composable")));
            }
            if morphisms[r].src != morphisms[f].src || morphisms[r].tgt != morphisms[g].tgt {
                return Err(bad(format!("compose key '{key}': result lies in the wrong hom-set")));
            }
            table.insert((g, f), r);
        }
        for (m, mor) in morphisms.iter().enumerate() {
            table.entry((identities[mor.tgt], m)).or_insert(m);
            table.entry((m, identities[mor.src])).or_insert(m);
        }
        for g in 0..morphisms.len() {
            for &f in homs.iter().flat_map(|row| row[morphisms[g].src].iter()) {
                if !table.contains_key(&(g, f)) {
                    return Err(bad(format!("missing composite {}∘{}", morphisms[g].name, morphisms[f].name)));
                }
            }
        }
        let objects = file.objects.iter().map(|o| CatObject { name: o.clone(), structure: None }).collect();
        Ok(FiniteCategory { objects, morphisms, homs, identities, composition: Composition::Table(table), opposite: false })
    }

    /// Full composition table in the current orientation.
    pub fn to_abstract(&self) -> AbstractCategoryFile {
        let mut homs = BTreeMap::new();
        let mut compose = BTreeMap::new();
        for a in self.objects() {
            for b in self.objects() {
                let hs = self.hom(a, b);
                if !hs.is_empty() {
                    homs.insert(format!("{}->{}", self.name(a), self.name(b)), hs.iter().map(|&m| self.morphism_name(m).to_string()).collect());
                }
                for c in self.objects() {
                    for &f in hs {
                        for &g in self.hom(b, c) {
                            compose.insert(
                                format!("{}∘{}", self.morphism_name(g), self.morphism_name(f)),
                                self.morphism_name(self.compose(g, f)).to_string(),
                            );
                        }
                    }
                }
            }
        }
        AbstractCategoryFile {
            objects: self.objects.iter().map(|o| o.name.clone()).collect(),
            homs,
            compose,
            identities: self.objects().map(|a| (self.name(a).to_string(), self.morphism_name(self.identity(a)).to_string())).collect(),
        }
    }

    pub fn op(&self) -> FiniteCategory {
        let mut c = self.clone();
        c.opposite = !c.opposite;
        c
    }

    pub fn is_opposite(&self) -> bool {
        self.opposite
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> std::ops::Range<ObjId> {
        0..self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn name(&self, a: ObjId) -> &str {
        &self.objects[a].name
    }

    pub fn structure(&self, a: ObjId) -> Option<&Structure> {
        self.objects[a].structure.as_ref()
    }

    pub fn has_structures(&self) -> bool {
        self.objects.iter().all(|o| o.structure.is_some())
    }

    pub fn find_object(&self, name: &str) -> Result<ObjId> {
        self.objects.iter().position(|o| o.name == name).ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn find_morphism(&self, name: &str) -> Option<MorphId> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn morphism_name(&self, f: MorphId) -> &str {
        &self.morphisms[f].name
    }

    pub fn src(&self, f: MorphId) -> ObjId {
        let m = &self.morphisms[f];
        if self.opposite {
            m.tgt
        } else {
            m.src
        }
    }

    pub fn tgt(&self, f: MorphId) -> ObjId {
        let m = &self.morphisms[f];
        if self.opposite {
            m.src
        } else {
            m.tgt
        }
    }

    /// The underlying map of a structure-backed morphism, in the base
    /// orientation.
    pub fn map(&self, f: MorphId) -> Option<&Embedding> {
        self.morphisms[f].map.as_ref()
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorphId] {
        if self.opposite {
            &self.homs[b][a]
        } else {
            &self.homs[a][b]
        }
    }

    pub fn arrow(&self, a: ObjId, b: ObjId) -> bool {
        !self.hom(a, b).is_empty()
    }

    pub fn identity(&self, a: ObjId) -> MorphId {
        self.identities[a]
    }

    /// Looks up the morphism of a structure category with the given map.
    pub fn morphism_with_map(&self, src: ObjId, tgt: ObjId, map: &[usize]) -> Option<MorphId> {
        let (s, t) = if self.opposite { (tgt, src) } else { (src, tgt) };
        match &self.composition {
            Composition::Maps(index) => index.get(&(s, t, map.to_vec())).copied(),
            Composition::Table(_) => None,
        }
    }

    fn base_compose(&self, g: MorphId, f: MorphId) -> Option<MorphId> {
        let (mg, mf) = (&self.morphisms[g], &self.morphisms[f]);
        if mf.tgt != mg.src {
            return None;
        }
        match &self.composition {
            Composition::Maps(index) => {
                let map = mg.map.as_ref()?.after(mf.map.as_ref()?);
                index.get(&(mf.src, mg.tgt, map.map)).copied()
            }
            Composition::Table(t) => t.get(&(g, f)).copied(),
        }
    }

    /// `g · f`, or `None` when not composable.
    pub fn try_compose(&self, g: MorphId, f: MorphId) -> Option<MorphId> {
        if self.opposite {
            self.base_compose(f, g)
        } else {
            self.base_compose(g, f)
        }
    }

    /// `g · f`. Panics if `tgt(f) != src(g)`.
    pub fn compose(&self, g: MorphId, f: MorphId) -> MorphId {
        self.try_compose(g, f).unwrap_or_else(|| panic!("cannot compose {} after {}", self.morphism_name(g), self.morphism_name(f)))
    }

    pub fn compose_all(&self, chain: &[MorphId]) -> MorphId {
        let (&last, rest) = chain.split_last().expect("non-empty chain");
        rest.iter().rev().fold(last, |acc, &g| self.compose(g, acc))
    }

    pub fn inverse(&self, f: MorphId) -> Option<MorphId> {
        let (a, b) = (self.src(f), self.tgt(f));
        self.hom(b, a)
            .iter()
            .copied()
            .find(|&g| self.compose(g, f) == self.identity(a) && self.compose(f, g) == self.identity(b))
    }

    pub fn automorphisms(&self, a: ObjId) -> Vec<MorphId> {
        self.hom(a, a).iter().copied().filter(|&f| self.inverse(f).is_some()).collect()
    }

    pub fn isomorphism(&self, a: ObjId, b: ObjId) -> Option<MorphId> {
        self.hom(a, b).iter().copied().find(|&f| self.inverse(f).is_some())
    }

    /// Left cancellation; returns a witness pair `(g, h)` with `f·g = f·h`.
    pub fn mono_violation(&self, f: MorphId) -> Option<(MorphId, MorphId)> {
        let b = self.src(f);
        for a in self.objects() {
            let mut seen: HashMap<MorphId, MorphId> = HashMap::new();
            for &g in self.hom(a, b) {
                if let Some(&h) = seen.get(&self.compose(f, g)) {
                    return Some((h, g));
                }
                seen.insert(self.compose(f, g), g);
            }
        }
        None
    }

    /// Right cancellation; returns `(g, h)` with `g·f = h·f`.
    pub fn epi_violation(&self, f: MorphId) -> Option<(MorphId, MorphId)> {
        let b = self.tgt(f);
        for c in self.objects() {
            let mut seen: HashMap<MorphId, MorphId> = HashMap::new();
            for &g in self.hom(b, c) {
                if let Some(&h) = seen.get(&self.compose(g, f)) {
                    return Some((h, g));
                }
                seen.insert(self.compose(g, f), g);
            }
        }
        None
    }

    /// Objects sorted by size and canonical form for structure categories,
    /// by position otherwise.
    pub fn canonical_order(&self) -> Vec<ObjId> {
        let mut ids: Vec<ObjId> = self.objects().collect();
        if self.has_structures() {
            let keys: Vec<(usize, Structure)> = self
                .objects
                .iter()
                .map(|o| {
                    let s = o.structure.as_ref().expect("structure-backed");
                    (s.size, canonical_form(s).0)
                })
                .collect();
            ids.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
        }
        ids
    }

    /// Checks identity laws and associativity on every composable triple.
    pub fn check_laws(&self, budget: Budget) -> LawReport {
        let mut meter = budget.meter();
        let mut violations = Vec::new();
        for f in 0..self.num_morphisms() {
            let (a, b) = (self.src(f), self.tgt(f));
            if self.try_compose(self.identity(b), f) != Some(f) || self.try_compose(f, self.identity(a)) != Some(f) {
                violations.push(format!("identity law fails for {}", self.morphism_name(f)));
            }
        }
        let mut status = Status::Holds;
        'outer: for f in 0..self.num_morphisms() {
            let b = self.tgt(f);
            for c in self.objects() {
                for &g in self.hom(b, c) {
                    let Some(gf) = self.try_compose(g, f) else {
                        violations.push(format!("missing composite {}·{}", self.morphism_name(g), self.morphism_name(f)));
                        continue;
                    };
                    for d in self.objects() {
                        for &h in self.hom(c, d) {
                            if !meter.tick() {
                                status = Status::Unknown;
                                break 'outer;
                            }
                            let left = self.try_compose(h, gf);
                            let right = self.try_compose(h, g).and_then(|hg| self.try_compose(hg, f));
                            if left.is_none() || left != right {
                                violations.push(format!(
                                    "associativity fails for ({}, {}, {})",
                                    self.morphism_name(h),
                                    self.morphism_name(g),
                                    self.morphism_name(f)
                                ));
                            }
                        }
                    }
                }
            }
        }
        if !violations.is_empty() {
            status = Status::Fails;
        }
        LawReport { status, violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub status: Status,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationCheck {
    pub holds: bool,
    /// `(f, g, h)` with `g ≠ h` but equal composites with `f`.
    pub counterexample: Option<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectednessCheck {
    pub holds: bool,
    pub counterexample: Option<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFinitenessReport {
    pub status: Status,
    pub per_object: BTreeMap<String, Status>,
    /// `(F, A, e, B, f)` for the first pair of arrows into `F` without a
    /// universal witness in the catalog.
    pub failures: Vec<[String; 5]>,
}

/// Verdicts for the standing axioms on a finite category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub laws: LawReport,
    pub c1_all_mono: CancellationCheck,
    pub all_epi: CancellationCheck,
    pub c2_objects_form_a_set: bool,
    pub c3_hom_sets_finite: bool,
    /// With the catalog serving as its own finite part this is vacuous.
    pub c4: String,
    /// For each `B`, the set `{A : A → B}`.
    pub c5_below: BTreeMap<String, Vec<String>>,
    /// For each `B`, the set `{A : B → A}`.
    pub c5_above: BTreeMap<String, Vec<String>>,
    pub directed: DirectednessCheck,
    pub dually_directed: DirectednessCheck,
    pub local_finiteness: LocalFinitenessReport,
}

fn cancellation(c: &FiniteCategory, violation: impl Fn(MorphId) -> Option<(MorphId, MorphId)>) -> CancellationCheck {
    for f in 0..c.num_morphisms() {
        if let Some((g, h)) = violation(f) {
            return CancellationCheck {
                holds: false,
                counterexample: Some([f, g, h].map(|m| c.morphism_name(m).to_string())),
            };
        }
    }
    CancellationCheck { holds: true, counterexample: None }
}

fn directedness(c: &FiniteCategory, upward: bool) -> DirectednessCheck {
    for a in c.objects() {
        for b in a..c.num_objects() {
            let joined = c.objects().any(|d| {
                if upward {
                    c.arrow(a, d) && c.arrow(b, d)
                } else {
                    c.arrow(d, a) && c.arrow(d, b)
                }
            });
            if !joined {
                return DirectednessCheck { holds: false, counterexample: Some([c.name(a).to_string(), c.name(b).to_string()]) };
            }
        }
    }
    DirectednessCheck { holds: true, counterexample: None }
}

/// Checks the standing axioms. Local finiteness is searched with witnesses
/// and contenders drawn from the category's own objects, within `budget`.
pub fn check_axioms(c: &FiniteCategory, budget: Budget) -> AxiomReport {
    let names = |ids: Vec<ObjId>| ids.into_iter().map(|x| c.name(x).to_string()).collect::<Vec<_>>();
    AxiomReport {
        laws: c.check_laws(budget),
        c1_all_mono: cancellation(c, |f| c.mono_violation(f)),
        all_epi: cancellation(c, |f| c.epi_violation(f)),
        c2_objects_form_a_set: true,
        c3_hom_sets_finite: true,
        c4: "vacuous: the catalog is its own finite part".to_string(),
        c5_below: c.objects().map(|b| (c.name(b).to_string(), names(c.objects().filter(|&a| c.arrow(a, b)).collect()))).collect(),
        c5_above: c.objects().map(|b| (c.name(b).to_string(), names(c.objects().filter(|&a| c.arrow(b, a)).collect()))).collect(),
        directed: directedness(c, true),
        dually_directed: directedness(c, false),
        local_finiteness: local_finiteness(c, budget),
    }
}

/// Local finiteness of every object for the whole category.
pub fn local_finiteness(c: &FiniteCategory, budget: Budget) -> LocalFinitenessReport {
    let mut meter = budget.meter();
    let mut per_object = BTreeMap::new();
    let mut failures = Vec::new();
    let mut overall = Status::Holds;
    for f_obj in c.objects() {
        let status = locally_finite_at(c, f_obj, &mut meter, &mut failures);
        per_object.insert(c.name(f_obj).to_string(), status);
        overall = overall.and(status);
    }
    LocalFinitenessReport { status: overall, per_object, failures }
}

/// All `p ∈ hom(a, d)` with `r · p = e`.
fn factorizations(c: &FiniteCategory, r: MorphId, e: MorphId) -> Vec<MorphId> {
    let (a, d) = (c.src(e), c.src(r));
    c.hom(a, d).iter().copied().filter(|&p| c.compose(r, p) == e).collect()
}

fn locally_finite_at(c: &FiniteCategory, f_obj: ObjId, meter: &mut crate::verdict::Meter, failures: &mut Vec<[String; 5]>) -> Status {
    let into_f: Vec<MorphId> = c.objects().flat_map(|a| c.hom(a, f_obj).iter().copied()).collect();
    // candidate triples (D, r) in object order; smaller hom-sets first is not needed for correctness
    for (i, &e) in into_f.iter().enumerate() {
        for &f in &into_f[i..] {
            let mut found = false;
            'cand: for d in c.objects() {
                for &r in c.hom(d, f_obj) {
                    for p in factorizations(c, r, e) {
                        for q in factorizations(c, r, f) {
                            if universal(c, f_obj, (e, f), (r, p, q), meter) {
                                found = true;
                                break 'cand;
                            }
                            if meter.exhausted() {
                                return Status::Unknown;
                            }
                        }
                    }
                }
            }
            if !found {
                failures.push([
                    c.name(f_obj).to_string(),
                    c.name(c.src(e)).to_string(),
                    c.morphism_name(e).to_string(),
                    c.name(c.src(f)).to_string(),
                    c.morphism_name(f).to_string(),
                ]);
                return Status::Fails;
            }
        }
    }
    Status::Holds
}

fn universal(
    c: &FiniteCategory,
    f_obj: ObjId,
    (e, f): (MorphId, MorphId),
    (r, p, q): (MorphId, MorphId, MorphId),
    meter: &mut crate::verdict::Meter,
) -> bool {
    let d = c.src(r);
    for h in c.objects() {
        for &r2 in c.hom(h, f_obj) {
            for p2 in factorizations(c, r2, e) {
                for q2 in factorizations(c, r2, f) {
                    if !meter.tick() {
                        return false;
                    }
                    let mediated = c.hom(d, h).iter().any(|&s| {
                        c.compose(s, p) == p2 && c.compose(s, q) == q2 && c.compose(r2, s) == r
                    });
                    if !mediated {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A choice of one object per isomorphism class together with an
/// isomorphism from every object to its representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeletonization {
    /// Representatives, in canonical order.
    pub representatives: Vec<ObjId>,
    /// `rep_of[c]` is the representative isomorphic to `c`.
    pub rep_of: Vec<ObjId>,
    /// `eta[c] : c → rep_of[c]`.
    pub eta: Vec<MorphId>,
    /// `eta_inv[c] : rep_of[c] → c`.
    pub eta_inv: Vec<MorphId>,
}

impl Skeletonization {
    /// `η_D · f · η_C⁻¹ : F(C) → F(D)`.
    pub fn conjugate(&self, c: &FiniteCategory, f: MorphId) -> MorphId {
        let (s, t) = (c.src(f), c.tgt(f));
        c.compose_all(&[self.eta[t], f, self.eta_inv[s]])
    }

    pub fn is_skeletal(&self) -> bool {
        self.representatives.len() == self.rep_of.len()
    }
}

/// Picks representatives and canonical isomorphisms.
///
/// Structure categories group objects by canonical form and take the
/// member with the least raw structure; abstract categories search the
/// tables for invertible morphisms.
pub fn skeletonize(c: &FiniteCategory) -> Result<Skeletonization> {
    let n = c.num_objects();
    let with_structure = c.objects().filter(|&a| c.structure(a).is_some()).count();
    let mut rep_of = vec![usize::MAX; n];
    let mut eta = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    if with_structure == n {
        let canon: Vec<(Structure, Embedding)> = c.objects().map(|a| canonical_form(c.structure(a).expect("checked"))).collect();
        let mut classes: BTreeMap<&Structure, Vec<ObjId>> = BTreeMap::new();
        for a in c.objects() {
            classes.entry(&canon[a].0).or_default().push(a);
        }
        let mut by_order: Vec<(usize, &Structure, Vec<ObjId>)> =
            classes.into_iter().map(|(k, v)| (k.size, k, v)).collect();
        by_order.sort();
        for (_, _, members) in by_order {
            let rep = *members
                .iter()
                .min_by(|&&x, &&y| c.structure(x).cmp(&c.structure(y)).then(x.cmp(&y)))
                .expect("non-empty class");
            representatives.push(rep);
            let rep_to_canon_inv = canon[rep].1.inverse();
            for &m in &members {
                rep_of[m] = rep;
                let map = rep_to_canon_inv.after(&canon[m].1);
                eta[m] = c
                    .morphism_with_map(m, rep, &map.map)
                    .or_else(|| c.isomorphism(m, rep))
                    .ok_or(Error::MissingIsoData(m))?;
            }
        }
    } else if with_structure == 0 {
        for a in c.objects() {
            if let Some(&rep) = representatives.iter().find(|&&r| c.isomorphism(a, r).is_some()) {
                rep_of[a] = rep;
                eta[a] = c.isomorphism(a, rep).expect("found above");
            } else {
                representatives.push(a);
                rep_of[a] = a;
                eta[a] = c.identity(a);
            }
        }
    } else {
        let missing = c.objects().find(|&a| c.structure(a).is_none()).expect("mixed category");
        return Err(Error::MissingIsoData(missing));
    }
    let eta_inv = eta.iter().map(|&f| c.inverse(f).expect("eta is an isomorphism")).collect();
    Ok(Skeletonization { representatives, rep_of, eta, eta_inv })
}

/// Objects as a set of names, for reports.
pub fn names(c: &FiniteCategory, ids: impl IntoIterator<Item = ObjId>) -> BTreeSet<String> {
    ids.into_iter().map(|a| c.name(a).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{graph, graphs, linear_order, linear_orders, path, Catalog};

    fn lo_cat(max: usize) -> FiniteCategory {
        FiniteCategory::from_catalog(&linear_orders(max)).unwrap()
    }

    #[test]
    fn hom_counts_from_structures() {
        let c = lo_cat(2);
        assert_eq!(c.hom(0, 1).len(), 2);
        assert_eq!(c.hom(1, 0).len(), 0);
        let mut p = Catalog::new(crate::catalog::graph_signature());
        p.push("P3", path(3)).unwrap();
        let c = FiniteCategory::from_catalog(&p).unwrap();
        assert_eq!(c.hom(0, 0).len(), 2);
        let mut rigid = Catalog::new(crate::catalog::order_signature());
        rigid.push("LO3", linear_order(3)).unwrap();
        let c = FiniteCategory::from_catalog(&rigid).unwrap();
        assert_eq!(c.hom(0, 0), &[c.identity(0)]);
    }

    #[test]
    fn structure_category_laws_and_monos() {
        let c = lo_cat(4);
        let r = check_axioms(&c, Budget::default());
        assert_eq!(r.laws.status, Status::Holds);
        assert!(r.c1_all_mono.holds);
        assert!(r.directed.holds);
        assert!(!r.all_epi.holds);
        assert_eq!(r.c5_below["LO2"], vec!["LO1", "LO2"]);
        assert_eq!(r.local_finiteness.status, Status::Holds);
    }

    #[test]
    fn edge_and_non_edge_are_not_directed() {
        let mut cat = Catalog::new(crate::catalog::graph_signature());
        cat.push("K2", graph(2, &[(0, 1)])).unwrap();
        cat.push("E2", graph(2, &[])).unwrap();
        let c = FiniteCategory::from_catalog(&cat).unwrap();
        let r = check_axioms(&c, Budget::default());
        assert!(!r.directed.holds);
        assert_eq!(r.directed.counterexample, Some(["K2".to_string(), "E2".to_string()]));
    }

    #[test]
    fn op_is_an_involution_and_swaps_mono_epi() {
        let c = lo_cat(3);
        assert_eq!(c.op().op(), c);
        assert_eq!(c.op().op().to_abstract(), c.to_abstract());
        let o = c.op();
        for f in 0..c.num_morphisms() {
            assert_eq!(c.mono_violation(f).is_none(), o.epi_violation(f).is_none());
            assert_eq!(c.epi_violation(f).is_none(), o.mono_violation(f).is_none());
        }
        for a in c.objects() {
            for b in c.objects() {
                assert_eq!(c.hom(a, b), o.hom(b, a));
            }
        }
        let (rc, ro) = (check_axioms(&c, Budget::default()), check_axioms(&o, Budget::default()));
        assert_eq!(rc.directed, ro.dually_directed);
        assert_eq!(rc.dually_directed, ro.directed);
    }

    #[test]
    fn abstract_round_trip() {
        let c = lo_cat(3);
        let file = c.to_abstract();
        let back = FiniteCategory::from_abstract(&file).unwrap();
        assert_eq!(back.to_abstract(), file);
        assert_eq!(check_axioms(&back, Budget::default()).laws.status, Status::Holds);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: AbstractCategoryFile = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, file);
    }

    #[test]
    fn abstract_missing_composite_rejected() {
        let file: AbstractCategoryFile = serde_json::from_str(
            r#"{"objects":["A","B","C"],
                "homs":{"A->A":["1A"],"B->B":["1B"],"C->C":["1C"],"A->B":["f"],"B->C":["g"],"A->C":["h"]},
                "compose":{},
                "identities":{"A":"1A","B":"1B","C":"1C"}}"#,
        )
        .unwrap();
        let err = FiniteCategory::from_abstract(&file).unwrap_err();
        assert!(err.to_string().contains("missing composite g∘f"), "{err}");
    }

    #[test]
    fn skeleton_of_two_copies() {
        let mut cat = Catalog::new(crate::catalog::order_signature());
        cat.push("LO2", linear_order(2)).unwrap();
        let rev = crate::structures::Structure::new(
            crate::catalog::order_signature(),
            2,
            vec![[vec![1, 0]].into_iter().collect()],
            vec![],
        )
        .unwrap();
        cat.push("LO2rev", rev).unwrap();
        let c = FiniteCategory::from_catalog(&cat).unwrap();
        let s = skeletonize(&c).unwrap();
        assert_eq!(s.representatives, vec![0]);
        assert_eq!(s.rep_of, vec![0, 0]);
        assert_eq!(s.eta[0], c.identity(0));
        assert_eq!(c.map(s.eta[1]).unwrap().map, vec![1, 0]);
        for a in c.objects() {
            assert_eq!(c.compose(s.eta_inv[a], s.eta[a]), c.identity(a));
        }
    }

    #[test]
    fn skeleton_edge_cases() {
        let c = lo_cat(3);
        let s = skeletonize(&c).unwrap();
        assert!(s.is_skeletal());
        assert!(c.objects().all(|a| s.eta[a] == c.identity(a)));
        let empty = FiniteCategory::from_catalog(&Catalog::new(crate::catalog::order_signature())).unwrap();
        let s = skeletonize(&empty).unwrap();
        assert!(s.representatives.is_empty());
        let abs = FiniteCategory::from_abstract(&c.to_abstract()).unwrap();
        assert_eq!(skeletonize(&abs).unwrap().representatives, vec![0, 1, 2]);
    }

    #[test]
    fn conjugation_is_a_bijection_on_hom_sets() {
        let g = graphs(3);
        let mut cat = g.clone();
        cat.push("P3b", graph(3, &[(0, 2), (2, 1)])).unwrap();
        let c = FiniteCategory::from_catalog(&cat).unwrap();
        let s = skeletonize(&c).unwrap();
        for a in c.objects() {
            for b in c.objects() {
                let conj: BTreeSet<MorphId> = c.hom(a, b).iter().map(|&f| s.conjugate(&c, f)).collect();
                let target: BTreeSet<MorphId> = c.hom(s.rep_of[a], s.rep_of[b]).iter().copied().collect();
                assert_eq!(conj, target);
            }
        }
    }
}
