//! The coloring expansion `U : C* → C` at finite scale.
//!
//! An expansion `C* = (C, θ)` colors every copy `e ∈ hom(A, C)` of every
//! skeleton representative `A` with one of `t_A` colors. A morphism
//! `f : C* → D*` is a morphism `f : C → D` with `δ(f · e) = θ(e)` for every
//! copy `e`, so `U` is the identity on morphisms.
//!
//! Colorings are stored per representative as a vector indexed by the
//! position of `e` in `hom(A, C)`, which for structure categories is the
//! lexicographic order of the maps.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, StructureEntry};
use crate::category::{FiniteCategory, MorphId, ObjId, Skeletonization};
use crate::error::{Error, Result};
use crate::structures::{Signature, Structure};
use crate::verdict::{Budget, Status};

/// Number of colors `t_A` for every skeleton representative `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeAssignment {
    reps: Vec<ObjId>,
    degrees: Vec<u32>,
}

impl DegreeAssignment {
    /// Degrees given by object name. A non-representative name sets the
    /// degree of its representative; unnamed representatives get 1.
    pub fn new(cat: &FiniteCategory, skel: &Skeletonization, named: &BTreeMap<String, u32>) -> Result<Self> {
        let reps = skel.representatives.clone();
        let mut degrees = vec![None; reps.len()];
        for (name, &t) in named {
            let a = cat.find_object(name)?;
            if t == 0 {
                return Err(Error::InvalidDegree(format!("degree of {name} must be positive")));
            }
            let i = reps.iter().position(|&r| r == skel.rep_of[a]).expect("every object has a representative");
            match degrees[i] {
                Some(old) if old != t => {
                    return Err(Error::InvalidDegree(format!(
                        "conflicting degrees {old} and {t} for the class of {name}"
                    )))
                }
                _ => degrees[i] = Some(t),
            }
        }
        Ok(DegreeAssignment { reps, degrees: degrees.into_iter().map(|d| d.unwrap_or(1)).collect() })
    }

    pub fn uniform(skel: &Skeletonization, t: u32) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidDegree("degrees must be positive".into()));
        }
        Ok(DegreeAssignment { reps: skel.representatives.clone(), degrees: vec![t; skel.representatives.len()] })
    }

    pub fn reps(&self) -> &[ObjId] {
        &self.reps
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn degree_of(&self, rep: ObjId) -> Option<u32> {
        self.reps.iter().position(|&r| r == rep).map(|i| self.degrees[i])
    }

    /// Degrees above 1, by representative name.
    pub fn to_names(&self, cat: &FiniteCategory) -> BTreeMap<String, u32> {
        self.reps
            .iter()
            .zip(&self.degrees)
            .filter(|(_, &t)| t > 1)
            .map(|(&r, &t)| (cat.name(r).to_string(), t))
            .collect()
    }
}

/// `(C, θ)`; `theta[i][k]` is the color of the `k`-th morphism of
/// `hom(A_i, C)` where `A_i` is the `i`-th representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExpandedObject {
    pub base: ObjId,
    pub theta: Vec<Vec<u32>>,
}

/// For `e : A → B`, `table[i][k]` is the position in `hom(A_i, B)` of
/// `e · h` where `h` is the `k`-th morphism of `hom(A_i, A)`.
type Pullback = Vec<Vec<usize>>;

/// A category together with a skeleton and degrees: everything needed to
/// work in `C*`.
#[derive(Debug, Clone)]
pub struct Expander<'a> {
    cat: &'a FiniteCategory,
    skel: Skeletonization,
    degrees: DegreeAssignment,
    position: Vec<usize>,
}

impl<'a> Expander<'a> {
    pub fn new(cat: &'a FiniteCategory, skel: Skeletonization, degrees: DegreeAssignment) -> Self {
        let mut position = vec![usize::MAX; cat.num_morphisms()];
        for a in cat.objects() {
            for b in cat.objects() {
                for (k, &f) in cat.hom(a, b).iter().enumerate() {
                    position[f] = k;
                }
            }
        }
        Expander { cat, skel, degrees, position }
    }

    pub fn cat(&self) -> &FiniteCategory {
        self.cat
    }

    pub fn skeleton(&self) -> &Skeletonization {
        &self.skel
    }

    pub fn degrees(&self) -> &DegreeAssignment {
        &self.degrees
    }

    /// `∏_i t_i^{|hom(A_i, C)|}`.
    pub fn fiber_size(&self, c: ObjId) -> f64 {
        self.degrees
            .reps
            .iter()
            .zip(&self.degrees.degrees)
            .map(|(&a, &t)| (t as f64).powi(self.cat.hom(a, c).len() as i32))
            .product()
    }

    /// Every expansion of `c`, in lexicographic order of `θ`.
    pub fn enumerate(&self, c: ObjId, max_count: u64) -> Result<Vec<ExpandedObject>> {
        let size = self.fiber_size(c);
        if size > max_count as f64 {
            return Err(Error::Overflow(size));
        }
        let shape: Vec<(usize, u32)> =
            self.degrees.reps.iter().zip(&self.degrees.degrees).map(|(&a, &t)| (self.cat.hom(a, c).len(), t)).collect();
        let mut current = ExpandedObject { base: c, theta: shape.iter().map(|&(n, _)| vec![0; n]).collect() };
        let mut out = Vec::with_capacity(size as usize);
        loop {
            out.push(current.clone());
            let mut advanced = false;
            'odometer: for (i, &(_, t)) in shape.iter().enumerate().rev() {
                for k in (0..current.theta[i].len()).rev() {
                    if current.theta[i][k] + 1 < t {
                        current.theta[i][k] += 1;
                        advanced = true;
                        break 'odometer;
                    }
                    current.theta[i][k] = 0;
                }
            }
            if !advanced {
                return Ok(out);
            }
        }
    }

    /// Checks shape and color ranges.
    pub fn validate(&self, x: &ExpandedObject) -> Result<()> {
        if x.base >= self.cat.num_objects() {
            return Err(Error::InvalidExpansion(format!("unknown base object {}", x.base)));
        }
        if x.theta.len() != self.degrees.reps.len() {
            return Err(Error::InvalidExpansion(format!(
                "expected {} colorings, found {}",
                self.degrees.reps.len(),
                x.theta.len()
            )));
        }
        for (i, (&a, &t)) in self.degrees.reps.iter().zip(&self.degrees.degrees).enumerate() {
            let n = self.cat.hom(a, x.base).len();
            if x.theta[i].len() != n {
                return Err(Error::InvalidExpansion(format!(
                    "coloring of {} has {} entries, hom({}, {}) has {n}",
                    self.cat.name(a),
                    x.theta[i].len(),
                    self.cat.name(a),
                    self.cat.name(x.base)
                )));
            }
            if let Some(&c) = x.theta[i].iter().find(|&&c| c >= t) {
                return Err(Error::InvalidExpansion(format!("color {c} out of range for {}", self.cat.name(a))));
            }
        }
        Ok(())
    }

    /// Color of the copy `e ∈ hom(A_i, base)`.
    pub fn color(&self, x: &ExpandedObject, i: usize, e: MorphId) -> u32 {
        x.theta[i][self.position[e]]
    }

    fn pullback(&self, e: MorphId) -> Pullback {
        let a = self.cat.src(e);
        self.degrees
            .reps
            .iter()
            .map(|&x| self.cat.hom(x, a).iter().map(|&h| self.position[self.cat.compose(e, h)]).collect())
            .collect()
    }

    fn restrict_with(&self, table: &Pullback, src: ObjId, bstar: &ExpandedObject) -> ExpandedObject {
        ExpandedObject {
            base: src,
            theta: table.iter().zip(&bstar.theta).map(|(t, col)| t.iter().map(|&p| col[p]).collect()).collect(),
        }
    }

    fn check_target(&self, e: MorphId, base: ObjId) -> Result<()> {
        if self.cat.tgt(e) != base {
            return Err(Error::NotInHom(e));
        }
        Ok(())
    }

    /// `⟨B*⟩|e`: the unique expansion `A*` with `e ∈ hom(A*, B*)`,
    /// `θ'_X(h) = θ_X(e · h)`.
    pub fn restriction(&self, bstar: &ExpandedObject, e: MorphId) -> Result<ExpandedObject> {
        self.check_target(e, bstar.base)?;
        Ok(self.restrict_with(&self.pullback(e), self.cat.src(e), bstar))
    }

    /// `F*·g` for an automorphism `g` of `F`: `θ'(e) = θ(g · e)`.
    pub fn logical_action(&self, fstar: &ExpandedObject, g: MorphId) -> Result<ExpandedObject> {
        if self.cat.src(g) != fstar.base || self.cat.inverse(g).is_none() {
            return Err(Error::NotInHom(g));
        }
        self.restriction(fstar, g)
    }

    /// Whether `f ∈ hom(C*, D*)`; on failure names the first copy `e` of
    /// some representative with `δ(f·e) ≠ θ(e)`.
    pub fn morphism_check(&self, f: MorphId, cstar: &ExpandedObject, dstar: &ExpandedObject) -> Result<MorphismCheck> {
        if self.cat.src(f) != cstar.base {
            return Err(Error::NotInHom(f));
        }
        self.check_target(f, dstar.base)?;
        let table = self.pullback(f);
        for (i, &a) in self.degrees.reps.iter().enumerate() {
            for (k, &p) in table[i].iter().enumerate() {
                if dstar.theta[i][p] != cstar.theta[i][k] {
                    return Ok(MorphismCheck { status: Status::Fails, offending: Some(self.cat.hom(a, cstar.base)[k]) });
                }
            }
        }
        Ok(MorphismCheck { status: Status::Holds, offending: None })
    }

    /// `hom(C*, D*)` as a subset of `hom(C, D)`.
    pub fn expanded_hom(&self, cstar: &ExpandedObject, dstar: &ExpandedObject) -> Vec<MorphId> {
        self.cat
            .hom(cstar.base, dstar.base)
            .iter()
            .copied()
            .filter(|&f| self.restrict_with(&self.pullback(f), cstar.base, dstar) == *cstar)
            .collect()
    }

    /// Isomorphism-invariant key: the expansion transported to the
    /// representative of its base and minimized over its automorphisms.
    pub fn key(&self, x: &ExpandedObject) -> ExpandedObject {
        let rep = self.skel.rep_of[x.base];
        let on_rep = self.restrict_with(&self.pullback(self.skel.eta_inv[x.base]), rep, x);
        self.cat
            .automorphisms(rep)
            .into_iter()
            .map(|g| self.restrict_with(&self.pullback(g), rep, &on_rep))
            .min()
            .expect("the identity is an automorphism")
    }

    /// Every expansion over a representative that maps into `F*`, keyed.
    pub fn age(&self, fstar: &ExpandedObject) -> BTreeSet<ExpandedObject> {
        let mut out = BTreeSet::new();
        for &a in &self.degrees.reps {
            for &e in self.cat.hom(a, fstar.base) {
                out.insert(self.key(&self.restrict_with(&self.pullback(e), a, fstar)));
            }
        }
        out
    }

    /// Names of the added relation symbols `R_{m,j}`, disjoint from the
    /// base signature.
    pub fn expanded_signature(&self) -> Result<Signature> {
        let base = self.base_signature()?;
        let mut taken: HashSet<String> = base.relations.iter().map(|r| r.name.clone()).collect();
        taken.extend(base.constants.iter().cloned());
        let mut sig = base.clone();
        for (&a, &t) in self.degrees.reps.iter().zip(&self.degrees.degrees) {
            let arity = self.cat.structure(a).expect("structure category").size;
            for j in 1..=t {
                let mut name = format!("R_{}_{j}", self.cat.name(a));
                while taken.contains(&name) {
                    name.push('\'');
                }
                taken.insert(name.clone());
                sig.relations.push(crate::structures::RelationSymbol { name, arity });
            }
        }
        sig.validate()?;
        Ok(sig)
    }

    fn base_signature(&self) -> Result<&Signature> {
        if self.cat.is_opposite() {
            return Err(Error::InvalidExpansion("opposite categories have no first-order rendering".into()));
        }
        let first = self.cat.objects().next().ok_or_else(|| Error::InvalidExpansion("empty category".into()))?;
        self.cat
            .structure(first)
            .map(|s| &s.signature)
            .ok_or_else(|| Error::InvalidExpansion("abstract categories have no first-order rendering".into()))
    }

    /// The `Θ'`-structure: the base structure plus, for every copy `e` of
    /// `A_m` with color `j`, the tuple `(e(0), …, e(n_m - 1))` in `R_{m,j+1}`.
    pub fn render(&self, x: &ExpandedObject) -> Result<Structure> {
        let sig = self.expanded_signature()?;
        let base = self.cat.structure(x.base).expect("checked by expanded_signature");
        let mut relations = base.relations.clone();
        for (i, &a) in self.degrees.reps.iter().enumerate() {
            let first = relations.len();
            relations.extend((0..self.degrees.degrees[i]).map(|_| BTreeSet::new()));
            for (k, &e) in self.cat.hom(a, x.base).iter().enumerate() {
                let tuple = self.cat.map(e).expect("structure category").map.clone();
                relations[first + x.theta[i][k] as usize].insert(tuple);
            }
        }
        Structure::new(sig, base.size, relations, base.constants.clone())
    }

    /// Reads an expansion of `base` back from its `Θ'`-structure, checking
    /// that the added relations are pairwise disjoint, hold only of tuples
    /// encoding copies, and color every copy.
    pub fn parse(&self, s: &Structure, base: ObjId) -> Result<ExpandedObject> {
        let sig = self.expanded_signature()?;
        let b = self.cat.structure(base).expect("checked by expanded_signature");
        let bad = |m: String| Error::InvalidExpansion(m);
        if s.signature != sig {
            return Err(bad("signature is not the expanded signature".into()));
        }
        if s.size != b.size || s.relations[..b.relations.len()] != b.relations[..] || s.constants != b.constants {
            return Err(bad(format!("reduct is not {}", self.cat.name(base))));
        }
        let mut theta = Vec::with_capacity(self.degrees.reps.len());
        let mut r = b.relations.len();
        for (i, &a) in self.degrees.reps.iter().enumerate() {
            let mut colors = vec![None; self.cat.hom(a, base).len()];
            for j in 0..self.degrees.degrees[i] {
                for tuple in &s.relations[r] {
                    let e = self
                        .cat
                        .morphism_with_map(a, base, tuple)
                        .ok_or_else(|| bad(format!("{tuple:?} in {} is not a copy", sig.relations[r].name)))?;
                    if colors[self.position[e]].replace(j).is_some() {
                        return Err(bad(format!("{tuple:?} lies in two added relations")));
                    }
                }
                r += 1;
            }
            let colors = colors
                .into_iter()
                .enumerate()
                .map(|(k, c)| c.ok_or_else(|| bad(format!("copy {k} of {} is uncolored", self.cat.name(a)))))
                .collect::<Result<Vec<_>>>()?;
            theta.push(colors);
        }
        Ok(ExpandedObject { base, theta })
    }

    /// File form; representatives with one color are omitted.
    pub fn to_entry(&self, x: &ExpandedObject) -> ExpansionEntry {
        let theta = self
            .degrees
            .reps
            .iter()
            .zip(&self.degrees.degrees)
            .zip(&x.theta)
            .filter(|((_, &t), _)| t > 1)
            .map(|((&a, _), col)| (self.cat.name(a).to_string(), col.clone()))
            .collect();
        ExpansionEntry { base: self.cat.name(x.base).to_string(), theta }
    }

    pub fn from_entry(&self, entry: &ExpansionEntry) -> Result<ExpandedObject> {
        let base = self.cat.find_object(&entry.base)?;
        for name in entry.theta.keys() {
            let a = self.cat.find_object(name)?;
            if self.degrees.degree_of(a).is_none() {
                return Err(Error::InvalidExpansion(format!("{name} is not a skeleton representative")));
            }
        }
        let theta = self
            .degrees
            .reps
            .iter()
            .map(|&a| {
                entry
                    .theta
                    .get(self.cat.name(a))
                    .cloned()
                    .unwrap_or_else(|| vec![0; self.cat.hom(a, base).len()])
            })
            .collect();
        let x = ExpandedObject { base, theta };
        self.validate(&x)?;
        Ok(x)
    }

    /// For `e : A → B`, a `B*` with `e ∈ hom(A*, B*)`: copies through `e`
    /// inherit their color, all other copies get color 0. `None` when two
    /// copies in `A` with different colors collapse under `e`.
    fn extend(&self, astar: &ExpandedObject, e: MorphId, table: &Pullback) -> Option<ExpandedObject> {
        let b = self.cat.tgt(e);
        let mut theta: Vec<Vec<Option<u32>>> =
            self.degrees.reps.iter().map(|&x| vec![None; self.cat.hom(x, b).len()]).collect();
        for (i, t) in table.iter().enumerate() {
            for (k, &p) in t.iter().enumerate() {
                let c = astar.theta[i][k];
                if theta[i][p].replace(c).is_some_and(|old| old != c) {
                    return None;
                }
            }
        }
        Some(ExpandedObject {
            base: b,
            theta: theta.into_iter().map(|col| col.into_iter().map(|c| c.unwrap_or(0)).collect()).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismCheck {
    pub status: Status,
    pub offending: Option<MorphId>,
}

/// Expansion catalog file entry; `theta` maps representative names to
/// colors in hom-set order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionEntry {
    pub base: String,
    #[serde(default)]
    pub theta: BTreeMap<String, Vec<u32>>,
}

/// A base catalog with degrees and a list of expansions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandedCatalogFile {
    pub signature: Signature,
    pub structures: Vec<StructureEntry>,
    #[serde(default)]
    pub degrees: BTreeMap<String, u32>,
    #[serde(default)]
    pub expansions: Vec<ExpansionEntry>,
}

impl ExpandedCatalogFile {
    pub fn new(catalog: &Catalog, ex: &Expander, expansions: &[ExpandedObject]) -> Self {
        let file = catalog.to_file();
        ExpandedCatalogFile {
            signature: file.signature,
            structures: file.structures,
            degrees: ex.degrees().to_names(ex.cat()),
            expansions: expansions.iter().map(|x| ex.to_entry(x)).collect(),
        }
    }

    pub fn catalog(&self) -> Result<Catalog> {
        Catalog::from_file(&crate::catalog::CatalogFile {
            signature: self.signature.clone(),
            structures: self.structures.clone(),
        })
    }
}

/// Fibers `U⁻¹(C)` indexed by object; may be sub-fibers.
pub type Fibers = Vec<Vec<ExpandedObject>>;

/// The full fiber of every object.
pub fn full_fibers(ex: &Expander, max_per_object: u64) -> Result<Fibers> {
    ex.cat().objects().map(|c| ex.enumerate(c, max_per_object)).collect()
}

/// Pulls expansions of representatives back along `η_C`:
/// `θ^C_A(e) = θ^{F(C)}_A(η_C · e)`.
pub fn transport_expansion(ex: &Expander, rep_fibers: &BTreeMap<ObjId, Vec<ExpandedObject>>) -> Result<Fibers> {
    let skel = ex.skeleton();
    ex.cat()
        .objects()
        .map(|c| {
            let rep = skel.rep_of[c];
            rep_fibers
                .get(&rep)
                .map(|xs| xs.iter().map(|x| ex.restriction(x, skel.eta[c])).collect::<Result<Vec<_>>>())
                .unwrap_or_else(|| Ok(Vec::new()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberCount {
    pub object: ObjId,
    pub count: usize,
    pub formula: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasonableWitness {
    pub e: MorphId,
    pub a_star: ExpandedObject,
    pub b_star: ExpandedObject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasonableFailure {
    pub e: MorphId,
    pub a_star: ExpandedObject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionFailure {
    pub e: MorphId,
    pub b_star: ExpandedObject,
    /// Number of `A*` in the fiber with `e ∈ hom(A*, B*)`.
    pub matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgetfulReport {
    pub status: Status,
    pub surjective: Status,
    pub empty_fibers: Vec<ObjId>,
    /// Morphisms of `C*` are represented by their underlying morphisms.
    pub injective_on_homs: Status,
    pub reasonable: Status,
    pub reasonable_checked: u64,
    pub reasonable_samples: Vec<ReasonableWitness>,
    pub reasonable_failure: Option<ReasonableFailure>,
    pub unique_restrictions: Status,
    pub restrictions_checked: u64,
    pub restriction_failure: Option<RestrictionFailure>,
    pub precompact: Status,
    pub fiber_counts: Vec<FiberCount>,
    /// Whether every fiber was the full one.
    pub full: bool,
}

const SAMPLE_LIMIT: usize = 8;
const EXHAUSTIVE_UNIQUENESS_LIMIT: usize = 64;

/// Checks the four properties of `U` on the expansion category whose
/// objects are the given fibers.
pub fn check_forgetful(ex: &Expander, fibers: &Fibers, budget: Budget) -> Result<ForgetfulReport> {
    let cat = ex.cat();
    let mut meter = budget.meter();
    for fiber in fibers {
        for x in fiber {
            ex.validate(x)?;
        }
    }
    let empty_fibers: Vec<ObjId> = cat.objects().filter(|&c| fibers[c].is_empty()).collect();
    let surjective = Status::from_bool(empty_fibers.is_empty());

    let fiber_counts: Vec<FiberCount> = cat
        .objects()
        .map(|c| FiberCount { object: c, count: fibers[c].len(), formula: ex.fiber_size(c) })
        .collect();
    let distinct = fibers.iter().all(|f| f.iter().collect::<HashSet<_>>().len() == f.len());
    let full = fiber_counts.iter().all(|fc| fc.count as f64 == fc.formula);
    let precompact = Status::from_bool(distinct && fiber_counts.iter().all(|fc| fc.count as f64 <= fc.formula));

    let sets: Vec<HashSet<&ExpandedObject>> = fibers.iter().map(|f| f.iter().collect()).collect();
    let mut reasonable = Status::Holds;
    let mut reasonable_checked = 0;
    let mut reasonable_samples = Vec::new();
    let mut reasonable_failure = None;
    let mut unique_restrictions = Status::Holds;
    let mut restrictions_checked = 0;
    let mut restriction_failure = None;
    'pairs: for a in cat.objects() {
        for b in cat.objects() {
            for &e in cat.hom(a, b) {
                let table = ex.pullback(e);
                if reasonable == Status::Holds {
                    for astar in &fibers[a] {
                        if !meter.tick() {
                            reasonable = Status::Unknown;
                            break;
                        }
                        reasonable_checked += 1;
                        let direct = ex.extend(astar, e, &table).filter(|w| sets[b].contains(w));
                        let witness = direct.or_else(|| {
                            fibers[b].iter().find(|bs| ex.restrict_with(&table, a, bs) == *astar).cloned()
                        });
                        match witness {
                            Some(b_star) => {
                                if reasonable_samples.len() < SAMPLE_LIMIT {
                                    reasonable_samples.push(ReasonableWitness { e, a_star: astar.clone(), b_star });
                                }
                            }
                            None => {
                                reasonable = Status::Fails;
                                reasonable_failure = Some(ReasonableFailure { e, a_star: astar.clone() });
                                break;
                            }
                        }
                    }
                }
                if unique_restrictions == Status::Holds {
                    for bstar in &fibers[b] {
                        if !meter.tick() {
                            unique_restrictions = Status::Unknown;
                            break;
                        }
                        restrictions_checked += 1;
                        let matches = if fibers[a].len() <= EXHAUSTIVE_UNIQUENESS_LIMIT {
                            fibers[a].iter().filter(|x| ex.restrict_with(&table, a, bstar) == **x).count()
                        } else {
                            usize::from(sets[a].contains(&ex.restrict_with(&table, a, bstar)))
                        };
                        if matches != 1 {
                            unique_restrictions = Status::Fails;
                            restriction_failure = Some(RestrictionFailure { e, b_star: bstar.clone(), matches });
                            break;
                        }
                    }
                }
                if reasonable != Status::Holds && unique_restrictions != Status::Holds {
                    break 'pairs;
                }
            }
        }
    }
    let injective_on_homs = Status::Holds;
    let status = Status::all([surjective, injective_on_homs, reasonable, unique_restrictions, precompact]);
    Ok(ForgetfulReport {
        status,
        surjective,
        empty_fibers,
        injective_on_homs,
        reasonable,
        reasonable_checked,
        reasonable_samples,
        reasonable_failure,
        unique_restrictions,
        restrictions_checked,
        restriction_failure,
        precompact,
        fiber_counts,
        full,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionLawViolation {
    Identity { f_star: ExpandedObject },
    Composition { f_star: ExpandedObject, g: MorphId, h: MorphId },
    NotAMorphism { f_star: ExpandedObject, g: MorphId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionLawReport {
    pub status: Status,
    pub expansions: usize,
    pub automorphisms: usize,
    pub violation: Option<ActionLawViolation>,
}

/// `F*·id = F*`, `(F*·g)·h = F*·(g·h)` and `g ∈ hom(F*·g, F*)` for every
/// listed expansion and all automorphisms `g, h`.
pub fn check_action_laws(ex: &Expander, f: ObjId, expansions: &[ExpandedObject]) -> Result<ActionLawReport> {
    let cat = ex.cat();
    let aut = cat.automorphisms(f);
    let fail = |v| ActionLawReport {
        status: Status::Fails,
        expansions: expansions.len(),
        automorphisms: aut.len(),
        violation: Some(v),
    };
    for x in expansions {
        if ex.logical_action(x, cat.identity(f))? != *x {
            return Ok(fail(ActionLawViolation::Identity { f_star: x.clone() }));
        }
        for &g in &aut {
            let xg = ex.logical_action(x, g)?;
            if ex.morphism_check(g, &xg, x)?.status != Status::Holds {
                return Ok(fail(ActionLawViolation::NotAMorphism { f_star: x.clone(), g }));
            }
            for &h in &aut {
                if ex.logical_action(&xg, h)? != ex.logical_action(x, cat.compose(g, h))? {
                    return Ok(fail(ActionLawViolation::Composition { f_star: x.clone(), g, h }));
                }
            }
        }
    }
    Ok(ActionLawReport { status: Status::Holds, expansions: expansions.len(), automorphisms: aut.len(), violation: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitEntry {
    /// Least member.
    pub representative: ExpandedObject,
    pub size: usize,
    pub age: Vec<ExpandedObject>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitAgeReport {
    pub base: ObjId,
    pub expansions: usize,
    pub automorphisms: usize,
    pub orbits: Vec<OrbitEntry>,
    /// Whether all members of every orbit have the same age.
    pub invariance: Status,
    pub invariance_violation: Option<(ExpandedObject, MorphId)>,
    /// Distinct inclusion-minimal ages.
    pub minimal_ages: Vec<Vec<ExpandedObject>>,
    /// Lex-least expansion among those with inclusion-minimal age.
    pub selected: Option<ExpandedObject>,
    pub caveat: String,
}

pub const ORBIT_CAVEAT: &str = "fibers are finite and discrete: the closure of an orbit is the orbit itself, \
so the minimal-age selection ranges over exact orbits rather than orbit closures";

/// Orbits of `Aut(F)` on the expansions of `F`, their ages, and a
/// selection of minimal age.
pub fn orbit_age_analysis(ex: &Expander, f: ObjId, max_expansions: u64) -> Result<OrbitAgeReport> {
    let cat = ex.cat();
    let all = ex.enumerate(f, max_expansions)?;
    let aut = cat.automorphisms(f);
    let index: HashMap<&ExpandedObject, usize> = all.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let tables: Vec<Pullback> = aut.iter().map(|&g| ex.pullback(g)).collect();
    let ages: Vec<BTreeSet<ExpandedObject>> = all.iter().map(|x| ex.age(x)).collect();
    let mut seen = vec![false; all.len()];
    let mut orbits = Vec::new();
    let mut invariance = Status::Holds;
    let mut invariance_violation = None;
    for i in 0..all.len() {
        if seen[i] {
            continue;
        }
        let mut members = BTreeSet::new();
        for (t, &g) in tables.iter().zip(&aut) {
            let j = index[&ex.restrict_with(t, f, &all[i])];
            members.insert(j);
            seen[j] = true;
            if ages[j] != ages[i] && invariance_violation.is_none() {
                invariance = Status::Fails;
                invariance_violation = Some((all[i].clone(), g));
            }
        }
        orbits.push(OrbitEntry {
            representative: all[*members.first().expect("orbit contains the identity image")].clone(),
            size: members.len(),
            age: ages[i].iter().cloned().collect(),
        });
    }
    let distinct: BTreeSet<&BTreeSet<ExpandedObject>> = ages.iter().collect();
    let minimal: Vec<&BTreeSet<ExpandedObject>> = distinct
        .iter()
        .copied()
        .filter(|a| !distinct.iter().any(|b| b.len() < a.len() && b.is_subset(a)))
        .collect();
    let selected = (0..all.len()).find(|&i| minimal.contains(&&ages[i])).map(|i| all[i].clone());
    Ok(OrbitAgeReport {
        base: f,
        expansions: all.len(),
        automorphisms: aut.len(),
        orbits,
        invariance,
        invariance_violation,
        minimal_ages: minimal.into_iter().map(|a| a.iter().cloned().collect()).collect(),
        selected,
        caveat: ORBIT_CAVEAT.to_string(),
    })
}

/// Designated expansions per base object.
pub type Designation = BTreeMap<ObjId, Vec<ExpandedObject>>;

/// Designates every member of the age of `F*` over its representative.
pub fn designate_age(ex: &Expander, fstar: &ExpandedObject) -> Designation {
    let mut out = Designation::new();
    for x in ex.age(fstar) {
        out.entry(x.base).or_default().push(x);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpEntry {
    pub a: ObjId,
    pub status: Status,
    pub witness: Option<ObjId>,
    pub tried: Vec<ObjId>,
    pub skipped: Vec<ObjId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleObjectEntry {
    pub d_star: ExpandedObject,
    pub status: Status,
    pub witness: Option<ObjId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpReport {
    pub status: Status,
    pub direct: Vec<EpEntry>,
    pub single_object: Vec<SingleObjectEntry>,
    pub single_object_status: Status,
    /// Whether the two criteria gave different verdicts.
    pub disagreement: bool,
}

/// Expansion property over the designated expansions: for every `A` some
/// `B` with `A* → B*` for all designated `A*`, `B*`; alongside the
/// criterion "for every `D*` some `B` with `D* → B*` for all designated
/// `B*`". Candidates larger than `max_size` are skipped.
pub fn expansion_property_check(
    ex: &Expander,
    designated: &Designation,
    max_size: Option<usize>,
    budget: Budget,
) -> Result<EpReport> {
    let cat = ex.cat();
    let mut meter = budget.meter();
    for xs in designated.values() {
        for x in xs {
            ex.validate(x)?;
        }
    }
    let bases: Vec<ObjId> = cat.canonical_order().into_iter().filter(|b| designated.get(b).is_some_and(|v| !v.is_empty())).collect();
    let too_big = |b: ObjId| max_size.is_some_and(|m| cat.structure(b).is_some_and(|s| s.size > m));
    let mut tables: HashMap<MorphId, Pullback> = HashMap::new();
    let mut maps_into = |astar: &ExpandedObject, bstar: &ExpandedObject, meter: &mut crate::verdict::Meter| -> Option<bool> {
        for &e in cat.hom(astar.base, bstar.base) {
            if !meter.tick() {
                return None;
            }
            let t = tables.entry(e).or_insert_with(|| ex.pullback(e));
            if ex.restrict_with(t, astar.base, bstar) == *astar {
                return Some(true);
            }
        }
        Some(false)
    };

    let mut direct = Vec::new();
    for &a in &bases {
        let mut entry = EpEntry { a, status: Status::Fails, witness: None, tried: Vec::new(), skipped: Vec::new() };
        'candidates: for &b in &bases {
            if too_big(b) {
                entry.skipped.push(b);
                continue;
            }
            entry.tried.push(b);
            for astar in &designated[&a] {
                for bstar in &designated[&b] {
                    match maps_into(astar, bstar, &mut meter) {
                        Some(true) => {}
                        Some(false) => continue 'candidates,
                        None => {
                            entry.status = Status::Unknown;
                            break 'candidates;
                        }
                    }
                }
            }
            entry.status = Status::Holds;
            entry.witness = Some(b);
            break;
        }
        if entry.status == Status::Fails && !entry.skipped.is_empty() {
            entry.status = Status::Unknown;
        }
        direct.push(entry);
    }

    let mut single_object = Vec::new();
    for &d in &bases {
        for dstar in &designated[&d] {
            let mut entry = SingleObjectEntry { d_star: dstar.clone(), status: Status::Fails, witness: None };
            let mut skipped = false;
            'candidates: for &b in &bases {
                if too_big(b) {
                    skipped = true;
                    continue;
                }
                for bstar in &designated[&b] {
                    match maps_into(dstar, bstar, &mut meter) {
                        Some(true) => {}
                        Some(false) => continue 'candidates,
                        None => {
                            entry.status = Status::Unknown;
                            break 'candidates;
                        }
                    }
                }
                entry.status = Status::Holds;
                entry.witness = Some(b);
                break;
            }
            if entry.status == Status::Fails && skipped {
                entry.status = Status::Unknown;
            }
            single_object.push(entry);
        }
    }
    let status = Status::all(direct.iter().map(|e| e.status));
    let single_object_status = Status::all(single_object.iter().map(|e| e.status));
    Ok(EpReport { status, direct, single_object, single_object_status, disagreement: status != single_object_status })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseComparison {
    pub status: Status,
    /// Objects whose fiber is not a singleton, with the fiber size.
    pub object_mismatches: Vec<(ObjId, usize)>,
    /// `(C, D, |hom(C*, D*)|, |hom(C, D)|)` where the counts differ.
    pub pair_mismatches: Vec<(ObjId, ObjId, usize, usize)>,
    pub pairs_checked: usize,
}

/// Compares the expansion category with its base object by object and
/// hom-set by hom-set; with all degrees 1 they must agree.
pub fn compare_with_base(ex: &Expander, fibers: &Fibers) -> BaseComparison {
    let cat = ex.cat();
    let object_mismatches: Vec<(ObjId, usize)> =
        cat.objects().filter(|&c| fibers[c].len() != 1).map(|c| (c, fibers[c].len())).collect();
    let mut pair_mismatches = Vec::new();
    let mut pairs_checked = 0;
    for c in cat.objects() {
        for d in cat.objects() {
            for cs in &fibers[c] {
                for ds in &fibers[d] {
                    pairs_checked += 1;
                    let (n, m) = (ex.expanded_hom(cs, ds).len(), cat.hom(c, d).len());
                    if n != m {
                        pair_mismatches.push((c, d, n, m));
                    }
                }
            }
        }
    }
    BaseComparison {
        status: Status::from_bool(object_mismatches.is_empty() && pair_mismatches.is_empty()),
        object_mismatches,
        pair_mismatches,
        pairs_checked,
    }
}
