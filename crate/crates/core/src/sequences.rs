//! Finite prefixes of sequences `ω → C`, transformations between them, the
//! congruence `≈`, colimits of structure chains, and the weak Fraïssé and
//! weak homogeneity checks.
//!
//! Every sequence is truncated to `N` levels. A transformation's index map
//! is only required to be nondecreasing; whether it reaches the last level
//! is recorded, not enforced.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, MorphId, ObjId};
use crate::error::{Error, Result};
use crate::structures::{is_embedding, Embedding, Structure};
use crate::verdict::Status;

/// `X_0 → X_1 → … → X_{N-1}` with all bonding maps `x_n^m` precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSequence {
    objects: Vec<ObjId>,
    bonds: Vec<Vec<MorphId>>,
}

impl TruncatedSequence {
    /// From the consecutive steps `x_n^{n+1}`.
    pub fn from_steps(cat: &FiniteCategory, objects: Vec<ObjId>, steps: &[MorphId]) -> Result<Self> {
        if objects.is_empty() || steps.len() + 1 != objects.len() {
            return Err(Error::ShapeMismatch);
        }
        for (n, &s) in steps.iter().enumerate() {
            if cat.src(s) != objects[n] || cat.tgt(s) != objects[n + 1] {
                return Err(Error::ShapeMismatch);
            }
        }
        let len = objects.len();
        let mut bonds = vec![Vec::new(); len];
        for n in 0..len {
            bonds[n] = vec![usize::MAX; len];
            bonds[n][n] = cat.identity(objects[n]);
            for m in n + 1..len {
                bonds[n][m] = cat.compose(steps[m - 1], bonds[n][m - 1]);
            }
        }
        Ok(TruncatedSequence { objects, bonds })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn object(&self, n: usize) -> ObjId {
        self.objects[n]
    }

    pub fn objects(&self) -> &[ObjId] {
        &self.objects
    }

    /// `x_n^m` for `n ≤ m`.
    pub fn bond(&self, n: usize, m: usize) -> MorphId {
        assert!(n <= m, "bonding maps go forward");
        self.bonds[n][m]
    }

    /// Checks `x_n^n = id` and `x_m^k · x_n^m = x_n^k`.
    pub fn check_invariants(&self, cat: &FiniteCategory) -> bool {
        let len = self.len();
        (0..len).all(|n| self.bond(n, n) == cat.identity(self.objects[n]))
            && (0..len).all(|n| (n..len).all(|m| (m..len).all(|k| cat.compose(self.bond(m, k), self.bond(n, m)) == self.bond(n, k))))
    }
}

/// `(F, φ)`: a nondecreasing `φ` and components `F_n : X_n → Y_{φ(n)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transformation {
    pub phi: Vec<usize>,
    pub components: Vec<MorphId>,
}

impl Transformation {
    /// Whether `φ` reaches the last level of the target.
    pub fn reaches_end(&self, y: &TruncatedSequence) -> bool {
        self.phi.last() == Some(&(y.len() - 1))
    }
}

/// Shape checks plus every naturality square `F_m · x_n^m = y_{φ(n)}^{φ(m)} · F_n`.
pub fn check_transformation(cat: &FiniteCategory, t: &Transformation, x: &TruncatedSequence, y: &TruncatedSequence) -> Result<bool> {
    if t.phi.len() != x.len() || t.components.len() != x.len() {
        return Err(Error::ShapeMismatch);
    }
    if let Some((index, _)) = t.phi.iter().enumerate().find(|(_, &p)| p >= y.len()) {
        return Err(Error::TruncationOverflow { index, len: y.len() });
    }
    if t.phi.windows(2).any(|w| w[0] > w[1]) {
        return Ok(false);
    }
    for n in 0..x.len() {
        let f = t.components[n];
        if cat.src(f) != x.object(n) || cat.tgt(f) != y.object(t.phi[n]) {
            return Ok(false);
        }
    }
    for n in 0..x.len() {
        for m in n..x.len() {
            let left = cat.compose(t.components[m], x.bond(n, m));
            let right = cat.compose(y.bond(t.phi[n], t.phi[m]), t.components[n]);
            if left != right {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All transformations `X → Y`, in lexicographic order of `(φ, F)`.
pub fn enumerate_transformations(cat: &FiniteCategory, x: &TruncatedSequence, y: &TruncatedSequence) -> Vec<Transformation> {
    let mut out = Vec::new();
    let mut phi = Vec::new();
    let mut comps = Vec::new();
    extend(cat, x, y, &mut phi, &mut comps, &mut out);
    out
}

fn extend(cat: &FiniteCategory, x: &TruncatedSequence, y: &TruncatedSequence, phi: &mut Vec<usize>, comps: &mut Vec<MorphId>, out: &mut Vec<Transformation>) {
    let n = phi.len();
    if n == x.len() {
        out.push(Transformation { phi: phi.clone(), components: comps.clone() });
        return;
    }
    let start = phi.last().copied().unwrap_or(0);
    for p in start..y.len() {
        for &f in cat.hom(x.object(n), y.object(p)) {
            let natural = (0..n).all(|m| cat.compose(f, x.bond(m, n)) == cat.compose(y.bond(phi[m], p), comps[m]));
            if natural {
                phi.push(p);
                comps.push(f);
                extend(cat, x, y, phi, comps, out);
                phi.pop();
                comps.pop();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivVerdict {
    pub status: Status,
    /// Per level `n`, the least `m` joining the two components.
    pub witnesses: Vec<Option<usize>>,
    pub offending: Option<usize>,
}

/// `(F, φ) ≈ (G, ψ)`, searching `m ≤ min(bound, N_Y - 1)`.
///
/// A level with no joining `m` gives FAILS when the bonding map from the
/// last level tried to the end of `Y` is mono, since then no later level
/// can join them either; otherwise UNKNOWN-AT-BOUND.
pub fn equiv_check(cat: &FiniteCategory, t1: &Transformation, t2: &Transformation, x: &TruncatedSequence, y: &TruncatedSequence, bound: usize) -> Result<EquivVerdict> {
    if t1.phi.len() != x.len() || t2.phi.len() != x.len() || t1.components.len() != x.len() || t2.components.len() != x.len() {
        return Err(Error::ShapeMismatch);
    }
    let top = bound.min(y.len() - 1);
    let mut witnesses = Vec::with_capacity(x.len());
    let mut status = Status::Holds;
    let mut offending = None;
    for n in 0..x.len() {
        let (p, q) = (t1.phi[n], t2.phi[n]);
        let lo = p.max(q);
        let found = (lo..=top).find(|&m| cat.compose(y.bond(p, m), t1.components[n]) == cat.compose(y.bond(q, m), t2.components[n]));
        witnesses.push(found);
        if found.is_none() {
            let persistent = lo <= top && cat.mono_violation(y.bond(top, y.len() - 1)).is_none();
            let s = if persistent { Status::Fails } else { Status::Unknown };
            if offending.is_none() {
                offending = Some(n);
            }
            status = status.and(s);
        }
    }
    Ok(EquivVerdict { status, witnesses, offending })
}

/// `(G, ψ) · (F, φ)` with `φ' = ψ ∘ φ` and components `G_{φ(n)} · F_n`.
pub fn compose(cat: &FiniteCategory, t2: &Transformation, t1: &Transformation) -> Result<Transformation> {
    let mut phi = Vec::with_capacity(t1.phi.len());
    let mut components = Vec::with_capacity(t1.phi.len());
    for (n, &p) in t1.phi.iter().enumerate() {
        if p >= t2.phi.len() {
            return Err(Error::TruncationOverflow { index: n, len: t2.phi.len() });
        }
        let g = t2.components[p];
        let f = t1.components[n];
        if cat.tgt(f) != cat.src(g) {
            return Err(Error::ShapeMismatch);
        }
        phi.push(t2.phi[p]);
        components.push(cat.compose(g, f));
    }
    Ok(Transformation { phi, components })
}

/// `J(A)`: the constant sequence on `A` with identity bondings.
pub fn embed_j(cat: &FiniteCategory, a: ObjId, len: usize) -> TruncatedSequence {
    TruncatedSequence::from_steps(cat, vec![a; len], &vec![cat.identity(a); len.saturating_sub(1)]).expect("constant sequence")
}

/// `J(f) = (Const_f, id)`.
pub fn lift_j(f: MorphId, len: usize) -> Transformation {
    Transformation { phi: (0..len).collect(), components: vec![f; len] }
}

pub fn identity_transformation(cat: &FiniteCategory, x: &TruncatedSequence) -> Transformation {
    Transformation { phi: (0..x.len()).collect(), components: x.objects().iter().map(|&a| cat.identity(a)).collect() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoTest {
    pub premise: Status,
    pub conclusion: Status,
    /// The premise holds but the conclusion fails.
    pub violation: bool,
}

/// If `F·G ≈ F·H` then `G ≈ H`.
pub fn mono_test(
    cat: &FiniteCategory,
    f: &Transformation,
    g: &Transformation,
    h: &Transformation,
    (x, y, z): (&TruncatedSequence, &TruncatedSequence, &TruncatedSequence),
    bound: usize,
) -> Result<MonoTest> {
    let fg = compose(cat, f, g)?;
    let fh = compose(cat, f, h)?;
    let premise = equiv_check(cat, &fg, &fh, x, z, bound)?.status;
    let conclusion = equiv_check(cat, g, h, x, y, bound)?.status;
    Ok(MonoTest { premise, conclusion, violation: premise == Status::Holds && conclusion == Status::Fails })
}

/// The colimit of a structure chain, with its cocone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colimit {
    pub structure: Structure,
    /// Each element named by the least `(n, index)` in its class.
    pub names: Vec<(usize, usize)>,
    /// `c_n : X_n → colim`.
    pub cocone: Vec<Embedding>,
}

fn structure_data<'a>(cat: &'a FiniteCategory, x: &TruncatedSequence) -> Result<Vec<&'a Structure>> {
    if cat.is_opposite() {
        return Err(Error::InvalidCategory("colimits need a structure category, not its opposite".into()));
    }
    x.objects()
        .iter()
        .map(|&a| cat.structure(a).ok_or_else(|| Error::InvalidCategory(format!("object '{}' carries no structure", cat.name(a)))))
        .collect()
}

/// Disjoint union of the `X_n` modulo `x ~ x_n^m(x)`.
pub fn colimit(cat: &FiniteCategory, x: &TruncatedSequence) -> Result<Colimit> {
    let structs = structure_data(cat, x)?;
    let last = x.len() - 1;
    let top = structs[last];
    let to_top = |n: usize| cat.map(x.bond(n, last)).expect("structure-backed").clone();
    let mut rep: Vec<Option<(usize, usize)>> = vec![None; top.size];
    for n in 0..x.len() {
        let m = to_top(n);
        for (i, &y) in m.map.iter().enumerate() {
            rep[y].get_or_insert((n, i));
        }
    }
    let names_by_top: Vec<(usize, usize)> = rep.into_iter().map(|r| r.expect("every top element is its own representative")).collect();
    let mut order: Vec<usize> = (0..top.size).collect();
    order.sort_by_key(|&y| names_by_top[y]);
    let mut rank = vec![0; top.size];
    for (r, &y) in order.iter().enumerate() {
        rank[y] = r;
    }
    let structure = top.relabel(&rank);
    let names = order.iter().map(|&y| names_by_top[y]).collect();
    let cocone = (0..x.len()).map(|n| Embedding { map: to_top(n).map.iter().map(|&y| rank[y]).collect() }).collect();
    Ok(Colimit { structure, names, cocone })
}

/// `c_m · x_n^m = c_n` and each `c_n` is an embedding.
pub fn verify_cocone(cat: &FiniteCategory, x: &TruncatedSequence, col: &Colimit) -> Result<bool> {
    let structs = structure_data(cat, x)?;
    for n in 0..x.len() {
        if !is_embedding(structs[n], &col.structure, &col.cocone[n].map) {
            return Ok(false);
        }
        for m in n..x.len() {
            let bond = cat.map(x.bond(n, m)).expect("structure-backed");
            if col.cocone[m].after(bond) != col.cocone[n] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The unique `u : colim → T` with `u · c_n = t_n`, given a cocone
/// `t_n : X_n → T` over the chain.
pub fn mediating_map(cat: &FiniteCategory, x: &TruncatedSequence, col: &Colimit, target: &Structure, cocone: &[Embedding]) -> Result<Embedding> {
    let structs = structure_data(cat, x)?;
    if cocone.len() != x.len() {
        return Err(Error::ShapeMismatch);
    }
    for n in 0..x.len() {
        if !is_embedding(structs[n], target, &cocone[n].map) {
            return Err(Error::InvalidStructure(format!("target cocone leg {n} is not an embedding")));
        }
    }
    let mut u = vec![usize::MAX; col.structure.size];
    for n in 0..x.len() {
        for (i, &c) in col.cocone[n].map.iter().enumerate() {
            let want = cocone[n].map[i];
            if u[c] != usize::MAX && u[c] != want {
                return Err(Error::InvalidStructure("target legs do not form a cocone".into()));
            }
            u[c] = want;
        }
    }
    let u = Embedding { map: u };
    if !is_embedding(&col.structure, target, &u.map) {
        return Err(Error::InvalidStructure("mediating map is not an embedding".into()));
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelWitness {
    pub n: usize,
    pub m: Option<usize>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakFraisseReport {
    pub status: Status,
    /// Per catalog object, the least level it maps into.
    pub bullet1: Vec<(ObjId, Option<usize>)>,
    pub bullet1_status: Status,
    pub bullet2: Vec<LevelWitness>,
    pub bullet2_status: Status,
    pub truncation: usize,
}

/// Both conditions of a weak Fraïssé sequence, with `∃m` bounded by
/// `m_max` and `∃k` by `k_max` (and both by the truncation).
pub fn weak_fraisse_check(cat: &FiniteCategory, w: &TruncatedSequence, catalog: &[ObjId], m_max: usize, k_max: usize) -> WeakFraisseReport {
    let last = w.len() - 1;
    let bullet1: Vec<(ObjId, Option<usize>)> =
        catalog.iter().map(|&c| (c, (0..w.len()).find(|&n| cat.arrow(c, w.object(n))))).collect();
    let bullet1_status = Status::from_bool(bullet1.iter().all(|(_, n)| n.is_some()));
    let mut bullet2 = Vec::new();
    for n in 0..w.len() {
        let m_top = m_max.min(last);
        let mut found = None;
        for m in n..=m_top {
            let ok = catalog.iter().all(|&c| {
                cat.hom(w.object(m), c).iter().all(|&f| {
                    let ffw = cat.compose(f, w.bond(n, m));
                    (m..=k_max.min(last)).any(|k| cat.hom(c, w.object(k)).iter().any(|&g| cat.compose(g, ffw) == w.bond(n, k)))
                })
            });
            if ok {
                found = Some(m);
                break;
            }
        }
        let exhausted = m_max >= last && k_max >= last;
        let status = match (found, exhausted) {
            (Some(_), _) => Status::Holds,
            (None, true) => Status::Fails,
            (None, false) => Status::Unknown,
        };
        bullet2.push(LevelWitness { n, m: found, status });
    }
    let bullet2_status = Status::all(bullet2.iter().map(|l| l.status));
    WeakFraisseReport { status: bullet1_status.and(bullet2_status), bullet1, bullet1_status, bullet2, bullet2_status, truncation: w.len() }
}

/// `(B, e, i)` satisfying (W1) and (W2) for one `f : A → S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityWitness {
    pub a: ObjId,
    pub f: MorphId,
    pub b: Option<ObjId>,
    pub e: Option<MorphId>,
    pub i: Option<MorphId>,
    /// For each `j ∈ hom(B, S)`, an automorphism `h` with `i·e = h·j·e`.
    pub automorphisms: Vec<(MorphId, MorphId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub status: Status,
    pub witnesses: Vec<HomogeneityWitness>,
}

/// Is `S` weakly homogeneous for the full subcategory on `subcat`? The
/// search over `B` is exhaustive within `subcat`.
pub fn weak_homogeneity_check(cat: &FiniteCategory, s: ObjId, subcat: &[ObjId]) -> HomogeneityReport {
    let auts = cat.automorphisms(s);
    let mut witnesses = Vec::new();
    for &a in subcat {
        for &f in cat.hom(a, s) {
            let mut wit = HomogeneityWitness { a, f, b: None, e: None, i: None, automorphisms: Vec::new() };
            'search: for &b in subcat {
                for &e in cat.hom(a, b) {
                    for &i in cat.hom(b, s) {
                        if cat.compose(i, e) != f {
                            continue;
                        }
                        let target = f;
                        let mut autos = Vec::new();
                        for &j in cat.hom(b, s) {
                            let je = cat.compose(j, e);
                            match auts.iter().copied().find(|&h| cat.compose(h, je) == target) {
                                Some(h) => autos.push((j, h)),
                                None => continue 'search,
                            }
                        }
                        wit = HomogeneityWitness { a, f, b: Some(b), e: Some(e), i: Some(i), automorphisms: autos };
                        break 'search;
                    }
                }
            }
            witnesses.push(wit);
        }
    }
    let status = Status::from_bool(witnesses.iter().all(|w| w.b.is_some()));
    HomogeneityReport { status, witnesses }
}

pub fn verify_homogeneity_witness(cat: &FiniteCategory, s: ObjId, w: &HomogeneityWitness) -> bool {
    let (Some(b), Some(e), Some(i)) = (w.b, w.e, w.i) else { return false };
    let target = cat.compose(i, e);
    target == w.f
        && cat.hom(b, s).len() == w.automorphisms.len()
        && w.automorphisms.iter().zip(cat.hom(b, s)).all(|(&(j, h), &jj)| {
            j == jj && cat.src(h) == s && cat.tgt(h) == s && cat.inverse(h).is_some() && cat.compose_all(&[h, j, e]) == target
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltrahomogeneityReport {
    pub status: Status,
    /// `(A, e_1, e_2)` with no automorphism `g` such that `g · e_1 = e_2`.
    pub failure: Option<(ObjId, MorphId, MorphId)>,
}

pub fn ultrahomogeneity_check(cat: &FiniteCategory, s: ObjId, subcat: &[ObjId]) -> UltrahomogeneityReport {
    let auts = cat.automorphisms(s);
    for &a in subcat {
        for &e1 in cat.hom(a, s) {
            for &e2 in cat.hom(a, s) {
                if !auts.iter().any(|&g| cat.compose(g, e1) == e2) {
                    return UltrahomogeneityReport { status: Status::Fails, failure: Some((a, e1, e2)) };
                }
            }
        }
    }
    UltrahomogeneityReport { status: Status::Holds, failure: None }
}

/// File form: objects by catalog name, bonding maps keyed `"n->m"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub objects: Vec<String>,
    pub bonding: BTreeMap<String, Vec<usize>>,
}

impl SequenceFile {
    /// Needs every consecutive `"n->n+1"`; any other entries are checked
    /// against the composites.
    pub fn to_sequence(&self, cat: &FiniteCategory) -> Result<TruncatedSequence> {
        let objects = self.objects.iter().map(|o| cat.find_object(o)).collect::<Result<Vec<_>>>()?;
        let bad = |m: String| Error::InvalidCategory(format!("sequence: {m}"));
        let lookup = |n: usize, m: usize| -> Result<Option<MorphId>> {
            match self.bonding.get(&format!("{n}->{m}")) {
                None => Ok(None),
                Some(map) => cat
                    .morphism_with_map(objects[n], objects[m], map)
                    .map(Some)
                    .ok_or_else(|| bad(format!("bonding {n}->{m} is not an embedding"))),
            }
        };
        let mut steps = Vec::new();
        for n in 0..objects.len().saturating_sub(1) {
            steps.push(lookup(n, n + 1)?.ok_or_else(|| bad(format!("missing bonding {n}->{}", n + 1)))?);
        }
        let seq = TruncatedSequence::from_steps(cat, objects.clone(), &steps)?;
        for key in self.bonding.keys() {
            let (n, m) = key
                .split_once("->")
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| bad(format!("bad bonding key '{key}'")))?;
            if n > m || m >= seq.len() {
                return Err(bad(format!("bonding key '{key}' out of range")));
            }
            if lookup(n, m)? != Some(seq.bond(n, m)) {
                return Err(bad(format!("bonding {key} disagrees with the composite of consecutive steps")));
            }
        }
        Ok(seq)
    }
}

/// The chain of initial-segment inclusions through the given objects of a
/// structure category, when each inclusion is an embedding.
pub fn inclusion_chain(cat: &FiniteCategory, objects: &[ObjId]) -> Result<TruncatedSequence> {
    let mut steps = Vec::new();
    for w in objects.windows(2) {
        let n = cat.structure(w[0]).ok_or(Error::MissingIsoData(w[0]))?.size;
        let id: Vec<usize> = (0..n).collect();
        steps.push(
            cat.morphism_with_map(w[0], w[1], &id)
                .ok_or_else(|| Error::InvalidCategory(format!("inclusion {} -> {} is not an embedding", cat.name(w[0]), cat.name(w[1]))))?,
        );
    }
    TruncatedSequence::from_steps(cat, objects.to_vec(), &steps)
}
