//! Finite relational structures, embeddings between them, automorphism
//! groups and canonical labelling.
//!
//! Elements of a structure of size `n` are the integers `0..n`. Embeddings
//! are injective maps that preserve and reflect every relation and preserve
//! constants. All enumerations are lexicographic on the map, so anything
//! derived from them is reproducible.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A relational signature with constants. Function symbols are not supported.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub relations: Vec<RelationSymbol>,
    #[serde(default)]
    pub constants: Vec<String>,
}

impl Signature {
    pub fn new(relations: Vec<(&str, usize)>, constants: Vec<&str>) -> Result<Self> {
        let sig = Signature {
            relations: relations
                .into_iter()
                .map(|(name, arity)| RelationSymbol { name: name.to_string(), arity })
                .collect(),
            constants: constants.into_iter().map(str::to_string).collect(),
        };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for r in &self.relations {
            if r.arity == 0 {
                return Err(Error::InvalidSignature(format!("relation {} has arity 0", r.name)));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(Error::InvalidSignature(format!("duplicate symbol {}", r.name)));
            }
        }
        for c in &self.constants {
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidSignature(format!("duplicate symbol {c}")));
            }
        }
        Ok(())
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }
}

/// A finite structure over `{0, .., size-1}`.
///
/// `relations[i]` is the table of the `i`-th relation symbol of the
/// signature; `constants[i]` interprets the `i`-th constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Structure {
    pub signature: Signature,
    pub size: usize,
    pub relations: Vec<BTreeSet<Vec<usize>>>,
    pub constants: Vec<usize>,
}

impl Structure {
    pub fn new(
        signature: Signature,
        size: usize,
        relations: Vec<BTreeSet<Vec<usize>>>,
        constants: Vec<usize>,
    ) -> Result<Self> {
        let s = Structure { signature, size, relations, constants };
        s.validate()?;
        Ok(s)
    }

    /// A structure with every relation empty; fails if the signature has constants.
    pub fn empty_tables(signature: Signature, size: usize) -> Result<Self> {
        let relations = vec![BTreeSet::new(); signature.relations.len()];
        Structure::new(signature, size, relations, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        self.signature.validate()?;
        if self.relations.len() != self.signature.relations.len() {
            return Err(Error::InvalidStructure(format!(
                "expected {} relation tables, found {}",
                self.signature.relations.len(),
                self.relations.len()
            )));
        }
        for (sym, table) in self.signature.relations.iter().zip(&self.relations) {
            for tuple in table {
                if tuple.len() != sym.arity {
                    return Err(Error::InvalidStructure(format!(
                        "tuple {tuple:?} in {} has wrong length",
                        sym.name
                    )));
                }
                if let Some(&x) = tuple.iter().find(|&&x| x >= self.size) {
                    return Err(Error::InvalidStructure(format!(
                        "element {x} in {} is out of range for size {}",
                        sym.name, self.size
                    )));
                }
            }
        }
        if self.constants.len() != self.signature.constants.len() {
            return Err(Error::InvalidStructure("constant map is not total".into()));
        }
        if let Some(&c) = self.constants.iter().find(|&&c| c >= self.size) {
            return Err(Error::InvalidStructure(format!("constant value {c} out of range")));
        }
        Ok(())
    }

    pub fn holds(&self, relation: usize, tuple: &[usize]) -> bool {
        self.relations[relation].contains(tuple)
    }

    /// The structure obtained by renaming element `x` to `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Structure {
        let relations = self
            .relations
            .iter()
            .map(|table| table.iter().map(|t| t.iter().map(|&x| perm[x]).collect()).collect())
            .collect();
        Structure {
            signature: self.signature.clone(),
            size: self.size,
            relations,
            constants: self.constants.iter().map(|&c| perm[c]).collect(),
        }
    }

    /// The substructure induced on `elements`, listed in the order they get
    /// new labels `0..`.
    pub fn induced(&self, elements: &[usize]) -> Structure {
        let mut pos = vec![usize::MAX; self.size];
        for (i, &x) in elements.iter().enumerate() {
            pos[x] = i;
        }
        let relations = self
            .relations
            .iter()
            .map(|table| {
                table
                    .iter()
                    .filter(|t| t.iter().all(|&x| pos[x] != usize::MAX))
                    .map(|t| t.iter().map(|&x| pos[x]).collect())
                    .collect()
            })
            .collect();
        Structure {
            signature: self.signature.clone(),
            size: elements.len(),
            relations,
            constants: self.constants.iter().map(|&c| pos[c]).collect(),
        }
    }
}

/// An injective map between structures that preserves and reflects all
/// relations and preserves constants. Source and target are tracked by the
/// caller (usually a [`crate::category::FiniteCategory`]).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn identity(n: usize) -> Self {
        Embedding { map: (0..n).collect() }
    }

    /// `self` after `inner`, i.e. `x ↦ self(inner(x))`.
    pub fn after(&self, inner: &Embedding) -> Embedding {
        Embedding { map: inner.map.iter().map(|&x| self.map[x]).collect() }
    }

    pub fn inverse(&self) -> Embedding {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Embedding { map: inv }
    }
}

/// Checks the embedding invariant directly from the definition.
pub fn is_embedding(src: &Structure, tgt: &Structure, map: &[usize]) -> bool {
    if src.signature != tgt.signature || map.len() != src.size {
        return false;
    }
    let mut used = BTreeSet::new();
    if map.iter().any(|&x| x >= tgt.size || !used.insert(x)) {
        return false;
    }
    if src.constants.iter().zip(&tgt.constants).any(|(&a, &b)| map[a] != b) {
        return false;
    }
    for (r, sym) in src.signature.relations.iter().enumerate() {
        let mut tuple = vec![0; sym.arity];
        loop {
            let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
            if src.holds(r, &tuple) != tgt.holds(r, &image) {
                return false;
            }
            if !next_tuple(&mut tuple, src.size) {
                break;
            }
        }
    }
    true
}

/// Advances `tuple` to the next element of `{0..n}^len` in lex order.
pub(crate) fn next_tuple(tuple: &mut [usize], n: usize) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < n {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// All tuples over `{0..=level}` of the given arity whose largest entry is
/// `level`, in lexicographic order.
fn tuples_with_max(arity: usize, level: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut t = vec![0; arity];
    loop {
        if t.contains(&level) {
            out.push(t.clone());
        }
        if !next_tuple(&mut t, level + 1) {
            break;
        }
    }
    out
}

/// Enumerates `hom(A, B)` in lexicographic order of the maps.
pub fn enumerate_embeddings(a: &Structure, b: &Structure) -> Result<Vec<Embedding>> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch);
    }
    let mut out = Vec::new();
    if a.size > b.size {
        return Ok(out);
    }
    // fixed images forced by constants
    let mut forced = vec![None; a.size];
    for (&ca, &cb) in a.constants.iter().zip(&b.constants) {
        match forced[ca] {
            Some(prev) if prev != cb => return Ok(out),
            _ => forced[ca] = Some(cb),
        }
    }
    let checks: Vec<Vec<(usize, Vec<usize>)>> = (0..a.size)
        .map(|level| {
            a.signature
                .relations
                .iter()
                .enumerate()
                .flat_map(|(r, sym)| tuples_with_max(sym.arity, level).into_iter().map(move |t| (r, t)))
                .collect()
        })
        .collect();
    let mut map = Vec::with_capacity(a.size);
    let mut used = vec![false; b.size];
    extend_embedding(a, b, &forced, &checks, &mut map, &mut used, &mut out);
    Ok(out)
}

fn extend_embedding(
    a: &Structure,
    b: &Structure,
    forced: &[Option<usize>],
    checks: &[Vec<(usize, Vec<usize>)>],
    map: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Embedding>,
) {
    let level = map.len();
    if level == a.size {
        out.push(Embedding { map: map.clone() });
        return;
    }
    let candidates: Vec<usize> = match forced[level] {
        Some(x) => vec![x],
        None => (0..b.size).collect(),
    };
    for y in candidates {
        if used[y] {
            continue;
        }
        map.push(y);
        let consistent = checks[level].iter().all(|(r, t)| {
            let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            a.holds(*r, t) == b.holds(*r, &image)
        });
        if consistent {
            used[y] = true;
            extend_embedding(a, b, forced, checks, map, used, out);
            used[y] = false;
        }
        map.pop();
    }
}

/// All automorphisms of `a`, lexicographically ordered (the identity first).
pub fn automorphisms(a: &Structure) -> Vec<Embedding> {
    enumerate_embeddings(a, a).expect("a structure shares its own signature")
}

/// Iso-invariant colouring of elements by iterated refinement.
///
/// Colours are ranks of sorted invariant signatures, so isomorphic
/// structures receive corresponding colourings.
pub fn refined_colors(a: &Structure) -> Vec<usize> {
    let n = a.size;
    let mut sigs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, sig) in sigs.iter_mut().enumerate() {
        for (ci, &c) in a.constants.iter().enumerate() {
            sig.push(ci * 2 + usize::from(c == x));
        }
        for (r, sym) in a.signature.relations.iter().enumerate() {
            for p in 0..sym.arity {
                sig.push(a.relations[r].iter().filter(|t| t[p] == x).count());
            }
            sig.push(usize::from(a.holds(r, &vec![x; sym.arity])));
        }
    }
    let mut colors = rank(&sigs);
    loop {
        let mut next: Vec<Vec<usize>> = colors.iter().map(|&c| vec![c]).collect();
        let mut occurrences: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
        for (r, table) in a.relations.iter().enumerate() {
            for t in table {
                for (p, &x) in t.iter().enumerate() {
                    let mut entry = vec![r, p];
                    entry.extend(t.iter().map(|&y| colors[y]));
                    occurrences[x].push(entry);
                }
            }
        }
        for (x, mut occ) in occurrences.into_iter().enumerate() {
            occ.sort();
            for e in occ {
                next[x].push(usize::MAX);
                next[x].extend(e);
            }
        }
        let refined = rank(&next);
        let before = colors.iter().collect::<BTreeSet<_>>().len();
        let after = refined.iter().collect::<BTreeSet<_>>().len();
        colors = refined;
        if after == before {
            return colors;
        }
    }
}

fn rank(sigs: &[Vec<usize>]) -> Vec<usize> {
    let distinct: BTreeMap<&Vec<usize>, usize> =
        sigs.iter().collect::<BTreeSet<_>>().into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    sigs.iter().map(|s| distinct[s]).collect()
}

/// Canonical relabelling of a structure.
///
/// Among the relabellings that list elements in nondecreasing refined
/// colour, returns the one whose level-by-level encoding is least, together
/// with the isomorphism `a → canonical`. Two structures have equal canonical
/// forms iff they are isomorphic.
pub fn canonical_form(a: &Structure) -> (Structure, Embedding) {
    let n = a.size;
    if n == 0 {
        return (a.clone(), Embedding::identity(0));
    }
    let colors = refined_colors(a);
    let levels: Vec<Vec<(Option<usize>, Vec<usize>)>> = (0..n)
        .map(|level| {
            let mut items: Vec<(Option<usize>, Vec<usize>)> =
                (0..a.constants.len()).map(|c| (None, vec![c])).collect();
            for (r, sym) in a.signature.relations.iter().enumerate() {
                items.extend(tuples_with_max(sym.arity, level).into_iter().map(|t| (Some(r), t)));
            }
            items
        })
        .collect();
    let mut search = CanonSearch {
        a,
        colors: &colors,
        levels: &levels,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        segments: Vec::with_capacity(n),
        best: None,
    };
    search.run();
    let (_, order) = search.best.expect("at least one relabelling exists");
    let mut inv = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    (a.relabel(&inv), Embedding { map: inv })
}

struct CanonSearch<'a> {
    a: &'a Structure,
    colors: &'a [usize],
    levels: &'a [Vec<(Option<usize>, Vec<usize>)>],
    order: Vec<usize>,
    used: Vec<bool>,
    segments: Vec<Vec<bool>>,
    best: Option<(Vec<Vec<bool>>, Vec<usize>)>,
}

impl CanonSearch<'_> {
    fn segment(&self, level: usize) -> Vec<bool> {
        self.levels[level]
            .iter()
            .map(|(rel, t)| match rel {
                None => self.a.constants[t[0]] == self.order[level],
                Some(r) => {
                    let image: Vec<usize> = t.iter().map(|&x| self.order[x]).collect();
                    self.a.holds(*r, &image)
                }
            })
            .collect()
    }

    fn compare_to_best(&self) -> Ordering {
        match &self.best {
            None => Ordering::Less,
            Some((best, _)) => self.segments.iter().zip(best).map(|(s, b)| s.cmp(b)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal),
        }
    }

    fn run(&mut self) {
        let level = self.order.len();
        let n = self.a.size;
        if level == n {
            if self.compare_to_best() == Ordering::Less {
                self.best = Some((self.segments.clone(), self.order.clone()));
            }
            return;
        }
        let min_color = (0..n).filter(|&x| !self.used[x]).map(|x| self.colors[x]).min().expect("unused element");
        for x in 0..n {
            if self.used[x] || self.colors[x] != min_color {
                continue;
            }
            self.order.push(x);
            let seg = self.segment(level);
            self.segments.push(seg);
            if self.compare_to_best() != Ordering::Greater {
                self.used[x] = true;
                self.run();
                self.used[x] = false;
            }
            self.segments.pop();
            self.order.pop();
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn lo2_into_lo4_matches_brute_force() {
        let got = enumerate_embeddings(&linear_order(2), &linear_order(4)).unwrap();
        let brute = brute_embeddings(&linear_order(2), &linear_order(4));
        assert_eq!(brute.len(), 6);
        assert_eq!(got.iter().map(|e| e.map.clone()).collect::<Vec<_>>(), brute);
    }

    #[test]
    fn identity_is_always_an_embedding() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let homs = enumerate_embeddings(&p3, &p3).unwrap();
        assert!(homs.contains(&Embedding::identity(3)));
    }

    #[test]
    fn edge_into_edgeless_graph_is_empty() {
        let k2 = graph(2, &[(0, 1)]);
        let e3 = graph(3, &[]);
        assert!(enumerate_embeddings(&k2, &e3).unwrap().is_empty());
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let err = enumerate_embeddings(&linear_order(2), &graph(2, &[])).unwrap_err();
        assert!(matches!(err, Error::SignatureMismatch));
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&linear_order(3)), vec![Embedding::identity(3)]);
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let brute = all_permutations(3).into_iter().filter(|p| is_embedding(&p3, &p3, p)).count();
        assert_eq!(brute, 2);
        assert_eq!(automorphisms(&p3).len(), 2);
        assert_eq!(automorphisms(&linear_order(1)).len(), 1);
    }

    #[test]
    fn constants_are_preserved() {
        let sig = Signature::new(vec![("E", 2)], vec!["root"]).unwrap();
        let e = [vec![0, 1], vec![1, 0]].into_iter().collect();
        let a = Structure::new(sig.clone(), 2, vec![e], vec![0]).unwrap();
        let e3 = [vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1]].into_iter().collect();
        let b = Structure::new(sig, 3, vec![e3], vec![1]).unwrap();
        let homs = enumerate_embeddings(&a, &b).unwrap();
        assert_eq!(homs.iter().map(|e| e.map.clone()).collect::<Vec<_>>(), vec![vec![1, 0], vec![1, 2]]);
    }

    #[test]
    fn invalid_structures_rejected() {
        let bad = Structure::new(order_sig(), 2, vec![[vec![0, 2]].into_iter().collect()], vec![]);
        assert!(matches!(bad, Err(Error::InvalidStructure(_))));
        assert!(Signature::new(vec![("R", 0)], vec![]).is_err());
        assert!(Signature::new(vec![("R", 1)], vec!["R"]).is_err());
    }

    #[test]
    fn canonical_form_of_relabelled_paths() {
        let p = graph(3, &[(0, 1), (1, 2)]);
        let q = graph(3, &[(2, 0), (0, 1)]);
        let (cp, ip) = canonical_form(&p);
        let (cq, iq) = canonical_form(&q);
        assert_eq!(cp, cq);
        assert_eq!(p.relabel(&ip.map), cp);
        assert_eq!(q.relabel(&iq.map), cq);
        // permutation oracle: the canonical form is among the relabellings
        assert!(all_permutations(3).iter().any(|perm| p.relabel(perm) == cp));
    }

    #[test]
    fn canonical_input_gets_identity() {
        let (c, _) = canonical_form(&graph(4, &[(0, 1), (1, 2), (2, 3)]));
        let (c2, iso) = canonical_form(&c);
        assert_eq!(c2, c);
        assert_eq!(iso, Embedding::identity(4));
    }

    #[test]
    fn order_and_reversed_order_agree() {
        let lo3 = linear_order(3);
        let rev = Structure::new(
            order_sig(),
            3,
            vec![[vec![2, 1], vec![2, 0], vec![1, 0]].into_iter().collect()],
            vec![],
        )
        .unwrap();
        assert_eq!(canonical_form(&lo3).0, canonical_form(&rev).0);
    }
}
