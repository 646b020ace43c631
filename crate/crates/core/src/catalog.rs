//! Structure catalogs: the JSON file format and a few standard families.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{canonical_form, Signature, Structure};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedStructure {
    pub name: String,
    pub structure: Structure,
}

/// A list of named structures over one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub signature: Signature,
    pub entries: Vec<NamedStructure>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub signature: Signature,
    pub structures: Vec<StructureEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureEntry {
    pub name: String,
    pub size: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, usize>,
}

impl StructureEntry {
    pub fn from_structure(name: &str, s: &Structure) -> Self {
        StructureEntry {
            name: name.to_string(),
            size: s.size,
            relations: s
                .signature
                .relations
                .iter()
                .zip(&s.relations)
                .map(|(sym, table)| (sym.name.clone(), table.iter().cloned().collect()))
                .collect(),
            constants: s.signature.constants.iter().cloned().zip(s.constants.iter().copied()).collect(),
        }
    }

    pub fn to_structure(&self, signature: &Signature) -> Result<Structure> {
        let ctx = |msg: String| Error::InvalidStructure(format!("structure '{}': {msg}", self.name));
        for key in self.relations.keys() {
            if signature.relation_index(key).is_none() {
                return Err(ctx(format!("unknown relation symbol '{key}'")));
            }
        }
        for key in self.constants.keys() {
            if signature.constant_index(key).is_none() {
                return Err(ctx(format!("unknown constant symbol '{key}'")));
            }
        }
        let relations = signature
            .relations
            .iter()
            .map(|sym| {
                self.relations
                    .get(&sym.name)
                    .map(|ts| ts.iter().cloned().collect::<BTreeSet<_>>())
                    .unwrap_or_default()
            })
            .collect();
        let constants = signature
            .constants
            .iter()
            .map(|c| self.constants.get(c).copied().ok_or_else(|| ctx(format!("constant '{c}' is not interpreted"))))
            .collect::<Result<Vec<_>>>()?;
        Structure::new(signature.clone(), self.size, relations, constants).map_err(|e| ctx(e.to_string()))
    }
}

impl Catalog {
    pub fn new(signature: Signature) -> Self {
        Catalog { signature, entries: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, structure: Structure) -> Result<()> {
        let name = name.into();
        if structure.signature != self.signature {
            return Err(Error::SignatureMismatch);
        }
        if self.get(&name).is_some() {
            return Err(Error::InvalidStructure(format!("duplicate structure name '{name}'")));
        }
        self.entries.push(NamedStructure { name, structure });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Structure> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.structure)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    /// Keeps only the named structures, in catalog order.
    pub fn restrict(&self, keep: &[&str]) -> Catalog {
        Catalog {
            signature: self.signature.clone(),
            entries: self.entries.iter().filter(|e| keep.contains(&e.name.as_str())).cloned().collect(),
        }
    }

    pub fn filter(&self, mut pred: impl FnMut(&NamedStructure) -> bool) -> Catalog {
        Catalog { signature: self.signature.clone(), entries: self.entries.iter().filter(|e| pred(e)).cloned().collect() }
    }

    pub fn from_file(file: &CatalogFile) -> Result<Self> {
        file.signature.validate()?;
        let mut cat = Catalog::new(file.signature.clone());
        for entry in &file.structures {
            cat.push(entry.name.clone(), entry.to_structure(&file.signature)?)?;
        }
        Ok(cat)
    }

    pub fn to_file(&self) -> CatalogFile {
        CatalogFile {
            signature: self.signature.clone(),
            structures: self.entries.iter().map(|e| StructureEntry::from_structure(&e.name, &e.structure)).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Catalog::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("catalog serializes")
    }
}

pub fn order_signature() -> Signature {
    Signature::new(vec![("lt", 2)], vec![]).expect("valid signature")
}

pub fn graph_signature() -> Signature {
    Signature::new(vec![("E", 2)], vec![]).expect("valid signature")
}

/// The strict linear order `0 < 1 < .. < n-1`.
pub fn linear_order(n: usize) -> Structure {
    let lt = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
    Structure::new(order_signature(), n, vec![lt], vec![]).expect("valid order")
}

/// A simple undirected graph; each edge is stored in both directions.
pub fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
    let e = edges.iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect();
    Structure::new(graph_signature(), n, vec![e], vec![]).expect("valid graph")
}

pub fn path(n: usize) -> Structure {
    graph(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
}

pub fn complete_graph(n: usize) -> Structure {
    graph(n, &(0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect::<Vec<_>>())
}

pub fn cycle(n: usize) -> Structure {
    graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
}

/// `LO1, .., LOmax`.
pub fn linear_orders(max: usize) -> Catalog {
    let mut cat = Catalog::new(order_signature());
    for n in 1..=max {
        cat.push(format!("LO{n}"), linear_order(n)).expect("fresh name");
    }
    cat
}

/// One representative of every isomorphism type of graph on `1..=max`
/// vertices, each in canonical form, ordered by size then canonical form.
pub fn graphs(max: usize) -> Catalog {
    let mut cat = Catalog::new(graph_signature());
    for n in 1..=max {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut classes = BTreeSet::new();
        for mask in 0u64..(1u64 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            classes.insert(canonical_form(&graph(n, &edges)).0);
        }
        for (idx, g) in classes.into_iter().enumerate() {
            let name = graph_alias(&g).unwrap_or_else(|| format!("G{n}_{idx}"));
            cat.push(name, g).expect("fresh name");
        }
    }
    cat
}

fn graph_alias(g: &Structure) -> Option<String> {
    let n = g.size;
    let canon = |s: Structure| canonical_form(&s).0;
    let same = |s: Structure| canon(s) == canonical_form(g).0;
    if same(complete_graph(n)) {
        return Some(format!("K{n}"));
    }
    if same(graph(n, &[])) {
        return Some(format!("E{n}"));
    }
    if n >= 3 && same(path(n)) {
        return Some(format!("P{n}"));
    }
    if n >= 4 && same(cycle(n)) {
        return Some(format!("C{n}"));
    }
    if n >= 4 && same(graph(n, &(1..n).map(|i| (0, i)).collect::<Vec<_>>())) {
        return Some(format!("S{n}"));
    }
    None
}
