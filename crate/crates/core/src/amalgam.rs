//! Amalgamation, weak amalgamation, 2-out-of-k amalgamation, and executable
//! versions of the two claims behind "finite small Ramsey degrees imply the
//! weak amalgamation property".
//!
//! Every existential quantifier ranges over the objects of the given
//! category only.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::arrows::{arrow_check, ArrowOptions, Coloring};
use crate::category::{FiniteCategory, MorphId, ObjId};
use crate::error::{Error, Result};
use crate::verdict::{Budget, Status};

/// `r · u = s · v` with `r, s` into `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Amalgam {
    pub d: ObjId,
    pub r: MorphId,
    pub s: MorphId,
}

/// Amalgam search with a cache keyed by the pair of morphisms out of a
/// common source.
pub struct Amalgamator<'a> {
    cat: &'a FiniteCategory,
    cache: RefCell<HashMap<(MorphId, MorphId), Option<Amalgam>>>,
}

impl<'a> Amalgamator<'a> {
    pub fn new(cat: &'a FiniteCategory) -> Self {
        Amalgamator { cat, cache: RefCell::new(HashMap::new()) }
    }

    /// The first `(D, r, s)` in object and hom order with `r · u = s · v`.
    pub fn amalgamate(&self, u: MorphId, v: MorphId) -> Option<Amalgam> {
        if let Some(hit) = self.cache.borrow().get(&(u, v)) {
            return *hit;
        }
        let c = self.cat;
        let (b, cc) = (c.tgt(u), c.tgt(v));
        let mut found = None;
        'search: for d in c.objects() {
            let left: HashMap<MorphId, MorphId> = c.hom(b, d).iter().rev().map(|&r| (c.compose(r, u), r)).collect();
            if left.is_empty() {
                continue;
            }
            for &s in c.hom(cc, d) {
                if let Some(&r) = left.get(&c.compose(s, v)) {
                    found = Some(Amalgam { d, r, s });
                    break 'search;
                }
            }
        }
        self.cache.borrow_mut().insert((u, v), found);
        found
    }
}

pub fn verify_amalgam(cat: &FiniteCategory, u: MorphId, v: MorphId, am: &Amalgam) -> bool {
    cat.src(am.r) == cat.tgt(u)
        && cat.src(am.s) == cat.tgt(v)
        && cat.tgt(am.r) == am.d
        && cat.tgt(am.s) == am.d
        && cat.compose(am.r, u) == cat.compose(am.s, v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub g: MorphId,
    pub h: MorphId,
    pub amalgam: Amalgam,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowAmalgamReport {
    pub status: Status,
    pub f: MorphId,
    /// One amalgam of `g · f` and `h · f` per pair `(g, h)`.
    pub witnesses: Vec<PairWitness>,
    /// `(g, h)` whose composites with `f` have no amalgam.
    pub failure: Option<(MorphId, MorphId)>,
}

/// Is `f : A → A'` an amalgamation arrow: for all `g : A' → B` and
/// `h : A' → C`, do `g · f` and `h · f` amalgamate?
pub fn is_amalgamation_arrow(cat: &FiniteCategory, f: MorphId) -> ArrowAmalgamReport {
    is_amalgamation_arrow_with(&Amalgamator::new(cat), f, true)
}

fn is_amalgamation_arrow_with(am: &Amalgamator, f: MorphId, keep_witnesses: bool) -> ArrowAmalgamReport {
    let cat = am.cat;
    let a2 = cat.tgt(f);
    let outs: Vec<MorphId> = cat.objects().flat_map(|b| cat.hom(a2, b).iter().copied()).collect();
    let mut witnesses = Vec::new();
    for &g in &outs {
        for &h in &outs {
            let (u, v) = (cat.compose(g, f), cat.compose(h, f));
            match am.amalgamate(u, v) {
                Some(amalgam) => {
                    if keep_witnesses {
                        witnesses.push(PairWitness { g, h, amalgam });
                    }
                }
                None => return ArrowAmalgamReport { status: Status::Fails, f, witnesses: Vec::new(), failure: Some((g, h)) },
            }
        }
    }
    ArrowAmalgamReport { status: Status::Holds, f, witnesses, failure: None }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WapEntry {
    pub a: ObjId,
    pub arrow: Option<MorphId>,
    pub candidates_tried: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WapReport {
    pub status: Status,
    pub entries: Vec<WapEntry>,
}

/// For each `A`, the first amalgamation arrow out of `A` with targets in
/// canonical order. Exhausting all arrows out of `A` gives FAILS;
/// hitting `max_candidates` first gives UNKNOWN-AT-BOUND.
pub fn wap_check(cat: &FiniteCategory, max_candidates: Option<usize>) -> WapReport {
    let am = Amalgamator::new(cat);
    let order = cat.canonical_order();
    let mut entries = Vec::new();
    for &a in &order {
        let mut tried = 0;
        let mut arrow = None;
        let mut cut = false;
        'search: for &a2 in &order {
            for &f in cat.hom(a, a2) {
                if max_candidates.is_some_and(|m| tried >= m) {
                    cut = true;
                    break 'search;
                }
                tried += 1;
                if is_amalgamation_arrow_with(&am, f, false).status == Status::Holds {
                    arrow = Some(f);
                    break 'search;
                }
            }
        }
        let status = match (arrow, cut) {
            (Some(_), _) => Status::Holds,
            (None, true) => Status::Unknown,
            (None, false) => Status::Fails,
        };
        entries.push(WapEntry { a, arrow, candidates_tried: tried, status });
    }
    WapReport { status: Status::all(entries.iter().map(|e| e.status)), entries }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoOfKReport {
    pub status: Status,
    pub a: ObjId,
    pub k: usize,
    /// Number of morphisms out of `A` and of non-amalgamable pairs among them.
    pub morphisms: usize,
    pub non_amalgamable_pairs: usize,
    /// `k` pairwise non-amalgamable morphisms out of `A`.
    pub clique: Option<Vec<MorphId>>,
}

/// Pairwise non-amalgamability among all morphisms out of `A`.
pub fn non_amalgamability_graph(cat: &FiniteCategory, a: ObjId) -> (Vec<MorphId>, Vec<Vec<bool>>) {
    let am = Amalgamator::new(cat);
    let outs: Vec<MorphId> = cat.canonical_order().into_iter().flat_map(|b| cat.hom(a, b).iter().copied()).collect();
    let n = outs.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let bad = am.amalgamate(outs[i], outs[j]).is_none();
            adj[i][j] = bad;
            adj[j][i] = bad;
        }
    }
    (outs, adj)
}

/// Any `k` morphisms out of `A` contain an amalgamable pair exactly when the
/// non-amalgamability graph has no clique of size `k` (equal morphisms always
/// amalgamate).
pub fn two_of_k_check(cat: &FiniteCategory, a: ObjId, k: usize, budget: Budget) -> TwoOfKReport {
    assert!(k >= 2, "k must be at least 2");
    let (outs, adj) = non_amalgamability_graph(cat, a);
    let pairs = adj.iter().map(|row| row.iter().filter(|&&x| x).count()).sum::<usize>() / 2;
    let mut meter = budget.meter();
    let mut clique = Vec::new();
    let candidates: Vec<usize> = (0..outs.len()).collect();
    let found = find_clique(&adj, k, &mut clique, &candidates, &mut meter);
    let status = match found {
        Some(true) => Status::Fails,
        Some(false) => Status::Holds,
        None => Status::Unknown,
    };
    TwoOfKReport {
        status,
        a,
        k,
        morphisms: outs.len(),
        non_amalgamable_pairs: pairs,
        clique: (status == Status::Fails).then(|| clique.iter().map(|&i| outs[i]).collect()),
    }
}

fn find_clique(adj: &[Vec<bool>], k: usize, cur: &mut Vec<usize>, cands: &[usize], meter: &mut crate::verdict::Meter) -> Option<bool> {
    if cur.len() == k {
        return Some(true);
    }
    if cur.len() + cands.len() < k {
        return Some(false);
    }
    for (idx, &v) in cands.iter().enumerate() {
        if !meter.tick() {
            return None;
        }
        let next: Vec<usize> = cands[idx + 1..].iter().copied().filter(|&u| adj[v][u]).collect();
        cur.push(v);
        match find_clique(adj, k, cur, &next, meter) {
            Some(false) => {
                cur.pop();
            }
            other => return other,
        }
    }
    Some(false)
}

pub fn verify_clique(cat: &FiniteCategory, clique: &[MorphId]) -> bool {
    let am = Amalgamator::new(cat);
    clique.iter().enumerate().all(|(i, &u)| clique[i + 1..].iter().all(|&v| u != v && am.amalgamate(u, v).is_none()))
}

/// The data produced by running the proof of Claim 1 on concrete input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim1Transcript {
    pub k: usize,
    pub c: ObjId,
    pub d: ObjId,
    pub f_list: Vec<MorphId>,
    pub g_list: Vec<MorphId>,
    /// `χ(h)` = least `i < k-1` with `h` factoring through `f_i`, else `k-1`.
    pub chi: Coloring,
    /// `x : C → D` on whose copy `χ` shows at most `k-1` colors.
    pub x: MorphId,
    /// The avoided color.
    pub j: usize,
    /// `χ(x · g_j · f_j)`.
    pub i: usize,
    /// `g : B_i → D` with `g · f_i = x · g_j · f_j`.
    pub g: MorphId,
    /// Both sides of the amalgamation equality.
    pub lhs: MorphId,
    pub rhs: MorphId,
}

/// Least `g` in `hom(src(f), D)` with `g · f = h`.
fn factor(cat: &FiniteCategory, h: MorphId, f: MorphId) -> Option<MorphId> {
    let d = cat.tgt(h);
    cat.hom(cat.tgt(f), d).iter().copied().find(|&g| cat.compose(g, f) == h)
}

/// Executes the proof of Claim 1. `f_list[i] : A → B_i` and
/// `g_list[i] : B_i → C`; `D` must arrow `(C)^A_{k,k-1}`.
#[allow(clippy::too_many_arguments)]
pub fn claim1_extract(
    cat: &FiniteCategory,
    a: ObjId,
    k: usize,
    c: ObjId,
    d: ObjId,
    g_list: &[MorphId],
    f_list: &[MorphId],
    opts: ArrowOptions,
) -> Result<Claim1Transcript> {
    assert!(k >= 2, "k must be at least 2");
    if f_list.len() != k || g_list.len() != k {
        return Err(Error::ShapeMismatch);
    }
    for (&f, &g) in f_list.iter().zip(g_list) {
        if cat.src(f) != a || cat.tgt(f) != cat.src(g) || cat.tgt(g) != c {
            return Err(Error::ShapeMismatch);
        }
    }
    let verdict = arrow_check(cat, d, c, a, k, k - 1, opts)?;
    match verdict.status {
        Status::Holds => {}
        Status::Fails => return Err(Error::ArrowDoesNotHold),
        Status::Unknown => {
            let budget = opts.budget.max_nodes.unwrap_or(u64::MAX);
            return Err(Error::BudgetExceeded { needed: verdict.stats.nodes as f64, budget });
        }
    }
    let domain = cat.hom(a, d).to_vec();
    let values: Vec<u32> = domain
        .iter()
        .map(|&h| (0..k - 1).find(|&i| factor(cat, h, f_list[i]).is_some()).unwrap_or(k - 1) as u32)
        .collect();
    let chi = Coloring::new(domain, k, values);
    let copy_colors = |x: MorphId| -> Vec<bool> {
        let mut seen = vec![false; k];
        for &e in cat.hom(a, c) {
            seen[chi.color_of(cat.compose(x, e)).expect("in hom(A, D)") as usize] = true;
        }
        seen
    };
    let (x, seen) = cat
        .hom(c, d)
        .iter()
        .map(|&x| (x, copy_colors(x)))
        .find(|(_, seen)| seen.iter().filter(|&&s| s).count() < k)
        .ok_or(Error::ArrowDoesNotHold)?;
    let j = seen.iter().position(|&s| !s).expect("some color avoided");
    let rhs = cat.compose_all(&[x, g_list[j], f_list[j]]);
    let i = chi.color_of(rhs).expect("in hom(A, D)") as usize;
    let g = factor(cat, rhs, f_list[i])
        .ok_or_else(|| Error::FactorSearchFailed(format!("no g : B_{i} -> D with g·f_{i} = x·g_{j}·f_{j}")))?;
    let lhs = cat.compose(g, f_list[i]);
    Ok(Claim1Transcript { k, c, d, f_list: f_list.to_vec(), g_list: g_list.to_vec(), chi, x, j, i, g, lhs, rhs })
}

/// Replays a transcript: recomputes `χ`, checks the copy at `x`, the
/// avoided color and the final equality.
pub fn verify_claim1(cat: &FiniteCategory, a: ObjId, t: &Claim1Transcript) -> bool {
    let k = t.k;
    if t.f_list.len() != k || t.g_list.len() != k || t.i == t.j || t.i >= k || t.j >= k {
        return false;
    }
    if t.chi.domain != cat.hom(a, t.d) {
        return false;
    }
    let recomputed: Vec<u32> = t
        .chi
        .domain
        .iter()
        .map(|&h| (0..k - 1).find(|&i| factor(cat, h, t.f_list[i]).is_some()).unwrap_or(k - 1) as u32)
        .collect();
    if recomputed != t.chi.values {
        return false;
    }
    let avoided = cat.hom(a, t.c).iter().all(|&e| t.chi.color_of(cat.compose(t.x, e)) != Some(t.j as u32));
    let rhs = cat.compose_all(&[t.x, t.g_list[t.j], t.f_list[t.j]]);
    avoided
        && rhs == t.rhs
        && t.chi.color_of(rhs) == Some(t.i as u32)
        && cat.src(t.g) == cat.tgt(t.f_list[t.i])
        && cat.compose(t.g, t.f_list[t.i]) == t.lhs
        && t.lhs == t.rhs
}

/// Finds `C` receiving every `B_i`, then the first `D` arrowing
/// `(C)^A_{k,k-1}`, and runs [`claim1_extract`].
pub fn claim1_search(cat: &FiniteCategory, a: ObjId, f_list: &[MorphId], opts: ArrowOptions) -> Result<Claim1Transcript> {
    let k = f_list.len();
    let order = cat.canonical_order();
    for &c in &order {
        let g_list: Option<Vec<MorphId>> = f_list.iter().map(|&f| cat.hom(cat.tgt(f), c).first().copied()).collect();
        let Some(g_list) = g_list else { continue };
        for &d in &order {
            if !cat.arrow(c, d) {
                continue;
            }
            if arrow_check(cat, d, c, a, k, k - 1, opts)?.status == Status::Holds {
                return claim1_extract(cat, a, k, c, d, &g_list, f_list, opts);
            }
        }
    }
    Err(Error::ArrowDoesNotHold)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub f: MorphId,
    pub g: MorphId,
    pub h: MorphId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureChain {
    pub depth: usize,
    pub steps: Vec<ChainStep>,
    /// `g_i · f_i`, pairwise non-amalgamable.
    pub chain: Vec<MorphId>,
    /// The arrow `f_i` the iteration stopped at, if it is an amalgamation arrow.
    pub stopped_at_amalgamation_arrow: Option<MorphId>,
}

/// Iterates the proof of Claim 2 from `f_0 = id_A` for at most `depth` steps.
pub fn failure_chain(cat: &FiniteCategory, a: ObjId, depth: usize) -> FailureChain {
    let am = Amalgamator::new(cat);
    let mut f = cat.identity(a);
    let mut steps = Vec::new();
    let mut chain = Vec::new();
    let mut stopped = None;
    for _ in 0..depth {
        let report = is_amalgamation_arrow_with(&am, f, false);
        let Some((g, h)) = report.failure else {
            stopped = Some(f);
            break;
        };
        steps.push(ChainStep { f, g, h });
        chain.push(cat.compose(g, f));
        f = cat.compose(h, f);
    }
    FailureChain { depth, steps, chain, stopped_at_amalgamation_arrow: stopped }
}

/// Distinct morphisms in a chain, for cross-checks.
pub fn chain_is_pairwise_non_amalgamable(cat: &FiniteCategory, chain: &[MorphId]) -> bool {
    let distinct: HashSet<_> = chain.iter().collect();
    distinct.len() == chain.len() && verify_clique(cat, chain)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::category::{AbstractCategoryFile, FiniteCategory};

    /// `u1, u2 : A → B`, `c1, c2 : B → C`, with four distinct composites.
    pub fn forked() -> FiniteCategory {
        let file: AbstractCategoryFile = serde_json::from_str(
            r#"{"objects":["A","B","C"],
                "homs":{"A->A":["1A"],"B->B":["1B"],"C->C":["1C"],
                        "A->B":["u1","u2"],"B->C":["c1","c2"],"A->C":["m11","m12","m21","m22"]},
                "compose":{"c1∘u1":"m11","c1∘u2":"m12","c2∘u1":"m21","c2∘u2":"m22"},
                "identities":{"A":"1A","B":"1B","C":"1C"}}"#,
        )
        .unwrap();
        FiniteCategory::from_abstract(&file).unwrap()
    }
}
