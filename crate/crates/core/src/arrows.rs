//! The arrow relation `C ⟶ (B)^A_{k,t}`.
//!
//! Deciding the relation means looking for a bad coloring: a k-coloring of
//! `hom(A, C)` under which every copy `w · hom(A, B)` sees more than `t`
//! colors. The relation holds exactly when the search space is exhausted.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, MorphId, ObjId};
use crate::error::{Error, Result};
use crate::verdict::{Budget, Meter, Status};

/// A requirement is met when at least one of its groups of positions sees
/// more than `t` distinct colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub groups: Vec<Vec<usize>>,
    pub t: usize,
}

/// A constraint system over colorings of `n` positions with `k` colors.
///
/// `symmetry` lists permutations of positions that map the requirement set
/// onto itself; the search keeps one coloring per orbit of the group they
/// generate together with all permutations of the colors. The list must be
/// closed under composition (a whole group, not just generators).
#[derive(Debug, Clone)]
pub struct ColoringProblem {
    pub n: usize,
    pub k: usize,
    pub requirements: Vec<Requirement>,
    pub symmetry: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub constraint_prunes: u64,
    pub symmetry_prunes: u64,
    pub group_order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A coloring meeting every requirement, in color-normal form.
    Found(Vec<u32>),
    Exhausted,
    OutOfBudget,
}

struct Group {
    counts: Vec<u32>,
    distinct: usize,
    unassigned: usize,
    t: usize,
    requirement: usize,
}

struct Search<'a> {
    k: usize,
    symmetry: &'a [Vec<usize>],
    groups: Vec<Group>,
    groups_at: Vec<Vec<usize>>,
    alive: Vec<usize>,
    colors: Vec<u32>,
    stats: SearchStats,
    meter: Meter,
    collected: Option<Vec<Vec<u32>>>,
}

impl Search<'_> {
    fn group_alive(&self, g: &Group) -> bool {
        self.k.min(g.distinct + g.unassigned) > g.t
    }

    /// Assigns `color` to the next position; returns false if some
    /// requirement can no longer be met. Always undo with `unassign`.
    fn assign(&mut self, pos: usize, color: u32) -> bool {
        self.colors.push(color);
        let mut ok = true;
        for i in 0..self.groups_at[pos].len() {
            let gi = self.groups_at[pos][i];
            let before = self.group_alive(&self.groups[gi]);
            let g = &mut self.groups[gi];
            g.unassigned -= 1;
            g.counts[color as usize] += 1;
            if g.counts[color as usize] == 1 {
                g.distinct += 1;
            }
            if before && !self.group_alive(&self.groups[gi]) {
                let r = self.groups[gi].requirement;
                self.alive[r] -= 1;
                if self.alive[r] == 0 {
                    ok = false;
                }
            }
        }
        ok
    }

    fn unassign(&mut self, pos: usize) {
        let color = self.colors.pop().expect("assigned") as usize;
        for i in 0..self.groups_at[pos].len() {
            let gi = self.groups_at[pos][i];
            let before = self.group_alive(&self.groups[gi]);
            let g = &mut self.groups[gi];
            g.unassigned += 1;
            g.counts[color] -= 1;
            if g.counts[color] == 0 {
                g.distinct -= 1;
            }
            if !before && self.group_alive(&self.groups[gi]) {
                self.alive[self.groups[gi].requirement] += 1;
            }
        }
    }

    /// False if some symmetric image of the current prefix, after renaming
    /// colors by first occurrence, is already lexicographically smaller.
    fn is_lex_leader(&mut self) -> bool {
        let len = self.colors.len();
        let mut rename = vec![u32::MAX; self.k];
        'perm: for perm in self.symmetry {
            rename.iter_mut().for_each(|r| *r = u32::MAX);
            let mut next = 0;
            for (i, &j) in perm.iter().enumerate().take(len) {
                if j >= len {
                    continue 'perm;
                }
                let c = self.colors[j] as usize;
                if rename[c] == u32::MAX {
                    rename[c] = next;
                    next += 1;
                }
                match rename[c].cmp(&self.colors[i]) {
                    std::cmp::Ordering::Less => {
                        self.stats.symmetry_prunes += 1;
                        return false;
                    }
                    std::cmp::Ordering::Greater => continue 'perm,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        true
    }

    fn dfs(&mut self, pos: usize, max_used: i64, n: usize) -> SearchOutcome {
        if !self.meter.tick() {
            return SearchOutcome::OutOfBudget;
        }
        self.stats.nodes += 1;
        if pos == n {
            if let Some(all) = self.collected.as_mut() {
                all.push(self.colors.clone());
                return SearchOutcome::Exhausted;
            }
            return SearchOutcome::Found(self.colors.clone());
        }
        let top = ((max_used + 1) as usize).min(self.k - 1);
        for c in 0..=top {
            if self.assign(pos, c as u32) {
                if self.is_lex_leader() {
                    match self.dfs(pos + 1, max_used.max(c as i64), n) {
                        SearchOutcome::Exhausted => {}
                        other => {
                            self.unassign(pos);
                            return other;
                        }
                    }
                }
            } else {
                self.stats.constraint_prunes += 1;
            }
            self.unassign(pos);
        }
        SearchOutcome::Exhausted
    }
}

/// Depth-first search for a coloring meeting every requirement.
pub fn search_coloring(problem: &ColoringProblem, budget: Budget) -> (SearchOutcome, SearchStats) {
    let (outcome, stats, _) = run(problem, budget, false);
    (outcome, stats)
}

/// Every solution in normal form, one per orbit, in lexicographic order.
/// `None` if the budget ran out.
pub fn all_colorings(problem: &ColoringProblem, budget: Budget) -> Option<Vec<Vec<u32>>> {
    match run(problem, budget, true) {
        (SearchOutcome::OutOfBudget, _, _) => None,
        (_, _, all) => Some(all),
    }
}

fn run(problem: &ColoringProblem, budget: Budget, collect: bool) -> (SearchOutcome, SearchStats, Vec<Vec<u32>>) {
    assert!(problem.k >= 1, "at least one color");
    let mut groups = Vec::new();
    let mut groups_at = vec![Vec::new(); problem.n];
    let mut alive = vec![0; problem.requirements.len()];
    for (r, req) in problem.requirements.iter().enumerate() {
        for positions in &req.groups {
            let mut ps = positions.clone();
            ps.sort_unstable();
            ps.dedup();
            let gi = groups.len();
            for &p in &ps {
                groups_at[p].push(gi);
            }
            groups.push(Group { counts: vec![0; problem.k], distinct: 0, unassigned: ps.len(), t: req.t, requirement: r });
        }
    }
    let symmetry: Vec<Vec<usize>> =
        problem.symmetry.iter().filter(|p| p.iter().enumerate().any(|(i, &j)| i != j)).cloned().collect();
    let mut s = Search {
        k: problem.k,
        symmetry: &symmetry,
        groups,
        groups_at,
        alive: Vec::new(),
        colors: Vec::with_capacity(problem.n),
        stats: SearchStats { group_order: symmetry.len() + 1, ..Default::default() },
        meter: budget.meter(),
        collected: collect.then(Vec::new),
    };
    for g in &s.groups {
        if s.group_alive(g) {
            alive[g.requirement] += 1;
        }
    }
    s.alive = alive;
    if s.alive.contains(&0) {
        s.stats.constraint_prunes += 1;
        return (SearchOutcome::Exhausted, s.stats, Vec::new());
    }
    let outcome = s.dfs(0, -1, problem.n);
    (outcome, s.stats, s.collected.unwrap_or_default())
}

/// A total map from an ordered list of morphisms to `{0, .., k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    pub domain: Vec<MorphId>,
    pub k: usize,
    pub values: Vec<u32>,
}

impl Coloring {
    pub fn new(domain: Vec<MorphId>, k: usize, values: Vec<u32>) -> Self {
        assert_eq!(domain.len(), values.len(), "coloring must be total");
        assert!(values.iter().all(|&v| (v as usize) < k), "color out of range");
        Coloring { domain, k, values }
    }

    pub fn color_of(&self, f: MorphId) -> Option<u32> {
        self.domain.iter().position(|&m| m == f).map(|i| self.values[i])
    }

    pub fn colors_used(&self) -> usize {
        let mut v = self.values.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// Pairs `(i, j)` with equal colors, as a canonical kernel description.
    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.values[i] == self.values[j]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowVerdict {
    pub status: Status,
    pub bad_coloring: Option<Coloring>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrowOptions {
    pub budget: Budget,
    pub symmetry: bool,
}

impl Default for ArrowOptions {
    fn default() -> Self {
        ArrowOptions { budget: Budget::default(), symmetry: true }
    }
}

/// The data of one arrow instance: positions are `hom(A, C)` in order and
/// each copy lists the positions of `w · hom(A, B)`.
#[derive(Debug, Clone)]
pub struct ArrowInstance {
    pub domain: Vec<MorphId>,
    pub copies: Vec<Vec<usize>>,
    pub copy_morphisms: Vec<MorphId>,
}

pub fn position_index(cat: &FiniteCategory, a: ObjId, c: ObjId) -> HashMap<MorphId, usize> {
    cat.hom(a, c).iter().enumerate().map(|(i, &m)| (m, i)).collect()
}

pub fn arrow_instance(cat: &FiniteCategory, c: ObjId, b: ObjId, a: ObjId) -> Result<ArrowInstance> {
    if cat.hom(a, b).is_empty() {
        return Err(Error::EmptyHom { a, b });
    }
    let index = position_index(cat, a, c);
    let copies = cat
        .hom(b, c)
        .iter()
        .map(|&w| cat.hom(a, b).iter().map(|&f| index[&cat.compose(w, f)]).collect())
        .collect();
    Ok(ArrowInstance { domain: cat.hom(a, c).to_vec(), copies, copy_morphisms: cat.hom(b, c).to_vec() })
}

/// Permutations of `hom(A, C)` induced by post-composition with `Aut(C)`.
pub fn aut_action(cat: &FiniteCategory, a: ObjId, c: ObjId) -> Vec<Vec<usize>> {
    let index = position_index(cat, a, c);
    cat.automorphisms(c)
        .into_iter()
        .map(|g| cat.hom(a, c).iter().map(|&m| index[&cat.compose(g, m)]).collect())
        .collect()
}

pub fn arrow_check(cat: &FiniteCategory, c: ObjId, b: ObjId, a: ObjId, k: usize, t: usize, opts: ArrowOptions) -> Result<ArrowVerdict> {
    assert!(k >= 1 && t >= 1, "k and t must be positive");
    let inst = arrow_instance(cat, c, b, a)?;
    let problem = ColoringProblem {
        n: inst.domain.len(),
        k,
        requirements: inst.copies.iter().map(|p| Requirement { groups: vec![p.clone()], t }).collect(),
        symmetry: if opts.symmetry { aut_action(cat, a, c) } else { Vec::new() },
    };
    let (outcome, stats) = search_coloring(&problem, opts.budget);
    Ok(match outcome {
        SearchOutcome::Found(values) => {
            ArrowVerdict { status: Status::Fails, bad_coloring: Some(Coloring::new(inst.domain, k, values)), stats }
        }
        SearchOutcome::Exhausted => ArrowVerdict { status: Status::Holds, bad_coloring: None, stats },
        SearchOutcome::OutOfBudget => ArrowVerdict { status: Status::Unknown, bad_coloring: None, stats },
    })
}

/// Number of colors `χ` shows on the copy `w · hom(A, B)`.
pub fn colors_on_copy(cat: &FiniteCategory, chi: &Coloring, w: MorphId, a: ObjId) -> Result<usize> {
    let b = cat.src(w);
    let mut seen = Vec::new();
    for &f in cat.hom(a, b) {
        let m = cat.compose(w, f);
        let col = chi.color_of(m).ok_or(Error::NotInHom(m))?;
        if !seen.contains(&col) {
            seen.push(col);
        }
    }
    Ok(seen.len())
}

/// Re-checks a claimed bad coloring against every `w ∈ hom(B, C)`.
pub fn verify_bad_coloring(cat: &FiniteCategory, c: ObjId, b: ObjId, a: ObjId, t: usize, chi: &Coloring) -> Result<bool> {
    if chi.domain != cat.hom(a, c) || chi.values.iter().any(|&v| v as usize >= chi.k) {
        return Ok(false);
    }
    for &w in cat.hom(b, c) {
        if colors_on_copy(cat, chi, w, a)? <= t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides the relation by enumerating all `k^|hom(A,C)|` colorings.
pub fn oracle_arrow_check(cat: &FiniteCategory, c: ObjId, b: ObjId, a: ObjId, k: usize, t: usize, budget: u64) -> Result<ArrowVerdict> {
    if cat.hom(a, b).is_empty() {
        return Err(Error::EmptyHom { a, b });
    }
    let n = cat.hom(a, c).len();
    let needed = (k as f64).powi(n as i32);
    if needed > budget as f64 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let copies: Vec<Vec<usize>> = cat
        .hom(b, c)
        .iter()
        .map(|&w| {
            cat.hom(a, b)
                .iter()
                .map(|&f| {
                    let m = cat.compose(w, f);
                    cat.hom(a, c).iter().position(|&x| x == m).expect("composite lies in hom(A, C)")
                })
                .collect()
        })
        .collect();
    let mut values = vec![0u32; n];
    let mut nodes = 0;
    loop {
        nodes += 1;
        let bad = copies.iter().all(|copy| {
            let mut seen = vec![false; k];
            copy.iter().for_each(|&p| seen[values[p] as usize] = true);
            seen.iter().filter(|&&s| s).count() > t
        });
        if bad {
            return Ok(ArrowVerdict {
                status: Status::Fails,
                bad_coloring: Some(Coloring::new(cat.hom(a, c).to_vec(), k, values)),
                stats: SearchStats { nodes, ..Default::default() },
            });
        }
        let mut i = 0;
        while i < n && values[i] as usize == k - 1 {
            values[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        values[i] += 1;
    }
    Ok(ArrowVerdict { status: Status::Holds, bad_coloring: None, stats: SearchStats { nodes, ..Default::default() } })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub status: Status,
    pub witness: Option<ObjId>,
    /// Per candidate in canonical order.
    pub tried: Vec<(ObjId, Status)>,
}

/// The first object in canonical order that arrows `(B)^A_{k,t}`.
pub fn find_ramsey_witness(cat: &FiniteCategory, b: ObjId, a: ObjId, k: usize, t: usize, opts: ArrowOptions) -> Result<WitnessSearch> {
    let mut tried = Vec::new();
    let mut unknown = false;
    for c in cat.canonical_order() {
        let v = arrow_check(cat, c, b, a, k, t, opts)?;
        tried.push((c, v.status));
        match v.status {
            Status::Holds => return Ok(WitnessSearch { status: Status::Holds, witness: Some(c), tried }),
            Status::Unknown => unknown = true,
            Status::Fails => {}
        }
    }
    let status = if unknown { Status::Unknown } else { Status::Fails };
    Ok(WitnessSearch { status, witness: None, tried })
}

/// DIMACS encoding whose models are exactly the bad colorings.
///
/// Variable `p·k + c + 1` says position `p` has color `c`; variable
/// `N·k + w·k + c + 1` says copy `w` shows color `c`.
pub fn export_cnf(cat: &FiniteCategory, c: ObjId, b: ObjId, a: ObjId, k: usize, t: usize) -> Result<String> {
    let inst = arrow_instance(cat, c, b, a)?;
    Ok(cnf_text(inst.domain.len(), k, t, &inst.copies))
}

pub fn cnf_text(n: usize, k: usize, t: usize, copies: &[Vec<usize>]) -> String {
    let x = |p: usize, c: usize| (p * k + c + 1) as i64;
    let y = |w: usize, c: usize| (n * k + w * k + c + 1) as i64;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    for p in 0..n {
        clauses.push((0..k).map(|c| x(p, c)).collect());
        for c1 in 0..k {
            for c2 in c1 + 1..k {
                clauses.push(vec![-x(p, c1), -x(p, c2)]);
            }
        }
    }
    for (w, copy) in copies.iter().enumerate() {
        for c in 0..k {
            let mut cl = vec![-y(w, c)];
            cl.extend(copy.iter().map(|&p| x(p, c)));
            clauses.push(cl);
        }
        if t >= k {
            clauses.push(Vec::new());
            continue;
        }
        // at least t+1 of the y_{w,c}: every (k-t)-subset contains a true one
        for subset in subsets(k, k - t) {
            clauses.push(subset.into_iter().map(|c| y(w, c)).collect());
        }
    }
    let vars = n * k + copies.len() * k;
    let mut out = format!("c bad colorings: {n} positions, {k} colors, {} copies, t = {t}\n", copies.len());
    out.push_str(&format!("p cnf {vars} {}\n", clauses.len()));
    for cl in clauses {
        for lit in cl {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{graphs, linear_orders};

    fn lo(max: usize) -> FiniteCategory {
        FiniteCategory::from_catalog(&linear_orders(max)).unwrap()
    }

    fn obj(c: &FiniteCategory, name: &str) -> ObjId {
        c.find_object(name).unwrap()
    }

    #[test]
    fn r33_is_six() {
        let c = lo(6);
        let (l2, l3, l5, l6) = (obj(&c, "LO2"), obj(&c, "LO3"), obj(&c, "LO5"), obj(&c, "LO6"));
        let v = arrow_check(&c, l6, l3, l2, 2, 1, ArrowOptions::default()).unwrap();
        assert_eq!(v.status, Status::Holds);
        let v = arrow_check(&c, l5, l3, l2, 2, 1, ArrowOptions::default()).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert!(verify_bad_coloring(&c, l5, l3, l2, 1, v.bad_coloring.as_ref().unwrap()).unwrap());
        assert_eq!(oracle_arrow_check(&c, l6, l3, l2, 2, 1, 1 << 20).unwrap().status, Status::Holds);
        assert_eq!(oracle_arrow_check(&c, l5, l3, l2, 2, 1, 1 << 20).unwrap().status, Status::Fails);
    }

    #[test]
    fn one_color_always_holds() {
        let c = lo(4);
        for k_t in [(1, 1)] {
            let v = arrow_check(&c, 3, 2, 1, k_t.0, k_t.1, ArrowOptions::default()).unwrap();
            assert_eq!(v.status, Status::Holds);
        }
        assert_eq!(oracle_arrow_check(&c, 3, 2, 1, 3, 3, 1 << 20).unwrap().status, Status::Holds);
    }

    #[test]
    fn empty_hom_is_flagged() {
        let c = lo(3);
        assert!(matches!(arrow_check(&c, 2, 0, 1, 2, 1, ArrowOptions::default()), Err(Error::EmptyHom { .. })));
    }

    #[test]
    fn oracle_budget() {
        let c = lo(7);
        assert!(matches!(oracle_arrow_check(&c, 6, 2, 1, 2, 1, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn tiny_budget_gives_unknown() {
        let c = lo(6);
        let opts = ArrowOptions { budget: Budget::nodes(10), symmetry: true };
        assert_eq!(arrow_check(&c, 5, 2, 1, 2, 1, opts).unwrap().status, Status::Unknown);
    }

    #[test]
    fn ramsey_witness_in_order() {
        let c = lo(7);
        let w = find_ramsey_witness(&c, 2, 1, 2, 1, ArrowOptions::default()).unwrap();
        assert_eq!(w.witness.map(|x| c.name(x).to_string()), Some("LO6".to_string()));
        let w = find_ramsey_witness(&c, 2, 2, 3, 3, ArrowOptions::default()).unwrap();
        assert_eq!(w.witness, Some(2));
    }

    #[test]
    fn symmetry_matches_plain_search_on_graphs() {
        let c = FiniteCategory::from_catalog(&graphs(4)).unwrap();
        let p3 = obj(&c, "P3");
        let k2 = obj(&c, "K2");
        for target in c.objects().filter(|&x| c.structure(x).unwrap().size == 4) {
            for (b, a) in [(p3, k2), (k2, k2), (p3, p3)] {
                let on = arrow_check(&c, target, b, a, 2, 1, ArrowOptions::default()).unwrap();
                let off = arrow_check(&c, target, b, a, 2, 1, ArrowOptions { symmetry: false, ..Default::default() }).unwrap();
                let oracle = oracle_arrow_check(&c, target, b, a, 2, 1, 1 << 24).unwrap();
                assert_eq!(on.status, off.status);
                assert_eq!(on.status, oracle.status, "{}", c.name(target));
            }
        }
    }

    #[test]
    fn one_solution_per_orbit() {
        let rot = |n: usize, s: usize| (0..n).map(|i| (i + s) % n).collect::<Vec<_>>();
        for (n, k) in [(4, 2), (5, 3), (6, 2), (6, 3)] {
            let problem = ColoringProblem {
                n,
                k,
                requirements: vec![Requirement { groups: vec![(0..n).collect()], t: 1 }],
                symmetry: (0..n).map(|s| rot(n, s)).collect(),
            };
            let found = all_colorings(&problem, Budget::unlimited()).unwrap();
            let mut expected = Vec::new();
            for code in 0..(k as u64).pow(n as u32) {
                let v: Vec<u32> = (0..n).map(|i| ((code / (k as u64).pow(i as u32)) % k as u64) as u32).collect();
                let mut sorted = v.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() > 1 && is_orbit_min(&v, &problem) {
                    expected.push(v);
                }
            }
            expected.sort();
            assert_eq!(found, expected, "n={n} k={k}");
        }
    }

    fn normalize(v: &[u32]) -> Vec<u32> {
        let mut map = HashMap::new();
        v.iter()
            .map(|&c| {
                let next = map.len() as u32;
                *map.entry(c).or_insert(next)
            })
            .collect()
    }

    fn is_orbit_min(v: &[u32], p: &ColoringProblem) -> bool {
        let nv = normalize(v);
        nv == v && p.symmetry.iter().all(|perm| normalize(&perm.iter().map(|&j| v[j]).collect::<Vec<_>>()) >= nv)
    }

    #[test]
    fn orbit_minimum_is_what_search_returns_first() {
        let rot = |s: usize| (0..5).map(|i| (i + s) % 5).collect::<Vec<_>>();
        let problem = ColoringProblem {
            n: 5,
            k: 3,
            requirements: vec![Requirement { groups: vec![vec![0, 1, 2, 3, 4]], t: 2 }],
            symmetry: (0..5).map(rot).collect(),
        };
        let SearchOutcome::Found(v) = search_coloring(&problem, Budget::unlimited()).0 else { panic!() };
        assert!(is_orbit_min(&v, &problem));
        assert_eq!(v, vec![0, 0, 0, 1, 2]);
    }

    /// A small DPLL solver, independent of the search engine.
    fn dpll(clauses: &[Vec<i64>], vars: usize) -> bool {
        fn solve(clauses: &[Vec<i64>], assign: &mut Vec<i8>) -> bool {
            loop {
                let mut changed = false;
                for cl in clauses {
                    let mut unassigned = None;
                    let mut count = 0;
                    let mut sat = false;
                    for &l in cl {
                        let v = assign[l.unsigned_abs() as usize];
                        if v == 0 {
                            count += 1;
                            unassigned = Some(l);
                        } else if (v > 0) == (l > 0) {
                            sat = true;
                            break;
                        }
                    }
                    if sat {
                        continue;
                    }
                    if count == 0 {
                        return false;
                    }
                    if count == 1 {
                        let l = unassigned.unwrap();
                        assign[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let Some(v) = (1..assign.len()).find(|&v| assign[v] == 0) else { return true };
            for val in [1, -1] {
                let mut next = assign.clone();
                next[v] = val;
                if solve(clauses, &mut next) {
                    return true;
                }
            }
            false
        }
        solve(clauses, &mut vec![0; vars + 1])
    }

    fn parse_dimacs(text: &str) -> (usize, Vec<Vec<i64>>) {
        let mut vars = 0;
        let mut declared = 0;
        let mut clauses = Vec::new();
        for line in text.lines() {
            if line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p cnf ") {
                let nums: Vec<usize> = rest.split_whitespace().map(|x| x.parse().unwrap()).collect();
                vars = nums[0];
                declared = nums[1];
                continue;
            }
            let lits: Vec<i64> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
            assert_eq!(lits.last(), Some(&0));
            clauses.push(lits[..lits.len() - 1].to_vec());
        }
        assert_eq!(declared, clauses.len());
        (vars, clauses)
    }

    #[test]
    fn cnf_agrees_with_search() {
        let c = lo(6);
        for (target, k, t, sat) in [(4, 2, 1, true), (5, 2, 1, false), (3, 1, 1, false), (4, 3, 3, false)] {
            let text = export_cnf(&c, target, 2, 1, k, t).unwrap();
            let (vars, clauses) = parse_dimacs(&text);
            assert_eq!(dpll(&clauses, vars), sat, "LO{} k={k} t={t}", target + 1);
        }
    }
}
