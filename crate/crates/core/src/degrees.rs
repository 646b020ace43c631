//! Catalog-relative bounds on small Ramsey degrees and essential colorings.
//!
//! Every verdict here quantifies only over the objects of the given
//! category and over `k ≤ k_max`; none of them claims an absolute degree.

use serde::{Deserialize, Serialize};

use crate::arrows::{
    arrow_check, aut_action, find_ramsey_witness, position_index, search_coloring, ArrowOptions, Coloring, ColoringProblem,
    Requirement, SearchOutcome,
};
use crate::category::{FiniteCategory, MorphId, ObjId};
use crate::error::{Error, Result};
use crate::verdict::Status;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperWitness {
    pub b: ObjId,
    pub k: usize,
    pub c: ObjId,
}

/// Why a candidate `n` was rejected: no object arrows `(B)^A_{k,n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperRefutation {
    pub n: usize,
    pub b: ObjId,
    pub k: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeUpper {
    /// HOLDS when `value` is present and every smaller `n` was refuted;
    /// UNKNOWN when the budget interfered; FAILS when no `n` works.
    pub status: Status,
    pub value: Option<usize>,
    pub witnesses: Vec<UpperWitness>,
    pub refuted: Vec<UpperRefutation>,
    pub k_max: usize,
    pub b_max_size: Option<usize>,
}

/// The objects `B` with `A → B`, restricted to `|B| ≤ max_size` when the
/// category is structure-backed.
pub fn extensions(cat: &FiniteCategory, a: ObjId, max_size: Option<usize>) -> Vec<ObjId> {
    cat.canonical_order()
        .into_iter()
        .filter(|&b| cat.arrow(a, b))
        .filter(|&b| match (max_size, cat.structure(b)) {
            (Some(m), Some(s)) => s.size <= m,
            _ => true,
        })
        .collect()
}

/// Least `n` such that every `B` and `k ≤ k_max` has a witness `C` with
/// `C ⟶ (B)^A_{k,n}`.
pub fn degree_upper(cat: &FiniteCategory, a: ObjId, k_max: usize, b_max_size: Option<usize>, opts: ArrowOptions) -> Result<DegreeUpper> {
    let bs = extensions(cat, a, b_max_size);
    let n_max = cat.objects().map(|c| cat.hom(a, c).len()).max().unwrap_or(0).max(1);
    let mut refuted = Vec::new();
    let mut unsure = false;
    for n in 1..=n_max {
        let mut witnesses = Vec::new();
        let mut failed = None;
        'pairs: for &b in &bs {
            for k in 1..=k_max {
                let w = find_ramsey_witness(cat, b, a, k, n, opts)?;
                match w.witness {
                    Some(c) => witnesses.push(UpperWitness { b, k, c }),
                    None => {
                        failed = Some(UpperRefutation { n, b, k, status: w.status });
                        break 'pairs;
                    }
                }
            }
        }
        match failed {
            None => {
                let status = if unsure { Status::Unknown } else { Status::Holds };
                return Ok(DegreeUpper { status, value: Some(n), witnesses, refuted, k_max, b_max_size });
            }
            Some(r) => {
                unsure |= r.status == Status::Unknown;
                refuted.push(r);
            }
        }
    }
    let status = if unsure { Status::Unknown } else { Status::Fails };
    Ok(DegreeUpper { status, value: None, witnesses: Vec::new(), refuted, k_max, b_max_size })
}

/// A bad coloring of `hom(A, C)` for one candidate `C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerCertificate {
    pub c: ObjId,
    pub coloring: Coloring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeLower {
    pub status: Status,
    pub n: usize,
    pub k: usize,
    pub b: Option<ObjId>,
    pub certificates: Vec<LowerCertificate>,
}

/// Looks for `B` such that no object arrows `(B)^A_{k,n-1}`, which puts the
/// degree of `A` at `n` or above relative to the category.
pub fn degree_lower(cat: &FiniteCategory, a: ObjId, k: usize, n: usize, b_max_size: Option<usize>, opts: ArrowOptions) -> Result<DegreeLower> {
    assert!(n >= 2, "lower bounds start at 2");
    let mut unsure = false;
    'candidates: for b in extensions(cat, a, b_max_size) {
        let mut certificates = Vec::new();
        for c in cat.canonical_order() {
            let v = arrow_check(cat, c, b, a, k, n - 1, opts)?;
            match v.status {
                Status::Fails => certificates.push(LowerCertificate { c, coloring: v.bad_coloring.expect("FAILS carries a coloring") }),
                Status::Unknown => {
                    unsure = true;
                    continue 'candidates;
                }
                Status::Holds => continue 'candidates,
            }
        }
        return Ok(DegreeLower { status: Status::Holds, n, k, b: Some(b), certificates });
    }
    let status = if unsure { Status::Unknown } else { Status::Fails };
    Ok(DegreeLower { status, n, k, b: None, certificates: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeInterval {
    pub object: ObjId,
    pub lower: usize,
    pub lower_certificate: Option<DegreeLower>,
    pub upper: DegreeUpper,
    pub k_max: usize,
    pub catalog_size: usize,
}

/// Both bounds. The lower bound is raised while some `k ≤ k_max` supports it.
pub fn degree_interval(cat: &FiniteCategory, a: ObjId, k_max: usize, b_max_size: Option<usize>, opts: ArrowOptions) -> Result<DegreeInterval> {
    let upper = degree_upper(cat, a, k_max, b_max_size, opts)?;
    let ceiling = upper.value.unwrap_or(k_max);
    let mut lower = 1;
    let mut lower_certificate = None;
    'raise: for n in 2..=ceiling {
        for k in n..=k_max {
            let d = degree_lower(cat, a, k, n, b_max_size, opts)?;
            if d.status == Status::Holds {
                lower = n;
                lower_certificate = Some(d);
                continue 'raise;
            }
        }
        break;
    }
    Ok(DegreeInterval { object: a, lower, lower_certificate, upper, k_max, catalog_size: cat.num_objects() })
}

/// Outcome of an essentiality search. A counterexample is a coloring `χ`
/// for which no `w` has `ker λ ⊆ ker χ^(w)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialityVerdict {
    pub status: Status,
    pub counterexample: Option<Coloring>,
}

fn color_classes(values: &[u32]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<u32> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match seen.iter().position(|&s| s == v) {
            Some(j) => classes[j].push(i),
            None => {
                seen.push(v);
                classes.push(vec![i]);
            }
        }
    }
    classes
}

/// `ker λ ⊆ ker χ^(w)` where `χ^(w)(f) = χ(w · f)`.
pub fn kernel_contained(cat: &FiniteCategory, lambda: &Coloring, chi: &Coloring, w: MorphId) -> bool {
    color_classes(&lambda.values).iter().all(|class| {
        let mut cols = class.iter().map(|&i| chi.color_of(cat.compose(w, lambda.domain[i])));
        let first = cols.next().flatten();
        cols.all(|c| c == first)
    })
}

fn essential_unchecked(cat: &FiniteCategory, lambda: &Coloring, a: ObjId, b: ObjId, f: ObjId, k_max: usize, opts: ArrowOptions) -> EssentialityVerdict {
    let index = position_index(cat, a, f);
    let classes = color_classes(&lambda.values);
    let requirements = cat
        .hom(b, f)
        .iter()
        .map(|&w| Requirement {
            groups: classes.iter().map(|cl| cl.iter().map(|&i| index[&cat.compose(w, lambda.domain[i])]).collect()).collect(),
            t: 1,
        })
        .collect();
    let problem = ColoringProblem {
        n: index.len(),
        k: k_max,
        requirements,
        symmetry: if opts.symmetry { aut_action(cat, a, f) } else { Vec::new() },
    };
    match search_coloring(&problem, opts.budget).0 {
        SearchOutcome::Found(values) => EssentialityVerdict {
            status: Status::Fails,
            counterexample: Some(Coloring::new(cat.hom(a, f).to_vec(), k_max, values)),
        },
        SearchOutcome::Exhausted => EssentialityVerdict { status: Status::Holds, counterexample: None },
        SearchOutcome::OutOfBudget => EssentialityVerdict { status: Status::Unknown, counterexample: None },
    }
}

/// Is `λ : hom(A, B) → t` essential at `B` inside `F`, for colorings with at
/// most `k_max` colors? Fewer colors are covered by the `k_max` search.
pub fn essential_at(cat: &FiniteCategory, lambda: &Coloring, f: ObjId, k_max: usize, opts: ArrowOptions) -> Result<EssentialityVerdict> {
    if lambda.colors_used() < 2 {
        return Err(Error::TrivialColoring(lambda.colors_used()));
    }
    let (a, b) = coloring_ends(cat, lambda)?;
    Ok(essential_unchecked(cat, lambda, a, b, f, k_max, opts))
}

fn coloring_ends(cat: &FiniteCategory, lambda: &Coloring) -> Result<(ObjId, ObjId)> {
    let first = *lambda.domain.first().ok_or(Error::ShapeMismatch)?;
    let (a, b) = (cat.src(first), cat.tgt(first));
    if lambda.domain != cat.hom(a, b) {
        return Err(Error::ShapeMismatch);
    }
    Ok((a, b))
}

/// Re-checks a counterexample to essentiality.
pub fn verify_non_essential(cat: &FiniteCategory, lambda: &Coloring, f: ObjId, chi: &Coloring) -> Result<bool> {
    let (a, b) = coloring_ends(cat, lambda)?;
    if chi.domain != cat.hom(a, f) {
        return Ok(false);
    }
    Ok(cat.hom(b, f).iter().all(|&w| !kernel_contained(cat, lambda, chi, w)))
}

/// `γ^(w)(e) = γ(w · e)` on `hom(A, B)`.
pub fn pull_back(cat: &FiniteCategory, gamma: &Coloring, w: MorphId, a: ObjId) -> Result<Coloring> {
    let b = cat.src(w);
    let values = cat
        .hom(a, b)
        .iter()
        .map(|&e| {
            let m = cat.compose(w, e);
            gamma.color_of(m).ok_or(Error::NotInHom(m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Coloring::new(cat.hom(a, b).to_vec(), gamma.k, values))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialEntry {
    pub b: ObjId,
    pub w: MorphId,
    pub verdict: EssentialityVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialReport {
    pub status: Status,
    pub entries: Vec<EssentialEntry>,
}

/// Is `γ : hom(A, F) → t` essential: every pull-back `γ^(w)` along
/// `w ∈ hom(B, F)`, `B` in the category, essential at `B`?
pub fn essential(cat: &FiniteCategory, gamma: &Coloring, k_max: usize, opts: ArrowOptions) -> Result<EssentialReport> {
    if gamma.colors_used() < 2 {
        return Err(Error::TrivialColoring(gamma.colors_used()));
    }
    let (a, f) = coloring_ends(cat, gamma)?;
    essential_inner(cat, gamma, a, f, k_max, opts, false)
}

fn essential_inner(cat: &FiniteCategory, gamma: &Coloring, a: ObjId, f: ObjId, k_max: usize, opts: ArrowOptions, stop_early: bool) -> Result<EssentialReport> {
    let mut entries = Vec::new();
    let mut status = Status::Holds;
    for b in extensions(cat, a, None) {
        for &w in cat.hom(b, f) {
            let lambda = pull_back(cat, gamma, w, a)?;
            let verdict = essential_unchecked(cat, &lambda, a, b, f, k_max, opts);
            status = status.and(verdict.status);
            entries.push(EssentialEntry { b, w, verdict });
            if stop_early && status == Status::Fails {
                return Ok(EssentialReport { status, entries });
            }
        }
    }
    Ok(EssentialReport { status, entries })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnavoidableSearch {
    pub status: Status,
    pub coloring: Option<Coloring>,
    pub candidates_tried: u64,
}

/// The lexicographically first surjective `t`-coloring of `hom(A, F)` that is
/// essential. Essentiality only depends on the kernel, so candidates are
/// enumerated with colors named in order of first use.
pub fn search_unavoidable(cat: &FiniteCategory, a: ObjId, f: ObjId, t: usize, k_max: usize, opts: ArrowOptions) -> Result<UnavoidableSearch> {
    assert!(t >= 2, "t must be at least 2");
    let n = cat.hom(a, f).len();
    let mut tried = 0;
    if t > n {
        return Ok(UnavoidableSearch { status: Status::Fails, coloring: None, candidates_tried: 0 });
    }
    let mut meter = opts.budget.meter();
    let mut values = vec![0u32; n];
    let mut unsure = false;
    // restricted growth strings over t colors, in lexicographic order
    loop {
        let used = values.iter().max().map_or(0, |&m| m as usize + 1);
        if used == t {
            if !meter.tick() {
                return Ok(UnavoidableSearch { status: Status::Unknown, coloring: None, candidates_tried: tried });
            }
            tried += 1;
            let gamma = Coloring::new(cat.hom(a, f).to_vec(), t, values.clone());
            let report = essential_inner(cat, &gamma, a, f, k_max, opts, true)?;
            match report.status {
                Status::Holds => return Ok(UnavoidableSearch { status: Status::Holds, coloring: Some(gamma), candidates_tried: tried }),
                Status::Unknown => unsure = true,
                Status::Fails => {}
            }
        }
        if !next_rgs(&mut values, t) {
            break;
        }
    }
    let status = if unsure { Status::Unknown } else { Status::Fails };
    Ok(UnavoidableSearch { status, coloring: None, candidates_tried: tried })
}

/// Advances to the next restricted growth string with values below `t`.
fn next_rgs(values: &mut [u32], t: usize) -> bool {
    for i in (1..values.len()).rev() {
        let prefix_max = values[..i].iter().copied().max().unwrap_or(0);
        if (values[i] as usize) < t - 1 && values[i] <= prefix_max {
            values[i] += 1;
            values[i + 1..].iter_mut().for_each(|v| *v = 0);
            return true;
        }
    }
    false
}
