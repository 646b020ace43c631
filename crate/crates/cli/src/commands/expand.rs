use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde_json::json;

use rw_core::category::{skeletonize, ObjId};
use rw_core::expansion::{
    check_action_laws, check_forgetful, compare_with_base, designate_age, expansion_property_check, full_fibers, orbit_age_analysis,
    DegreeAssignment, Designation, ExpandedCatalogFile, ExpandedObject, Expander, Fibers,
};
use rw_core::report::{Certificate, MorphRef, Verdict};
use rw_core::Status;

use super::{names, object, objects, report};
use crate::args::{DegreeOpts, ExpandCmd, Global};
use crate::input::{budget, Input};
use crate::Outcome;

fn expander<'a>(input: &'a Input, opts: &DegreeOpts) -> Result<Expander<'a>> {
    let cat = &input.cat;
    let skel = skeletonize(cat)?;
    let named: BTreeMap<String, u32> = if opts.degrees.is_empty() {
        input.expanded.as_ref().map(|f| f.degrees.clone()).unwrap_or_default()
    } else {
        opts.degrees.iter().cloned().collect()
    };
    let degrees = DegreeAssignment::new(cat, &skel, &named)?;
    Ok(Expander::new(cat, skel, degrees))
}

/// Expansions listed in the catalog file, by base object.
fn listed(ex: &Expander, input: &Input) -> Result<BTreeMap<ObjId, Vec<ExpandedObject>>> {
    let mut out: BTreeMap<ObjId, Vec<ExpandedObject>> = BTreeMap::new();
    if let Some(file) = &input.expanded {
        for entry in &file.expansions {
            let x = ex.from_entry(entry)?;
            out.entry(x.base).or_default().push(x);
        }
    }
    for xs in out.values_mut() {
        xs.sort();
        xs.dedup();
    }
    Ok(out)
}

/// `e ∈ hom(A*, B*)` as a certificate, for the first such `e`.
fn morphism_certificate(ex: &Expander, a: &ExpandedObject, b: &ExpandedObject) -> Option<Certificate> {
    ex.expanded_hom(a, b).first().map(|&e| Certificate::ExpansionMorphism {
        a_star: ex.to_entry(a),
        b_star: ex.to_entry(b),
        e: MorphRef::of(ex.cat(), e),
    })
}

pub fn run(input: &Input, g: &Global, cmd: &ExpandCmd) -> Result<Outcome> {
    let cat = &input.cat;
    match cmd {
        ExpandCmd::Build { degrees, objects: objs } => {
            let ex = expander(input, degrees)?;
            let mut all = Vec::new();
            for c in objects(cat, objs)? {
                all.extend(ex.enumerate(c, degrees.max_fiber)?);
            }
            let file = ExpandedCatalogFile::new(input.catalog()?, &ex, &all);
            Ok(Outcome::Data(serde_json::to_string_pretty(&file)? + "\n"))
        }
        ExpandCmd::Check { degrees } => {
            let ex = expander(input, degrees)?;
            let ctx = input.context(ex.degrees().to_names(cat));
            let listed = listed(&ex, input)?;
            let mut fibers: Fibers = full_fibers(&ex, degrees.max_fiber)?;
            for (&c, xs) in &listed {
                fibers[c] = xs.clone();
            }
            let r = check_forgetful(&ex, &fibers, budget(g))?;
            let empty = names(cat, &r.empty_fibers);
            let surj = Verdict::new("U is surjective on objects", r.surjective)
                .detail(json!({ "empty_fibers": empty }))
                .searched("every fiber listed");
            let inj = Verdict::new("U is injective on hom-sets", r.injective_on_homs)
                .searched("morphisms of expansions are represented by their underlying morphisms");
            let mut reasonable = Verdict::new("U is reasonable", r.reasonable).detail(json!({
                "checked": r.reasonable_checked,
                "failure": r.reasonable_failure.as_ref().map(|f| json!({
                    "e": cat.morphism_name(f.e),
                    "a_star": ex.to_entry(&f.a_star),
                })),
            }));
            for w in &r.reasonable_samples {
                reasonable = reasonable.certificate(Certificate::ExpansionMorphism {
                    a_star: ex.to_entry(&w.a_star),
                    b_star: ex.to_entry(&w.b_star),
                    e: MorphRef::of(cat, w.e),
                });
            }
            reasonable = reasonable.searched("every (e, A*) with e out of the base of A* tested");
            let unique = Verdict::new("restrictions are unique", r.unique_restrictions)
                .detail(json!({
                    "checked": r.restrictions_checked,
                    "failure": r.restriction_failure.as_ref().map(|f| json!({
                        "e": cat.morphism_name(f.e),
                        "b_star": ex.to_entry(&f.b_star),
                        "matches": f.matches,
                    })),
                }))
                .searched("every (e, B*) tested against the fiber of the source of e");
            let counts: Vec<_> = r
                .fiber_counts
                .iter()
                .map(|f| json!({ "object": cat.name(f.object), "count": f.count, "formula": f.formula }))
                .collect();
            let precompact = Verdict::new("U is precompact", r.precompact)
                .detail(json!({ "fiber_counts": counts, "full": r.full }))
                .searched("fiber sizes compared with the product of degree powers");
            let mut verdicts = vec![surj, inj, reasonable, unique, precompact];
            let mut status = r.status;
            if ex.degrees().reps().iter().all(|&rep| ex.degrees().degree_of(rep) == Some(1)) {
                let b = compare_with_base(&ex, &fibers);
                status = status.and(b.status);
                verdicts.push(
                    Verdict::new("expansion category agrees with the base", b.status)
                        .detail(json!({
                            "pairs_checked": b.pairs_checked,
                            "object_mismatches": b.object_mismatches.iter().map(|(o, n)| json!([cat.name(*o), n])).collect::<Vec<_>>(),
                            "pair_mismatches": b.pair_mismatches.iter().map(|(c, d, x, y)| json!([cat.name(*c), cat.name(*d), x, y])).collect::<Vec<_>>(),
                        }))
                        .searched("fiber sizes and hom-set sizes compared for every pair of objects"),
                );
            }
            Ok(report(status, vec![("max_fiber", json!(degrees.max_fiber))], ctx, verdicts))
        }
        ExpandCmd::Orbits { degrees, f } => {
            let ex = expander(input, degrees)?;
            let ctx = input.context(ex.degrees().to_names(cat));
            let f = object(cat, f)?;
            let all = ex.enumerate(f, degrees.max_fiber)?;
            let laws = check_action_laws(&ex, f, &all)?;
            let o = orbit_age_analysis(&ex, f, degrees.max_fiber)?;
            let law_v = Verdict::new("right-action laws", laws.status)
                .detail(json!({
                    "expansions": laws.expansions,
                    "automorphisms": laws.automorphisms,
                    "violation": laws.violation,
                }))
                .searched("every expansion of the base against every pair of automorphisms");
            let orbits: Vec<_> = o
                .orbits
                .iter()
                .map(|e| json!({ "representative": ex.to_entry(&e.representative), "size": e.size, "age": e.age.len() }))
                .collect();
            let inv = Verdict::new("orbit-age invariance", o.invariance)
                .detail(json!({
                    "expansions": o.expansions,
                    "automorphisms": o.automorphisms,
                    "orbits": orbits,
                    "violation": o.invariance_violation.as_ref().map(|(x, g)| json!([ex.to_entry(x), cat.morphism_name(*g)])),
                }))
                .searched("ages of all members of every orbit compared");
            let mut sel = Verdict::new("minimal-age selection", Status::from_bool(o.selected.is_some())).detail(json!({
                "selected": o.selected.as_ref().map(|x| ex.to_entry(x)),
                "minimal_ages": o.minimal_ages.len(),
                "caveat": o.caveat,
            }));
            if let Some(x) = &o.selected {
                for member in ex.age(x) {
                    if let Some(c) = age_certificate(&ex, &member, x) {
                        sel = sel.certificate(c);
                    }
                }
            }
            sel = sel.searched("ages of every expansion of the base compared by inclusion");
            let status = law_v.status.and(inv.status).and(sel.status);
            Ok(report(status, vec![("base", json!(cat.name(f))), ("max_fiber", json!(degrees.max_fiber))], ctx, vec![law_v, inv, sel]))
        }
        ExpandCmd::Ep { degrees, f, max_size } => {
            let ex = expander(input, degrees)?;
            let ctx = input.context(ex.degrees().to_names(cat));
            let designated: Designation = match f {
                Some(f) => {
                    let fo = object(cat, f)?;
                    let o = orbit_age_analysis(&ex, fo, degrees.max_fiber)?;
                    let Some(sel) = o.selected else { bail!("{f} has no expansions") };
                    designate_age(&ex, &sel)
                }
                None => {
                    let l = listed(&ex, input)?;
                    if l.is_empty() {
                        bail!("no expansions listed in the catalog; pass --F");
                    }
                    l
                }
            };
            let r = expansion_property_check(&ex, &designated, *max_size, budget(g))?;
            let mut direct = Verdict::new("expansion property", r.status).detail(json!({
                "entries": r.direct.iter().map(|e| json!({
                    "a": cat.name(e.a),
                    "status": e.status,
                    "witness": e.witness.map(|b| cat.name(b)),
                    "tried": names(cat, &e.tried),
                    "skipped": names(cat, &e.skipped),
                })).collect::<Vec<_>>(),
            }));
            for e in &r.direct {
                if let Some(b) = e.witness {
                    for x in designated.get(&e.a).into_iter().flatten() {
                        for y in designated.get(&b).into_iter().flatten() {
                            if let Some(c) = morphism_certificate(&ex, x, y) {
                                direct = direct.certificate(c);
                            }
                        }
                    }
                }
            }
            direct = direct.searched("every candidate B tested against every pair of designated expansions");
            let mut single = Verdict::new("single-object criterion", r.single_object_status).detail(json!({
                "entries": r.single_object.iter().map(|e| json!({
                    "d_star": ex.to_entry(&e.d_star),
                    "status": e.status,
                    "witness": e.witness.map(|b| cat.name(b)),
                })).collect::<Vec<_>>(),
            }));
            for e in &r.single_object {
                if let Some(b) = e.witness {
                    for y in designated.get(&b).into_iter().flatten() {
                        if let Some(c) = morphism_certificate(&ex, &e.d_star, y) {
                            single = single.certificate(c);
                        }
                    }
                }
            }
            single = single.searched("every candidate B tested against every designated expansion");
            let agree = Verdict::new("criteria agree", Status::from_bool(!r.disagreement))
                .detail(json!({ "direct": r.status, "single_object": r.single_object_status }))
                .searched("both criteria evaluated on the same designation");
            let config = vec![
                ("designated", json!(designated.values().map(Vec::len).sum::<usize>())),
                ("max_size", json!(max_size)),
            ];
            Ok(report(r.status, config, ctx, vec![direct, single, agree]))
        }
    }
}

/// `e` with `F*` restricted along `e` equal to the age member.
fn age_certificate(ex: &Expander, member: &ExpandedObject, fstar: &ExpandedObject) -> Option<Certificate> {
    let cat = ex.cat();
    cat.hom(member.base, fstar.base).iter().find(|&&e| ex.restriction(fstar, e).ok().as_ref() == Some(member)).map(|&e| {
        Certificate::ExpansionMorphism { a_star: ex.to_entry(member), b_star: ex.to_entry(fstar), e: MorphRef::of(cat, e) }
    })
}
