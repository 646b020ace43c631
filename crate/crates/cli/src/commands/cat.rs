use std::collections::BTreeMap;

use anyhow::Result;
use serde_json::json;

use rw_core::catalog;
use rw_core::category::{check_axioms, skeletonize, CancellationCheck, DirectednessCheck, FiniteCategory};
use rw_core::report::{Certificate, MorphRef, Side, Verdict};
use rw_core::Status;

use super::{mref, report};
use crate::args::{Family, GenArgs, Global};
use crate::input::{budget, Input};
use crate::Outcome;

fn cancellation(cat: &FiniteCategory, check: &str, side: Side, c: &CancellationCheck) -> Result<Verdict> {
    let v = Verdict::new(check, Status::from_bool(c.holds));
    Ok(match &c.counterexample {
        Some([f, g, h]) => v.certificate(Certificate::Cancellation { side, f: mref(cat, f)?, g: mref(cat, g)?, h: mref(cat, h)? }),
        None => v.searched("every morphism tested against every pair of parallel morphisms"),
    })
}

fn directedness(check: &str, d: &DirectednessCheck, what: &str) -> Verdict {
    let v = Verdict::new(check, Status::from_bool(d.holds)).detail(json!({ "counterexample": d.counterexample }));
    match &d.counterexample {
        Some([a, b]) => v.searched(format!("no object {what} both {a} and {b}")),
        None => v.searched(format!("every pair of objects has an object {what} both")),
    }
}

pub fn check(input: &Input, g: &Global) -> Result<Outcome> {
    let cat = &input.cat;
    let ax = check_axioms(cat, budget(g));
    let laws = Verdict::new("category laws", ax.laws.status)
        .detail(json!({ "violations": ax.laws.violations }))
        .searched("identity and associativity checked on every composable chain");
    let c1 = cancellation(cat, "C1: every morphism is mono", Side::Mono, &ax.c1_all_mono)?;
    let epi = cancellation(cat, "every morphism is epi", Side::Epi, &ax.all_epi)?;
    let finite = Status::from_bool(ax.c2_objects_form_a_set && ax.c3_hom_sets_finite);
    let c23 = Verdict::new("C2, C3: finitely many objects and finite hom-sets", finite)
        .searched("object list and every hom-set enumerated");
    let c45 = Verdict::new("C4, C5: size and slices", Status::Holds)
        .detail(json!({ "c4": ax.c4, "c5_below": ax.c5_below, "c5_above": ax.c5_above }))
        .searched("the catalog is finite, so every slice is listed");
    let directed = directedness("directed", &ax.directed, "receiving arrows from");
    let dually = directedness("dually directed", &ax.dually_directed, "with arrows into");
    let lf = &ax.local_finiteness;
    let local = Verdict::new("locally finite", lf.status)
        .detail(json!({ "per_object": lf.per_object, "failures": lf.failures }))
        .searched("the factorization condition checked for every pair of arrows out of each object");
    let status = ax.laws.status.and(c1.status).and(finite);
    Ok(report(status, vec![], input.context(BTreeMap::new()), vec![laws, c1, epi, c23, c45, directed, dually, local]))
}

pub fn skeleton(input: &Input) -> Result<Outcome> {
    let cat = &input.cat;
    let skel = skeletonize(cat)?;
    let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in cat.objects() {
        classes.entry(cat.name(skel.rep_of[c]).to_string()).or_default().push(cat.name(c).to_string());
    }
    let mut v = Verdict::new("skeleton", Status::Holds).detail(json!({
        "representatives": skel.representatives.iter().map(|&r| cat.name(r)).collect::<Vec<_>>(),
        "classes": classes,
        "skeletal": skel.is_skeletal(),
    }));
    for c in cat.objects() {
        v = v.certificate(Certificate::Invertible { f: MorphRef::of(cat, skel.eta[c]) });
    }
    v = v.searched("representatives pairwise non-isomorphic by exhaustive isomorphism search");
    Ok(report(Status::Holds, vec![], input.context(BTreeMap::new()), vec![v]))
}

pub fn op(input: &Input) -> Result<Outcome> {
    let table = input.cat.op().to_abstract();
    Ok(Outcome::Data(serde_json::to_string_pretty(&table)? + "\n"))
}

pub fn gen(a: &GenArgs) -> Result<Outcome> {
    let c = match a.family {
        Family::Lo => catalog::linear_orders(a.max),
        Family::Graphs => catalog::graphs(a.max),
    };
    Ok(Outcome::Data(c.to_json() + "\n"))
}
