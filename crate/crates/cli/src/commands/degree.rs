use std::collections::BTreeMap;

use anyhow::Result;
use serde_json::json;

use rw_core::arrows::{arrow_check, ArrowOptions};
use rw_core::category::{FiniteCategory, ObjId};
use rw_core::degrees::{degree_interval, degree_lower, DegreeLower, UpperRefutation};
use rw_core::report::{Certificate, Verdict};
use rw_core::Status;

use super::arrow::evidence;
use super::{object, report};
use crate::args::{DegreeArgs, Global};
use crate::input::{budget, Input};
use crate::Outcome;

/// One bad coloring per object of the catalog for a refuted `(B, k, n)`.
fn refutation(cat: &FiniteCategory, a: ObjId, r: &UpperRefutation, opts: ArrowOptions, mut v: Verdict) -> Result<Verdict> {
    if r.status != Status::Fails {
        return Ok(v);
    }
    for c in cat.canonical_order() {
        let av = arrow_check(cat, c, r.b, a, r.k, r.n, opts)?;
        if let Some(chi) = &av.bad_coloring {
            v = v.certificate(Certificate::bad_coloring(cat, c, r.b, a, r.n, chi));
        }
    }
    Ok(v)
}

fn lower_verdict(cat: &FiniteCategory, a: ObjId, check: String, d: &DegreeLower) -> Verdict {
    let mut v = Verdict::new(check, d.status).detail(json!({
        "n": d.n,
        "k": d.k,
        "b": d.b.map(|b| cat.name(b)),
    }));
    match d.b {
        Some(b) => {
            for lc in &d.certificates {
                v = v.certificate(Certificate::bad_coloring(cat, lc.c, b, a, d.n - 1, &lc.coloring));
            }
        }
        None => v = v.searched(format!("every extension of {} arrowed (B)^A_{{{},{}}} somewhere", cat.name(a), d.k, d.n - 1)),
    }
    v
}

pub fn run(input: &Input, g: &Global, args: &DegreeArgs) -> Result<Outcome> {
    let cat = &input.cat;
    let a = object(cat, &args.a)?;
    let opts = ArrowOptions { budget: budget(g), symmetry: true };
    let iv = degree_interval(cat, a, args.k_max, args.b_max_size, opts)?;
    let up = &iv.upper;
    let mut upper = Verdict::new(format!("upper bound on the degree of {}", args.a), up.status).detail(json!({
        "value": up.value,
        "witnesses": up.witnesses.iter().map(|w| json!({"b": cat.name(w.b), "k": w.k, "c": cat.name(w.c)})).collect::<Vec<_>>(),
        "refuted": up.refuted.iter().map(|r| json!({"n": r.n, "b": cat.name(r.b), "k": r.k, "status": r.status})).collect::<Vec<_>>(),
    }));
    if let Some(n) = up.value {
        for w in &up.witnesses {
            let av = arrow_check(cat, w.c, w.b, a, w.k, n, opts)?;
            upper = evidence(cat, (w.c, w.b, a), w.k, n, &av, upper);
        }
    }
    for r in &up.refuted {
        upper = refutation(cat, a, r, opts, upper)?;
    }
    if up.status == Status::Fails {
        upper = upper.searched(format!("no n up to the largest hom-set out of {} works", args.a));
    }
    let lower = match &iv.lower_certificate {
        Some(d) => lower_verdict(cat, a, format!("lower bound {} on the degree of {}", iv.lower, args.a), d),
        None => Verdict::new(format!("lower bound 1 on the degree of {}", args.a), Status::Holds)
            .searched("every degree is at least 1"),
    };
    let mut verdicts = vec![upper, lower];
    let mut status = up.status;
    if let (Some(k), Some(n)) = (args.lower_k, args.lower_n) {
        let d = degree_lower(cat, a, k, n as usize, args.b_max_size, opts)?;
        status = status.and(d.status);
        verdicts.push(lower_verdict(cat, a, format!("degree of {} at least {n} with {k} colors", args.a), &d));
    }
    let config = vec![
        ("k_max", json!(args.k_max)),
        ("b_max_size", json!(args.b_max_size)),
        ("lower", json!(iv.lower)),
        ("upper", json!(up.value)),
        ("catalog_size", json!(iv.catalog_size)),
    ];
    Ok(report(status, config, input.context(BTreeMap::new()), verdicts))
}
