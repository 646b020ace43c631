use std::collections::BTreeMap;

use anyhow::Result;
use serde_json::json;

use rw_core::catalog::StructureEntry;
use rw_core::category::{FiniteCategory, ObjId};
use rw_core::report::{Certificate, MorphRef, Verdict};
use rw_core::sequences::{
    colimit, ultrahomogeneity_check, verify_cocone, weak_fraisse_check, weak_homogeneity_check, SequenceFile, TruncatedSequence,
    WeakFraisseReport,
};
use rw_core::structures::canonical_form;
use rw_core::Status;

use super::{names, object, objects, report};
use crate::args::{Global, SeqCmd};
use crate::input::{read_json, Input};
use crate::{monotest, Outcome};

pub fn run(input: &Input, g: &Global, cmd: &SeqCmd) -> Result<Outcome> {
    let cat = &input.cat;
    let ctx = input.context(BTreeMap::new());
    match cmd {
        SeqCmd::Colim(a) => {
            let file: SequenceFile = read_json(&a.seq)?;
            let x = file.to_sequence(cat)?;
            let col = colimit(cat, &x)?;
            let commutes = Status::from_bool(verify_cocone(cat, &x, &col)?);
            let canon = canonical_form(&col.structure).0;
            let iso: Vec<&str> = cat
                .objects()
                .filter(|&o| cat.structure(o).is_some_and(|s| canonical_form(s).0 == canon))
                .map(|o| cat.name(o))
                .collect();
            let cocone = Verdict::new("cocone triangles commute", commutes)
                .detail(json!({
                    "colimit": StructureEntry::from_structure("colim", &col.structure),
                    "cocone": col.cocone.iter().map(|e| &e.map).collect::<Vec<_>>(),
                    "names": col.names,
                }))
                .searched("c_m · x_n^m = c_n recomputed for every n ≤ m");
            let found = Verdict::new("colimit is isomorphic to a catalog object", Status::from_bool(!iso.is_empty()))
                .detail(json!({ "isomorphic_to": iso }))
                .searched("canonical forms compared against every catalog object");
            let status = cocone.status.and(found.status);
            Ok(report(status, vec![("length", json!(x.len()))], ctx, vec![cocone, found]))
        }
        SeqCmd::Wfcheck(a) => {
            let file: SequenceFile = read_json(&a.seq)?;
            let w = file.to_sequence(cat)?;
            let objs = objects(cat, &a.objects)?;
            let r = weak_fraisse_check(cat, &w, &objs, a.m_max, a.k_max);
            let verdicts = fraisse_verdicts(cat, &w, &objs, a.k_max, &r);
            let config = vec![
                ("objects", json!(names(cat, &objs))),
                ("m_max", json!(a.m_max.min(w.len() - 1))),
                ("k_max", json!(a.k_max.min(w.len() - 1))),
            ];
            Ok(report(r.status, config, ctx, verdicts))
        }
        SeqCmd::Whom(a) => {
            let s = object(cat, &a.s)?;
            let sub = objects(cat, &a.sub)?;
            let h = weak_homogeneity_check(cat, s, &sub);
            let mut v = Verdict::new(format!("{} is weakly homogeneous", a.s), h.status);
            let failing = h.witnesses.iter().find(|w| w.b.is_none());
            v = v.detail(json!({
                "checked": h.witnesses.len(),
                "failure": failing.map(|w| json!({ "a": cat.name(w.a), "f": cat.morphism_name(w.f) })),
            }));
            for w in h.witnesses.iter().filter(|w| w.b.is_some()) {
                let (e, i) = (w.e.unwrap(), w.i.unwrap());
                v = v.certificate(Certificate::equation(cat, &[i, e], &[w.f]));
                for &(j, hh) in &w.automorphisms {
                    v = v.certificate(Certificate::equation(cat, &[hh, j, e], &[i, e]));
                    v = v.certificate(Certificate::Invertible { f: MorphRef::of(cat, hh) });
                }
            }
            v = v.searched(match failing {
                Some(w) => format!("no B in the subcategory gives {} a witness", cat.morphism_name(w.f)),
                None => format!("every embedding into {} from the subcategory tested", a.s),
            });
            let mut status = h.status;
            let mut verdicts = vec![v];
            if a.ultra {
                let u = ultrahomogeneity_check(cat, s, &sub);
                status = status.and(u.status);
                let failure = u.failure.map(|(o, e1, e2)| json!([cat.name(o), cat.morphism_name(e1), cat.morphism_name(e2)]));
                verdicts.push(
                    Verdict::new(format!("{} is ultrahomogeneous", a.s), u.status)
                        .detail(json!({ "failure": failure }))
                        .searched(format!("every pair of embeddings into {} tested against every automorphism", a.s)),
                );
            }
            Ok(report(status, vec![("subcategory", json!(names(cat, &sub)))], ctx, verdicts))
        }
        SeqCmd::Monotest(a) => {
            let stats = monotest::run(cat, a.samples, a.len, g.seed)?;
            let status = if stats.instances < a.samples {
                Status::Unknown
            } else {
                Status::from_bool(stats.violations == 0)
            };
            let v = Verdict::new("F·G ≈ F·H implies G ≈ H", status)
                .detail(serde_json::to_value(&stats)?)
                .searched(format!("{} seeded random instances", stats.instances));
            Ok(report(status, vec![("samples", json!(a.samples)), ("len", json!(a.len))], ctx, vec![v]))
        }
    }
}

fn fraisse_verdicts(cat: &FiniteCategory, w: &TruncatedSequence, objs: &[ObjId], k_max: usize, r: &WeakFraisseReport) -> Vec<Verdict> {
    let mut b1 = Verdict::new("every object maps into some level", r.bullet1_status).detail(json!({
        "levels": r.bullet1.iter().map(|(c, n)| json!({ "object": cat.name(*c), "level": n })).collect::<Vec<_>>(),
    }));
    for &(c, n) in &r.bullet1 {
        if let Some(n) = n {
            let f = cat.hom(c, w.object(n))[0];
            b1 = b1.certificate(Certificate::Member { f: MorphRef::of(cat, f), src: cat.name(c).into(), tgt: cat.name(w.object(n)).into() });
        }
    }
    if r.bullet1_status == Status::Fails {
        b1 = b1.searched("every level tried for the objects without a level");
    }
    let last = w.len() - 1;
    let mut b2 = Verdict::new("every level has a weak amalgamation witness", r.bullet2_status).detail(json!({
        "witnesses": r.bullet2.iter().map(|l| json!({ "n": l.n, "m": l.m, "status": l.status })).collect::<Vec<_>>(),
    }));
    for l in &r.bullet2 {
        let Some(m) = l.m else { continue };
        for &c in objs {
            for &f in cat.hom(w.object(m), c) {
                let ffw = cat.compose(f, w.bond(l.n, m));
                let found = (m..=k_max.min(last))
                    .find_map(|k| cat.hom(c, w.object(k)).iter().find(|&&g| cat.compose(g, ffw) == w.bond(l.n, k)).map(|&g| (k, g)));
                if let Some((k, g)) = found {
                    b2 = b2.certificate(Certificate::equation(cat, &[g, f, w.bond(l.n, m)], &[w.bond(l.n, k)]));
                }
            }
        }
    }
    if r.bullet2_status == Status::Fails || r.bullet2.iter().any(|l| l.m.is_none()) {
        b2 = b2.searched("every m up to the bound tried for the levels without a witness");
    } else {
        b2 = b2.searched("maps out of each witness level enumerated");
    }
    vec![b1, b2]
}
