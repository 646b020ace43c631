use std::collections::BTreeMap;

use anyhow::{Context as _, Result};
use serde_json::json;

use rw_core::arrows::{arrow_check, export_cnf, oracle_arrow_check, ArrowOptions, ArrowVerdict};
use rw_core::category::{FiniteCategory, ObjId};
use rw_core::report::{Certificate, Exhaustion, Verdict};
use rw_core::{Error, Status};

use super::{object, report};
use crate::args::{ArrowArgs, Global};
use crate::input::{budget, Input};
use crate::Outcome;

/// Evidence for one arrow verdict: the bad coloring or the exhausted search.
pub(super) fn evidence(cat: &FiniteCategory, (c, b, a): (ObjId, ObjId, ObjId), k: usize, t: usize, v: &ArrowVerdict, mut out: Verdict) -> Verdict {
    match (&v.status, &v.bad_coloring) {
        (Status::Fails, Some(chi)) => out = out.certificate(Certificate::bad_coloring(cat, c, b, a, t, chi)),
        (Status::Holds, _) => {
            out = out.exhausted(Exhaustion::Arrow {
                c: cat.name(c).into(),
                b: cat.name(b).into(),
                a: cat.name(a).into(),
                k,
                t,
                nodes: v.stats.nodes,
            })
        }
        _ => {}
    }
    out
}

pub fn run(input: &Input, g: &Global, args: &ArrowArgs) -> Result<Outcome> {
    let cat = &input.cat;
    let (c, b, a) = (object(cat, &args.c)?, object(cat, &args.b)?, object(cat, &args.a)?);
    let (k, t) = (args.k as usize, args.t as usize);
    let opts = ArrowOptions { budget: budget(g), symmetry: !args.no_symmetry };
    let v = arrow_check(cat, c, b, a, k, t, opts)?;
    let check = format!("{} -> ({})^{}_{{{k},{t}}}", args.c, args.b, args.a);
    let main = evidence(cat, (c, b, a), k, t, &v, Verdict::new(check, v.status).detail(json!({ "stats": v.stats })));
    let mut status = v.status;
    let mut verdicts = vec![main];
    if args.oracle {
        match oracle_arrow_check(cat, c, b, a, k, t, args.oracle_budget) {
            Ok(o) => {
                let agree = Status::from_bool(o.status == v.status);
                if agree == Status::Fails {
                    status = Status::Fails;
                }
                let mut ov = Verdict::new("oracle agreement", agree).detail(json!({ "oracle_status": o.status }));
                ov = match &o.bad_coloring {
                    Some(chi) if v.status == Status::Fails => {
                        ov.certificate(Certificate::bad_coloring(cat, c, b, a, t, chi))
                    }
                    _ => ov.searched(format!("all {k}-colorings of hom({}, {}) enumerated", args.a, args.c)),
                };
                verdicts.push(ov);
            }
            Err(Error::BudgetExceeded { .. }) => {
                verdicts.push(Verdict::new("oracle agreement", Status::Unknown).detail(json!({ "oracle_budget": args.oracle_budget })));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut config = vec![("k", json!(k)), ("t", json!(t)), ("symmetry", json!(!args.no_symmetry))];
    if let Some(path) = &args.cnf {
        let text = export_cnf(cat, c, b, a, k, t)?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        config.push(("cnf", json!(path.display().to_string())));
    }
    Ok(report(status, config, input.context(BTreeMap::new()), verdicts))
}
