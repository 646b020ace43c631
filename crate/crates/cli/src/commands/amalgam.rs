use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde_json::json;

use rw_core::amalgam::{
    chain_is_pairwise_non_amalgamable, claim1_search, failure_chain, is_amalgamation_arrow, two_of_k_check, wap_check,
};
use rw_core::arrows::ArrowOptions;
use rw_core::category::{FiniteCategory, MorphId};
use rw_core::report::{Certificate, Verdict};
use rw_core::{Error, Status};

use super::{morph_names, morphism, object, report};
use crate::args::{AmalgamArgs, Global};
use crate::input::{budget, Input};
use crate::Outcome;

/// The verdict for "f is an amalgamation arrow", with `r·g·f = s·h·f` per pair.
fn arrow_verdict(cat: &FiniteCategory, f: MorphId, check: String) -> Verdict {
    let r = is_amalgamation_arrow(cat, f);
    let mut v = Verdict::new(check, r.status).detail(json!({
        "f": cat.morphism_name(f),
        "pairs": r.witnesses.len(),
        "failure": r.failure.map(|(g, h)| [cat.morphism_name(g), cat.morphism_name(h)]),
    }));
    for w in &r.witnesses {
        v = v.certificate(Certificate::equation(cat, &[w.amalgam.r, w.g, f], &[w.amalgam.s, w.h, f]));
    }
    if let Some((g, h)) = r.failure {
        v = v.searched(format!(
            "no object receives {} and {} compatibly",
            cat.morphism_name(cat.compose(g, f)),
            cat.morphism_name(cat.compose(h, f))
        ));
    }
    v
}

pub fn run(input: &Input, g: &Global, args: &AmalgamArgs) -> Result<Outcome> {
    let cat = &input.cat;
    let ctx = input.context(BTreeMap::new());
    let a = args.a.as_deref().map(|n| object(cat, n)).transpose()?;
    if args.wap {
        let w = wap_check(cat, args.max_candidates);
        let mut verdicts = Vec::new();
        for e in &w.entries {
            let check = format!("weak amalgamation at {}", cat.name(e.a));
            let v = match e.arrow {
                Some(f) => arrow_verdict(cat, f, check).detail(json!({
                    "f": cat.morphism_name(f),
                    "identity": f == cat.identity(e.a),
                    "candidates_tried": e.candidates_tried,
                })),
                None => Verdict::new(check, e.status)
                    .detail(json!({ "candidates_tried": e.candidates_tried }))
                    .searched(format!("no arrow out of {} among those tried is an amalgamation arrow", cat.name(e.a))),
            };
            verdicts.push(v);
        }
        let config = vec![("mode", json!("wap")), ("max_candidates", json!(args.max_candidates))];
        return Ok(report(w.status, config, ctx, verdicts));
    }
    if let Some(k) = args.two_of_k {
        if k < 2 {
            bail!("--two-of-k needs k ≥ 2");
        }
        let a = a.expect("clap requires --A");
        let r = two_of_k_check(cat, a, k, budget(g));
        let v = Verdict::new(format!("2-out-of-{k} amalgamation at {}", cat.name(a)), r.status)
            .detail(json!({
                "morphisms": r.morphisms,
                "non_amalgamable_pairs": r.non_amalgamable_pairs,
                "clique": r.clique.as_deref().map(|c| morph_names(cat, c)),
            }))
            .searched(match r.status {
                Status::Fails => format!("every pair of the listed {k} morphisms was checked for an amalgam"),
                _ => format!("no {k} pairwise non-amalgamable morphisms among all arrows out of {}", cat.name(a)),
            });
        return Ok(report(r.status, vec![("mode", json!("two_of_k")), ("k", json!(k))], ctx, vec![v]));
    }
    if args.chain {
        let a = a.expect("clap requires --A");
        let ch = failure_chain(cat, a, args.depth);
        let pairwise = chain_is_pairwise_non_amalgamable(cat, &ch.chain);
        let mut verdicts = vec![Verdict::new(format!("failure chain from id_{}", cat.name(a)), Status::from_bool(pairwise))
            .detail(json!({
                "length": ch.chain.len(),
                "chain": morph_names(cat, &ch.chain),
                "steps": ch.steps.iter().map(|s| morph_names(cat, &[s.f, s.g, s.h])).collect::<Vec<_>>(),
                "stopped_at_amalgamation_arrow": ch.stopped_at_amalgamation_arrow.map(|f| cat.morphism_name(f)),
            }))
            .searched("every pair of chain elements was checked for an amalgam")];
        if let Some(f) = ch.stopped_at_amalgamation_arrow {
            verdicts.push(arrow_verdict(cat, f, format!("{} is an amalgamation arrow", cat.morphism_name(f))));
        }
        let status = Status::all(verdicts.iter().map(|v| v.status));
        return Ok(report(status, vec![("mode", json!("chain")), ("depth", json!(args.depth))], ctx, verdicts));
    }
    if args.claim1 {
        let a = a.expect("clap requires --A");
        let f_list = args.f.iter().map(|n| morphism(cat, n)).collect::<Result<Vec<_>>>()?;
        if f_list.len() < 2 {
            bail!("--claim1 needs at least two morphisms in --f");
        }
        let opts = ArrowOptions { budget: budget(g), symmetry: true };
        let check = format!("Claim 1 at {}", cat.name(a));
        let v = match claim1_search(cat, a, &f_list, opts) {
            Ok(t) => Verdict::new(check, Status::Holds)
                .detail(json!({ "c": cat.name(t.c), "d": cat.name(t.d), "j": t.j, "i": t.i }))
                .certificate(Certificate::claim1(cat, a, &t)),
            Err(Error::ArrowDoesNotHold) => Verdict::new(check, Status::Unknown)
                .detail(json!({ "reason": "no catalog object arrows (C)^A_{k,k-1} for a common C" })),
            Err(Error::FactorSearchFailed(m)) => Verdict::new(check, Status::Fails)
                .detail(json!({ "reason": m }))
                .searched("every morphism into D tested as a factor"),
            Err(e) => return Err(e.into()),
        };
        return Ok(report(v.status, vec![("mode", json!("claim1")), ("k", json!(f_list.len()))], ctx, vec![v]));
    }
    let name = args.arrow.as_deref().expect("clap requires a mode");
    let f = morphism(cat, name)?;
    let v = arrow_verdict(cat, f, format!("{name} is an amalgamation arrow"));
    Ok(report(v.status, vec![("mode", json!("arrow"))], ctx, vec![v]))
}
