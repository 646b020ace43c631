//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 3, 4 and 6 contain parts that cannot hold in the stated
//! finite catalogs; they are evaluated as stated and print FAIL.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rw_core::amalgam::{claim1_extract, verify_claim1, wap_check};
use rw_core::arrows::{arrow_check, oracle_arrow_check, verify_bad_coloring, ArrowOptions};
use rw_core::catalog::{graphs, linear_orders, Catalog};
use rw_core::category::{check_axioms, skeletonize, FiniteCategory, ObjId};
use rw_core::degrees::{degree_lower, degree_upper};
use rw_core::expansion::{
    check_action_laws, check_forgetful, compare_with_base, full_fibers, orbit_age_analysis, DegreeAssignment, Expander,
};
use rw_core::sequences::{
    colimit, compose, embed_j, enumerate_transformations, equiv_check, inclusion_chain, verify_cocone, weak_fraisse_check,
    weak_homogeneity_check,
};
use rw_core::structures::canonical_form;
use rw_core::{Budget, Status};

const CRITERION_1_SECS: u64 = 30;
const RANDOM_INSTANCES: usize = 100;
const MAX_HOM: usize = 12;
const MONO_INSTANCES: usize = 1000;
const SEED: u64 = 2024;
/// Criteria whose stated form is unattainable in the stated catalogs.
const EXPECTED_FAIL: [usize; 3] = [3, 4, 6];

type Outcome = Result<String, String>;

fn cat_of(c: &Catalog) -> FiniteCategory {
    FiniteCategory::from_catalog(c).unwrap()
}

fn obj(cat: &FiniteCategory, name: &str) -> ObjId {
    cat.find_object(name).unwrap()
}

fn check(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cat = cat_of(&linear_orders(6));
    let (b, a) = (obj(&cat, "LO3"), obj(&cat, "LO2"));
    let mut notes = Vec::new();
    for (c, want) in [("LO6", Status::Holds), ("LO5", Status::Fails)] {
        let c = obj(&cat, c);
        let v = arrow_check(&cat, c, b, a, 2, 1, ArrowOptions::default()).unwrap();
        let o = oracle_arrow_check(&cat, c, b, a, 2, 1, 1 << 20).unwrap();
        if v.status != want || o.status != want {
            return Err(format!("{}: engine {}, oracle {}", cat.name(c), v.status, o.status));
        }
        if want == Status::Fails {
            let chi = v.bad_coloring.unwrap();
            if !verify_bad_coloring(&cat, c, b, a, 1, &chi).unwrap() {
                return Err("bad coloring does not replay".into());
            }
        }
        notes.push(format!("{} {}", cat.name(c), v.status));
    }
    let t = start.elapsed();
    check(
        t < Duration::from_secs(CRITERION_1_SECS),
        format!("{} (oracle agrees, {:.2}s)", notes.join(", "), t.as_secs_f64()),
        format!("took {:.2}s", t.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cats = [cat_of(&linear_orders(5)), cat_of(&graphs(5))];
    let (mut done, mut holds) = (0, 0);
    while done < RANDOM_INSTANCES {
        let cat = cats.choose(&mut rng).unwrap();
        let objs: Vec<ObjId> = cat.objects().collect();
        let (a, b, c) = (*objs.choose(&mut rng).unwrap(), *objs.choose(&mut rng).unwrap(), *objs.choose(&mut rng).unwrap());
        let n = cat.hom(a, c).len();
        if !cat.arrow(a, b) || n == 0 || n > MAX_HOM {
            continue;
        }
        let k = rng.gen_range(1..=3);
        let t = rng.gen_range(1..=k);
        let opts = ArrowOptions { budget: Budget::unlimited(), symmetry: rng.gen_bool(0.5) };
        let v = arrow_check(cat, c, b, a, k, t, opts).unwrap();
        let o = oracle_arrow_check(cat, c, b, a, k, t, 1 << 24).unwrap();
        if v.status != o.status {
            return Err(format!("{} -> ({})^{}_{{{k},{t}}}: engine {}, oracle {}", cat.name(c), cat.name(b), cat.name(a), v.status, o.status));
        }
        holds += usize::from(v.status == Status::Holds);
        done += 1;
    }
    Ok(format!("{done} random instances agree ({holds} HOLDS, {} FAILS)", done - holds))
}

fn criterion_3() -> Outcome {
    let lo = cat_of(&linear_orders(7));
    let up = degree_upper(&lo, obj(&lo, "LO2"), 3, Some(3), ArrowOptions::default()).unwrap();
    let upper_ok = up.status == Status::Holds && up.value == Some(1);
    let g = cat_of(&graphs(5));
    let (p3, a) = (obj(&g, "P3"), obj(&g, "P3"));
    let low = degree_lower(&g, a, 2, 2, None, ArrowOptions::default()).unwrap();
    let replays = low
        .certificates
        .iter()
        .all(|lc| verify_bad_coloring(&g, lc.c, p3, a, 1, &lc.coloring).unwrap());
    let lower_ok = low.status == Status::Holds && low.b == Some(p3) && replays && low.certificates.len() == g.num_objects();
    let text = format!(
        "upper(LO2) = {:?} [{}] (want 1); lower(P3, k=2, n=2) {} with B = {:?}, {} per-C certificates replay",
        up.value,
        up.status,
        low.status,
        low.b.map(|b| g.name(b)),
        low.certificates.len()
    );
    check(upper_ok && lower_ok, text.clone(), text)
}

fn criterion_4() -> Outcome {
    let cat = cat_of(&linear_orders(6));
    let (a, c, d) = (obj(&cat, "LO2"), obj(&cat, "LO3"), obj(&cat, "LO6"));
    let f_list = cat.hom(a, c)[..2].to_vec();
    let g_list = vec![cat.identity(c); 2];
    let claim = match claim1_extract(&cat, a, 2, c, d, &g_list, &f_list, ArrowOptions::default()) {
        Ok(t) => verify_claim1(&cat, a, &t) && cat.compose(t.g, t.f_list[t.i]) == t.lhs && t.lhs == t.rhs,
        Err(e) => return Err(format!("Claim 1: {e}")),
    };
    let lo5 = cat_of(&linear_orders(5));
    let w = wap_check(&lo5, None);
    let identities = w.entries.iter().filter(|e| e.arrow == Some(lo5.identity(e.a))).count();
    let text = format!(
        "Claim 1 replays: {claim}; WAP on LO≤5 {} with {identities}/{} identity amalgamation arrows (arrows: {})",
        w.status,
        w.entries.len(),
        w.entries.iter().map(|e| e.arrow.map_or("-", |f| lo5.morphism_name(f))).collect::<Vec<_>>().join(", ")
    );
    check(claim && w.status == Status::Holds && identities == w.entries.len(), text.clone(), text)
}

fn criterion_5() -> Outcome {
    let cat = cat_of(&linear_orders(3));
    let mut pairs = 0usize;
    for n in 1..=3 {
        let seqs: Vec<_> = cat.objects().map(|a| embed_j(&cat, a, n)).collect();
        for x in &seqs {
            for y in &seqs {
                let ts = enumerate_transformations(&cat, x, y);
                for t1 in &ts {
                    if equiv_check(&cat, t1, t1, x, y, usize::MAX).unwrap().status != Status::Holds {
                        return Err("≈ not reflexive".into());
                    }
                    for t2 in &ts {
                        let s12 = equiv_check(&cat, t1, t2, x, y, usize::MAX).unwrap().status;
                        let s21 = equiv_check(&cat, t2, t1, x, y, usize::MAX).unwrap().status;
                        if s12 != s21 || s12 == Status::Unknown {
                            return Err("≈ not symmetric".into());
                        }
                        pairs += 1;
                        if s12 != Status::Holds {
                            continue;
                        }
                        for z in &seqs {
                            for s in enumerate_transformations(&cat, y, z) {
                                let (a, b) = (compose(&cat, &s, t1).unwrap(), compose(&cat, &s, t2).unwrap());
                                if equiv_check(&cat, &a, &b, x, z, usize::MAX).unwrap().status != Status::Holds {
                                    return Err("≈ not a left congruence".into());
                                }
                            }
                            for r in enumerate_transformations(&cat, z, x) {
                                let (a, b) = (compose(&cat, t1, &r).unwrap(), compose(&cat, t2, &r).unwrap());
                                if equiv_check(&cat, &a, &b, z, y, usize::MAX).unwrap().status != Status::Holds {
                                    return Err("≈ not a right congruence".into());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let lo5 = cat_of(&linear_orders(5));
    let mono = rw_cli::monotest::run(&lo5, MONO_INSTANCES, 3, SEED).unwrap();
    if mono.instances < MONO_INSTANCES || mono.violations > 0 {
        return Err(format!("mono test: {} instances, {} violations", mono.instances, mono.violations));
    }
    let objs: Vec<ObjId> = (1..=5).map(|i| obj(&lo5, &format!("LO{i}"))).collect();
    let chain = inclusion_chain(&lo5, &objs).unwrap();
    let col = colimit(&lo5, &chain).unwrap();
    let iso = canonical_form(&col.structure).0 == canonical_form(lo5.structure(objs[4]).unwrap()).0;
    let cocone = verify_cocone(&lo5, &chain, &col).unwrap();
    check(
        iso && cocone,
        format!(
            "{pairs} transformation pairs at N ≤ 3; {} mono instances ({} with premise) without violation; colim ≅ LO5",
            mono.instances, mono.premise_holds
        ),
        format!("colimit iso {iso}, cocone {cocone}"),
    )
}

fn criterion_6() -> Outcome {
    let lo8 = cat_of(&linear_orders(8));
    let objs: Vec<ObjId> = (1..=8).map(|i| obj(&lo8, &format!("LO{i}"))).collect();
    let chain = inclusion_chain(&lo8, &objs).unwrap();
    let small = &objs[..4];
    let wf = weak_fraisse_check(&lo8, &chain, small, usize::MAX, usize::MAX);
    let m_is_n = wf.bullet2.iter().all(|l| l.m == Some(l.n));
    let lo6 = obj(&lo8, "LO6");
    let wh = weak_homogeneity_check(&lo8, lo6, &objs[..3]);
    let text = format!(
        "weak Fraïssé {} with m per level {:?} (want m = n); weak homogeneity of LO6 over LO≤3 {}",
        wf.status,
        wf.bullet2.iter().map(|l| l.m).collect::<Vec<_>>(),
        wh.status
    );
    check(wf.status == Status::Holds && m_is_n && wh.status == Status::Holds, text.clone(), text)
}

fn p3_expander(cat: &FiniteCategory) -> Expander<'_> {
    let skel = skeletonize(cat).unwrap();
    let named = [("K1".to_string(), 1), ("K2".to_string(), 2)].into_iter().collect();
    let degrees = DegreeAssignment::new(cat, &skel, &named).unwrap();
    Expander::new(cat, skel, degrees)
}

fn criterion_7() -> Outcome {
    let cat = cat_of(&graphs(4));
    let ex = p3_expander(&cat);
    let p3 = obj(&cat, "P3");
    let all = ex.enumerate(p3, 1 << 16).unwrap();
    if all.len() != 16 {
        return Err(format!("{} expansions of P3", all.len()));
    }
    let fibers = full_fibers(&ex, 1 << 16).unwrap();
    let r = check_forgetful(&ex, &fibers, Budget::unlimited()).unwrap();
    let exact = r.fiber_counts.iter().all(|f| f.count as f64 == f.formula);
    let props = [r.reasonable, r.precompact, r.unique_restrictions, r.injective_on_homs];
    if props.iter().any(|&s| s != Status::Holds) || !exact {
        return Err(format!("forgetful properties {props:?}, exact counts {exact}"));
    }
    let laws = check_action_laws(&ex, p3, &all).unwrap();
    let orbits = orbit_age_analysis(&ex, p3, 1 << 16).unwrap();
    check(
        laws.status == Status::Holds && orbits.invariance == Status::Holds,
        format!(
            "16 expansions; four forgetful properties hold; action laws over 16 × {} pairs; {} orbits age-invariant",
            laws.automorphisms,
            orbits.orbits.len()
        ),
        format!("action laws {}, invariance {}", laws.status, orbits.invariance),
    )
}

fn criterion_8() -> Outcome {
    let cat = cat_of(&graphs(4));
    let skel = skeletonize(&cat).unwrap();
    let ex = Expander::new(&cat, skel.clone(), DegreeAssignment::uniform(&skel, 1).unwrap());
    let fibers = full_fibers(&ex, 1 << 16).unwrap();
    let b = compare_with_base(&ex, &fibers);
    check(
        b.status == Status::Holds,
        format!("{} objects and {} hom-sets match the base", cat.num_objects(), b.pairs_checked),
        format!("{:?} / {:?}", b.object_mismatches, b.pair_mismatches),
    )
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();
    for (name, c) in [("LO≤5", linear_orders(5)), ("graphs≤3", graphs(3))] {
        let cat = cat_of(&c);
        let op = cat.op();
        let (x, y) = (check_axioms(&cat, Budget::unlimited()), check_axioms(&op, Budget::unlimited()));
        let dual = x.c1_all_mono.holds == y.all_epi.holds
            && x.all_epi.holds == y.c1_all_mono.holds
            && x.directed.holds == y.dually_directed.holds
            && x.dually_directed.holds == y.directed.holds
            && x.laws.status == y.laws.status;
        let involution = op.op().to_abstract() == cat.to_abstract();
        let table = FiniteCategory::from_abstract(&op.to_abstract()).unwrap();
        let table_involution = table.op().to_abstract() == cat.to_abstract();
        if !(dual && involution && table_involution) {
            return Err(format!("{name}: dual verdicts {dual}, op∘op {involution}, via tables {table_involution}"));
        }
        notes.push(format!("{name}: mono {}↔epi {}", x.c1_all_mono.holds, y.all_epi.holds));
    }
    Ok(format!("dual verdicts and op∘op = id ({})", notes.join("; ")))
}

fn rw(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_rw")).args(args).env_remove("RW_BUDGET_NODES").env_remove("RW_BUDGET_SECS").output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let lo7 = write(dir.path(), "lo7.json", &linear_orders(7).to_json());
    let lo8 = write(dir.path(), "lo8.json", &linear_orders(8).to_json());
    let g4 = write(dir.path(), "graphs4.json", &graphs(4).to_json());
    let chain5 = write(dir.path(), "chain5.json", &chain_file(5));
    let chain8 = write(dir.path(), "chain8.json", &chain_file(8));
    let seed = SEED.to_string();
    let workload: Vec<Vec<&str>> = vec![
        vec!["cat", "check", "--catalog", &lo7],
        vec!["cat", "check", "--catalog", &lo7, "--op"],
        vec!["cat", "skeleton", "--catalog", &g4],
        vec!["arrow", "--catalog", &lo7, "--C", "LO6", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1", "--oracle"],
        vec!["arrow", "--catalog", &lo7, "--C", "LO5", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1", "--oracle"],
        vec!["degree", "--catalog", &lo7, "--A", "LO2", "--kmax", "3", "--b-max-size", "3"],
        vec!["amalgam", "--catalog", &lo7, "--wap"],
        vec!["amalgam", "--catalog", &lo7, "--claim1", "--A", "LO2", "--f", "LO2->LO3#0,LO2->LO3#1"],
        vec!["amalgam", "--catalog", &g4, "--chain", "--A", "K1"],
        vec!["seq", "colim", "--catalog", &lo7, "--seq", &chain5],
        vec!["seq", "wfcheck", "--catalog", &lo8, "--seq", &chain8, "--objects", "LO1,LO2,LO3,LO4"],
        vec!["seq", "whom", "--catalog", &lo7, "--S", "LO6", "--sub", "LO1,LO2,LO3"],
        vec!["seq", "monotest", "--catalog", &lo7, "--samples", "200"],
        vec!["expand", "check", "--catalog", &g4, "--degree", "K2=2"],
        vec!["expand", "orbits", "--catalog", &g4, "--degree", "K2=2", "--F", "P3"],
        vec!["expand", "ep", "--catalog", &g4, "--degree", "K2=2", "--F", "P3"],
    ];
    let mut certificates = 0u64;
    for (i, args) in workload.iter().enumerate() {
        let mut args = args.clone();
        args.extend(["--seed", &seed]);
        let (code1, first) = rw(&args);
        let (code2, second) = rw(&args);
        if first != second || code1 != code2 {
            return Err(format!("run {} differs between invocations: {}", i, args.join(" ")));
        }
        if !(0..=2).contains(&code1) {
            return Err(format!("exit {code1}: {}", args.join(" ")));
        }
        let path = write(dir.path(), &format!("report{i}.json"), std::str::from_utf8(&first).unwrap());
        let (code, out) = rw(&["replay", "--deep", &path]);
        if code != 0 {
            return Err(format!("replay of {} failed: {}", args.join(" "), String::from_utf8_lossy(&out)));
        }
        let summary: serde_json::Value = serde_json::from_slice(&out).unwrap();
        certificates += summary["certificates"].as_u64().unwrap();
    }
    Ok(format!("{} reports byte-identical across runs; {certificates} certificates replay", workload.len()))
}

fn chain_file(n: usize) -> String {
    let objects: Vec<String> = (1..=n).map(|i| format!("LO{i}")).collect();
    let bonding: serde_json::Map<String, serde_json::Value> =
        (0..n - 1).map(|i| (format!("{i}->{}", i + 1), serde_json::json!((0..=i).collect::<Vec<_>>()))).collect();
    serde_json::json!({ "objects": objects, "bonding": bonding }).to_string()
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 10] = [
        (1, "Ramsey instance R(3,3) = 6", criterion_1),
        (2, "oracle equivalence", criterion_2),
        (3, "degree interval", criterion_3),
        (4, "Claim 1 and weak amalgamation", criterion_4),
        (5, "sequence calculus", criterion_5),
        (6, "weak Fraïssé and weak homogeneity", criterion_6),
        (7, "expansion construction", criterion_7),
        (8, "degenerate expansions", criterion_8),
        (9, "duality", criterion_9),
        (10, "determinism and replay", criterion_10),
    ];
    let mut failed = BTreeSet::new();
    for (n, name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed.insert(n);
                println!("criterion {n:>2} FAIL  {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    let unexpected: Vec<_> = failed.iter().filter(|n| !EXPECTED_FAIL.contains(n)).collect();
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
