//! Machine-readable reports and certificate replay.
//!
//! A report carries the category it was computed in, so that every
//! certificate can be re-verified by direct composition and evaluation
//! without repeating any search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::amalgam::{verify_claim1, Claim1Transcript};
use crate::arrows::{arrow_check, verify_bad_coloring, ArrowOptions, Coloring};
use crate::catalog::{Catalog, CatalogFile};
use crate::category::{skeletonize, AbstractCategoryFile, FiniteCategory, MorphId, ObjId};
use crate::degrees::verify_non_essential;
use crate::error::{Error, Result};
use crate::expansion::{DegreeAssignment, Expander, ExpansionEntry};
use crate::verdict::Status;

/// A morphism by name; structure-backed morphisms also carry their map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphRef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<usize>>,
}

impl MorphRef {
    pub fn of(cat: &FiniteCategory, f: MorphId) -> Self {
        MorphRef { name: cat.morphism_name(f).to_string(), map: cat.map(f).map(|e| e.map.clone()) }
    }

    pub fn resolve(&self, cat: &FiniteCategory) -> Result<MorphId> {
        let f = cat
            .find_morphism(&self.name)
            .ok_or_else(|| Error::CorruptCertificate(format!("unknown morphism {}", self.name)))?;
        if self.map.is_some() && self.map.as_ref() != cat.map(f).map(|e| &e.map) {
            return Err(Error::CorruptCertificate(format!("map of {} does not match", self.name)));
        }
        Ok(f)
    }
}

pub fn refs(cat: &FiniteCategory, fs: &[MorphId]) -> Vec<MorphRef> {
    fs.iter().map(|&f| MorphRef::of(cat, f)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Mono,
    Epi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Certificate {
    /// A `k`-coloring of `hom(A, C)` (in hom order) under which every copy
    /// of `B` sees more than `t` colors.
    BadColoring { c: String, b: String, a: String, k: usize, t: usize, colors: Vec<u32> },
    /// Both chains compose (rightmost first) to the same morphism.
    Equation { lhs: Vec<MorphRef>, rhs: Vec<MorphRef> },
    /// `f·g = f·h` (mono side) or `g·f = h·f` (epi side) with `g ≠ h`.
    Cancellation { side: Side, f: MorphRef, g: MorphRef, h: MorphRef },
    /// `f ∈ hom(src, tgt)`.
    Member { f: MorphRef, src: String, tgt: String },
    /// `f` has a two-sided inverse.
    Invertible { f: MorphRef },
    /// `e ∈ hom(A*, B*)`.
    ExpansionMorphism { a_star: ExpansionEntry, b_star: ExpansionEntry, e: MorphRef },
    /// `δ(f·e) ≠ θ(e)`, so `f ∉ hom(C*, D*)`.
    ColorMismatch { c_star: ExpansionEntry, d_star: ExpansionEntry, f: MorphRef, e: MorphRef },
    /// `λ` on `hom(A, B)`, and `χ` on `hom(A, F)` whose kernel contains
    /// the transported kernel of `λ` on no copy of `B`.
    NonEssential { a: String, b: String, f: String, lambda: Vec<u32>, chi: Vec<u32>, k: usize },
    /// The output of Claim 1, recomputed from its inputs on replay.
    Claim1 {
        a: String,
        c: String,
        d: String,
        f_list: Vec<MorphRef>,
        g_list: Vec<MorphRef>,
        chi: Vec<u32>,
        x: MorphRef,
        j: usize,
        i: usize,
        g: MorphRef,
        lhs: MorphRef,
        rhs: MorphRef,
    },
}

impl Certificate {
    pub fn bad_coloring(cat: &FiniteCategory, c: ObjId, b: ObjId, a: ObjId, t: usize, chi: &Coloring) -> Self {
        Certificate::BadColoring {
            c: cat.name(c).into(),
            b: cat.name(b).into(),
            a: cat.name(a).into(),
            k: chi.k,
            t,
            colors: chi.values.clone(),
        }
    }

    pub fn equation(cat: &FiniteCategory, lhs: &[MorphId], rhs: &[MorphId]) -> Self {
        Certificate::Equation { lhs: refs(cat, lhs), rhs: refs(cat, rhs) }
    }

    pub fn claim1(cat: &FiniteCategory, a: ObjId, t: &Claim1Transcript) -> Self {
        Certificate::Claim1 {
            a: cat.name(a).into(),
            c: cat.name(t.c).into(),
            d: cat.name(t.d).into(),
            f_list: refs(cat, &t.f_list),
            g_list: refs(cat, &t.g_list),
            chi: t.chi.values.clone(),
            x: MorphRef::of(cat, t.x),
            j: t.j,
            i: t.i,
            g: MorphRef::of(cat, t.g),
            lhs: MorphRef::of(cat, t.lhs),
            rhs: MorphRef::of(cat, t.rhs),
        }
    }
}

/// A claim established by exhausting a search space rather than by a
/// finite witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Exhaustion {
    /// Every `k`-coloring of `hom(A, C)` has a copy of `B` with at most `t` colors.
    Arrow { c: String, b: String, a: String, k: usize, t: usize, nodes: u64 },
    Search { description: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub detail: Value,
    #[serde(default)]
    pub certificates: Vec<Certificate>,
    #[serde(default)]
    pub exhaustion: Vec<Exhaustion>,
}

impl Verdict {
    pub fn new(check: impl Into<String>, status: Status) -> Self {
        Verdict { check: check.into(), status, detail: Value::Null, certificates: Vec::new(), exhaustion: Vec::new() }
    }

    pub fn detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn certificate(mut self, c: Certificate) -> Self {
        self.certificates.push(c);
        self
    }

    pub fn exhausted(mut self, e: Exhaustion) -> Self {
        self.exhaustion.push(e);
        self
    }

    pub fn searched(self, description: impl Into<String>) -> Self {
        self.exhausted(Exhaustion::Search { description: description.into() })
    }
}

/// The category a report was computed in.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Context {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<AbstractCategoryFile>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub opposite: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub degrees: BTreeMap<String, u32>,
}

impl Context {
    pub fn build(&self) -> Result<Option<FiniteCategory>> {
        let cat = match (&self.catalog, &self.category) {
            (Some(c), None) => FiniteCategory::from_catalog(&Catalog::from_file(c)?)?,
            (None, Some(a)) => FiniteCategory::from_abstract(a)?,
            (None, None) => return Ok(None),
            (Some(_), Some(_)) => return Err(Error::CorruptCertificate("both a catalog and a category".into())),
        };
        Ok(Some(if self.opposite { cat.op() } else { cat }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: Vec<String>,
    pub config: BTreeMap<String, Value>,
    pub context: Context,
    pub status: Status,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_secs: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplaySummary {
    pub verdicts: usize,
    pub certificates: usize,
    pub exhaustion_statements: usize,
    pub reruns: usize,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptCertificate(msg.into())
}

fn compose_chain(cat: &FiniteCategory, chain: &[MorphRef]) -> Result<MorphId> {
    let ids = chain.iter().map(|r| r.resolve(cat)).collect::<Result<Vec<_>>>()?;
    let (&last, rest) = ids.split_last().ok_or_else(|| corrupt("empty chain"))?;
    rest.iter().rev().try_fold(last, |acc, &g| {
        cat.try_compose(g, acc)
            .ok_or_else(|| corrupt(format!("{} and {} do not compose", cat.morphism_name(g), cat.morphism_name(acc))))
    })
}

fn expander<'a>(cat: &'a FiniteCategory, ctx: &Context) -> Result<Expander<'a>> {
    let skel = skeletonize(cat)?;
    let degrees = DegreeAssignment::new(cat, &skel, &ctx.degrees)?;
    Ok(Expander::new(cat, skel, degrees))
}

/// Re-verifies one certificate.
pub fn verify_certificate(cat: &FiniteCategory, ctx: &Context, cert: &Certificate) -> Result<()> {
    let ensure = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(corrupt(msg)) };
    match cert {
        Certificate::BadColoring { c, b, a, k, t, colors } => {
            let (c, b, a) = (cat.find_object(c)?, cat.find_object(b)?, cat.find_object(a)?);
            let chi = Coloring::new(cat.hom(a, c).to_vec(), *k, colors.clone());
            ensure(colors.len() == chi.domain.len(), "coloring has the wrong length")?;
            ensure(verify_bad_coloring(cat, c, b, a, *t, &chi)?, "some copy sees at most t colors")
        }
        Certificate::Equation { lhs, rhs } => {
            ensure(compose_chain(cat, lhs)? == compose_chain(cat, rhs)?, "the two sides differ")
        }
        Certificate::Cancellation { side, f, g, h } => {
            let (f, g, h) = (f.resolve(cat)?, g.resolve(cat)?, h.resolve(cat)?);
            ensure(g != h, "g and h coincide")?;
            let (x, y) = match side {
                Side::Mono => (cat.try_compose(f, g), cat.try_compose(f, h)),
                Side::Epi => (cat.try_compose(g, f), cat.try_compose(h, f)),
            };
            ensure(x.is_some() && x == y, "composites differ")
        }
        Certificate::Member { f, src, tgt } => {
            let f = f.resolve(cat)?;
            ensure(cat.src(f) == cat.find_object(src)? && cat.tgt(f) == cat.find_object(tgt)?, "wrong hom-set")
        }
        Certificate::Invertible { f } => ensure(cat.inverse(f.resolve(cat)?).is_some(), "not invertible"),
        Certificate::ExpansionMorphism { a_star, b_star, e } => {
            let ex = expander(cat, ctx)?;
            let (x, y, e) = (ex.from_entry(a_star)?, ex.from_entry(b_star)?, e.resolve(cat)?);
            ensure(
                cat.src(e) == x.base && cat.tgt(e) == y.base && ex.morphism_check(e, &x, &y)?.status == Status::Holds,
                "not a morphism of expansions",
            )
        }
        Certificate::ColorMismatch { c_star, d_star, f, e } => {
            let ex = expander(cat, ctx)?;
            let (x, y) = (ex.from_entry(c_star)?, ex.from_entry(d_star)?);
            let (f, e) = (f.resolve(cat)?, e.resolve(cat)?);
            ensure(cat.src(f) == x.base && cat.tgt(f) == y.base && cat.tgt(e) == x.base, "ill-typed")?;
            let i = ex
                .degrees()
                .reps()
                .iter()
                .position(|&r| r == cat.src(e))
                .ok_or_else(|| corrupt("copy of a non-representative"))?;
            ensure(ex.color(&y, i, cat.compose(f, e)) != ex.color(&x, i, e), "colors agree")
        }
        Certificate::NonEssential { a, b, f, lambda, chi, k } => {
            let (a, b, f) = (cat.find_object(a)?, cat.find_object(b)?, cat.find_object(f)?);
            let lam_k = lambda.iter().max().map_or(1, |&m| m as usize + 1);
            let lam = Coloring::new(cat.hom(a, b).to_vec(), lam_k, lambda.clone());
            let chi = Coloring::new(cat.hom(a, f).to_vec(), *k, chi.clone());
            ensure(lam.values.len() == lam.domain.len() && chi.values.len() == chi.domain.len(), "wrong length")?;
            ensure(chi.values.iter().all(|&v| (v as usize) < *k), "color out of range")?;
            ensure(verify_non_essential(cat, &lam, f, &chi)?, "some copy refines the kernel")
        }
        Certificate::Claim1 { a, c, d, f_list, g_list, chi, x, j, i, g, lhs, rhs } => {
            let (a, c, d) = (cat.find_object(a)?, cat.find_object(c)?, cat.find_object(d)?);
            let ids = |rs: &[MorphRef]| rs.iter().map(|r| r.resolve(cat)).collect::<Result<Vec<_>>>();
            let t = Claim1Transcript {
                k: f_list.len(),
                c,
                d,
                f_list: ids(f_list)?,
                g_list: ids(g_list)?,
                chi: Coloring::new(cat.hom(a, d).to_vec(), f_list.len(), chi.clone()),
                x: x.resolve(cat)?,
                j: *j,
                i: *i,
                g: g.resolve(cat)?,
                lhs: lhs.resolve(cat)?,
                rhs: rhs.resolve(cat)?,
            };
            ensure(t.k >= 2 && verify_claim1(cat, a, &t), "transcript does not replay")
        }
    }
}

/// Re-verifies every certificate of a report. Every HOLDS or FAILS verdict
/// must carry a certificate or an exhaustion statement. With `deep`,
/// arrow exhaustion statements are re-run.
pub fn replay(report: &Report, deep: bool) -> Result<ReplaySummary> {
    let mut summary = ReplaySummary { verdicts: report.verdicts.len(), ..Default::default() };
    let cat = report.context.build()?;
    for v in &report.verdicts {
        if v.status != Status::Unknown && v.certificates.is_empty() && v.exhaustion.is_empty() {
            return Err(corrupt(format!("verdict '{}' carries no evidence", v.check)));
        }
        for cert in &v.certificates {
            let cat = cat.as_ref().ok_or_else(|| corrupt("report has no category"))?;
            verify_certificate(cat, &report.context, cert)
                .map_err(|e| corrupt(format!("verdict '{}': {e}", v.check)))?;
            summary.certificates += 1;
        }
        for ex in &v.exhaustion {
            summary.exhaustion_statements += 1;
            if let (true, Exhaustion::Arrow { c, b, a, k, t, .. }) = (deep, ex) {
                let cat = cat.as_ref().ok_or_else(|| corrupt("report has no category"))?;
                let (c, b, a) = (cat.find_object(c)?, cat.find_object(b)?, cat.find_object(a)?);
                let rerun = arrow_check(cat, c, b, a, *k, *t, ArrowOptions::default())?;
                if rerun.status != Status::Holds {
                    return Err(corrupt(format!("verdict '{}': re-run gives {}", v.check, rerun.status)));
                }
                summary.reruns += 1;
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::claim1_search;
    use crate::arrows::ArrowOptions;
    use crate::catalog::{graphs, linear_orders};

    fn context(catalog: &Catalog) -> Context {
        Context { catalog: Some(catalog.to_file()), ..Default::default() }
    }

    fn report(ctx: Context, verdicts: Vec<Verdict>) -> Report {
        Report { command: vec![], config: BTreeMap::new(), context: ctx, status: Status::Holds, verdicts, timing_secs: None }
    }

    #[test]
    fn empty_report_replays() {
        let r = report(Context::default(), vec![]);
        assert_eq!(replay(&r, true).unwrap(), ReplaySummary::default());
    }

    #[test]
    fn bad_coloring_replays_and_detects_tampering() {
        let catalog = linear_orders(5);
        let cat = FiniteCategory::from_catalog(&catalog).unwrap();
        let (lo5, lo3, lo2) = (cat.find_object("LO5").unwrap(), cat.find_object("LO3").unwrap(), cat.find_object("LO2").unwrap());
        let v = arrow_check(&cat, lo5, lo3, lo2, 2, 1, ArrowOptions::default()).unwrap();
        let chi = v.bad_coloring.unwrap();
        let cert = Certificate::bad_coloring(&cat, lo5, lo3, lo2, 1, &chi);
        let r = report(context(&catalog), vec![Verdict::new("arrow", Status::Fails).certificate(cert.clone())]);
        let text = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(replay(&back, false).unwrap().certificates, 1);

        let Certificate::BadColoring { c, b, a, k, t, mut colors } = cert else { unreachable!() };
        colors.iter_mut().for_each(|x| *x = 0);
        let forged = Certificate::BadColoring { c, b, a, k, t, colors };
        let r = report(context(&catalog), vec![Verdict::new("arrow", Status::Fails).certificate(forged)]);
        assert!(matches!(replay(&r, false), Err(Error::CorruptCertificate(_))));
    }

    #[test]
    fn deep_replay_reruns_arrows() {
        let catalog = linear_orders(6);
        let ex = Exhaustion::Arrow { c: "LO6".into(), b: "LO3".into(), a: "LO2".into(), k: 2, t: 1, nodes: 0 };
        let r = report(context(&catalog), vec![Verdict::new("arrow", Status::Holds).exhausted(ex)]);
        assert_eq!(replay(&r, true).unwrap().reruns, 1);
        let wrong = Exhaustion::Arrow { c: "LO5".into(), b: "LO3".into(), a: "LO2".into(), k: 2, t: 1, nodes: 0 };
        let r = report(context(&catalog), vec![Verdict::new("arrow", Status::Holds).exhausted(wrong)]);
        assert!(replay(&r, false).is_ok());
        assert!(replay(&r, true).is_err());
    }

    #[test]
    fn equations_and_cancellation() {
        let catalog = linear_orders(3);
        let cat = FiniteCategory::from_catalog(&catalog).unwrap();
        let (lo1, lo2, lo3) = (cat.find_object("LO1").unwrap(), cat.find_object("LO2").unwrap(), cat.find_object("LO3").unwrap());
        let f = cat.hom(lo1, lo2)[0];
        let g = cat.hom(lo2, lo3)[0];
        let ok = Certificate::equation(&cat, &[g, f], &[cat.compose(g, f)]);
        let bad = Certificate::equation(&cat, &[g, f], &[cat.hom(lo1, lo3)[2]]);
        let ctx = context(&catalog);
        assert!(verify_certificate(&cat, &ctx, &ok).is_ok());
        assert!(verify_certificate(&cat, &ctx, &bad).is_err());

        // every embedding into LO2 is epi-violating for LO1 → LO2 in the opposite sense
        let (g1, g2) = (cat.hom(lo2, lo3)[0], cat.hom(lo2, lo3)[1]);
        let f1 = cat.hom(lo1, lo2)[0];
        let epi = Certificate::Cancellation { side: Side::Epi, f: MorphRef::of(&cat, f1), g: MorphRef::of(&cat, g1), h: MorphRef::of(&cat, g2) };
        assert_eq!(cat.compose(g1, f1) == cat.compose(g2, f1), verify_certificate(&cat, &ctx, &epi).is_ok());

        let mut renamed = MorphRef::of(&cat, f1);
        renamed.map = Some(vec![1]);
        assert!(renamed.resolve(&cat).is_err());
    }

    #[test]
    fn claim1_certificate_replays() {
        let catalog = linear_orders(6);
        let cat = FiniteCategory::from_catalog(&catalog).unwrap();
        let (lo2, lo3) = (cat.find_object("LO2").unwrap(), cat.find_object("LO3").unwrap());
        let f_list = vec![cat.hom(lo2, lo3)[0], cat.hom(lo2, lo3)[2]];
        let t = claim1_search(&cat, lo2, &f_list, ArrowOptions::default()).unwrap();
        let cert = Certificate::claim1(&cat, lo2, &t);
        assert!(verify_certificate(&cat, &context(&catalog), &cert).is_ok());
        let Certificate::Claim1 { a, c, d, f_list, g_list, mut chi, x, j, i, g, lhs, rhs } = cert else { unreachable!() };
        chi[0] = 1 - chi[0];
        let forged = Certificate::Claim1 { a, c, d, f_list, g_list, chi, x, j, i, g, lhs, rhs };
        assert!(verify_certificate(&cat, &context(&catalog), &forged).is_err());
    }

    #[test]
    fn expansion_certificates() {
        let catalog = graphs(3);
        let cat = FiniteCategory::from_catalog(&catalog).unwrap();
        let ctx = Context { degrees: BTreeMap::from([("K2".to_string(), 2)]), ..context(&catalog) };
        let ex = expander(&cat, &ctx).unwrap();
        let (k2, p3) = (cat.find_object("K2").unwrap(), cat.find_object("P3").unwrap());
        let all = ex.enumerate(p3, 100).unwrap();
        let x = &all[5];
        let e = cat.hom(k2, p3)[1];
        let a_star = ex.restriction(x, e).unwrap();
        let good = Certificate::ExpansionMorphism { a_star: ex.to_entry(&a_star), b_star: ex.to_entry(x), e: MorphRef::of(&cat, e) };
        assert!(verify_certificate(&cat, &ctx, &good).is_ok());
        let other = all.iter().find(|y| ex.morphism_check(cat.identity(p3), y, x).unwrap().status == Status::Fails).unwrap();
        let check = ex.morphism_check(cat.identity(p3), other, x).unwrap();
        let mismatch = Certificate::ColorMismatch {
            c_star: ex.to_entry(other),
            d_star: ex.to_entry(x),
            f: MorphRef::of(&cat, cat.identity(p3)),
            e: MorphRef::of(&cat, check.offending.unwrap()),
        };
        assert!(verify_certificate(&cat, &ctx, &mismatch).is_ok());
        let wrong = Certificate::ExpansionMorphism { a_star: ex.to_entry(other), b_star: ex.to_entry(x), e: MorphRef::of(&cat, cat.identity(p3)) };
        assert!(verify_certificate(&cat, &ctx, &wrong).is_err());
    }

    #[test]
    fn verdicts_need_evidence() {
        let r = report(context(&linear_orders(2)), vec![Verdict::new("bare", Status::Holds)]);
        assert!(replay(&r, false).is_err());
        let r = report(context(&linear_orders(2)), vec![Verdict::new("bare", Status::Unknown)]);
        assert!(replay(&r, false).is_ok());
    }
}
