mod amalgam;
mod arrow;
mod cat;
mod degree;
mod expand;
mod replay;
mod seq;

use std::collections::BTreeMap;

use anyhow::{Context as _, Result};
use serde_json::Value;

use rw_core::category::{FiniteCategory, MorphId, ObjId};
use rw_core::report::{Context, MorphRef, Verdict};
use rw_core::Status;

use crate::args::{Cli, Command, CatCmd};
use crate::input::Input;
use crate::Outcome;

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Cat(CatCmd::Gen(a)) => return cat::gen(a),
        Command::Replay(a) => return replay::run(a),
        _ => {}
    }
    let input = Input::load(&cli.global)?;
    let g = &cli.global;
    match &cli.command {
        Command::Cat(CatCmd::Check) => cat::check(&input, g),
        Command::Cat(CatCmd::Skeleton) => cat::skeleton(&input),
        Command::Cat(CatCmd::Op) => cat::op(&input),
        Command::Arrow(a) => arrow::run(&input, g, a),
        Command::Degree(a) => degree::run(&input, g, a),
        Command::Amalgam(a) => amalgam::run(&input, g, a),
        Command::Seq(s) => seq::run(&input, g, s),
        Command::Expand(e) => expand::run(&input, g, e),
        Command::Cat(CatCmd::Gen(_)) | Command::Replay(_) => unreachable!(),
    }
}

/// Assembles a report outcome; `config` pairs are echoed verbatim.
fn report(status: Status, config: Vec<(&str, Value)>, context: Context, verdicts: Vec<Verdict>) -> Outcome {
    let config: BTreeMap<String, Value> = config.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Outcome::Report { status, config, context, verdicts }
}

fn object(cat: &FiniteCategory, name: &str) -> Result<ObjId> {
    Ok(cat.find_object(name)?)
}

fn objects(cat: &FiniteCategory, names: &[String]) -> Result<Vec<ObjId>> {
    if names.is_empty() {
        return Ok(cat.canonical_order());
    }
    names.iter().map(|n| object(cat, n)).collect()
}

fn morphism(cat: &FiniteCategory, name: &str) -> Result<MorphId> {
    cat.find_morphism(name).with_context(|| format!("unknown morphism '{name}'"))
}

fn mref(cat: &FiniteCategory, name: &str) -> Result<MorphRef> {
    Ok(MorphRef::of(cat, morphism(cat, name)?))
}

fn names(cat: &FiniteCategory, ids: &[ObjId]) -> Vec<String> {
    ids.iter().map(|&o| cat.name(o).to_string()).collect()
}

fn morph_names(cat: &FiniteCategory, ids: &[MorphId]) -> Vec<String> {
    ids.iter().map(|&f| cat.morphism_name(f).to_string()).collect()
}
