//! Seeded random instances for the cancellation lemma on truncated sequences.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rw_core::category::FiniteCategory;
use rw_core::sequences::{enumerate_transformations, mono_test, Transformation, TruncatedSequence};
use rw_core::{Result, Status};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MonotestStats {
    pub instances: usize,
    pub attempts: usize,
    pub premise_holds: usize,
    pub premise_unknown: usize,
    pub violations: usize,
    pub first_violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub f: Transformation,
    pub g: Transformation,
    pub h: Transformation,
}

/// A chain `X_0 → … → X_{len-1}` with random objects and random steps.
pub fn random_sequence(cat: &FiniteCategory, len: usize, rng: &mut impl Rng) -> TruncatedSequence {
    let objs: Vec<_> = cat.objects().collect();
    let mut objects = vec![*objs.choose(rng).expect("nonempty category")];
    let mut steps = Vec::new();
    while objects.len() < len {
        let last = *objects.last().unwrap();
        let next: Vec<_> = objs.iter().copied().filter(|&o| cat.arrow(last, o)).collect();
        let o = *next.choose(rng).expect("identity arrow exists");
        steps.push(*cat.hom(last, o).choose(rng).unwrap());
        objects.push(o);
    }
    TruncatedSequence::from_steps(cat, objects, &steps).expect("well-formed chain")
}

fn names(cat: &FiniteCategory, s: &TruncatedSequence) -> Vec<String> {
    s.objects().iter().map(|&o| cat.name(o).to_string()).collect()
}

/// Draws `samples` instances `(F, G, H)` with `G, H : X → Y` and `F : Y → Z`
/// and counts those where `F·G ≈ F·H` holds but `G ≈ H` fails.
pub fn run(cat: &FiniteCategory, samples: usize, len: usize, seed: u64) -> Result<MonotestStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = MonotestStats::default();
    while stats.instances < samples && stats.attempts < samples.saturating_mul(50).max(50) {
        stats.attempts += 1;
        let (x, y, z) = (random_sequence(cat, len, &mut rng), random_sequence(cat, len, &mut rng), random_sequence(cat, len, &mut rng));
        let gs = enumerate_transformations(cat, &x, &y);
        let fs = enumerate_transformations(cat, &y, &z);
        if gs.is_empty() || fs.is_empty() {
            continue;
        }
        let f = fs.choose(&mut rng).unwrap();
        let g = gs.choose(&mut rng).unwrap();
        let h = gs.choose(&mut rng).unwrap();
        let t = mono_test(cat, f, g, h, (&x, &y, &z), usize::MAX)?;
        stats.instances += 1;
        match t.premise {
            Status::Holds => stats.premise_holds += 1,
            Status::Unknown => stats.premise_unknown += 1,
            Status::Fails => {}
        }
        if t.violation {
            stats.violations += 1;
            stats.first_violation.get_or_insert_with(|| Violation {
                x: names(cat, &x),
                y: names(cat, &y),
                z: names(cat, &z),
                f: f.clone(),
                g: g.clone(),
                h: h.clone(),
            });
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rw_core::catalog::linear_orders;

    #[test]
    fn seeded_runs_repeat() {
        let cat = FiniteCategory::from_catalog(&linear_orders(4)).unwrap();
        let a = run(&cat, 50, 3, 7).unwrap();
        assert_eq!(a, run(&cat, 50, 3, 7).unwrap());
        assert_eq!(a.instances, 50);
        assert_eq!(a.violations, 0);
        assert!(a.premise_holds > 0);
    }
}
