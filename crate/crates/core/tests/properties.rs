use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::Index;

use rw_core::arrows::{arrow_check, verify_bad_coloring, ArrowOptions};
use rw_core::catalog::{graph, graphs, linear_orders};
use rw_core::category::{skeletonize, FiniteCategory, ObjId};
use rw_core::expansion::{DegreeAssignment, Expander};
use rw_core::structures::{canonical_form, Structure};
use rw_core::Status;

fn lo() -> &'static FiniteCategory {
    static C: OnceLock<FiniteCategory> = OnceLock::new();
    C.get_or_init(|| FiniteCategory::from_catalog(&linear_orders(6)).unwrap())
}

fn g4() -> &'static FiniteCategory {
    static C: OnceLock<FiniteCategory> = OnceLock::new();
    C.get_or_init(|| FiniteCategory::from_catalog(&graphs(4)).unwrap())
}

fn random_graph() -> impl Strategy<Value = Structure> {
    (1usize..=5).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |bits| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(bits).filter(|(_, b)| *b).map(|(&p, _)| p).collect();
            graph(n, &edges)
        })
    })
}

/// `(A, B, C)` with `A → B`, small enough for exhaustive search.
fn triple(cat: &FiniteCategory, i: Index, j: Index, l: Index) -> Option<(ObjId, ObjId, ObjId)> {
    let n = cat.num_objects();
    let (a, b, c) = (i.index(n), j.index(n), l.index(n));
    (cat.arrow(a, b) && cat.hom(a, c).len() <= 12).then_some((a, b, c))
}

fn status(cat: &FiniteCategory, (a, b, c): (ObjId, ObjId, ObjId), k: usize, t: usize) -> Status {
    arrow_check(cat, c, b, a, k, t, ArrowOptions::default()).unwrap().status
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn more_allowed_colors_is_easier(i: Index, j: Index, l: Index, k in 1usize..=3, t in 1usize..=2, graphs_cat: bool) {
        let cat = if graphs_cat { g4() } else { lo() };
        let Some(x) = triple(cat, i, j, l) else { return Ok(()) };
        if status(cat, x, k, t) == Status::Holds {
            prop_assert_eq!(status(cat, x, k, t + 1), Status::Holds);
        }
    }

    #[test]
    fn fewer_colors_is_easier(i: Index, j: Index, l: Index, k in 2usize..=3, graphs_cat: bool) {
        let cat = if graphs_cat { g4() } else { lo() };
        let Some(x) = triple(cat, i, j, l) else { return Ok(()) };
        if status(cat, x, k, 1) == Status::Holds {
            prop_assert_eq!(status(cat, x, k - 1, 1), Status::Holds);
        }
    }

    #[test]
    fn larger_targets_inherit_arrows(i: Index, j: Index, l: Index, m: Index, k in 1usize..=2) {
        let cat = lo();
        let Some((a, b, c)) = triple(cat, i, j, l) else { return Ok(()) };
        let d = m.index(cat.num_objects());
        if cat.arrow(c, d) && status(cat, (a, b, c), k, 1) == Status::Holds {
            prop_assert_eq!(status(cat, (a, b, d), k, 1), Status::Holds);
        }
    }

    #[test]
    fn symmetry_breaking_is_sound(i: Index, j: Index, l: Index, k in 1usize..=3, t in 1usize..=2, graphs_cat: bool) {
        let cat = if graphs_cat { g4() } else { lo() };
        let Some((a, b, c)) = triple(cat, i, j, l) else { return Ok(()) };
        let with = arrow_check(cat, c, b, a, k, t, ArrowOptions::default()).unwrap();
        let without = arrow_check(cat, c, b, a, k, t, ArrowOptions { symmetry: false, ..Default::default() }).unwrap();
        prop_assert_eq!(with.status, without.status);
        for chi in [with.bad_coloring, without.bad_coloring].into_iter().flatten() {
            prop_assert!(verify_bad_coloring(cat, c, b, a, t, &chi).unwrap());
        }
    }

    #[test]
    fn canonical_form_is_a_class_invariant(s in random_graph(), seed: u64) {
        let n = s.size;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let (c, _) = canonical_form(&s);
        prop_assert_eq!(&canonical_form(&s.relabel(&perm)).0, &c);
        prop_assert_eq!(canonical_form(&c).0, c);
    }

    #[test]
    fn fibers_match_the_count_formula(t1 in 1u32..=2, t2 in 1u32..=2, obj: Index) {
        let cat = g4();
        let skel = skeletonize(cat).unwrap();
        let named: BTreeMap<String, u32> = [("K1".to_string(), t1), ("K2".to_string(), t2)].into_iter().collect();
        let ex = Expander::new(cat, skel.clone(), DegreeAssignment::new(cat, &skel, &named).unwrap());
        let c = obj.index(cat.num_objects());
        prop_assume!(ex.fiber_size(c) <= 4096.0);
        let all = ex.enumerate(c, 1 << 16).unwrap();
        prop_assert_eq!(all.len() as f64, ex.fiber_size(c));
        for x in all.iter().take(16) {
            prop_assert_eq!(ex.restriction(x, cat.identity(c)).unwrap(), x.clone());
        }
    }

    #[test]
    fn restriction_is_functorial(p: Index, q: Index, r: Index, pick: Index) {
        let cat = g4();
        let skel = skeletonize(cat).unwrap();
        let named: BTreeMap<String, u32> = [("K2".to_string(), 2)].into_iter().collect();
        let ex = Expander::new(cat, skel.clone(), DegreeAssignment::new(cat, &skel, &named).unwrap());
        let small: Vec<ObjId> = cat.objects().filter(|&c| ex.fiber_size(c) <= 4096.0).collect();
        let c = *r.get(&small);
        let below: Vec<ObjId> = cat.objects().filter(|&b| cat.arrow(b, c)).collect();
        let b = *q.get(&below);
        let below: Vec<ObjId> = cat.objects().filter(|&a| cat.arrow(a, b)).collect();
        let a = *p.get(&below);
        let cs = ex.enumerate(c, 1 << 16).unwrap();
        let z = pick.get(&cs);
        let g = cat.hom(b, c)[0];
        let f = cat.hom(a, b)[0];
        let step = ex.restriction(&ex.restriction(z, g).unwrap(), f).unwrap();
        prop_assert_eq!(step, ex.restriction(z, cat.compose(g, f)).unwrap());
        prop_assert_eq!(ex.morphism_check(g, &ex.restriction(z, g).unwrap(), z).unwrap().status, Status::Holds);
    }
}
