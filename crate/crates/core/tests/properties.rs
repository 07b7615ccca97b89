use std::sync::OnceLock;

use nilaw_core::catalog::{self, GroupSpec};
use nilaw_core::density::{exact_density, mc_density};
use nilaw_core::formats::{parse_cayley, to_cayley};
use nilaw_core::{Element, Group};
use proptest::prelude::*;

const SMALL: &[&str] = &[
    "C1", "C5", "C6", "V4", "S3", "D4", "Q8", "D5", "A4", "D6", "C2 x S3", "heisenberg(3)", "S4", "C3 x Q8",
];

fn groups() -> &'static [Group] {
    static GROUPS: OnceLock<Vec<Group>> = OnceLock::new();
    GROUPS.get_or_init(|| {
        SMALL
            .iter()
            .map(|s| s.parse::<GroupSpec>().unwrap().build().unwrap())
            .collect()
    })
}

fn el(g: &Group, i: usize) -> Element {
    g.element(i % g.order()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms(gi in 0..SMALL.len(), a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let g = &groups()[gi];
        let (a, b, c) = (el(g, a), el(g, b), el(g, c));
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.identity()), a);
        prop_assert_eq!(g.mul(g.identity(), a), a);
        prop_assert!(g.mul(a, g.inv(a)).is_identity());
        prop_assert!(g.mul(g.inv(a), a).is_identity());
    }

    #[test]
    fn commutator_is_trivial_iff_elements_commute(gi in 0..SMALL.len(), a in 0usize..1000, b in 0usize..1000) {
        let g = &groups()[gi];
        let (a, b) = (el(g, a), el(g, b));
        prop_assert_eq!(g.commutator(a, b).is_identity(), g.mul(a, b) == g.mul(b, a));
        prop_assert_eq!(g.commutator(a, b), g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b)));
    }

    #[test]
    fn commutator_expansion(gi in 0..SMALL.len(), a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let g = &groups()[gi];
        prop_assume!(g.order() <= 24);
        let (a, b, c) = (el(g, a), el(g, b), el(g, c));
        // [ab,c] = [a,c]^b [b,c]
        let lhs = g.commutator(g.mul(a, b), c);
        let rhs = g.mul(g.conjugate(g.commutator(a, c), b), g.commutator(b, c));
        prop_assert_eq!(lhs, rhs);
        // [a,bc] = [a,c] [a,b]^c
        let lhs = g.commutator(a, g.mul(b, c));
        let rhs = g.mul(g.commutator(a, c), g.conjugate(g.commutator(a, b), c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn generated_subgroups_obey_lagrange(gi in 0..SMALL.len(), gens in prop::collection::vec(0usize..1000, 0..3)) {
        let g = &groups()[gi];
        let gens: Vec<Element> = gens.into_iter().map(|i| el(g, i)).collect();
        let h = g.generate_subgroup(&gens);
        prop_assert_eq!(g.order() % h.order(), 0);
        for &x in &gens {
            prop_assert!(h.contains(x));
        }
        for a in h.members() {
            prop_assert!(h.contains(g.inv(a)));
            for b in h.members() {
                prop_assert!(h.contains(g.mul(a, b)));
            }
        }
    }

    #[test]
    fn mc_density_is_reproducible(seed in any::<u64>(), gi in 0..SMALL.len()) {
        let g = &groups()[gi];
        let a = mc_density(g, 2, 3000, seed).unwrap();
        let b = mc_density(g, 2, 3000, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn density_is_nondecreasing_in_k() {
    for g in groups() {
        let mut last = None;
        for k in 1..=4 {
            let d = exact_density(g, k, u128::MAX).unwrap().exact().unwrap();
            if let Some(prev) = last {
                assert!(d >= prev, "{}: k={k}", g.name());
            }
            last = Some(d);
        }
    }
}

#[test]
fn density_is_multiplicative_over_products() {
    let pairs = [("S3", "Q8"), ("D4", "S3"), ("C3", "A4"), ("S3", "S3")];
    for (a, b) in pairs {
        let ga = catalog::build(&a.parse().unwrap(), 2048).unwrap();
        let gb = catalog::build(&b.parse().unwrap(), 2048).unwrap();
        let gp = catalog::product(&ga, &gb, 2048).unwrap();
        for k in 1..=3 {
            let d = |g: &Group| exact_density(g, k, u128::MAX).unwrap().exact().unwrap();
            assert_eq!(d(&gp), d(&ga) * d(&gb), "{a} x {b}, k={k}");
        }
    }
}

#[test]
fn class_two_iff_three_fold_law_small_groups() {
    for spec in catalog::standard_catalog(30) {
        let g = spec.build().unwrap();
        let law = g
            .elements()
            .all(|a| g.elements().all(|b| g.elements().all(|c| g.iterated_commutator(&[a, b, c]).unwrap().is_identity())));
        let class = g.whole().nilpotency_class();
        assert_eq!(law, class.is_some_and(|c| c <= 2), "{spec}");
    }
}

#[test]
fn specs_and_tables_round_trip() {
    for spec in catalog::standard_catalog(60) {
        let again: GroupSpec = spec.to_string().parse().unwrap();
        assert_eq!(again, spec);
        let g = spec.build().unwrap();
        let h = parse_cayley(&to_cayley(&g)).unwrap();
        assert_eq!(g.table(), h.table(), "{spec}");
    }
}
