use std::collections::BTreeSet;

use nilaw_core::catalog::{self, GroupSpec};
use nilaw_core::density::{commuting_probability_via_classes, exact_density, wilson_interval, WILSON_Z};
use nilaw_core::lemma::{verify_lemma_exhaustive, verify_lemma_randomized, DEFAULT_SEARCH_BUDGET};
use nilaw_core::{Element, Group, TranslationPattern};
use num_rational::Ratio;

/// Plain enumeration of all (k+1)-tuples with explicit a^-1 b^-1 a b.
fn brute_force_density(g: &Group, k: usize) -> Ratio<u128> {
    let n = g.order();
    let comm = |a: Element, b: Element| g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b));
    let mut hits = 0u128;
    let mut idx = vec![0usize; k + 1];
    loop {
        let mut c = g.element(idx[0]).unwrap();
        for &i in &idx[1..] {
            c = comm(c, g.element(i).unwrap());
        }
        hits += u128::from(c.is_identity());
        let mut pos = k + 1;
        loop {
            if pos == 0 {
                return Ratio::new(hits, (n as u128).pow(k as u32 + 1));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Conjugacy classes by explicit orbit enumeration.
fn class_count(g: &Group) -> usize {
    let mut seen = BTreeSet::new();
    let mut classes = 0;
    for a in g.elements() {
        if seen.insert(a) {
            classes += 1;
            for b in g.elements() {
                seen.insert(g.mul(g.mul(g.inv(b), a), b));
            }
        }
    }
    classes
}

fn group(s: &str) -> Group {
    s.parse::<GroupSpec>().unwrap().build().unwrap()
}

#[test]
fn exact_density_matches_brute_force() {
    for s in ["S3", "Q8", "D4", "A4", "C2 x S3", "D5", "heisenberg(3)"] {
        let g = group(s);
        for k in 1..=3 {
            if (g.order() as u128).pow(k as u32 + 1) > 2_000_000 {
                continue;
            }
            let d = exact_density(&g, k, u128::MAX).unwrap().exact().unwrap();
            assert_eq!(d, brute_force_density(&g, k), "{s} k={k}");
        }
    }
    let s3 = group("S3");
    assert_eq!(brute_force_density(&s3, 1), Ratio::new(1, 2));
    assert_eq!(brute_force_density(&s3, 2), Ratio::new(3, 4));
}

#[test]
fn commuting_density_counts_classes() {
    for spec in catalog::standard_catalog(120) {
        let g = spec.build().unwrap();
        let d = exact_density(&g, 1, u128::MAX).unwrap().exact().unwrap();
        assert_eq!(d, Ratio::new(class_count(&g) as u128, g.order() as u128), "{spec}");
        assert_eq!(d, commuting_probability_via_classes(&g), "{spec}");
    }
}

#[test]
fn known_class_counts() {
    for (s, k) in [("S3", 3), ("Q8", 5), ("D4", 5), ("A4", 4), ("S4", 5), ("A5", 5), ("heisenberg(3)", 11)] {
        assert_eq!(class_count(&group(s)), k, "{s}");
    }
}

#[test]
fn wilson_interval_reference_values() {
    let (lo, hi) = wilson_interval(81, 100, WILSON_Z);
    assert!((lo - 0.7222).abs() < 1e-4 && (hi - 0.8749).abs() < 1e-4, "{lo} {hi}");
    let (lo, hi) = wilson_interval(0, 50, WILSON_Z);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.0 && hi < 0.1);
}

#[test]
fn sampled_premise_rate_tracks_exhaustive_rate() {
    let p = TranslationPattern::canonical_right();
    for s in ["S3", "D4"] {
        let g = group(s);
        let full = verify_lemma_exhaustive(&g, &p, DEFAULT_SEARCH_BUDGET).unwrap();
        let trials = 200_000u64;
        let sampled = verify_lemma_randomized(&g, &p, trials, 7).unwrap();
        let rate = full.premise_count as f64 / full.tuples_scanned as f64;
        let got = sampled.premise_count as f64 / trials as f64;
        let sigma = (rate * (1.0 - rate) / trials as f64).sqrt();
        assert!((got - rate).abs() <= 6.0 * sigma, "{s}: {got} vs {rate}");
        assert_eq!(sampled.violation_count, 0);
        assert_eq!(full.violation_count, 0);
    }
}

#[test]
fn class_two_groups_have_full_n2_density() {
    for s in ["heisenberg(3)", "Q8", "D4", "extraspecial(3,-)", "C2 x Q8"] {
        let g = group(s);
        assert_eq!(exact_density(&g, 2, u128::MAX).unwrap().exact().unwrap(), Ratio::from_integer(1), "{s}");
    }
}
