//! Counting density of `N_k(G) = {(x_1, ..., x_{k+1}) : [x_1, ..., x_{k+1}] = 1}`
//! in `G^{k+1}`, exactly or by uniform sampling.

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::group::{CommutatorTable, Group};
use crate::sampling;

/// Default step budget for [`exact_density`].
pub const DEFAULT_DENSITY_BUDGET: u128 = 1_000_000_000;

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DensityEstimate {
    /// `count / total` with `total = |G|^{k+1}`, unreduced.
    Exact { k: usize, count: u128, total: u128 },
    Sampled {
        k: usize,
        hits: u64,
        samples: u64,
        seed: u64,
        estimate: f64,
        ci_low: f64,
        ci_high: f64,
    },
}

impl DensityEstimate {
    pub fn k(&self) -> usize {
        match self {
            DensityEstimate::Exact { k, .. } | DensityEstimate::Sampled { k, .. } => *k,
        }
    }

    /// The reduced fraction, for exact estimates.
    pub fn exact(&self) -> Option<Ratio<u128>> {
        match self {
            DensityEstimate::Exact { count, total, .. } => Some(Ratio::new(*count, *total)),
            DensityEstimate::Sampled { .. } => None,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            DensityEstimate::Exact { count, total, .. } => *count as f64 / *total as f64,
            DensityEstimate::Sampled { estimate, .. } => *estimate,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match self {
            DensityEstimate::Exact { .. } => (self.value(), self.value()),
            DensityEstimate::Sampled { ci_low, ci_high, .. } => (*ci_low, *ci_high),
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("k must be a positive integer".into()));
    }
    Ok(())
}

/// Exact `|N_k(G)| / |G|^{k+1}`.
///
/// The last coordinate collapses to a centralizer size, and the number of
/// completions of a prefix depends only on the prefix's commutator, so the
/// count is a `k`-step recursion over elements:
/// `f_0(c) = |C_G(c)|`, `f_r(c) = Σ_x f_{r-1}([c, x])`, `|N_k| = Σ_x f_{k-1}(x)`.
pub fn exact_density(g: &Group, k: usize, budget: u128) -> Result<DensityEstimate> {
    check_k(k)?;
    let n = g.order();
    let steps = (k as u128).saturating_mul((n as u128).pow(2));
    check_budget("exact density", steps, budget, "; use sampled density instead")?;

    let comm = CommutatorTable::new(g);
    let mut completions: Vec<u128> = g.centralizer_sizes().into_iter().map(u128::from).collect();
    for _ in 1..k {
        completions = g
            .elements()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|c| g.elements().map(|x| completions[comm.get(c, x).index()]).sum())
            .collect();
    }
    let count = completions.iter().sum();
    let total = (n as u128).pow(k as u32 + 1);
    Ok(DensityEstimate::Exact { k, count, total })
}

/// Wilson score interval for `hits` successes in `samples` trials, widened if
/// needed so that it contains the point estimate.
pub fn wilson_interval(hits: u64, samples: u64, z: f64) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = (center - half).clamp(0.0, 1.0).min(p);
    let high = (center + half).clamp(0.0, 1.0).max(p);
    (low, high)
}

/// Proportion of `samples` uniform `(k+1)`-tuples with trivial commutator.
pub fn mc_density(g: &Group, k: usize, samples: u64, seed: u64) -> Result<DensityEstimate> {
    check_k(k)?;
    if samples == 0 {
        return Err(Error::Argument("samples must be at least 1".into()));
    }
    let comm = CommutatorTable::new(g);
    let hits: u64 = sampling::map_chunks(seed, samples, |rng, draws| {
        let mut hits = 0u64;
        for _ in 0..draws {
            let mut c = sampling::uniform_element(rng, g);
            for _ in 0..k {
                c = comm.get(c, sampling::uniform_element(rng, g));
            }
            hits += u64::from(c.is_identity());
        }
        hits
    })
    .into_iter()
    .sum();
    // In an abelian group every draw is a hit with certainty, so the interval
    // collapses rather than reporting Wilson's sampling width.
    let (ci_low, ci_high) = if g.is_abelian() {
        (1.0, 1.0)
    } else {
        wilson_interval(hits, samples, WILSON_Z)
    };
    Ok(DensityEstimate::Sampled {
        k,
        hits,
        samples,
        seed,
        estimate: hits as f64 / samples as f64,
        ci_low,
        ci_high,
    })
}

/// Number of conjugacy classes, by orbit enumeration.
pub fn conjugacy_class_count(g: &Group) -> usize {
    let mut seen = FixedBitSet::with_capacity(g.order());
    let mut classes = 0;
    for a in g.elements() {
        if seen.contains(a.index()) {
            continue;
        }
        classes += 1;
        for b in g.elements() {
            seen.insert(g.conjugate(a, b).index());
        }
    }
    classes
}

/// `k(G) / |G|`, which equals the density of commuting pairs.
pub fn commuting_probability_via_classes(g: &Group) -> Ratio<u128> {
    Ratio::new(conjugacy_class_count(g) as u128, g.order() as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GroupSpec;

    fn build(s: &str) -> Group {
        s.parse::<GroupSpec>().unwrap().build().unwrap()
    }

    /// Direct count over all tuples, without the centralizer collapse.
    fn brute_force(g: &Group, k: usize) -> Ratio<u128> {
        let n = g.order();
        let total = n.pow(k as u32 + 1);
        let mut tuple = vec![g.identity(); k + 1];
        let mut count = 0u128;
        for code in 0..total {
            let mut rest = code;
            for slot in tuple.iter_mut() {
                *slot = g.element(rest % n).unwrap();
                rest /= n;
            }
            if g.iterated_commutator(&tuple).unwrap().is_identity() {
                count += 1;
            }
        }
        Ratio::new(count, total as u128)
    }

    #[test]
    fn s3_values_match_oracle() {
        let g = build("S3");
        assert_eq!(brute_force(&g, 1), Ratio::new(1, 2));
        assert_eq!(brute_force(&g, 2), Ratio::new(3, 4));
        let e1 = exact_density(&g, 1, DEFAULT_DENSITY_BUDGET).unwrap();
        let e2 = exact_density(&g, 2, DEFAULT_DENSITY_BUDGET).unwrap();
        assert_eq!(e1.exact(), Some(Ratio::new(1, 2)));
        assert_eq!(e2.exact(), Some(Ratio::new(3, 4)));
        assert_eq!(e2, DensityEstimate::Exact { k: 2, count: 162, total: 216 });
    }

    #[test]
    fn exact_agrees_with_brute_force_on_small_groups() {
        for s in ["Q8", "D5", "A4", "C2 x S3"] {
            let g = build(s);
            for k in 1..=3 {
                if g.order().pow(k as u32 + 1) > 3_000_000 {
                    continue;
                }
                let exact = exact_density(&g, k, DEFAULT_DENSITY_BUDGET).unwrap();
                assert_eq!(exact.exact().unwrap(), brute_force(&g, k), "{s} k={k}");
            }
        }
    }

    #[test]
    fn abelian_density_is_one() {
        let g = build("C4 x C3");
        for k in 1..4 {
            assert_eq!(
                exact_density(&g, k, DEFAULT_DENSITY_BUDGET).unwrap().exact(),
                Some(Ratio::from_integer(1))
            );
        }
        let mc = mc_density(&g, 2, 500, 7).unwrap();
        assert_eq!(mc.value(), 1.0);
        assert_eq!(mc.interval().1, 1.0);
    }

    #[test]
    fn class_counts() {
        assert_eq!(commuting_probability_via_classes(&build("S3")), Ratio::new(1, 2));
        assert_eq!(commuting_probability_via_classes(&build("Q8")), Ratio::new(5, 8));
        assert_eq!(commuting_probability_via_classes(&build("C5")), Ratio::from_integer(1));
        assert_eq!(conjugacy_class_count(&build("S4")), 5);
    }

    #[test]
    fn budget_and_argument_errors() {
        let g = build("S4");
        assert!(matches!(exact_density(&g, 2, 100), Err(Error::Budget { .. })));
        assert!(matches!(exact_density(&g, 0, 100), Err(Error::Argument(_))));
        assert!(matches!(mc_density(&g, 1, 0, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn single_sample_on_trivial_group() {
        let g = build("trivial");
        let mc = mc_density(&g, 2, 1, 0).unwrap();
        assert_eq!(mc.value(), 1.0);
        assert_eq!(mc.interval(), (1.0, 1.0));
    }

    #[test]
    fn abelian_interval_is_degenerate() {
        let mc = mc_density(&build("C12"), 1, 5000, 3).unwrap();
        assert_eq!(mc.value(), 1.0);
        assert_eq!(mc.interval(), (1.0, 1.0));
        let (lo, hi) = mc_density(&build("Q8"), 2, 5000, 3).unwrap().interval();
        assert!(lo < 1.0 && hi == 1.0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let g = build("S3");
        let a = mc_density(&g, 2, 40_000, 11).unwrap();
        let b = mc_density(&g, 2, 40_000, 11).unwrap();
        assert_eq!(a, b);
        let c = mc_density(&g, 2, 40_000, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 10, WILSON_Z);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 1.0);
        let (lo, hi) = wilson_interval(10, 10, WILSON_Z);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
        // textbook value: 81/100 -> (0.7222, 0.8749)
        let (lo, hi) = wilson_interval(81, 100, WILSON_Z);
        assert!((lo - 0.7222).abs() < 1e-3 && (hi - 0.8749).abs() < 1e-3);
    }
}
