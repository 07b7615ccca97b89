//! Finite replay of the class-2 argument.
//!
//! `X = N_2(G)` is stored as a bitset over `G³`. A symmetric set `U ∋ 1` is
//! admissible when every `(g_1, g_2, g_3) ∈ U³` has a witness `x ∈ X` whose
//! eleven structured translates (rows 2..12 of the canonical pattern) all
//! lie in `X`. By the lemma every such triple satisfies `[g_1, g_2, g_3] = 1`,
//! so `H = ⟨U⟩` has class at most 2; its index `[G : H]` is the finite stand-in
//! for openness.
//!
//! `U` is grown greedily from `{1}`: candidates are tried in index order and
//! each `u` enters together with `u⁻¹` when the enlarged set stays admissible.
//! Adding elements only adds triples, so a candidate rejected once stays
//! rejected and a single pass yields a set no single candidate can extend.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{CertificateBundle, CertificateEntry};
use crate::density::{exact_density, DensityEstimate};
use crate::error::{Error, Result};
use crate::group::{CommutatorTable, Element, Group};
use crate::lemma::{conclusion_holds, premises_hold, LemmaInstance};
use crate::pattern::{Side, TranslationPattern};

/// Largest order for which `X` (`n³` bits) is materialized by default.
pub const DEFAULT_WITNESS_MAX_ORDER: usize = 512;

pub type Triple = [Element; 3];

/// Membership bitset of `N_2(G)`, bit `x_1 n² + x_2 n + x_3`.
#[derive(Clone, Debug)]
pub struct WitnessSet {
    order: usize,
    bits: FixedBitSet,
}

impl WitnessSet {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn index(&self, t: Triple) -> usize {
        let n = self.order;
        (t[0].index() * n + t[1].index()) * n + t[2].index()
    }

    #[inline]
    pub fn contains(&self, t: Triple) -> bool {
        self.bits.contains(self.index(t))
    }

    pub fn count(&self) -> u64 {
        self.bits.count_ones(..) as u64
    }

    pub fn density(&self) -> Ratio<u128> {
        Ratio::new(self.count() as u128, (self.order as u128).pow(3))
    }

    /// Members in odometer order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        let n = self.order;
        self.bits.ones().map(move |i| {
            [
                Element::from_raw((i / (n * n)) as u32),
                Element::from_raw((i / n % n) as u32),
                Element::from_raw((i % n) as u32),
            ]
        })
    }
}

pub fn build_witness_set(g: &Group, max_order: usize) -> Result<WitnessSet> {
    let n = g.order();
    if n > max_order {
        return Err(Error::Budget {
            what: "witness set",
            required: (n as u128).pow(3),
            budget: (max_order as u128).pow(3),
            hint: " bits",
        });
    }
    let comm = CommutatorTable::new(g);
    let slabs: Vec<Vec<usize>> = g
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x1| {
            let mut ones = Vec::new();
            for x2 in g.elements() {
                let c = comm.get(x1, x2);
                for x3 in g.elements() {
                    if comm.get(c, x3).is_identity() {
                        ones.push((x1.index() * n + x2.index()) * n + x3.index());
                    }
                }
            }
            ones
        })
        .collect();
    let mut bits = FixedBitSet::with_capacity(n * n * n);
    for slab in slabs {
        bits.extend(slab);
    }
    Ok(WitnessSet { order: n, bits })
}

/// The row-`r` translate of `x` by `gs` under a right-sided pattern.
#[inline]
fn translated(g: &Group, row: &[u8], x: Triple, gs: Triple) -> Triple {
    let mut out = x;
    for c in 0..3 {
        if row[c] != 0 {
            out[c] = g.mul(x[c], gs[row[c] as usize - 1]);
        }
    }
    out
}

/// First `x ∈ X` (odometer order) whose pattern translates by `gs` all lie in
/// `X`, i.e. a point of `X ∩ Xū_1 ∩ ... ∩ Xū_11`.
pub fn translate_intersection_nonempty(
    g: &Group,
    witnesses: &WitnessSet,
    pattern: &TranslationPattern,
    gs: Triple,
) -> Option<Triple> {
    assert!(
        pattern.arity() == 3 && pattern.side() == Side::Right,
        "translate intersections use right-sided arity-3 patterns"
    );
    let rows = &pattern.rows()[1..];
    witnesses
        .iter()
        .find(|&x| rows.iter().all(|row| witnesses.contains(translated(g, row, x, gs))))
}

/// `|A ∩ Au_1 ∩ ... ∩ Au_k| / |G|`.
pub fn measure_translate_intersection(g: &Group, set: &FixedBitSet, us: &[Element]) -> Ratio<u128> {
    let inverses: Vec<Element> = us.iter().map(|&u| g.inv(u)).collect();
    let count = set
        .ones()
        .filter(|&i| i < g.order())
        .map(|i| Element::from_raw(i as u32))
        .filter(|&y| inverses.iter().all(|&ui| set.contains(g.mul(y, ui).index())))
        .count();
    Ratio::new(count as u128, g.order() as u128)
}

/// A symmetric identity-containing set with one witness per triple of `U³`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    pub members: Vec<Element>,
    pub certificates: Vec<CertificateEntry>,
}

impl AdmissibleSet {
    pub fn contains(&self, e: Element) -> bool {
        self.members.binary_search(&e).is_ok()
    }
}

/// Triples of `set³` with at least one coordinate in `fresh`, in
/// lexicographic order.
fn new_triples(set: &[Element], fresh: &[Element]) -> Vec<Triple> {
    let mut out = Vec::new();
    for &a in set {
        for &b in set {
            for &c in set {
                if fresh.contains(&a) || fresh.contains(&b) || fresh.contains(&c) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

pub fn find_admissible_u(
    g: &Group,
    witnesses: &WitnessSet,
    pattern: &TranslationPattern,
) -> AdmissibleSet {
    let e = g.identity();
    let mut members = vec![e];
    let mut certs: BTreeMap<Triple, Triple> = BTreeMap::new();
    if let Some(x) = translate_intersection_nonempty(g, witnesses, pattern, [e; 3]) {
        certs.insert([e; 3], x);
    }
    for u in g.elements().skip(1) {
        if members.contains(&u) {
            continue;
        }
        let mut fresh = vec![u, g.inv(u)];
        fresh.dedup();
        let mut candidate = members.clone();
        candidate.extend(&fresh);
        candidate.sort_unstable();
        let triples = new_triples(&candidate, &fresh);
        let found: Option<Vec<Triple>> = triples
            .par_iter()
            .map(|&t| translate_intersection_nonempty(g, witnesses, pattern, t))
            .collect();
        let Some(found) = found else {
            continue;
        };
        certs.extend(triples.into_iter().zip(found));
        members = candidate;
    }
    AdmissibleSet {
        members,
        certificates: certs
            .into_iter()
            .map(|(g, x)| CertificateEntry { g, x })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReplayOptions {
    pub witness_max_order: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            witness_max_order: DEFAULT_WITNESS_MAX_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayResult {
    pub group: String,
    pub order: usize,
    pub density: DensityEstimate,
    pub u: Vec<Element>,
    pub h: Vec<Element>,
    pub h_order: usize,
    pub index: usize,
    pub h_class: Option<usize>,
    pub certificates: Vec<CertificateEntry>,
}

impl ReplayResult {
    pub fn bundle(&self, spec: &str) -> CertificateBundle {
        CertificateBundle::new(spec, self)
    }
}

/// Witness set, admissible `U`, `H = ⟨U⟩` and its class, with every
/// certificate rechecked through the lemma engine.
pub fn replay(g: &Group, opts: &ReplayOptions) -> Result<ReplayResult> {
    let witnesses = build_witness_set(g, opts.witness_max_order)?;
    let density = exact_density(g, 2, u128::MAX)?;
    if density.exact() != Some(witnesses.density()) {
        return Err(Error::Soundness(format!(
            "witness set density {} disagrees with exact density {:?}",
            witnesses.density(),
            density.exact()
        )));
    }

    let pattern = TranslationPattern::canonical_right();
    let admissible = find_admissible_u(g, &witnesses, &pattern);

    for entry in &admissible.certificates {
        let inst = LemmaInstance::new(&entry.x, &entry.g);
        if !premises_hold(g, &pattern, &inst)?.all() {
            return Err(Error::Soundness(format!(
                "certificate x = {:?} for g = {:?} fails a premise",
                entry.x, entry.g
            )));
        }
        if !conclusion_holds(g, &inst)? {
            return Err(Error::Soundness(format!(
                "g = {:?} has a certificate but [g1,g2,g3] != 1",
                entry.g
            )));
        }
    }

    let h = g.generate_subgroup(&admissible.members);
    let h_class = h.nilpotency_class();
    if !h_class.is_some_and(|c| c <= 2) {
        return Err(Error::Soundness(format!(
            "<U> of order {} has class {:?}, expected at most 2",
            h.order(),
            h_class
        )));
    }
    Ok(ReplayResult {
        group: g.name().to_string(),
        order: g.order(),
        density,
        h: h.members().collect(),
        h_order: h.order(),
        index: h.index(),
        h_class,
        u: admissible.members,
        certificates: admissible.certificates,
    })
}
