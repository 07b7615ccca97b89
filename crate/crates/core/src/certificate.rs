//! Certificate bundles emitted by a replay, and their independent check.
//!
//! The checker recomputes everything from the multiplication table through
//! [`crate::recheck`]; it does not touch the witness set, the search kernels
//! or the admissibility search.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{Element, Group};
use crate::pattern::CANONICAL_ROWS;
use crate::recheck::commutator_value;
use crate::replay::ReplayResult;

pub const BUNDLE_FORMAT: &str = "nilaw-certificate/1";

/// `x` witnesses that `(g_1, g_2, g_3)` passes the translate-intersection test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub g: [Element; 3],
    pub x: [Element; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBundle {
    pub format: String,
    pub group: String,
    pub order: usize,
    pub u: Vec<Element>,
    pub h_order: usize,
    pub h_class: Option<usize>,
    pub entries: Vec<CertificateEntry>,
}

impl CertificateBundle {
    pub fn new(spec: &str, result: &ReplayResult) -> Self {
        Self {
            format: BUNDLE_FORMAT.to_string(),
            group: spec.to_string(),
            order: result.order,
            u: result.u.clone(),
            h_order: result.h_order,
            h_class: result.h_class,
            entries: result.certificates.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyFailure {
    pub item: String,
    pub reason: String,
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.item, self.reason)
    }
}

impl std::error::Error for VerifyFailure {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub entries_checked: usize,
    pub premises_checked: usize,
    pub u_size: usize,
    pub h_order: usize,
    pub h_class: Option<usize>,
}

fn fail(item: impl Into<String>, reason: impl Into<String>) -> VerifyFailure {
    VerifyFailure {
        item: item.into(),
        reason: reason.into(),
    }
}

fn show(t: &[Element; 3]) -> String {
    format!("({},{},{})", t[0], t[1], t[2])
}

/// Rechecks a bundle against `g`. The all-identity triple may be omitted:
/// `x = (1,1,1)` witnesses it in every group.
pub fn verify_bundle(g: &Group, bundle: &CertificateBundle) -> Result<VerifySummary, VerifyFailure> {
    let n = g.order();
    if bundle.format != BUNDLE_FORMAT {
        return Err(fail("format", format!("expected '{BUNDLE_FORMAT}', found '{}'", bundle.format)));
    }
    if bundle.order != n {
        return Err(fail("order", format!("bundle says {}, group has {n}", bundle.order)));
    }
    let in_range = |e: &Element| e.index() < n;
    if let Some(bad) = bundle.u.iter().find(|e| !in_range(e)) {
        return Err(fail(format!("u element {bad}"), "not an element of the group"));
    }
    let u: BTreeSet<Element> = bundle.u.iter().copied().collect();
    if !u.contains(&g.identity()) {
        return Err(fail("u", "does not contain the identity"));
    }
    if let Some(&m) = u.iter().find(|&&m| !u.contains(&g.inv(m))) {
        return Err(fail(format!("u element {m}"), "its inverse is missing"));
    }

    let mut covered = BTreeSet::new();
    let mut premises = 0;
    for entry in &bundle.entries {
        let item = format!("entry g={} x={}", show(&entry.g), show(&entry.x));
        if !entry.g.iter().chain(&entry.x).all(in_range) {
            return Err(fail(item, "index out of range"));
        }
        if !entry.g.iter().all(|e| u.contains(e)) {
            return Err(fail(item, "g is not a triple from u"));
        }
        for (r, row) in CANONICAL_ROWS.iter().enumerate() {
            let mut t = entry.x;
            for c in 0..3 {
                if row[c] != 0 {
                    t[c] = g.mul(entry.x[c], entry.g[row[c] as usize - 1]);
                }
            }
            let value = commutator_value(g, &t);
            premises += 1;
            if !value.is_identity() {
                return Err(fail(
                    item,
                    format!("translate {} = {} is not in N_2: commutator is {value}", r + 1, show(&t)),
                ));
            }
        }
        let conclusion = commutator_value(g, &entry.g);
        if !conclusion.is_identity() {
            return Err(fail(item, format!("[g1,g2,g3] = {conclusion}")));
        }
        covered.insert(entry.g);
    }
    let e = g.identity();
    for &a in &u {
        for &b in &u {
            for &c in &u {
                let t = [a, b, c];
                if t != [e; 3] && !covered.contains(&t) {
                    return Err(fail(format!("triple g={}", show(&t)), "no certificate entry"));
                }
            }
        }
    }

    let gens: Vec<Element> = u.iter().copied().collect();
    let h = g.generate_subgroup(&gens);
    let h_class = h.nilpotency_class();
    if h.order() != bundle.h_order {
        return Err(fail("h_order", format!("bundle says {}, <u> has order {}", bundle.h_order, h.order())));
    }
    if h_class != bundle.h_class {
        return Err(fail("h_class", format!("bundle says {:?}, <u> has class {h_class:?}", bundle.h_class)));
    }
    if !h_class.is_some_and(|c| c <= 2) {
        return Err(fail("h_class", format!("<u> has class {h_class:?}, above 2")));
    }
    Ok(VerifySummary {
        entries_checked: bundle.entries.len(),
        premises_checked: premises,
        u_size: u.len(),
        h_order: h.order(),
        h_class,
    })
}
