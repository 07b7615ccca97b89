//! Second evaluation path for lemma instances.
//!
//! Shares nothing with the search kernels beyond `Group::mul` and
//! `Group::inv`: commutators are multiplied out as `a⁻¹·b⁻¹·a·b`, rows are
//! visited last to first, and every step is written to a transcript.

use crate::group::{Element, Group};
use crate::pattern::{Side, TranslationPattern};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recheck {
    pub premises_hold: bool,
    pub failing_rows: Vec<usize>,
    pub conclusion: Element,
    pub transcript: Vec<String>,
}

impl Recheck {
    /// Premises all hold and the conclusion fails.
    pub fn is_counterexample(&self) -> bool {
        self.premises_hold && !self.conclusion.is_identity()
    }
}

fn bracket(g: &Group, a: Element, b: Element) -> Element {
    let a_inv = g.inv(a);
    let b_inv = g.inv(b);
    g.mul(g.mul(g.mul(a_inv, b_inv), a), b)
}

fn left_normed(g: &Group, xs: &[Element]) -> Element {
    let mut acc = xs[0];
    let mut i = 1;
    while i < xs.len() {
        acc = bracket(g, acc, xs[i]);
        i += 1;
    }
    acc
}

fn fmt_tuple(xs: &[Element]) -> String {
    let parts: Vec<String> = xs.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn recheck_instance(
    g: &Group,
    pattern: &TranslationPattern,
    x: &[Element],
    gs: &[Element],
) -> Recheck {
    let arity = pattern.arity();
    assert!(x.len() == arity && gs.len() == arity, "instance arity mismatch");
    let mut transcript = vec![format!("x = {}, g = {}", fmt_tuple(x), fmt_tuple(gs))];
    let mut failing_rows = Vec::new();
    for r in (0..pattern.rows().len()).rev() {
        let row = &pattern.rows()[r];
        let coords: Vec<Element> = (0..arity)
            .map(|c| {
                let shift = match row[c] {
                    0 => return x[c],
                    i => gs[i as usize - 1],
                };
                match pattern.side() {
                    Side::Right => g.mul(x[c], shift),
                    Side::Left => g.mul(shift, x[c]),
                }
            })
            .collect();
        let value = left_normed(g, &coords);
        transcript.push(format!(
            "premise {:>2} {} at {} = {}",
            r + 1,
            pattern.symbolic_row(r),
            fmt_tuple(&coords),
            value
        ));
        if !value.is_identity() {
            failing_rows.push(r);
        }
    }
    failing_rows.reverse();
    let conclusion = left_normed(g, gs);
    let names: Vec<String> = (1..=arity).map(|i| format!("g{i}")).collect();
    transcript.push(format!("conclusion [{}] = {}", names.join(","), conclusion));
    Recheck {
        premises_hold: failing_rows.is_empty(),
        failing_rows,
        conclusion,
        transcript,
    }
}

/// `[a_1, ..., a_m]` by the same multiplied-out route, for certificate checks.
pub fn commutator_value(g: &Group, xs: &[Element]) -> Element {
    if xs.is_empty() {
        Element::IDENTITY
    } else {
        left_normed(g, xs)
    }
}
