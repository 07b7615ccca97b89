//! The twelve-condition commutator lemma: premise evaluation, exhaustive and
//! sampled verification, and counterexample searches over its open variants
//! (left translations, length-4 commutators).
//!
//! Exhaustive sweeps visit `(x_1, ..., x_a, g_1, ..., g_a)` as an odometer
//! with `x_1` most significant and `g_a` fastest. Work is split into chunks
//! by the value of `x_1`, so chunk `i` of a sweep covers exactly the
//! instances with `x_1 = i` and a partial run can be resumed by chunk index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::group::{CommutatorTable, Element, Group};
use crate::pattern::{Side, TranslationPattern, MAX_ARITY};
use crate::recheck::recheck_instance;
use crate::sampling;

/// Default instance budget for sweeps and searches: `16^6 = 8^8`.
pub const DEFAULT_SEARCH_BUDGET: u128 = 1 << 24;
/// Violations kept (with transcripts) per report; all are counted.
pub const MAX_RECORDED: usize = 16;
/// Largest group accepted by [`proof_step_identities`].
pub const PROOF_STEP_MAX_ORDER: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaInstance {
    pub x: Vec<Element>,
    pub g: Vec<Element>,
}

impl LemmaInstance {
    pub fn new(x: &[Element], g: &[Element]) -> Self {
        Self {
            x: x.to_vec(),
            g: g.to_vec(),
        }
    }
}

/// One bit per pattern row, set when that premise holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PremiseMask {
    pub bits: u64,
    pub full: u64,
}

impl PremiseMask {
    pub fn all(&self) -> bool {
        self.bits == self.full
    }

    pub fn holds(&self, row: usize) -> bool {
        self.bits >> row & 1 == 1
    }
}

fn check_instance(g: &Group, pattern: &TranslationPattern, inst: &LemmaInstance) -> Result<()> {
    let a = pattern.arity();
    if inst.x.len() != a || inst.g.len() != a {
        return Err(Error::Argument(format!(
            "instance needs {a} x and {a} g elements"
        )));
    }
    if let Some(bad) = inst.x.iter().chain(&inst.g).find(|e| e.index() >= g.order()) {
        return Err(Error::Argument(format!("element {bad} is not in {}", g.name())));
    }
    Ok(())
}

fn translate(g: &Group, side: Side, x: Element, shift: Element) -> Element {
    match side {
        Side::Right => g.mul(x, shift),
        Side::Left => g.mul(shift, x),
    }
}

/// Evaluates every premise of `pattern` on `inst`.
pub fn premises_hold(
    g: &Group,
    pattern: &TranslationPattern,
    inst: &LemmaInstance,
) -> Result<PremiseMask> {
    check_instance(g, pattern, inst)?;
    let mut bits = 0u64;
    for (r, row) in pattern.rows().iter().enumerate() {
        let coords: Vec<Element> = row
            .iter()
            .zip(&inst.x)
            .map(|(&i, &x)| match i {
                0 => x,
                i => translate(g, pattern.side(), x, inst.g[i as usize - 1]),
            })
            .collect();
        if g.iterated_commutator(&coords)?.is_identity() {
            bits |= 1 << r;
        }
    }
    Ok(PremiseMask {
        bits,
        full: pattern.full_mask(),
    })
}

/// `[g_1, ..., g_a] = 1`.
pub fn conclusion_holds(g: &Group, inst: &LemmaInstance) -> Result<bool> {
    Ok(g.iterated_commutator(&inst.g)?.is_identity())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outcome {
    pub premises: bool,
    pub violation: bool,
    /// Premises held but one of the three intermediate relations of the
    /// canonical proof failed (canonical right pattern only).
    pub step_failure: bool,
}

/// Table-driven premise evaluation shared by the sweeps.
pub struct LemmaKernel<'a> {
    group: &'a Group,
    comm: CommutatorTable,
    pattern: &'a TranslationPattern,
    row_order: Vec<usize>,
    proof_steps: bool,
}

impl<'a> LemmaKernel<'a> {
    pub fn new(group: &'a Group, pattern: &'a TranslationPattern) -> Self {
        Self {
            group,
            comm: CommutatorTable::new(group),
            pattern,
            row_order: (0..pattern.rows().len()).collect(),
            proof_steps: pattern.is_canonical_right(),
        }
    }

    /// Evaluates premises in the given row order; short-circuiting makes
    /// rows that fail often worth putting first.
    pub fn with_row_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..self.pattern.rows().len()).collect::<Vec<_>>() {
            return Err(Error::Argument("row order must permute the pattern rows".into()));
        }
        self.row_order = order;
        Ok(self)
    }

    pub fn pattern(&self) -> &TranslationPattern {
        self.pattern
    }

    #[inline]
    fn row_value(&self, row: &[u8], x: &[Element], gs: &[Element]) -> Element {
        let g = self.group;
        let side = self.pattern.side();
        let coord = |c: usize| match row[c] {
            0 => x[c],
            i => translate(g, side, x[c], gs[i as usize - 1]),
        };
        let mut acc = coord(0);
        for c in 1..row.len() {
            acc = self.comm.get(acc, coord(c));
        }
        acc
    }

    /// Whether every premise holds.
    pub fn premises_all(&self, x: &[Element], gs: &[Element]) -> bool {
        let rows = self.pattern.rows();
        self.row_order
            .iter()
            .all(|&r| self.row_value(&rows[r], x, gs).is_identity())
    }

    pub fn conclusion(&self, gs: &[Element]) -> Element {
        self.comm.iterated(gs)
    }

    /// The relations `[x_1g_1, g_2, g_3] = 1`, `[x_1, g_2, g_1] = 1` and
    /// `[x_1, g_2, g_3] = 1` that the canonical premises imply.
    fn proof_steps_hold(&self, x: &[Element], gs: &[Element]) -> bool {
        let g = self.group;
        let c = &self.comm;
        c.triple(g.mul(x[0], gs[0]), gs[1], gs[2]).is_identity()
            && c.triple(x[0], gs[1], gs[0]).is_identity()
            && c.triple(x[0], gs[1], gs[2]).is_identity()
    }

    #[inline]
    pub fn evaluate(&self, x: &[Element], gs: &[Element]) -> Outcome {
        if !self.premises_all(x, gs) {
            return Outcome::default();
        }
        Outcome {
            premises: true,
            violation: !self.conclusion(gs).is_identity(),
            step_failure: self.proof_steps && !self.proof_steps_hold(x, gs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exhaustive,
    Randomized,
}

/// A confirmed instance whose premises all hold while `[g_1, ..., g_a] ≠ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub group: String,
    pub side: Side,
    pub pattern: Vec<Vec<u8>>,
    pub x: Vec<Element>,
    pub g: Vec<Element>,
    pub conclusion_value: Element,
    pub transcript: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub group: String,
    pub order: usize,
    pub side: Side,
    pub arity: usize,
    pub rows: usize,
    pub mode: ScanMode,
    /// `|G|^{2a}`.
    pub space_size: u128,
    pub tuples_scanned: u64,
    pub premise_count: u64,
    /// No instance satisfied the premises, so the sweep says nothing.
    pub vacuous: bool,
    pub violation_count: u64,
    pub violations: Vec<Counterexample>,
    pub proof_step_failures: Option<u64>,
    pub seed: Option<u64>,
}

impl LemmaReport {
    /// A violation of the canonical right-translated lemma, which is a
    /// theorem: only an implementation bug can produce one.
    pub fn contradicts_lemma(&self) -> bool {
        self.side == Side::Right
            && self.arity == 3
            && self.rows == 12
            && (self.violation_count > 0 || self.proof_step_failures.is_some_and(|f| f > 0))
    }
}

#[derive(Debug, Default)]
struct Tally {
    scanned: u64,
    premises: u64,
    violations: u64,
    step_failures: u64,
    recorded: Vec<LemmaInstance>,
}

impl Tally {
    fn absorb(&mut self, other: Tally) {
        self.scanned += other.scanned;
        self.premises += other.premises;
        self.violations += other.violations;
        self.step_failures += other.step_failures;
        let room = MAX_RECORDED.saturating_sub(self.recorded.len());
        self.recorded.extend(other.recorded.into_iter().take(room));
    }

    fn record(&mut self, outcome: Outcome, x: &[Element], gs: &[Element]) {
        self.scanned += 1;
        if outcome.premises {
            self.premises += 1;
            self.step_failures += u64::from(outcome.step_failure);
            if outcome.violation {
                self.violations += 1;
                if self.recorded.len() < MAX_RECORDED {
                    self.recorded.push(LemmaInstance::new(x, gs));
                }
            }
        }
    }
}

fn space_size(n: usize, arity: usize) -> u128 {
    (n as u128).saturating_pow(2 * arity as u32)
}

/// Writes the base-`n` digits of `code` into `out`, most significant first.
#[inline]
fn decode(mut code: usize, n: usize, out: &mut [Element]) {
    for slot in out.iter_mut().rev() {
        *slot = Element::from_raw((code % n) as u32);
        code /= n;
    }
}

/// Scans chunk `x1` of an exhaustive sweep.
fn scan_chunk(kernel: &LemmaKernel<'_>, x1: Element) -> Tally {
    let g = kernel.group;
    let n = g.order();
    let a = kernel.pattern.arity();
    let per_x = n.pow(a as u32);
    let mut x = [Element::IDENTITY; MAX_ARITY];
    let mut gs = [Element::IDENTITY; MAX_ARITY];
    x[0] = x1;
    let mut tally = Tally::default();
    for rest in 0..n.pow(a as u32 - 1) {
        decode(rest, n, &mut x[1..a]);
        // every pattern starts with the untranslated premise [x_1, ..., x_a]
        if !kernel.comm.iterated(&x[..a]).is_identity() {
            tally.scanned += per_x as u64;
            continue;
        }
        for code in 0..per_x {
            decode(code, n, &mut gs[..a]);
            let outcome = kernel.evaluate(&x[..a], &gs[..a]);
            tally.record(outcome, &x[..a], &gs[..a]);
        }
    }
    tally
}

fn finish(
    g: &Group,
    pattern: &TranslationPattern,
    mode: ScanMode,
    tally: Tally,
    seed: Option<u64>,
) -> Result<LemmaReport> {
    let violations = tally
        .recorded
        .iter()
        .map(|inst| confirm(g, pattern, inst))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport {
        group: g.name().to_string(),
        order: g.order(),
        side: pattern.side(),
        arity: pattern.arity(),
        rows: pattern.rows().len(),
        mode,
        space_size: space_size(g.order(), pattern.arity()),
        tuples_scanned: tally.scanned,
        premise_count: tally.premises,
        vacuous: tally.premises == 0,
        violation_count: tally.violations,
        violations,
        proof_step_failures: pattern.is_canonical_right().then_some(tally.step_failures),
        seed,
    })
}

/// Re-derives a kernel hit on the independent path before it is reported.
fn confirm(g: &Group, pattern: &TranslationPattern, inst: &LemmaInstance) -> Result<Counterexample> {
    let check = recheck_instance(g, pattern, &inst.x, &inst.g);
    if !check.is_counterexample() {
        return Err(Error::Soundness(format!(
            "kernel reported x = {:?}, g = {:?} as a counterexample but the recheck disagrees",
            inst.x, inst.g
        )));
    }
    Ok(Counterexample {
        group: g.name().to_string(),
        side: pattern.side(),
        pattern: pattern.rows().to_vec(),
        x: inst.x.clone(),
        g: inst.g.clone(),
        conclusion_value: check.conclusion,
        transcript: check.transcript,
    })
}

/// Checks every instance in `G^{2a}`.
pub fn verify_lemma_exhaustive(
    g: &Group,
    pattern: &TranslationPattern,
    budget: u128,
) -> Result<LemmaReport> {
    check_budget(
        "exhaustive lemma sweep",
        space_size(g.order(), pattern.arity()),
        budget,
        "; use a randomized run instead",
    )?;
    let kernel = LemmaKernel::new(g, pattern);
    let tallies: Vec<Tally> = g
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x1| scan_chunk(&kernel, x1))
        .collect();
    let mut total = Tally::default();
    for t in tallies {
        total.absorb(t);
    }
    finish(g, pattern, ScanMode::Exhaustive, total, None)
}

/// Checks `trials` uniformly drawn instances.
pub fn verify_lemma_randomized(
    g: &Group,
    pattern: &TranslationPattern,
    trials: u64,
    seed: u64,
) -> Result<LemmaReport> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let kernel = LemmaKernel::new(g, pattern);
    let a = pattern.arity();
    let tallies = sampling::map_chunks(seed, trials, |rng, draws| {
        let mut x = [Element::IDENTITY; MAX_ARITY];
        let mut gs = [Element::IDENTITY; MAX_ARITY];
        let mut tally = Tally::default();
        for _ in 0..draws {
            for slot in x[..a].iter_mut().chain(gs[..a].iter_mut()) {
                *slot = sampling::uniform_element(rng, g);
            }
            tally.record(kernel.evaluate(&x[..a], &gs[..a]), &x[..a], &gs[..a]);
        }
        tally
    });
    let mut total = Tally::default();
    for t in tallies {
        total.absorb(t);
    }
    finish(g, pattern, ScanMode::Randomized, total, Some(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Most instances to examine; the sweep is exhaustive when the whole
    /// space fits.
    pub budget: u128,
    /// Required once the search falls back to sampling.
    pub seed: Option<u64>,
    /// Sample count for the randomized fallback, capped by `budget`.
    pub trials: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SEARCH_BUDGET,
            seed: None,
            trials: 1_000_000,
        }
    }
}

/// States that a full sweep of `group` found no counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionCertificate {
    pub group: String,
    pub order: usize,
    pub pattern: String,
    pub instances_scanned: u64,
    pub premise_count: u64,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub group: String,
    pub order: usize,
    pub side: Side,
    pub arity: usize,
    pub mode: ScanMode,
    /// Fraction of the instance space examined (sampled draws may repeat).
    pub coverage: f64,
    pub tuples_scanned: u64,
    pub premise_count: u64,
    pub violation_count: u64,
    pub counterexample: Option<Counterexample>,
    pub certificate: Option<ExhaustionCertificate>,
    pub seed: Option<u64>,
}

/// Looks for an instance of `pattern` whose premises hold while the
/// conclusion fails. The first hit in sweep order is returned.
pub fn search(g: &Group, pattern: &TranslationPattern, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let space = space_size(g.order(), pattern.arity());
    let report = if space <= cfg.budget {
        verify_lemma_exhaustive(g, pattern, cfg.budget)?
    } else {
        let seed = cfg.seed.ok_or_else(|| {
            Error::Argument(format!(
                "{} instances exceed the budget of {}; a randomized search needs a seed",
                space, cfg.budget
            ))
        })?;
        let trials = (cfg.trials as u128).min(cfg.budget).max(1) as u64;
        verify_lemma_randomized(g, pattern, trials, seed)?
    };
    let certificate = (report.mode == ScanMode::Exhaustive && report.violation_count == 0).then(|| {
        ExhaustionCertificate {
            group: g.name().to_string(),
            order: g.order(),
            pattern: pattern.to_text(),
            instances_scanned: report.tuples_scanned,
            premise_count: report.premise_count,
            statement: format!("no counterexample in {}", g.name()),
        }
    });
    Ok(SearchOutcome {
        group: report.group,
        order: report.order,
        side: report.side,
        arity: report.arity,
        mode: report.mode,
        coverage: (report.tuples_scanned as f64 / space as f64).min(1.0),
        tuples_scanned: report.tuples_scanned,
        premise_count: report.premise_count,
        violation_count: report.violation_count,
        counterexample: report.violations.into_iter().next(),
        certificate,
        seed: report.seed,
    })
}

/// The lemma with `g_i·x_c` in place of `x_c·g_i`.
pub fn search_left_version(g: &Group, cfg: &SearchConfig) -> Result<SearchOutcome> {
    search(g, &TranslationPattern::canonical_left(), cfg)
}

/// Length-4 analogue; `pattern4` defaults to
/// [`TranslationPattern::default_length4`] on the right side.
pub fn search_length4(
    g: &Group,
    pattern4: Option<&TranslationPattern>,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    let default = TranslationPattern::default_length4(Side::Right);
    let pattern = pattern4.unwrap_or(&default);
    if pattern.arity() != 4 {
        return Err(Error::Argument(format!(
            "length-4 search needs an arity-4 pattern, got arity {}",
            pattern.arity()
        )));
    }
    search(g, pattern, cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStepReport {
    pub group: String,
    pub order: usize,
    pub triples_checked: u64,
    /// Failures of `[ab, c] = [a, c]^b [b, c]`.
    pub left_expansion_failures: u64,
    /// Failures of `[a, bc] = [a, c] [a, b]^c`.
    pub right_expansion_failures: u64,
    pub quadruples_checked: u64,
    /// Quadruples `(x, g_1, g_2, g_3)` with `[x g_1, g_2, g_3]`,
    /// `[x, g_2, g_1]` and `[x, g_2, g_3]` all trivial.
    pub implication_hypotheses: u64,
    /// Of those, the ones with `[g_1, g_2, g_3] ≠ 1`.
    pub implication_failures: u64,
}

impl ProofStepReport {
    pub fn all_hold(&self) -> bool {
        self.left_expansion_failures == 0
            && self.right_expansion_failures == 0
            && self.implication_failures == 0
    }
}

/// Exhaustively checks the commutator expansions the lemma's proof uses and
/// the closing step that turns the three derived relations into
/// `[g_1, g_2, g_3] = 1`.
pub fn proof_step_identities(g: &Group) -> Result<ProofStepReport> {
    if g.order() > PROOF_STEP_MAX_ORDER {
        return Err(Error::Argument(format!(
            "proof step identities are checked for groups of order at most {PROOF_STEP_MAX_ORDER}"
        )));
    }
    let elems: Vec<Element> = g.elements().collect();
    let (mut left_fail, mut right_fail, mut triples) = (0u64, 0u64, 0u64);
    for &a in &elems {
        for &b in &elems {
            for &c in &elems {
                triples += 1;
                let lhs = g.commutator(g.mul(a, b), c);
                let rhs = g.mul(g.conjugate(g.commutator(a, c), b), g.commutator(b, c));
                left_fail += u64::from(lhs != rhs);
                let lhs = g.commutator(a, g.mul(b, c));
                let rhs = g.mul(g.commutator(a, c), g.conjugate(g.commutator(a, b), c));
                right_fail += u64::from(lhs != rhs);
            }
        }
    }
    let trivial = |xs: [Element; 3]| g.iterated_commutator(&xs).map(|e| e.is_identity());
    let (mut quads, mut hyps, mut fails) = (0u64, 0u64, 0u64);
    for &x in &elems {
        for &g1 in &elems {
            let xg1 = g.mul(x, g1);
            for &g2 in &elems {
                for &g3 in &elems {
                    quads += 1;
                    if trivial([xg1, g2, g3])? && trivial([x, g2, g1])? && trivial([x, g2, g3])? {
                        hyps += 1;
                        fails += u64::from(!trivial([g1, g2, g3])?);
                    }
                }
            }
        }
    }
    Ok(ProofStepReport {
        group: g.name().to_string(),
        order: g.order(),
        triples_checked: triples,
        left_expansion_failures: left_fail,
        right_expansion_failures: right_fail,
        quadruples_checked: quads,
        implication_hypotheses: hyps,
        implication_failures: fails,
    })
}
