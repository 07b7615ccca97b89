//! Dense finite groups: multiplication tables, commutators, subgroup closure
//! and the lower central series.
//!
//! Elements are indices `0..n` into the owning [`Group`]'s tables, with the
//! identity pinned at index 0. Products follow `a * b = mul[a][b]`, the
//! commutator is `[a, b] = a⁻¹b⁻¹ab`, conjugation is `a^b = b⁻¹ab`, and
//! iterated commutators are left-normed: `[a, b, c] = [[a, b], c]`.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest order for which associativity is checked on every triple.
pub const EXHAUSTIVE_ASSOCIATIVITY_MAX: usize = 128;
/// Number of random triples checked above [`EXHAUSTIVE_ASSOCIATIVITY_MAX`].
pub const SAMPLED_ASSOCIATIVITY_TRIPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("a group needs at least one element")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry {value} at row {row}, column {col} is out of range for order {order}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        order: usize,
    },
    #[error("row {row} is not a permutation: value {value} repeats at column {col}")]
    RowNotPermutation { row: usize, col: usize, value: u32 },
    #[error("column {col} is not a permutation: value {value} repeats at row {row}")]
    ColumnNotPermutation { row: usize, col: usize, value: u32 },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("associativity fails on ({a}, {b}, {c}): (ab)c = {left}, a(bc) = {right}")]
    Associativity {
        a: usize,
        b: usize,
        c: usize,
        left: usize,
        right: usize,
    },
    #[error("iterated commutator of an empty list")]
    EmptyCommutator,
}

/// An element index, meaningful only together with the group that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(u32);

impl Element {
    pub const IDENTITY: Element = Element(0);

    /// Callers guarantee `i` is below the order of the group it is used with.
    #[inline]
    pub(crate) const fn from_raw(i: u32) -> Element {
        Element(i)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A finite group stored as a dense multiplication table.
///
/// Immutable after construction; every method is a pure table read.
#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

impl Group {
    /// Validates a table given row by row.
    ///
    /// The identity is relabelled to index 0 (swapping it with whatever was
    /// there) when the table puts it elsewhere.
    pub fn from_rows(name: impl Into<String>, rows: &[Vec<u32>]) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        let mut mul = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Ragged {
                    row: r,
                    expected: n,
                    found: row.len(),
                });
            }
            mul.extend_from_slice(row);
        }
        Self::from_table(name, n, mul)
    }

    /// Validates a flat row-major table of side `order`.
    pub fn from_table(
        name: impl Into<String>,
        order: usize,
        mut mul: Vec<u32>,
    ) -> Result<Self, GroupError> {
        let n = order;
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if mul.len() != n * n {
            let row = mul.len() / n;
            return Err(GroupError::Ragged {
                row,
                expected: n,
                found: mul.len() % n,
            });
        }
        check_latin(n, &mul)?;

        let e = (0..n)
            .find(|&e| (0..n).all(|a| mul[e * n + a] as usize == a && mul[a * n + e] as usize == a))
            .ok_or(GroupError::NoIdentity)?;
        if e != 0 {
            mul = relabel_swap(n, &mul, 0, e);
        }

        let mut inv = vec![0u32; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| mul[a * n + b] == 0)
                .expect("latin rows contain the identity");
            if mul[b * n + a] != 0 {
                return Err(GroupError::NoInverse { element: a });
            }
            inv[a] = b as u32;
        }

        check_associativity(n, &mul)?;

        Ok(Self {
            name: name.into(),
            order: n,
            mul,
            inv,
        })
    }

    /// Builds the table of a group given as a list of concrete elements and a
    /// closed binary operation. `elements[0]` must be the identity.
    pub fn from_elements<T, F>(
        name: impl Into<String>,
        elements: &[T],
        op: F,
    ) -> Result<Self, GroupError>
    where
        T: Eq + std::hash::Hash,
        F: Fn(&T, &T) -> T,
    {
        let index: std::collections::HashMap<&T, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i as u32))
            .collect();
        let n = elements.len();
        let mut mul = Vec::with_capacity(n * n);
        for (r, a) in elements.iter().enumerate() {
            for (c, b) in elements.iter().enumerate() {
                let p = op(a, b);
                let idx = *index.get(&p).ok_or(GroupError::EntryOutOfRange {
                    row: r,
                    col: c,
                    value: u32::MAX,
                    order: n,
                })?;
                mul.push(idx);
            }
        }
        Self::from_table(name, n, mul)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> &[u32] {
        &self.mul
    }

    pub fn identity(&self) -> Element {
        Element::IDENTITY
    }

    pub fn element(&self, index: usize) -> Option<Element> {
        (index < self.order).then_some(Element(index as u32))
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = Element> + '_ {
        (0..self.order as u32).map(Element)
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        Element(self.mul[a.index() * self.order + b.index()])
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        Element(self.inv[a.index()])
    }

    /// `[a, b] = a⁻¹b⁻¹ab`.
    #[inline]
    pub fn commutator(&self, a: Element, b: Element) -> Element {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        // a⁻¹b⁻¹ab = (ba)⁻¹(ab)
        self.mul(self.inv(ba), ab)
    }

    /// `a^b = b⁻¹ab`.
    #[inline]
    pub fn conjugate(&self, a: Element, b: Element) -> Element {
        self.mul(self.mul(self.inv(b), a), b)
    }

    /// Left-normed `[x_1, ..., x_m]`; a single element is returned as is.
    pub fn iterated_commutator(&self, xs: &[Element]) -> Result<Element, GroupError> {
        let (&first, rest) = xs.split_first().ok_or(GroupError::EmptyCommutator)?;
        Ok(rest.iter().fold(first, |acc, &x| self.commutator(acc, x)))
    }

    pub fn pow(&self, a: Element, exp: usize) -> Element {
        (0..exp).fold(Element::IDENTITY, |acc, _| self.mul(acc, a))
    }

    pub fn commutes(&self, a: Element, b: Element) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order;
        (0..n).all(|a| (a + 1..n).all(|b| self.mul[a * n + b] == self.mul[b * n + a]))
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(&self) -> Subgroup<'_> {
        let mut members = FixedBitSet::with_capacity(self.order);
        members.insert_range(..);
        Subgroup {
            parent: self,
            members,
            generators: self.elements().collect(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup<'_> {
        self.generate_subgroup(&[])
    }

    /// Smallest subgroup containing `gens`, by breadth-first closure over the
    /// multiplication table.
    pub fn generate_subgroup(&self, gens: &[Element]) -> Subgroup<'_> {
        let mut members = FixedBitSet::with_capacity(self.order);
        members.insert(0);
        let mut steps: Vec<Element> = Vec::with_capacity(gens.len() * 2);
        for &g in gens {
            steps.push(g);
            steps.push(self.inv(g));
        }
        steps.sort_unstable();
        steps.dedup();
        steps.retain(|s| !s.is_identity());

        let mut queue = VecDeque::from([Element::IDENTITY]);
        while let Some(x) = queue.pop_front() {
            for &s in &steps {
                let y = self.mul(x, s);
                if !members.put(y.index()) {
                    queue.push_back(y);
                }
            }
        }
        let sub = Subgroup {
            parent: self,
            members,
            generators: gens.to_vec(),
        };
        assert_eq!(
            self.order % sub.order(),
            0,
            "closure of order {} does not divide {}",
            sub.order(),
            self.order
        );
        sub
    }

    /// Number of elements commuting with each element, indexed by element.
    pub fn centralizer_sizes(&self) -> Vec<u64> {
        let n = self.order;
        (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| self.mul[a * n + b] == self.mul[b * n + a])
                    .count() as u64
            })
            .collect()
    }
}

fn check_latin(n: usize, mul: &[u32]) -> Result<(), GroupError> {
    let mut seen = FixedBitSet::with_capacity(n);
    for r in 0..n {
        seen.clear();
        for c in 0..n {
            let v = mul[r * n + c];
            if v as usize >= n {
                return Err(GroupError::EntryOutOfRange {
                    row: r,
                    col: c,
                    value: v,
                    order: n,
                });
            }
            if seen.put(v as usize) {
                return Err(GroupError::RowNotPermutation {
                    row: r,
                    col: c,
                    value: v,
                });
            }
        }
    }
    for c in 0..n {
        seen.clear();
        for r in 0..n {
            let v = mul[r * n + c];
            if seen.put(v as usize) {
                return Err(GroupError::ColumnNotPermutation {
                    row: r,
                    col: c,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// Applies the transposition of labels `i <-> j` to a table.
fn relabel_swap(n: usize, mul: &[u32], i: usize, j: usize) -> Vec<u32> {
    let sigma = |x: usize| {
        if x == i {
            j
        } else if x == j {
            i
        } else {
            x
        }
    };
    let mut out = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            out[sigma(a) * n + sigma(b)] = sigma(mul[a * n + b] as usize) as u32;
        }
    }
    out
}

fn check_associativity(n: usize, mul: &[u32]) -> Result<(), GroupError> {
    let m = |a: usize, b: usize| mul[a * n + b] as usize;
    let check = |a: usize, b: usize, c: usize| {
        let left = m(m(a, b), c);
        let right = m(a, m(b, c));
        if left == right {
            Ok(())
        } else {
            Err(GroupError::Associativity {
                a,
                b,
                c,
                left,
                right,
            })
        }
    };
    if n <= EXHAUSTIVE_ASSOCIATIVITY_MAX {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    check(a, b, c)?;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x61_73_73_6f_63);
        for _ in 0..SAMPLED_ASSOCIATIVITY_TRIPLES {
            let a = rng.gen_range(0..n as u32) as usize;
            let b = rng.gen_range(0..n as u32) as usize;
            let c = rng.gen_range(0..n as u32) as usize;
            check(a, b, c)?;
        }
    }
    Ok(())
}

/// A subgroup of a parent group, stored as a membership bitset.
#[derive(Clone)]
pub struct Subgroup<'g> {
    parent: &'g Group,
    members: FixedBitSet,
    generators: Vec<Element>,
}

impl fmt::Debug for Subgroup<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup")
            .field("parent", &self.parent.name())
            .field("order", &self.order())
            .finish()
    }
}

impl PartialEq for Subgroup<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.parent, other.parent) && self.members == other.members
    }
}

impl<'g> Subgroup<'g> {
    pub fn parent(&self) -> &'g Group {
        self.parent
    }

    pub fn order(&self) -> usize {
        self.members.count_ones(..)
    }

    /// `[G : H]`.
    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    pub fn contains(&self, a: Element) -> bool {
        self.members.contains(a.index())
    }

    pub fn members(&self) -> impl Iterator<Item = Element> + '_ {
        self.members.ones().map(|i| Element(i as u32))
    }

    pub fn member_bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup<'_>) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Whether every conjugate of a member by an element of `ambient` stays inside.
    pub fn is_normal_in(&self, ambient: &Subgroup<'_>) -> bool {
        let g = self.parent;
        self.members()
            .all(|a| ambient.members().all(|b| self.contains(g.conjugate(a, b))))
    }

    /// `[self, other]`, generated by all commutators of members.
    pub fn commutator_with(&self, other: &Subgroup<'_>) -> Subgroup<'g> {
        let g = self.parent;
        let mut seen = FixedBitSet::with_capacity(g.order());
        for a in self.members() {
            for b in other.members() {
                seen.insert(g.commutator(a, b).index());
            }
        }
        let gens: Vec<Element> = seen.ones().map(|i| Element(i as u32)).collect();
        g.generate_subgroup(&gens)
    }

    /// `γ_1 = H, γ_{i+1} = [γ_i, H]`, listed until the series becomes
    /// trivial or stops descending. The stable term appears once.
    pub fn lower_central_series(&self) -> Vec<Subgroup<'g>> {
        let mut series = vec![self.clone()];
        loop {
            let last = series.last().expect("series is nonempty");
            if last.is_trivial() {
                break;
            }
            let next = last.commutator_with(self);
            if next.members == last.members {
                break;
            }
            series.push(next);
        }
        series
    }

    /// `c` such that `γ_{c+1} = 1 ≠ γ_c`; `None` when the series stalls above 1.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let series = self.lower_central_series();
        series
            .last()
            .filter(|s| s.is_trivial())
            .map(|_| series.len() - 1)
    }
}

/// Precomputed `[a, b]` for every pair; the hot-loop form of
/// [`Group::commutator`].
#[derive(Clone)]
pub struct CommutatorTable {
    order: usize,
    table: Vec<u32>,
}

impl CommutatorTable {
    pub fn new(g: &Group) -> Self {
        let n = g.order();
        let mut table = Vec::with_capacity(n * n);
        for a in g.elements() {
            for b in g.elements() {
                table.push(g.commutator(a, b).0);
            }
        }
        Self { order: n, table }
    }

    #[inline]
    pub fn get(&self, a: Element, b: Element) -> Element {
        Element(self.table[a.index() * self.order + b.index()])
    }

    #[inline]
    pub fn triple(&self, a: Element, b: Element, c: Element) -> Element {
        self.get(self.get(a, b), c)
    }

    pub fn iterated(&self, xs: &[Element]) -> Element {
        match xs.split_first() {
            Some((&first, rest)) => rest.iter().fold(first, |acc, &x| self.get(acc, x)),
            None => Element::IDENTITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> Group {
        let mul = (0..n)
            .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32))
            .collect();
        Group::from_table(format!("C{n}"), n, mul).unwrap()
    }

    /// S_3 on one-line permutations in lexicographic order, `(a*b)(i) = a(b(i))`.
    fn s3() -> Group {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        Group::from_elements("S3", &perms, |a, b| [a[b[0]], a[b[1]], a[b[2]]]).unwrap()
    }

    // one-line indices under lexicographic enumeration
    const T12: usize = 2; // (1 2) = [1,0,2]
    const T13: usize = 5; // (1 3) = [2,1,0]
    const T23: usize = 1; // (2 3) = [0,2,1]
    const C123: usize = 3; // 1->2->3->1 = [1,2,0]
    const C132: usize = 4; // [2,0,1]

    fn el(g: &Group, i: usize) -> Element {
        g.element(i).unwrap()
    }

    #[test]
    fn identity_multiplies_trivially() {
        let g = s3();
        for b in g.elements() {
            assert_eq!(g.mul(g.identity(), b), b);
        }
    }

    #[test]
    fn cyclic_addition() {
        let g = cyclic(4);
        assert_eq!(g.mul(el(&g, 3), el(&g, 2)), el(&g, 1));
    }

    #[test]
    fn s3_products_and_commutators() {
        let g = s3();
        // (12)(13): 1 -> 3, 3 -> 2, 2 -> 1, i.e. (1 3 2)
        assert_eq!(g.mul(el(&g, T12), el(&g, T13)), el(&g, C132));
        // (12)^-1 (13)^-1 (12)(13) = (13)(12)... evaluated by hand: (12)(13)(12)(13) = (132)(132) = (123)
        assert_eq!(g.commutator(el(&g, T12), el(&g, T13)), el(&g, C123));
        // (123)^-1 (12) (123) = (132)(12)(123) = (1 3)
        assert_eq!(g.conjugate(el(&g, T12), el(&g, C123)), el(&g, T13));
        assert_eq!(g.conjugate(el(&g, T12), el(&g, C132)), el(&g, T23));
    }

    #[test]
    fn commutator_trivial_iff_commuting() {
        let g = s3();
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(g.commutator(a, b).is_identity(), g.commutes(a, b));
            }
        }
    }

    #[test]
    fn iterated_commutator_edge_cases() {
        let g = s3();
        assert_eq!(g.iterated_commutator(&[]), Err(GroupError::EmptyCommutator));
        assert_eq!(g.iterated_commutator(&[el(&g, 4)]).unwrap(), el(&g, 4));
        let a = el(&g, C123);
        let b = el(&g, C132);
        for c in g.elements() {
            assert!(g.iterated_commutator(&[a, b, c]).unwrap().is_identity());
        }
    }

    #[test]
    fn conjugation_by_identity_and_central() {
        let g = s3();
        for a in g.elements() {
            assert_eq!(g.conjugate(a, g.identity()), a);
            assert_eq!(g.conjugate(g.identity(), a), g.identity());
        }
    }

    #[test]
    fn identity_is_relabelled_to_zero() {
        // Z/3 written with identity at label 2: a*b = (a + b + 1) mod 3
        let rows: Vec<Vec<u32>> = (0..3u32)
            .map(|a| (0..3u32).map(|b| (a + b + 1) % 3).collect())
            .collect();
        let g = Group::from_rows("shifted", &rows).unwrap();
        for a in g.elements() {
            assert_eq!(g.mul(Element::IDENTITY, a), a);
            assert_eq!(g.mul(a, g.inv(a)), Element::IDENTITY);
        }
    }

    #[test]
    fn construction_errors_name_locations() {
        let ragged = vec![vec![0, 1], vec![1]];
        assert!(matches!(
            Group::from_rows("r", &ragged),
            Err(GroupError::Ragged { row: 1, .. })
        ));
        let repeated = vec![vec![0, 1], vec![1, 1]];
        assert!(matches!(
            Group::from_rows("r", &repeated),
            Err(GroupError::RowNotPermutation { row: 1, col: 1, .. })
        ));
        let out = vec![vec![0, 2], vec![1, 0]];
        assert!(matches!(
            Group::from_rows("r", &out),
            Err(GroupError::EntryOutOfRange { row: 0, col: 1, .. })
        ));
        assert_eq!(Group::from_rows("e", &[]), Err(GroupError::Empty));
    }

    #[test]
    fn rejects_non_associative_latin_square() {
        // a loop of order 5 with identity 0 that is not a group
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            Group::from_rows("loop", &rows),
            Err(GroupError::Associativity { .. })
        ));
    }

    #[test]
    fn subgroup_generation() {
        let g = s3();
        assert_eq!(g.generate_subgroup(&[]).order(), 1);
        let all: Vec<Element> = g.elements().collect();
        assert_eq!(g.generate_subgroup(&all).order(), 6);
        assert_eq!(g.generate_subgroup(&[el(&g, C123)]).order(), 3);
        assert_eq!(g.generate_subgroup(&[el(&g, T12)]).order(), 2);
        assert_eq!(g.generate_subgroup(&[el(&g, T12), el(&g, T13)]).order(), 6);
    }

    #[test]
    fn lower_central_series_of_s3_stalls() {
        let g = s3();
        let whole = g.whole();
        let sizes: Vec<usize> = whole.lower_central_series().iter().map(|s| s.order()).collect();
        assert_eq!(sizes, vec![6, 3]);
        assert_eq!(whole.nilpotency_class(), None);
        for term in whole.lower_central_series() {
            assert!(term.is_normal_in(&whole));
        }
    }

    #[test]
    fn class_of_abelian_and_trivial() {
        let g = cyclic(6);
        let sizes: Vec<usize> = g.whole().lower_central_series().iter().map(|s| s.order()).collect();
        assert_eq!(sizes, vec![6, 1]);
        assert_eq!(g.whole().nilpotency_class(), Some(1));
        let t = cyclic(1);
        assert_eq!(t.whole().nilpotency_class(), Some(0));
    }

    #[test]
    fn expansion_identity_holds_in_s3() {
        let g = s3();
        for a in g.elements() {
            for b in g.elements() {
                for c in g.elements() {
                    let lhs = g.commutator(a, g.mul(b, c));
                    let rhs = g.mul(g.commutator(a, c), g.conjugate(g.commutator(a, b), c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn commutator_table_matches_group() {
        let g = s3();
        let t = CommutatorTable::new(&g);
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(t.get(a, b), g.commutator(a, b));
            }
        }
        let xs = [el(&g, 1), el(&g, 2), el(&g, 3)];
        assert_eq!(t.iterated(&xs), g.iterated_commutator(&xs).unwrap());
    }

    #[test]
    fn centralizer_sizes_of_s3() {
        assert_eq!(s3().centralizer_sizes(), vec![6, 2, 2, 3, 3, 2]);
    }
}
