//! Catalog groups and the small spec grammar used to name them.
//!
//! Element enumeration is fixed per family so that indices are stable:
//!
//! | family | element with index `i` |
//! |---|---|
//! | `cyclic(n)` | the residue `i` |
//! | `dihedral(n)` (order `2n`) | `r^(i mod n) s^(i / n)` |
//! | `symmetric(n)`, `alternating(n)` | `i`-th permutation in lexicographic one-line order, composed as functions: `(ab)(p) = a(b(p))` |
//! | `quaternion8` | `1, -1, i, -i, j, -j, k, -k` |
//! | `heisenberg(p)` | upper unitriangular `[[1,a,c],[0,1,b],[0,0,1]]` with `i = a p² + b p + c` |
//! | `extraspecial(p,+)` | `heisenberg(p)` for odd `p`, `dihedral(4)` for `p = 2` |
//! | `extraspecial(p,-)` | `x^a y^b` in `⟨x, y | x^{p²}, y^p, y⁻¹xy = x^{1+p}⟩`, `i = a p + b`, for odd `p`; `quaternion8` for `p = 2` |
//! | `G x H` | the pair `(g, h)` at `g |H| + h` |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::Error;
use crate::formats;
use crate::group::Group;

pub const DEFAULT_ORDER_CAP: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtraspecialVariant {
    /// Exponent `p` (odd `p`), or the dihedral group for `p = 2`.
    Plus,
    /// Exponent `p²` (odd `p`), or the quaternion group for `p = 2`.
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Quaternion8,
    Heisenberg(usize),
    Extraspecial(usize, ExtraspecialVariant),
    Product(Vec<GroupSpec>),
    CayleyFile(PathBuf),
    PermFile(PathBuf),
}

impl GroupSpec {
    /// Order of the group, when it is known without reading a file.
    pub fn order(&self) -> Option<u128> {
        Some(match self {
            GroupSpec::Cyclic(n) => *n as u128,
            GroupSpec::Dihedral(n) => 2 * *n as u128,
            GroupSpec::Symmetric(n) => factorial(*n)?,
            GroupSpec::Alternating(n) => {
                if *n < 2 {
                    1
                } else {
                    factorial(*n)? / 2
                }
            }
            GroupSpec::Quaternion8 => 8,
            GroupSpec::Heisenberg(p) | GroupSpec::Extraspecial(p, _) => (*p as u128).checked_pow(3)?,
            GroupSpec::Product(parts) => {
                let mut acc: u128 = 1;
                for part in parts {
                    acc = acc.checked_mul(part.order()?)?;
                }
                acc
            }
            GroupSpec::CayleyFile(_) | GroupSpec::PermFile(_) => return None,
        })
    }

    pub fn build(&self) -> Result<Group, Error> {
        build(self, DEFAULT_ORDER_CAP)
    }
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "C{n}"),
            GroupSpec::Dihedral(n) => write!(f, "D{n}"),
            GroupSpec::Symmetric(n) => write!(f, "S{n}"),
            GroupSpec::Alternating(n) => write!(f, "A{n}"),
            GroupSpec::Quaternion8 => write!(f, "Q8"),
            GroupSpec::Heisenberg(p) => write!(f, "heisenberg({p})"),
            GroupSpec::Extraspecial(p, v) => {
                let sign = match v {
                    ExtraspecialVariant::Plus => '+',
                    ExtraspecialVariant::Minus => '-',
                };
                write!(f, "extraspecial({p},{sign})")
            }
            GroupSpec::Product(parts) => {
                let mut first = true;
                for part in parts {
                    if !first {
                        write!(f, " x ")?;
                    }
                    first = false;
                    if matches!(part, GroupSpec::Product(_)) {
                        write!(f, "({part})")?;
                    } else {
                        write!(f, "{part}")?;
                    }
                }
                Ok(())
            }
            GroupSpec::CayleyFile(p) => write!(f, "cayley({})", p.display()),
            GroupSpec::PermFile(p) => write!(f, "perm({})", p.display()),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Grammar: `term (x term)*`, where `x` (or `×`) is whitespace-delimited
    /// and a term is a family name, `Cn`/`Dn`/`Sn`/`An`/`Q8`/`V4`/`trivial`,
    /// `family(params)`, or a parenthesized product.
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_product(s.trim())
    }
}

fn spec_error(input: &str, message: impl Into<String>) -> Error {
    Error::Spec {
        input: input.to_string(),
        message: message.into(),
    }
}

fn parse_product(s: &str) -> Result<GroupSpec, Error> {
    if s.is_empty() {
        return Err(spec_error(s, "empty group spec"));
    }
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    for (pos, &(i, c)) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            'x' | '×' if depth == 0 => {
                let before = pos == 0 || chars[pos - 1].1.is_whitespace();
                let after = chars.get(pos + 1).is_none_or(|&(_, n)| n.is_whitespace());
                if before && after {
                    parts.push(s[start..i].trim());
                    start = i + c.len_utf8();
                }
            }
            _ => {}
        }
        if depth < 0 {
            return Err(spec_error(s, "unbalanced ')'"));
        }
    }
    if depth != 0 {
        return Err(spec_error(s, "unbalanced '('"));
    }
    parts.push(s[start..].trim());
    if parts.len() == 1 {
        return parse_term(parts[0]);
    }
    let terms = parts
        .into_iter()
        .map(|p| {
            if p.is_empty() {
                Err(spec_error(s, "missing factor around 'x'"))
            } else {
                parse_term(p)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupSpec::Product(terms))
}

fn parse_term(t: &str) -> Result<GroupSpec, Error> {
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        return parse_product(inner.trim());
    }
    if let Some(open) = t.find('(') {
        let close = t
            .rfind(')')
            .filter(|&c| c == t.len() - 1)
            .ok_or_else(|| spec_error(t, "expected ')' at end of term"))?;
        let family = t[..open].trim().to_ascii_lowercase();
        let args: Vec<&str> = t[open + 1..close].split(',').map(str::trim).collect();
        let int = |i: usize| -> Result<usize, Error> {
            args.get(i)
                .ok_or_else(|| spec_error(t, "missing parameter"))?
                .parse::<usize>()
                .map_err(|_| spec_error(t, format!("parameter {} is not a nonnegative integer", i + 1)))
        };
        let one = |spec: GroupSpec| -> Result<GroupSpec, Error> {
            if args.len() == 1 {
                Ok(spec)
            } else {
                Err(spec_error(t, "expected exactly one parameter"))
            }
        };
        let path = || PathBuf::from(t[open + 1..close].trim());
        return match family.as_str() {
            "cyclic" | "c" => one(GroupSpec::Cyclic(int(0)?)),
            "dihedral" | "d" => one(GroupSpec::Dihedral(int(0)?)),
            "symmetric" | "s" => one(GroupSpec::Symmetric(int(0)?)),
            "alternating" | "a" => one(GroupSpec::Alternating(int(0)?)),
            "heisenberg" | "h" => one(GroupSpec::Heisenberg(int(0)?)),
            "extraspecial" => {
                if args.len() != 2 {
                    return Err(spec_error(t, "extraspecial takes (p, +|-)"));
                }
                let variant = match args[1] {
                    "+" | "plus" => ExtraspecialVariant::Plus,
                    "-" | "minus" => ExtraspecialVariant::Minus,
                    _ => return Err(spec_error(t, "variant must be '+' or '-'")),
                };
                Ok(GroupSpec::Extraspecial(int(0)?, variant))
            }
            "product" => parse_product(&t[open + 1..close].replace(',', " x ")),
            "cayley" | "cayley-file" => Ok(GroupSpec::CayleyFile(path())),
            "perm" | "perm-file" => Ok(GroupSpec::PermFile(path())),
            _ => Err(spec_error(t, format!("unknown family '{family}'"))),
        };
    }
    match t.to_ascii_lowercase().as_str() {
        "q8" | "quaternion8" | "quaternion" => return Ok(GroupSpec::Quaternion8),
        "trivial" | "1" => return Ok(GroupSpec::Cyclic(1)),
        "v4" | "klein" => {
            return Ok(GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(2)]))
        }
        _ => {}
    }
    let (head, digits) = t.split_at(t.find(|c: char| c.is_ascii_digit()).unwrap_or(t.len()));
    let n: usize = digits
        .parse()
        .map_err(|_| spec_error(t, "unrecognised group name"))?;
    match head {
        "C" | "Z" => Ok(GroupSpec::Cyclic(n)),
        "D" => Ok(GroupSpec::Dihedral(n)),
        "S" => Ok(GroupSpec::Symmetric(n)),
        "A" => Ok(GroupSpec::Alternating(n)),
        "H" => Ok(GroupSpec::Heisenberg(n)),
        _ => Err(spec_error(t, "unrecognised group name")),
    }
}

fn check_cap(spec: &GroupSpec, order: u128, cap: usize) -> Result<(), Error> {
    if order > cap as u128 {
        Err(Error::OrderCap {
            spec: spec.to_string(),
            order,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Builds a normalized group (identity at index 0) for a spec, refusing any
/// group of order above `cap`.
pub fn build(spec: &GroupSpec, cap: usize) -> Result<Group, Error> {
    if let Some(order) = spec.order() {
        check_cap(spec, order, cap)?;
    }
    let name = spec.to_string();
    let invalid = |message: &str| spec_error(&name, message);
    let g = match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 {
                return Err(invalid("cyclic order must be at least 1"));
            }
            cyclic(*n)
        }
        GroupSpec::Dihedral(n) => {
            if *n < 1 {
                return Err(invalid("dihedral parameter must be at least 1"));
            }
            dihedral(*n)
        }
        GroupSpec::Symmetric(n) => permutation_family(*n, false),
        GroupSpec::Alternating(n) => permutation_family(*n, true),
        GroupSpec::Quaternion8 => quaternion8(),
        GroupSpec::Heisenberg(p) => {
            if *p < 2 {
                return Err(invalid("heisenberg modulus must be at least 2"));
            }
            heisenberg(*p)
        }
        GroupSpec::Extraspecial(p, variant) => {
            if *p < 2 {
                return Err(invalid("extraspecial prime must be at least 2"));
            }
            if !is_prime(*p) {
                return Err(invalid("extraspecial groups need a prime p"));
            }
            match (p, variant) {
                (2, ExtraspecialVariant::Plus) => dihedral(4),
                (2, ExtraspecialVariant::Minus) => quaternion8(),
                (_, ExtraspecialVariant::Plus) => heisenberg(*p),
                (_, ExtraspecialVariant::Minus) => extraspecial_minus(*p),
            }
        }
        GroupSpec::Product(parts) => {
            let mut iter = parts.iter();
            let first = iter.next().ok_or_else(|| invalid("empty product"))?;
            let mut acc = build(first, cap)?;
            for part in iter {
                let next = build(part, cap)?;
                acc = product(&acc, &next, cap)?;
            }
            Ok(acc)
        }
        GroupSpec::CayleyFile(path) => {
            let text = read(path)?;
            let g = formats::parse_cayley(&text)?;
            check_cap(spec, g.order() as u128, cap)?;
            Ok(g)
        }
        GroupSpec::PermFile(path) => {
            let text = read(path)?;
            formats::parse_permutations(&text, cap)
        }
    }?;
    Ok(g.with_name(name))
}

fn read(path: &std::path::Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn cyclic(n: usize) -> Result<Group, Error> {
    let mul = (0..n)
        .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32))
        .collect();
    Ok(Group::from_table(format!("C{n}"), n, mul)?)
}

pub fn dihedral(n: usize) -> Result<Group, Error> {
    let elements: Vec<(usize, usize)> = (0..2).flat_map(|s| (0..n).map(move |r| (r, s))).collect();
    // r^a s^b · r^c s^d = r^(a + (-1)^b c) s^(b + d)
    let g = Group::from_elements(format!("D{n}"), &elements, |&(a, b), &(c, d)| {
        let c = if b == 1 { (n - c) % n } else { c };
        ((a + c) % n, (b + d) % 2)
    })?;
    Ok(g)
}

/// `S_n` or `A_n` on lexicographically enumerated one-line permutations.
pub fn permutation_family(n: usize, even_only: bool) -> Result<Group, Error> {
    let perms: Vec<Vec<usize>> = (0..n)
        .permutations(n)
        .filter(|p| !even_only || is_even(p))
        .collect();
    let name = if even_only { format!("A{n}") } else { format!("S{n}") };
    Ok(Group::from_elements(name, &perms, |a, b| compose(a, b))?)
}

/// `(a ∘ b)(i) = a(b(i))`.
pub(crate) fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn is_even(p: &[usize]) -> bool {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    inversions % 2 == 0
}

pub fn quaternion8() -> Result<Group, Error> {
    // (sign, unit) with unit 0 = 1, 1 = i, 2 = j, 3 = k
    let elements: Vec<(bool, u8)> = (0..4u8).flat_map(|u| [(false, u), (true, u)]).collect();
    let unit_mul = |a: u8, b: u8| -> (bool, u8) {
        match (a, b) {
            (0, x) | (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    Ok(Group::from_elements("Q8", &elements, |&(sa, a), &(sb, b)| {
        let (s, u) = unit_mul(a, b);
        (sa ^ sb ^ s, u)
    })?)
}

pub fn heisenberg(p: usize) -> Result<Group, Error> {
    let elements: Vec<(usize, usize, usize)> = (0..p)
        .flat_map(|a| (0..p).flat_map(move |b| (0..p).map(move |c| (a, b, c))))
        .collect();
    // [[1,a,c],[0,1,b],[0,0,1]] · [[1,a',c'],[0,1,b'],[0,0,1]]
    Ok(Group::from_elements(
        format!("heisenberg({p})"),
        &elements,
        |&(a, b, c), &(a2, b2, c2)| ((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p),
    )?)
}

fn extraspecial_minus(p: usize) -> Result<Group, Error> {
    let m = p * p;
    let r = 1 + p;
    let elements: Vec<(usize, usize)> = (0..m).flat_map(|a| (0..p).map(move |b| (a, b))).collect();
    let rpow = |b: usize| (0..b).fold(1usize, |acc, _| acc * r % m);
    // x^a y^b · x^c y^d = x^(a + c r^b) y^(b + d)
    Ok(Group::from_elements(
        format!("extraspecial({p},-)"),
        &elements,
        |&(a, b), &(c, d)| ((a + c * rpow(b)) % m, (b + d) % p),
    )?)
}

/// Direct product with `(g, h)` at index `g·|H| + h`.
pub fn product(g: &Group, h: &Group, cap: usize) -> Result<Group, Error> {
    let (n1, n2) = (g.order(), h.order());
    let n = n1 * n2;
    if n > cap {
        return Err(Error::OrderCap {
            spec: format!("{} x {}", g.name(), h.name()),
            order: n as u128,
            cap,
        });
    }
    let (t1, t2) = (g.table(), h.table());
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        let (a1, a2) = (a / n2, a % n2);
        for b in 0..n {
            let (b1, b2) = (b / n2, b % n2);
            let c1 = t1[a1 * n1 + b1] as usize;
            let c2 = t2[a2 * n2 + b2] as usize;
            mul.push((c1 * n2 + c2) as u32);
        }
    }
    Ok(Group::from_table(format!("{} x {}", g.name(), h.name()), n, mul)?)
}

/// A fixed list of small groups used for sweeps, ordered by group order.
pub fn standard_catalog(max_order: usize) -> Vec<GroupSpec> {
    use ExtraspecialVariant::*;
    use GroupSpec::*;
    let c = Cyclic;
    let mut specs: Vec<GroupSpec> = (1..=12).map(Cyclic).collect();
    specs.extend((3..=10).map(Dihedral));
    specs.extend([
        Symmetric(3),
        Symmetric(4),
        Alternating(4),
        Alternating(5),
        Quaternion8,
        Heisenberg(3),
        Extraspecial(3, Minus),
        Heisenberg(5),
        Product(vec![c(2), c(2)]),
        Product(vec![c(2), c(4)]),
        Product(vec![c(2), c(2), c(2)]),
        Product(vec![c(3), c(3)]),
        Product(vec![c(2), Symmetric(3)]),
        Product(vec![c(3), Symmetric(3)]),
        Product(vec![Quaternion8, c(2)]),
        Product(vec![Dihedral(4), c(3)]),
        Product(vec![Symmetric(3), Symmetric(3)]),
        Product(vec![Heisenberg(3), c(2)]),
        Product(vec![Symmetric(4), c(2)]),
        Product(vec![Dihedral(4), Dihedral(4)]),
        Product(vec![Heisenberg(3), Symmetric(3)]),
    ]);
    let mut specs: Vec<GroupSpec> = specs
        .into_iter()
        .filter(|s| s.order().is_some_and(|o| o <= max_order as u128))
        .collect();
    specs.sort_by_key(|s| s.order());
    specs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn grammar() {
        assert_eq!(spec("S3"), GroupSpec::Symmetric(3));
        assert_eq!(spec("cyclic(6)"), GroupSpec::Cyclic(6));
        assert_eq!(spec("Q8"), GroupSpec::Quaternion8);
        assert_eq!(
            spec("heisenberg(3) x S3"),
            GroupSpec::Product(vec![GroupSpec::Heisenberg(3), GroupSpec::Symmetric(3)])
        );
        assert_eq!(
            spec("extraspecial(3,-)"),
            GroupSpec::Extraspecial(3, ExtraspecialVariant::Minus)
        );
        assert_eq!(
            spec("(C2 x C2) x C3"),
            GroupSpec::Product(vec![
                GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(2)]),
                GroupSpec::Cyclic(3)
            ])
        );
        assert_eq!(spec("product(C2, S3)"), spec("C2 x S3"));
        assert!("S".parse::<GroupSpec>().is_err());
        assert!("foo(3)".parse::<GroupSpec>().is_err());
        assert!("C2 x".parse::<GroupSpec>().is_err());
        assert!("(C2".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in standard_catalog(2048) {
            assert_eq!(s.to_string().parse::<GroupSpec>().unwrap(), s);
        }
    }

    #[test]
    fn small_orders() {
        assert_eq!(spec("C1").build().unwrap().order(), 1);
        assert_eq!(spec("S3").build().unwrap().order(), 6);
        assert_eq!(spec("A4").build().unwrap().order(), 12);
        assert_eq!(spec("D4").build().unwrap().order(), 8);
        assert_eq!(spec("extraspecial(3,-)").build().unwrap().order(), 27);
    }

    #[test]
    fn order_cap_is_enforced() {
        assert!(matches!(build(&spec("S7"), 2048), Err(Error::OrderCap { .. })));
        assert!(matches!(build(&spec("C10 x C10"), 50), Err(Error::OrderCap { .. })));
        assert!(build(&spec("S7"), 6000).is_ok());
    }

    #[test]
    fn heisenberg_has_class_two() {
        let g = spec("heisenberg(3)").build().unwrap();
        assert_eq!(g.order(), 27);
        assert_eq!(g.whole().nilpotency_class(), Some(2));
        let sizes: Vec<usize> = g.whole().lower_central_series().iter().map(|s| s.order()).collect();
        assert_eq!(sizes, vec![27, 3, 1]);
    }

    #[test]
    fn dihedral_classes() {
        // D_{2^m} of order 2^{m+1} has class m
        assert_eq!(spec("D4").build().unwrap().whole().nilpotency_class(), Some(2));
        assert_eq!(spec("D8").build().unwrap().whole().nilpotency_class(), Some(3));
        assert_eq!(spec("D3").build().unwrap().whole().nilpotency_class(), None);
    }

    #[test]
    fn quaternion_structure() {
        let g = quaternion8().unwrap();
        assert!(!g.is_abelian());
        // -1 is the unique involution
        let involutions: Vec<_> = g
            .elements()
            .filter(|&a| !a.is_identity() && g.mul(a, a).is_identity())
            .collect();
        assert_eq!(involutions.len(), 1);
        assert_eq!(g.whole().nilpotency_class(), Some(2));
    }

    #[test]
    fn extraspecial_minus_has_exponent_p_squared() {
        let g = spec("extraspecial(3,-)").build().unwrap();
        assert_eq!(g.whole().nilpotency_class(), Some(2));
        let x = g.element(3).unwrap(); // x^1 y^0
        assert!(!g.pow(x, 3).is_identity());
        assert!(g.pow(x, 9).is_identity());
    }

    #[test]
    fn products() {
        let klein = spec("C2 x C2").build().unwrap();
        assert!(klein.is_abelian());
        assert!(klein.elements().all(|a| klein.mul(a, a).is_identity()));
        let trivial = spec("C1").build().unwrap();
        let s3 = spec("S3").build().unwrap();
        let p = product(&trivial, &s3, 2048).unwrap();
        assert_eq!(p.table(), s3.table());
        assert_eq!(spec("heisenberg(3) x S3").build().unwrap().order(), 162);
    }

    #[test]
    fn build_is_deterministic() {
        for s in standard_catalog(100) {
            assert_eq!(s.build().unwrap().table(), s.build().unwrap().table());
        }
    }

    #[test]
    fn catalog_is_sorted_and_capped() {
        let specs = standard_catalog(100);
        assert!(specs.windows(2).all(|w| w[0].order() <= w[1].order()));
        assert!(specs.iter().all(|s| s.order().unwrap() <= 100));
        assert!(specs.contains(&GroupSpec::Alternating(4)));
    }
}
