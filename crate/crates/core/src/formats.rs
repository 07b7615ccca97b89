//! Text formats for groups.
//!
//! Cayley tables:
//!
//! ```text
//! order 4
//! 0 1 2 3
//! 1 0 3 2
//! 2 3 0 1
//! 3 2 1 0
//! ```
//!
//! Permutation generators, cycles on points `1..m`, separated by newlines or
//! top-level commas:
//!
//! ```text
//! (1 2 3 4)
//! (1 3)
//! ```
//!
//! Blank lines and text after `#` are ignored in both formats.

use std::collections::{HashSet, VecDeque};

use crate::catalog::compose;
use crate::error::Error;
use crate::group::{Group, GroupError};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_cayley(text: &str) -> Result<Group, Error> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut words = header.split_whitespace();
    let order: usize = match (words.next(), words.next(), words.next()) {
        (Some("order"), Some(n), None) => n
            .parse()
            .map_err(|_| parse_err(header_line, format!("bad order '{n}'")))?,
        // a bare single-row table such as "0" is the trivial group
        (Some("0"), None, None) => return Ok(Group::from_rows("cayley", &[vec![0]])?),
        _ => return Err(parse_err(header_line, "expected header 'order n'")),
    };
    if order == 0 {
        return Err(parse_err(header_line, "order must be positive"));
    }

    let mut rows = Vec::with_capacity(order);
    for (line, content) in lines {
        let row = content
            .split_whitespace()
            .enumerate()
            .map(|(col, w)| {
                w.parse::<u32>()
                    .map_err(|_| parse_err(line, format!("column {col}: '{w}' is not an index")))
            })
            .collect::<Result<Vec<u32>, _>>()?;
        if row.len() != order {
            return Err(GroupError::Ragged {
                row: rows.len(),
                expected: order,
                found: row.len(),
            }
            .into());
        }
        if rows.len() == order {
            return Err(parse_err(line, format!("more than {order} rows")));
        }
        rows.push(row);
    }
    if rows.len() != order {
        return Err(GroupError::Ragged {
            row: rows.len(),
            expected: order,
            found: 0,
        }
        .into());
    }
    Ok(Group::from_rows("cayley", &rows)?)
}

pub fn to_cayley(g: &Group) -> String {
    let n = g.order();
    let mut out = format!("order {n}\n");
    for row in g.table().chunks(n) {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// One generator: a product of disjoint-or-not cycles, as 0-based
/// `(point -> image)` lists. Cycles compose right to left like the group.
type Cycles = Vec<Vec<usize>>;

fn parse_generator(line: usize, s: &str) -> Result<Cycles, Error> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| parse_err(line, format!("expected '(' in '{s}'")))?;
        let close = body
            .find(')')
            .ok_or_else(|| parse_err(line, format!("unclosed cycle in '{s}'")))?;
        let points = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
            .map(|w| match w.parse::<usize>() {
                Ok(p) if p >= 1 => Ok(p - 1),
                _ => Err(parse_err(line, format!("bad point '{w}', points start at 1"))),
            })
            .collect::<Result<Vec<usize>, _>>()?;
        let mut seen = HashSet::new();
        if let Some(p) = points.iter().find(|p| !seen.insert(**p)) {
            return Err(parse_err(line, format!("point {} repeats within a cycle", p + 1)));
        }
        cycles.push(points);
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// Splits a line into generators at commas that are outside parentheses.
fn split_generators(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().map(str::trim).filter(|g| !g.is_empty()).collect()
}

fn cycles_to_one_line(cycles: &Cycles, degree: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..degree).collect();
    // "(1 2)(1 3)" means apply (1 3) first
    for cycle in cycles.iter().rev() {
        let mut single: Vec<usize> = (0..degree).collect();
        for (i, &p) in cycle.iter().enumerate() {
            single[p] = cycle[(i + 1) % cycle.len()];
        }
        perm = compose(&single, &perm);
    }
    perm
}

/// Enumerates the permutation group generated by the listed generators.
/// Elements are numbered in lexicographic one-line order, so the generators
/// of `S_n` reproduce the catalog's `symmetric(n)` exactly.
pub fn parse_permutations(text: &str, cap: usize) -> Result<Group, Error> {
    let mut generators = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        for g in split_generators(strip_comment(raw)) {
            generators.push(parse_generator(i + 1, g)?);
        }
    }
    let degree = generators
        .iter()
        .flatten()
        .flatten()
        .map(|p| p + 1)
        .max()
        .unwrap_or(0);
    let gens: Vec<Vec<usize>> = generators
        .iter()
        .map(|c| cycles_to_one_line(c, degree))
        .collect();

    let identity: Vec<usize> = (0..degree).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for s in &gens {
            let y = compose(&x, s);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::OrderCap {
                        spec: "permutation closure".into(),
                        order: seen.len() as u128,
                        cap,
                    });
                }
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<Vec<usize>> = seen.into_iter().collect();
    elements.sort();
    Ok(Group::from_elements("perm", &elements, |a, b| compose(a, b))?)
}
