//! Translation patterns: which `g_i` multiplies which coordinate in each
//! premise of the commutator lemma.
//!
//! Entry `p[r][c] = i > 0` means coordinate `c` of premise `r` is `x_c·g_i`
//! (right side) or `g_i·x_c` (left side); `0` leaves `x_c` untouched.
//!
//! Pattern file format:
//!
//! ```text
//! side=right
//! 0 0 0
//! 1 2 3
//! ...
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "right" => Ok(Side::Right),
            "left" => Ok(Side::Left),
            other => Err(Error::Argument(format!("side must be 'right' or 'left', got '{other}'"))),
        }
    }
}

/// Rows of the canonical lemma, in the order its twelve premises are stated.
pub const CANONICAL_ROWS: [[u8; 3]; 12] = [
    [0, 0, 0],
    [1, 2, 3],
    [1, 2, 0],
    [1, 0, 2],
    [1, 0, 0],
    [1, 0, 3],
    [0, 0, 1],
    [0, 2, 1],
    [0, 2, 0],
    [0, 0, 2],
    [0, 2, 3],
    [0, 0, 3],
];

/// Most rows a pattern may have; premise masks are `u64`.
pub const MAX_ROWS: usize = 64;
pub const MAX_ARITY: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TranslationPattern {
    side: Side,
    arity: usize,
    rows: Vec<Vec<u8>>,
}

impl TranslationPattern {
    /// Validates rows: at least one, all of width `arity` ≥ 2, entries in
    /// `0..=arity`, first row all zeros.
    pub fn new(side: Side, rows: Vec<Vec<u8>>) -> Result<Self, Error> {
        let bad = |m: String| Err(Error::Argument(format!("invalid pattern: {m}")));
        let Some(first) = rows.first() else {
            return bad("no rows".into());
        };
        let arity = first.len();
        if !(2..=MAX_ARITY).contains(&arity) {
            return bad(format!("rows need between 2 and {MAX_ARITY} entries"));
        }
        if rows.len() > MAX_ROWS {
            return bad(format!("more than {MAX_ROWS} rows"));
        }
        if first.iter().any(|&e| e != 0) {
            return bad("row 1 must be all zeros".into());
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != arity {
                return bad(format!("row {} has {} entries, expected {arity}", r + 1, row.len()));
            }
            if let Some(&e) = row.iter().find(|&&e| e as usize > arity) {
                return bad(format!("row {} has entry {e} above arity {arity}", r + 1));
            }
        }
        Ok(Self { side, arity, rows })
    }

    /// The twelve premises of the lemma with right translations.
    pub fn canonical_right() -> Self {
        Self::canonical(Side::Right)
    }

    /// The same rows with `g_i·x_c` in place of `x_c·g_i`.
    pub fn canonical_left() -> Self {
        Self::canonical(Side::Left)
    }

    fn canonical(side: Side) -> Self {
        Self {
            side,
            arity: 3,
            rows: CANONICAL_ROWS.iter().map(|r| r.to_vec()).collect(),
        }
    }

    /// Default arity-4 pattern: the untranslated tuple, the full diagonal
    /// `(1,2,3,4)`, and every single-coordinate translate `x_c·g_i`.
    pub fn default_length4(side: Side) -> Self {
        let mut rows = vec![vec![0; 4], vec![1, 2, 3, 4]];
        for c in 0..4 {
            for i in 1..=4u8 {
                let mut row = vec![0; 4];
                row[c] = i;
                rows.push(row);
            }
        }
        Self::new(side, rows).expect("default length-4 pattern is valid")
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn is_canonical_right(&self) -> bool {
        *self == Self::canonical_right()
    }

    /// Bitmask with one bit per row.
    pub fn full_mask(&self) -> u64 {
        if self.rows.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.rows.len()) - 1
        }
    }

    /// Premise `r` written out, e.g. `[x1g1,x2g2,x3]`.
    pub fn symbolic_row(&self, r: usize) -> String {
        let coords: Vec<String> = self.rows[r]
            .iter()
            .enumerate()
            .map(|(c, &i)| match (i, self.side) {
                (0, _) => format!("x{}", c + 1),
                (i, Side::Right) => format!("x{}g{}", c + 1, i),
                (i, Side::Left) => format!("g{}x{}", i, c + 1),
            })
            .collect();
        format!("[{}]", coords.join(","))
    }

    /// The translate vector of row `r`, e.g. `(g1^-1,g2^-1,1)`: the tuple
    /// `u` with `y ∈ X·u` exactly when the row-`r` translate of `y` is in `X`.
    pub fn translate_vector(&self, r: usize) -> String {
        let coords: Vec<String> = self.rows[r]
            .iter()
            .map(|&i| match i {
                0 => "1".to_string(),
                i => format!("g{i}^-1"),
            })
            .collect();
        format!("({})", coords.join(","))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("side={}\n", self.side);
        for row in &self.rows {
            let entries: Vec<String> = row.iter().map(u8::to_string).collect();
            out.push_str(&entries.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for TranslationPattern {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let mut side = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(value) = line.strip_prefix("side=") {
                if side.is_some() || !rows.is_empty() {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: "side header must come first, once".into(),
                    });
                }
                side = Some(value.parse::<Side>()?);
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|w| {
                    w.parse::<u8>().map_err(|_| Error::Parse {
                        line: i + 1,
                        message: format!("'{w}' is not a pattern entry"),
                    })
                })
                .collect::<Result<Vec<u8>, _>>()?;
            rows.push(row);
        }
        let side = side.ok_or(Error::Parse {
            line: 1,
            message: "missing 'side=right|left' header".into(),
        })?;
        Self::new(side, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rows_are_valid() {
        let p = TranslationPattern::canonical_right();
        assert_eq!(p.rows().len(), 12);
        assert_eq!(p.arity(), 3);
        assert_eq!(p.full_mask(), 0xfff);
        assert_eq!(TranslationPattern::new(Side::Right, p.rows().to_vec()).unwrap(), p);
    }

    #[test]
    fn symbolic_forms() {
        let p = TranslationPattern::canonical_right();
        assert_eq!(p.symbolic_row(0), "[x1,x2,x3]");
        assert_eq!(p.symbolic_row(3), "[x1g1,x2,x3g2]");
        assert_eq!(p.translate_vector(2), "(g1^-1,g2^-1,1)");
        let l = TranslationPattern::canonical_left();
        assert_eq!(l.symbolic_row(1), "[g1x1,g2x2,g3x3]");
    }

    #[test]
    fn text_round_trip() {
        for p in [
            TranslationPattern::canonical_right(),
            TranslationPattern::canonical_left(),
            TranslationPattern::default_length4(Side::Right),
        ] {
            assert_eq!(p.to_text().parse::<TranslationPattern>().unwrap(), p);
        }
    }

    #[test]
    fn rejects_bad_patterns() {
        assert!("0 0 0\n".parse::<TranslationPattern>().is_err());
        assert!("side=up\n0 0 0\n".parse::<TranslationPattern>().is_err());
        assert!("side=right\n1 0 0\n".parse::<TranslationPattern>().is_err());
        assert!("side=right\n0 0 0\n1 4 0\n".parse::<TranslationPattern>().is_err());
        assert!("side=right\n0 0 0\n1 2\n".parse::<TranslationPattern>().is_err());
        assert!("side=right\n0 0 0\n1 x 2\n".parse::<TranslationPattern>().is_err());
        assert!("side=right\n".parse::<TranslationPattern>().is_err());
        assert!("side=right\n0\n".parse::<TranslationPattern>().is_err());
    }

    #[test]
    fn subsets_of_the_canonical_rows_parse() {
        let p: TranslationPattern = "side=left\n# probe\n0 0 0\n1 2 3\n".parse().unwrap();
        assert_eq!(p.side(), Side::Left);
        assert_eq!(p.rows().len(), 2);
    }
}
