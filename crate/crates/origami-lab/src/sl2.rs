//! Exact 2x2 integer matrices of determinant one: operator norms, word
//! decomposition over the shear generators, and generator sets read from
//! `a,b,c,d` text files.

use std::fmt;

use crate::error::{Error, Result};

/// The horizontal shear `T = [[1,1],[0,1]]`, the vertical shear
/// `L = [[1,0],[1,1]]`, their inverses, and `-I`. Together these generate
/// all of SL2(Z), so every element decomposes into such letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    T,
    TInv,
    L,
    LInv,
    NegI,
}

impl Letter {
    pub fn matrix(self) -> GroupElement {
        match self {
            Letter::T => GroupElement::T,
            Letter::TInv => GroupElement::T.inverse(),
            Letter::L => GroupElement::L,
            Letter::LInv => GroupElement::L.inverse(),
            Letter::NegI => GroupElement::NEG_IDENTITY,
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::T => Letter::TInv,
            Letter::TInv => Letter::T,
            Letter::L => Letter::LInv,
            Letter::LInv => Letter::L,
            Letter::NegI => Letter::NegI,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::T => write!(f, "T"),
            Letter::TInv => write!(f, "T^-1"),
            Letter::L => write!(f, "L"),
            Letter::LInv => write!(f, "L^-1"),
            Letter::NegI => write!(f, "-I"),
        }
    }
}

/// A word over the letter alphabet, stored as runs `(letter, exponent)` with
/// positive exponents and adjacent inverse runs merged away. The product of
/// the runs, left to right, is the group element the word spells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Word {
    runs: Vec<(Letter, u64)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn push(&mut self, letter: Letter, count: u64) {
        if count == 0 {
            return;
        }
        // -I is central and squares to the identity.
        if letter == Letter::NegI {
            let mut parity = count % 2;
            if let Some(&(Letter::NegI, _)) = self.runs.last() {
                self.runs.pop();
                parity = (parity + 1) % 2;
            }
            if parity == 1 {
                self.runs.push((Letter::NegI, 1));
            }
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.0 == letter {
                last.1 += count;
                return;
            }
            if last.0 == letter.inverse() {
                if last.1 > count {
                    last.1 -= count;
                    return;
                }
                let remaining = count - last.1;
                self.runs.pop();
                self.push(letter, remaining);
                return;
            }
        }
        self.runs.push((letter, count));
    }

    /// Signed push: negative exponents use the inverse letter.
    pub fn push_signed(&mut self, letter: Letter, exponent: i64) {
        if exponent >= 0 {
            self.push(letter, exponent as u64);
        } else {
            self.push(letter.inverse(), exponent.unsigned_abs());
        }
    }

    pub fn runs(&self) -> &[(Letter, u64)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Expanded letter count.
    pub fn letter_len(&self) -> u64 {
        self.runs.iter().map(|&(_, k)| k).sum()
    }

    /// Iterate single letters left to right.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.runs
            .iter()
            .flat_map(|&(l, k)| std::iter::repeat(l).take(k as usize))
    }

    pub fn product(&self) -> Result<GroupElement> {
        let mut acc = GroupElement::IDENTITY;
        for &(letter, count) in &self.runs {
            acc = acc.mul(&letter.matrix().pow(count)?)?;
        }
        Ok(acc)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &(l, k) in &other.runs {
            out.push(l, k);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        let mut out = Word::empty();
        for &(l, k) in self.runs.iter().rev() {
            out.push(l.inverse(), k);
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "e");
        }
        for (i, &(l, k)) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match (l, k) {
                (Letter::NegI, _) => write!(f, "-I")?,
                (Letter::T, 1) => write!(f, "T")?,
                (Letter::L, 1) => write!(f, "L")?,
                (Letter::TInv, 1) => write!(f, "T^-1")?,
                (Letter::LInv, 1) => write!(f, "L^-1")?,
                (Letter::T, k) => write!(f, "T^{k}")?,
                (Letter::L, k) => write!(f, "L^{k}")?,
                (Letter::TInv, k) => write!(f, "T^-{k}")?,
                (Letter::LInv, k) => write!(f, "L^-{k}")?,
            }
        }
        Ok(())
    }
}

/// An element of SL2(Z): `[[a, b], [c, d]]` with `ad - bc = 1`, entries
/// stored as `i64` with checked arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1, b: 0, c: 0, d: 1 };
    pub const NEG_IDENTITY: GroupElement = GroupElement { a: -1, b: 0, c: 0, d: -1 };
    pub const T: GroupElement = GroupElement { a: 1, b: 1, c: 0, d: 1 };
    pub const L: GroupElement = GroupElement { a: 1, b: 0, c: 1, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            return Err(Error::InvalidInput(format!(
                "matrix [[{a},{b}],[{c},{d}]] has determinant {det}, expected 1"
            )));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn mul(&self, rhs: &GroupElement) -> Result<GroupElement> {
        let m = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            let v = (x as i128) * (y as i128) + (z as i128) * (w as i128);
            i64::try_from(v).map_err(|_| Error::Overflow)
        };
        Ok(GroupElement {
            a: m(self.a, rhs.a, self.b, rhs.c)?,
            b: m(self.a, rhs.b, self.b, rhs.d)?,
            c: m(self.c, rhs.a, self.d, rhs.c)?,
            d: m(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    pub fn pow(&self, mut k: u64) -> Result<GroupElement> {
        let mut base = *self;
        let mut acc = GroupElement::IDENTITY;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Exact inverse: `[[d, -b], [-c, a]]`.
    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn transpose(&self) -> GroupElement {
        GroupElement {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == GroupElement::IDENTITY
    }

    /// `a^2 + b^2 + c^2 + d^2`, the trace of `g^T g`.
    pub fn entry_square_sum(&self) -> i128 {
        let sq = |x: i64| (x as i128) * (x as i128);
        sq(self.a) + sq(self.b) + sq(self.c) + sq(self.d)
    }

    /// Largest singular value. With `t = a^2+b^2+c^2+d^2`, the squared norm
    /// is `(t + sqrt(t^2 - 4)) / 2`; it is always at least 1.
    pub fn operator_norm(&self) -> f64 {
        self.operator_norm_sq().sqrt()
    }

    pub fn operator_norm_sq(&self) -> f64 {
        let t = self.entry_square_sum() as f64;
        let disc = (t * t - 4.0).max(0.0);
        (t + disc.sqrt()) / 2.0
    }

    /// `2 ln ||g||`, the hyperbolic displacement of the basepoint `i`.
    pub fn log_norm_twice(&self) -> f64 {
        self.operator_norm_sq().ln()
    }

    /// Decompose into a word over `{T, T^-1, L, L^-1, -I}` whose product is
    /// exactly `self`. Nearest-integer reduction of the first column keeps
    /// the number of runs logarithmic in the entry size.
    pub fn decompose(&self) -> Word {
        let mut word = Word::empty();
        let mut g = *self;
        loop {
            if g.c == 0 {
                // g = [[±1, b], [0, ±1]]
                if g.a == 1 {
                    word.push_signed(Letter::T, g.b);
                } else {
                    word.push(Letter::NegI, 1);
                    word.push_signed(Letter::T, -g.b);
                }
                break;
            }
            if g.a == 0 {
                // g = S * [[c, d], [0, -b]] with S = T^-1 L T^-1
                word.push(Letter::TInv, 1);
                word.push(Letter::L, 1);
                word.push(Letter::TInv, 1);
                g = GroupElement {
                    a: g.c,
                    b: g.d,
                    c: 0,
                    d: -g.b,
                };
                continue;
            }
            if g.a.abs() >= g.c.abs() {
                let q = nearest_quotient(g.a, g.c);
                word.push_signed(Letter::T, q);
                g = GroupElement {
                    a: g.a - q * g.c,
                    b: g.b - q * g.d,
                    c: g.c,
                    d: g.d,
                };
            } else {
                let q = nearest_quotient(g.c, g.a);
                word.push_signed(Letter::L, q);
                g = GroupElement {
                    a: g.a,
                    b: g.b,
                    c: g.c - q * g.a,
                    d: g.d - q * g.b,
                };
            }
        }
        word
    }
}

/// Integer nearest to `a / b` (ties rounded toward zero), for `b != 0`.
fn nearest_quotient(a: i64, b: i64) -> i64 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Generators of a subgroup, with the caller's assertion about convex
/// cocompactness carried along as data (it is never verified here).
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    gens: Vec<GroupElement>,
    pub claimed_convex_cocompact: bool,
}

impl GeneratorSet {
    pub fn new(gens: Vec<GroupElement>, claimed_convex_cocompact: bool) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidInput("generator set is empty".into()));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.is_identity() {
                return Err(Error::InvalidInput("identity listed as a generator".into()));
            }
            if gens[..i].contains(g) {
                return Err(Error::InvalidInput(format!("duplicate generator {g}")));
            }
        }
        Ok(GeneratorSet {
            gens,
            claimed_convex_cocompact,
        })
    }

    /// The full modular group via its two shears.
    pub fn sl2z() -> Self {
        GeneratorSet::new(vec![GroupElement::T, GroupElement::L], false).unwrap()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.gens
    }

    /// Generators and their inverses, deduplicated, in a fixed order.
    pub fn symmetrized(&self) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(2 * self.gens.len());
        for g in &self.gens {
            if !out.contains(g) {
                out.push(*g);
            }
            let inv = g.inverse();
            if !out.contains(&inv) {
                out.push(inv);
            }
        }
        out
    }

    /// Parse a generator file: one `a,b,c,d` line per matrix, `#` comments.
    pub fn parse_str(text: &str, claimed_convex_cocompact: bool) -> Result<Self> {
        let mut gens = Vec::new();
        for raw in text.lines() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<i64> = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad matrix entry '{tok}'")))
                })
                .collect::<Result<_>>()?;
            if nums.len() != 4 {
                return Err(Error::Parse(format!(
                    "expected 4 entries per line, got {}",
                    nums.len()
                )));
            }
            gens.push(GroupElement::new(nums[0], nums[1], nums[2], nums[3])?);
        }
        GeneratorSet::new(gens, claimed_convex_cocompact)
    }
}
