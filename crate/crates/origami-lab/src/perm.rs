//! Permutations on `{1..N}`, stored 0-based, with the disjoint-cycle text
//! form used by the origami file format (`(1 2)(3 4)`, identity `()`).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// Build from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img as usize >= n {
                return Err(Error::NotAPermutation(format!(
                    "image {} out of range 1..{}",
                    img + 1,
                    n
                )));
            }
            if seen[img as usize] {
                return Err(Error::NotAPermutation(format!(
                    "duplicate image {}",
                    img + 1
                )));
            }
            seen[img as usize] = true;
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            inv[img as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// `self` after `other`: `(self.compose(other)).apply(x) == self.apply(other.apply(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm {
            images: (0..self.degree())
                .map(|i| self.images[other.apply(i)])
                .collect(),
        }
    }

    /// Conjugate `rho . self . rho^{-1}` (relabelling squares by `rho`).
    pub fn conjugate(&self, rho: &Perm) -> Perm {
        rho.compose(self).compose(&rho.inverse())
    }

    /// Nontrivial cycles, each rotated to start at its least element,
    /// sorted by that element. 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = self.apply(cur);
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    /// Cycle lengths including fixed points (one entry per orbit).
    pub fn all_cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 1usize;
            seen[start] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[cur] = true;
                len += 1;
                cur = self.apply(cur);
            }
            out.push(len);
        }
        out
    }

    /// Parse 1-based disjoint-cycle notation over `1..=n`; `()` is the identity.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self> {
        let mut images: Vec<Option<u32>> = vec![None; n];
        let mut chars = text.trim().chars().peekable();
        if chars.peek().is_none() {
            return Err(Error::Parse("empty permutation".into()));
        }
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if c != '(' {
                return Err(Error::Parse(format!("expected '(' in cycles, found '{c}'")));
            }
            chars.next();
            let mut body = String::new();
            let mut closed = false;
            for c in chars.by_ref() {
                if c == ')' {
                    closed = true;
                    break;
                }
                body.push(c);
            }
            if !closed {
                return Err(Error::Parse("unclosed cycle".into()));
            }
            let entries: Vec<usize> = body
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad cycle entry '{tok}'")))
                })
                .collect::<Result<_>>()?;
            for &e in &entries {
                if e == 0 || e > n {
                    return Err(Error::NotAPermutation(format!(
                        "symbol {e} out of range 1..{n}"
                    )));
                }
            }
            if entries.len() == 1 {
                return Err(Error::Parse(format!(
                    "singleton cycle ({}) — omit fixed points",
                    entries[0]
                )));
            }
            for w in 0..entries.len() {
                let from = entries[w] - 1;
                let to = entries[(w + 1) % entries.len()] - 1;
                if images[from].is_some() {
                    return Err(Error::NotAPermutation(format!(
                        "symbol {} appears twice",
                        from + 1
                    )));
                }
                images[from] = Some(to as u32);
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.unwrap_or(i as u32))
            .collect();
        Perm::from_images(images)
    }

    pub fn random<R: rand::Rng>(n: usize, rng: &mut R) -> Perm {
        let mut images: Vec<u32> = (0..n as u32).collect();
        // Fisher-Yates
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            images.swap(i, j);
        }
        Perm { images }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cyc in cycles {
            write!(f, "(")?;
            for (k, &e) in cyc.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", e + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Orbit of `start` under a set of permutations (as a sorted list).
pub fn orbit(perms: &[&Perm], start: usize) -> Vec<usize> {
    let n = perms[0].degree();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for p in perms {
            let y = p.apply(x);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let p = Perm::parse_cycles("(1 2)(3 4)", 5).unwrap();
        assert_eq!(p.apply(0), 1);
        assert_eq!(p.apply(1), 0);
        assert_eq!(p.apply(4), 4);
        assert_eq!(p.to_string(), "(1 2)(3 4)");
        let id = Perm::parse_cycles("()", 3).unwrap();
        assert_eq!(id, Perm::identity(3));
        assert_eq!(id.to_string(), "()");
    }

    #[test]
    fn rejects_bad_cycles() {
        assert!(Perm::parse_cycles("(1 2)(2 3)", 3).is_err());
        assert!(Perm::parse_cycles("(1 4)", 3).is_err());
        assert!(Perm::parse_cycles("(0 1)", 3).is_err());
    }

    #[test]
    fn compose_order() {
        // compose(f, g) applies g first.
        let f = Perm::parse_cycles("(1 2)", 3).unwrap();
        let g = Perm::parse_cycles("(2 3)", 3).unwrap();
        let fg = f.compose(&g);
        // g: 1->1, then f: 1->2
        assert_eq!(fg.apply(0), 1);
        // g: 2->3, f: 3->3
        assert_eq!(fg.apply(1), 2);
    }

    #[test]
    fn inverse_and_conjugate() {
        let p = Perm::parse_cycles("(1 2 3)", 4).unwrap();
        assert_eq!(p.compose(&p.inverse()), Perm::identity(4));
        let rho = Perm::parse_cycles("(1 4)", 4).unwrap();
        let q = p.conjugate(&rho);
        // rho maps 1<->4, so (1 2 3) becomes (4 2 3)
        assert_eq!(q.apply(3), 1);
        assert_eq!(q.apply(1), 2);
        assert_eq!(q.apply(2), 3);
    }
}
