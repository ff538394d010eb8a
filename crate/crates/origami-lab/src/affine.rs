//! Exact tracking of surface points under affine automorphisms.
//!
//! A point is `(square, s, t)` with rational coordinates in the half-open
//! unit square. Each shear letter moves the point by the elementary rule
//! matching the re-tiling of `veech::generator_action`; a group element acts
//! by composing its letter decomposition (rightmost letter first) and
//! relabelling the final origami back to the input.

use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::origami::Origami;
use crate::perm::Perm;
use crate::sl2::{GroupElement, Letter, Word};
use crate::veech::{generator_action, NEG_I_LETTERS};

pub type Rat = Rational64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfacePoint {
    /// 0-based square index.
    pub square: usize,
    pub s: Rat,
    pub t: Rat,
}

impl SurfacePoint {
    pub fn new(square: usize, s: Rat, t: Rat) -> Result<Self> {
        let unit = |x: Rat| !x.is_negative() && x < Rat::one();
        if !unit(s) || !unit(t) {
            return Err(Error::InvalidInput(format!(
                "coordinates ({s}, {t}) outside [0,1)^2"
            )));
        }
        Ok(SurfacePoint { square, s, t })
    }

    /// Parse `square:s,t` with 1-based square and rational coordinates
    /// (`3:1/4,2/7`).
    pub fn parse(text: &str) -> Result<Self> {
        let (sq, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected 'square:s,t', got '{text}'")))?;
        let square: usize = sq
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad square index '{sq}'")))?;
        if square == 0 {
            return Err(Error::Parse("square indices are 1-based".into()));
        }
        let (s, t) = rest
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected two coordinates in '{rest}'")))?;
        SurfacePoint::new(square - 1, parse_rat(s)?, parse_rat(t)?)
    }

    /// Image in the unit torus: the intra-square coordinates.
    pub fn base_coords(&self) -> (Rat, Rat) {
        (self.s, self.t)
    }

    /// Whether the point sits on a vertex of the square complex.
    pub fn is_vertex(&self) -> bool {
        self.s.is_zero() && self.t.is_zero()
    }
}

impl std::fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{},{}", self.square + 1, self.s, self.t)
    }
}

pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    let parse_int =
        |s: &str| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad rational '{t}'")));
    match t.split_once('/') {
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d == 0 {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rat::new(parse_int(num)?, d))
        }
        None => Ok(Rat::from_integer(parse_int(t)?)),
    }
}

/// Whether the point is a singular point of the flat metric (a vertex whose
/// cone angle exceeds 2 pi).
pub fn is_singular_point(origami: &Origami, p: &SurfacePoint) -> bool {
    p.is_vertex() && origami.is_singular_corner(p.square)
}

fn mod1(x: Rat) -> Rat {
    x - x.floor()
}

/// One elementary shear step. The point stays exact; the square index
/// follows the gluing of the surface being sheared whenever a coordinate
/// wraps (half-open squares resolve boundary points).
pub fn apply_letter(letter: Letter, origami: &Origami, p: &SurfacePoint) -> (Origami, SurfacePoint) {
    match letter {
        Letter::NegI => {
            let mut o = origami.clone();
            let mut q = *p;
            for l in NEG_I_LETTERS {
                let (o2, q2) = apply_letter(l, &o, &q);
                o = o2;
                q = q2;
            }
            return (o, q);
        }
        _ => {}
    }
    let one = Rat::one();
    let (square, s, t) = (p.square, p.s, p.t);
    let (new_square, s, t) = match letter {
        Letter::T => {
            let s2 = s + t;
            if s2 >= one {
                (origami.sigma().apply(square), s2 - one, t)
            } else {
                (square, s2, t)
            }
        }
        Letter::TInv => {
            let s2 = s - t;
            if s2.is_negative() {
                (origami.sigma().inverse().apply(square), s2 + one, t)
            } else {
                (square, s2, t)
            }
        }
        Letter::L => {
            let t2 = t + s;
            if t2 >= one {
                (origami.tau().apply(square), s, t2 - one)
            } else {
                (square, s, t2)
            }
        }
        Letter::LInv => {
            let t2 = t - s;
            if t2.is_negative() {
                (origami.tau().inverse().apply(square), s, t2 + one)
            } else {
                (square, s, t2)
            }
        }
        Letter::NegI => unreachable!(),
    };
    (
        generator_action(letter, origami),
        SurfacePoint { square: new_square, s, t },
    )
}

/// Trace of an element application: the word used, the surface and point
/// after each letter, and the relabelling that carried the final origami
/// back to the input.
#[derive(Debug, Clone)]
pub struct AffineTrace {
    pub word: Word,
    pub steps: Vec<(Origami, SurfacePoint)>,
    pub relabelling: Perm,
}

impl AffineTrace {
    /// Structured text dump for debugging.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"word\": \"{}\",", self.word);
        let _ = writeln!(out, "  \"steps\": [");
        for (i, (o, p)) in self.steps.iter().enumerate() {
            let comma = if i + 1 < self.steps.len() { "," } else { "" };
            let _ = writeln!(
                out,
                "    {{\"surface\": \"{}\", \"point\": \"{}\"}}{}",
                o, p, comma
            );
        }
        let _ = writeln!(out, "  ],");
        let _ = writeln!(out, "  \"relabelling\": \"{}\"", self.relabelling);
        let _ = write!(out, "}}");
        out
    }
}

/// Apply a Veech-group element to a point, with the full trace.
pub fn apply_element_traced(
    g: &GroupElement,
    origami: &Origami,
    p: &SurfacePoint,
) -> Result<(SurfacePoint, AffineTrace)> {
    if p.square >= origami.degree() {
        return Err(Error::InvalidInput(format!(
            "square {} out of range for degree {}",
            p.square + 1,
            origami.degree()
        )));
    }
    let word = g.decompose();
    let letters: Vec<Letter> = word.letters().collect();
    let mut cur_o = origami.clone();
    let mut cur_p = *p;
    let mut steps = Vec::with_capacity(letters.len());
    for &l in letters.iter().rev() {
        let (o2, p2) = apply_letter(l, &cur_o, &cur_p);
        cur_o = o2;
        cur_p = p2;
        steps.push((cur_o.clone(), cur_p));
    }
    let (cf_in, rho_in) = origami.canonical_labelling();
    let (cf_fin, rho_fin) = cur_o.canonical_labelling();
    if cf_in != cf_fin {
        return Err(Error::NotInVeechGroup(g.to_string()));
    }
    // carry the square index home: final labels -> canonical -> input labels
    let relabelling = rho_in.inverse().compose(&rho_fin);
    let home = SurfacePoint {
        square: relabelling.apply(cur_p.square),
        s: cur_p.s,
        t: cur_p.t,
    };
    Ok((
        home,
        AffineTrace {
            word,
            steps,
            relabelling,
        },
    ))
}

/// Apply a Veech-group element to a point. The torus is special-cased to
/// the forward linear action mod Z^2, which the letter walk reproduces
/// exactly (tested); other surfaces walk the letter decomposition.
pub fn apply_element(
    g: &GroupElement,
    origami: &Origami,
    p: &SurfacePoint,
) -> Result<SurfacePoint> {
    if origami.degree() == 1 {
        return Ok(torus_action(g, p));
    }
    apply_element_traced(g, origami, p).map(|(q, _)| q)
}

/// Forward linear action on the unit torus: `(s,t) -> (as+bt, cs+dt) mod 1`.
pub fn torus_action(g: &GroupElement, p: &SurfacePoint) -> SurfacePoint {
    let s = Rat::from_integer(g.a) * p.s + Rat::from_integer(g.b) * p.t;
    let t = Rat::from_integer(g.c) * p.s + Rat::from_integer(g.d) * p.t;
    SurfacePoint {
        square: p.square,
        s: mod1(s),
        t: mod1(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::veech::{veech_group, VeechOptions};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn random_point(n: usize, denom: i64, rng: &mut StdRng) -> SurfacePoint {
        SurfacePoint::new(
            rng.gen_range(0..n),
            rat(rng.gen_range(0..denom), denom),
            rat(rng.gen_range(0..denom), denom),
        )
        .unwrap()
    }

    #[test]
    fn torus_shear_without_wrap() {
        let t = Origami::torus();
        let p = SurfacePoint::new(0, rat(1, 4), rat(1, 2)).unwrap();
        let (_, q) = apply_letter(Letter::T, &t, &p);
        assert_eq!(q, SurfacePoint::new(0, rat(3, 4), rat(1, 2)).unwrap());
    }

    #[test]
    fn torus_shear_with_wrap() {
        let t = Origami::torus();
        let p = SurfacePoint::new(0, rat(3, 4), rat(1, 2)).unwrap();
        let (_, q) = apply_letter(Letter::T, &t, &p);
        assert_eq!(q, SurfacePoint::new(0, rat(1, 4), rat(1, 2)).unwrap());
    }

    #[test]
    fn l_origami_shear_crosses_gluing() {
        // Oracle: develop in the planar L polygon, shear by T, re-tile. A
        // point in square 1 with s + t >= 1 slides into the square glued to
        // its right, which for sigma = (1 2) is square 2.
        let o = Origami::l_origami();
        let p = SurfacePoint::new(0, rat(3, 4), rat(1, 2)).unwrap();
        let (o2, q) = apply_letter(Letter::T, &o, &p);
        assert_eq!(q.square, 1);
        assert_eq!((q.s, q.t), (rat(1, 4), rat(1, 2)));
        assert_eq!(o2, generator_action(Letter::T, &o));
    }

    #[test]
    fn identity_fixes_points() {
        let o = Origami::l_origami();
        let p = SurfacePoint::new(2, rat(1, 3), rat(2, 7)).unwrap();
        let (q, trace) = apply_element_traced(&GroupElement::IDENTITY, &o, &p).unwrap();
        assert_eq!(q, p);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn torus_walk_matches_linear_action() {
        let torus = Origami::torus();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..200 {
            let mut g = GroupElement::IDENTITY;
            for _ in 0..rng.gen_range(0..10) {
                let l = [Letter::T, Letter::TInv, Letter::L, Letter::LInv, Letter::NegI]
                    [rng.gen_range(0..5)];
                g = g.mul(&l.matrix()).unwrap();
            }
            let p = random_point(1, 64, &mut rng);
            let (walked, _) = apply_element_traced(&g, &torus, &p).unwrap();
            assert_eq!(walked, torus_action(&g, &p), "g = {g}");
        }
    }

    #[test]
    fn non_member_rejected() {
        let o = Origami::l_origami();
        let p = SurfacePoint::new(0, rat(1, 3), rat(1, 5)).unwrap();
        let err = apply_element_traced(&GroupElement::T, &o, &p).unwrap_err();
        assert!(matches!(err, Error::NotInVeechGroup(_)));
    }

    #[test]
    fn equivariance_with_base_torus() {
        // q(g.x) = g.q(x) mod Z^2, exactly, for stabilizer elements.
        let o = Origami::l_origami();
        let (data, _) = veech_group(&o, &VeechOptions::default()).unwrap();
        let mut rng = StdRng::seed_from_u64(37);
        for (g, _) in &data.generators {
            for _ in 0..50 {
                let p = random_point(3, 1 << 16, &mut rng);
                let q = apply_element(g, &o, &p).unwrap();
                let base = torus_action(g, &SurfacePoint { square: 0, s: p.s, t: p.t });
                assert_eq!((q.s, q.t), (base.s, base.t));
            }
        }
    }

    #[test]
    fn group_law_on_stabilizer_pairs() {
        let o = Origami::l_origami();
        let (data, _) = veech_group(&o, &VeechOptions::default()).unwrap();
        let gens = &data.generators;
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..30 {
            let (g, _) = &gens[rng.gen_range(0..gens.len())];
            let (h, _) = &gens[rng.gen_range(0..gens.len())];
            let gh = g.mul(h).unwrap();
            let p = random_point(3, 1 << 16, &mut rng);
            let via_h = apply_element(h, &o, &p).unwrap();
            let composed = apply_element(g, &o, &via_h).unwrap();
            let direct = apply_element(&gh, &o, &p).unwrap();
            assert_eq!(composed, direct);
        }
    }

    #[test]
    fn denominators_never_grow() {
        let o = Origami::l_origami();
        let (data, _) = veech_group(&o, &VeechOptions::default()).unwrap();
        let p = SurfacePoint::new(1, rat(5, 64), rat(33, 64)).unwrap();
        for (g, _) in &data.generators {
            let q = apply_element(g, &o, &p).unwrap();
            assert!(64 % q.s.denom() == 0 && 64 % q.t.denom() == 0, "denominator grew: {q}");
        }
    }

    #[test]
    fn pushforward_is_measure_preserving_statistically() {
        // A uniform grid pushes forward to squares in equal proportion.
        let o = Origami::l_origami();
        let (data, _) = veech_group(&o, &VeechOptions::default()).unwrap();
        let g = data.generators[0].0;
        let m = 60i64; // 3 * 60^2 = 10800 points
        let mut per_square = vec![0usize; 3];
        for sq in 0..3 {
            for i in 0..m {
                for j in 0..m {
                    let p = SurfacePoint::new(sq, rat(i, m), rat(j, m)).unwrap();
                    let q = apply_element(&g, &o, &p).unwrap();
                    per_square[q.square] += 1;
                }
            }
        }
        let total: usize = per_square.iter().sum();
        assert_eq!(total, 3 * (m * m) as usize);
        for &c in &per_square {
            let frac = c as f64 / total as f64;
            assert!((frac - 1.0 / 3.0).abs() < 0.02, "share {frac}");
        }
    }

    #[test]
    fn singular_point_flagging() {
        let o = Origami::l_origami();
        let vertex = SurfacePoint::new(0, rat(0, 1), rat(0, 1)).unwrap();
        assert!(is_singular_point(&o, &vertex));
        let interior = SurfacePoint::new(0, rat(1, 2), rat(1, 2)).unwrap();
        assert!(!is_singular_point(&o, &interior));
        let torus_vertex = SurfacePoint::new(0, rat(0, 1), rat(0, 1)).unwrap();
        assert!(!is_singular_point(&Origami::torus(), &torus_vertex));
    }

    #[test]
    fn trace_dump_mentions_each_step() {
        let o = Origami::l_origami();
        let (data, _) = veech_group(&o, &VeechOptions::default()).unwrap();
        let p = SurfacePoint::new(0, rat(1, 7), rat(2, 7)).unwrap();
        let (_, trace) = apply_element_traced(&data.generators[0].0, &o, &p).unwrap();
        let text = trace.to_text();
        assert!(text.contains("\"word\""));
        assert_eq!(text.matches("\"surface\"").count(), trace.steps.len());
    }
}
