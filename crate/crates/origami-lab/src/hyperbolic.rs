//! Upper half-plane geometry for subgroups of SL2(Z): Moebius action,
//! hyperbolic distance, basepoint displacement, orbit enumeration by
//! displacement, critical-exponent estimation, and displacement shells.
//!
//! At the basepoint `i` the displacement of `g` equals `2 ln ||g||`, so
//! shells indexed by displacement translate to exact operator-norm bands.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::sl2::{GeneratorSet, GroupElement, Letter, Word};

/// Comparisons against shell boundaries use this guard so irrational band
/// edges do not flap under rounding; no claim is sensitive to the boundary.
pub const BAND_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput(format!(
                "({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(HPoint { x, y })
    }
}

/// Moebius action `g.z = (az + b) / (cz + d)`.
pub fn moebius(g: &GroupElement, z: HPoint) -> HPoint {
    let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
    // (az+b)(conj(cz+d)) / |cz+d|^2
    let re_num = a * z.x + b;
    let im_num = a * z.y;
    let re_den = c * z.x + d;
    let im_den = c * z.y;
    let den = re_den * re_den + im_den * im_den;
    HPoint {
        x: (re_num * re_den + im_num * im_den) / den,
        y: (im_num * re_den - re_num * im_den) / den,
    }
}

/// Hyperbolic distance `arccosh(1 + |z-w|^2 / (2 Im z Im w))`.
pub fn distance(z: HPoint, w: HPoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    arg.max(1.0).acosh()
}

/// Displacement `d(g.z0, z0)`. At `z0 = i` this equals `2 ln ||g||` and is
/// computed from the entry square sum directly: `cosh d = t / 2`.
pub fn displacement(g: &GroupElement, basepoint: HPoint) -> f64 {
    if basepoint == HPoint::I {
        let t = g.entry_square_sum() as f64;
        (t / 2.0).max(1.0).acosh()
    } else {
        distance(moebius(g, basepoint), basepoint)
    }
}

#[derive(Debug, Clone)]
pub struct EnumOptions {
    /// Hard cap on distinct elements visited (including pruned interior).
    pub max_elements: usize,
    /// Hard cap on word length explored.
    pub max_depth: usize,
    /// Extra displacement explored beyond the cap. Orbit displacement is not
    /// monotone along words, so branches are followed while they stay within
    /// `cap + slack`; the brute-force cross-checks in the test suite pin the
    /// default down.
    pub slack: f64,
    /// Keep the breadth-first witness word of each element.
    pub record_words: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            max_elements: 20_000_000,
            max_depth: 1_000_000,
            slack: 1.0,
            record_words: false,
        }
    }
}

/// One enumerated orbit element.
#[derive(Debug, Clone)]
pub struct OrbitElement {
    pub g: GroupElement,
    pub displacement: f64,
    pub word: Option<Word>,
}

/// Result of a displacement-bounded enumeration: all elements found with
/// displacement within the cap, a report of how deep the search went, and
/// whether the search frontier was exhausted within the slack band.
#[derive(Debug, Clone)]
pub struct DisplacementBall {
    pub elements: Vec<OrbitElement>,
    pub explored_depth: usize,
    pub frontier_exhausted: bool,
    pub basepoint: HPoint,
    pub cap: f64,
}

/// Breadth-first enumeration of the subgroup generated by `gens`, keeping
/// every element whose displacement at `basepoint` is at most `cap` (plus
/// the boundary guard). Deduplication is by exact matrix value, so each
/// element is stored once with its first (shortest) witness word.
pub fn enumerate_by_displacement(
    gens: &GeneratorSet,
    cap: f64,
    basepoint: HPoint,
    opts: &EnumOptions,
) -> Result<DisplacementBall> {
    let alphabet = gens.symmetrized();
    let prune_at = cap + opts.slack;

    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut words: HashMap<GroupElement, Word> = HashMap::new();
    let mut queue: VecDeque<(GroupElement, usize)> = VecDeque::new();
    let id = GroupElement::IDENTITY;
    seen.insert(id);
    if opts.record_words {
        words.insert(id, Word::empty());
    }
    queue.push_back((id, 0));

    let mut explored_depth = 0usize;
    let mut frontier_exhausted = true;

    while let Some((g, depth)) = queue.pop_front() {
        explored_depth = explored_depth.max(depth);
        if depth >= opts.max_depth {
            frontier_exhausted = false;
            continue;
        }
        for s in &alphabet {
            let h = match g.mul(s) {
                Ok(h) => h,
                // An overflowing product is far outside any desk-scale band.
                Err(Error::Overflow) => continue,
                Err(e) => return Err(e),
            };
            if seen.contains(&h) {
                continue;
            }
            if displacement(&h, basepoint) > prune_at {
                continue;
            }
            if seen.len() >= opts.max_elements {
                return Err(Error::BudgetExceeded(format!(
                    "orbit enumeration passed {} elements at displacement cap {cap}",
                    opts.max_elements
                )));
            }
            if opts.record_words {
                let mut w = words.get(&g).unwrap().clone();
                w.push(letter_of(s, gens)?, 1);
                words.insert(h, w);
            }
            seen.insert(h);
            queue.push_back((h, depth + 1));
        }
    }

    let mut elements: Vec<OrbitElement> = seen
        .into_iter()
        .filter_map(|g| {
            let disp = displacement(&g, basepoint);
            (disp <= cap + BAND_GUARD).then(|| OrbitElement {
                g,
                displacement: disp,
                word: words.remove(&g),
            })
        })
        .collect();
    elements.sort_by(|p, q| {
        p.displacement
            .partial_cmp(&q.displacement)
            .unwrap()
            .then_with(|| p.g.cmp(&q.g))
    });
    Ok(DisplacementBall {
        elements,
        explored_depth,
        frontier_exhausted,
        basepoint,
        cap,
    })
}

/// Witness letters only exist for the standard shear alphabet; for general
/// generator sets the word is reported against the numbered generators, so
/// this maps each alphabet matrix back to a display letter when possible.
fn letter_of(s: &GroupElement, _gens: &GeneratorSet) -> Result<Letter> {
    if *s == GroupElement::T {
        Ok(Letter::T)
    } else if *s == GroupElement::T.inverse() {
        Ok(Letter::TInv)
    } else if *s == GroupElement::L {
        Ok(Letter::L)
    } else if *s == GroupElement::L.inverse() {
        Ok(Letter::LInv)
    } else if *s == GroupElement::NEG_IDENTITY {
        Ok(Letter::NegI)
    } else {
        Err(Error::InvalidInput(
            "witness words are only recorded for the T/L alphabet".into(),
        ))
    }
}

/// How `enumerate_ball` should bound the search.
#[derive(Debug, Clone, Copy)]
pub enum BallBound {
    WordLength(usize),
    NormCap(f64),
}

/// Ball of a subgroup, per the bound: for a word-length bound, all reduced
/// products up to that length; for a norm cap `R`, the elements with
/// `||g|| <= R` among words explored (with the explored-depth report making
/// truncation visible to the caller).
pub fn enumerate_ball(
    gens: &GeneratorSet,
    bound: BallBound,
    opts: &EnumOptions,
) -> Result<DisplacementBall> {
    match bound {
        BallBound::NormCap(r) => {
            if r < 1.0 {
                return Err(Error::InvalidInput(format!("norm cap {r} below 1")));
            }
            // ||g|| <= R  <=>  displacement at i <= 2 ln R
            enumerate_by_displacement(gens, 2.0 * r.ln(), HPoint::I, opts)
        }
        BallBound::WordLength(w) => {
            let mut o = opts.clone();
            o.max_depth = w;
            o.slack = f64::INFINITY;
            enumerate_by_displacement(gens, f64::INFINITY, HPoint::I, &o)
        }
    }
}

/// A displacement band `(upper - width, upper]` of a subgroup, carrying the
/// uniform probability measure on its elements.
#[derive(Debug, Clone)]
pub struct Shell {
    pub upper: f64,
    pub width: f64,
    pub basepoint: HPoint,
    pub elements: Vec<OrbitElement>,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.elements.len() as f64
    }
}

/// All elements with displacement in `(upper - width, upper]`, against the
/// boundary guard on both edges so adjacent bands partition the orbit.
pub fn shell_band(
    gens: &GeneratorSet,
    upper: f64,
    width: f64,
    basepoint: HPoint,
    opts: &EnumOptions,
) -> Result<Shell> {
    if width <= 0.0 || upper <= 0.0 {
        return Err(Error::InvalidInput(
            "shell band needs positive upper bound and width".into(),
        ));
    }
    let ball = enumerate_by_displacement(gens, upper, basepoint, opts)?;
    let lo = upper - width;
    let elements: Vec<OrbitElement> = ball
        .elements
        .into_iter()
        .filter(|e| e.displacement > lo + BAND_GUARD && e.displacement <= upper + BAND_GUARD)
        .collect();
    if elements.is_empty() {
        return Err(Error::EmptyShell { lo, hi: upper });
    }
    Ok(Shell {
        upper,
        width,
        basepoint,
        elements,
    })
}

/// The shell with displacement in `(2n - kappa, 2n]`: every member has
/// operator norm at most `e^n` (up to the boundary guard).
pub fn build_shells(
    gens: &GeneratorSet,
    n: u32,
    kappa: f64,
    basepoint: HPoint,
    opts: &EnumOptions,
) -> Result<Shell> {
    shell_band(gens, 2.0 * n as f64, kappa, basepoint, opts)
}

#[derive(Debug, Clone)]
pub struct DeltaEstimate {
    /// Estimated critical exponent (regression slope).
    pub slope: f64,
    /// Orbit counts per radius.
    pub counts: Vec<(f64, u64)>,
    pub basepoint: HPoint,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Radii actually used by the regression (largest-R half of the grid).
    pub window: (f64, f64),
    /// Slope recomputed at a second basepoint, as a stability diagnostic.
    pub alt_slope: f64,
    pub alt_basepoint: HPoint,
}

impl DeltaEstimate {
    pub fn basepoint_discrepancy(&self) -> f64 {
        (self.slope - self.alt_slope).abs()
    }
}

#[derive(Debug, Clone)]
pub struct DeltaOptions {
    pub enum_opts: EnumOptions,
    /// Radius grid step.
    pub grid_step: f64,
    /// Minimum orbit points for the slope to mean anything.
    pub min_points: usize,
    /// Second basepoint for the stability diagnostic.
    pub alt_basepoint: HPoint,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions {
            enum_opts: EnumOptions::default(),
            grid_step: 1.0,
            min_points: 32,
            alt_basepoint: HPoint { x: 1.0, y: 2.0 },
        }
    }
}

/// Estimate the critical exponent by orbit counting: count elements with
/// displacement at most `R` over a grid of radii, then fit `ln count`
/// against `R` by least squares over the largest-R half of the grid (small
/// radii bias the asymptotic slope downward).
pub fn estimate_delta(
    gens: &GeneratorSet,
    r_max: f64,
    basepoint: HPoint,
    opts: &DeltaOptions,
) -> Result<DeltaEstimate> {
    let (slope, counts, residual, window) = delta_at_basepoint(gens, r_max, basepoint, opts)?;
    let alt = if opts.alt_basepoint == basepoint {
        HPoint { x: basepoint.x + 1.0, y: basepoint.y + 1.0 }
    } else {
        opts.alt_basepoint
    };
    let (alt_slope, _, _, _) = delta_at_basepoint(gens, r_max, alt, opts)?;
    Ok(DeltaEstimate {
        slope,
        counts,
        basepoint,
        residual,
        window,
        alt_slope,
        alt_basepoint: alt,
    })
}

fn delta_at_basepoint(
    gens: &GeneratorSet,
    r_max: f64,
    basepoint: HPoint,
    opts: &DeltaOptions,
) -> Result<(f64, Vec<(f64, u64)>, f64, (f64, f64))> {
    if r_max <= 0.0 || opts.grid_step <= 0.0 {
        return Err(Error::InvalidInput("r_max and grid step must be positive".into()));
    }
    let ball = enumerate_by_displacement(gens, r_max, basepoint, &opts.enum_opts)?;
    if ball.elements.len() < opts.min_points {
        return Err(Error::InsufficientGrowth {
            points: ball.elements.len(),
            required: opts.min_points,
        });
    }
    let mut radii = Vec::new();
    let mut r = opts.grid_step;
    while r <= r_max + 1e-12 {
        radii.push(r);
        r += opts.grid_step;
    }
    // elements are sorted by displacement
    let counts: Vec<(f64, u64)> = radii
        .iter()
        .map(|&r| {
            let c = ball
                .elements
                .partition_point(|e| e.displacement <= r + BAND_GUARD);
            (r, c as u64)
        })
        .collect();

    let start = counts.len() / 2;
    let pts: Vec<(f64, f64)> = counts[start..]
        .iter()
        .filter(|&&(_, c)| c > 0)
        .map(|&(r, c)| (r, (c as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientGrowth {
            points: pts.len(),
            required: 2,
        });
    }
    let (slope, intercept) = least_squares(&pts);
    let residual = (pts
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    let window = (pts[0].0, pts[pts.len() - 1].0);
    Ok((slope, counts, residual, window))
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_has_zero_displacement() {
        assert_eq!(displacement(&GroupElement::IDENTITY, HPoint::I), 0.0);
        let z = HPoint::new(0.3, 2.5).unwrap();
        assert!(displacement(&GroupElement::IDENTITY, z).abs() < 1e-15);
    }

    #[test]
    fn shear_displacement_matches_log_norm() {
        // Oracle: cosh d = (a^2+b^2+c^2+d^2)/2 with t = 3 for T.
        let d = displacement(&GroupElement::T, HPoint::I);
        assert!((d - (1.5f64).acosh()).abs() < 1e-12);
        assert!((d - GroupElement::T.log_norm_twice()).abs() < 1e-12);
        assert!((d - 0.9624).abs() < 1e-4);
    }

    #[test]
    fn displacement_equals_twice_log_norm_for_random_words() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let len = rng.gen_range(0..=20);
            let mut g = GroupElement::IDENTITY;
            for _ in 0..len {
                let l = [Letter::T, Letter::TInv, Letter::L, Letter::LInv, Letter::NegI]
                    [rng.gen_range(0..5)];
                g = g.mul(&l.matrix()).unwrap();
            }
            let diff = (displacement(&g, HPoint::I) - g.log_norm_twice()).abs();
            assert!(diff < 1e-9, "identity violated by {diff:e} at {g}");
        }
    }

    #[test]
    fn moebius_is_isometric() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let z = HPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0)).unwrap();
            let w = HPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0)).unwrap();
            let mut g = GroupElement::IDENTITY;
            for _ in 0..rng.gen_range(0..8) {
                let l = [Letter::T, Letter::TInv, Letter::L, Letter::LInv][rng.gen_range(0..4)];
                g = g.mul(&l.matrix()).unwrap();
            }
            let d0 = distance(z, w);
            let d1 = distance(moebius(&g, z), moebius(&g, w));
            assert!((d0 - d1).abs() < 1e-10, "isometry broken: {d0} vs {d1}");
        }
    }

    #[test]
    fn word_length_ball_of_shears() {
        let ball = enumerate_ball(
            &GeneratorSet::sl2z(),
            BallBound::WordLength(1),
            &EnumOptions::default(),
        )
        .unwrap();
        assert_eq!(ball.elements.len(), 5); // I, T, T^-1, L, L^-1
    }

    #[test]
    fn norm_cap_ball_of_parabolic_is_odd() {
        let gens = GeneratorSet::new(vec![GroupElement::T], false).unwrap();
        for r in [3.0, 10.0, 50.0] {
            let ball =
                enumerate_ball(&gens, BallBound::NormCap(r), &EnumOptions::default()).unwrap();
            assert!(ball.frontier_exhausted);
            assert_eq!(ball.elements.len() % 2, 1, "powers come in +-k pairs plus I");
            for e in &ball.elements {
                assert!(e.g.operator_norm() <= r + 1e-9);
                assert_eq!(e.g.a, 1);
                assert_eq!(e.g.c, 0);
            }
        }
    }

    #[test]
    fn norm_cap_ball_matches_entry_bounded_sweep() {
        // Oracle: exhaustive sweep over integer matrices with entries <= 10,
        // det 1 and ||g|| <= 10, each confirmed by word decomposition.
        let cap = 10.0;
        let mut expected = Vec::new();
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                for c in -10i64..=10 {
                    for d in -10i64..=10 {
                        if a * d - b * c != 1 {
                            continue;
                        }
                        let g = GroupElement { a, b, c, d };
                        if g.operator_norm() <= cap + 1e-12 {
                            assert_eq!(g.decompose().product().unwrap(), g);
                            expected.push(g);
                        }
                    }
                }
            }
        }
        expected.sort();
        let ball = enumerate_ball(
            &GeneratorSet::sl2z(),
            BallBound::NormCap(cap),
            &EnumOptions::default(),
        )
        .unwrap();
        let mut got: Vec<GroupElement> = ball.elements.iter().map(|e| e.g).collect();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let run = || {
            let mut opts = EnumOptions::default();
            opts.record_words = true;
            let ball =
                enumerate_ball(&GeneratorSet::sl2z(), BallBound::NormCap(6.0), &opts).unwrap();
            ball.elements
                .iter()
                .map(|e| (e.g, e.word.clone().unwrap().to_string()))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn shells_of_parabolic_group() {
        let gens = GeneratorSet::new(vec![GroupElement::T], false).unwrap();
        for n in [2u32, 4] {
            let shell = build_shells(&gens, n, 2.0, HPoint::I, &EnumOptions::default()).unwrap();
            assert!(!shell.is_empty());
            for e in &shell.elements {
                let d = 2.0 * e.g.operator_norm().ln();
                assert!(d > 2.0 * n as f64 - 2.0 && d <= 2.0 * n as f64 + 1e-9);
                assert_eq!(e.g.a, 1); // powers of T
            }
        }
    }

    #[test]
    fn shell_norm_cap() {
        let shell =
            build_shells(&GeneratorSet::sl2z(), 3, 2.0, HPoint::I, &EnumOptions::default())
                .unwrap();
        assert!(!shell.is_empty());
        let e_n = (3.0f64).exp();
        for e in &shell.elements {
            assert!(e.g.operator_norm() <= e_n * (1.0 + 1e-9));
        }
    }

    #[test]
    fn empty_shell_reported() {
        // A hyperbolic cyclic group has displacement gaps wider than 0.1.
        let gens = GeneratorSet::new(vec![GroupElement::new(2, 1, 1, 1).unwrap()], true).unwrap();
        let err = shell_band(&gens, 1.0, 0.1, HPoint::I, &EnumOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyShell { .. }));
    }

    #[test]
    fn enumeration_budget_guard() {
        let mut opts = EnumOptions::default();
        opts.max_elements = 10;
        let err = enumerate_by_displacement(&GeneratorSet::sl2z(), 6.0, HPoint::I, &opts)
            .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }

    #[test]
    fn delta_needs_enough_orbit_points() {
        let gens = GeneratorSet::new(vec![GroupElement::new(2, 1, 1, 1).unwrap()], true).unwrap();
        let err = estimate_delta(&gens, 1.0, HPoint::I, &DeltaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientGrowth { .. }));
    }

    #[test]
    fn delta_of_cyclic_hyperbolic_group_is_small() {
        let gens = GeneratorSet::new(vec![GroupElement::new(2, 1, 1, 1).unwrap()], true).unwrap();
        let est = estimate_delta(&gens, 80.0, HPoint::I, &DeltaOptions::default()).unwrap();
        assert!(est.slope <= 0.05, "cyclic slope {}", est.slope);
    }

    #[test]
    fn delta_of_modular_group_is_one() {
        let est =
            estimate_delta(&GeneratorSet::sl2z(), 12.0, HPoint::I, &DeltaOptions::default())
                .unwrap();
        assert!(est.slope >= 0.90 && est.slope <= 1.05, "slope {}", est.slope);
        assert!(est.basepoint_discrepancy() <= 0.05, "basepoint discrepancy {}", est.basepoint_discrepancy());
    }

    #[test]
    fn shell_growth_rate_approaches_delta() {
        // ln|S_2n| / 2n drifting toward the orbit-growth slope. The counting
        // constant is about 6, so the rates approach the slope from above.
        let gens = GeneratorSet::sl2z();
        let opts = EnumOptions::default();
        let est = estimate_delta(&gens, 12.0, HPoint::I, &DeltaOptions::default()).unwrap();
        let mut gaps = Vec::new();
        for n in 3..=6u32 {
            let shell = build_shells(&gens, n, 2.0, HPoint::I, &opts).unwrap();
            let rate = (shell.len() as f64).ln() / (2.0 * n as f64);
            gaps.push((rate - est.slope).abs());
        }
        for w in gaps.windows(2) {
            assert!(w[1] <= w[0] + 0.02, "gap to slope not shrinking: {gaps:?}");
        }
        assert!(*gaps.last().unwrap() < 0.15, "final gap {gaps:?}");
    }
}
