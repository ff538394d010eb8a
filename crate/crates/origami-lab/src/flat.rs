//! Flat geometry on an origami: exact straight-line tracing, saddle
//! connections and reducedness, short-range distance, and ball measure.
//!
//! Everything here runs on exact rationals. A trace walks a segment square
//! by square; crossings follow the gluings, and a landing on a corner is a
//! vertex event. Straight paths may pass through regular vertices (cone
//! angle exactly 2 pi) but stop at singular ones.
//!
//! Distances are only queried below cutoff 1/2. In that regime a geodesic
//! crosses at most one vertical and one horizontal edge, and it passes
//! through at most one cone point (holonomy is integral, so distinct cone
//! points are at least 1 apart). The minimum is therefore realized either
//! by a straight segment, validated here by tracing its development, or by
//! a concatenation of two straight legs bending at a cone point.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::affine::SurfacePoint;
use crate::error::{Error, Result};
use crate::origami::Origami;

pub type Rat = Rational64;

fn half() -> Rat {
    Rat::new(1, 2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TraceState {
    sq: usize,
    x: Rat,
    y: Rat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum TraceEvent {
    /// Crossed into the interior of an edge; state updated and normalized
    /// for continued motion.
    Crossing,
    /// Landed exactly on a corner of the current square.
    Vertex { corner: (u8, u8) },
}

/// Walks straight segments across the square structure. Directions are
/// rational and fixed per trace; positions stay exact.
struct Tracer<'a> {
    origami: &'a Origami,
    class_ids: Vec<usize>,
    class_sizes: Vec<usize>,
}

impl<'a> Tracer<'a> {
    fn new(origami: &'a Origami) -> Self {
        let (class_ids, class_sizes) = origami.corner_class_ids();
        Tracer {
            origami,
            class_ids,
            class_sizes,
        }
    }

    fn corner_class(&self, sq: usize, corner: (u8, u8)) -> usize {
        // corner order in origami::Corner: BL, BR, TL, TR
        let idx = match corner {
            (0, 0) => 0,
            (1, 0) => 1,
            (0, 1) => 2,
            (1, 1) => 3,
            _ => unreachable!(),
        };
        self.class_ids[4 * sq + idx]
    }

    fn is_singular_class(&self, class: usize) -> bool {
        self.class_sizes[class] > 4
    }

    fn singular_classes(&self) -> Vec<usize> {
        (0..self.class_sizes.len())
            .filter(|&c| self.is_singular_class(c))
            .collect()
    }

    /// A start state on the left or bottom edge moving out of the square is
    /// re-expressed across the gluing so stepping makes strict progress.
    fn normalize_start(&self, st: &mut TraceState, dir: (Rat, Rat)) {
        if st.x.is_zero() && dir.0.is_negative() {
            st.sq = self.origami.sigma().inverse().apply(st.sq);
            st.x = Rat::one();
        }
        if st.y.is_zero() && dir.1.is_negative() {
            st.sq = self.origami.tau().inverse().apply(st.sq);
            st.y = Rat::one();
        }
    }

    /// Advance to the next wall or corner. Returns the parameter step.
    fn step(&self, st: &mut TraceState, dir: (Rat, Rat)) -> (Rat, TraceEvent) {
        let (dx, dy) = dir;
        debug_assert!(!(dx.is_zero() && dy.is_zero()));
        debug_assert!(!(st.x == Rat::one() && !dx.is_negative()));
        debug_assert!(!(st.y == Rat::one() && !dy.is_negative()));
        let one = Rat::one();
        let t_x = if dx.is_positive() {
            Some((one - st.x) / dx)
        } else if dx.is_negative() {
            Some(st.x / -dx)
        } else {
            None
        };
        let t_y = if dy.is_positive() {
            Some((one - st.y) / dy)
        } else if dy.is_negative() {
            Some(st.y / -dy)
        } else {
            None
        };
        let t = match (t_x, t_y) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        debug_assert!(t.is_positive());
        let nx = st.x + t * dx;
        let ny = st.y + t * dy;
        let on_wall = |v: Rat| v.is_zero() || v == one;
        if on_wall(nx) && on_wall(ny) {
            st.x = nx;
            st.y = ny;
            let corner = (u8::from(nx == one), u8::from(ny == one));
            return (t, TraceEvent::Vertex { corner });
        }
        if nx == one {
            *st = TraceState {
                sq: self.origami.sigma().apply(st.sq),
                x: Rat::zero(),
                y: ny,
            };
        } else if nx.is_zero() && dx.is_negative() {
            *st = TraceState {
                sq: self.origami.sigma().inverse().apply(st.sq),
                x: one,
                y: ny,
            };
        } else if ny == one {
            *st = TraceState {
                sq: self.origami.tau().apply(st.sq),
                x: nx,
                y: Rat::zero(),
            };
        } else {
            debug_assert!(ny.is_zero() && dy.is_negative());
            *st = TraceState {
                sq: self.origami.tau().inverse().apply(st.sq),
                x: nx,
                y: one,
            };
        }
        (t, TraceEvent::Crossing)
    }

    /// Continue through a regular vertex the state currently sits on.
    fn continue_through_vertex(&self, st: &mut TraceState, dir: (Rat, Rat)) {
        let sigma = self.origami.sigma();
        let tau = self.origami.tau();
        let (dx, dy) = dir;
        let from_class = self.corner_class(
            st.sq,
            (u8::from(st.x == Rat::one()), u8::from(st.y == Rat::one())),
        );
        let (sq, x, y) = if dx.is_positive() && dy.is_positive() {
            (tau.apply(sigma.apply(st.sq)), 0i64, 0i64)
        } else if dx.is_positive() && dy.is_negative() {
            (sigma.apply(tau.inverse().apply(st.sq)), 0, 1)
        } else if dx.is_negative() && dy.is_positive() {
            (sigma.inverse().apply(tau.apply(st.sq)), 1, 0)
        } else if dx.is_negative() && dy.is_negative() {
            (tau.inverse().apply(sigma.inverse().apply(st.sq)), 1, 1)
        } else if dx.is_positive() {
            // riding the bottom edge rightward
            (sigma.apply(st.sq), 0, 0)
        } else if dx.is_negative() {
            (sigma.inverse().apply(st.sq), 1, 0)
        } else if dy.is_positive() {
            // riding the left edge upward
            (tau.apply(st.sq), 0, 0)
        } else {
            (tau.inverse().apply(st.sq), 0, 1)
        };
        let next = TraceState {
            sq,
            x: Rat::from_integer(x),
            y: Rat::from_integer(y),
        };
        debug_assert_eq!(
            self.corner_class(next.sq, (x as u8, y as u8)),
            from_class,
            "vertex continuation left the vertex class"
        );
        *st = next;
    }

    /// Whether `dir` points from the given corner into the square owning
    /// it, counting only the boundary rays the square owns (its bottom and
    /// left edges, under the half-open convention).
    fn admissible_from_corner(corner: (u8, u8), dir: (Rat, Rat)) -> bool {
        let (dx, dy) = dir;
        match corner {
            (0, 0) => !dx.is_negative() && !dy.is_negative(),
            (1, 0) => dx.is_negative() && !dy.is_negative(),
            (0, 1) => !dx.is_negative() && dy.is_negative(),
            (1, 1) => dx.is_negative() && dy.is_negative(),
            _ => unreachable!(),
        }
    }
}

/// Outcome of tracing one developed segment to its end.
#[derive(Debug, Clone, Copy, PartialEq)]
enum SegmentEnd {
    /// Reached parameter 1 at an ordinary point (half-open normalized).
    Point { sq: usize, x: Rat, y: Rat },
    /// Reached parameter 1 exactly on a vertex of the given class.
    Vertex { class: usize },
    /// Hit a singular vertex strictly before the end.
    BlockedBySingularity,
}

/// Trace the segment `start + t * dir`, `t` in `[0, 1]`, through the
/// surface. Regular vertices are passed through; singular ones block.
fn trace_segment(tracer: &Tracer<'_>, start: TraceState, dir: (Rat, Rat)) -> SegmentEnd {
    let one = Rat::one();
    if dir.0.is_zero() && dir.1.is_zero() {
        return SegmentEnd::Point {
            sq: start.sq,
            x: start.x,
            y: start.y,
        };
    }
    let mut st = start;
    tracer.normalize_start(&mut st, dir);
    let mut t_total = Rat::zero();
    loop {
        let prev = st;
        let (dt, event) = tracer.step(&mut st, dir);
        t_total += dt;
        if t_total > one {
            // parameter 1 lies strictly inside the square traversed during
            // this step; express it in that square's frame
            let tk = one - (t_total - dt);
            let x = prev.x + tk * dir.0;
            let y = prev.y + tk * dir.1;
            debug_assert!(x < one && y < one);
            return SegmentEnd::Point { sq: prev.sq, x, y };
        }
        match event {
            TraceEvent::Crossing => {
                if t_total == one {
                    // leftward/downward crossings leave the state at
                    // x == 1 / y == 1; endpoints obey the half-open
                    // convention, so push them across
                    let (mut sq, mut x, mut y) = (st.sq, st.x, st.y);
                    if x == one {
                        sq = tracer.origami.sigma().apply(sq);
                        x = Rat::zero();
                    }
                    if y == one {
                        sq = tracer.origami.tau().apply(sq);
                        y = Rat::zero();
                    }
                    return SegmentEnd::Point { sq, x, y };
                }
            }
            TraceEvent::Vertex { corner } => {
                let class = tracer.corner_class(st.sq, corner);
                if t_total == one {
                    return SegmentEnd::Vertex { class };
                }
                if tracer.is_singular_class(class) {
                    return SegmentEnd::BlockedBySingularity;
                }
                tracer.continue_through_vertex(&mut st, dir);
            }
        }
    }
}

/// Start configurations for tracing out of a point: a single state for an
/// ordinary point, or one state per corner of the vertex class when the
/// point sits on a vertex (each corner covers one angular sector).
fn start_configs(tracer: &Tracer<'_>, p: &SurfacePoint) -> Vec<(TraceState, (u8, u8), bool)> {
    if !p.is_vertex() {
        return vec![(
            TraceState {
                sq: p.square,
                x: p.s,
                y: p.t,
            },
            (0, 0),
            false,
        )];
    }
    let class = tracer.corner_class(p.square, (0, 0));
    let mut out = Vec::new();
    for sq in 0..tracer.origami.degree() {
        for corner in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)] {
            if tracer.corner_class(sq, corner) == class {
                out.push((
                    TraceState {
                        sq,
                        x: Rat::from_integer(corner.0 as i64),
                        y: Rat::from_integer(corner.1 as i64),
                    },
                    corner,
                    true,
                ));
            }
        }
    }
    out
}

/// Developed sheet candidates near a start square: `(square, offset)` pairs
/// reachable by at most `depth` edge crossings.
fn sheet_candidates(origami: &Origami, start_sq: usize, depth: usize) -> Vec<(usize, (i64, i64))> {
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![(start_sq, (0i64, 0i64))];
    seen.insert((start_sq, (0i64, 0i64)));
    for _ in 0..depth {
        let mut next = Vec::new();
        for &(sq, (ox, oy)) in &frontier {
            let steps = [
                (origami.sigma().apply(sq), (ox + 1, oy)),
                (origami.sigma().inverse().apply(sq), (ox - 1, oy)),
                (origami.tau().apply(sq), (ox, oy + 1)),
                (origami.tau().inverse().apply(sq), (ox, oy - 1)),
            ];
            for cand in steps {
                if seen.insert(cand) {
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Result of a short-range distance query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Finite {
        d: f64,
        /// Exact squared distance when the minimum is a straight segment.
        d2_exact: Option<Rat>,
    },
    /// Strictly exceeds the cutoff.
    Infinite,
}

impl Distance {
    pub fn value(&self) -> Option<f64> {
        match self {
            Distance::Finite { d, .. } => Some(*d),
            Distance::Infinite => None,
        }
    }
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Minimal squared length over straight segments from `p` to the developed
/// copies of `q` (both non-vertex points), at most `cutoff` long. Exact.
fn straight_distance_sq(
    tracer: &Tracer<'_>,
    p: &SurfacePoint,
    q: &SurfacePoint,
    cutoff: Rat,
) -> Option<Rat> {
    let cutoff_sq = cutoff * cutoff;
    let mut best: Option<Rat> = None;
    for (start, corner, from_vertex) in start_configs(tracer, p) {
        for (sq, (ox, oy)) in sheet_candidates(tracer.origami, start.sq, 3) {
            if sq != q.square {
                continue;
            }
            let dx = Rat::from_integer(ox) + q.s - start.x;
            let dy = Rat::from_integer(oy) + q.t - start.y;
            let d2 = dx * dx + dy * dy;
            if d2 > cutoff_sq {
                continue;
            }
            if let Some(b) = best {
                if d2 >= b {
                    continue;
                }
            }
            if d2.is_zero() {
                best = Some(d2);
                continue;
            }
            if from_vertex && !Tracer::admissible_from_corner(corner, (dx, dy)) {
                continue;
            }
            if let SegmentEnd::Point { sq: esq, x, y } = trace_segment(tracer, start, (dx, dy)) {
                if esq == q.square && x == q.s && y == q.t {
                    best = Some(d2);
                }
            }
        }
    }
    best
}

/// Minimal squared leg length from `p` to the vertex class `class`, over
/// straight segments of length at most `cutoff`. Exact.
fn vertex_leg_sq(tracer: &Tracer<'_>, p: &SurfacePoint, class: usize, cutoff: Rat) -> Option<Rat> {
    let cutoff_sq = cutoff * cutoff;
    let mut best: Option<Rat> = None;
    for (start, start_corner, from_vertex) in start_configs(tracer, p) {
        for (sq, (ox, oy)) in sheet_candidates(tracer.origami, start.sq, 3) {
            for corner in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)] {
                if tracer.corner_class(sq, corner) != class {
                    continue;
                }
                let dx = Rat::from_integer(ox + corner.0 as i64) - start.x;
                let dy = Rat::from_integer(oy + corner.1 as i64) - start.y;
                let d2 = dx * dx + dy * dy;
                if d2 > cutoff_sq || d2.is_zero() {
                    continue;
                }
                if let Some(b) = best {
                    if d2 >= b {
                        continue;
                    }
                }
                if from_vertex && !Tracer::admissible_from_corner(start_corner, (dx, dy)) {
                    continue;
                }
                if let SegmentEnd::Vertex { class: end_class } =
                    trace_segment(tracer, start, (dx, dy))
                {
                    if end_class == class {
                        best = Some(d2);
                    }
                }
            }
        }
    }
    best
}

/// Flat distance between two points, exact below the cutoff (which must not
/// exceed 1/2). Returns `Infinite` when every path is longer than the
/// cutoff.
pub fn distance(origami: &Origami, p: &SurfacePoint, q: &SurfacePoint, cutoff: Rat) -> Result<Distance> {
    if cutoff > half() {
        return Err(Error::CutoffTooLarge(rat_f64(cutoff)));
    }
    if !cutoff.is_positive() {
        return Err(Error::InvalidInput("cutoff must be positive".into()));
    }
    if p.square >= origami.degree() || q.square >= origami.degree() {
        return Err(Error::InvalidInput("square index out of range".into()));
    }
    let tracer = Tracer::new(origami);

    // Straight segments. Vertex endpoints are matched by class.
    let straight: Option<Rat> = if q.is_vertex() {
        let qc = tracer.corner_class(q.square, (0, 0));
        if p.is_vertex() && tracer.corner_class(p.square, (0, 0)) == qc {
            Some(Rat::zero())
        } else {
            vertex_leg_sq(&tracer, p, qc, cutoff)
        }
    } else if p.is_vertex() {
        vertex_leg_sq(&tracer, q, tracer.corner_class(p.square, (0, 0)), cutoff)
    } else {
        straight_distance_sq(&tracer, p, q, cutoff)
    };
    let mut best_f64 = straight.map(|d2| rat_f64(d2).sqrt());
    let mut best_exact = straight;

    // Paths bent at one cone point. Two distinct cone visits cannot both
    // fit under the cutoff.
    for class in tracer.singular_classes() {
        let (Some(a2), Some(b2)) = (
            vertex_leg_sq(&tracer, p, class, cutoff),
            vertex_leg_sq(&tracer, q, class, cutoff),
        ) else {
            continue;
        };
        let d = rat_f64(a2).sqrt() + rat_f64(b2).sqrt();
        if d <= rat_f64(cutoff) && best_f64.map_or(true, |b| d < b) {
            best_f64 = Some(d);
            best_exact = None;
        }
    }

    match best_f64 {
        Some(d) => Ok(Distance::Finite {
            d,
            d2_exact: best_exact,
        }),
        None => Ok(Distance::Infinite),
    }
}

/// Squared wrap distance on the unit torus; the hot path for experiments.
pub fn torus_distance_sq(p: &SurfacePoint, q: &SurfacePoint) -> Rat {
    let wrap = |d: Rat| {
        let d = d - d.floor();
        if d > half() {
            Rat::one() - d
        } else {
            d
        }
    };
    let dx = wrap(q.s - p.s);
    let dy = wrap(q.t - p.t);
    dx * dx + dy * dy
}

/// Conservative squared injectivity bound at `y`: a quarter of the squared
/// distance to the nearest singularity, capped at (1/2)^2. Below this bound
/// a metric ball is an embedded disk (or cone sector at a cone point).
pub fn injectivity_bound_sq(origami: &Origami, y: &SurfacePoint) -> Rat {
    let cap = half() * half();
    if y.is_vertex() {
        // vertices sit on the integer lattice of any development, so the
        // nearest other singular visit is at least 1 away
        return cap;
    }
    let tracer = Tracer::new(origami);
    let mut best = cap;
    for class in tracer.singular_classes() {
        if let Some(d2) = vertex_leg_sq(&tracer, y, class, half()) {
            let quarter = d2 / Rat::from_integer(4);
            if quarter < best {
                best = quarter;
            }
        }
    }
    best
}

/// Cone order at `y`: 1 at ordinary points, `k` at a cone point of angle
/// `2 pi k`.
pub fn cone_order_at(origami: &Origami, y: &SurfacePoint) -> usize {
    if !y.is_vertex() {
        return 1;
    }
    let (ids, sizes) = origami.corner_class_ids();
    sizes[ids[4 * y.square]] / 4
}

/// Normalized Lebesgue measure of the metric ball `B(y, r)`: `k pi r^2 / N`
/// with `k` the cone order at `y`. Requires `r` below the injectivity bound.
pub fn ball_measure(origami: &Origami, y: &SurfacePoint, r: Rat) -> Result<f64> {
    if r.is_negative() {
        return Err(Error::InvalidInput("negative radius".into()));
    }
    if r.is_zero() {
        return Ok(0.0);
    }
    let bound_sq = injectivity_bound_sq(origami, y);
    if r * r > bound_sq {
        return Err(Error::RadiusTooLarge {
            radius: rat_f64(r),
            bound: rat_f64(bound_sq).sqrt(),
        });
    }
    let k = cone_order_at(origami, y) as f64;
    let r = rat_f64(r);
    Ok(k * std::f64::consts::PI * r * r / origami.degree() as f64)
}

/// Shrinking-target radius rule: a power law in the operator norm, or a
/// step table `(norm threshold, radius)` read off the last threshold not
/// exceeding the norm.
#[derive(Debug, Clone)]
pub enum RadiusFn {
    PowerLaw { alpha: f64 },
    Table(Vec<(f64, f64)>),
}

impl RadiusFn {
    pub fn eval(&self, norm: f64) -> f64 {
        match self {
            RadiusFn::PowerLaw { alpha } => norm.powf(-alpha),
            RadiusFn::Table(rows) => {
                let mut r = rows.first().map_or(0.0, |&(_, r)| r);
                for &(threshold, radius) in rows {
                    if norm >= threshold {
                        r = radius;
                    }
                }
                r
            }
        }
    }
}

/// A shrinking-target family: center, radius rule, and the injectivity
/// bound that experiment radii are clipped to.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    pub center: SurfacePoint,
    pub radius: RadiusFn,
    pub injectivity_sq: Rat,
}

impl TargetSpec {
    pub fn new(origami: &Origami, center: SurfacePoint, radius: RadiusFn) -> Self {
        let injectivity_sq = injectivity_bound_sq(origami, &center);
        TargetSpec {
            center,
            radius,
            injectivity_sq,
        }
    }

    /// Radius at the given norm, clipped to the injectivity bound.
    pub fn clipped_radius(&self, norm: f64) -> f64 {
        self.radius
            .eval(norm)
            .min(rat_f64(self.injectivity_sq).sqrt())
    }
}

/// Verdict of the reducedness check: the sublattice of Z^2 generated by
/// the holonomy vectors found up to the length cap.
#[derive(Debug, Clone)]
pub struct Reducedness {
    pub reduced: bool,
    /// Reduced basis of the generated lattice (rank 2 case).
    pub basis: Option<[(i64, i64); 2]>,
    /// Index of the generated lattice in Z^2.
    pub index: u64,
    pub holonomy_count: usize,
}

/// Decide reducedness by enumerating holonomy vectors up to `length_cap`.
///
/// Surfaces with singularities use saddle connections (straight segments
/// between cone points); the check certifies `reduced` when the generated
/// lattice reaches Z^2 and reports `Inconclusive` otherwise. Surfaces
/// without singularities are flat tori; closed-curve holonomies generate
/// their period lattice, whose covolume equals the degree, so the check is
/// conclusive both ways once that covolume is reached.
pub fn reducedness(origami: &Origami, length_cap: f64) -> Result<Reducedness> {
    if length_cap <= 0.0 {
        return Err(Error::InvalidInput("length cap must be positive".into()));
    }
    let stratum = origami.stratum()?;
    let tracer = Tracer::new(origami);
    let mut lattice = Lattice2::new();
    let mut holonomy_count = 0usize;

    if stratum.cone_orders.is_empty() {
        // flat torus: closed-curve holonomies
        let n = origami.degree() as i64;
        'dirs: for (a, b) in primitive_directions(length_cap) {
            // a half-plane of directions is enough; -v spans the same line
            if a < 0 || (a == 0 && b < 0) {
                continue;
            }
            if let Some(k) = closed_curve_multiple(&tracer, (a, b)) {
                let v = (k * a, k * b);
                if ((v.0 * v.0 + v.1 * v.1) as f64) > length_cap * length_cap {
                    continue;
                }
                holonomy_count += 1;
                lattice.add(v);
                if lattice.index() == Some(n as u64) {
                    break 'dirs;
                }
            }
        }
        let index = lattice.index();
        if index == Some(n as u64) {
            return Ok(Reducedness {
                reduced: n == 1,
                basis: lattice.basis(),
                index: n as u64,
                holonomy_count,
            });
        }
        return Err(Error::Inconclusive {
            cap: length_cap,
            index: index.unwrap_or(0),
        });
    }

    // saddle connections out of every singular corner
    'outer: for sq in 0..origami.degree() {
        for corner in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)] {
            let class = tracer.corner_class(sq, corner);
            if !tracer.is_singular_class(class) {
                continue;
            }
            let start = TraceState {
                sq,
                x: Rat::from_integer(corner.0 as i64),
                y: Rat::from_integer(corner.1 as i64),
            };
            for (a, b) in primitive_directions(length_cap) {
                let dir = (Rat::from_integer(a), Rat::from_integer(b));
                if !Tracer::admissible_from_corner(corner, dir) {
                    continue;
                }
                if let Some(v) = saddle_holonomy(&tracer, start, (a, b), length_cap) {
                    holonomy_count += 1;
                    lattice.add(v);
                    if lattice.index() == Some(1) {
                        break 'outer;
                    }
                }
            }
        }
    }
    if lattice.index() == Some(1) {
        Ok(Reducedness {
            reduced: true,
            basis: lattice.basis(),
            index: 1,
            holonomy_count,
        })
    } else {
        Err(Error::Inconclusive {
            cap: length_cap,
            index: lattice.index().unwrap_or(0),
        })
    }
}

/// Primitive integer directions with length at most `cap`, all four sign
/// quadrants plus the axes.
fn primitive_directions(cap: f64) -> Vec<(i64, i64)> {
    let m = cap.floor() as i64;
    let cap_sq = (cap * cap).floor() as i64;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            if (a, b) == (0, 0) || a * a + b * b > cap_sq {
                continue;
            }
            if num_integer::gcd(a, b) == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Trace the straight-line flow from a cone point in direction `(a, b)`
/// until it reaches a cone point; returns the holonomy vector, or `None`
/// when the flow exceeds the cap or meets only regular vertices in range.
fn saddle_holonomy(
    tracer: &Tracer<'_>,
    start: TraceState,
    (a, b): (i64, i64),
    length_cap: f64,
) -> Option<(i64, i64)> {
    let dir = (Rat::from_integer(a), Rat::from_integer(b));
    let dir_len = ((a * a + b * b) as f64).sqrt();
    let t_cap = length_cap / dir_len;
    let mut st = start;
    let mut t_total = Rat::zero();
    loop {
        let (dt, event) = tracer.step(&mut st, dir);
        t_total += dt;
        if rat_f64(t_total) > t_cap + 1e-12 {
            return None;
        }
        if let TraceEvent::Vertex { corner } = event {
            let class = tracer.corner_class(st.sq, corner);
            if tracer.is_singular_class(class) {
                // vertices sit on the integer development lattice
                let hx = t_total * dir.0;
                let hy = t_total * dir.1;
                debug_assert!(hx.is_integer() && hy.is_integer());
                return Some((hx.to_integer(), hy.to_integer()));
            }
            tracer.continue_through_vertex(&mut st, dir);
        }
    }
}

/// First return multiple of the straight-line flow in primitive direction
/// `(a, b)` on a cone-free origami: the flow from a generic point closes
/// with holonomy `k (a, b)`, `k` at most the degree.
fn closed_curve_multiple(tracer: &Tracer<'_>, (a, b): (i64, i64)) -> Option<i64> {
    let dir = (Rat::from_integer(a), Rat::from_integer(b));
    let start = TraceState {
        sq: 0,
        x: half(),
        y: half(),
    };
    let mut st = start;
    let mut t_total = Rat::zero();
    let n = tracer.origami.degree() as i64;
    loop {
        let prev = st;
        let prev_t = t_total;
        let (dt, event) = tracer.step(&mut st, dir);
        t_total += dt;
        // integer parameters strictly inside (prev_t, t_total) were spent in
        // the square of `prev`; at integer k the local coordinates are back
        // to the start offset, so closure only needs the square to match
        let lo = prev_t.floor().to_integer() + 1;
        let hi = if t_total.is_integer() {
            t_total.to_integer() - 1
        } else {
            t_total.floor().to_integer()
        };
        for k in lo..=hi {
            if k >= 1 && prev.sq == start.sq {
                let dtk = Rat::from_integer(k) - prev_t;
                debug_assert_eq!(prev.x + dtk * dir.0 - (prev.x + dtk * dir.0).floor(), start.x);
                debug_assert_eq!(prev.y + dtk * dir.1 - (prev.y + dtk * dir.1).floor(), start.y);
                return Some(k);
            }
        }
        if t_total > Rat::from_integer(2 * n + 2) {
            return None;
        }
        if let TraceEvent::Vertex { corner } = event {
            let class = tracer.corner_class(st.sq, corner);
            debug_assert!(!tracer.is_singular_class(class));
            tracer.continue_through_vertex(&mut st, dir);
        }
    }
}

/// A sublattice of Z^2 maintained incrementally from generators, kept in
/// upper-triangular reduced form.
#[derive(Debug, Clone, Default)]
struct Lattice2 {
    rows: Vec<(i64, i64)>,
}

impl Lattice2 {
    fn new() -> Self {
        Lattice2::default()
    }

    fn add(&mut self, v: (i64, i64)) {
        if v == (0, 0) {
            return;
        }
        self.rows.push(v);
        self.reduce();
    }

    fn reduce(&mut self) {
        let mut first: Option<(i128, i128)> = None;
        let mut seconds: Vec<i128> = Vec::new();
        for &(a0, b0) in &self.rows {
            let (mut a, mut b) = (a0 as i128, b0 as i128);
            if let Some((mut pa, mut pb)) = first.take() {
                while a != 0 {
                    let q = pa.div_euclid(a);
                    let (na, nb) = (pa - q * a, pb - q * b);
                    pa = a;
                    pb = b;
                    a = na;
                    b = nb;
                }
                first = Some((pa, pb));
                seconds.push(b);
            } else if a != 0 {
                first = Some((a, b));
            } else {
                seconds.push(b);
            }
        }
        let mut out: Vec<(i64, i64)> = Vec::new();
        if let Some((mut a, mut b)) = first {
            if a < 0 {
                a = -a;
                b = -b;
            }
            out.push((a as i64, b as i64));
        }
        let g = seconds
            .iter()
            .fold(0i128, |acc, &b| num_integer::gcd(acc, b.abs()));
        if g != 0 {
            out.push((0, g as i64));
        }
        if out.len() == 2 {
            let m = out[1].1;
            out[0].1 = out[0].1.rem_euclid(m);
        }
        self.rows = out;
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Index in Z^2 (only defined at full rank).
    fn index(&self) -> Option<u64> {
        if self.rank() == 2 && self.rows[0].0 != 0 {
            Some(self.rows[0].0.unsigned_abs() * self.rows[1].1.unsigned_abs())
        } else {
            None
        }
    }

    fn basis(&self) -> Option<[(i64, i64); 2]> {
        (self.rank() == 2).then(|| [self.rows[0], self.rows[1]])
    }
}
