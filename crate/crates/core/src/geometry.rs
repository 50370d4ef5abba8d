//! Exact piecewise-linear geometry over rational coordinates.
//!
//! Paths are finite breakpoint lists in `Q^d` with consecutive breakpoints
//! distinct; a single breakpoint is the trivial path at that point.  Positions
//! along a path are `(segment, fraction)` pairs with exact rational fractions,
//! so every operation here is decidable and reproducible bit for bit.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groupoid::Sign;

pub type Rat = BigRational;

/// Builds a rational from an integer pair; `den` must be nonzero.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub coords: Vec<Rat>,
}

impl Point {
    pub fn new(coords: Vec<Rat>) -> Self {
        Point { coords }
    }

    /// Integer-coordinate convenience constructor.
    pub fn from_ints(coords: &[i64]) -> Self {
        Point::new(coords.iter().map(|&c| rat(c, 1)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn sub(&self, other: &Point) -> Vec<Rat> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// Position on a path: fraction `f` of the way along segment `i`.
///
/// `(i, 1)` and `(i+1, 0)` name the same point; the canonical form prefers
/// `(i+1, 0)` except at the final endpoint.  The derived order is the
/// traversal order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathLocation {
    pub segment: usize,
    pub fraction: Rat,
}

impl PathLocation {
    pub fn new(segment: usize, fraction: Rat) -> Self {
        PathLocation { segment, fraction }
    }

    /// Segment-count-free linear coordinate `segment + fraction`, enough for
    /// order comparisons within one path.
    pub fn linear(&self) -> Rat {
        Rat::from_integer(BigInt::from(self.segment)) + &self.fraction
    }
}

/// Piecewise-linear path: breakpoints with consecutive entries distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlPath {
    points: Vec<Point>,
}

impl PlPath {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPath);
        }
        let dim = points[0].dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        for (i, pair) in points.windows(2).enumerate() {
            if pair[0] == pair[1] {
                return Err(Error::DegenerateSegment { index: i });
            }
        }
        Ok(PlPath { points })
    }

    /// Trivial path sitting at one point.
    pub fn trivial(at: Point) -> Self {
        PlPath { points: vec![at] }
    }

    /// Integer-coordinate convenience constructor for short paths.
    pub fn from_ints(points: &[&[i64]]) -> Result<Self> {
        PlPath::new(points.iter().map(|c| Point::from_ints(c)).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_trivial(&self) -> bool {
        self.points.len() == 1
    }

    pub fn start(&self) -> &Point {
        &self.points[0]
    }

    pub fn end(&self) -> &Point {
        &self.points[self.points.len() - 1]
    }

    /// Direction vector of segment `i` (not normalized).
    pub fn segment_direction(&self, i: usize) -> Vec<Rat> {
        self.points[i + 1].sub(&self.points[i])
    }

    fn check_location(&self, loc: &PathLocation) -> Result<()> {
        if loc.fraction.is_negative() || loc.fraction > Rat::one() {
            return Err(Error::FractionOutOfRange);
        }
        if self.is_trivial() {
            if loc.segment == 0 && loc.fraction.is_zero() {
                return Ok(());
            }
            return Err(Error::LocationOutOfRange {
                segment: loc.segment,
                segments: 0,
            });
        }
        if loc.segment >= self.segment_count() {
            return Err(Error::LocationOutOfRange {
                segment: loc.segment,
                segments: self.segment_count(),
            });
        }
        Ok(())
    }

    /// Rewrites `(i, 1)` as `(i+1, 0)` except at the final endpoint.
    pub fn canonicalize(&self, loc: PathLocation) -> PathLocation {
        if !self.is_trivial() && loc.fraction.is_one() && loc.segment + 1 < self.segment_count() {
            PathLocation::new(loc.segment + 1, Rat::zero())
        } else {
            loc
        }
    }

    pub fn start_location(&self) -> PathLocation {
        PathLocation::new(0, Rat::zero())
    }

    pub fn end_location(&self) -> PathLocation {
        if self.is_trivial() {
            PathLocation::new(0, Rat::zero())
        } else {
            PathLocation::new(self.segment_count() - 1, Rat::one())
        }
    }

    /// Uniform global parameter in `[0, 1]` of a location.
    pub fn global(&self, loc: &PathLocation) -> Rat {
        if self.is_trivial() {
            return Rat::zero();
        }
        loc.linear() / Rat::from_integer(BigInt::from(self.segment_count()))
    }

    /// Location at a uniform global parameter in `[0, 1]`.
    pub fn location_at_global(&self, t: &Rat) -> PathLocation {
        if self.is_trivial() {
            return PathLocation::new(0, Rat::zero());
        }
        let scaled = t * Rat::from_integer(BigInt::from(self.segment_count()));
        let seg = scaled.floor().to_integer();
        let nseg = BigInt::from(self.segment_count());
        let (seg, frac) = if seg >= nseg {
            (self.segment_count() - 1, Rat::one())
        } else {
            let seg_usize: usize = seg
                .try_into()
                .expect("global parameter within [0, 1] yields a small segment index");
            let frac = &scaled - Rat::from_integer(BigInt::from(seg_usize));
            (seg_usize, frac)
        };
        self.canonicalize(PathLocation::new(seg, frac))
    }

    /// Direction of travel leaving `loc`; absent at the final endpoint.
    pub fn forward_direction(&self, loc: &PathLocation) -> Option<Vec<Rat>> {
        if self.is_trivial() || *loc == self.end_location() {
            return None;
        }
        let loc = self.canonicalize(loc.clone());
        Some(self.segment_direction(loc.segment))
    }

    /// Direction of travel arriving at `loc`; absent at the start.
    pub fn incoming_direction(&self, loc: &PathLocation) -> Option<Vec<Rat>> {
        if self.is_trivial() || *loc == self.start_location() {
            return None;
        }
        let loc = self.canonicalize(loc.clone());
        if loc.fraction.is_zero() {
            Some(self.segment_direction(loc.segment - 1))
        } else {
            Some(self.segment_direction(loc.segment))
        }
    }
}

/// Point reached at a location.
pub fn point_at(path: &PlPath, loc: &PathLocation) -> Result<Point> {
    path.check_location(loc)?;
    if path.is_trivial() {
        return Ok(path.points[0].clone());
    }
    let a = &path.points[loc.segment];
    let b = &path.points[loc.segment + 1];
    let coords = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(pa, pb)| pa + &loc.fraction * (pb - pa))
        .collect();
    Ok(Point::new(coords))
}

/// All passages of the path through `x`, in traversal order, with the
/// segment-junction duplicate `(i, 1) ~ (i+1, 0)` coalesced.
pub fn locate(path: &PlPath, x: &Point) -> Result<Vec<PathLocation>> {
    if x.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: path.dim(),
            got: x.dim(),
        });
    }
    if path.is_trivial() {
        return Ok(if path.points[0] == *x {
            vec![PathLocation::new(0, Rat::zero())]
        } else {
            Vec::new()
        });
    }
    let mut hits = Vec::new();
    for i in 0..path.segment_count() {
        let a = &path.points[i];
        let u = path.segment_direction(i);
        // Solve a + t*u = x on the first coordinate where u is nonzero, then
        // verify the rest; the segment is nondegenerate so some coordinate works.
        let c = u.iter().position(|uc| !uc.is_zero()).expect("nondegenerate");
        let t = (&x.coords[c] - &a.coords[c]) / &u[c];
        if t.is_negative() || t > Rat::one() {
            continue;
        }
        let on_segment = (0..path.dim()).all(|k| &a.coords[k] + &t * &u[k] == x.coords[k]);
        if on_segment {
            hits.push(path.canonicalize(PathLocation::new(i, t)));
        }
    }
    hits.dedup();
    Ok(hits)
}

/// Subpath between two locations with `a <= b`, as a fresh path.
pub fn subpath(path: &PlPath, a: &PathLocation, b: &PathLocation) -> Result<PlPath> {
    path.check_location(a)?;
    path.check_location(b)?;
    let a = path.canonicalize(a.clone());
    let b = path.canonicalize(b.clone());
    if a.linear() > b.linear() {
        return Err(Error::ReversedLocations);
    }
    let pa = point_at(path, &a)?;
    if a == b {
        return Ok(PlPath::trivial(pa));
    }
    let pb = point_at(path, &b)?;
    let ga = a.linear();
    let gb = b.linear();
    let mut pts = vec![pa];
    for k in (a.segment + 1)..path.points.len() {
        let gk = Rat::from_integer(BigInt::from(k));
        if gk > ga && gk < gb {
            pts.push(path.points[k].clone());
        }
    }
    pts.push(pb);
    pts.dedup();
    PlPath::new(pts)
}

/// Smallest integer vector with the same direction and orientation, used as
/// the canonical representative of a direction up to positive scaling.
pub fn primitive_direction(v: &[Rat]) -> Vec<BigInt> {
    let mut denom_lcm = BigInt::one();
    for c in v {
        denom_lcm = num::integer::lcm(denom_lcm, c.denom().clone());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Rat::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = num::integer::gcd(g, c.clone());
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

fn parallel(u: &[Rat], v: &[Rat]) -> bool {
    let d = u.len();
    for r in 0..d {
        for s in (r + 1)..d {
            if &u[r] * &v[s] != &u[s] * &v[r] {
                return false;
            }
        }
    }
    true
}

fn dot(u: &[Rat], v: &[Rat]) -> Rat {
    u.iter().zip(v).map(|(a, b)| a * b).fold(Rat::zero(), |acc, x| acc + x)
}

/// Shared points of a closed segment pair: empty, one touching point, or the
/// two endpoints of a collinear overlap interval.
fn segment_common_points(a0: &Point, a1: &Point, b0: &Point, b1: &Point) -> Vec<Point> {
    let u = a1.sub(a0);
    let v = b1.sub(b0);
    if parallel(&u, &v) {
        if !parallel(&u, &b0.sub(a0)) {
            return Vec::new();
        }
        // Same line: compare parameter intervals along `u`.
        let uu = dot(&u, &u);
        let t0 = dot(&b0.sub(a0), &u) / &uu;
        let t1 = dot(&b1.sub(a0), &u) / &uu;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let lo = lo.max(Rat::zero());
        let hi = hi.min(Rat::one());
        if lo > hi {
            Vec::new()
        } else if lo == hi {
            vec![point_on_segment(a0, &u, &lo)]
        } else {
            vec![
                point_on_segment(a0, &u, &lo),
                point_on_segment(a0, &u, &hi),
            ]
        }
    } else {
        // Distinct lines: at most one common point.
        let d = u.len();
        let mut pivot = None;
        'outer: for r in 0..d {
            for s in (r + 1)..d {
                if &u[r] * &v[s] != &u[s] * &v[r] {
                    pivot = Some((r, s));
                    break 'outer;
                }
            }
        }
        let (r, s) = pivot.expect("non-parallel pair has a nonzero minor");
        let det = &v[r] * &u[s] - &u[r] * &v[s];
        let dr = &b0.coords[r] - &a0.coords[r];
        let ds = &b0.coords[s] - &a0.coords[s];
        let t = (&v[r] * &ds - &v[s] * &dr) / &det;
        let w = (&u[r] * &ds - &u[s] * &dr) / &det;
        if t.is_negative() || t > Rat::one() || w.is_negative() || w > Rat::one() {
            return Vec::new();
        }
        let consistent =
            (0..d).all(|k| &a0.coords[k] + &t * &u[k] == &b0.coords[k] + &w * &v[k]);
        if !consistent {
            return Vec::new();
        }
        vec![point_on_segment(a0, &u, &t)]
    }
}

/// Does the closed segment pair share any point besides `allowed`?
fn segments_share_beyond(
    a0: &Point,
    a1: &Point,
    b0: &Point,
    b1: &Point,
    allowed: Option<&Point>,
) -> bool {
    segment_common_points(a0, a1, b0, b1)
        .iter()
        .any(|p| allowed != Some(p))
}

fn point_on_segment(a0: &Point, u: &[Rat], t: &Rat) -> Point {
    Point::new(
        a0.coords
            .iter()
            .zip(u)
            .map(|(c, uc)| c + t * uc)
            .collect(),
    )
}

/// True iff two distinct parameter locations map to the same point, junction
/// duplicates excluded.  Closed paths count as self-intersecting.
pub fn is_self_intersecting(path: &PlPath) -> bool {
    let n = path.segment_count();
    for i in 0..n {
        for j in (i + 1)..n {
            let allowed = if j == i + 1 {
                Some(&path.points[j])
            } else {
                None
            };
            if segments_share_beyond(
                &path.points[i],
                &path.points[i + 1],
                &path.points[j],
                &path.points[j + 1],
                allowed,
            ) {
                return true;
            }
        }
    }
    false
}

/// Points the path passes through more than once, junction duplicates
/// excluded.  A closed path reports its base point.  Collinear double passes
/// contribute the endpoints of the repeated interval.
pub fn self_intersection_points(path: &PlPath) -> Vec<Point> {
    let n = path.segment_count();
    let mut found = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for p in segment_common_points(
                &path.points[i],
                &path.points[i + 1],
                &path.points[j],
                &path.points[j + 1],
            ) {
                if j == i + 1 && p == path.points[j] {
                    continue;
                }
                found.push(p);
            }
        }
    }
    found.sort();
    found.dedup();
    found
}

/// Maximal common sub-segment of two path images: the interval it occupies on
/// each path and the relative orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapPiece {
    pub on_a: (PathLocation, PathLocation),
    pub on_b: (PathLocation, PathLocation),
    pub sign: Sign,
}

/// Maximal positive-length common sub-segments of two non-self-intersecting
/// path images, reported in traversal order along `a`.  Intervals on `b` are
/// stored in `b`'s own increasing order; `sign` records whether `b` runs with
/// or against `a` on the piece.
pub fn image_overlap(a: &PlPath, b: &PlPath) -> Result<Vec<OverlapPiece>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if is_self_intersecting(a) {
        return Err(Error::SelfIntersecting { index: 0 });
    }
    if is_self_intersecting(b) {
        return Err(Error::SelfIntersecting { index: 1 });
    }
    let mut pieces: Vec<OverlapPiece> = Vec::new();
    for i in 0..a.segment_count() {
        let u = a.segment_direction(i);
        let a0 = &a.points()[i];
        let uu = dot(&u, &u);
        for j in 0..b.segment_count() {
            let v = b.segment_direction(j);
            let b0 = &b.points()[j];
            if !parallel(&u, &v) || !parallel(&u, &b0.sub(a0)) {
                continue;
            }
            // Collinear segments: intersect parameter intervals along `a`.
            let t0 = dot(&b0.sub(a0), &u) / &uu;
            let t1 = dot(&b.points()[j + 1].sub(a0), &u) / &uu;
            let sign = if t0 <= t1 { Sign::Plus } else { Sign::Minus };
            let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            let lo = lo.max(Rat::zero());
            let hi = hi.min(Rat::one());
            if lo >= hi {
                continue;
            }
            // Corresponding parameters along `b`'s segment.
            let vv = dot(&v, &v);
            let s_of = |t: &Rat| -> Rat {
                let p = point_on_segment(a0, &u, t);
                dot(&p.sub(b0), &v) / &vv
            };
            let (s_lo, s_hi) = match sign {
                Sign::Plus => (s_of(&lo), s_of(&hi)),
                Sign::Minus => (s_of(&hi), s_of(&lo)),
            };
            pieces.push(OverlapPiece {
                on_a: (
                    a.canonicalize(PathLocation::new(i, lo)),
                    a.canonicalize(PathLocation::new(i, hi)),
                ),
                on_b: (
                    b.canonicalize(PathLocation::new(j, s_lo)),
                    b.canonicalize(PathLocation::new(j, s_hi)),
                ),
                sign,
            });
        }
    }
    pieces.sort_by(|p, q| p.on_a.cmp(&q.on_a));
    // Merge pieces that continue each other across breakpoints of either path.
    let mut merged: Vec<OverlapPiece> = Vec::new();
    for piece in pieces {
        if let Some(last) = merged.last_mut() {
            if last.sign == piece.sign && last.on_a.1 == piece.on_a.0 {
                let continues = match piece.sign {
                    Sign::Plus => last.on_b.1 == piece.on_b.0,
                    Sign::Minus => last.on_b.0 == piece.on_b.1,
                };
                if continues {
                    last.on_a.1 = piece.on_a.1;
                    match piece.sign {
                        Sign::Plus => last.on_b.1 = piece.on_b.1,
                        Sign::Minus => last.on_b.0 = piece.on_b.0,
                    }
                    continue;
                }
            }
        }
        merged.push(piece);
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(points: &[&[i64]]) -> PlPath {
        PlPath::from_ints(points).unwrap()
    }

    #[test]
    fn point_at_interpolates() {
        let p = seg(&[&[0, 0], &[2, 0]]);
        let mid = point_at(&p, &PathLocation::new(0, rat(1, 2))).unwrap();
        assert_eq!(mid, Point::from_ints(&[1, 0]));
    }

    #[test]
    fn point_at_range_errors() {
        let p = seg(&[&[0, 0], &[2, 0]]);
        assert!(matches!(
            point_at(&p, &PathLocation::new(1, rat(0, 1))),
            Err(Error::LocationOutOfRange { .. })
        ));
        assert!(matches!(
            point_at(&p, &PathLocation::new(0, rat(3, 2))),
            Err(Error::FractionOutOfRange)
        ));
    }

    #[test]
    fn locate_finds_midpoint_once() {
        let p = seg(&[&[0, 0], &[2, 0]]);
        let hits = locate(&p, &Point::from_ints(&[1, 0])).unwrap();
        assert_eq!(hits, vec![PathLocation::new(0, rat(1, 2))]);
    }

    #[test]
    fn locate_misses_off_path_point() {
        let p = seg(&[&[0, 0], &[2, 0]]);
        assert!(locate(&p, &Point::from_ints(&[1, 1])).unwrap().is_empty());
    }

    #[test]
    fn locate_coalesces_junction_and_keeps_final() {
        // Two passages through (1, 0): the junction between segments 0 and 1
        // (reported once, canonically) and the final endpoint.
        let p = seg(&[&[0, 0], &[1, 0], &[0, 0], &[1, 0]]);
        let hits = locate(&p, &Point::from_ints(&[1, 0])).unwrap();
        assert_eq!(
            hits,
            vec![
                PathLocation::new(1, rat(0, 1)),
                PathLocation::new(2, rat(1, 1)),
            ]
        );
    }

    #[test]
    fn subpath_within_one_segment() {
        let p = seg(&[&[0, 0], &[2, 0]]);
        let s = subpath(
            &p,
            &PathLocation::new(0, rat(0, 1)),
            &PathLocation::new(0, rat(1, 2)),
        )
        .unwrap();
        assert_eq!(s, seg(&[&[0, 0], &[1, 0]]));
    }

    #[test]
    fn subpath_across_breakpoint() {
        let p = seg(&[&[0, 0], &[2, 0], &[2, 2]]);
        let s = subpath(
            &p,
            &PathLocation::new(0, rat(1, 2)),
            &PathLocation::new(1, rat(1, 2)),
        )
        .unwrap();
        assert_eq!(s, seg(&[&[1, 0], &[2, 0], &[2, 1]]));
    }

    #[test]
    fn subpath_equal_endpoints_is_trivial() {
        let p = seg(&[&[0, 0], &[2, 0]]);
        let loc = PathLocation::new(0, rat(1, 2));
        let s = subpath(&p, &loc, &loc).unwrap();
        assert!(s.is_trivial());
        assert_eq!(s.start(), &Point::from_ints(&[1, 0]));
    }

    #[test]
    fn subpath_reversed_rejected() {
        let p = seg(&[&[0, 0], &[2, 0]]);
        assert!(matches!(
            subpath(
                &p,
                &PathLocation::new(0, rat(3, 4)),
                &PathLocation::new(0, rat(1, 4))
            ),
            Err(Error::ReversedLocations)
        ));
    }

    #[test]
    fn straight_segment_is_injective() {
        assert!(!is_self_intersecting(&seg(&[&[0, 0], &[2, 0]])));
    }

    #[test]
    fn retrace_is_self_intersecting() {
        assert!(is_self_intersecting(&seg(&[&[0, 0], &[1, 0], &[0, 0]])));
    }

    #[test]
    fn partial_retrace_is_self_intersecting() {
        assert!(is_self_intersecting(&seg(&[&[0, 0], &[2, 0], &[1, 0]])));
    }

    #[test]
    fn transverse_cross_is_self_intersecting() {
        assert!(is_self_intersecting(&seg(&[
            &[0, 0],
            &[2, 0],
            &[1, 1],
            &[1, -1]
        ])));
    }

    #[test]
    fn closed_loop_counts_as_self_intersecting() {
        assert!(is_self_intersecting(&seg(&[
            &[0, 0],
            &[1, 0],
            &[0, 1],
            &[0, 0]
        ])));
    }

    #[test]
    fn corner_path_is_clean() {
        assert!(!is_self_intersecting(&seg(&[&[0, 0], &[1, 0], &[1, 1]])));
    }

    #[test]
    fn intersection_points_of_simple_path_are_empty() {
        assert!(self_intersection_points(&seg(&[&[0, 0], &[1, 0], &[1, 1]])).is_empty());
    }

    #[test]
    fn intersection_points_of_transverse_cross() {
        let p = seg(&[&[0, 0], &[2, 0], &[1, 1], &[1, -1]]);
        assert_eq!(
            self_intersection_points(&p),
            vec![Point::from_ints(&[1, 0])]
        );
    }

    #[test]
    fn intersection_points_of_closed_loop_include_base() {
        let p = seg(&[&[0, 0], &[1, 0], &[0, 1], &[0, 0]]);
        assert_eq!(
            self_intersection_points(&p),
            vec![Point::from_ints(&[0, 0])]
        );
    }

    #[test]
    fn intersection_points_of_collinear_double_pass() {
        // Heads out to (3,0), loops up, and re-enters the axis covering [1,2].
        let p = seg(&[&[0, 0], &[3, 0], &[3, 1], &[1, 0], &[2, 0], &[2, -1]]);
        let pts = self_intersection_points(&p);
        assert!(pts.contains(&Point::from_ints(&[1, 0])));
        assert!(pts.contains(&Point::from_ints(&[2, 0])));
    }

    #[test]
    fn overlap_of_shifted_segments() {
        let a = seg(&[&[0, 0], &[2, 0]]);
        let b = seg(&[&[1, 0], &[3, 0]]);
        let pieces = image_overlap(&a, &b).unwrap();
        assert_eq!(
            pieces,
            vec![OverlapPiece {
                on_a: (PathLocation::new(0, rat(1, 2)), PathLocation::new(0, rat(1, 1))),
                on_b: (PathLocation::new(0, rat(0, 1)), PathLocation::new(0, rat(1, 2))),
                sign: Sign::Plus,
            }]
        );
    }

    #[test]
    fn overlap_disjoint_parallels_empty() {
        let a = seg(&[&[0, 0], &[1, 0]]);
        let b = seg(&[&[0, 1], &[1, 1]]);
        assert!(image_overlap(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn overlap_merges_across_breakpoints() {
        let a = seg(&[&[0, 0], &[2, 0]]);
        let b = seg(&[&[0, 0], &[1, 0], &[2, 0]]);
        let pieces = image_overlap(&a, &b).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].on_a.0, PathLocation::new(0, rat(0, 1)));
        assert_eq!(pieces[0].on_a.1, PathLocation::new(0, rat(1, 1)));
        assert_eq!(pieces[0].on_b.0, PathLocation::new(0, rat(0, 1)));
        assert_eq!(pieces[0].on_b.1, PathLocation::new(1, rat(1, 1)));
        assert_eq!(pieces[0].sign, Sign::Plus);
    }

    #[test]
    fn overlap_reversed_has_minus_sign() {
        let a = seg(&[&[0, 0], &[2, 0]]);
        let b = seg(&[&[3, 0], &[1, 0]]);
        let pieces = image_overlap(&a, &b).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].sign, Sign::Minus);
        assert_eq!(pieces[0].on_a.0, PathLocation::new(0, rat(1, 2)));
        assert_eq!(pieces[0].on_a.1, PathLocation::new(0, rat(1, 1)));
        assert_eq!(pieces[0].on_b.0, PathLocation::new(0, rat(1, 2)));
        assert_eq!(pieces[0].on_b.1, PathLocation::new(0, rat(1, 1)));
    }

    #[test]
    fn overlap_through_shared_corner() {
        let a = seg(&[&[0, 0], &[1, 0], &[1, 1]]);
        let b = seg(&[&[0, 0], &[1, 0], &[1, 1]]);
        let pieces = image_overlap(&a, &b).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].on_a.0, a.start_location());
        assert_eq!(pieces[0].on_a.1, a.end_location());
    }

    #[test]
    fn primitive_direction_canonicalizes() {
        assert_eq!(
            primitive_direction(&[rat(1, 2), rat(0, 1)]),
            vec![BigInt::from(1), BigInt::from(0)]
        );
        assert_eq!(
            primitive_direction(&[rat(-2, 3), rat(4, 3)]),
            vec![BigInt::from(-1), BigInt::from(2)]
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha20Rng;

        fn grid_coord(rng: &mut ChaCha20Rng) -> Rat {
            let den = [1i64, 2, 3, 4, 8][rng.gen_range(0..5)];
            rat(rng.gen_range(-3 * den..=3 * den), den)
        }

        /// Non-trivial path on the rational grid; `simple` additionally rules
        /// out self-intersections.
        fn grid_path(rng: &mut ChaCha20Rng, simple: bool) -> PlPath {
            loop {
                let n = rng.gen_range(2..=5);
                let mut pts: Vec<Point> = Vec::new();
                while pts.len() < n {
                    let p = Point::new(vec![grid_coord(rng), grid_coord(rng)]);
                    if pts.last() != Some(&p) {
                        pts.push(p);
                    }
                }
                let path = PlPath::new(pts).unwrap();
                if !path.is_trivial() && (!simple || !is_self_intersecting(&path)) {
                    return path;
                }
            }
        }

        fn half_grid_location(rng: &mut ChaCha20Rng, path: &PlPath) -> PathLocation {
            let s = path.segment_count() as i64;
            path.location_at_global(&rat(rng.gen_range(0..=2 * s), 2 * s))
        }

        fn reversal(path: &PlPath) -> PlPath {
            PlPath::new(path.points().iter().rev().cloned().collect()).unwrap()
        }

        fn scaled(path: &PlPath, lambda: &Rat) -> PlPath {
            let pts = path
                .points()
                .iter()
                .map(|p| Point::new(p.coords.iter().map(|c| c * lambda).collect()))
                .collect();
            PlPath::new(pts).unwrap()
        }

        fn sign_tag(s: Sign) -> u8 {
            match s {
                Sign::Plus => 0,
                Sign::Minus => 1,
            }
        }

        proptest! {
            #[test]
            fn subpath_endpoints_match_point_at(seed in any::<u64>()) {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let p = grid_path(&mut rng, false);
                let mut a = half_grid_location(&mut rng, &p);
                let mut b = half_grid_location(&mut rng, &p);
                if b < a {
                    std::mem::swap(&mut a, &mut b);
                }
                let s = subpath(&p, &a, &b).unwrap();
                prop_assert_eq!(s.start(), &point_at(&p, &a).unwrap());
                prop_assert_eq!(s.end(), &point_at(&p, &b).unwrap());
            }

            #[test]
            fn locate_is_strictly_sorted_and_exact(seed in any::<u64>()) {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let p = grid_path(&mut rng, false);
                let x = point_at(&p, &half_grid_location(&mut rng, &p)).unwrap();
                let locs = locate(&p, &x).unwrap();
                prop_assert!(!locs.is_empty());
                for w in locs.windows(2) {
                    prop_assert!(w[0] < w[1]);
                }
                for l in &locs {
                    prop_assert_eq!(point_at(&p, l).unwrap(), x.clone());
                }
            }

            #[test]
            fn overlap_is_symmetric_in_its_arguments(seed in any::<u64>()) {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let a = grid_path(&mut rng, true);
                let b = grid_path(&mut rng, true);
                let ab = image_overlap(&a, &b).unwrap();
                let ba = image_overlap(&b, &a).unwrap();
                let mut lhs: Vec<_> = ab
                    .iter()
                    .map(|o| (o.on_a.clone(), o.on_b.clone(), sign_tag(o.sign)))
                    .collect();
                let mut rhs: Vec<_> = ba
                    .iter()
                    .map(|o| (o.on_b.clone(), o.on_a.clone(), sign_tag(o.sign)))
                    .collect();
                lhs.sort();
                rhs.sort();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn reversing_one_argument_flips_overlap_signs(seed in any::<u64>()) {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let a = grid_path(&mut rng, true);
                let b = grid_path(&mut rng, true);
                let direct = image_overlap(&a, &b).unwrap();
                let flipped = image_overlap(&a, &reversal(&b)).unwrap();
                prop_assert_eq!(direct.len(), flipped.len());
                let mut lhs: Vec<_> = direct
                    .iter()
                    .map(|o| (o.on_a.clone(), sign_tag(o.sign)))
                    .collect();
                let mut rhs: Vec<_> = flipped
                    .iter()
                    .map(|o| (o.on_a.clone(), 1 - sign_tag(o.sign)))
                    .collect();
                lhs.sort();
                rhs.sort();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn rescaling_preserves_locations(seed in any::<u64>()) {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let p = grid_path(&mut rng, false);
                let x = point_at(&p, &half_grid_location(&mut rng, &p)).unwrap();
                let lambda = [rat(1, 2), rat(2, 1), rat(3, 4), rat(5, 1)]
                    [rng.gen_range(0..4)]
                    .clone();
                let q = scaled(&p, &lambda);
                let y = Point::new(x.coords.iter().map(|c| c * &lambda).collect());
                prop_assert_eq!(locate(&p, &x).unwrap(), locate(&q, &y).unwrap());
            }
        }
    }
}
