//! Germ relations between paths and the independence test.
//!
//! Two nontrivial paths are related "same initial segment" when they leave
//! their common start point along the same ray; the other three relations
//! come from inverting one or both arguments.  A path is independent of a
//! finite family when at some parameter its outgoing or incoming germ is
//! matched by no ray of the family at that point; the witness is a free
//! point.  For piecewise-linear paths the matching structure is a finite
//! union of closed intervals, so scanning interval endpoints, breakpoints,
//! and interval midpoints decides independence exactly.

use num::BigInt;

use crate::error::{Error, Result};
use crate::geometry::{
    image_overlap, is_self_intersecting, locate, primitive_direction, PathLocation, Point, Rat,
};
use crate::groupoid::{invert, ReducedPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GermSide {
    Outgoing,
    Incoming,
}

/// Direction germ of a path passage through a point: the anchor location on
/// the path, which side of the passage, and the canonical primitive
/// direction of travel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    pub location: PathLocation,
    pub side: GermSide,
    pub direction: Vec<BigInt>,
}

/// Side of a free point: which clause of the independence test it witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeSide {
    Outgoing,
    Incoming,
}

/// Witness of independence: a location on the path together with the side
/// whose germ is matched by nothing in the comparison family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreePoint {
    pub location: PathLocation,
    pub side: FreeSide,
}

fn require_nontrivial(p: &ReducedPath) -> Result<()> {
    if p.is_trivial() {
        Err(Error::TrivialPath)
    } else {
        Ok(())
    }
}

/// Do `a` and `b` start at the same point along the same ray?
pub fn same_initial_segment(a: &ReducedPath, b: &ReducedPath) -> Result<bool> {
    require_nontrivial(a)?;
    require_nontrivial(b)?;
    if a.start() != b.start() {
        return Ok(false);
    }
    let da = primitive_direction(&a.carrier().segment_direction(0));
    let db = primitive_direction(&b.carrier().segment_direction(0));
    Ok(da == db)
}

/// `a` ends the way `b` ends: final segments coincide near the shared end.
pub fn same_final_segment(a: &ReducedPath, b: &ReducedPath) -> Result<bool> {
    same_initial_segment(&invert(a), &invert(b))
}

/// Initial segment of `a` against the reversed final segment of `b`.
pub fn initial_meets_final(a: &ReducedPath, b: &ReducedPath) -> Result<bool> {
    same_initial_segment(a, &invert(b))
}

/// Final segment of `a` against the reversed initial segment of `b`.
pub fn final_meets_initial(a: &ReducedPath, b: &ReducedPath) -> Result<bool> {
    same_initial_segment(&invert(a), b)
}

/// All germs of `d` at `x`: one outgoing and/or one incoming germ per
/// passage.  Directions are directions of travel.
pub fn germs_at(d: &ReducedPath, x: &Point) -> Result<Vec<Germ>> {
    let mut germs = Vec::new();
    for loc in locate(d.carrier(), x)? {
        if let Some(dir) = d.carrier().incoming_direction(&loc) {
            germs.push(Germ {
                location: loc.clone(),
                side: GermSide::Incoming,
                direction: primitive_direction(&dir),
            });
        }
        if let Some(dir) = d.carrier().forward_direction(&loc) {
            germs.push(Germ {
                location: loc,
                side: GermSide::Outgoing,
                direction: primitive_direction(&dir),
            });
        }
    }
    Ok(germs)
}

/// Rays of `d`'s image at `x`: primitive directions pointing away from `x`
/// along the image.  An outgoing germ contributes its direction, an incoming
/// germ its negation.
fn rays_at(d: &ReducedPath, x: &Point) -> Result<Vec<Vec<BigInt>>> {
    Ok(germs_at(d, x)?
        .into_iter()
        .map(|g| match g.side {
            GermSide::Outgoing => g.direction,
            GermSide::Incoming => g.direction.into_iter().map(|c| -c).collect(),
        })
        .collect())
}

fn check_family(g: &ReducedPath, family: &[&ReducedPath]) -> Result<()> {
    require_nontrivial(g)?;
    if is_self_intersecting(g.carrier()) {
        return Err(Error::SelfIntersecting { index: 0 });
    }
    for (i, d) in family.iter().enumerate() {
        require_nontrivial(d)?;
        if is_self_intersecting(d.carrier()) {
            return Err(Error::SelfIntersecting { index: i + 1 });
        }
    }
    Ok(())
}

/// Candidate locations on `g` at which the matching pattern can change:
/// overlap-interval endpoints against every family member, breakpoints of
/// `g`, and midpoints of the partition they induce.
fn candidate_locations(g: &ReducedPath, family: &[&ReducedPath]) -> Result<Vec<PathLocation>> {
    let path = g.carrier();
    let mut linear: Vec<Rat> = Vec::new();
    for k in 0..=path.segment_count() {
        linear.push(Rat::from_integer(BigInt::from(k)));
    }
    for d in family {
        for piece in image_overlap(path, d.carrier())? {
            linear.push(piece.on_a.0.linear());
            linear.push(piece.on_a.1.linear());
        }
    }
    linear.sort();
    linear.dedup();
    let mut with_midpoints = Vec::new();
    for pair in linear.windows(2) {
        with_midpoints.push(pair[0].clone());
        with_midpoints.push((&pair[0] + &pair[1]) / Rat::from_integer(BigInt::from(2)));
    }
    with_midpoints.push(linear.last().expect("at least the endpoints").clone());
    Ok(with_midpoints
        .into_iter()
        .map(|l| {
            let seg = l.floor().to_integer();
            let nseg = BigInt::from(path.segment_count());
            if seg >= nseg {
                path.end_location()
            } else {
                let s: usize = seg.try_into().expect("segment index fits");
                path.canonicalize(PathLocation::new(s, &l - Rat::from_integer(BigInt::from(s))))
            }
        })
        .collect())
}

fn ray_unmatched(ray: &[BigInt], point: &Point, family: &[&ReducedPath]) -> Result<bool> {
    for d in family {
        for r in rays_at(d, point)? {
            if r == ray {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Searches for a free point of `g` against the family.  Scans candidates in
/// traversal order, outgoing side first, so the returned witness is
/// deterministic.  All paths must be nontrivial and non-self-intersecting.
pub fn is_independent(g: &ReducedPath, family: &[&ReducedPath]) -> Result<Option<FreePoint>> {
    check_family(g, family)?;
    let path = g.carrier();
    let start = path.start_location();
    let end = path.end_location();
    for loc in candidate_locations(g, family)? {
        let point = crate::geometry::point_at(path, &loc)?;
        if loc != end {
            let ray = primitive_direction(
                &path
                    .forward_direction(&loc)
                    .expect("interior or start location has a forward direction"),
            );
            if ray_unmatched(&ray, &point, family)? {
                return Ok(Some(FreePoint {
                    location: loc,
                    side: FreeSide::Outgoing,
                }));
            }
        }
        if loc != start {
            let back: Vec<BigInt> = primitive_direction(
                &path
                    .incoming_direction(&loc)
                    .expect("interior or end location has an incoming direction"),
            )
            .into_iter()
            .map(|c| -c)
            .collect();
            if ray_unmatched(&back, &point, family)? {
                return Ok(Some(FreePoint {
                    location: loc,
                    side: FreeSide::Incoming,
                }));
            }
        }
    }
    Ok(None)
}

/// Re-tests the definition at one specific witness.
pub fn witness_is_free(g: &ReducedPath, family: &[&ReducedPath], w: &FreePoint) -> Result<bool> {
    check_family(g, family)?;
    let path = g.carrier();
    let loc = path.canonicalize(w.location.clone());
    let point = crate::geometry::point_at(path, &loc)?;
    match w.side {
        FreeSide::Outgoing => {
            let Some(dir) = path.forward_direction(&loc) else {
                return Ok(false);
            };
            ray_unmatched(&primitive_direction(&dir), &point, family)
        }
        FreeSide::Incoming => {
            let Some(dir) = path.incoming_direction(&loc) else {
                return Ok(false);
            };
            let back: Vec<BigInt> = primitive_direction(&dir).into_iter().map(|c| -c).collect();
            ray_unmatched(&back, &point, family)
        }
    }
}

/// Checks the ordered hyph condition: edge `i` independent of all earlier
/// edges.  Returns the witnesses in order, or `None` at the first failure.
pub fn is_hyph(edges: &[ReducedPath]) -> Result<Option<Vec<FreePoint>>> {
    let mut witnesses = Vec::new();
    for (i, edge) in edges.iter().enumerate() {
        let family: Vec<&ReducedPath> = edges[..i].iter().collect();
        match is_independent(edge, &family)? {
            Some(w) => witnesses.push(w),
            None => return Ok(None),
        }
    }
    Ok(Some(witnesses))
}

/// First violated condition of the simultaneous-prescription requirements,
/// if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrescriptionViolation {
    /// Edge is trivial or self-intersecting.
    BadEdge { index: usize },
    /// Two distinct edges share their initial segment.
    SharedInitialSegment { i: usize, j: usize },
    /// An initial segment meets a reversed final segment.
    InitialMeetsFinal { i: usize, j: usize },
    /// An initial point lies in the interior of an edge.
    InitialPointInInterior { point_of: usize, edge: usize },
}

/// Diagnostic result of the prescription-condition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrescriptionCheck {
    pub violation: Option<PrescriptionViolation>,
}

impl PrescriptionCheck {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Conditions under which values can be prescribed on all edges at once:
/// every edge non-self-intersecting, no two edges sharing an initial
/// segment, no initial segment meeting a reversed final segment, and no
/// initial point interior to any edge.
pub fn check_prescription_conditions(edges: &[ReducedPath]) -> Result<PrescriptionCheck> {
    for (i, e) in edges.iter().enumerate() {
        if e.is_trivial() || is_self_intersecting(e.carrier()) {
            return Ok(PrescriptionCheck {
                violation: Some(PrescriptionViolation::BadEdge { index: i }),
            });
        }
    }
    for i in 0..edges.len() {
        for j in 0..edges.len() {
            if i != j && same_initial_segment(&edges[i], &edges[j])? {
                return Ok(PrescriptionCheck {
                    violation: Some(PrescriptionViolation::SharedInitialSegment { i, j }),
                });
            }
        }
    }
    for i in 0..edges.len() {
        for j in 0..edges.len() {
            if initial_meets_final(&edges[i], &edges[j])? {
                return Ok(PrescriptionCheck {
                    violation: Some(PrescriptionViolation::InitialMeetsFinal { i, j }),
                });
            }
        }
    }
    for (pi, p) in edges.iter().enumerate() {
        let v = p.start();
        for (ei, e) in edges.iter().enumerate() {
            let interior_hit = locate(e.carrier(), v)?
                .into_iter()
                .any(|loc| loc != e.carrier().start_location() && loc != e.carrier().end_location());
            if interior_hit {
                return Ok(PrescriptionCheck {
                    violation: Some(PrescriptionViolation::InitialPointInInterior {
                        point_of: pi,
                        edge: ei,
                    }),
                });
            }
        }
    }
    Ok(PrescriptionCheck { violation: None })
}
