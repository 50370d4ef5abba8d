//! The path groupoid: words of oriented paths and their canonical reduced
//! form.
//!
//! Two paths are treated as equal when their canonical forms coincide: the
//! canonical form merges collinear same-direction breakpoints and cancels
//! breakpoint-local reversals (retraces) left to right until none remain.
//! Reduction never changes a path's endpoints.

use num::Zero;

use crate::error::{Error, Result};
use crate::geometry::{locate, subpath, PathLocation, PlPath, Point, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Formal word of oriented paths; the empty word carries an explicit base
/// point so that it still names a (trivial) path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathWord {
    Empty(Point),
    Letters(Vec<(PlPath, Sign)>),
}

impl PathWord {
    pub fn single(path: PlPath) -> Self {
        PathWord::Letters(vec![(path, Sign::Plus)])
    }

    pub fn letters(letters: Vec<(PlPath, Sign)>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyPath);
        }
        Ok(PathWord::Letters(letters))
    }
}

/// Path in canonical reduced form: no collinear same-direction breakpoint, no
/// breakpoint-local reversal.  Constructed only through reduction, so the
/// invariant holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedPath {
    carrier: PlPath,
}

impl ReducedPath {
    pub fn carrier(&self) -> &PlPath {
        &self.carrier
    }

    pub fn into_carrier(self) -> PlPath {
        self.carrier
    }

    pub fn is_trivial(&self) -> bool {
        self.carrier.is_trivial()
    }

    pub fn start(&self) -> &Point {
        self.carrier.start()
    }

    pub fn end(&self) -> &Point {
        self.carrier.end()
    }

    /// Wraps a carrier that is already in canonical form.  Used where
    /// reduction is known to be a no-op (subpaths of reduced paths); debug
    /// builds verify the claim.
    pub(crate) fn from_canonical(carrier: PlPath) -> Self {
        debug_assert!({
            let again = reduce_points(carrier.points().to_vec());
            again == carrier.points()
        });
        ReducedPath { carrier }
    }

    pub fn from_path(path: &PlPath) -> Self {
        ReducedPath {
            carrier: PlPath::new(reduce_points(path.points().to_vec()))
                .expect("reduction keeps at least the base point"),
        }
    }
}

fn direction_ratio(d1: &[Rat], d2: &[Rat]) -> Option<Rat> {
    // If d2 = lambda * d1 returns lambda, otherwise None.
    let c = d1.iter().position(|x| !x.is_zero())?;
    let lambda = &d2[c] / &d1[c];
    for k in 0..d1.len() {
        if &lambda * &d1[k] != d2[k] {
            return None;
        }
    }
    Some(lambda)
}

enum ReduceStep {
    Push,
    Drop,
    Pop,
}

/// Left-to-right canonicalization of a breakpoint list: drops repeated
/// points, merges collinear continuations, cancels reversals (retraces eat
/// exactly the shared stretch, whether the reversal is partial or full).
fn reduce_points(input: Vec<Point>) -> Vec<Point> {
    let mut stack: Vec<Point> = Vec::new();
    'next: for incoming in input {
        loop {
            let step = match stack.last() {
                None => ReduceStep::Push,
                Some(top) if *top == incoming => ReduceStep::Drop,
                Some(_) if stack.len() < 2 => ReduceStep::Push,
                Some(top) => {
                    let second = &stack[stack.len() - 2];
                    let d1 = top.sub(second);
                    let d2 = incoming.sub(top);
                    // Any collinear turn at the top breakpoint disappears: a
                    // positive ratio is a redundant breakpoint, a negative
                    // one a reversal whose shared stretch cancels.  Either
                    // way the top is popped and the point re-examined.
                    if direction_ratio(&d1, &d2).is_some() {
                        ReduceStep::Pop
                    } else {
                        ReduceStep::Push
                    }
                }
            };
            match step {
                ReduceStep::Push => {
                    stack.push(incoming);
                    continue 'next;
                }
                ReduceStep::Drop => continue 'next,
                ReduceStep::Pop => {
                    stack.pop();
                }
            }
        }
    }
    stack
}

/// Canonical form of a word.  Letters must compose end to start.
pub fn reduce(word: &PathWord) -> Result<ReducedPath> {
    let mut pts: Vec<Point> = Vec::new();
    match word {
        PathWord::Empty(base) => pts.push(base.clone()),
        PathWord::Letters(letters) => {
            let dim = letters[0].0.dim();
            for (i, (path, sign)) in letters.iter().enumerate() {
                if path.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: path.dim(),
                    });
                }
                let first = match sign {
                    Sign::Plus => path.start(),
                    Sign::Minus => path.end(),
                };
                if let Some(prev_end) = pts.last() {
                    if prev_end != first {
                        return Err(Error::NotComposable { index: i - 1 });
                    }
                }
                match sign {
                    Sign::Plus => pts.extend(path.points().iter().cloned()),
                    Sign::Minus => pts.extend(path.points().iter().rev().cloned()),
                }
            }
        }
    }
    let reduced = reduce_points(pts);
    Ok(ReducedPath {
        carrier: PlPath::new(reduced).expect("reduction keeps at least the base point"),
    })
}

pub fn compose(a: &ReducedPath, b: &ReducedPath) -> Result<ReducedPath> {
    if a.end() != b.start() {
        return Err(Error::NotComposable { index: 0 });
    }
    let mut pts = a.carrier.points().to_vec();
    pts.extend(b.carrier.points().iter().cloned());
    Ok(ReducedPath {
        carrier: PlPath::new(reduce_points(pts)).expect("nonempty"),
    })
}

pub fn invert(a: &ReducedPath) -> ReducedPath {
    let pts: Vec<Point> = a.carrier.points().iter().rev().cloned().collect();
    // The reverse of a canonical form is canonical.
    ReducedPath {
        carrier: PlPath::new(pts).expect("nonempty"),
    }
}

/// Equality in the groupoid: identical canonical forms.
pub fn equivalent(a: &PathWord, b: &PathWord) -> Result<bool> {
    Ok(reduce(a)? == reduce(b)?)
}

/// Cuts a reduced path at every passage through any of the given points,
/// dropping cuts that land on the path's endpoints.  Pieces concatenate back
/// to the input and contain none of the points in their interiors.
pub fn decompose_at_points(a: &ReducedPath, points: &[Point]) -> Result<Vec<ReducedPath>> {
    let mut cuts: Vec<PathLocation> = Vec::new();
    for x in points {
        cuts.extend(locate(a.carrier(), x)?);
    }
    cuts.sort();
    cuts.dedup();
    let start = a.carrier.start_location();
    let end = a.carrier.end_location();
    cuts.retain(|loc| *loc != start && *loc != end);
    let mut bounds = vec![start];
    bounds.extend(cuts);
    bounds.push(end);
    let mut pieces = Vec::new();
    for pair in bounds.windows(2) {
        let piece = subpath(a.carrier(), &pair[0], &pair[1])?;
        pieces.push(ReducedPath::from_canonical(piece));
    }
    Ok(pieces)
}
