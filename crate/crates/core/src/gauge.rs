//! Gauge transformations on hyph configurations and the quotient integral.
//!
//! A gauge transform assigns a group element to finitely many points
//! (identity elsewhere) and acts on an edge configuration by sandwiching:
//! the value on an edge from `a` to `b` becomes `t(a)^-1 * v * t(b)`.  Loop
//! observables built from class functions are invariant, and the integral of
//! a gauge-invariant cylindrical function descends to the quotient
//! unchanged, which `integrate_quotient` checks stochastically before
//! delegating to the ordinary integral.

use std::collections::{BTreeMap, BTreeSet};

use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::group::{class_value, GroupDescriptor, GroupElement};
use crate::groupoid::Sign;
use crate::hyph::{Factorization, Hyph};
use crate::measure::{integrate, CylindricalFunction, IntegrationResult, McParams};

/// Group-valued function on points, identity outside a finite support.
#[derive(Debug, Clone)]
pub struct GaugeTransform {
    group: GroupDescriptor,
    assignment: BTreeMap<Point, GroupElement>,
}

impl GaugeTransform {
    /// Later entries for the same point overwrite earlier ones.
    pub fn new(group: GroupDescriptor, pairs: Vec<(Point, GroupElement)>) -> Result<Self> {
        let mut assignment = BTreeMap::new();
        for (p, v) in pairs {
            if !group.matches(&v) {
                return Err(Error::BackendMismatch);
            }
            assignment.insert(p, v);
        }
        Ok(Self { group, assignment })
    }

    pub fn identity(group: GroupDescriptor) -> Self {
        Self {
            group,
            assignment: BTreeMap::new(),
        }
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn assignment(&self) -> &BTreeMap<Point, GroupElement> {
        &self.assignment
    }

    pub fn value_at(&self, p: &Point) -> GroupElement {
        self.assignment
            .get(p)
            .cloned()
            .unwrap_or_else(|| self.group.identity())
    }

    /// Acts on an edge configuration: value on an edge from `a` to `b`
    /// becomes `t(a)^-1 * v * t(b)`.
    pub fn act(&self, h: &Hyph, config: &[GroupElement]) -> Result<Vec<GroupElement>> {
        if h.len() != config.len() {
            return Err(Error::ValueCountMismatch {
                edges: h.len(),
                values: config.len(),
            });
        }
        if config.iter().any(|v| !self.group.matches(v)) {
            return Err(Error::BackendMismatch);
        }
        h.edges()
            .iter()
            .zip(config)
            .map(|(e, v)| {
                let s = self.value_at(e.start());
                let t = self.value_at(e.end());
                s.inv().mul(v)?.mul(&t)
            })
            .collect()
    }

    /// Pointwise product; acting with the result equals acting with `self`
    /// first and `other` second.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::BackendMismatch);
        }
        let mut assignment = BTreeMap::new();
        let support: BTreeSet<&Point> = self
            .assignment
            .keys()
            .chain(other.assignment.keys())
            .collect();
        for p in support {
            assignment.insert(p.clone(), self.value_at(p).mul(&other.value_at(p))?);
        }
        Ok(Self {
            group: self.group,
            assignment,
        })
    }
}

/// Class value of the ordered product of edge values along a closed word:
/// real part of the natural trace for each backend.  The word must chain
/// end to start and close up; the empty word is the trivial loop at no
/// particular point and evaluates on the identity.
pub fn wilson_loop(
    group: &GroupDescriptor,
    h: &Hyph,
    loop_word: &Factorization,
    config: &[GroupElement],
) -> Result<Complex64> {
    if h.len() != config.len() {
        return Err(Error::ValueCountMismatch {
            edges: h.len(),
            values: config.len(),
        });
    }
    if config.iter().any(|v| !group.matches(v)) {
        return Err(Error::BackendMismatch);
    }
    let mut product = group.identity();
    let mut endpoints: Option<(Point, Point)> = None;
    for (i, &(k, s)) in loop_word.word.iter().enumerate() {
        let edge = h.edges().get(k).ok_or(Error::FactorizationFailed)?;
        let (from, to) = match s {
            Sign::Plus => (edge.start().clone(), edge.end().clone()),
            Sign::Minus => (edge.end().clone(), edge.start().clone()),
        };
        match &mut endpoints {
            None => endpoints = Some((from, to)),
            Some((_, cur)) => {
                if *cur != from {
                    return Err(Error::NotComposable { index: i });
                }
                *cur = to;
            }
        }
        let v = match s {
            Sign::Plus => config[k].clone(),
            Sign::Minus => config[k].inv(),
        };
        product = product.mul(&v)?;
    }
    if let Some((first, last)) = &endpoints {
        if first != last {
            return Err(Error::LoopNotClosed);
        }
    }
    Ok(Complex64::new(class_value(&product), 0.0))
}

const INVARIANCE_PROBES: u32 = 100;
const PROBE_SEED_OFFSET: u64 = 0xA076_1D64_78BD_642F;

/// Integral of a gauge-invariant cylindrical function over the quotient:
/// equals the ordinary integral once invariance holds.  Invariance is
/// probed on random transform/configuration pairs, exactly for exact
/// bodies and within the backend tolerance otherwise.
pub fn integrate_quotient(
    group: &GroupDescriptor,
    f: &CylindricalFunction,
    params: &McParams,
) -> Result<IntegrationResult> {
    let vertices: BTreeSet<Point> = f
        .support()
        .edges()
        .iter()
        .flat_map(|e| [e.start().clone(), e.end().clone()])
        .collect();
    let n = f.support().len();
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed.wrapping_add(PROBE_SEED_OFFSET));
    for _ in 0..INVARIANCE_PROBES {
        let t = GaugeTransform::new(
            *group,
            vertices
                .iter()
                .map(|p| (p.clone(), group.haar_sample(&mut rng)))
                .collect(),
        )?;
        let config: Vec<GroupElement> = (0..n).map(|_| group.haar_sample(&mut rng)).collect();
        let moved = t.act(f.support(), &config)?;
        let invariant = match (
            f.body().eval_exact(&config),
            f.body().eval_exact(&moved),
        ) {
            (Some(a), Some(b)) => a == b,
            _ => {
                let a = f.body().eval_complex(&config);
                let b = f.body().eval_complex(&moved);
                (a - b).norm() <= group.tolerance.max(1e-9)
            }
        };
        if !invariant {
            return Err(Error::InvarianceProbeFailed);
        }
    }
    integrate(group, f, params)
}
