//! Structure groups for parallel transports: exact finite backends (cyclic
//! groups, the unit quaternion group) and sampled compact Lie backends
//! (U(1), SU(2)).
//!
//! Finite elements are integers and every operation is exact.  Lie elements
//! are doubles, renormalized after each product; their equality is
//! tolerance-based and nothing exactness-critical is ever routed through
//! them.  Unit quaternions `q` and `-q` are distinct elements (they differ
//! as special unitary matrices, and the spin-half character separates them),
//! so equality never folds the sign.

use std::f64::consts::TAU;

use num::complex::Complex64;
use num::{BigInt, BigRational, Complex};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const DEFAULT_LIE_TOLERANCE: f64 = 1e-9;

/// Exact complex value: Gaussian rational.
pub type CExact = Complex<BigRational>;

fn brat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(u32),
    Quaternion8,
    U1,
    Su2,
}

/// Which group is in play, plus the equality tolerance for Lie backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDescriptor {
    pub kind: GroupKind,
    pub tolerance: f64,
}

impl GroupDescriptor {
    pub fn cyclic(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidElement {
                reason: "cyclic group order must be at least 1".into(),
            });
        }
        Ok(GroupDescriptor {
            kind: GroupKind::Cyclic(n),
            tolerance: DEFAULT_LIE_TOLERANCE,
        })
    }

    pub fn quaternion8() -> Self {
        GroupDescriptor {
            kind: GroupKind::Quaternion8,
            tolerance: DEFAULT_LIE_TOLERANCE,
        }
    }

    pub fn u1() -> Self {
        GroupDescriptor {
            kind: GroupKind::U1,
            tolerance: DEFAULT_LIE_TOLERANCE,
        }
    }

    pub fn su2() -> Self {
        GroupDescriptor {
            kind: GroupKind::Su2,
            tolerance: DEFAULT_LIE_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Parses a group tag: `Z<n>`, `Q8`, `U1`, `SU2`.
    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "Q8" => Ok(GroupDescriptor::quaternion8()),
            "U1" => Ok(GroupDescriptor::u1()),
            "SU2" => Ok(GroupDescriptor::su2()),
            _ => {
                if let Some(n) = tag.strip_prefix('Z').and_then(|s| s.parse::<u32>().ok()) {
                    GroupDescriptor::cyclic(n)
                } else {
                    Err(Error::InvalidElement {
                        reason: format!("unknown group tag {tag:?} (expected Z<n>, Q8, U1, SU2)"),
                    })
                }
            }
        }
    }

    pub fn tag(&self) -> String {
        match self.kind {
            GroupKind::Cyclic(n) => format!("Z{n}"),
            GroupKind::Quaternion8 => "Q8".into(),
            GroupKind::U1 => "U1".into(),
            GroupKind::Su2 => "SU2".into(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::Cyclic(_) | GroupKind::Quaternion8)
    }

    pub fn order(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Cyclic(n) => Some(n as u64),
            GroupKind::Quaternion8 => Some(8),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Cyclic(n) => GroupElement::Cyclic { n, k: 0 },
            GroupKind::Quaternion8 => GroupElement::Quat8(0),
            GroupKind::U1 => GroupElement::U1(0.0),
            GroupKind::Su2 => GroupElement::Su2([1.0, 0.0, 0.0, 0.0]),
        }
    }

    /// Does the element belong to this backend?
    pub fn matches(&self, e: &GroupElement) -> bool {
        match (self.kind, e) {
            (GroupKind::Cyclic(n), GroupElement::Cyclic { n: m, .. }) => n == *m,
            (GroupKind::Quaternion8, GroupElement::Quat8(_)) => true,
            (GroupKind::U1, GroupElement::U1(_)) => true,
            (GroupKind::Su2, GroupElement::Su2(_)) => true,
            _ => false,
        }
    }

    /// Exact equality for finite backends, tolerance equality for Lie ones.
    /// Mismatched backends are never equal.
    pub fn approx_eq(&self, a: &GroupElement, b: &GroupElement) -> bool {
        if !self.matches(a) || !self.matches(b) {
            return false;
        }
        match (a, b) {
            (GroupElement::Cyclic { k: x, .. }, GroupElement::Cyclic { k: y, .. }) => x == y,
            (GroupElement::Quat8(x), GroupElement::Quat8(y)) => x == y,
            (GroupElement::U1(x), GroupElement::U1(y)) => {
                let d = (x - y).rem_euclid(TAU);
                d.min(TAU - d) <= self.tolerance
            }
            (GroupElement::Su2(x), GroupElement::Su2(y)) => x
                .iter()
                .zip(y)
                .all(|(p, q)| (p - q).abs() <= self.tolerance),
            _ => false,
        }
    }

    /// One Haar-distributed element: uniform index for finite groups,
    /// uniform angle for U(1), normalized 4-dimensional Gaussian for SU(2).
    pub fn haar_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        match self.kind {
            GroupKind::Cyclic(n) => GroupElement::Cyclic {
                n,
                k: rng.gen_range(0..n),
            },
            GroupKind::Quaternion8 => GroupElement::Quat8(rng.gen_range(0..8)),
            GroupKind::U1 => GroupElement::U1(rng.gen::<f64>() * TAU),
            GroupKind::Su2 => loop {
                let q: [f64; 4] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let norm = (q.iter().map(|c| c * c).sum::<f64>()).sqrt();
                if norm > 1e-6 {
                    break GroupElement::Su2([q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm]);
                }
            },
        }
    }

    /// All elements of a finite backend, in index order.
    pub fn enumerate(&self) -> Result<Vec<GroupElement>> {
        match self.kind {
            GroupKind::Cyclic(n) => Ok((0..n).map(|k| GroupElement::Cyclic { n, k }).collect()),
            GroupKind::Quaternion8 => Ok((0..8).map(GroupElement::Quat8).collect()),
            _ => Err(Error::LieEnumeration),
        }
    }

    /// Index of a finite element in the enumeration order.
    pub fn index_of(&self, e: &GroupElement) -> Result<usize> {
        if !self.matches(e) {
            return Err(Error::BackendMismatch);
        }
        match e {
            GroupElement::Cyclic { k, .. } => Ok(*k as usize),
            GroupElement::Quat8(i) => Ok(*i as usize),
            _ => Err(Error::LieEnumeration),
        }
    }
}

/// One group element, tagged by backend.  Quaternion indices encode
/// `1, -1, i, -i, j, -j, k, -k` in that order.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Cyclic { n: u32, k: u32 },
    Quat8(u8),
    U1(f64),
    Su2([f64; 4]),
}

const Q8_QUAT: [[i32; 4]; 8] = [
    [1, 0, 0, 0],
    [-1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, -1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, -1, 0],
    [0, 0, 0, 1],
    [0, 0, 0, -1],
];

fn quat_to_q8(q: [i32; 4]) -> u8 {
    for (i, cand) in Q8_QUAT.iter().enumerate() {
        if *cand == q {
            return i as u8;
        }
    }
    unreachable!("product of unit quaternions is a unit quaternion");
}

fn quat_mul_int(a: [i32; 4], b: [i32; 4]) -> [i32; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn quat_mul_f64(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

impl GroupElement {
    pub fn cyclic(n: u32, k: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidElement {
                reason: "cyclic group order must be at least 1".into(),
            });
        }
        Ok(GroupElement::Cyclic {
            n,
            k: k.rem_euclid(n as i64) as u32,
        })
    }

    pub fn q8(index: u8) -> Result<Self> {
        if index >= 8 {
            return Err(Error::InvalidElement {
                reason: format!("quaternion index {index} out of range 0..8"),
            });
        }
        Ok(GroupElement::Quat8(index))
    }

    pub fn u1(angle: f64) -> Self {
        GroupElement::U1(angle.rem_euclid(TAU))
    }

    /// Unit quaternion `[w, x, y, z]`; the norm must already be 1 up to 1e-6
    /// and is renormalized exactly once here.
    pub fn su2(q: [f64; 4]) -> Result<Self> {
        let norm = (q.iter().map(|c| c * c).sum::<f64>()).sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidElement {
                reason: format!("quaternion norm {norm} is not 1"),
            });
        }
        Ok(GroupElement::Su2([
            q[0] / norm,
            q[1] / norm,
            q[2] / norm,
            q[3] / norm,
        ]))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (GroupElement::Cyclic { n: n1, k: k1 }, GroupElement::Cyclic { n: n2, k: k2 }) => {
                if n1 != n2 {
                    return Err(Error::BackendMismatch);
                }
                Ok(GroupElement::Cyclic {
                    n: *n1,
                    k: (k1 + k2) % n1,
                })
            }
            (GroupElement::Quat8(a), GroupElement::Quat8(b)) => Ok(GroupElement::Quat8(
                quat_to_q8(quat_mul_int(Q8_QUAT[*a as usize], Q8_QUAT[*b as usize])),
            )),
            (GroupElement::U1(a), GroupElement::U1(b)) => {
                Ok(GroupElement::U1((a + b).rem_euclid(TAU)))
            }
            (GroupElement::Su2(a), GroupElement::Su2(b)) => {
                let q = quat_mul_f64(a, b);
                let norm = (q.iter().map(|c| c * c).sum::<f64>()).sqrt();
                Ok(GroupElement::Su2([
                    q[0] / norm,
                    q[1] / norm,
                    q[2] / norm,
                    q[3] / norm,
                ]))
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn inv(&self) -> Self {
        match self {
            GroupElement::Cyclic { n, k } => GroupElement::Cyclic {
                n: *n,
                k: (n - k) % n,
            },
            GroupElement::Quat8(i) => {
                let q = Q8_QUAT[*i as usize];
                GroupElement::Quat8(quat_to_q8([q[0], -q[1], -q[2], -q[3]]))
            }
            GroupElement::U1(a) => GroupElement::U1((-a).rem_euclid(TAU)),
            GroupElement::Su2(q) => GroupElement::Su2([q[0], -q[1], -q[2], -q[3]]),
        }
    }
}

/// Trace in the defining representation: the fundamental character
/// `e^{i 2 pi k / n}` for cyclic groups, the two-dimensional irreducible
/// character for the quaternion group, `e^{i theta}` for U(1), `2w` for
/// SU(2).
pub fn trace(e: &GroupElement) -> Complex64 {
    match e {
        GroupElement::Cyclic { n, k } => {
            let theta = TAU * (*k as f64) / (*n as f64);
            Complex64::new(theta.cos(), theta.sin())
        }
        GroupElement::Quat8(i) => match i {
            0 => Complex64::new(2.0, 0.0),
            1 => Complex64::new(-2.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        },
        GroupElement::U1(a) => Complex64::new(a.cos(), a.sin()),
        GroupElement::Su2(q) => Complex64::new(2.0 * q[0], 0.0),
    }
}

/// Exact trace where it exists as a Gaussian rational: quaternion traces
/// always, cyclic traces exactly at quarter turns.
pub fn exact_trace(e: &GroupElement) -> Option<CExact> {
    match e {
        GroupElement::Cyclic { n, k } => {
            let four_k = 4 * (*k as u64);
            if four_k % (*n as u64) != 0 {
                return None;
            }
            let (re, im) = match (four_k / (*n as u64)) % 4 {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            Some(Complex::new(brat(re, 1), brat(im, 1)))
        }
        GroupElement::Quat8(i) => {
            let re = match i {
                0 => 2,
                1 => -2,
                _ => 0,
            };
            Some(Complex::new(brat(re, 1), brat(0, 1)))
        }
        _ => None,
    }
}

/// Real class value used by loop observables: the real part of `trace`.
pub fn class_value(e: &GroupElement) -> f64 {
    trace(e).re
}

/// Exact class value where the cosine is rational (always for quaternions,
/// at sixth/quarter/third turns for cyclic groups).
pub fn class_value_exact(e: &GroupElement) -> Option<BigRational> {
    match e {
        GroupElement::Cyclic { n, k } => {
            let twelve_k = 12 * (*k as u64);
            if twelve_k % (*n as u64) != 0 {
                return None;
            }
            match (twelve_k / (*n as u64)) % 12 {
                0 => Some(brat(1, 1)),
                2 | 10 => Some(brat(1, 2)),
                3 | 9 => Some(brat(0, 1)),
                4 | 8 => Some(brat(-1, 2)),
                6 => Some(brat(-1, 1)),
                _ => None,
            }
        }
        GroupElement::Quat8(i) => Some(match i {
            0 => brat(2, 1),
            1 => brat(-2, 1),
            _ => brat(0, 1),
        }),
        _ => None,
    }
}

/// SU(2) spin-half character `2w`.
pub fn su2_character_half(e: &GroupElement) -> Result<f64> {
    match e {
        GroupElement::Su2(q) => Ok(2.0 * q[0]),
        _ => Err(Error::BackendMismatch),
    }
}

/// SU(2) spin-one character `4w^2 - 1`.
pub fn su2_character_one(e: &GroupElement) -> Result<f64> {
    match e {
        GroupElement::Su2(q) => Ok(4.0 * q[0] * q[0] - 1.0),
        _ => Err(Error::BackendMismatch),
    }
}
