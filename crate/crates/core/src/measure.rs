//! Cylindrical functions and their Haar integral.
//!
//! A cylindrical function depends on a connection only through its values on
//! the edges of one hyph: a bounded body on group tuples composed with the
//! projection onto that hyph.  The integral averages the body against the
//! product Haar measure, exactly for finite backends (full enumeration) and
//! by seeded Monte Carlo for Lie backends.  Because any two hyphs admit a
//! common refinement and factorization words transport bodies between them,
//! the integral does not depend on the hyph chosen to present the function;
//! `consistency_check` verifies that on demand, and `cyl_add`/`cyl_mul`/
//! `cyl_conj` close the class under algebra operations by combining on a
//! common refinement.

use std::sync::Arc;

use num::complex::Complex64;
use num::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{CExact, GroupDescriptor, GroupElement};
use crate::groupoid::Sign;
use crate::hyph::{leq, refine, Factorization, Hyph};

/// Body of a cylindrical function: a pure map from edge-value tuples to a
/// complex number, exact or floating.
#[derive(Clone)]
pub enum Body {
    Exact(Arc<dyn Fn(&[GroupElement]) -> CExact + Send + Sync>),
    Float(Arc<dyn Fn(&[GroupElement]) -> Complex64 + Send + Sync>),
}

impl Body {
    pub fn eval_complex(&self, x: &[GroupElement]) -> Complex64 {
        match self {
            Body::Exact(f) => exact_to_complex(&(**f)(x)),
            Body::Float(f) => (**f)(x),
        }
    }

    pub fn eval_exact(&self, x: &[GroupElement]) -> Option<CExact> {
        match self {
            Body::Exact(f) => Some((**f)(x)),
            Body::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Body::Exact(_))
    }
}

fn exact_to_complex(z: &CExact) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Function of a connection that factors through one hyph projection.
#[derive(Clone)]
pub struct CylindricalFunction {
    support: Hyph,
    body: Body,
}

impl CylindricalFunction {
    pub fn exact(
        support: Hyph,
        f: impl Fn(&[GroupElement]) -> CExact + Send + Sync + 'static,
    ) -> Self {
        Self {
            support,
            body: Body::Exact(Arc::new(f)),
        }
    }

    pub fn float(
        support: Hyph,
        f: impl Fn(&[GroupElement]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            support,
            body: Body::Float(Arc::new(f)),
        }
    }

    pub fn from_body(support: Hyph, body: Body) -> Self {
        Self { support, body }
    }

    /// Constant function: empty support, so it ignores the connection.
    pub fn constant_exact(c: CExact) -> Self {
        Self::exact(Hyph::new(Vec::new()).expect("empty family is a hyph"), {
            move |_| c.clone()
        })
    }

    pub fn support(&self) -> &Hyph {
        &self.support
    }

    pub fn body(&self) -> &Body {
        &self.body
    }
}

/// Integral value, exact when the whole computation stayed exact.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureValue {
    Exact(CExact),
    Float(Complex64),
}

impl MeasureValue {
    pub fn as_complex(&self) -> Complex64 {
        match self {
            MeasureValue::Exact(z) => exact_to_complex(z),
            MeasureValue::Float(z) => *z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone)]
pub struct IntegrationResult {
    pub value: MeasureValue,
    /// Zero in exact mode; sample standard deviation over sqrt(samples)
    /// otherwise.
    pub standard_error: f64,
    pub sample_count: u64,
    pub mode: IntegrationMode,
}

/// Monte Carlo controls for Lie backends; ignored by exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McParams {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McParams {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 42,
        }
    }
}

const MC_BLOCK: u64 = 4096;

/// Mean of the body against the product Haar measure on the function's own
/// support: exact full enumeration for finite backends, seeded Monte Carlo
/// for Lie backends.
pub fn integrate(
    group: &GroupDescriptor,
    f: &CylindricalFunction,
    params: &McParams,
) -> Result<IntegrationResult> {
    if group.is_finite() {
        integrate_enumerated(group, f)
    } else {
        integrate_monte_carlo(group, f, params)
    }
}

fn tuple_at(mut index: u64, elements: &[GroupElement], n: usize) -> Vec<GroupElement> {
    let m = elements.len() as u64;
    let mut tuple = Vec::with_capacity(n);
    for _ in 0..n {
        tuple.push(elements[(index % m) as usize].clone());
        index /= m;
    }
    tuple
}

fn integrate_enumerated(group: &GroupDescriptor, f: &CylindricalFunction) -> Result<IntegrationResult> {
    let elements = group.enumerate()?;
    let n = f.support().len();
    let m = elements.len() as u64;
    let total = m
        .checked_pow(n as u32)
        .ok_or_else(|| Error::InternalInvariant {
            reason: "enumeration size overflows".into(),
        })?;
    let value = match f.body() {
        Body::Exact(body) => {
            let sum = (0..total)
                .into_par_iter()
                .map(|i| (**body)(&tuple_at(i, &elements, n)))
                .reduce(CExact::zero, |a, b| a + b);
            let count = CExact::new(
                num::BigRational::from_integer(total.into()),
                num::BigRational::zero(),
            );
            MeasureValue::Exact(sum / count)
        }
        Body::Float(body) => {
            let sum = (0..total)
                .into_par_iter()
                .map(|i| (**body)(&tuple_at(i, &elements, n)))
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Complex64::zero(), |a, b| a + b);
            MeasureValue::Float(sum / total as f64)
        }
    };
    Ok(IntegrationResult {
        value,
        standard_error: 0.0,
        sample_count: total,
        mode: IntegrationMode::Exact,
    })
}

fn integrate_monte_carlo(
    group: &GroupDescriptor,
    f: &CylindricalFunction,
    params: &McParams,
) -> Result<IntegrationResult> {
    let n = f.support().len();
    let samples = params.samples.max(1);
    let blocks = samples.div_ceil(MC_BLOCK);
    // One counter-mode stream per block keeps the result independent of the
    // parallel schedule.
    let partials: Vec<(Complex64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
            rng.set_stream(b);
            let take = (samples - b * MC_BLOCK).min(MC_BLOCK);
            let mut sum = Complex64::zero();
            let mut sum_sq = 0.0;
            let mut tuple = Vec::with_capacity(n);
            for _ in 0..take {
                tuple.clear();
                for _ in 0..n {
                    tuple.push(group.haar_sample(&mut rng));
                }
                let z = f.body().eval_complex(&tuple);
                sum += z;
                sum_sq += z.norm_sqr();
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials
        .into_iter()
        .fold((Complex64::zero(), 0.0), |(s, q), (bs, bq)| (s + bs, q + bq));
    let nf = samples as f64;
    let mean = sum / nf;
    let standard_error = if samples > 1 {
        let variance = ((sum_sq / nf - mean.norm_sqr()) * nf / (nf - 1.0)).max(0.0);
        (variance / nf).sqrt()
    } else {
        0.0
    };
    Ok(IntegrationResult {
        value: MeasureValue::Float(mean),
        standard_error,
        sample_count: samples,
        mode: IntegrationMode::MonteCarlo,
    })
}

fn word_products(
    group: &GroupDescriptor,
    words: &[Factorization],
    x: &[GroupElement],
) -> Vec<GroupElement> {
    words
        .iter()
        .map(|w| {
            let mut acc = group.identity();
            for &(k, s) in &w.word {
                let v = match s {
                    Sign::Plus => x[k].clone(),
                    Sign::Minus => x[k].inv(),
                };
                acc = acc.mul(&v).expect("one backend per function");
            }
            acc
        })
        .collect()
}

fn pullback_with_words(
    group: &GroupDescriptor,
    f: &CylindricalFunction,
    finer: &Hyph,
    words: Vec<Factorization>,
) -> CylindricalFunction {
    let g = *group;
    let body = match f.body().clone() {
        Body::Exact(inner) => Body::Exact(Arc::new(move |x: &[GroupElement]| {
            (*inner)(&word_products(&g, &words, x))
        })),
        Body::Float(inner) => Body::Float(Arc::new(move |x: &[GroupElement]| {
            (*inner)(&word_products(&g, &words, x))
        })),
    };
    CylindricalFunction {
        support: finer.clone(),
        body,
    }
}

/// Re-presents `f` on a finer hyph: the new body routes the fine tuple
/// through the factorization words of `f`'s edges, then applies the old
/// body.  Fails when `finer` does not dominate `f`'s support.
pub fn pullback(
    group: &GroupDescriptor,
    f: &CylindricalFunction,
    finer: &Hyph,
) -> Result<CylindricalFunction> {
    let words = leq(f.support(), finer).ok_or(Error::FactorizationFailed)?;
    Ok(pullback_with_words(group, f, finer, words))
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub coarse: IntegrationResult,
    pub fine: IntegrationResult,
    pub consistent: bool,
}

/// Integrates `f` on its own support and, pulled back, on `finer`, then
/// compares: exact equality for exact values, a three-combined-standard-
/// error band for Monte Carlo.  The fine run reseeds so the two estimates
/// are independent.
pub fn consistency_check(
    group: &GroupDescriptor,
    f: &CylindricalFunction,
    finer: &Hyph,
    params: &McParams,
) -> Result<ConsistencyReport> {
    let coarse = integrate(group, f, params)?;
    let pulled = pullback(group, f, finer)?;
    let fine_params = McParams {
        samples: params.samples,
        seed: params.seed.wrapping_add(0x9E37_79B9_7F4A_7C15),
    };
    let fine = integrate(group, &pulled, &fine_params)?;
    let consistent = match (&coarse.value, &fine.value) {
        (MeasureValue::Exact(a), MeasureValue::Exact(b)) => a == b,
        (a, b) => {
            let delta = (a.as_complex() - b.as_complex()).norm();
            let spread = (coarse.standard_error.powi(2) + fine.standard_error.powi(2)).sqrt();
            if spread == 0.0 {
                delta <= 1e-9
            } else {
                delta <= 3.0 * spread
            }
        }
    };
    Ok(ConsistencyReport {
        coarse,
        fine,
        consistent,
    })
}

enum AlgebraOp {
    Add,
    Mul,
}

fn combine(
    group: &GroupDescriptor,
    f1: &CylindricalFunction,
    f2: &CylindricalFunction,
    op: AlgebraOp,
) -> Result<CylindricalFunction> {
    let (common, w1, w2) = refine(f1.support(), f2.support())?;
    let p1 = pullback_with_words(group, f1, &common, w1);
    let p2 = pullback_with_words(group, f2, &common, w2);
    let body = match (p1.body, p2.body) {
        (Body::Exact(a), Body::Exact(b)) => match op {
            AlgebraOp::Add => {
                Body::Exact(Arc::new(move |x: &[GroupElement]| (*a)(x) + (*b)(x)))
            }
            AlgebraOp::Mul => {
                Body::Exact(Arc::new(move |x: &[GroupElement]| (*a)(x) * (*b)(x)))
            }
        },
        (a, b) => match op {
            AlgebraOp::Add => Body::Float(Arc::new(move |x: &[GroupElement]| {
                a.eval_complex(x) + b.eval_complex(x)
            })),
            AlgebraOp::Mul => Body::Float(Arc::new(move |x: &[GroupElement]| {
                a.eval_complex(x) * b.eval_complex(x)
            })),
        },
    };
    Ok(CylindricalFunction {
        support: common,
        body,
    })
}

/// Pointwise sum on a common refinement of the two supports.
pub fn cyl_add(
    group: &GroupDescriptor,
    f1: &CylindricalFunction,
    f2: &CylindricalFunction,
) -> Result<CylindricalFunction> {
    combine(group, f1, f2, AlgebraOp::Add)
}

/// Pointwise product on a common refinement of the two supports.
pub fn cyl_mul(
    group: &GroupDescriptor,
    f1: &CylindricalFunction,
    f2: &CylindricalFunction,
) -> Result<CylindricalFunction> {
    combine(group, f1, f2, AlgebraOp::Mul)
}

/// Pointwise complex conjugate.
pub fn cyl_conj(f: &CylindricalFunction) -> CylindricalFunction {
    let body = match f.body().clone() {
        Body::Exact(inner) => Body::Exact(Arc::new(move |x: &[GroupElement]| (*inner)(x).conj())),
        Body::Float(inner) => Body::Float(Arc::new(move |x: &[GroupElement]| (*inner)(x).conj())),
    };
    CylindricalFunction {
        support: f.support.clone(),
        body,
    }
}

/// Exact indicator of a per-edge subset constraint.
pub fn indicator(
    group: &GroupDescriptor,
    support: &Hyph,
    subsets: &[Vec<GroupElement>],
) -> Result<CylindricalFunction> {
    if support.len() != subsets.len() {
        return Err(Error::ValueCountMismatch {
            edges: support.len(),
            values: subsets.len(),
        });
    }
    for (i, u) in subsets.iter().enumerate() {
        if u.is_empty() {
            return Err(Error::EmptyIndicator { index: i });
        }
        if u.iter().any(|v| !group.matches(v)) {
            return Err(Error::BackendMismatch);
        }
    }
    let sets: Vec<Vec<GroupElement>> = subsets.to_vec();
    Ok(CylindricalFunction::exact(support.clone(), move |x| {
        let inside = x
            .iter()
            .zip(&sets)
            .all(|(v, u)| u.iter().any(|w| w == v));
        if inside {
            CExact::one()
        } else {
            CExact::zero()
        }
    }))
}

/// Mass of the cylinder set picked out by per-edge subsets.  Exact for
/// finite backends, where it equals the counting product; Lie backends must
/// phrase their bump approximations as ordinary cylindrical functions.
pub fn positivity_probe(
    group: &GroupDescriptor,
    support: &Hyph,
    subsets: &[Vec<GroupElement>],
) -> Result<IntegrationResult> {
    let f = indicator(group, support, subsets)?;
    integrate(group, &f, &McParams::default())
}
