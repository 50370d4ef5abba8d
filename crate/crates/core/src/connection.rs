//! Group-valued connections on the path groupoid.
//!
//! A connection assigns a group element to every reduced path so that
//! composition maps to multiplication and inversion to the group inverse.
//! The representation is finite: values on the edges of a support hyph, a
//! stack of recorded modifications, and a policy for paths that leave the
//! support.  Evaluation factorizes the path over the support, extending the
//! support on demand; the extension solves for the new edge values so every
//! previously determined value is preserved, and fills genuinely new degrees
//! of freedom from the policy.
//!
//! `modify` changes the value on one edge while leaving every path that
//! avoids the edge's initial germ untouched.  `prescribe` sets values on a
//! whole family at once, either directly when the family's germs are
//! pairwise disentangled, or edge by edge through each edge's free point
//! when the family is a hyph.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::geometry::{is_self_intersecting, self_intersection_points, subpath, PathLocation};
use crate::germs::{
    check_prescription_conditions, final_meets_initial, same_initial_segment, FreeSide,
};
use crate::group::{GroupDescriptor, GroupElement};
use crate::groupoid::{decompose_at_points, invert, reduce, PathWord, ReducedPath, Sign};
use crate::hyph::{build_hyph, factorize, refine, Factorization, Hyph};

/// Rule for valuing support edges created by extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionPolicy {
    /// New degrees of freedom evaluate to the identity.
    Identity,
    /// New degrees of freedom draw Haar samples from a counter-indexed
    /// stream, so evaluation order is reproducible from the seed.
    Haar { seed: u64 },
}

/// One recorded modification: after it, the connection takes `target` on
/// `edge`.
#[derive(Debug, Clone)]
pub struct Modification {
    pub edge: ReducedPath,
    pub target: GroupElement,
}

/// Finitely represented homomorphism from reduced paths to a group.
#[derive(Debug, Clone)]
pub struct GeneralizedConnection {
    group: GroupDescriptor,
    support: Hyph,
    values: Vec<GroupElement>,
    modifiers: Vec<Modification>,
    // Memoized value of each modifier's edge under the stack below it.
    // Sound because support extension preserves prior evaluations, so the
    // value never changes once computed.  Always modifiers.len() long.
    modifier_values: Vec<Option<GroupElement>>,
    policy: ExtensionPolicy,
    policy_draws: u64,
}

impl GeneralizedConnection {
    /// Connection with empty support: every path evaluates through the
    /// policy alone.
    pub fn new(group: GroupDescriptor, policy: ExtensionPolicy) -> Self {
        Self {
            group,
            support: Hyph::new(Vec::new()).expect("empty family is a hyph"),
            values: Vec::new(),
            modifiers: Vec::new(),
            modifier_values: Vec::new(),
            policy,
            policy_draws: 0,
        }
    }

    /// Connection determined by values on the edges of a hyph.
    pub fn with_support(
        group: GroupDescriptor,
        support: Hyph,
        values: Vec<GroupElement>,
        policy: ExtensionPolicy,
    ) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::ValueCountMismatch {
                edges: support.len(),
                values: values.len(),
            });
        }
        if values.iter().any(|v| !group.matches(v)) {
            return Err(Error::BackendMismatch);
        }
        Ok(Self {
            group,
            support,
            values,
            modifiers: Vec::new(),
            modifier_values: Vec::new(),
            policy,
            policy_draws: 0,
        })
    }

    /// Rebuilds a connection from serialized parts, re-validating them.
    pub fn from_parts(
        group: GroupDescriptor,
        support: Hyph,
        values: Vec<GroupElement>,
        modifiers: Vec<Modification>,
        policy: ExtensionPolicy,
        policy_draws: u64,
    ) -> Result<Self> {
        let mut c = Self::with_support(group, support, values, policy)?;
        for m in &modifiers {
            if m.edge.is_trivial() {
                return Err(Error::TrivialPath);
            }
            if is_self_intersecting(m.edge.carrier()) {
                return Err(Error::SelfIntersecting { index: 0 });
            }
            if !group.matches(&m.target) {
                return Err(Error::BackendMismatch);
            }
        }
        c.modifier_values = vec![None; modifiers.len()];
        c.modifiers = modifiers;
        c.policy_draws = policy_draws;
        Ok(c)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn support(&self) -> &Hyph {
        &self.support
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn modifiers(&self) -> &[Modification] {
        &self.modifiers
    }

    pub fn policy(&self) -> &ExtensionPolicy {
        &self.policy
    }

    pub fn policy_draws(&self) -> u64 {
        self.policy_draws
    }

    fn expected_dim(&self) -> Option<usize> {
        self.support
            .edges()
            .first()
            .map(|e| e.carrier().dim())
            .or_else(|| self.modifiers.first().map(|m| m.edge.carrier().dim()))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        match self.expected_dim() {
            Some(expected) if expected != got => Err(Error::DimensionMismatch { expected, got }),
            _ => Ok(()),
        }
    }

    /// Next policy value.  Haar draws come from a stream indexed by a
    /// persistent counter, so replaying the same evaluations replays the
    /// same values.
    fn policy_value(&mut self) -> GroupElement {
        match &self.policy {
            ExtensionPolicy::Identity => self.group.identity(),
            ExtensionPolicy::Haar { seed } => {
                let mut rng = ChaCha20Rng::seed_from_u64(*seed);
                rng.set_stream(self.policy_draws);
                self.policy_draws += 1;
                self.group.haar_sample(&mut rng)
            }
        }
    }

    /// Evaluates a path word: reduces it, then evaluates the reduced path.
    pub fn evaluate(&mut self, word: &PathWord) -> Result<GroupElement> {
        let p = reduce(word)?;
        self.evaluate_reduced(&p)
    }

    /// Evaluates a reduced path through the modification stack down to the
    /// support values.
    pub fn evaluate_reduced(&mut self, p: &ReducedPath) -> Result<GroupElement> {
        self.check_dim(p.carrier().dim())?;
        self.eval_level(p, self.modifiers.len())
    }

    /// Evaluation under the first `level` modifications.  The path is cut at
    /// the modified edge's start point; each piece either picks up the
    /// modification (when it shares the edge's initial germ, forward or
    /// reversed) or passes through unchanged.
    fn eval_level(&mut self, p: &ReducedPath, level: usize) -> Result<GroupElement> {
        if p.is_trivial() {
            return Ok(self.group.identity());
        }
        if level == 0 {
            return self.eval_base(p);
        }
        let m = self.modifiers[level - 1].clone();
        let pieces = decompose_at_points(p, std::slice::from_ref(m.edge.start()))?;
        let he = match self.modifier_values[level - 1].clone() {
            Some(v) => v,
            None => {
                let v = self.eval_level(&m.edge, level - 1)?;
                self.modifier_values[level - 1] = Some(v.clone());
                v
            }
        };
        let mut acc = self.group.identity();
        for piece in &pieces {
            let hg = self.eval_level(piece, level - 1)?;
            let begins = same_initial_segment(piece, &m.edge)?;
            let ends = final_meets_initial(piece, &m.edge)?;
            let val = match (begins, ends) {
                (true, true) => m
                    .target
                    .mul(&he.inv())?
                    .mul(&hg)?
                    .mul(&he)?
                    .mul(&m.target.inv())?,
                (true, false) => m.target.mul(&he.inv())?.mul(&hg)?,
                (false, true) => hg.mul(&he)?.mul(&m.target.inv())?,
                (false, false) => hg,
            };
            acc = acc.mul(&val)?;
        }
        Ok(acc)
    }

    /// Support-level evaluation: cut into non-self-intersecting pieces, then
    /// factorize each piece, extending the support when needed.
    fn eval_base(&mut self, p: &ReducedPath) -> Result<GroupElement> {
        let mut acc = self.group.identity();
        for piece in simple_pieces(p)? {
            let v = self.eval_simple(&piece)?;
            acc = acc.mul(&v)?;
        }
        Ok(acc)
    }

    fn eval_simple(&mut self, p: &ReducedPath) -> Result<GroupElement> {
        if let Some(f) = factorize(p, &self.support) {
            return self.word_value(&f);
        }
        let word = self.extend_support(p)?;
        self.word_value(&word)
    }

    fn word_value(&self, f: &Factorization) -> Result<GroupElement> {
        let mut acc = self.group.identity();
        for &(k, s) in &f.word {
            let v = match s {
                Sign::Plus => self.values[k].clone(),
                Sign::Minus => self.values[k].inv(),
            };
            acc = acc.mul(&v)?;
        }
        Ok(acc)
    }

    /// Replaces the support with a common refinement of itself and `p`'s own
    /// hyph, then solves for the refined values edge by edge: each old edge
    /// donates one letter used nowhere earlier, that letter's value absorbs
    /// the old edge's value, and every other new letter draws from the
    /// policy.  Returns `p`'s word over the new support.
    fn extend_support(&mut self, p: &ReducedPath) -> Result<Factorization> {
        let (single, gwords) = build_hyph(std::slice::from_ref(p))?;
        let (new_support, old_words, single_words) = refine(&self.support, &single)?;
        let mut assigned: Vec<Option<GroupElement>> = vec![None; new_support.len()];
        for (i, w) in old_words.iter().enumerate() {
            let mut solve_at = None;
            for (pos, &(k, _)) in w.word.iter().enumerate() {
                let repeats = w.word.iter().filter(|&&(j, _)| j == k).count();
                if repeats == 1 && assigned[k].is_none() {
                    solve_at = Some(pos);
                    break;
                }
            }
            let Some(pos) = solve_at else {
                return Err(Error::InternalInvariant {
                    reason: format!("support extension has no free letter for edge {i}"),
                });
            };
            let (solve_letter, solve_sign) = w.word[pos];
            for &(k, _) in &w.word {
                if k != solve_letter && assigned[k].is_none() {
                    assigned[k] = Some(self.policy_value());
                }
            }
            let prefix = partial_product(&self.group, &assigned, &w.word[..pos])?;
            let suffix = partial_product(&self.group, &assigned, &w.word[pos + 1..])?;
            let x = prefix.inv().mul(&self.values[i])?.mul(&suffix.inv())?;
            assigned[solve_letter] = Some(match solve_sign {
                Sign::Plus => x,
                Sign::Minus => x.inv(),
            });
        }
        let mut values = Vec::with_capacity(assigned.len());
        for slot in assigned {
            values.push(match slot {
                Some(v) => v,
                None => self.policy_value(),
            });
        }
        let word = gwords[0].substitute(&single_words);
        self.support = new_support;
        self.values = values;
        Ok(word)
    }

    /// New connection whose value on `edge` is `target`, leaving every path
    /// that avoids `edge`'s initial germ unchanged.
    pub fn modify(&self, edge: &ReducedPath, target: GroupElement) -> Result<Self> {
        if edge.is_trivial() {
            return Err(Error::TrivialPath);
        }
        if is_self_intersecting(edge.carrier()) {
            return Err(Error::SelfIntersecting { index: 0 });
        }
        if !self.group.matches(&target) {
            return Err(Error::BackendMismatch);
        }
        self.check_dim(edge.carrier().dim())?;
        let mut next = self.clone();
        next.modifiers.push(Modification {
            edge: edge.clone(),
            target,
        });
        next.modifier_values.push(None);
        Ok(next)
    }

    /// New connection taking `values[i]` on `edges[i]` for all `i` at once.
    ///
    /// When the family's initial germs are pairwise disentangled the
    /// modifications apply directly; otherwise the family must be a hyph,
    /// and each edge is modified through the part beginning (or, reversed,
    /// ending) at its free point so the other edges are undisturbed.
    pub fn prescribe(&self, edges: &[ReducedPath], values: &[GroupElement]) -> Result<Self> {
        if edges.len() != values.len() {
            return Err(Error::ValueCountMismatch {
                edges: edges.len(),
                values: values.len(),
            });
        }
        if values.iter().any(|v| !self.group.matches(v)) {
            return Err(Error::BackendMismatch);
        }
        for (i, e) in edges.iter().enumerate() {
            if e.is_trivial() {
                return Err(Error::TrivialPath);
            }
            if is_self_intersecting(e.carrier()) {
                return Err(Error::SelfIntersecting { index: i });
            }
            self.check_dim(e.carrier().dim())?;
        }
        let check = check_prescription_conditions(edges)?;
        if check.ok() {
            let mut c = self.clone();
            for (e, v) in edges.iter().zip(values) {
                c = c.modify(e, v.clone())?;
            }
            return Ok(c);
        }
        let h = match Hyph::new(edges.to_vec()) {
            Ok(h) => h,
            Err(_) => {
                return Err(Error::PrescriptionInvalid {
                    reason: format!(
                        "family fails the direct conditions ({:?}) and is not a hyph",
                        check.violation
                    ),
                });
            }
        };
        let mut c = self.clone();
        for (i, e) in h.edges().iter().enumerate() {
            let witness = &h.witnesses()[i];
            let tau = e.carrier().canonicalize(witness.location.clone());
            let start = e.carrier().start_location();
            let end = e.carrier().end_location();
            match witness.side {
                FreeSide::Outgoing => {
                    let before = sub_reduced(e, &start, &tau)?;
                    let after = sub_reduced(e, &tau, &end)?;
                    let hb = c.evaluate_reduced(&before)?;
                    let x = hb.inv().mul(&values[i])?;
                    c = c.modify(&after, x)?;
                }
                FreeSide::Incoming => {
                    let before = invert(&sub_reduced(e, &tau, &end)?);
                    let after = invert(&sub_reduced(e, &start, &tau)?);
                    let hb = c.evaluate_reduced(&before)?;
                    let x = hb.inv().mul(&values[i].inv())?;
                    c = c.modify(&after, x)?;
                }
            }
        }
        Ok(c)
    }

    /// Values of the connection on the edges of a hyph.
    pub fn project(&mut self, h: &Hyph) -> Result<Vec<GroupElement>> {
        let mut out = Vec::with_capacity(h.len());
        for e in h.edges() {
            out.push(self.evaluate_reduced(e)?);
        }
        Ok(out)
    }
}

fn partial_product(
    group: &GroupDescriptor,
    assigned: &[Option<GroupElement>],
    letters: &[(usize, Sign)],
) -> Result<GroupElement> {
    let mut acc = group.identity();
    for &(k, s) in letters {
        let v = assigned[k]
            .as_ref()
            .ok_or_else(|| Error::InternalInvariant {
                reason: "unassigned letter in partial product".into(),
            })?;
        let v = match s {
            Sign::Plus => v.clone(),
            Sign::Minus => v.inv(),
        };
        acc = acc.mul(&v)?;
    }
    Ok(acc)
}

fn sub_reduced(p: &ReducedPath, a: &PathLocation, b: &PathLocation) -> Result<ReducedPath> {
    Ok(ReducedPath::from_canonical(subpath(p.carrier(), a, b)?))
}

/// Cuts a reduced path into non-self-intersecting pieces: first at every
/// multiply visited point, then closed pieces once more at their first
/// breakpoint.
fn simple_pieces(p: &ReducedPath) -> Result<Vec<ReducedPath>> {
    let repeated = self_intersection_points(p.carrier());
    let pieces = if repeated.is_empty() {
        vec![p.clone()]
    } else {
        decompose_at_points(p, &repeated)?
    };
    let mut out = Vec::new();
    for piece in pieces {
        if !piece.is_trivial() && piece.start() == piece.end() {
            // A closed piece is reduced, so it has at least three segments
            // and its first breakpoint is interior.
            let mid = piece.carrier().points()[1].clone();
            out.extend(decompose_at_points(&piece, std::slice::from_ref(&mid))?);
        } else {
            out.push(piece);
        }
    }
    Ok(out)
}
