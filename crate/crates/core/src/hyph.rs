//! Hyphs: ordered path families in which every edge keeps a free germ
//! against its predecessors, and the construction that turns an arbitrary
//! finite family into one.
//!
//! The construction cuts paths at finitely many exactly-computed points and
//! rewrites every input as a signed word over the surviving fragments.
//! Refinement and membership questions then reduce to word bookkeeping over
//! canonical forms: a fragment is either kept as an edge or replaced by a
//! reference to an equal (possibly inverted) fragment kept elsewhere.

use std::collections::{HashMap, HashSet};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{
    image_overlap, is_self_intersecting, locate, point_at, subpath, PathLocation, Point, Rat,
};
use crate::germs::{is_independent, witness_is_free, FreePoint};
use crate::groupoid::{decompose_at_points, invert, reduce, PathWord, ReducedPath, Sign};

/// Word over hyph edges: `(edge_index, sign)` letters in composition order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub word: Vec<(usize, Sign)>,
}

impl Factorization {
    /// Composes the referenced edges and reduces; `base` anchors the trivial
    /// path of an empty word.
    pub fn expand(&self, hyph: &Hyph, base: &Point) -> Result<ReducedPath> {
        if self.word.is_empty() {
            return reduce(&PathWord::Empty(base.clone()));
        }
        let letters = self
            .word
            .iter()
            .map(|&(k, s)| (hyph.edges()[k].carrier().clone(), s))
            .collect();
        reduce(&PathWord::letters(letters)?)
    }

    /// Rewrites each letter `k` through `tables[k]`, reversing and flipping
    /// signs for inverse letters.  Turns a word over one family into a word
    /// over the family the tables factorize into.
    pub fn substitute(&self, tables: &[Factorization]) -> Factorization {
        let mut word = Vec::new();
        for &(k, s) in &self.word {
            match s {
                Sign::Plus => word.extend(tables[k].word.iter().copied()),
                Sign::Minus => {
                    word.extend(tables[k].word.iter().rev().map(|&(j, t)| (j, t.flip())))
                }
            }
        }
        Factorization { word }
    }
}

/// Ordered edge family in which every edge has a free germ against its
/// predecessors, together with one recorded witness per edge.
#[derive(Debug, Clone)]
pub struct Hyph {
    edges: Vec<ReducedPath>,
    witnesses: Vec<FreePoint>,
}

impl Hyph {
    /// Validates the ordered independence condition and records witnesses.
    pub fn new(edges: Vec<ReducedPath>) -> Result<Self> {
        let mut witnesses = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let family: Vec<&ReducedPath> = edges[..i].iter().collect();
            match is_independent(e, &family)? {
                Some(w) => witnesses.push(w),
                None => return Err(Error::NotAHyph { index: i }),
            }
        }
        Ok(Hyph { edges, witnesses })
    }

    /// Rebuilds from parts, re-checking every stored witness.
    pub fn from_parts(edges: Vec<ReducedPath>, witnesses: Vec<FreePoint>) -> Result<Self> {
        if edges.len() != witnesses.len() {
            return Err(Error::ValueCountMismatch {
                edges: edges.len(),
                values: witnesses.len(),
            });
        }
        for (i, (e, w)) in edges.iter().zip(&witnesses).enumerate() {
            let family: Vec<&ReducedPath> = edges[..i].iter().collect();
            if !witness_is_free(e, &family, w)? {
                return Err(Error::NotAHyph { index: i });
            }
        }
        Ok(Hyph { edges, witnesses })
    }

    pub fn edges(&self) -> &[ReducedPath] {
        &self.edges
    }

    pub fn witnesses(&self) -> &[FreePoint] {
        &self.witnesses
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Cut locations produced by the dependent-path decomposition: interior cuts
/// on the subject, and per comparison path the interior passages of every
/// subject cut image (subject endpoints included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependentCuts {
    pub on_subject: Vec<PathLocation>,
    pub on_comparisons: Vec<Vec<PathLocation>>,
}

/// Decomposes a path that is nowhere free against `comparisons` into pieces
/// that each coincide, up to orientation, with a comparison fragment after
/// the comparisons are cut at the image points.
///
/// The cut set comes from an exact greedy walk over the pooled overlap
/// intervals in the subject's global parameter: from each anchor, extend
/// forward to the farthest end of an interval containing it, then jump to the
/// farthest parameter whose backward interval still reaches the extension.
/// Every chosen value is an overlap-interval endpoint, so the walk is finite
/// and exact.
pub fn decompose_dependent(
    e: &ReducedPath,
    comparisons: &[&ReducedPath],
) -> Result<DependentCuts> {
    if is_independent(e, comparisons)?.is_some() {
        return Err(Error::IndependentSubject);
    }
    let path = e.carrier();
    let mut intervals: Vec<(Rat, Rat)> = Vec::new();
    for c in comparisons {
        for piece in image_overlap(path, c.carrier())? {
            intervals.push((path.global(&piece.on_a.0), path.global(&piece.on_a.1)));
        }
    }
    let one = Rat::one();
    let zero = Rat::zero();
    // Farthest-back interval start whose half-open back side contains t.
    let ell = |t: &Rat| -> Result<Rat> {
        intervals
            .iter()
            .filter(|(a, b)| a < t && t <= b)
            .map(|(a, _)| a.clone())
            .min()
            .ok_or_else(|| Error::InternalInvariant {
                reason: "backward coverage gap in dependent decomposition".into(),
            })
    };
    let mut cut_values: Vec<Rat> = vec![zero.clone()];
    let mut tau = zero.clone();
    let mut rounds = 0usize;
    while tau < one {
        rounds += 1;
        if rounds > 2 * intervals.len() + 2 {
            return Err(Error::InternalInvariant {
                reason: "dependent decomposition failed to advance".into(),
            });
        }
        let tau_plus = intervals
            .iter()
            .filter(|(a, b)| *a <= tau && tau < *b)
            .map(|(_, b)| b.clone())
            .max()
            .ok_or_else(|| Error::InternalInvariant {
                reason: "forward coverage gap in dependent decomposition".into(),
            })?;
        // Farthest candidate whose backward interval reaches the extension.
        // Candidates are interval endpoints; the supremum is attained at one.
        let mut candidates: Vec<Rat> = vec![tau_plus.clone(), one.clone()];
        for (a, b) in &intervals {
            candidates.push(a.clone());
            candidates.push(b.clone());
        }
        candidates.retain(|t| *t >= tau_plus && *t <= one);
        candidates.sort();
        candidates.dedup();
        let mut tau_next = tau_plus.clone();
        for t in candidates.iter().rev() {
            if ell(t)? <= tau_plus {
                tau_next = t.clone();
                break;
            }
        }
        // Backward anchor for the jump target: the largest admissible value,
        // which in exact arithmetic is the target itself.
        let tau_minus = tau_next.clone();
        let tau_half = tau_plus.clone().min(tau_minus.clone());
        cut_values.push(tau_half);
        cut_values.push(tau_minus);
        cut_values.push(tau_next.clone());
        tau = tau_next;
    }
    cut_values.sort();
    cut_values.dedup();
    let on_subject: Vec<PathLocation> = cut_values
        .iter()
        .filter(|v| **v > zero && **v < one)
        .map(|v| path.location_at_global(v))
        .collect();
    let mut images: Vec<Point> = Vec::new();
    for v in &cut_values {
        images.push(point_at(path, &path.location_at_global(v))?);
    }
    let mut on_comparisons = Vec::with_capacity(comparisons.len());
    for c in comparisons {
        let cp = c.carrier();
        let mut cuts: Vec<PathLocation> = Vec::new();
        for x in &images {
            for loc in locate(cp, x)? {
                if loc != cp.start_location() && loc != cp.end_location() {
                    cuts.push(loc);
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        on_comparisons.push(cuts);
    }
    Ok(DependentCuts {
        on_subject,
        on_comparisons,
    })
}

/// Splits a reduced path at interior locations; pieces stay canonical because
/// cutting cannot create collinear junctions or backtracks.
fn split_at_locations(p: &ReducedPath, cuts: &[PathLocation]) -> Result<Vec<ReducedPath>> {
    let path = p.carrier();
    let mut locs: Vec<PathLocation> = vec![path.start_location()];
    locs.extend(cuts.iter().cloned());
    locs.push(path.end_location());
    locs.sort();
    locs.dedup();
    let mut out = Vec::new();
    for pair in locs.windows(2) {
        out.push(ReducedPath::from_canonical(subpath(path, &pair[0], &pair[1])?));
    }
    Ok(out)
}

/// Fragment of the construction arena: a path plus, once resolved, the signed
/// word of fragments that replaced it.
struct Frag {
    path: ReducedPath,
    replacement: Option<Vec<(usize, Sign)>>,
}

fn intern(
    arena: &mut Vec<Frag>,
    queue: &mut Vec<usize>,
    piece: ReducedPath,
) -> (usize, Sign) {
    for &id in queue.iter() {
        if arena[id].path == piece {
            return (id, Sign::Plus);
        }
        if arena[id].path == invert(&piece) {
            return (id, Sign::Minus);
        }
    }
    arena.push(Frag {
        path: piece,
        replacement: None,
    });
    let id = arena.len() - 1;
    queue.push(id);
    (id, Sign::Plus)
}

fn match_piece(
    pieces: &[ReducedPath],
    piece_ids: &[usize],
    child: &ReducedPath,
) -> Option<(usize, Sign, usize)> {
    for (pi, p) in pieces.iter().enumerate() {
        if child == p {
            return Some((piece_ids[pi], Sign::Plus, pi));
        }
        if *child == invert(p) {
            return Some((piece_ids[pi], Sign::Minus, pi));
        }
    }
    None
}

fn resolve(
    arena: &[Frag],
    position: &HashMap<usize, usize>,
    memo: &mut HashMap<usize, Vec<(usize, Sign)>>,
    id: usize,
) -> Vec<(usize, Sign)> {
    if let Some(w) = memo.get(&id) {
        return w.clone();
    }
    let word = match &arena[id].replacement {
        None => vec![(position[&id], Sign::Plus)],
        Some(rep) => {
            let mut out = Vec::new();
            for &(rid, s) in rep {
                let sub = resolve(arena, position, memo, rid);
                match s {
                    Sign::Plus => out.extend(sub),
                    Sign::Minus => {
                        out.extend(sub.iter().rev().map(|&(k, ss)| (k, ss.flip())))
                    }
                }
            }
            out
        }
    };
    memo.insert(id, word.clone());
    word
}

/// Builds a hyph whose edges generate every input path, with one signed word
/// per input.
///
/// First every input is cut at the full endpoint set and the pieces are
/// interned up to orientation.  Then fragments are processed front to back:
/// a fragment independent of everything still pending is kept; otherwise it
/// is decomposed against the pending family, its pieces re-enter the pool,
/// and every comparison fragment is cut at the image points, with children
/// equal to a piece (up to orientation) replaced by a reference to it.  The
/// edge order of the result is the reverse of the order in which fragments
/// were kept, which makes each edge independent of its predecessors.
pub fn build_hyph(inputs: &[ReducedPath]) -> Result<(Hyph, Vec<Factorization>)> {
    for (i, c) in inputs.iter().enumerate() {
        if is_self_intersecting(c.carrier()) {
            return Err(Error::SelfIntersecting { index: i });
        }
    }
    let mut endpoint_set: Vec<Point> = Vec::new();
    for c in inputs {
        endpoint_set.push(c.start().clone());
        endpoint_set.push(c.end().clone());
    }
    endpoint_set.sort();
    endpoint_set.dedup();

    let mut arena: Vec<Frag> = Vec::new();
    let mut queue: Vec<usize> = Vec::new();
    let mut input_words: Vec<Vec<(usize, Sign)>> = Vec::new();
    for c in inputs {
        if c.is_trivial() {
            input_words.push(Vec::new());
            continue;
        }
        let mut word = Vec::new();
        for piece in decompose_at_points(c, &endpoint_set)? {
            word.push(intern(&mut arena, &mut queue, piece));
        }
        input_words.push(word);
    }

    let mut finalized: Vec<usize> = Vec::new();
    let mut rounds = 0usize;
    while let Some(&subject_id) = queue.first() {
        rounds += 1;
        if rounds > 100_000 {
            return Err(Error::InternalInvariant {
                reason: "hyph construction failed to terminate".into(),
            });
        }
        let subject_path = arena[subject_id].path.clone();
        let family_ids: Vec<usize> = queue[1..].to_vec();
        let family_paths: Vec<ReducedPath> =
            family_ids.iter().map(|&id| arena[id].path.clone()).collect();
        let family_refs: Vec<&ReducedPath> = family_paths.iter().collect();
        let cuts = match decompose_dependent(&subject_path, &family_refs) {
            Err(Error::IndependentSubject) => {
                queue.remove(0);
                finalized.push(subject_id);
                continue;
            }
            other => other?,
        };
        queue.remove(0);
        let subject_pieces = split_at_locations(&subject_path, &cuts.on_subject)?;
        let mut piece_ids = Vec::with_capacity(subject_pieces.len());
        for p in &subject_pieces {
            arena.push(Frag {
                path: p.clone(),
                replacement: None,
            });
            piece_ids.push(arena.len() - 1);
        }
        arena[subject_id].replacement =
            Some(piece_ids.iter().map(|&id| (id, Sign::Plus)).collect());
        let mut piece_matched = vec![false; subject_pieces.len()];
        for (fi, &fid) in family_ids.iter().enumerate() {
            let f_cuts = &cuts.on_comparisons[fi];
            if f_cuts.is_empty() {
                if let Some((pid, s, pi)) =
                    match_piece(&subject_pieces, &piece_ids, &family_paths[fi])
                {
                    arena[fid].replacement = Some(vec![(pid, s)]);
                    let pos = queue
                        .iter()
                        .position(|&x| x == fid)
                        .expect("comparison fragment is queued");
                    queue.remove(pos);
                    piece_matched[pi] = true;
                }
                continue;
            }
            let children = split_at_locations(&family_paths[fi], f_cuts)?;
            let mut word = Vec::with_capacity(children.len());
            let mut kept_ids = Vec::new();
            for child in children {
                if let Some((pid, s, pi)) = match_piece(&subject_pieces, &piece_ids, &child) {
                    word.push((pid, s));
                    piece_matched[pi] = true;
                } else {
                    arena.push(Frag {
                        path: child,
                        replacement: None,
                    });
                    let nid = arena.len() - 1;
                    word.push((nid, Sign::Plus));
                    kept_ids.push(nid);
                }
            }
            arena[fid].replacement = Some(word);
            let pos = queue
                .iter()
                .position(|&x| x == fid)
                .expect("comparison fragment is queued");
            queue.splice(pos..pos + 1, kept_ids);
        }
        if !piece_matched.iter().all(|&m| m) {
            return Err(Error::InternalInvariant {
                reason: "dependent piece matched no comparison fragment".into(),
            });
        }
        // Pieces are examined next, in position order.
        for &pid in piece_ids.iter().rev() {
            queue.insert(0, pid);
        }
    }

    let final_ids: Vec<usize> = finalized.iter().rev().copied().collect();
    let mut position: HashMap<usize, usize> = HashMap::new();
    for (k, &id) in final_ids.iter().enumerate() {
        position.insert(id, k);
    }
    let edges: Vec<ReducedPath> = final_ids.iter().map(|&id| arena[id].path.clone()).collect();
    let hyph = match Hyph::new(edges) {
        Ok(h) => h,
        Err(Error::NotAHyph { index }) => {
            return Err(Error::InternalInvariant {
                reason: format!("constructed family fails ordered independence at edge {index}"),
            })
        }
        Err(e) => return Err(e),
    };
    let mut memo: HashMap<usize, Vec<(usize, Sign)>> = HashMap::new();
    let mut factorizations = Vec::with_capacity(input_words.len());
    for word in &input_words {
        let mut out = Vec::new();
        for &(id, s) in word {
            let sub = resolve(&arena, &position, &mut memo, id);
            match s {
                Sign::Plus => out.extend(sub),
                Sign::Minus => out.extend(sub.iter().rev().map(|&(k, ss)| (k, ss.flip()))),
            }
        }
        factorizations.push(Factorization { word: out });
    }
    Ok((hyph, factorizations))
}

/// Common refinement: rebuilds from the union of both edge lists.  Returns
/// the refined hyph plus factorizations of every edge of `h1` and of `h2`.
pub fn refine(
    h1: &Hyph,
    h2: &Hyph,
) -> Result<(Hyph, Vec<Factorization>, Vec<Factorization>)> {
    let mut inputs: Vec<ReducedPath> = h1.edges().to_vec();
    inputs.extend(h2.edges().iter().cloned());
    let (h, words) = build_hyph(&inputs)?;
    let (w1, w2) = words.split_at(h1.len());
    Ok((h, w1.to_vec(), w2.to_vec()))
}

/// Is every edge of `h1` a signed word over `h2`'s edges?  Returns the words
/// when the whole-edge walk finds them.
pub fn leq(h1: &Hyph, h2: &Hyph) -> Option<Vec<Factorization>> {
    let mut out = Vec::with_capacity(h1.len());
    for e in h1.edges() {
        out.push(factorize(e, h2)?);
    }
    Some(out)
}

/// Advances along `p` from `from` by the whole image of `e`.  A reduced path
/// never continues collinearly past a breakpoint, so each straight run of `e`
/// must fit inside the current segment of `p`.
fn consume(p: &ReducedPath, from: &PathLocation, e: &ReducedPath) -> Option<PathLocation> {
    let path = p.carrier();
    let mut loc = path.canonicalize(from.clone());
    for r in 0..e.carrier().segment_count() {
        if loc == path.end_location() {
            return None;
        }
        let u = path.segment_direction(loc.segment);
        let d = e.carrier().segment_direction(r);
        let c = u
            .iter()
            .position(|x| !x.is_zero())
            .expect("nondegenerate segment");
        let lambda = &d[c] / &u[c];
        if lambda <= Rat::zero() {
            return None;
        }
        if (0..u.len()).any(|k| &lambda * &u[k] != d[k]) {
            return None;
        }
        let nf = &loc.fraction + &lambda;
        if nf > Rat::one() {
            return None;
        }
        loc = path.canonicalize(PathLocation::new(loc.segment, nf));
    }
    Some(loc)
}

fn walk(
    p: &ReducedPath,
    loc: PathLocation,
    oriented: &[(ReducedPath, usize, Sign)],
    dead: &mut HashSet<PathLocation>,
    word: &mut Vec<(usize, Sign)>,
) -> bool {
    if loc == p.carrier().end_location() {
        return true;
    }
    if dead.contains(&loc) {
        return false;
    }
    let here = point_at(p.carrier(), &loc).expect("walk location is valid");
    for (e, k, s) in oriented {
        if *e.start() != here {
            continue;
        }
        if let Some(next) = consume(p, &loc, e) {
            word.push((*k, *s));
            if walk(p, next, oriented, dead, word) {
                return true;
            }
            word.pop();
        }
    }
    dead.insert(loc);
    false
}

/// Writes `p` as a signed word over the hyph's edges by walking it from the
/// start and consuming whole oriented edges whose initial germ matches.
/// Depth-first over candidates (edge index ascending, forward orientation
/// first) with failed positions memoized; absent when the walk cannot cover
/// `p` by whole edges.
pub fn factorize(p: &ReducedPath, hyph: &Hyph) -> Option<Factorization> {
    if p.is_trivial() {
        return Some(Factorization { word: Vec::new() });
    }
    let mut oriented = Vec::with_capacity(2 * hyph.len());
    for (k, e) in hyph.edges().iter().enumerate() {
        oriented.push((e.clone(), k, Sign::Plus));
        oriented.push((invert(e), k, Sign::Minus));
    }
    let mut dead = HashSet::new();
    let mut word = Vec::new();
    if walk(
        p,
        p.carrier().start_location(),
        &oriented,
        &mut dead,
        &mut word,
    ) {
        Some(Factorization { word })
    } else {
        None
    }
}
