//! File formats and plain-text representations shared by the subcommands.
//!
//! Paths travel as JSON breakpoint lists whose coordinates are exact
//! rationals written as `[numerator, denominator]` pairs.  Group elements
//! print in a per-backend plain form that parses back unchanged: a residue
//! for cyclic groups, a unit index 0..=7 for the quaternions, an angle for
//! the circle, and four comma-separated components for SU(2).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num::{BigInt, BigRational, One, ToPrimitive};
use serde::{Deserialize, Serialize};

use hyphal::connection::{ExtensionPolicy, GeneralizedConnection, Modification};
use hyphal::geometry::{Point, PlPath};
use hyphal::group::{CExact, GroupDescriptor, GroupElement, GroupKind};
use hyphal::groupoid::{reduce, PathWord, ReducedPath, Sign};
use hyphal::hyph::{Factorization, Hyph};
use hyphal::measure::CylindricalFunction;

use crate::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
pub struct PathSetFile {
    pub dimension: usize,
    pub paths: Vec<PathEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PathEntry {
    pub name: String,
    pub breakpoints: Vec<Vec<[i64; 2]>>,
}

/// A loaded path-set file: named piecewise-linear paths in file order.
pub struct NamedPaths {
    pub dimension: usize,
    pub names: Vec<String>,
    pub paths: Vec<PlPath>,
}

impl NamedPaths {
    pub fn lookup(&self, name: &str) -> Option<&PlPath> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.paths[i])
    }

    /// Each file path as a reduced groupoid element, in file order.
    pub fn reduced(&self) -> CliResult<Vec<ReducedPath>> {
        self.paths
            .iter()
            .map(|p| reduce(&PathWord::single(p.clone())).map_err(CliError::from))
            .collect()
    }
}

pub fn read_text(file: &Path) -> CliResult<String> {
    fs::read_to_string(file)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", file.display())))
}

pub fn load_paths(file: &Path) -> CliResult<NamedPaths> {
    let spec: PathSetFile = serde_json::from_str(&read_text(file)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    if spec.dimension == 0 {
        return Err(CliError::Input("dimension must be at least 1".into()));
    }
    let mut names = Vec::new();
    let mut paths = Vec::new();
    for entry in &spec.paths {
        if names.contains(&entry.name) {
            return Err(CliError::Input(format!(
                "duplicate path name {:?}",
                entry.name
            )));
        }
        let path = path_from_breakpoints(&entry.breakpoints, Some(spec.dimension))
            .map_err(|e| match e {
                CliError::Input(m) => CliError::Input(format!("path {:?}: {m}", entry.name)),
                other => other,
            })?;
        names.push(entry.name.clone());
        paths.push(path);
    }
    Ok(NamedPaths {
        dimension: spec.dimension,
        names,
        paths,
    })
}

pub fn rat_from_pair(pair: [i64; 2]) -> CliResult<BigRational> {
    if pair[1] == 0 {
        return Err(CliError::Input("zero denominator in a rational".into()));
    }
    Ok(BigRational::new(BigInt::from(pair[0]), BigInt::from(pair[1])))
}

pub fn rat_to_pair(r: &BigRational) -> CliResult<[i64; 2]> {
    let overflow = || CliError::Input("coordinate does not fit the [num, den] form".into());
    Ok([
        r.numer().to_i64().ok_or_else(overflow)?,
        r.denom().to_i64().ok_or_else(overflow)?,
    ])
}

pub fn parse_rat(s: &str) -> CliResult<BigRational> {
    let t = s.trim();
    let bad = || CliError::Input(format!("bad rational {t:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let numer = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let denom = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if denom == BigInt::from(0) {
                return Err(CliError::Input(format!("zero denominator in {t:?}")));
            }
            Ok(BigRational::new(numer, denom))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(t).map_err(|_| bad())?,
        )),
    }
}

pub fn format_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_point(p: &Point) -> String {
    let mut s = String::from("(");
    for (i, c) in p.coords.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", format_rat(c));
    }
    s.push(')');
    s
}

pub fn parse_point(s: &str, dim: usize) -> CliResult<Point> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| CliError::Input(format!("bad point {t:?} (expected (a,b))")))?;
    let coords = inner
        .split(',')
        .map(parse_rat)
        .collect::<CliResult<Vec<_>>>()?;
    if coords.len() != dim {
        return Err(CliError::Input(format!(
            "point {t:?} has {} coordinates, expected {dim}",
            coords.len()
        )));
    }
    Ok(Point::new(coords))
}

pub fn format_reduced(p: &ReducedPath) -> String {
    if p.is_trivial() {
        return format!("trivial@{}", format_point(p.start()));
    }
    p.carrier()
        .points()
        .iter()
        .map(format_point)
        .collect::<Vec<_>>()
        .join(" -> ")
}

pub fn path_breakpoints(p: &PlPath) -> CliResult<Vec<Vec<[i64; 2]>>> {
    p.points()
        .iter()
        .map(|pt| pt.coords.iter().map(rat_to_pair).collect())
        .collect()
}

pub fn path_from_breakpoints(
    bps: &[Vec<[i64; 2]>],
    dimension: Option<usize>,
) -> CliResult<PlPath> {
    if bps.is_empty() {
        return Err(CliError::Input("a path needs at least one breakpoint".into()));
    }
    let dim = dimension.unwrap_or(bps[0].len());
    let mut points = Vec::new();
    for bp in bps {
        if bp.len() != dim {
            return Err(CliError::Input(format!(
                "breakpoint has {} coordinates, expected {dim}",
                bp.len()
            )));
        }
        points.push(Point::new(
            bp.iter()
                .map(|&pair| rat_from_pair(pair))
                .collect::<CliResult<Vec<_>>>()?,
        ));
    }
    PlPath::new(points).map_err(CliError::from)
}

pub fn reduced_from_breakpoints(bps: &[Vec<[i64; 2]>]) -> CliResult<ReducedPath> {
    let p = path_from_breakpoints(bps, None)?;
    reduce(&PathWord::single(p)).map_err(CliError::from)
}

pub fn parse_element(group: &GroupDescriptor, s: &str) -> CliResult<GroupElement> {
    let t = s.trim();
    match group.kind {
        GroupKind::Cyclic(n) => {
            let k: i64 = t
                .parse()
                .map_err(|_| CliError::Input(format!("bad residue {t:?} for Z{n}")))?;
            GroupElement::cyclic(n, k).map_err(CliError::from)
        }
        GroupKind::Quaternion8 => {
            let i: u8 = t
                .parse()
                .map_err(|_| CliError::Input(format!("bad unit index {t:?} for Q8")))?;
            GroupElement::q8(i).map_err(CliError::from)
        }
        GroupKind::U1 => Ok(GroupElement::u1(t.parse().map_err(|_| {
            CliError::Input(format!("bad angle {t:?} for U1"))
        })?)),
        GroupKind::Su2 => {
            let parts = t
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Input(format!("bad SU2 component {c:?}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            if parts.len() != 4 {
                return Err(CliError::Input(format!(
                    "SU2 elements are w,x,y,z; got {t:?}"
                )));
            }
            GroupElement::su2([parts[0], parts[1], parts[2], parts[3]]).map_err(CliError::from)
        }
    }
}

pub fn format_element(e: &GroupElement) -> String {
    match e {
        GroupElement::Cyclic { k, .. } => k.to_string(),
        GroupElement::Quat8(i) => i.to_string(),
        GroupElement::U1(a) => format!("{a}"),
        GroupElement::Su2(q) => format!("{},{},{},{}", q[0], q[1], q[2], q[3]),
    }
}

pub fn parse_element_list(group: &GroupDescriptor, s: &str) -> CliResult<Vec<GroupElement>> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(';').map(|p| parse_element(group, p)).collect()
}

pub fn format_element_list(xs: &[GroupElement]) -> String {
    xs.iter()
        .map(format_element)
        .collect::<Vec<_>>()
        .join(";")
}

/// Signed 1-based edge indices, comma separated: "1,-2" means the first
/// edge forward then the second reversed.  Empty input is the empty word.
pub fn parse_word(s: &str) -> CliResult<Factorization> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Factorization { word: Vec::new() });
    }
    let mut word = Vec::new();
    for part in t.split(',') {
        let k: i64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad word letter {part:?}")))?;
        if k == 0 {
            return Err(CliError::Input(
                "word letters are signed 1-based indices".into(),
            ));
        }
        let sign = if k > 0 { Sign::Plus } else { Sign::Minus };
        word.push((k.unsigned_abs() as usize - 1, sign));
    }
    Ok(Factorization { word })
}

pub fn format_word(w: &Factorization) -> String {
    if w.word.is_empty() {
        return "(empty)".into();
    }
    w.word
        .iter()
        .map(|&(k, s)| match s {
            Sign::Plus => format!("{}", k + 1),
            Sign::Minus => format!("-{}", k + 1),
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Point assignments "(0,0):2;(1,0):5" for a gauge transform.
pub fn parse_transform(
    group: &GroupDescriptor,
    dim: usize,
    s: &str,
) -> CliResult<Vec<(Point, GroupElement)>> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in t.split(';') {
        let e = entry.trim();
        let close = e.find(')').ok_or_else(|| {
            CliError::Input(format!("bad transform entry {e:?} (expected (point):element)"))
        })?;
        let (ptxt, rest) = e.split_at(close + 1);
        let etxt = rest.strip_prefix(':').ok_or_else(|| {
            CliError::Input(format!("bad transform entry {e:?} (expected (point):element)"))
        })?;
        out.push((parse_point(ptxt, dim)?, parse_element(group, etxt)?));
    }
    Ok(out)
}

// --- words over named paths ------------------------------------------------

/// Parses "a * b^-1 * (c * d)^2" over the names in a path-set file into a
/// composable word of letters.
pub fn parse_path_word(src: &str, paths: &NamedPaths) -> CliResult<PathWord> {
    let letters = PwParser::new(src, paths)?.parse()?;
    if letters.is_empty() {
        return Err(CliError::Input("empty path word".into()));
    }
    PathWord::letters(letters).map_err(CliError::from)
}

#[derive(Debug, Clone, PartialEq)]
enum PwTok {
    Name(String),
    Int(i64),
    Star,
    Caret,
    LParen,
    RParen,
}

struct PwParser<'a> {
    toks: Vec<PwTok>,
    pos: usize,
    paths: &'a NamedPaths,
}

impl<'a> PwParser<'a> {
    fn new(src: &str, paths: &'a NamedPaths) -> CliResult<Self> {
        let mut toks = Vec::new();
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '*' => {
                    toks.push(PwTok::Star);
                    i += 1;
                }
                '^' => {
                    toks.push(PwTok::Caret);
                    i += 1;
                }
                '(' => {
                    toks.push(PwTok::LParen);
                    i += 1;
                }
                ')' => {
                    toks.push(PwTok::RParen);
                    i += 1;
                }
                '-' | '0'..='9' => {
                    let start = i;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text = &src[start..i];
                    let v: i64 = text
                        .parse()
                        .map_err(|_| CliError::Input(format!("bad exponent {text:?}")))?;
                    toks.push(PwTok::Int(v));
                }
                'a'..='z' | 'A'..='Z' | '_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    toks.push(PwTok::Name(src[start..i].to_string()));
                }
                other => {
                    return Err(CliError::Input(format!(
                        "unexpected character {other:?} in path word"
                    )))
                }
            }
        }
        Ok(Self { toks, pos: 0, paths })
    }

    fn peek(&self) -> Option<&PwTok> {
        self.toks.get(self.pos)
    }

    fn parse(mut self) -> CliResult<Vec<(PlPath, Sign)>> {
        let letters = self.word()?;
        if self.pos != self.toks.len() {
            return Err(CliError::Input("trailing input in path word".into()));
        }
        Ok(letters)
    }

    fn word(&mut self) -> CliResult<Vec<(PlPath, Sign)>> {
        let mut letters = self.factor()?;
        while self.peek() == Some(&PwTok::Star) {
            self.pos += 1;
            letters.extend(self.factor()?);
        }
        Ok(letters)
    }

    fn factor(&mut self) -> CliResult<Vec<(PlPath, Sign)>> {
        let base = self.primary()?;
        if self.peek() == Some(&PwTok::Caret) {
            self.pos += 1;
            let k = match self.peek() {
                Some(PwTok::Int(v)) => *v,
                _ => return Err(CliError::Input("expected an integer exponent after ^".into())),
            };
            self.pos += 1;
            return power(base, k);
        }
        Ok(base)
    }

    fn primary(&mut self) -> CliResult<Vec<(PlPath, Sign)>> {
        match self.peek().cloned() {
            Some(PwTok::Name(name)) => {
                self.pos += 1;
                let p = self
                    .paths
                    .lookup(&name)
                    .ok_or_else(|| CliError::Input(format!("unknown path name {name:?}")))?;
                Ok(vec![(p.clone(), Sign::Plus)])
            }
            Some(PwTok::LParen) => {
                self.pos += 1;
                let inner = self.word()?;
                if self.peek() != Some(&PwTok::RParen) {
                    return Err(CliError::Input("missing ) in path word".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(CliError::Input("expected a path name".into())),
        }
    }
}

fn power(base: Vec<(PlPath, Sign)>, k: i64) -> CliResult<Vec<(PlPath, Sign)>> {
    if k == 0 {
        return Err(CliError::Input(
            "zero exponents are not allowed in path words".into(),
        ));
    }
    let unit: Vec<(PlPath, Sign)> = if k > 0 {
        base
    } else {
        base.into_iter()
            .rev()
            .map(|(p, s)| (p, s.flip()))
            .collect()
    };
    let reps = k.unsigned_abs();
    let mut out = Vec::new();
    for _ in 0..reps {
        out.extend(unit.iter().cloned());
    }
    Ok(out)
}

// --- connection files ------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ConnectionFile {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub policy: PolicySpec,
    #[serde(default)]
    pub policy_draws: u64,
    pub support: Vec<Vec<Vec<[i64; 2]>>>,
    pub values: Vec<String>,
    #[serde(default)]
    pub modifiers: Vec<ModifierSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PolicySpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModifierSpec {
    pub edge: Vec<Vec<[i64; 2]>>,
    pub target: String,
}

pub fn load_connection(file: &Path) -> CliResult<GeneralizedConnection> {
    let spec: ConnectionFile = serde_json::from_str(&read_text(file)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let mut group = GroupDescriptor::from_tag(&spec.group)?;
    if let Some(t) = spec.tolerance {
        group = group.with_tolerance(t);
    }
    let policy = match spec.policy.kind.as_str() {
        "identity" => ExtensionPolicy::Identity,
        "haar" => ExtensionPolicy::Haar {
            seed: spec.policy.seed.unwrap_or(0),
        },
        other => {
            return Err(CliError::Input(format!(
                "unknown policy {other:?} (expected identity or haar)"
            )))
        }
    };
    let edges = spec
        .support
        .iter()
        .map(|bps| reduced_from_breakpoints(bps))
        .collect::<CliResult<Vec<_>>>()?;
    let support = Hyph::new(edges)?;
    let values = spec
        .values
        .iter()
        .map(|v| parse_element(&group, v))
        .collect::<CliResult<Vec<_>>>()?;
    let modifiers = spec
        .modifiers
        .iter()
        .map(|m| {
            Ok(Modification {
                edge: reduced_from_breakpoints(&m.edge)?,
                target: parse_element(&group, &m.target)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    GeneralizedConnection::from_parts(group, support, values, modifiers, policy, spec.policy_draws)
        .map_err(CliError::from)
}

pub fn save_connection(file: &Path, c: &GeneralizedConnection) -> CliResult<()> {
    let policy = match c.policy() {
        ExtensionPolicy::Identity => PolicySpec {
            kind: "identity".into(),
            seed: None,
        },
        ExtensionPolicy::Haar { seed } => PolicySpec {
            kind: "haar".into(),
            seed: Some(*seed),
        },
    };
    let spec = ConnectionFile {
        group: c.group().tag(),
        tolerance: Some(c.group().tolerance),
        policy,
        policy_draws: c.policy_draws(),
        support: c
            .support()
            .edges()
            .iter()
            .map(|e| path_breakpoints(e.carrier()))
            .collect::<CliResult<Vec<_>>>()?,
        values: c.values().iter().map(format_element).collect(),
        modifiers: c
            .modifiers()
            .iter()
            .map(|m| {
                Ok(ModifierSpec {
                    edge: path_breakpoints(m.edge.carrier())?,
                    target: format_element(&m.target),
                })
            })
            .collect::<CliResult<Vec<_>>>()?,
    };
    let text = serde_json::to_string_pretty(&spec)
        .map_err(|e| CliError::Input(format!("cannot serialize connection: {e}")))?;
    fs::write(file, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", file.display())))
}

// --- sparse exact value tables ---------------------------------------------

#[derive(Debug, Deserialize)]
pub struct BodyTableFile {
    pub entries: Vec<TableEntry>,
    #[serde(default)]
    pub default: Option<[[i64; 2]; 2]>,
}

#[derive(Debug, Deserialize)]
pub struct TableEntry {
    /// Element indices in enumeration order, one per support edge.
    pub config: Vec<usize>,
    /// Complex rational value as [[re_num, re_den], [im_num, im_den]].
    pub value: [[i64; 2]; 2],
}

pub fn load_table_body(
    file: &Path,
    group: &GroupDescriptor,
    support: Hyph,
) -> CliResult<CylindricalFunction> {
    if !group.is_finite() {
        return Err(CliError::Input(
            "body tables are for finite backends; give an expression instead".into(),
        ));
    }
    let spec: BodyTableFile = serde_json::from_str(&read_text(file)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let order = group.order().expect("finite backend has an order") as usize;
    let n = support.len();
    let mut table = std::collections::HashMap::new();
    for entry in &spec.entries {
        if entry.config.len() != n {
            return Err(CliError::Input(format!(
                "table entry has {} indices, expected {n}",
                entry.config.len()
            )));
        }
        if entry.config.iter().any(|&i| i >= order) {
            return Err(CliError::Input(format!(
                "table entry index out of range for a group of order {order}"
            )));
        }
        let z = CExact::new(
            rat_from_pair(entry.value[0])?,
            rat_from_pair(entry.value[1])?,
        );
        table.insert(entry.config.clone(), z);
    }
    let default = match spec.default {
        Some(pair) => CExact::new(rat_from_pair(pair[0])?, rat_from_pair(pair[1])?),
        None => CExact::new(BigRational::from_integer(BigInt::from(0)), BigRational::from_integer(BigInt::from(0))),
    };
    let g = *group;
    Ok(CylindricalFunction::exact(support, move |x| {
        let key: Vec<usize> = x
            .iter()
            .map(|e| g.index_of(e).expect("configuration matches the backend"))
            .collect();
        table.get(&key).cloned().unwrap_or_else(|| default.clone())
    }))
}

// --- result formatting -----------------------------------------------------

pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

pub fn format_c64(z: &num::complex::Complex64) -> String {
    if z.im == 0.0 {
        return format_f64(z.re);
    }
    if z.im < 0.0 {
        format!("{}-{}i", format_f64(z.re), format_f64(-z.im))
    } else {
        format!("{}+{}i", format_f64(z.re), format_f64(z.im))
    }
}

pub fn format_cexact(z: &CExact) -> String {
    use num::Zero;
    if z.im.is_zero() {
        return format_rat(&z.re);
    }
    if z.im < BigRational::zero() {
        format!("{}-{}i", format_rat(&z.re), format_rat(&(-z.im.clone())))
    } else {
        format!("{}+{}i", format_rat(&z.re), format_rat(&z.im))
    }
}

pub fn exact_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
