//! Tiny expression language for cylindrical-function bodies.
//!
//! Variables `x1..xn` name edge values in support order.  Products of
//! group values stay in the group; sums, differences, and scalar functions
//! pass group values through the natural trace first.  `tr` takes the
//! trace, `re`/`conj`/`abs2` act on complex scalars, and `chi12`/`chi1`
//! are the SU(2) characters for the half and whole spin.  Integer and
//! decimal literals are exact rationals, `i` is the imaginary unit, and
//! `^` raises to an integer power.
//!
//! The compiled body is exact whenever every configuration of a finite
//! backend evaluates to an exact complex rational, which a one-time sweep
//! over all configurations decides.

use std::sync::Arc;

use num::complex::Complex64;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use hyphal::group::{
    exact_trace, su2_character_half, su2_character_one, trace, CExact, GroupDescriptor,
    GroupElement, GroupKind,
};
use hyphal::hyph::Hyph;
use hyphal::measure::CylindricalFunction;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> CliResult<Vec<Tok>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let whole = BigInt::parse_bytes(&bytes[start..i], 10)
                    .ok_or_else(|| CliError::Input("bad number".into()))?;
                let mut value = BigRational::from_integer(whole);
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == fstart {
                        return Err(CliError::Input(
                            "digits are required after a decimal point".into(),
                        ));
                    }
                    let frac = BigInt::parse_bytes(&bytes[fstart..i], 10)
                        .ok_or_else(|| CliError::Input("bad number".into()))?;
                    let scale = BigInt::from(10).pow((i - fstart) as u32);
                    value += BigRational::new(frac, scale);
                }
                toks.push(Tok::Num(value));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push(Tok::Ident(src[start..i].to_string()));
            }
            other => {
                return Err(CliError::Input(format!(
                    "unexpected character {other:?} in expression"
                )))
            }
        }
    }
    Ok(toks)
}

#[derive(Debug)]
enum Expr {
    Num(BigRational),
    Imag,
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Tr,
    Re,
    Conj,
    Abs2,
    Chi12,
    Chi1,
}

const FUNCS: [(&str, Func); 6] = [
    ("tr", Func::Tr),
    ("re", Func::Re),
    ("conj", Func::Conj),
    ("abs2", Func::Abs2),
    ("chi12", Func::Chi12),
    ("chi1", Func::Chi1),
];

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn parse(mut self) -> CliResult<Expr> {
        let e = self.expr()?;
        if self.pos != self.toks.len() {
            return Err(CliError::Input("trailing input in expression".into()));
        }
        Ok(e)
    }

    fn expr(&mut self) -> CliResult<Expr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    e = Expr::Add(Box::new(e), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    e = Expr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> CliResult<Expr> {
        let mut e = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
        }
        Ok(e)
    }

    fn factor(&mut self) -> CliResult<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> CliResult<Expr> {
        let mut e = self.primary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let negative = if self.peek() == Some(&Tok::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            let k = match self.peek() {
                Some(Tok::Num(r)) if r.denom().is_one() => r
                    .numer()
                    .to_i64()
                    .filter(|v| v.abs() <= 1_i64 << 31)
                    .ok_or_else(|| CliError::Input("exponent out of range".into()))?,
                _ => {
                    return Err(CliError::Input(
                        "expected an integer exponent after ^".into(),
                    ))
                }
            };
            self.pos += 1;
            e = Expr::Pow(Box::new(e), if negative { -k } else { k });
        }
        Ok(e)
    }

    fn primary(&mut self) -> CliResult<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Expr::Num(r))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(CliError::Input("missing ) in expression".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "i" {
                    return Ok(Expr::Imag);
                }
                if let Some(&(_, f)) = FUNCS.iter().find(|(n, _)| *n == name) {
                    if self.peek() != Some(&Tok::LParen) {
                        return Err(CliError::Input(format!("expected ( after {name}")));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    if self.peek() != Some(&Tok::RParen) {
                        return Err(CliError::Input("missing ) in expression".into()));
                    }
                    self.pos += 1;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if let Some(rest) = name.strip_prefix('x') {
                    if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                        let k: usize = rest
                            .parse()
                            .map_err(|_| CliError::Input(format!("bad variable {name:?}")))?;
                        if k == 0 {
                            return Err(CliError::Input("variables start at x1".into()));
                        }
                        return Ok(Expr::Var(k - 1));
                    }
                }
                Err(CliError::Input(format!("unknown name {name:?}")))
            }
            _ => Err(CliError::Input("expected a value".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Group,
    Scalar,
}

fn kind_of(e: &Expr, group: &GroupDescriptor, nvars: usize) -> CliResult<Kind> {
    Ok(match e {
        Expr::Num(_) | Expr::Imag => Kind::Scalar,
        Expr::Var(k) => {
            if *k >= nvars {
                return Err(CliError::Input(format!(
                    "variable x{} exceeds the {} support edges",
                    k + 1,
                    nvars
                )));
            }
            Kind::Group
        }
        Expr::Neg(a) => {
            kind_of(a, group, nvars)?;
            Kind::Scalar
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            kind_of(a, group, nvars)?;
            kind_of(b, group, nvars)?;
            Kind::Scalar
        }
        Expr::Mul(a, b) => {
            let ka = kind_of(a, group, nvars)?;
            let kb = kind_of(b, group, nvars)?;
            if ka == Kind::Group && kb == Kind::Group {
                Kind::Group
            } else {
                Kind::Scalar
            }
        }
        Expr::Pow(a, _) => kind_of(a, group, nvars)?,
        Expr::Call(f, a) => {
            let ka = kind_of(a, group, nvars)?;
            match f {
                Func::Tr => {
                    if ka != Kind::Group {
                        return Err(CliError::Input(
                            "tr expects a group-valued argument".into(),
                        ));
                    }
                }
                Func::Chi12 | Func::Chi1 => {
                    if ka != Kind::Group {
                        return Err(CliError::Input(
                            "characters expect a group-valued argument".into(),
                        ));
                    }
                    if group.kind != GroupKind::Su2 {
                        return Err(CliError::Input(
                            "chi12 and chi1 are defined on the SU2 backend".into(),
                        ));
                    }
                }
                Func::Re | Func::Conj | Func::Abs2 => {}
            }
            Kind::Scalar
        }
    })
}

#[derive(Clone)]
enum CVal {
    Exact(CExact),
    Float(Complex64),
}

fn c64(z: &CExact) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

impl CVal {
    fn one() -> CVal {
        CVal::Exact(CExact::new(BigRational::one(), BigRational::zero()))
    }

    fn complex(&self) -> Complex64 {
        match self {
            CVal::Exact(z) => c64(z),
            CVal::Float(z) => *z,
        }
    }

    fn add(&self, o: &CVal) -> CVal {
        match (self, o) {
            (CVal::Exact(a), CVal::Exact(b)) => CVal::Exact(a.clone() + b.clone()),
            _ => CVal::Float(self.complex() + o.complex()),
        }
    }

    fn sub(&self, o: &CVal) -> CVal {
        match (self, o) {
            (CVal::Exact(a), CVal::Exact(b)) => CVal::Exact(a.clone() - b.clone()),
            _ => CVal::Float(self.complex() - o.complex()),
        }
    }

    fn mul(&self, o: &CVal) -> CVal {
        match (self, o) {
            (CVal::Exact(a), CVal::Exact(b)) => CVal::Exact(a.clone() * b.clone()),
            _ => CVal::Float(self.complex() * o.complex()),
        }
    }

    fn neg(&self) -> CVal {
        match self {
            CVal::Exact(z) => CVal::Exact(-z.clone()),
            CVal::Float(z) => CVal::Float(-z),
        }
    }

    fn conj(&self) -> CVal {
        match self {
            CVal::Exact(z) => CVal::Exact(z.conj()),
            CVal::Float(z) => CVal::Float(z.conj()),
        }
    }

    fn re(&self) -> CVal {
        match self {
            CVal::Exact(z) => CVal::Exact(CExact::new(z.re.clone(), BigRational::zero())),
            CVal::Float(z) => CVal::Float(Complex64::new(z.re, 0.0)),
        }
    }

    fn abs2(&self) -> CVal {
        self.mul(&self.conj()).re()
    }

    fn invert(&self) -> CVal {
        match self {
            CVal::Exact(z) => {
                let n = &z.re * &z.re + &z.im * &z.im;
                if n.is_zero() {
                    CVal::Float(Complex64::new(f64::NAN, f64::NAN))
                } else {
                    CVal::Exact(CExact::new(&z.re / &n, -(&z.im / &n)))
                }
            }
            CVal::Float(z) => CVal::Float(Complex64::new(1.0, 0.0) / z),
        }
    }

    fn pow(&self, k: i64) -> CVal {
        if k < 0 {
            return self.invert().pow(-k);
        }
        let mut acc = CVal::one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

enum EvalValue {
    Group(GroupElement),
    Scalar(CVal),
}

fn trace_cval(g: &GroupElement) -> CVal {
    match exact_trace(g) {
        Some(z) => CVal::Exact(z),
        None => CVal::Float(trace(g)),
    }
}

fn scalarize(v: EvalValue) -> CVal {
    match v {
        EvalValue::Group(g) => trace_cval(&g),
        EvalValue::Scalar(s) => s,
    }
}

fn group_pow(group: &GroupDescriptor, g: &GroupElement, k: i64) -> GroupElement {
    if k < 0 {
        return group_pow(group, &g.inv(), -k);
    }
    let mut acc = group.identity();
    let mut base = g.clone();
    let mut k = k as u64;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&base).expect("same backend");
        }
        base = base.mul(&base).expect("same backend");
        k >>= 1;
    }
    acc
}

fn eval(e: &Expr, group: &GroupDescriptor, x: &[GroupElement]) -> EvalValue {
    match e {
        Expr::Num(r) => EvalValue::Scalar(CVal::Exact(CExact::new(r.clone(), BigRational::zero()))),
        Expr::Imag => EvalValue::Scalar(CVal::Exact(CExact::new(
            BigRational::zero(),
            BigRational::one(),
        ))),
        Expr::Var(k) => EvalValue::Group(x[*k].clone()),
        Expr::Neg(a) => EvalValue::Scalar(scalarize(eval(a, group, x)).neg()),
        Expr::Add(a, b) => EvalValue::Scalar(
            scalarize(eval(a, group, x)).add(&scalarize(eval(b, group, x))),
        ),
        Expr::Sub(a, b) => EvalValue::Scalar(
            scalarize(eval(a, group, x)).sub(&scalarize(eval(b, group, x))),
        ),
        Expr::Mul(a, b) => match (eval(a, group, x), eval(b, group, x)) {
            (EvalValue::Group(g), EvalValue::Group(h)) => {
                EvalValue::Group(g.mul(&h).expect("same backend"))
            }
            (va, vb) => EvalValue::Scalar(scalarize(va).mul(&scalarize(vb))),
        },
        Expr::Pow(a, k) => match eval(a, group, x) {
            EvalValue::Group(g) => EvalValue::Group(group_pow(group, &g, *k)),
            EvalValue::Scalar(v) => EvalValue::Scalar(v.pow(*k)),
        },
        Expr::Call(f, a) => {
            let v = eval(a, group, x);
            EvalValue::Scalar(match f {
                Func::Tr => scalarize(v),
                Func::Re => scalarize(v).re(),
                Func::Conj => scalarize(v).conj(),
                Func::Abs2 => scalarize(v).abs2(),
                Func::Chi12 => match v {
                    EvalValue::Group(g) => CVal::Float(Complex64::new(
                        su2_character_half(&g).expect("validated SU2"),
                        0.0,
                    )),
                    EvalValue::Scalar(_) => unreachable!("characters take group arguments"),
                },
                Func::Chi1 => match v {
                    EvalValue::Group(g) => CVal::Float(Complex64::new(
                        su2_character_one(&g).expect("validated SU2"),
                        0.0,
                    )),
                    EvalValue::Scalar(_) => unreachable!("characters take group arguments"),
                },
            })
        }
    }
}

/// Compiles a body over the given support.  Finite backends get an exact
/// body when a sweep over every configuration stays rational.
pub fn compile_body(
    src: &str,
    group: &GroupDescriptor,
    support: Hyph,
) -> CliResult<CylindricalFunction> {
    let ast = Parser {
        toks: lex(src)?,
        pos: 0,
    }
    .parse()?;
    kind_of(&ast, group, support.len())?;
    let ast = Arc::new(ast);
    let g = *group;
    if group.is_finite() && sweep_is_exact(&ast, group, support.len())? {
        let a = ast.clone();
        Ok(CylindricalFunction::exact(support, move |x| {
            match scalarize(eval(&a, &g, x)) {
                CVal::Exact(z) => z,
                CVal::Float(_) => unreachable!("exactness was established by a full sweep"),
            }
        }))
    } else {
        Ok(CylindricalFunction::float(support, move |x| {
            scalarize(eval(&ast, &g, x)).complex()
        }))
    }
}

fn sweep_is_exact(ast: &Expr, group: &GroupDescriptor, n: usize) -> CliResult<bool> {
    let elements = group.enumerate()?;
    let order = elements.len() as u128;
    let total = match order.checked_pow(n as u32) {
        Some(t) if t <= 1 << 20 => t,
        _ => return Ok(false),
    };
    let mut config = Vec::with_capacity(n);
    for flat in 0..total {
        config.clear();
        let mut rem = flat;
        for _ in 0..n {
            config.push(elements[(rem % order) as usize].clone());
            rem /= order;
        }
        if let CVal::Float(_) = scalarize(eval(ast, group, &config)) {
            return Ok(false);
        }
    }
    Ok(true)
}
