//! Plane maps: evaluable expression trees over the complex plane, a text
//! parser for scene files, and orientation classification via the local
//! degree `degree(f_p)`.
//!
//! Two text forms are accepted and may be mixed only where noted:
//! combinator form (`compose(poly[1,0,2], conj)`, coefficients ascending)
//! and infix form in the variable `z` (`z^2 + 1`, `-conj(z) - 0.4i`,
//! `fold(z)`). Infix expressions must be polynomial in either `z` or a
//! single conjugated/folded subexpression; genuinely mixed expressions like
//! `z + conj(z)` are rejected at parse time.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::OrientedClosedCurve;
use crate::error::{Error, Result};
use crate::geom::{Point, Window};

/// Expression tree of a plane map.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Polynomial with ascending complex coefficients: `c0 + c1 z + …`.
    Poly(Vec<Complex64>),
    /// `z ↦ a·z + b`.
    Affine { a: Complex64, b: Complex64 },
    /// Complex conjugation.
    Conj,
    /// The fold `x + iy ↦ |x| + iy`: identity on the right half-plane,
    /// reflection on the left.
    Fold,
    /// `z ↦ z + b`.
    Translate(Complex64),
    /// `z ↦ z^n`.
    Power(u32),
    /// `Compose(f, g)` is `f ∘ g`.
    Compose(Box<Expr>, Box<Expr>),
}

/// An evaluable plane map with an optional declared window and Lipschitz
/// bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneMap {
    expr: Expr,
    window: Option<Window>,
    lip: Option<f64>,
}

pub fn c(p: Point) -> Complex64 {
    Complex64::new(p.x, p.y)
}

pub fn pt(z: Complex64) -> Point {
    Point::new(z.re, z.im)
}

fn eval_expr(e: &Expr, z: Complex64) -> Complex64 {
    match e {
        Expr::Poly(coeffs) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for &ck in coeffs.iter().rev() {
                acc = acc * z + ck;
            }
            acc
        }
        Expr::Affine { a, b } => a * z + b,
        Expr::Conj => z.conj(),
        Expr::Fold => Complex64::new(z.re.abs(), z.im),
        Expr::Translate(b) => z + b,
        Expr::Power(n) => z.powu(*n),
        Expr::Compose(f, g) => eval_expr(f, eval_expr(g, z)),
    }
}

/// Upper bound for `|e(z)|` over `|z| <= r`.
fn sup_bound(e: &Expr, r: f64) -> f64 {
    match e {
        Expr::Poly(coeffs) => {
            coeffs.iter().enumerate().map(|(k, ck)| ck.norm() * r.powi(k as i32)).sum()
        }
        Expr::Affine { a, b } => a.norm() * r + b.norm(),
        Expr::Conj | Expr::Fold => r,
        Expr::Translate(b) => r + b.norm(),
        Expr::Power(n) => r.powi(*n as i32),
        Expr::Compose(f, g) => sup_bound(f, sup_bound(g, r)),
    }
}

/// Lipschitz bound for `e` over `|z| <= r`.
fn lip_bound(e: &Expr, r: f64) -> f64 {
    match e {
        Expr::Poly(coeffs) => coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, ck)| k as f64 * ck.norm() * r.powi(k as i32 - 1))
            .sum(),
        Expr::Affine { a, .. } => a.norm(),
        Expr::Conj | Expr::Fold | Expr::Translate(_) => 1.0,
        Expr::Power(n) => *n as f64 * r.powi(*n as i32 - 1),
        Expr::Compose(f, g) => lip_bound(f, sup_bound(g, r)) * lip_bound(g, r),
    }
}

impl PlaneMap {
    pub fn new(expr: Expr) -> Self {
        PlaneMap { expr, window: None, lip: None }
    }

    pub fn poly(coeffs: Vec<Complex64>) -> Self {
        Self::new(Expr::Poly(coeffs))
    }

    /// Real-coefficient polynomial convenience constructor.
    pub fn poly_re(coeffs: &[f64]) -> Self {
        Self::poly(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn affine(a: Complex64, b: Complex64) -> Self {
        Self::new(Expr::Affine { a, b })
    }

    pub fn conj() -> Self {
        Self::new(Expr::Conj)
    }

    pub fn fold() -> Self {
        Self::new(Expr::Fold)
    }

    pub fn translate(b: Complex64) -> Self {
        Self::new(Expr::Translate(b))
    }

    pub fn constant(v: Complex64) -> Self {
        Self::poly(vec![v])
    }

    pub fn compose(f: PlaneMap, g: PlaneMap) -> Self {
        Self::new(Expr::Compose(Box::new(f.expr), Box::new(g.expr)))
    }

    /// `f ∘ f`.
    pub fn squared(&self) -> Self {
        Self::new(Expr::Compose(Box::new(self.expr.clone()), Box::new(self.expr.clone())))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Restrict evaluation to a window.
    pub fn with_window(mut self, window: Window) -> Self {
        self.window = Some(window);
        self
    }

    /// Declare a Lipschitz bound; validated against >= 10^3 random sample
    /// pairs in `window`.
    pub fn with_lipschitz(mut self, lip: f64, window: Window) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4c69_7073);
        let sample = |rng: &mut ChaCha8Rng| {
            Point::new(rng.gen_range(window.x0..window.x1), rng.gen_range(window.y0..window.y1))
        };
        for _ in 0..1200 {
            let p = sample(&mut rng);
            let q = sample(&mut rng);
            let d = p.dist(q);
            if d < 1e-9 {
                continue;
            }
            let ratio = self.eval_pt(p).dist(self.eval_pt(q)) / d;
            if ratio > lip * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::HypothesisViolation(format!(
                    "declared Lipschitz bound {lip} violated: sampled ratio {ratio}"
                )));
            }
        }
        self.lip = Some(lip);
        self.window = Some(window);
        Ok(self)
    }

    /// Evaluate, enforcing the declared window if any.
    pub fn evaluate(&self, p: Point) -> Result<Point> {
        if let Some(w) = self.window {
            if !w.contains(p) {
                return Err(Error::OutsideWindow(p));
            }
        }
        Ok(self.eval_pt(p))
    }

    /// Evaluate without the window check (internal plumbing).
    pub fn eval_pt(&self, p: Point) -> Point {
        pt(eval_expr(&self.expr, c(p)))
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        eval_expr(&self.expr, z)
    }

    /// A Lipschitz bound valid on `|z| <= r`: the declared bound when
    /// present, otherwise one derived from the expression tree.
    pub fn lipschitz_on(&self, r: f64) -> f64 {
        self.lip.unwrap_or_else(|| lip_bound(&self.expr, r))
    }

    /// Upper bound for `|f|` on `|z| <= r`, from the expression tree.
    pub fn sup_on(&self, r: f64) -> f64 {
        sup_bound(&self.expr, r)
    }

    /// Parse a map from its text form.
    pub fn parse(text: &str) -> Result<Self> {
        parse_map(text)
    }
}

/// Degree of the point map `f_p(x) = (f(x) - f(p)) / |f(x) - f(p)|` along
/// `s`: the winding number of `f ∘ s` about `f(p)`.
///
/// Errors with [`Error::ValueHit`] when `|f(x) - f(p)|` drops to the
/// coincidence threshold somewhere on `s`.
pub fn degree_at(f: &PlaneMap, s: &OrientedClosedCurve, p: Point) -> Result<i32> {
    use crate::winding::{lift_path, turns_to_integer, LiftFailure};
    let fp = f.eval_pt(p);
    let g = |t: f64| f.eval_pt(s.point_at(t)) - fp;
    match lift_path(&g, 2048) {
        Ok(turns) => turns_to_integer(turns),
        Err(LiftFailure::NearZero { min, .. }) => Err(Error::ValueHit { value: fp, min }),
        Err(LiftFailure::Depth { depth, worst }) => {
            Err(Error::CertificationFailed { depth: depth as u32, worst })
        }
    }
}

/// Evidence classes for orientation sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationClass {
    Positive,
    Negative,
    Mixed,
    Inconclusive,
}

/// Tally of signed-degree trials.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationReport {
    pub positive: usize,
    pub negative: usize,
    pub inconclusive: usize,
    pub class: OrientationClass,
}

/// Sample random circles and interior points; report the sign profile of
/// `degree(f_p)`. Trials whose precondition fails are skipped and counted
/// as inconclusive.
pub fn orientation_class(
    f: &PlaneMap,
    trials: usize,
    window: Window,
    seed: u64,
) -> OrientationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report =
        OrientationReport { positive: 0, negative: 0, inconclusive: 0, class: OrientationClass::Inconclusive };
    let ext = window.extent();
    let mut done = 0;
    let mut attempts = 0;
    while done < trials && attempts < trials * 20 {
        attempts += 1;
        let radius = rng.gen_range(0.05..0.25) * ext;
        let cx = rng.gen_range(window.x0 + radius..window.x1 - radius);
        let cy = rng.gen_range(window.y0 + radius..window.y1 - radius);
        let center = Point::new(cx, cy);
        let Ok(s) = OrientedClosedCurve::circle(center, radius, 64) else {
            continue;
        };
        let off = Point::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)) * radius;
        let p = center + off;
        done += 1;
        match degree_at(f, &s, p) {
            Ok(d) if d > 0 => report.positive += 1,
            Ok(d) if d < 0 => report.negative += 1,
            _ => report.inconclusive += 1,
        }
    }
    report.class = match (report.positive, report.negative) {
        (0, 0) => OrientationClass::Inconclusive,
        (_, 0) => OrientationClass::Positive,
        (0, _) => OrientationClass::Negative,
        _ => OrientationClass::Mixed,
    };
    report
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || (ch == '.' && i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_digit()) {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &text[start..i];
            let v = s.parse::<f64>().map_err(|_| Error::MapParse {
                at: start,
                reason: format!("bad number literal `{s}`"),
            })?;
            toks.push((start, Tok::Num(v)));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            toks.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()[],".contains(ch) {
            toks.push((i, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(Error::MapParse { at: i, reason: format!("unexpected character `{ch}`") });
        }
    }
    Ok(toks)
}

/// Infix syntax tree prior to lowering.
#[derive(Debug, Clone)]
enum Ast {
    Const(Complex64),
    Z,
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
    Neg(Box<Ast>),
    /// `conj(expr)` or `fold(expr)`.
    Wrap(Expr, Box<Ast>),
    /// A combinator-form map literal used as a whole.
    MapLit(Expr),
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(a, _)| *a)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, sym: char) -> Result<()> {
        match self.bump() {
            Some(Tok::Sym(s)) if s == sym => Ok(()),
            _ => Err(Error::MapParse {
                at: self.toks.get(self.pos - 1).map_or(self.len, |(a, _)| *a),
                reason: format!("expected `{sym}`"),
            }),
        }
    }

    fn err<T>(&self, reason: &str) -> Result<T> {
        Err(Error::MapParse { at: self.at(), reason: reason.to_string() })
    }

    fn parse_expr(&mut self) -> Result<Ast> {
        let mut lhs = self.parse_term()?;
        while let Some(Tok::Sym(s @ ('+' | '-'))) = self.peek() {
            let s = *s;
            self.bump();
            let rhs = self.parse_term()?;
            lhs = if s == '+' {
                Ast::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Ast::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Ast> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Sym('/')) => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    lhs = Ast::Div(Box::new(lhs), Box::new(rhs));
                }
                // Implicit multiplication: `2z`, `0.4i`, `3(z+1)`.
                Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::Sym('(')) => {
                    let rhs = self.parse_unary()?;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Ast> {
        if let Some(Tok::Sym('-')) = self.peek() {
            self.bump();
            let inner = self.parse_unary()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> Result<Ast> {
        let mut base = self.parse_primary()?;
        while let Some(Tok::Sym('^')) = self.peek() {
            self.bump();
            let at = self.at();
            match self.bump() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => {
                    base = Ast::Pow(Box::new(base), v as u32);
                }
                _ => {
                    return Err(Error::MapParse {
                        at,
                        reason: "exponent must be a nonnegative integer".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn parse_primary(&mut self) -> Result<Ast> {
        let at = self.at();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Ast::Const(Complex64::new(v, 0.0))),
            Some(Tok::Sym('(')) => {
                let inner = self.parse_expr()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "z" => Ok(Ast::Z),
                "i" => Ok(Ast::Const(Complex64::new(0.0, 1.0))),
                "conj" | "fold" => {
                    let wrapped = if name == "conj" { Expr::Conj } else { Expr::Fold };
                    if let Some(Tok::Sym('(')) = self.peek() {
                        self.bump();
                        let inner = self.parse_expr()?;
                        self.expect_sym(')')?;
                        Ok(Ast::Wrap(wrapped, Box::new(inner)))
                    } else {
                        // Bare combinator, e.g. the `conj` in compose(…, conj).
                        Ok(Ast::MapLit(wrapped))
                    }
                }
                "poly" => {
                    self.expect_sym('[')?;
                    let mut coeffs = Vec::new();
                    loop {
                        let e = self.parse_expr()?;
                        coeffs.push(self.const_value(e, at)?);
                        match self.bump() {
                            Some(Tok::Sym(',')) => continue,
                            Some(Tok::Sym(']')) => break,
                            _ => return self.err("expected `,` or `]` in poly[...]"),
                        }
                    }
                    Ok(Ast::MapLit(Expr::Poly(coeffs)))
                }
                "affine" => {
                    self.expect_sym('(')?;
                    let a = self.parse_expr()?;
                    let a = self.const_value(a, at)?;
                    self.expect_sym(',')?;
                    let b = self.parse_expr()?;
                    let b = self.const_value(b, at)?;
                    self.expect_sym(')')?;
                    Ok(Ast::MapLit(Expr::Affine { a, b }))
                }
                "translate" => {
                    self.expect_sym('(')?;
                    let b = self.parse_expr()?;
                    let b = self.const_value(b, at)?;
                    self.expect_sym(')')?;
                    Ok(Ast::MapLit(Expr::Translate(b)))
                }
                "power" => {
                    self.expect_sym('(')?;
                    match self.bump() {
                        Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 => {
                            self.expect_sym(')')?;
                            Ok(Ast::MapLit(Expr::Power(v as u32)))
                        }
                        _ => self.err("power(n) takes a nonnegative integer"),
                    }
                }
                "compose" => {
                    self.expect_sym('(')?;
                    let f = self.parse_expr()?;
                    let f = ast_to_expr(f, at)?;
                    self.expect_sym(',')?;
                    let g = self.parse_expr()?;
                    let g = ast_to_expr(g, at)?;
                    self.expect_sym(')')?;
                    Ok(Ast::MapLit(Expr::Compose(Box::new(f), Box::new(g))))
                }
                other => Err(Error::MapParse {
                    at,
                    reason: format!("unknown name `{other}`"),
                }),
            },
            Some(Tok::Sym(s)) => {
                Err(Error::MapParse { at, reason: format!("unexpected `{s}`") })
            }
            None => Err(Error::MapParse { at, reason: "unexpected end of input".into() }),
        }
    }

    /// Evaluate an AST that must not mention `z`.
    fn const_value(&self, ast: Ast, at: usize) -> Result<Complex64> {
        let mp = lower(ast, at)?;
        if mp.coeffs.len() <= 1 && matches!(mp.atom, Atom::Z) {
            Ok(mp.coeffs.first().copied().unwrap_or(Complex64::new(0.0, 0.0)))
        } else {
            Err(Error::MapParse { at, reason: "expected a constant expression".into() })
        }
    }
}

/// What an infix polynomial is a polynomial *in*.
#[derive(Debug, Clone, PartialEq)]
enum Atom {
    Z,
    Wrapped(Expr),
}

/// Polynomial over an atom: `sum coeffs[k] * atom^k`.
#[derive(Debug, Clone)]
struct MiniPoly {
    atom: Atom,
    coeffs: Vec<Complex64>,
}

impl MiniPoly {
    fn constant(v: Complex64) -> Self {
        MiniPoly { atom: Atom::Z, coeffs: vec![v] }
    }

    fn is_const(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.norm() == 0.0)
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            self.coeffs.pop();
        }
        self
    }
}

fn unify(a: MiniPoly, b: MiniPoly, at: usize) -> Result<(MiniPoly, MiniPoly)> {
    let a = a.trimmed();
    let b = b.trimmed();
    match (&a.atom, &b.atom) {
        _ if a.atom == b.atom => Ok((a, b)),
        _ if a.is_const() => {
            let atom = b.atom.clone();
            Ok((MiniPoly { atom, coeffs: a.coeffs }, b))
        }
        _ if b.is_const() => {
            let atom = a.atom.clone();
            Ok((a, MiniPoly { atom, coeffs: b.coeffs }))
        }
        _ => Err(Error::MapParse {
            at,
            reason: "cannot mix analytic and conjugated/folded parts in one expression".into(),
        }),
    }
}

fn poly_add(a: &[Complex64], b: &[Complex64], sub: bool) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).copied().unwrap_or_default();
            let y = b.get(k).copied().unwrap_or_default();
            if sub {
                x - y
            } else {
                x + y
            }
        })
        .collect()
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn lower(ast: Ast, at: usize) -> Result<MiniPoly> {
    match ast {
        Ast::Const(v) => Ok(MiniPoly::constant(v)),
        Ast::Z => Ok(MiniPoly { atom: Atom::Z, coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] }),
        Ast::Add(a, b) => {
            let (a, b) = unify(lower(*a, at)?, lower(*b, at)?, at)?;
            Ok(MiniPoly { atom: a.atom.clone(), coeffs: poly_add(&a.coeffs, &b.coeffs, false) })
        }
        Ast::Sub(a, b) => {
            let (a, b) = unify(lower(*a, at)?, lower(*b, at)?, at)?;
            Ok(MiniPoly { atom: a.atom.clone(), coeffs: poly_add(&a.coeffs, &b.coeffs, true) })
        }
        Ast::Mul(a, b) => {
            let (a, b) = unify(lower(*a, at)?, lower(*b, at)?, at)?;
            Ok(MiniPoly { atom: a.atom.clone(), coeffs: poly_mul(&a.coeffs, &b.coeffs) })
        }
        Ast::Div(a, b) => {
            let b = lower(*b, at)?.trimmed();
            if !b.is_const() {
                return Err(Error::MapParse {
                    at,
                    reason: "division is only supported by a constant".into(),
                });
            }
            let d = b.coeffs[0];
            if d.norm() == 0.0 {
                return Err(Error::MapParse { at, reason: "division by zero".into() });
            }
            let a = lower(*a, at)?;
            Ok(MiniPoly { atom: a.atom, coeffs: a.coeffs.into_iter().map(|c| c / d).collect() })
        }
        Ast::Pow(b, n) => {
            let b = lower(*b, at)?;
            let mut acc = MiniPoly { atom: b.atom.clone(), coeffs: vec![Complex64::new(1.0, 0.0)] };
            for _ in 0..n {
                acc = MiniPoly { atom: acc.atom.clone(), coeffs: poly_mul(&acc.coeffs, &b.coeffs) };
            }
            Ok(acc)
        }
        Ast::Neg(a) => {
            let a = lower(*a, at)?;
            Ok(MiniPoly { atom: a.atom, coeffs: a.coeffs.into_iter().map(|c| -c).collect() })
        }
        Ast::Wrap(wrapper, inner) => {
            let inner_expr = expr_of(lower(*inner, at)?);
            let atom = Expr::Compose(Box::new(wrapper), Box::new(inner_expr));
            Ok(MiniPoly {
                atom: Atom::Wrapped(atom),
                coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            })
        }
        Ast::MapLit(_) => Err(Error::MapParse {
            at,
            reason: "combinator form cannot be mixed into arithmetic; apply it via compose"
                .into(),
        }),
    }
}

fn expr_of(mp: MiniPoly) -> Expr {
    let mp = mp.trimmed();
    let poly = Expr::Poly(mp.coeffs);
    match mp.atom {
        Atom::Z => poly,
        Atom::Wrapped(e) => {
            // `poly` in the wrapped value; identity polynomial collapses.
            if let Expr::Poly(ref cs) = poly {
                if cs.len() == 2
                    && cs[0].norm() == 0.0
                    && (cs[1] - Complex64::new(1.0, 0.0)).norm() == 0.0
                {
                    return e;
                }
            }
            Expr::Compose(Box::new(poly), Box::new(e))
        }
    }
}

fn ast_to_expr(ast: Ast, at: usize) -> Result<Expr> {
    match ast {
        Ast::MapLit(e) => Ok(e),
        other => Ok(expr_of(lower(other, at)?)),
    }
}

fn parse_map(text: &str) -> Result<PlaneMap> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::MapParse { at: 0, reason: "empty map expression".into() });
    }
    let mut parser = Parser { toks: &toks, pos: 0, len: text.len() };
    let ast = parser.parse_expr()?;
    if parser.pos != toks.len() {
        return Err(Error::MapParse {
            at: parser.at(),
            reason: "trailing input after expression".into(),
        });
    }
    Ok(PlaneMap::new(ast_to_expr(ast, 0)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        // z^2 + 1 at i -> 0
        let f = PlaneMap::poly_re(&[1.0, 0.0, 1.0]);
        assert!(f.eval_c(z(0.0, 1.0)).norm() < 1e-15);
        // conj at (1, 2) -> (1, -2)
        assert_eq!(PlaneMap::conj().eval_pt(Point::new(1.0, 2.0)), Point::new(1.0, -2.0));
        // (z^2) ∘ (z + 1) at 1 -> 4
        let g = PlaneMap::compose(PlaneMap::poly_re(&[0.0, 0.0, 1.0]), PlaneMap::translate(z(1.0, 0.0)));
        assert!((g.eval_c(z(1.0, 0.0)) - z(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn window_is_enforced() {
        let w = Window::new(-1.0, -1.0, 1.0, 1.0);
        let f = PlaneMap::conj().with_window(w);
        assert!(f.evaluate(Point::new(0.5, 0.5)).is_ok());
        assert!(matches!(f.evaluate(Point::new(2.0, 0.0)), Err(Error::OutsideWindow(_))));
    }

    #[test]
    fn parse_infix_forms() {
        let cases: Vec<(&str, Complex64, Complex64)> = vec![
            ("z+5", z(1.0, 1.0), z(6.0, 1.0)),
            ("2z", z(1.0, -2.0), z(2.0, -4.0)),
            ("z^2", z(0.0, 1.0), z(-1.0, 0.0)),
            ("z^3 + 0.2z", z(1.0, 0.0), z(1.2, 0.0)),
            ("-conj(z) - 0.4i", z(1.0, 1.0), z(-1.0, 0.6)),
            ("conj(z)/2", z(1.0, 1.0), z(0.5, -0.5)),
            ("conj(z^2)", z(1.0, 1.0), z(0.0, -2.0)),
            ("fold(z)", z(-2.0, 3.0), z(2.0, 3.0)),
            ("(z+1)(z-1)", z(2.0, 0.0), z(3.0, 0.0)),
            ("3", z(5.0, 5.0), z(3.0, 0.0)),
        ];
        for (text, at, want) in cases {
            let f = PlaneMap::parse(text).unwrap_or_else(|e| panic!("parse `{text}`: {e}"));
            let got = f.eval_c(at);
            assert!((got - want).norm() < 1e-12, "`{text}` at {at} -> {got}, want {want}");
        }
    }

    #[test]
    fn parse_combinator_forms() {
        // compose(poly[1,0,2], conj) = 2*conj(z)^2 + 1
        let f = PlaneMap::parse("compose(poly[1,0,2], conj)").unwrap();
        let at = z(1.0, 1.0);
        let w = at.conj();
        assert!((f.eval_c(at) - (2.0 * w * w + 1.0)).norm() < 1e-12);
        let g = PlaneMap::parse("affine(2, 1+i)").unwrap();
        assert!((g.eval_c(z(1.0, 0.0)) - z(3.0, 1.0)).norm() < 1e-12);
        let h = PlaneMap::parse("compose(power(2), translate(1))").unwrap();
        assert!((h.eval_c(z(1.0, 0.0)) - z(4.0, 0.0)).norm() < 1e-12);
        // Infix inside compose works too.
        let k = PlaneMap::parse("compose(z^2, z+1)").unwrap();
        assert!((k.eval_c(z(1.0, 0.0)) - z(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn parse_rejects_mixed_and_garbage() {
        for bad in ["z + conj(z)", "z/(z+1)", "frobnicate(z)", "z^-1", "poly[1,", "@", ""] {
            let r = PlaneMap::parse(bad);
            assert!(
                matches!(r, Err(Error::MapParse { .. })),
                "`{bad}` should fail to parse, got {r:?}"
            );
        }
    }

    #[test]
    fn parse_error_carries_position() {
        let Err(Error::MapParse { at, .. }) = PlaneMap::parse("z + frobnicate(z)") else {
            panic!("expected parse error");
        };
        assert_eq!(at, 4);
    }

    #[test]
    fn lipschitz_declaration_is_validated() {
        let w = Window::new(-2.0, -2.0, 2.0, 2.0);
        // |d/dz z^2| <= 2|z| <= 4*sqrt(2) on the window.
        let ok = PlaneMap::poly_re(&[0.0, 0.0, 1.0]).with_lipschitz(6.0, w);
        assert!(ok.is_ok());
        let bad = PlaneMap::poly_re(&[0.0, 0.0, 1.0]).with_lipschitz(0.5, w);
        assert!(matches!(bad, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn degree_counts_preimages_with_sign() {
        let circle = OrientedClosedCurve::circle(Point::new(0.0, 0.0), 1.0, 128).unwrap();
        let p = Point::new(0.3, 0.1);
        // Analytic squaring: preimages of f(p) inside the disk are ±p.
        let sq = PlaneMap::parse("z^2").unwrap();
        assert_eq!(degree_at(&sq, &circle, p).unwrap(), 2);
        // Conjugation reverses orientation.
        assert_eq!(degree_at(&PlaneMap::conj(), &circle, p).unwrap(), -1);
        // Translation is a homeomorphism.
        let tr = PlaneMap::parse("z+5").unwrap();
        assert_eq!(degree_at(&tr, &circle, p).unwrap(), 1);
    }

    #[test]
    fn degree_rejects_value_hits() {
        let circle = OrientedClosedCurve::circle(Point::new(0.0, 0.0), 1.0, 128).unwrap();
        let sq = PlaneMap::parse("z^2").unwrap();
        // f(±1) = 1 = f(p) for p = 1, so f_p is undefined somewhere on the curve.
        let r = degree_at(&sq, &circle, Point::new(1.0, 0.0));
        assert!(matches!(r, Err(Error::ValueHit { .. })), "got {r:?}");
    }

    #[test]
    fn orientation_classes_of_reference_maps() {
        let w = Window::new(-2.0, -2.0, 2.0, 2.0);
        let pos = orientation_class(&PlaneMap::parse("z^3 + 0.2z").unwrap(), 20, w, 7);
        assert_eq!(pos.class, OrientationClass::Positive, "{pos:?}");
        assert!(pos.positive > 0 && pos.negative == 0);
        let neg = orientation_class(&PlaneMap::parse("conj(z^2)").unwrap(), 20, w, 7);
        assert_eq!(neg.class, OrientationClass::Negative, "{neg:?}");
        let mixed = orientation_class(&PlaneMap::fold(), 20, w, 7);
        assert_eq!(mixed.class, OrientationClass::Mixed, "{mixed:?}");
    }

    #[test]
    fn derived_bounds_dominate_samples() {
        let f = PlaneMap::parse("compose(poly[1,0,2], conj)").unwrap();
        let r = 1.5;
        let lip = f.lipschitz_on(r);
        let sup = f.sup_on(r);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let a = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if a.norm() > r || b.norm() > r || a.dist(b) < 1e-9 {
                continue;
            }
            let fa = f.eval_pt(a);
            assert!(fa.norm() <= sup + 1e-9);
            assert!(fa.dist(f.eval_pt(b)) <= lip * a.dist(b) + 1e-9);
        }
    }
}
