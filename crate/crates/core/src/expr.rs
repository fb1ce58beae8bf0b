//! A one-variable expression language, evaluable over scalars and jets.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := base ('^' unary)?
//! base   := number | 'x' | ident '(' expr ')' | '(' expr ')'
//! ident  := exp | ln | sin | cos | sqrt | abs
//! ```
//!
//! `^` binds tighter than unary minus (`-x^2` is `-(x^2)`) and associates to
//! the right. Exponents must not depend on `x`.

use std::fmt;

use num_complex::Complex64;

use crate::jet::{DerivativeSource, Elementary, Jet, SINGULARITY_TOLERANCE};
use crate::scalar::{Ring, Scalar};
use crate::specfun::factorial;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl UnaryOp {
    const FUNCTIONS: [UnaryOp; 6] = [
        UnaryOp::Exp,
        UnaryOp::Ln,
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Sqrt,
        UnaryOp::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<UnaryOp> {
        Self::FUNCTIONS.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(f64),
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn unary(op: UnaryOp, child: Expr) -> Self {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::Literal(_) => false,
            Expr::Var => true,
            Expr::Unary(_, c) => c.depends_on_x(),
            Expr::Binary(_, l, r) => l.depends_on_x() || r.depends_on_x(),
        }
    }

    /// Evaluates over any supported ring; a jet `x + ε` yields every
    /// derivative up to its order.
    pub fn eval<R: Evaluate>(&self, x: &R) -> Result<R> {
        match self {
            Expr::Literal(c) => Ok(R::from_f64(*c)),
            Expr::Var => Ok(x.clone()),
            Expr::Unary(op, c) => c.eval(x)?.apply(*op),
            Expr::Binary(op, l, r) => {
                let lv = l.eval(x)?;
                match op {
                    BinaryOp::Add => Ok(lv + r.eval(x)?),
                    BinaryOp::Sub => Ok(lv - r.eval(x)?),
                    BinaryOp::Mul => Ok(lv * r.eval(x)?),
                    BinaryOp::Div => lv.checked_div(&r.eval(x)?),
                    BinaryOp::Pow => {
                        let p: f64 = r.eval(&0.0)?;
                        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                            lv.int_pow(p as i32)
                        } else {
                            lv.real_pow(p)
                        }
                    }
                }
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        self.eval(&x)
    }

    /// `f(x), f'(x), …, f^{(k)}(x)` from one jet evaluation.
    pub fn derivatives_at(&self, x: f64, k: usize) -> Result<Vec<f64>> {
        let jet = self.eval(&Jet::variable(x, 1.0, k))?;
        (0..=k).map(|m| jet.extract_derivative(m)).collect()
    }
}

impl DerivativeSource<f64> for Expr {
    fn derivatives(&self, x: f64, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        self.derivatives_at(x, count - 1)
    }
}

/// Prints fully parenthesized binary and negation nodes so that parsing the
/// output gives back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "x"),
            Expr::Unary(UnaryOp::Neg, c) => write!(f, "(-{c})"),
            Expr::Unary(op, c) => write!(f, "{}({c})", op.name()),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}

/// Ring operations an [`Expr`] needs beyond [`Ring`].
pub trait Evaluate: Ring {
    fn apply(&self, op: UnaryOp) -> Result<Self>;
    fn checked_div(&self, rhs: &Self) -> Result<Self>;
    fn int_pow(&self, n: i32) -> Result<Self>;
    fn real_pow(&self, p: f64) -> Result<Self>;
}

fn elementary(op: UnaryOp) -> Elementary {
    match op {
        UnaryOp::Exp => Elementary::Exp,
        UnaryOp::Ln => Elementary::Ln,
        UnaryOp::Sin => Elementary::Sin,
        UnaryOp::Cos => Elementary::Cos,
        UnaryOp::Sqrt => Elementary::Sqrt,
        UnaryOp::Neg | UnaryOp::Abs => unreachable!("not an analytic lift"),
    }
}

fn scalar_apply<T: Scalar>(x: T, op: UnaryOp) -> Result<T> {
    match op {
        UnaryOp::Neg => Ok(-x),
        UnaryOp::Abs => Ok(T::from_real(x.abs())),
        _ => elementary(op).eval(x),
    }
}

fn scalar_div<T: Scalar>(x: T, y: T) -> Result<T> {
    if y.abs() <= SINGULARITY_TOLERANCE {
        return Err(Error::SingularLeadingCoefficient(y.abs()));
    }
    Ok(x / y)
}

fn scalar_int_pow<T: Scalar + Ring>(x: T, n: i32) -> Result<T> {
    if n >= 0 {
        Ok(x.pow_u(n as u32))
    } else {
        if x.abs() <= SINGULARITY_TOLERANCE {
            return Err(Error::SingularLeadingCoefficient(x.abs()));
        }
        Ok(x.recip().pow_u(n.unsigned_abs()))
    }
}

fn scalar_real_pow<T: Scalar>(x: T, p: f64) -> Result<T> {
    if T::KIND == crate::ScalarKind::Real && x.re() < 0.0 {
        return Err(Error::NegativeBaseRealFractionalPower {
            base: x.re(),
            exponent: p,
        });
    }
    if p < 0.0 && x.abs() <= SINGULARITY_TOLERANCE {
        return Err(Error::SingularLeadingCoefficient(x.abs()));
    }
    Ok(x.powf(p))
}

macro_rules! scalar_evaluate {
    ($t:ty) => {
        impl Evaluate for $t {
            fn apply(&self, op: UnaryOp) -> Result<Self> {
                scalar_apply(*self, op)
            }
            fn checked_div(&self, rhs: &Self) -> Result<Self> {
                scalar_div(*self, *rhs)
            }
            fn int_pow(&self, n: i32) -> Result<Self> {
                scalar_int_pow(*self, n)
            }
            fn real_pow(&self, p: f64) -> Result<Self> {
                scalar_real_pow(*self, p)
            }
        }
    };
}
scalar_evaluate!(f64);
scalar_evaluate!(Complex64);

impl<T: Scalar + Ring> Evaluate for Jet<T> {
    fn apply(&self, op: UnaryOp) -> Result<Self> {
        match op {
            UnaryOp::Neg => Ok(-self),
            UnaryOp::Abs => {
                if self.order() == 0 {
                    return Ok(Jet::constant(T::from_real(self.value().abs()), 0));
                }
                let c0 = self.value();
                if T::KIND == crate::ScalarKind::Complex || c0.re() == 0.0 {
                    return Err(Error::NonDifferentiablePoint {
                        function: "abs",
                        argument: format!("{c0:?}"),
                    });
                }
                Ok(if c0.re() > 0.0 { self.clone() } else { -self })
            }
            _ => self.lift(&elementary(op)),
        }
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.div(rhs)
    }

    fn int_pow(&self, n: i32) -> Result<Self> {
        self.powi(n)
    }

    fn real_pow(&self, p: f64) -> Result<Self> {
        self.powf(p)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Next token and its byte offset.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => {
                self.pos += 1;
                Tok::Op(c)
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            c if c.is_ascii_digit() || c == '.' => {
                let len = number_len(rest);
                let text = &rest[..len];
                self.pos += len;
                let v = text.parse::<f64>().map_err(|_| Error::Syntax {
                    offset: start,
                    expected: "a number".into(),
                })?;
                Tok::Num(v)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = rest
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(rest.len());
                self.pos += len;
                Tok::Ident(rest[..len].to_string())
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    expected: "a number, `x`, a function name, `(` or an operator".into(),
                })
            }
        };
        Ok((tok, start))
    }
}

fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, at) = lexer.next()?;
        Ok(Self { lexer, tok, at })
    }

    fn bump(&mut self) -> Result<()> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            offset: self.at,
            expected: expected.to_string(),
        })
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.tok != Tok::RParen {
            return self.fail("`)`");
        }
        self.bump()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            self.bump()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(Expr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump()?;
        let at = self.at;
        let exponent = self.unary()?;
        if exponent.depends_on_x() {
            return Err(Error::Syntax {
                offset: at,
                expected: "an exponent that does not depend on x".into(),
            });
        }
        Ok(Expr::binary(BinaryOp::Pow, base, exponent))
    }

    fn base(&mut self) -> Result<Expr> {
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Literal(v))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if name == "x" {
                    return Ok(Expr::Var);
                }
                let Some(op) = UnaryOp::from_name(&name) else {
                    return Err(Error::UnknownIdentifier { name, offset: at });
                };
                if self.tok != Tok::LParen {
                    return self.fail("`(` after function name");
                }
                self.bump()?;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::unary(op, arg))
            }
            other => {
                self.tok = other;
                self.fail("a number, `x`, a function call or `(`")
            }
        }
    }
}

/// Parses an expression in `x`.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.fail("an operator or end of input");
    }
    Ok(e)
}

/// Derivatives `f^{(m)}(x)` for `m = 0..=k` via jets, each multiplied out as
/// `m! c_m`.
pub fn derivative_table(e: &Expr, x: f64, k: usize) -> Result<Vec<f64>> {
    let jet = e.eval(&Jet::variable(x, 1.0, k))?;
    Ok((0..=k).map(|m| jet.coeff(m) * factorial(m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn parses_gaussian() {
        let e = parse("exp(-x^2)").unwrap();
        let expect = Expr::unary(
            UnaryOp::Exp,
            Expr::unary(UnaryOp::Neg, Expr::binary(BinaryOp::Pow, Expr::Var, Expr::Literal(2.0))),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("2+3*x").unwrap().eval_f64(4.0).unwrap(), 14.0);
        assert_eq!(parse("2^3^2").unwrap().eval_f64(0.0).unwrap(), 512.0);
        assert_eq!(parse("8/4/2").unwrap().eval_f64(0.0).unwrap(), 1.0);
        assert_eq!(parse("10 - 3 - 2").unwrap().eval_f64(0.0).unwrap(), 5.0);
        assert_eq!(parse("-x^2").unwrap().eval_f64(3.0).unwrap(), -9.0);
        assert_eq!(parse("2^-1").unwrap().eval_f64(0.0).unwrap(), 0.5);
        assert_eq!(parse("  x*  ( 1.5e1 +x ) ").unwrap().eval_f64(1.0).unwrap(), 16.0);
        assert_eq!(parse("x^(1/2)").unwrap().eval_f64(9.0).unwrap(), 3.0);
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(
            parse("exp(-x^2"),
            Err(Error::Syntax {
                offset: 8,
                expected: "`)`".into()
            })
        );
        assert!(matches!(parse("ln(x"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse("2 +"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("x x"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x^x"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("3 $ 4"), Err(Error::Syntax { offset: 2, .. })));
        assert_eq!(
            parse("tan(x)"),
            Err(Error::UnknownIdentifier {
                name: "tan".into(),
                offset: 0
            })
        );
        assert!(matches!(parse("y + 1"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn jet_evaluation() {
        let e = parse("exp(-x^2)").unwrap();
        let j = e.eval(&Jet::variable(1.0, 1.0, 2)).unwrap();
        let em1 = (-1.0f64).exp();
        for (c, want) in j.coeffs().iter().zip([em1, -2.0 * em1, em1]) {
            assert_relative_eq!(*c, want, max_relative = 1e-15);
        }
        let u = Jet::from_coeffs(vec![0.3, -1.0, 2.0]);
        assert_eq!(parse("x").unwrap().eval(&u).unwrap(), u);
    }

    #[test]
    fn evaluation_errors() {
        assert!(matches!(parse("ln(x)").unwrap().eval_f64(-1.0), Err(Error::DomainError { .. })));
        assert!(matches!(
            parse("abs(x)").unwrap().eval(&Jet::variable(0.0, 1.0, 2)),
            Err(Error::NonDifferentiablePoint { .. })
        ));
        assert_eq!(parse("abs(x)").unwrap().eval_f64(-2.0).unwrap(), 2.0);
        let neg = parse("abs(x)").unwrap().eval(&Jet::variable(-2.0, 1.0, 1)).unwrap();
        assert_eq!(neg.coeffs(), &[2.0, -1.0]);
        assert!(parse("1/x").unwrap().eval_f64(0.0).is_err());
        assert!(parse("x^0.5").unwrap().eval_f64(-4.0).is_err());
        assert!(parse("ln(x)").unwrap().eval(&Complex64::new(-1.0, 0.0)).is_ok());
    }

    #[test]
    fn derivative_source() {
        let e = parse("x^3").unwrap();
        let d = e.derivatives(2.0, 4).unwrap();
        assert_eq!(d, vec![8.0, 12.0, 12.0, 6.0]);
        assert_eq!(derivative_table(&e, 2.0, 4).unwrap(), vec![8.0, 12.0, 12.0, 6.0, 0.0]);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Literal),
            (0u32..20).prop_map(|n| Expr::Literal(n as f64)),
            Just(Expr::Var),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                (prop::sample::select(vec![
                    UnaryOp::Neg,
                    UnaryOp::Exp,
                    UnaryOp::Ln,
                    UnaryOp::Sin,
                    UnaryOp::Cos,
                    UnaryOp::Sqrt,
                    UnaryOp::Abs
                ]), inner.clone())
                    .prop_map(|(op, c)| Expr::unary(op, c)),
                (prop::sample::select(vec![BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div]), inner.clone(), inner.clone())
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
                (inner, 0u32..5).prop_map(|(b, n)| Expr::binary(BinaryOp::Pow, b, Expr::Literal(n as f64))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let text = e.to_string();
            prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
        }

        #[test]
        fn order_zero_jet_matches_scalar(e in arb_expr(), x in -3.0f64..3.0) {
            let s = e.eval_f64(x);
            let j = e.eval(&Jet::constant(x, 0));
            match (s, j) {
                (Ok(s), Ok(j)) => prop_assert!(j.coeffs()[0].to_bits() == s.to_bits() || (s.is_nan() && j.coeffs()[0].is_nan()), "{} vs {:?}", s, j),
                (Err(_), Err(_)) => {}
                (s, j) => prop_assert!(false, "divergent outcome {:?} vs {:?}", s, j),
            }
        }
    }
}
