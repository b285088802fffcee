//! Text forms of maps, polynomials and delta operators.
//!
//! Polynomials use the usual infix grammar in `x`, with `*` optional:
//! `x^3 - x + x`, `2x`, `x^2 + 1/2`, `(1+i)/2 x + 3`. The imaginary unit
//! `i` is accepted only over ℚ(i).

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};
use crate::series::XSeries;
use crate::umbral::DeltaOp;

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at position {} in `{}`", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn expr<F: Scalar>(&mut self) -> Result<XSeries<F>> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.bump();
                -self.term::<F>()?
            }
            Some('+') => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term<F: Scalar>(&mut self) -> Result<XSeries<F>> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Some('/') => {
                    self.bump();
                    let d = self.factor::<F>()?;
                    if d.degree().unwrap_or(0) > 0 || d.is_zero() {
                        return Err(self.err("division by a nonconstant or zero"));
                    }
                    acc = acc.scale(&d.coeff(0).inv().expect("nonzero"));
                }
                Some(c) if c == 'x' || c == 'i' || c == '(' || c.is_ascii_digit() || c == '.' => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor<F: Scalar>(&mut self) -> Result<XSeries<F>> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.bump();
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            let k: usize = digits.parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn primary<F: Scalar>(&mut self) -> Result<XSeries<F>> {
        match self.peek() {
            Some('x') => {
                self.bump();
                Ok(XSeries::x())
            }
            Some('i') => {
                self.bump();
                let i = F::imaginary_unit().ok_or_else(|| self.err("imaginary unit needs the Qi field"))?;
                Ok(XSeries::constant(i))
            }
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                if self.bump() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.bump();
                }
                let lit: String = self.chars[start..self.pos].iter().collect();
                let r = parse_rational(&lit).map_err(|_| self.err("bad number"))?;
                Ok(XSeries::constant(F::from_rational(r)))
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

/// Parse a polynomial in `x`.
pub fn parse_polynomial<F: Scalar>(s: &str) -> Result<XSeries<F>> {
    let mut p = Parser::new(s);
    if p.chars.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let out = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// A map `g`: `logistic:μ` for `μx(1 − x)`, `quadratic:c` for `x² + c`,
/// or a polynomial literal.
pub fn parse_map<F: Scalar>(s: &str) -> Result<XSeries<F>> {
    let s = s.trim();
    if let Some(mu) = s.strip_prefix("logistic:") {
        let mu = F::parse_exact(mu)?;
        return Ok(XSeries::from_coeffs(vec![F::zero(), mu.clone(), -mu]));
    }
    if let Some(c) = s.strip_prefix("quadratic:") {
        let c = F::parse_exact(c)?;
        return Ok(XSeries::from_coeffs(vec![c, F::zero(), F::one()]));
    }
    parse_polynomial(s)
}

/// `derivative`, `forward`, `backward`, `abel:α` (bare `abel` means
/// `α = 1`) or `touchard`.
pub fn parse_op<F: Scalar>(s: &str, order: usize) -> Result<DeltaOp<F>> {
    let s = s.trim();
    Ok(match s {
        "derivative" | "delta" | "d" => DeltaOp::derivative(order),
        "forward" => DeltaOp::forward(order),
        "backward" => DeltaOp::backward(order),
        "touchard" => DeltaOp::touchard(order),
        "abel" => DeltaOp::abel(F::one(), order),
        _ => match s.strip_prefix("abel:") {
            Some(alpha) => DeltaOp::abel(F::parse_exact(alpha)?, order),
            None => return Err(Error::Parse(format!("unknown operator `{s}`"))),
        },
    })
}
