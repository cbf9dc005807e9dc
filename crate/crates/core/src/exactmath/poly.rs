use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rat, parse_rat, BigRat};
use super::ExactError;

/// Dense univariate polynomial over the rationals, coefficients in
/// ascending degree. The leading coefficient is never zero; the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRat::one())
    }

    /// The polynomial `k`.
    pub fn var() -> Self {
        Poly::from_coeffs(vec![BigRat::zero(), BigRat::one()])
    }

    pub fn constant(c: BigRat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigRat, exp: usize) -> Self {
        let mut coeffs = vec![BigRat::zero(); exp];
        coeffs.push(c);
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Integer coefficients, ascending degree.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| BigRat::from_integer(c.into()))
                .collect(),
        )
    }

    /// `c * (k - r1)(k - r2)...` for integer roots.
    pub fn from_roots(c: BigRat, roots: &[i64]) -> Self {
        roots.iter().fold(Poly::constant(c), |acc, &r| {
            acc * Poly::from_ints(&[-r, 1])
        })
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRat> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Poly::zero(),
        }
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigRat {
        self.eval(&BigRat::from_integer(x.clone()))
    }

    pub fn eval_i64(&self, x: i64) -> BigRat {
        self.eval(&BigRat::from_integer(x.into()))
    }

    /// `p(k) -> p(k + 1)`.
    pub fn shift(&self) -> Poly {
        self.shift_by(1)
    }

    /// `p(k) -> p(k + s)` by Horner's scheme in `k + s`.
    pub fn shift_by(&self, s: i64) -> Poly {
        if s == 0 {
            return self.clone();
        }
        let lin = Poly::from_ints(&[s, 1]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &lin) + &Poly::constant(c.clone()))
    }

    /// Long division over the rationals: `self = q * b + r` with `deg r < deg b`.
    pub fn divmod(&self, b: &Poly) -> Result<(Poly, Poly), ExactError> {
        let bdeg = b.degree().ok_or(ExactError::DivisionByZeroPoly)?;
        let lc_inv = b.coeffs[bdeg].recip();
        let mut rem = self.coeffs.clone();
        let qlen = rem.len().saturating_sub(bdeg);
        let mut quot = vec![BigRat::zero(); qlen];
        for i in (0..qlen).rev() {
            let c = &rem[i + bdeg] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                rem[i + j] -= &c * bc;
            }
            quot[i] = c;
        }
        rem.truncate(bdeg);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// `Some(q)` when `b` divides `self` exactly.
    pub fn exact_div(&self, b: &Poly) -> Option<Poly> {
        match self.divmod(b) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly, ExactError> {
        if a.is_zero() && b.is_zero() {
            return Err(ExactError::GcdOfZeros);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.divmod(&y)?;
            // keep intermediate coefficients small
            x = y;
            y = r.primitive();
        }
        Ok(x.monic())
    }

    /// Monic least common multiple of two nonzero polynomials.
    pub fn lcm(a: &Poly, b: &Poly) -> Result<Poly, ExactError> {
        let g = Poly::gcd(a, b)?;
        let (q, _) = a.divmod(&g)?;
        Ok((q * b.clone()).monic())
    }

    /// Positive rational content: gcd of numerators over lcm of denominators,
    /// so that `self / content` has coprime integer coefficients.
    pub fn content(&self) -> BigRat {
        if self.is_zero() {
            return BigRat::zero();
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in &self.coeffs {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        BigRat::new(num, den)
    }

    /// `self / content`, sign preserved.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.content().recip())
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Renders in descending degree using `var` as the indeterminate,
    /// e.g. `8k+9` or `(-3/2)k^2+(21/2)k`.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let coeff = if abs.is_integer() {
                format_rat(&abs)
            } else {
                format!("({})", format_rat(&abs))
            };
            match e {
                0 => out.push_str(&format_rat(&abs)),
                _ => {
                    if !abs.is_one() {
                        out.push_str(&coeff);
                    }
                    out.push_str(var);
                    if e > 1 {
                        out.push_str(&format!("^{e}"));
                    }
                }
            }
        }
        out
    }

    /// Parses expressions such as `8*k+9`, `k(k+1)(8k+9)` or `-3/2 n^2 + 21/2 n`.
    /// Any single identifier among `k`, `n`, `x` is accepted as the variable.
    pub fn parse(src: &str) -> Result<Poly, PolyParseError> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("k"))
    }
}

fn add_coeffs(a: &[BigRat], b: &[BigRat], negate_b: bool) -> Poly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigRat::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigRat::zero);
        out.push(if negate_b { x - y } else { x + y });
    }
    Poly::from_coeffs(out)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        add_coeffs(&self.coeffs, &rhs.coeffs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        add_coeffs(&self.coeffs, &rhs.coeffs, true)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly { (&self).$m(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.coeffs.iter().map(format_rat).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        let coeffs = strs
            .iter()
            .map(|s| {
                parse_rat(s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("polynomial parse error at column {pos}: {msg}")]
pub struct PolyParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyParseError {
        PolyParseError {
            pos: self.pos + 1,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if d.degree() != Some(0) {
                        return Err(self.err("division only by nonzero constants"));
                    }
                    acc = acc.scale(&d.coeffs[0].recip());
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc * self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, PolyParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| self.err("expected a non-negative integer exponent"))?;
            let mut out = Poly::one();
            for _ in 0..e {
                out = out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, PolyParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let v: BigInt = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .unwrap();
                Ok(Poly::constant(BigRat::from_integer(v)))
            }
            Some(b'k' | b'n' | b'x') => {
                self.pos += 1;
                if self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    return Err(self.err("unknown identifier"));
                }
                Ok(Poly::var())
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
