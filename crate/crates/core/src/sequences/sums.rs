//! Finite sums of binomial / geometric / sequence-valued summands with a
//! rational-function coefficient in the summation index.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SequenceError;
use crate::exactmath::{BigRat, RatFunc};

/// Integer affine form `n_coeff * n + k_coeff * k + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Affine {
    pub n: i64,
    pub k: i64,
    pub c: i64,
}

impl Affine {
    pub const fn new(n: i64, k: i64, c: i64) -> Self {
        Affine { n, k, c }
    }

    pub fn eval(&self, n: i64, k: i64) -> i64 {
        self.n * n + self.k * k + self.c
    }

    /// Parses forms such as `n-2k+1`, `2k`, `-k`, `3`.
    pub fn parse(src: &str) -> Result<Affine, String> {
        let mut out = Affine::default();
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(format!("empty affine form {src:?}"));
        }
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            } else if i != 0 {
                return Err(format!("expected '+' or '-' in {src:?}"));
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coeff: i64 = if start == i {
                1
            } else {
                s[start..i].parse().map_err(|e| format!("{e} in {src:?}"))?
            };
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            }
            match bytes.get(i) {
                Some(b'n') => {
                    out.n += sign * coeff;
                    i += 1;
                }
                Some(b'k') => {
                    out.k += sign * coeff;
                    i += 1;
                }
                _ if start == i => return Err(format!("dangling sign in {src:?}")),
                _ => out.c += sign * coeff,
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (c, v) in [(self.n, "n"), (self.k, "k"), (self.c, "")] {
            if c == 0 {
                continue;
            }
            if c < 0 {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            if c.abs() != 1 || v.is_empty() {
                s.push_str(&c.abs().to_string());
            }
            s.push_str(v);
        }
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

impl Serialize for Affine {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Affine {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Affine::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Summation limit `floor((a*n + b) / d)` with `d >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bound {
    pub a: i64,
    pub b: i64,
    pub d: i64,
}

impl Bound {
    pub const fn affine(a: i64, b: i64) -> Self {
        Bound { a, b, d: 1 }
    }

    pub const fn floor_div(a: i64, b: i64, d: i64) -> Self {
        Bound { a, b, d }
    }

    pub const fn constant(b: i64) -> Self {
        Bound { a: 0, b, d: 1 }
    }

    pub fn eval(&self, n: i64) -> i64 {
        Integer::div_floor(&(self.a * n + self.b), &self.d)
    }

    /// Accepts `n`, `n-1`, `3`, `floor(n/2)`, `floor((n-1)/2)`.
    pub fn parse(src: &str) -> Result<Bound, String> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let (inner, d) = match s.strip_prefix("floor(").and_then(|r| r.strip_suffix(')')) {
            Some(body) => {
                let (num, den) = body
                    .rsplit_once('/')
                    .ok_or_else(|| format!("floor bound needs a divisor: {src:?}"))?;
                let d: i64 = den.parse().map_err(|e| format!("{e} in {src:?}"))?;
                if d < 1 {
                    return Err(format!("divisor must be positive in {src:?}"));
                }
                let num = num
                    .strip_prefix('(')
                    .and_then(|x| x.strip_suffix(')'))
                    .unwrap_or(num);
                (num.to_string(), d)
            }
            None => (s, 1),
        };
        let aff = Affine::parse(&inner)?;
        if aff.k != 0 {
            return Err(format!("summation bound cannot depend on k: {src:?}"));
        }
        Ok(Bound {
            a: aff.n,
            b: aff.c,
            d,
        })
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let aff = Affine::new(self.a, 0, self.b);
        if self.d == 1 {
            write!(f, "{aff}")
        } else if self.b == 0 || self.a == 0 {
            write!(f, "floor({aff}/{})", self.d)
        } else {
            write!(f, "floor(({aff})/{})", self.d)
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Bound::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// One multiplicative factor of a summand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    /// `binom(top, bottom)`; zero when `bottom < 0` or `bottom > top`.
    Binom(Affine, Affine),
    /// `base^exp`; a negative exponent yields a rational.
    Pow { base: i64, exp: Affine },
    /// Term `index` of a named sequence.
    Seq { name: String, index: Affine },
}

/// `sum_{k = lower(n)}^{upper(n)} coeff(k) * prod(factors)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumFormula {
    pub factors: Vec<Factor>,
    #[serde(default = "RatFunc::one")]
    pub coeff: RatFunc,
    #[serde(default = "zero_bound")]
    pub lower: Bound,
    pub upper: Bound,
}

fn zero_bound() -> Bound {
    Bound::constant(0)
}

impl SumFormula {
    pub fn new(factors: Vec<Factor>, coeff: RatFunc, lower: Bound, upper: Bound) -> Self {
        SumFormula {
            factors,
            coeff,
            lower,
            upper,
        }
    }

    pub fn references_sequences(&self) -> bool {
        self.factors.iter().any(|f| matches!(f, Factor::Seq { .. }))
    }

    /// Exact value at `n`, resolving sequence factors through `seq`.
    pub fn eval_with<F>(&self, n: i64, seq: F) -> Result<BigRat, SequenceError>
    where
        F: Fn(&str, i64) -> Result<BigInt, SequenceError>,
    {
        let mut total = BigRat::zero();
        let mut int_total = BigInt::zero();
        for k in self.lower.eval(n)..=self.upper.eval(n) {
            let c = self
                .coeff
                .eval_i64(k)
                .ok_or(SequenceError::CoefficientPole { k })?;
            if c.is_zero() {
                continue;
            }
            let mut int_part = BigInt::one();
            let mut rat_part = BigRat::one();
            for f in &self.factors {
                match f {
                    Factor::Binom(top, bottom) => {
                        int_part *= binomial(top.eval(n, k), bottom.eval(n, k));
                    }
                    Factor::Pow { base, exp } => {
                        rat_part *= int_pow(*base, exp.eval(n, k))?;
                    }
                    Factor::Seq { name, index } => {
                        int_part *= seq(name, index.eval(n, k))?;
                    }
                }
                if int_part.is_zero() {
                    break;
                }
            }
            if int_part.is_zero() {
                continue;
            }
            let c = c * rat_part;
            if c.is_integer() {
                int_total += c.to_integer() * int_part;
            } else {
                total += c * BigRat::from_integer(int_part);
            }
        }
        Ok(total + BigRat::from_integer(int_total))
    }
}

/// `binom(x, y)` over the integers, zero outside `0 <= y <= x`.
pub fn binomial(x: i64, y: i64) -> BigInt {
    if y < 0 || y > x {
        return BigInt::zero();
    }
    let y = y.min(x - y) as u64;
    let x = x as u64;
    let mut acc = BigInt::one();
    for i in 1..=y {
        acc *= x - y + i;
        acc /= i;
    }
    acc
}

fn int_pow(base: i64, exp: i64) -> Result<BigRat, SequenceError> {
    let b = BigInt::from(base);
    let mag = num_traits::pow(b, exp.unsigned_abs() as usize);
    if exp >= 0 {
        Ok(BigRat::from_integer(mag))
    } else if mag.is_zero() {
        Err(SequenceError::ZeroToNegativePower)
    } else {
        Ok(BigRat::from_integer(mag).recip())
    }
}

/// Middle coefficient of `(1 + x + x^2)^n` by direct polynomial expansion.
pub fn central_trinomial_by_expansion(n: usize) -> BigInt {
    let mut coeffs = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = vec![BigInt::zero(); coeffs.len() + 2];
        for (i, c) in coeffs.iter().enumerate() {
            for j in 0..3 {
                next[i + j] += c;
            }
        }
        coeffs = next;
    }
    coeffs[n].clone()
}

impl Factor {
    pub fn binom(top: &str, bottom: &str) -> Factor {
        Factor::Binom(
            Affine::parse(top).expect("valid affine literal"),
            Affine::parse(bottom).expect("valid affine literal"),
        )
    }

    pub fn pow(base: i64, exp: &str) -> Factor {
        Factor::Pow {
            base,
            exp: Affine::parse(exp).expect("valid affine literal"),
        }
    }

    pub fn seq(name: &str, index: &str) -> Factor {
        Factor::Seq {
            name: name.to_string(),
            index: Affine::parse(index).expect("valid affine literal"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, Poly};

    fn no_seq(_: &str, _: i64) -> Result<BigInt, SequenceError> {
        unreachable!()
    }

    #[test]
    fn affine_parse_display() {
        let a = Affine::parse("n-2k+1").unwrap();
        assert_eq!(a, Affine::new(1, -2, 1));
        assert_eq!(a.to_string(), "n-2k+1");
        assert_eq!(Affine::parse("-k").unwrap(), Affine::new(0, -1, 0));
        assert_eq!(Affine::parse("0").unwrap().to_string(), "0");
        assert!(Affine::parse("n+").is_err());
        assert!(Affine::parse("n k").is_err());
    }

    #[test]
    fn bound_parse_display() {
        for s in ["n", "n-1", "floor(n/2)", "floor((n-1)/2)", "3"] {
            assert_eq!(Bound::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Bound::parse("floor((n-1)/2)").unwrap().eval(6), 2);
        assert_eq!(Bound::parse("floor(n/2)").unwrap().eval(-1), -1);
        assert!(Bound::parse("floor(k/2)").is_err());
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 6), BigInt::zero());
        assert_eq!(binomial(5, -1), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(binomial(-1, 0), BigInt::zero());
    }

    #[test]
    fn expansion_small_values() {
        let t: Vec<BigInt> = (0..9).map(central_trinomial_by_expansion).collect();
        let expect: Vec<BigInt> = [1, 1, 3, 7, 19, 51, 141, 393, 1107]
            .iter()
            .map(|&x| BigInt::from(x))
            .collect();
        assert_eq!(t, expect);
    }

    #[test]
    fn negative_powers_are_rational() {
        let f = SumFormula::new(
            vec![Factor::pow(-3, "-k")],
            RatFunc::one(),
            Bound::constant(0),
            Bound::constant(2),
        );
        // 1 - 1/3 + 1/9
        assert_eq!(
            f.eval_with(0, no_seq).unwrap(),
            crate::exactmath::rat(7, 9)
        );
    }

    #[test]
    fn pole_in_range_is_an_error() {
        let coeff = RatFunc::new(Poly::one(), Poly::parse("k-2").unwrap()).unwrap();
        let f = SumFormula::new(vec![], coeff, Bound::constant(0), Bound::affine(1, 0));
        assert!(f.eval_with(1, no_seq).is_ok());
        assert_eq!(
            f.eval_with(3, no_seq),
            Err(SequenceError::CoefficientPole { k: 2 })
        );
        assert_eq!(
            SumFormula::new(vec![], RatFunc::one(), Bound::constant(0), Bound::affine(1, -1))
                .eval_with(0, no_seq)
                .unwrap(),
            int(0)
        );
    }

    #[test]
    fn json_shape() {
        let f = SumFormula::new(
            vec![Factor::binom("n", "2k"), Factor::binom("2k", "k")],
            RatFunc::new(Poly::one(), Poly::parse("2k-1").unwrap()).unwrap(),
            Bound::constant(0),
            Bound::floor_div(1, 0, 2),
        );
        let js = serde_json::to_value(&f).unwrap();
        assert_eq!(js["upper"], "floor(n/2)");
        assert_eq!(js["factors"][0]["binom"][1], "2k");
        assert_eq!(js["coeff"]["den"], serde_json::json!(["-1/2", "1"]));
        let back: SumFormula = serde_json::from_value(js).unwrap();
        assert_eq!(back, f);
    }
}
