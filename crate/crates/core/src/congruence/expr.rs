use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmath::{jacobi, BigRat, Poly};
use crate::sequences::{binomial, Bound, Factor, SequenceRegistry, SumFormula};

use super::CongruenceError;

/// Expression in one integer variable `n`, evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(#[serde(with = "crate::exactmath::serde_rat")] BigRat),
    N,
    /// Polynomial in `n`.
    Poly(Poly),
    Seq { name: String, index: Bound },
    /// `base^exp`; a negative exponent yields a rational.
    Pow { base: i64, exp: Bound },
    Binom(Bound, Bound),
    /// Jacobi symbol `(top / bottom)`; both must be integers, the bottom odd and at least 3.
    Legendre(Box<Expr>, Box<Expr>),
    Sum(SumFormula),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Const(BigRat::from_integer(v.into()))
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        Expr::Const(crate::exactmath::rat(num, den))
    }

    /// Polynomial literal in `n`, e.g. `"2n"` or `"n^2(n^2-1)/6"`.
    pub fn poly(src: &str) -> Expr {
        Expr::Poly(Poly::parse(src).expect("valid polynomial literal"))
    }

    pub fn seq(name: &str, index: &str) -> Expr {
        Expr::Seq {
            name: name.to_string(),
            index: Bound::parse(index).expect("valid index literal"),
        }
    }

    pub fn pow(base: i64, exp: &str) -> Expr {
        Expr::Pow {
            base,
            exp: Bound::parse(exp).expect("valid exponent literal"),
        }
    }

    pub fn binom(top: &str, bottom: &str) -> Expr {
        Expr::Binom(
            Bound::parse(top).expect("valid binomial literal"),
            Bound::parse(bottom).expect("valid binomial literal"),
        )
    }

    pub fn legendre(top: Expr, bottom: Expr) -> Expr {
        Expr::Legendre(Box::new(top), Box::new(bottom))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    /// Exact value at `n`.
    pub fn eval(&self, n: i64, reg: &SequenceRegistry) -> Result<BigRat, CongruenceError> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::N => BigRat::from_integer(n.into()),
            Expr::Poly(p) => p.eval_i64(n),
            Expr::Seq { name, index } => BigRat::from_integer(reg.term(name, index.eval(n))?),
            Expr::Pow { base, exp } => int_pow(*base, exp.eval(n))?,
            Expr::Binom(top, bottom) => BigRat::from_integer(binomial(top.eval(n), bottom.eval(n))),
            Expr::Legendre(top, bottom) => {
                let t = integer(top.eval(n, reg)?, "Legendre top")?;
                let b = integer(bottom.eval(n, reg)?, "Legendre bottom")?;
                let s = jacobi(&t, &b).map_err(|_| CongruenceError::LegendreBottom(b.to_string()))?;
                BigRat::from_integer(s.into())
            }
            Expr::Sum(s) => eval_sum(s, n, reg)?,
            Expr::Add(xs) => {
                let mut acc = BigRat::zero();
                for x in xs {
                    acc += x.eval(n, reg)?;
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = BigRat::one();
                for x in xs {
                    acc *= x.eval(n, reg)?;
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            Expr::Sub(a, b) => a.eval(n, reg)? - b.eval(n, reg)?,
            Expr::Div(a, b) => {
                let d = b.eval(n, reg)?;
                if d.is_zero() {
                    return Err(CongruenceError::DivisionByZero(n));
                }
                a.eval(n, reg)? / d
            }
            Expr::Neg(a) => -a.eval(n, reg)?,
        })
    }

    /// Largest index of each sequence that evaluation at `n` touches.
    pub fn sequence_extent(&self, n: i64, out: &mut BTreeMap<String, i64>) {
        let mut note = |name: &str, idx: i64| {
            let e = out.entry(name.to_string()).or_insert(idx);
            *e = (*e).max(idx);
        };
        match self {
            Expr::Seq { name, index } => note(name, index.eval(n)),
            Expr::Sum(s) => {
                let (lo, hi) = (s.lower.eval(n), s.upper.eval(n));
                if lo > hi {
                    return;
                }
                for f in &s.factors {
                    if let Factor::Seq { name, index } = f {
                        note(name, index.eval(n, lo).max(index.eval(n, hi)));
                    }
                }
            }
            Expr::Legendre(a, b) | Expr::Sub(a, b) | Expr::Div(a, b) => {
                a.sequence_extent(n, out);
                b.sequence_extent(n, out);
            }
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.sequence_extent(n, out)),
            Expr::Neg(a) => a.sequence_extent(n, out),
            Expr::Const(_) | Expr::N | Expr::Poly(_) | Expr::Pow { .. } | Expr::Binom(..) => {}
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match self {
            Expr::Add(mut xs) => {
                xs.push(rhs);
                Expr::Add(xs)
            }
            lhs => Expr::Add(vec![lhs, rhs]),
        }
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match self {
            Expr::Mul(mut xs) => {
                xs.push(rhs);
                Expr::Mul(xs)
            }
            lhs => Expr::Mul(vec![lhs, rhs]),
        }
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

/// Exact value of a finite sum at `n`, with sequence terms from `reg`.
pub fn eval_sum(s: &SumFormula, n: i64, reg: &SequenceRegistry) -> Result<BigRat, CongruenceError> {
    Ok(s.eval_with(n, |name, i| reg.term(name, i))?)
}

fn integer(x: BigRat, what: &str) -> Result<BigInt, CongruenceError> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(CongruenceError::NotInteger {
            what: what.to_string(),
            value: crate::exactmath::format_rat(&x),
        })
    }
}

fn int_pow(base: i64, exp: i64) -> Result<BigRat, CongruenceError> {
    let mag = num_traits::pow(BigInt::from(base), exp.unsigned_abs() as usize);
    if exp >= 0 {
        Ok(BigRat::from_integer(mag))
    } else if mag.is_zero() {
        Err(CongruenceError::ZeroToNegativePower)
    } else {
        Ok(BigRat::from_integer(mag).recip())
    }
}
