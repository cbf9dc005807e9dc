use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::BigRat;
use super::ExactError;

/// Reduced quotient of two polynomials. The denominator is monic and
/// coprime to the numerator; zero is stored as `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = Poly::gcd(&num, &den)?;
        let (num, _) = num.divmod(&g)?;
        let (den, _) = den.divmod(&g)?;
        let lc = den.leading().expect("nonzero").recip();
        Ok(RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// `None` when the denominator vanishes at `x`.
    pub fn eval(&self, x: &BigRat) -> Option<BigRat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn eval_i64(&self, x: i64) -> Option<BigRat> {
        self.eval(&BigRat::from_integer(x.into()))
    }

    /// `r(k) -> r(k + s)`.
    pub fn shift_by(&self, s: i64) -> RatFunc {
        RatFunc {
            num: self.num.shift_by(s),
            den: self.den.shift_by(s),
        }
    }

    pub fn scale(&self, c: &BigRat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        RatFunc::new(&self.num * p, self.den.clone()).expect("denominator is nonzero")
    }

    pub fn recip(&self) -> Result<RatFunc, ExactError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, ExactError> {
        Ok(self * &other.recip()?)
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_zero() || (self.den.degree() == Some(0) && self.den.coeff(0).is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::new(num, &self.den * &rhs.den).expect("nonzero")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[derive(Deserialize)]
struct RawRatFunc {
    num: Poly,
    #[serde(default = "Poly::one")]
    den: Poly,
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawRatFunc::deserialize(d)?;
        RatFunc::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}
