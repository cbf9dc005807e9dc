use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ExactError;

/// Jacobi symbol `(a / m)` for odd `m >= 3`, via quadratic reciprocity.
pub fn jacobi(a: &BigInt, m: &BigInt) -> Result<i8, ExactError> {
    if m.is_even() || *m < BigInt::from(3) {
        return Err(ExactError::BadJacobiBottom(m.to_string()));
    }
    let mut a = a.mod_floor(m);
    let mut n = m.clone();
    let mut sign = 1i8;
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % &eight).to_u8_lossy();
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % &four).to_u8_lossy() == 3 && (&n % &four).to_u8_lossy() == 3 {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { sign } else { 0 })
}

/// Legendre symbol `(a / p)`. The bottom is not tested for primality; for
/// composite odd bottoms this is the Jacobi symbol.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<i8, ExactError> {
    jacobi(a, p)
}

/// `base^exp mod modulus` by square-and-multiply; the result lies in
/// `[0, modulus)`.
pub fn modpow(base: &BigInt, exp: &BigInt, modulus: &BigInt) -> Result<BigInt, ExactError> {
    if !modulus.is_positive() {
        return Err(ExactError::NonPositiveModulus(modulus.to_string()));
    }
    assert!(!exp.is_negative(), "modpow exponent must be non-negative");
    let mut result = BigInt::one().mod_floor(modulus);
    let mut b = base.mod_floor(modulus);
    let mut e = exp.clone();
    while e.is_positive() {
        if e.is_odd() {
            result = (&result * &b).mod_floor(modulus);
        }
        b = (&b * &b).mod_floor(modulus);
        e >>= 1;
    }
    Ok(result)
}

trait LowBits {
    fn to_u8_lossy(&self) -> u8;
}

impl LowBits for BigInt {
    fn to_u8_lossy(&self) -> u8 {
        let (_, digits) = self.to_u32_digits();
        digits.first().map_or(0, |d| (*d & 0xff) as u8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn leg(a: i64, m: i64) -> i8 {
        legendre(&big(a), &big(m)).unwrap()
    }

    fn is_prime(n: i64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(leg(-1, 5), 1);
        assert_eq!(leg(5, 3), -1);
        for m in [3, 5, 9, 15, 21, 97] {
            assert_eq!(leg(1, m), 1);
        }
        assert_eq!(leg(3, 3), 0);
        assert_eq!(leg(6, 9), 0);
    }

    #[test]
    fn rejects_bad_bottoms() {
        assert!(legendre(&big(1), &big(4)).is_err());
        assert!(legendre(&big(1), &big(1)).is_err());
        assert!(legendre(&big(1), &big(-3)).is_err());
    }

    #[test]
    fn agrees_with_residue_enumeration() {
        for p in (3..100).filter(|&p| is_prime(p)) {
            let squares: Vec<i64> = (1..p).map(|x| x * x % p).collect();
            for a in -p..2 * p {
                let r = a.rem_euclid(p);
                let expect = if r == 0 {
                    0
                } else if squares.contains(&r) {
                    1
                } else {
                    -1
                };
                assert_eq!(leg(a, p), expect, "({a}/{p})");
            }
        }
    }

    #[test]
    fn modpow_examples() {
        assert_eq!(modpow(&big(3), &big(4), &big(25)).unwrap(), big(6));
        assert_eq!(modpow(&big(3), &big(6), &big(125)).unwrap(), big(104));
        assert_eq!(modpow(&big(7), &big(0), &big(10)).unwrap(), big(1));
        assert_eq!(modpow(&big(7), &big(0), &big(1)).unwrap(), big(0));
        assert_eq!(modpow(&big(-2), &big(3), &big(5)).unwrap(), big(2));
    }

    proptest! {
        #[test]
        fn jacobi_matches_euler_criterion(a in -500i64..500, idx in 0usize..25) {
            let primes: Vec<i64> = (3..100).filter(|&p| is_prime(p)).collect();
            let p = primes[idx % primes.len()];
            let e = modpow(&big(a), &big((p - 1) / 2), &big(p)).unwrap();
            let expect = if e.is_zero() { 0 } else if e.is_one() { 1 } else { -1 };
            prop_assert_eq!(leg(a, p), expect);
        }

        #[test]
        fn jacobi_multiplicative_in_bottom(a in -200i64..200, m1 in 1i64..40, m2 in 1i64..40) {
            let (m1, m2) = (2 * m1 + 1, 2 * m2 + 1);
            prop_assert_eq!(leg(a, m1 * m2), leg(a, m1) * leg(a, m2));
        }
    }
}
