use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ExactError;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type BigRat = BigRational;

/// Integer-valued rational.
pub fn int(v: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(v))
}

/// `num/den` as a normalized rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> BigRat {
    BigRat::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `num/den`, omitting the denominator when it is 1.
pub fn format_rat(x: &BigRat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"-3"`, `"9/2"` and similar.
pub fn parse_rat(s: &str) -> Option<BigRat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRat::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRat::from_integer),
    }
}

/// Reduces `x` modulo `modulus`, interpreting `a/b` as `a * b^{-1}`.
///
/// The residue lies in `[0, modulus)`.
pub fn rat_mod(x: &BigRat, modulus: &BigInt) -> Result<BigInt, ExactError> {
    if !modulus.is_positive() {
        return Err(ExactError::NonPositiveModulus(modulus.to_string()));
    }
    let num = x.numer().mod_floor(modulus);
    let den = x.denom().mod_floor(modulus);
    let egcd = den.extended_gcd(modulus);
    if !egcd.gcd.is_one() {
        return Err(ExactError::DenominatorNotInvertible {
            den: x.denom().to_string(),
            modulus: modulus.to_string(),
        });
    }
    Ok((num * egcd.x).mod_floor(modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn rat_mod_examples() {
        assert_eq!(rat_mod(&rat(125, 6), &big(125)).unwrap(), big(0));
        assert_eq!(rat_mod(&rat(-1421, 3), &big(343)).unwrap(), big(98));
        assert!(matches!(
            rat_mod(&rat(1, 2), &big(4)),
            Err(ExactError::DenominatorNotInvertible { .. })
        ));
    }

    #[test]
    fn rat_mod_modulus_one_is_zero() {
        assert_eq!(rat_mod(&rat(7, 3), &big(1)).unwrap(), big(0));
        assert!(rat_mod(&rat(7, 3), &big(0)).is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("9/2"), Some(rat(9, 2)));
        assert_eq!(parse_rat("-6/4"), Some(rat(-3, 2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(format_rat(&rat(-3, 2)), "-3/2");
        assert_eq!(format_rat(&int(17)), "17");
    }
}
