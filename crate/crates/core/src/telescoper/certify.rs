use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactmath::{format_rat, BigRat, Poly, RatFunc};
use crate::sequences::SequenceRegistry;

use super::system::Setup;
use super::{TelescopeError, TelescoperCertificate};

/// Outcome of a successful [`certify`] run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifyReport {
    pub symbolic: bool,
    pub checked_upto: i64,
    /// `S(n) - S(0)` for `n = 1, 2, ...`, up to 10 values.
    #[serde(serialize_with = "crate::exactmath::serde_rat::serialize_vec")]
    pub spot_values: Vec<BigRat>,
}

/// Expands `p(k) a_{k+s_a} b_{k+s_b} - Δ_k S(k)` in the basis and checks
/// that every coefficient is the zero rational function.
pub fn certify_symbolic(
    cert: &TelescoperCertificate,
    reg: &SequenceRegistry,
) -> Result<(), TelescopeError> {
    cert.validate_shape()?;
    let mut setup = Setup::new(
        reg,
        &cert.seq_a,
        cert.seq_b.as_deref(),
        (cert.window_a(), cert.window_b()),
        cert.is_symmetric(),
    )?;
    let n = setup.basis().len();
    let (sa, sb) = cert.target();
    let mut residual: Vec<RatFunc> = setup
        .expand(sa, sb)?
        .iter()
        .map(|r| r.mul_poly(&cert.p))
        .collect();
    for e in &cert.g {
        // S(k+1) contributes g(k+1) a_{k+i+1} b_{k+j+1}
        let up = e.poly.shift_by(1);
        for (idx, r) in setup.expand(e.i + 1, e.j + 1)?.iter().enumerate() {
            if !r.is_zero() {
                residual[idx] = &residual[idx] - &r.mul_poly(&up);
            }
        }
        let here = setup.canonical(e.i, e.j);
        residual[here] = &residual[here] + &RatFunc::from_poly(e.poly.clone());
    }
    debug_assert_eq!(residual.len(), n);
    for (idx, r) in residual.iter().enumerate() {
        if !r.is_zero() {
            let (i, j) = setup.basis()[idx];
            return Err(TelescopeError::SymbolicResidualNonzero {
                i,
                j,
                residual: format!("({})/({})", r.num(), r.den()),
            });
        }
    }
    Ok(())
}

/// Symbolic check followed by the exact check
/// `Σ_{k<n} p(k) a_{k+s_a} b_{k+s_b} = S(n) - S(0)` for `1 <= n <= upto`.
pub fn certify(
    cert: &TelescoperCertificate,
    reg: &SequenceRegistry,
    upto: i64,
) -> Result<CertifyReport, TelescopeError> {
    certify_symbolic(cert, reg)?;
    let s0 = cert.antidifference_at(reg, 0)?;
    let mut sum = BigRat::zero();
    let mut spot_values = Vec::new();
    for n in 1..=upto {
        sum += cert.summand_at(reg, n - 1)?;
        let diff = cert.antidifference_at(reg, n)? - &s0;
        if diff != sum {
            return Err(TelescopeError::NumericMismatch {
                n,
                sum: format_rat(&sum),
                antidifference: format_rat(&diff),
            });
        }
        if spot_values.len() < 10 {
            spot_values.push(diff);
        }
    }
    Ok(CertifyReport {
        symbolic: true,
        checked_upto: upto,
        spot_values,
    })
}

/// Whether every `g_{i,j}` equals `q f_{i,j}` with `f_{i,j}` a polynomial
/// whose coefficient denominators already occur in `g_{i,j}`.
///
/// Over the rationals any nonzero constant divides everything, so the test
/// also rejects quotients that pick up new denominators: `9/2 k(k-1)` is
/// divisible by `k` but not by `2k`.
pub fn check_hl_mode(cert: &TelescoperCertificate, q: &Poly) -> bool {
    if q.is_zero() {
        return cert.g.iter().all(|e| e.poly.is_zero());
    }
    cert.g.iter().all(|e| match e.poly.divmod(q) {
        Ok((quot, rem)) => {
            rem.is_zero() && e.poly.denominator_lcm().is_multiple_of(&quot.denominator_lcm())
        }
        Err(_) => false,
    })
}

/// `g_{i,j} = q * quotient + remainder`, with the denominators of quotient
/// and remainder that share a prime with the numerator of `content(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedEntry {
    pub i: i64,
    pub j: i64,
    pub quotient: Poly,
    pub remainder: Poly,
    #[serde(serialize_with = "serialize_ints")]
    pub flagged: Vec<BigInt>,
}

fn serialize_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn reduce_mod(cert: &TelescoperCertificate, q: &Poly) -> Result<Vec<ReducedEntry>, TelescopeError> {
    let content = q.content();
    let cnum = content.numer().abs();
    cert.g
        .iter()
        .map(|e| {
            let (quotient, remainder) = e.poly.divmod(q)?;
            let mut flagged: Vec<BigInt> = Vec::new();
            for d in [quotient.denominator_lcm(), remainder.denominator_lcm()] {
                if !d.is_one() && !d.gcd(&cnum).is_one() && !flagged.contains(&d) {
                    flagged.push(d);
                }
            }
            Ok(ReducedEntry {
                i: e.i,
                j: e.j,
                quotient,
                remainder,
                flagged,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};
    use crate::telescoper::{reference, GEntry, ShiftWindow};

    fn reg() -> SequenceRegistry {
        SequenceRegistry::with_builtins()
    }

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn reference_certificates_pass() {
        let reg = reg();
        for c in [
            reference::w_square(),
            reference::t_cross_lower(),
            reference::t_cross_upper(),
            reference::t_weighted(),
        ] {
            certify(&c, &reg, 200).unwrap_or_else(|e| panic!("{}: {e}", c.pretty()));
        }
    }

    #[test]
    fn w_spot_values() {
        let r = certify(&reference::w_square(), &reg(), 200).unwrap();
        assert_eq!(r.spot_values[0], int(9));
        assert_eq!(r.spot_values[1], int(26));
    }

    #[test]
    fn perturbed_coefficient_fails() {
        let reg = reg();
        let mut c = reference::w_square();
        c.g[0].poly = &c.g[0].poly + &Poly::one();
        assert!(matches!(
            certify_symbolic(&c, &reg),
            Err(TelescopeError::SymbolicResidualNonzero { .. })
        ));
        let mut c = reference::t_weighted();
        c.p = &c.p + &Poly::var();
        assert!(certify(&c, &reg, 200).is_err());
    }

    #[test]
    fn hl_mode() {
        let w = reference::w_square();
        assert!(check_hl_mode(&w, &p("n")));
        assert!(!check_hl_mode(&w, &p("2n")));
        assert!(!check_hl_mode(&w, &p("n^2")));
        let mut empty = w.clone();
        empty.g.clear();
        assert!(check_hl_mode(&empty, &p("7n^3+1")));
        // each entry of the lower-window T certificate carries k^2
        assert!(check_hl_mode(&reference::t_cross_lower(), &p("k^2")));
        assert!(!check_hl_mode(&reference::t_cross_lower(), &p("k^3")));
    }

    #[test]
    fn reduce_mod_examples() {
        let cert = |g: &str| TelescoperCertificate {
            seq_a: "W".into(),
            seq_b: None,
            windows: vec![ShiftWindow::new(-2, 0)],
            target_shifts: vec![0],
            p: Poly::one(),
            g: vec![GEntry { i: -1, j: 0, poly: p(g) }],
        };
        let r = &reduce_mod(&cert("-3/2 n(n-7)"), &p("2n")).unwrap()[0];
        assert!(r.remainder.is_zero());
        assert_eq!(r.quotient, Poly::from_coeffs(vec![rat(21, 4), rat(-3, 4)]));
        assert_eq!(r.flagged, vec![BigInt::from(4)]);

        let r = &reduce_mod(&cert("2n"), &p("2n")).unwrap()[0];
        assert!(r.remainder.is_zero());
        assert_eq!(r.quotient, Poly::one());

        let r = &reduce_mod(&cert("9n"), &p("n^2")).unwrap()[0];
        assert_eq!(r.remainder, p("9n"));
        assert!(r.quotient.is_zero());
        assert!(r.flagged.is_empty());
    }
}
