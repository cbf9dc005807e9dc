//! Congruence and divisibility claims about partial sums, checked exactly
//! point by point.
//!
//! A claim `lhs ≡ rhs (mod M)` with rational sides holds at `n` when
//! `d = lhs - rhs` has a denominator coprime to `M` and `M` divides the
//! numerator of `d`. `M = 0` and claims without a modulus both mean `d = 0`.

mod catalogue;
mod expr;

pub use catalogue::{builtin_claims, claim_by_id, telescoped_sums};
pub use expr::{eval_sum, Expr};

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmath::{format_rat, rat_mod, BigRat};
use crate::sequences::{SequenceError, SequenceRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("{what} must be an integer, got {value}")]
    NotInteger { what: String, value: String },
    #[error("Legendre symbol needs an odd bottom >= 3, got {0}")]
    LegendreBottom(String),
    #[error("division by zero at n = {0}")]
    DivisionByZero(i64),
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("unknown claim {0:?}")]
    UnknownClaim(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    #[default]
    Any,
    Odd,
}

/// Points at which a claim is asserted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Domain {
    /// Every integer `n >= from`, minus `exclude`.
    Integers {
        from: i64,
        #[serde(default)]
        exclude: Vec<i64>,
    },
    /// Primes `p >= min`, minus `exclude`, optionally odd only.
    Primes {
        min: i64,
        #[serde(default)]
        exclude: Vec<i64>,
        #[serde(default)]
        parity: Parity,
    },
}

impl Domain {
    pub fn contains(&self, n: i64) -> bool {
        match self {
            Domain::Integers { from, exclude } => n >= *from && !exclude.contains(&n),
            Domain::Primes {
                min,
                exclude,
                parity,
            } => {
                n >= *min
                    && is_prime(n)
                    && !exclude.contains(&n)
                    && (*parity == Parity::Any || n % 2 == 1)
            }
        }
    }

    pub fn points(&self, lo: i64, hi: i64) -> Vec<i64> {
        match self {
            Domain::Integers { from, exclude } => ((*from).max(lo)..=hi)
                .filter(|n| !exclude.contains(n))
                .collect(),
            Domain::Primes {
                min,
                exclude,
                parity,
            } => primes_in((*min).max(lo), hi, exclude, *parity),
        }
    }
}

/// `lhs ≡ rhs (mod modulus)` over a domain, or `lhs = rhs` without a modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceClaim {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub lhs: Expr,
    #[serde(default = "zero_expr")]
    pub rhs: Expr,
    #[serde(default)]
    pub modulus: Option<Expr>,
    pub domain: Domain,
    /// Range checked when none is given.
    pub range: (i64, i64),
    /// Points outside the domain that are evaluated and reported, never failed.
    #[serde(default)]
    pub edge_points: Vec<i64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

fn zero_expr() -> Expr {
    Expr::int(0)
}

/// Values at a point that did not satisfy the claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub point: i64,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub modulus: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum PointOutcome {
    Pass,
    Fail(Failure),
    OutOfDomain,
}

/// Result of an edge point check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlaggedPoint {
    pub point: i64,
    pub holds: bool,
    pub lhs_residue: Option<String>,
    pub rhs_residue: Option<String>,
    pub modulus: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub range: (i64, i64),
    pub checked: usize,
    pub failures: Vec<Failure>,
    pub flagged: Vec<FlaggedPoint>,
    pub elapsed_ms: u128,
    pub pass: bool,
}

/// Whether `lhs ≡ rhs (mod m)` in the sense of the module docs.
pub fn congruent(lhs: &BigRat, rhs: &BigRat, m: Option<&BigInt>) -> bool {
    let d = lhs - rhs;
    match m {
        None => d.is_zero(),
        Some(m) if m.is_zero() => d.is_zero(),
        Some(m) => d.denom().gcd(m).is_one() && d.numer().is_multiple_of(m),
    }
}

/// Both sides and the modulus of a claim at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimValues {
    pub lhs: BigRat,
    pub rhs: BigRat,
    /// Absolute value of the modulus; `None` for identities.
    pub modulus: Option<BigInt>,
}

impl ClaimValues {
    pub fn holds(&self) -> bool {
        congruent(&self.lhs, &self.rhs, self.modulus.as_ref())
    }

    /// Residues of both sides modulo a positive modulus.
    pub fn residues(&self) -> (Option<String>, Option<String>) {
        (residue(&self.lhs, &self.modulus), residue(&self.rhs, &self.modulus))
    }
}

/// Evaluates both sides and the modulus at `n`, ignoring the domain.
pub fn evaluate_claim(c: &CongruenceClaim, n: i64, reg: &SequenceRegistry) -> Result<ClaimValues, CongruenceError> {
    let lhs = c.lhs.eval(n, reg)?;
    let rhs = c.rhs.eval(n, reg)?;
    let modulus = match &c.modulus {
        None => None,
        Some(m) => {
            let v = m.eval(n, reg)?;
            if !v.is_integer() {
                return Err(CongruenceError::NotInteger {
                    what: "modulus".into(),
                    value: format_rat(&v),
                });
            }
            Some(v.to_integer().abs())
        }
    };
    Ok(ClaimValues { lhs, rhs, modulus })
}

fn residue(x: &BigRat, m: &Option<BigInt>) -> Option<String> {
    match m {
        Some(m) if m.is_positive() => rat_mod(x, m).ok().map(|r| r.to_string()),
        _ => None,
    }
}

/// Evaluates the claim at one point; points outside the domain are skipped.
pub fn check_claim_at(c: &CongruenceClaim, n: i64, reg: &SequenceRegistry) -> PointOutcome {
    if !c.domain.contains(n) {
        return PointOutcome::OutOfDomain;
    }
    match evaluate_claim(c, n, reg) {
        Err(e) => PointOutcome::Fail(Failure {
            point: n,
            lhs: None,
            rhs: None,
            modulus: None,
            reason: e.to_string(),
        }),
        Ok(v) if congruent(&v.lhs, &v.rhs, v.modulus.as_ref()) => PointOutcome::Pass,
        Ok(v) => {
            let reason = match &v.modulus {
                Some(m) if !m.is_zero() && !(&v.lhs - &v.rhs).denom().gcd(m).is_one() => {
                    format!("denominator of lhs - rhs is not invertible modulo {m}")
                }
                Some(m) if !m.is_zero() => format!(
                    "lhs ≡ {}, rhs ≡ {} (mod {m})",
                    residue(&v.lhs, &v.modulus).unwrap_or_else(|| "?".into()),
                    residue(&v.rhs, &v.modulus).unwrap_or_else(|| "?".into()),
                ),
                _ => "sides differ".to_string(),
            };
            PointOutcome::Fail(Failure {
                point: n,
                lhs: Some(format_rat(&v.lhs)),
                rhs: Some(format_rat(&v.rhs)),
                modulus: v.modulus.map(|m| m.to_string()),
                reason,
            })
        }
    }
}

fn check_edge(c: &CongruenceClaim, n: i64, reg: &SequenceRegistry) -> FlaggedPoint {
    match evaluate_claim(c, n, reg) {
        Err(e) => FlaggedPoint {
            point: n,
            holds: false,
            lhs_residue: None,
            rhs_residue: None,
            modulus: None,
            detail: e.to_string(),
        },
        Ok(v) => {
            let holds = congruent(&v.lhs, &v.rhs, v.modulus.as_ref());
            FlaggedPoint {
                point: n,
                holds,
                lhs_residue: residue(&v.lhs, &v.modulus),
                rhs_residue: residue(&v.rhs, &v.modulus),
                modulus: v.modulus.as_ref().map(|m| m.to_string()),
                detail: format!("lhs = {}, rhs = {}", format_rat(&v.lhs), format_rat(&v.rhs)),
            }
        }
    }
}

/// Fills the shared sequence tables up to the largest index needed.
fn prefill(c: &CongruenceClaim, hi: i64, reg: &SequenceRegistry) {
    let mut extent = BTreeMap::new();
    let mut exprs = vec![&c.lhs, &c.rhs];
    exprs.extend(c.modulus.as_ref());
    for e in exprs {
        e.sequence_extent(hi, &mut extent);
    }
    for (name, idx) in extent {
        // errors resurface, per point, during checking
        let _ = reg.term(&name, idx);
    }
}

/// Checks every domain point in `[lo, hi]` and the claim's edge points in
/// that range. `jobs` caps the worker threads; `None` uses the global pool.
pub fn verify_claim_range(
    c: &CongruenceClaim,
    lo: i64,
    hi: i64,
    reg: &SequenceRegistry,
    jobs: Option<usize>,
) -> VerificationReport {
    let start = Instant::now();
    let points = c.domain.points(lo, hi);
    if let Some(&top) = points.iter().max() {
        prefill(c, top, reg);
    }
    let run = || -> Vec<PointOutcome> {
        points.par_iter().map(|&n| check_claim_at(c, n, reg)).collect()
    };
    let outcomes = match jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    };
    let failures: Vec<Failure> = outcomes
        .into_iter()
        .filter_map(|o| match o {
            PointOutcome::Fail(f) => Some(f),
            _ => None,
        })
        .collect();
    let flagged = c
        .edge_points
        .iter()
        .filter(|&&n| (lo..=hi).contains(&n))
        .map(|&n| check_edge(c, n, reg))
        .collect();
    VerificationReport {
        claim: c.id.clone(),
        range: (lo, hi),
        checked: points.len(),
        pass: failures.is_empty(),
        failures,
        flagged,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes in `[lo, hi]` not in `exclude`, by a sieve of Eratosthenes.
pub fn primes_in(lo: i64, hi: i64, exclude: &[i64], parity: Parity) -> Vec<i64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let hi_u = hi as usize;
    let mut sieve = vec![true; hi_u + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= hi_u {
        if sieve[i] {
            for j in (i * i..=hi_u).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (lo.max(2) as usize..=hi_u)
        .filter(|&p| sieve[p])
        .map(|p| p as i64)
        .filter(|p| !exclude.contains(p))
        .filter(|p| parity == Parity::Any || p % 2 == 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    #[test]
    fn primes_examples() {
        assert_eq!(primes_in(2, 20, &[3], Parity::Any), vec![2, 5, 7, 11, 13, 17, 19]);
        assert_eq!(primes_in(3, 10, &[], Parity::Odd), vec![3, 5, 7]);
        assert_eq!(primes_in(990, 1000, &[], Parity::Any), vec![991, 997]);
        assert!(primes_in(20, 10, &[], Parity::Any).is_empty());
        let sieved = primes_in(0, 2000, &[], Parity::Any);
        let trial: Vec<i64> = (0..=2000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, trial);
    }

    #[test]
    fn rational_congruence() {
        let m = BigInt::from(343);
        // 144079992 against -1421/3 modulo 7^3
        assert!(congruent(&int(144079992), &rat(-1421, 3), Some(&m)));
        assert!(!congruent(&int(144079993), &rat(-1421, 3), Some(&m)));
        // denominator sharing a factor with the modulus
        assert!(!congruent(&rat(1, 7), &int(0), Some(&m)));
        assert!(congruent(&int(5), &int(5), Some(&BigInt::zero())));
        assert!(!congruent(&int(5), &int(6), Some(&BigInt::zero())));
        assert!(congruent(&int(3), &int(3), None));
    }

    #[test]
    fn domains() {
        let d = Domain::Primes {
            min: 3,
            exclude: vec![],
            parity: Parity::Odd,
        };
        assert!(d.contains(3) && !d.contains(2) && !d.contains(9));
        assert_eq!(d.points(1, 12), vec![3, 5, 7, 11]);
        let d = Domain::Integers {
            from: 2,
            exclude: vec![3],
        };
        assert_eq!(d.points(0, 5), vec![2, 4, 5]);
        let js = serde_json::to_value(&d).unwrap();
        assert_eq!(js, serde_json::json!({"kind": "integers", "from": 2, "exclude": [3]}));
        let back: Domain = serde_json::from_value(serde_json::json!({"kind": "integers", "from": 2})).unwrap();
        assert_eq!(back.points(0, 3), vec![2, 3]);
    }
}
