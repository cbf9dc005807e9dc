//! P-recursive sequences: recurrences with initial data, exact forward
//! evaluation, direct binomial-sum formulas, and derived linear
//! combinations of shifts.

mod registry;
mod serde_initial;
mod sums;

pub use registry::{builtin, SequenceRegistry, SequenceSource};
pub use sums::{binomial, central_trinomial_by_expansion, Affine, Bound, Factor, SumFormula};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmath::{BigRat, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("leading recurrence coefficient vanishes at n = {0}")]
    LeadingCoefficientVanishes(i64),
    #[error("term at index {0} is not an integer")]
    NonIntegerTerm(i64),
    #[error("sequence {name}: index {index} is below the first known index {first}")]
    IndexOutOfRange { name: String, index: i64, first: i64 },
    #[error("summand coefficient has a pole at k = {k}")]
    CoefficientPole { k: i64 },
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("direct formula and recurrence disagree at n = {n}: {direct} vs {recurrence}")]
    Mismatch {
        n: i64,
        direct: String,
        recurrence: String,
    },
    #[error("recurrence residual at n = {n} is {residual}, expected 0")]
    ResidualNonzero { n: i64, residual: String },
    #[error("sequence {0} has no direct formula")]
    MissingDirect(String),
    #[error("direct formulas cannot reference other sequences")]
    SequenceInDirectFormula,
    #[error("invalid recurrence: {0}")]
    BadRecurrence(String),
    #[error("invalid initial data: {0}")]
    BadInitial(String),
    #[error("unknown sequence {0:?}")]
    UnknownSequence(String),
}

/// `sum_{i=0}^{d} c_i(n) a_{n+i} = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRecurrence")]
pub struct Recurrence {
    coeffs: Vec<Poly>,
}

#[derive(Deserialize)]
struct RawRecurrence {
    coeffs: Vec<Poly>,
}

impl TryFrom<RawRecurrence> for Recurrence {
    type Error = SequenceError;
    fn try_from(raw: RawRecurrence) -> Result<Self, SequenceError> {
        Recurrence::new(raw.coeffs)
    }
}

impl Recurrence {
    pub fn new(coeffs: Vec<Poly>) -> Result<Self, SequenceError> {
        if coeffs.len() < 2 {
            return Err(SequenceError::BadRecurrence(
                "order must be at least 1".into(),
            ));
        }
        if coeffs.last().is_some_and(Poly::is_zero) {
            return Err(SequenceError::BadRecurrence(
                "leading coefficient is the zero polynomial".into(),
            ));
        }
        Ok(Recurrence { coeffs })
    }

    /// Shorthand from integer coefficient lists (ascending powers of n).
    pub fn from_ints(coeffs: &[&[i64]]) -> Result<Self, SequenceError> {
        Recurrence::new(coeffs.iter().map(|c| Poly::from_ints(c)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn leading(&self) -> &Poly {
        &self.coeffs[self.order()]
    }

    /// `sum_i c_i(n) a_{n+i}` for the given window `a_n .. a_{n+d}`.
    pub fn residual(&self, n: i64, window: &[BigInt]) -> BigRat {
        debug_assert_eq!(window.len(), self.coeffs.len());
        self.coeffs
            .iter()
            .zip(window)
            .fold(BigRat::zero(), |acc, (c, a)| {
                acc + c.eval_i64(n) * BigRat::from_integer(a.clone())
            })
    }

    /// Solves the recurrence at `n` for `a_{n+d}` given `a_n .. a_{n+d-1}`.
    fn solve_top(&self, n: i64, lower: &[BigInt]) -> Result<BigInt, SequenceError> {
        let d = self.order();
        let lead = self.coeffs[d].eval_i64(n);
        if lead.is_zero() {
            return Err(SequenceError::LeadingCoefficientVanishes(n));
        }
        let rest = self.coeffs[..d]
            .iter()
            .zip(lower)
            .fold(BigRat::zero(), |acc, (c, a)| {
                acc + c.eval_i64(n) * BigRat::from_integer(a.clone())
            });
        let value = -rest / lead;
        if !value.is_integer() {
            return Err(SequenceError::NonIntegerTerm(n + d as i64));
        }
        Ok(value.to_integer())
    }
}

/// A P-recursive sequence: recurrence plus contiguous initial values.
///
/// Indices above the largest initial index are produced by solving the
/// recurrence for its top term; stored initial values are never
/// overwritten, so negative-index extensions are plain data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceDef {
    pub name: String,
    pub recurrence: Recurrence,
    #[serde(with = "serde_initial")]
    pub initial: BTreeMap<i64, BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct: Option<SumFormula>,
}

impl SequenceDef {
    pub fn new(
        name: &str,
        recurrence: Recurrence,
        initial: BTreeMap<i64, BigInt>,
        direct: Option<SumFormula>,
    ) -> Result<Self, SequenceError> {
        let def = SequenceDef {
            name: name.to_string(),
            recurrence,
            initial,
            direct,
        };
        def.validate()?;
        Ok(def)
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        let d = self.recurrence.order();
        let (Some(lo), Some(hi)) = (self.first_index(), self.initial.keys().next_back()) else {
            return Err(SequenceError::BadInitial("no initial values".into()));
        };
        if (hi - lo + 1) as usize != self.initial.len() {
            return Err(SequenceError::BadInitial(
                "initial indices must be contiguous".into(),
            ));
        }
        if self.initial.len() < d {
            return Err(SequenceError::BadInitial(format!(
                "need at least {d} initial values for an order-{d} recurrence"
            )));
        }
        if self.direct.as_ref().is_some_and(SumFormula::references_sequences) {
            return Err(SequenceError::SequenceInDirectFormula);
        }
        Ok(())
    }

    pub fn first_index(&self) -> Option<i64> {
        self.initial.keys().next().copied()
    }

    fn last_initial(&self) -> i64 {
        *self.initial.keys().next_back().expect("validated")
    }

    /// Smallest `n` at which the recurrence is used or at which the direct
    /// formula is defined; residuals are required to vanish from here on.
    pub fn residual_start(&self) -> i64 {
        let computed_from = self.last_initial() + 1 - self.recurrence.order() as i64;
        computed_from.min(0)
    }
}

/// Memoized contiguous prefix of a sequence.
#[derive(Clone, Debug)]
pub struct TermTable {
    first: i64,
    values: Vec<BigInt>,
}

impl TermTable {
    pub fn new(def: &SequenceDef) -> Self {
        TermTable {
            first: def.first_index().expect("validated"),
            values: def.initial.values().cloned().collect(),
        }
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    /// Largest index currently stored.
    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    pub fn get(&self, index: i64) -> Option<&BigInt> {
        if index < self.first {
            return None;
        }
        self.values.get((index - self.first) as usize)
    }

    pub fn extend_to(&mut self, def: &SequenceDef, hi: i64) -> Result<(), SequenceError> {
        let d = def.recurrence.order();
        while self.last() < hi {
            let top = self.last() + 1;
            let n = top - d as i64;
            let start = self.values.len() - d;
            let next = def.recurrence.solve_top(n, &self.values[start..])?;
            self.values.push(next);
        }
        Ok(())
    }

    pub fn slice(&self, lo: i64, hi: i64) -> &[BigInt] {
        let a = (lo - self.first) as usize;
        let b = (hi - self.first) as usize;
        &self.values[a..=b]
    }
}

/// Exact terms `a_lo ..= a_hi`.
pub fn eval_terms(def: &SequenceDef, lo: i64, hi: i64) -> Result<Vec<BigInt>, SequenceError> {
    let mut table = TermTable::new(def);
    if lo < table.first() {
        return Err(SequenceError::IndexOutOfRange {
            name: def.name.clone(),
            index: lo,
            first: table.first(),
        });
    }
    if hi < lo {
        return Ok(Vec::new());
    }
    table.extend_to(def, hi)?;
    Ok(table.slice(lo, hi).to_vec())
}

/// Evaluates a direct formula; it may not reference other sequences.
pub fn eval_direct(f: &SumFormula, n: i64) -> Result<BigRat, SequenceError> {
    f.eval_with(n, |_, _| Err(SequenceError::SequenceInDirectFormula))
}

/// Outcome of [`check_recurrence_consistency`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub name: String,
    pub checked_upto: i64,
    pub residuals_from: i64,
    /// Residuals at negative indices below `residuals_from`, where the
    /// recurrence is never used for evaluation. Informational only.
    pub notes: Vec<String>,
}

/// Checks the direct formula against recurrence evaluation on `0..=upto`
/// and that every recurrence residual vanishes.
pub fn check_recurrence_consistency(
    def: &SequenceDef,
    upto: i64,
) -> Result<ConsistencyReport, SequenceError> {
    let direct = def
        .direct
        .as_ref()
        .ok_or_else(|| SequenceError::MissingDirect(def.name.clone()))?;
    let mut table = TermTable::new(def);
    table.extend_to(def, upto)?;
    for n in 0..=upto {
        let want = eval_direct(direct, n)?;
        let got = table.get(n).expect("extended");
        if want != BigRat::from_integer(got.clone()) {
            return Err(SequenceError::Mismatch {
                n,
                direct: want.to_string(),
                recurrence: got.to_string(),
            });
        }
    }
    let d = def.recurrence.order() as i64;
    let start = def.residual_start();
    let mut notes = Vec::new();
    for n in table.first()..=upto - d {
        let r = def.recurrence.residual(n, table.slice(n, n + d));
        if r.is_zero() {
            continue;
        }
        if n < start {
            notes.push(format!(
                "residual {r} at n = {n} (below the evaluated range; initial data only)"
            ));
        } else {
            return Err(SequenceError::ResidualNonzero {
                n,
                residual: r.to_string(),
            });
        }
    }
    Ok(ConsistencyReport {
        name: def.name.clone(),
        checked_upto: upto,
        residuals_from: start,
        notes,
    })
}

/// `true` iff every term on `0..=upto` is odd.
pub fn check_parity_odd(def: &SequenceDef, upto: i64) -> Result<bool, SequenceError> {
    Ok(eval_terms(def, 0, upto)?.iter().all(Integer::is_odd))
}

/// `sum_j weight_j * base_{n + shift_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedSequence {
    pub name: String,
    pub base: SequenceDef,
    #[serde(with = "crate::exactmath::serde_rat::shift_weights")]
    pub combo: Vec<(i64, BigRat)>,
    /// Set only by [`DerivedSequence::verify_integrality`].
    #[serde(skip)]
    integral_upto: Option<i64>,
}

impl DerivedSequence {
    pub fn new(name: &str, base: SequenceDef, combo: Vec<(i64, BigRat)>) -> Self {
        DerivedSequence {
            name: name.to_string(),
            base,
            combo,
            integral_upto: None,
        }
    }

    pub fn integral_upto(&self) -> Option<i64> {
        self.integral_upto
    }

    /// Checks integrality on `0..=upto` and records it.
    pub fn verify_integrality(&mut self, upto: i64) -> Result<(), SequenceError> {
        derived_terms(self, 0, upto)?;
        self.integral_upto = Some(upto);
        Ok(())
    }

    fn shift_span(&self) -> (i64, i64) {
        let lo = self.combo.iter().map(|(s, _)| *s).min().unwrap_or(0);
        let hi = self.combo.iter().map(|(s, _)| *s).max().unwrap_or(0);
        (lo, hi)
    }

    pub(crate) fn value_from(
        &self,
        n: i64,
        base: impl Fn(i64) -> Result<BigInt, SequenceError>,
    ) -> Result<BigInt, SequenceError> {
        let mut acc = BigRat::zero();
        for (s, w) in &self.combo {
            acc += w * BigRat::from_integer(base(n + s)?);
        }
        if !acc.is_integer() {
            return Err(SequenceError::NonIntegerTerm(n));
        }
        Ok(acc.to_integer())
    }
}

/// Exact, integrality-checked values of a derived sequence on `lo..=hi`.
pub fn derived_terms(ds: &DerivedSequence, lo: i64, hi: i64) -> Result<Vec<BigInt>, SequenceError> {
    if hi < lo {
        return Ok(Vec::new());
    }
    let (smin, smax) = ds.shift_span();
    let base_lo = lo + smin;
    let base = eval_terms(&ds.base, base_lo, hi + smax)?;
    (lo..=hi)
        .map(|n| ds.value_from(n, |i| Ok(base[(i - base_lo) as usize].clone())))
        .collect()
}

/// Checks that `rec` annihilates the derived sequence for `n + order <= upto`.
pub fn check_derived_recurrence(
    ds: &DerivedSequence,
    rec: &Recurrence,
    upto: i64,
) -> Result<(), SequenceError> {
    let d = rec.order() as i64;
    let terms = derived_terms(ds, 0, upto)?;
    for n in 0..=upto - d {
        let r = rec.residual(n, &terms[n as usize..=(n + d) as usize]);
        if !r.is_zero() {
            return Err(SequenceError::ResidualNonzero {
                n,
                residual: r.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn w_and_t_prefixes() {
        assert_eq!(eval_terms(&builtin::w(), 0, 4).unwrap(), ints(&[-1, -1, 1, 5, 13]));
        assert_eq!(
            eval_terms(&builtin::t(), 0, 8).unwrap(),
            ints(&[1, 1, 3, 7, 19, 51, 141, 393, 1107])
        );
        assert_eq!(eval_terms(&builtin::w(), -2, -1).unwrap(), ints(&[0, -1]));
    }

    #[test]
    fn below_first_index_is_an_error() {
        assert!(matches!(
            eval_terms(&builtin::w(), -3, 0),
            Err(SequenceError::IndexOutOfRange { first: -2, .. })
        ));
    }

    #[test]
    fn direct_formulas_small_cases() {
        let w = builtin::w();
        assert_eq!(eval_direct(w.direct.as_ref().unwrap(), 0).unwrap(), int(-1));
        let t = builtin::t();
        assert_eq!(eval_direct(t.direct.as_ref().unwrap(), 4).unwrap(), int(19));
        assert_eq!(eval_direct(&builtin::trinomial_alt_formula(), 4).unwrap(), int(19));
        assert_eq!(eval_direct(t.direct.as_ref().unwrap(), 0).unwrap(), int(1));
        assert_eq!(eval_direct(&builtin::trinomial_alt_formula(), 0).unwrap(), int(1));
    }

    #[test]
    fn consistency_of_builtins() {
        let rep = check_recurrence_consistency(&builtin::w(), 60).unwrap();
        assert_eq!(rep.residuals_from, -1);
        // the recurrence is not satisfied by the stored values at n = -2, -3
        assert!(!rep.notes.is_empty());
        check_recurrence_consistency(&builtin::t(), 60).unwrap();
        check_recurrence_consistency(&builtin::central_binomial(), 60).unwrap();
    }

    #[test]
    fn corrupted_initial_value_is_caught() {
        let mut w = builtin::w();
        w.initial.insert(0, BigInt::from(0));
        assert!(matches!(
            check_recurrence_consistency(&w, 5),
            Err(SequenceError::Mismatch { n: 0, .. })
        ));
    }

    #[test]
    fn leading_coefficient_vanishing() {
        // n a_{n+1} = a_n vanishes at n = 0
        let rec = Recurrence::from_ints(&[&[-1], &[0, 1]]).unwrap();
        let def = SequenceDef::new("bad", rec, [(0, BigInt::from(1))].into(), None).unwrap();
        assert_eq!(
            eval_terms(&def, 0, 2),
            Err(SequenceError::LeadingCoefficientVanishes(0))
        );
    }

    #[test]
    fn non_integer_term_detected() {
        // 2 a_{n+1} = a_n
        let rec = Recurrence::from_ints(&[&[-1], &[2]]).unwrap();
        let def = SequenceDef::new("half", rec, [(0, BigInt::from(1))].into(), None).unwrap();
        assert_eq!(eval_terms(&def, 0, 1), Err(SequenceError::NonIntegerTerm(1)));
    }

    #[test]
    fn parity() {
        assert!(check_parity_odd(&builtin::w(), 200).unwrap());
        assert!(check_parity_odd(&builtin::t(), 200).unwrap());
        // a_n = 2(n+1): (n+1) a_{n+1} - (n+2) a_n = 0
        let rec = Recurrence::from_ints(&[&[-2, -1], &[1, 1]]).unwrap();
        let evens = SequenceDef::new("evens", rec, [(0, BigInt::from(2))].into(), None).unwrap();
        assert_eq!(eval_terms(&evens, 0, 3).unwrap(), ints(&[2, 4, 6, 8]));
        assert!(!check_parity_odd(&evens, 10).unwrap());
    }

    #[test]
    fn derived_t_sequence() {
        let mut t = builtin::small_t();
        assert_eq!(derived_terms(&t, 0, 4).unwrap(), ints(&[-1, 0, -1, -1, -3]));
        check_derived_recurrence(&t, &builtin::small_t_recurrence(), 100).unwrap();
        assert_eq!(t.integral_upto(), None);
        t.verify_integrality(50).unwrap();
        assert_eq!(t.integral_upto(), Some(50));

        let zero = DerivedSequence::new("z", builtin::t(), vec![(0, int(1)), (0, int(-1))]);
        assert!(derived_terms(&zero, 0, 20).unwrap().iter().all(Zero::is_zero));

        let half = DerivedSequence::new("h", builtin::t(), vec![(0, crate::exactmath::rat(1, 2))]);
        assert_eq!(derived_terms(&half, 0, 3), Err(SequenceError::NonIntegerTerm(0)));
    }

    #[test]
    fn validation() {
        let rec = Recurrence::from_ints(&[&[1], &[0], &[1]]).unwrap();
        assert!(SequenceDef::new("x", rec.clone(), [(0, BigInt::from(1))].into(), None).is_err());
        assert!(SequenceDef::new(
            "x",
            rec,
            [(0, BigInt::from(1)), (2, BigInt::from(1))].into(),
            None
        )
        .is_err());
        assert!(Recurrence::from_ints(&[&[1], &[]]).is_err());
        assert!(Recurrence::from_ints(&[&[1]]).is_err());
    }

    #[test]
    fn sequence_json_roundtrip() {
        let w = builtin::w();
        let js = serde_json::to_value(&w).unwrap();
        assert_eq!(js["initial"]["-1"], "-1");
        assert_eq!(js["recurrence"]["coeffs"][3], serde_json::json!(["3", "1"]));
        assert_eq!(js["direct"]["upper"], "floor(n/2)");
        let back: SequenceDef = serde_json::from_value(js).unwrap();
        assert_eq!(back, w);
    }
}
