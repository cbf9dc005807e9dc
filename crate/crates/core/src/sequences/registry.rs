use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{DerivedSequence, SequenceDef, SequenceError, TermTable};

/// Anything that can be looked up by name and evaluated term by term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSource {
    Recursive(SequenceDef),
    Derived(DerivedSequence),
}

impl SequenceSource {
    pub fn name(&self) -> &str {
        match self {
            SequenceSource::Recursive(d) => &d.name,
            SequenceSource::Derived(d) => &d.name,
        }
    }
}

/// Named sequences with a shared memo of exact terms.
///
/// Lookups take a read lock; extending a prefix takes the write lock, so
/// filling the largest needed index first lets later parallel readers run
/// without contention.
#[derive(Debug, Default)]
pub struct SequenceRegistry {
    sources: BTreeMap<String, SequenceSource>,
    tables: RwLock<HashMap<String, TermTable>>,
}

impl Clone for SequenceRegistry {
    fn clone(&self) -> Self {
        SequenceRegistry {
            sources: self.sources.clone(),
            tables: RwLock::new(self.tables.read().expect("poisoned").clone()),
        }
    }
}

impl SequenceRegistry {
    pub fn new() -> Self {
        SequenceRegistry::default()
    }

    /// `W`, `T`, `C` (central binomial), `one`, and the derived `t`.
    pub fn with_builtins() -> Self {
        let mut r = SequenceRegistry::new();
        for def in [
            builtin::w(),
            builtin::t(),
            builtin::central_binomial(),
            builtin::one(),
        ] {
            r.insert(SequenceSource::Recursive(def));
        }
        r.insert(SequenceSource::Derived(builtin::small_t()));
        r
    }

    /// Adds or replaces a sequence, discarding any memoized terms for it.
    pub fn insert(&mut self, src: SequenceSource) {
        let name = src.name().to_string();
        self.tables
            .get_mut()
            .expect("poisoned")
            .retain(|k, _| k != &name && !k.starts_with(&format!("{name}/")));
        self.sources.insert(name, src);
    }

    pub fn get(&self, name: &str) -> Option<&SequenceSource> {
        self.sources.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sources.keys().map(String::as_str)
    }

    /// The recursive definition behind `name`.
    pub fn def(&self, name: &str) -> Result<&SequenceDef, SequenceError> {
        match self.sources.get(name) {
            Some(SequenceSource::Recursive(d)) => Ok(d),
            Some(SequenceSource::Derived(_)) => Err(SequenceError::BadRecurrence(format!(
                "{name} is a derived sequence without its own recurrence"
            ))),
            None => Err(SequenceError::UnknownSequence(name.to_string())),
        }
    }

    pub fn term(&self, name: &str, index: i64) -> Result<BigInt, SequenceError> {
        match self.sources.get(name) {
            Some(SequenceSource::Recursive(d)) => self.table_value(name, d, index),
            Some(SequenceSource::Derived(ds)) => {
                let key = format!("{name}/base");
                ds.value_from(index, |i| self.table_value(&key, &ds.base, i))
            }
            None => Err(SequenceError::UnknownSequence(name.to_string())),
        }
    }

    pub fn terms(&self, name: &str, lo: i64, hi: i64) -> Result<Vec<BigInt>, SequenceError> {
        if let Some(SequenceSource::Recursive(d)) = self.sources.get(name) {
            if hi >= lo {
                self.table_value(name, d, hi)?;
            }
        }
        (lo..=hi).map(|i| self.term(name, i)).collect()
    }

    fn table_value(&self, key: &str, def: &SequenceDef, index: i64) -> Result<BigInt, SequenceError> {
        {
            let tables = self.tables.read().expect("poisoned");
            if let Some(v) = tables.get(key).and_then(|t| t.get(index)) {
                return Ok(v.clone());
            }
        }
        let first = def.first_index().expect("validated");
        if index < first {
            return Err(SequenceError::IndexOutOfRange {
                name: def.name.clone(),
                index,
                first,
            });
        }
        let mut tables = self.tables.write().expect("poisoned");
        let table = tables
            .entry(key.to_string())
            .or_insert_with(|| TermTable::new(def));
        table.extend_to(def, index)?;
        Ok(table.get(index).expect("extended").clone())
    }
}

/// Built-in sequence definitions.
pub mod builtin {
    use std::collections::BTreeMap;

    use num_bigint::BigInt;

    use crate::exactmath::{int, rat, Poly, RatFunc};
    use crate::sequences::{Bound, DerivedSequence, Factor, Recurrence, SequenceDef, SumFormula};

    fn initial(pairs: &[(i64, i64)]) -> BTreeMap<i64, BigInt> {
        pairs.iter().map(|&(k, v)| (k, BigInt::from(v))).collect()
    }

    /// `W_n = sum_k binom(n, 2k) binom(2k, k) / (2k - 1)`, with
    /// `(n+3) W_{n+3} = -3(n+1) W_n + (n-5) W_{n+1} + (3n+7) W_{n+2}` and the
    /// extension `W_{-1} = -1`, `W_{-2} = 0`.
    pub fn w() -> SequenceDef {
        let rec = Recurrence::from_ints(&[&[3, 3], &[5, -1], &[-7, -3], &[3, 1]])
            .expect("valid recurrence");
        let direct = SumFormula::new(
            vec![Factor::binom("n", "2k"), Factor::binom("2k", "k")],
            RatFunc::new(Poly::one(), Poly::from_ints(&[-1, 2])).expect("nonzero"),
            Bound::constant(0),
            Bound::floor_div(1, 0, 2),
        );
        SequenceDef::new("W", rec, initial(&[(-2, 0), (-1, -1), (0, -1), (1, -1)]), Some(direct))
            .expect("valid definition")
    }

    /// Central trinomial coefficients, `(n+2) T_{n+2} = (2n+3) T_{n+1} + 3(n+1) T_n`,
    /// with `T_{-1} = 0` (the coefficient of `x^{-1}`).
    pub fn t() -> SequenceDef {
        let rec =
            Recurrence::from_ints(&[&[-3, -3], &[-3, -2], &[2, 1]]).expect("valid recurrence");
        let direct = SumFormula::new(
            vec![Factor::binom("n", "2k"), Factor::binom("2k", "k")],
            RatFunc::one(),
            Bound::constant(0),
            Bound::floor_div(1, 0, 2),
        );
        SequenceDef::new("T", rec, initial(&[(-1, 0), (0, 1), (1, 1)]), Some(direct))
            .expect("valid definition")
    }

    /// `T_n = sum_{l=0}^{n} binom(n, l) binom(n - l, l)`.
    pub fn trinomial_alt_formula() -> SumFormula {
        SumFormula::new(
            vec![Factor::binom("n", "k"), Factor::binom("n-k", "k")],
            RatFunc::one(),
            Bound::constant(0),
            Bound::affine(1, 0),
        )
    }

    /// `binom(2n, n)` with `(n+1) c_{n+1} = (4n+2) c_n`.
    pub fn central_binomial() -> SequenceDef {
        let rec = Recurrence::from_ints(&[&[-2, -4], &[1, 1]]).expect("valid recurrence");
        let direct = SumFormula::new(
            vec![Factor::binom("2n", "n")],
            RatFunc::one(),
            Bound::constant(0),
            Bound::constant(0),
        );
        SequenceDef::new("C", rec, initial(&[(0, 1)]), Some(direct)).expect("valid definition")
    }

    /// The constant sequence 1, `a_{n+1} - a_n = 0`.
    pub fn one() -> SequenceDef {
        let rec = Recurrence::from_ints(&[&[-1], &[1]]).expect("valid recurrence");
        SequenceDef::new("one", rec, initial(&[(0, 1)]), None).expect("valid definition")
    }

    /// `t_n = (T_{n+1} - 3 T_n) / 2`.
    pub fn small_t() -> DerivedSequence {
        DerivedSequence::new("t", t(), vec![(1, rat(1, 2)), (0, int(-3) / int(2))])
    }

    /// `3(n+1) t_n + 2(n+1) t_{n+1} - (n+3) t_{n+2} = 0`.
    pub fn small_t_recurrence() -> Recurrence {
        Recurrence::new(vec![
            Poly::from_ints(&[3, 3]),
            Poly::from_ints(&[2, 2]),
            Poly::from_ints(&[-3, -1]),
        ])
        .expect("valid recurrence")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookups() {
        let r = SequenceRegistry::with_builtins();
        assert_eq!(r.term("W", 4).unwrap(), BigInt::from(13));
        assert_eq!(r.term("W", -1).unwrap(), BigInt::from(-1));
        assert_eq!(r.term("t", 4).unwrap(), BigInt::from(-3));
        assert_eq!(r.term("C", 5).unwrap(), BigInt::from(252));
        assert_eq!(r.term("one", 40).unwrap(), BigInt::from(1));
        assert!(matches!(r.term("nope", 0), Err(SequenceError::UnknownSequence(_))));
        assert!(r.def("t").is_err());
        assert_eq!(
            r.terms("T", 0, 4).unwrap(),
            [1, 1, 3, 7, 19].map(BigInt::from).to_vec()
        );
    }

    #[test]
    fn insert_replaces_memo() {
        let mut r = SequenceRegistry::with_builtins();
        assert_eq!(r.term("W", 3).unwrap(), BigInt::from(5));
        let mut w = builtin::w();
        w.initial.insert(1, BigInt::from(0));
        r.insert(SequenceSource::Recursive(w));
        assert_ne!(r.term("W", 3).unwrap(), BigInt::from(5));
    }

    #[test]
    fn parallel_reads_agree() {
        use rayon::prelude::*;
        let r = SequenceRegistry::with_builtins();
        let serial: Vec<BigInt> = (0..300).map(|n| r.term("T", n).unwrap()).collect();
        let fresh = SequenceRegistry::with_builtins();
        let par: Vec<BigInt> = (0..300).into_par_iter().map(|n| fresh.term("T", n).unwrap()).collect();
        assert_eq!(serial, par);
    }
}
