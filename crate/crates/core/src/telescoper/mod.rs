//! Telescoping certificates for weighted (products of) P-recursive
//! sequences.
//!
//! Given `p(k) a_{k+s_a} b_{k+s_b}`, find polynomials `g_{i,j}` such that
//!
//! ```text
//! p(k) a_{k+s_a} b_{k+s_b} = Δ_k ( Σ_{i,j} g_{i,j}(k) a_{k+i} b_{k+j} ),
//! ```
//!
//! where `i` and `j` range over shift windows whose lengths equal the
//! recurrence orders. Shifts outside a window are rewritten through the
//! recurrence, which turns the identity into a linear system over the
//! rationals for the coefficients of the `g_{i,j}` (and, in discovery mode,
//! of `p`).

mod certificate;
mod certify;
mod reduce;
pub mod reference;
mod system;

pub use certificate::{GEntry, TelescoperCertificate};
pub use certify::{certify, certify_symbolic, check_hl_mode, reduce_mod, CertifyReport, ReducedEntry};
pub use reduce::{reduce_shift, ShiftReducer};
pub use system::{
    discover_weights, find_telescoper, reduced_system, Discovery, ReducedSystem, Solution, TelescopeProblem,
    UnknownKind, WeightTemplate,
};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactmath::ExactError;
use crate::sequences::SequenceError;

/// Default iterative-deepening limit for `g` degrees.
pub const DEFAULT_DEGREE_BOUND: usize = 6;

/// Contiguous shifts `lo..=hi` used as the basis `a_{k+lo}, ..., a_{k+hi}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftWindow {
    pub lo: i64,
    pub hi: i64,
}

impl ShiftWindow {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty shift window {lo}..{hi}");
        ShiftWindow { lo, hi }
    }

    /// `[-(d-1), 0]`, the backward window of an order-`d` recurrence.
    pub fn trailing(order: usize) -> Self {
        ShiftWindow::new(1 - order as i64, 0)
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: i64) -> bool {
        (self.lo..=self.hi).contains(&s)
    }

    /// Parses `lo..hi`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
        let lo: i64 = a.trim().parse().map_err(|e| format!("{e} in {s:?}"))?;
        let hi: i64 = b.trim().parse().map_err(|e| format!("{e} in {s:?}"))?;
        if lo > hi {
            return Err(format!("empty window {s:?}"));
        }
        Ok(ShiftWindow { lo, hi })
    }
}

impl fmt::Display for ShiftWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for ShiftWindow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShiftWindow {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[i64; 2]>::deserialize(d)?;
        if lo > hi {
            return Err(serde::de::Error::custom("empty shift window"));
        }
        Ok(ShiftWindow { lo, hi })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TelescopeError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("window {window} does not match recurrence order {order}")]
    WindowOrderMismatch { window: ShiftWindow, order: usize },
    #[error("backward reduction needs a nonzero trailing recurrence coefficient")]
    BackwardReductionImpossible,
    #[error("no telescoper with g-degree <= {deg_bound}")]
    NotFound { deg_bound: usize },
    #[error("symbolic residual at basis element ({i}, {j}) is {residual}")]
    SymbolicResidualNonzero { i: i64, j: i64, residual: String },
    #[error("partial sum mismatch at n = {n}: sum {sum}, S(n) - S(0) = {antidifference}")]
    NumericMismatch {
        n: i64,
        sum: String,
        antidifference: String,
    },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}
