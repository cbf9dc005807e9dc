//! Exact telescoping certificates and congruence checks for partial sums of
//! P-recursive sequences.

pub mod congruence;
pub mod exactmath;
pub mod sequences;
pub mod telescoper;
