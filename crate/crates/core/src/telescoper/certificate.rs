use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmath::{BigRat, Poly};
use crate::sequences::{SequenceError, SequenceRegistry};

use super::{ShiftWindow, TelescopeError};

/// One `g_{i,j}(k) a_{k+i} b_{k+j}` term of the antidifference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GEntry {
    pub i: i64,
    pub j: i64,
    pub poly: Poly,
}

/// `p(k) a_{k+s_a} b_{k+s_b} = Δ_k S(k)` with `S(k) = Σ g_{i,j}(k) a_{k+i} b_{k+j}`.
///
/// Without a second sequence, `b` is the constant sequence 1 with window
/// `[0, 0]` and every entry has `j = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelescoperCertificate {
    #[serde(rename = "seqA")]
    pub seq_a: String,
    #[serde(rename = "seqB")]
    pub seq_b: Option<String>,
    pub windows: Vec<ShiftWindow>,
    pub target_shifts: Vec<i64>,
    pub p: Poly,
    pub g: Vec<GEntry>,
}

impl TelescoperCertificate {
    pub fn window_a(&self) -> ShiftWindow {
        self.windows[0]
    }

    pub fn window_b(&self) -> ShiftWindow {
        self.windows
            .get(1)
            .copied()
            .unwrap_or(ShiftWindow { lo: 0, hi: 0 })
    }

    pub fn target(&self) -> (i64, i64) {
        (
            self.target_shifts[0],
            self.target_shifts.get(1).copied().unwrap_or(0),
        )
    }

    /// Same sequence on both sides over the same window; basis pairs are
    /// then unordered.
    pub fn is_symmetric(&self) -> bool {
        self.seq_b.as_deref() == Some(self.seq_a.as_str()) && self.window_a() == self.window_b()
    }

    /// Shape checks that do not need the sequences themselves.
    pub fn validate_shape(&self) -> Result<(), TelescopeError> {
        let bad = |m: &str| Err(TelescopeError::InvalidCertificate(m.to_string()));
        let sides = if self.seq_b.is_some() { 2 } else { 1 };
        if self.windows.len() != sides {
            return bad("one window per sequence is required");
        }
        if self.target_shifts.len() != sides {
            return bad("one target shift per sequence is required");
        }
        let (wa, wb) = (self.window_a(), self.window_b());
        for e in &self.g {
            if !wa.contains(e.i) || !wb.contains(e.j) {
                return Err(TelescopeError::InvalidCertificate(format!(
                    "entry ({}, {}) lies outside the windows {wa} x {wb}",
                    e.i, e.j
                )));
            }
        }
        Ok(())
    }

    /// Folds `(j, i)` into `(i, j)` for symmetric certificates and merges
    /// duplicates. Zero entries are dropped; the rest are sorted by `(i, j)`.
    pub fn canonicalize(&mut self) {
        let sym = self.is_symmetric();
        let mut merged: std::collections::BTreeMap<(i64, i64), Poly> = Default::default();
        for e in self.g.drain(..) {
            let key = if sym && e.i > e.j { (e.j, e.i) } else { (e.i, e.j) };
            let slot = merged.entry(key).or_default();
            *slot = &*slot + &e.poly;
        }
        self.g = merged
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|((i, j), poly)| GEntry { i, j, poly })
            .collect();
    }

    fn b_term(&self, reg: &SequenceRegistry, idx: i64) -> Result<BigInt, SequenceError> {
        match &self.seq_b {
            Some(name) => reg.term(name, idx),
            None => Ok(BigInt::one()),
        }
    }

    /// `S(n)` evaluated with exact sequence values.
    pub fn antidifference_at(&self, reg: &SequenceRegistry, n: i64) -> Result<BigRat, SequenceError> {
        let mut acc = BigRat::zero();
        for e in &self.g {
            let c = e.poly.eval_i64(n);
            if c.is_zero() {
                continue;
            }
            let v = reg.term(&self.seq_a, n + e.i)? * self.b_term(reg, n + e.j)?;
            acc += c * BigRat::from_integer(v);
        }
        Ok(acc)
    }

    /// `p(k) a_{k+s_a} b_{k+s_b}` at `k`.
    pub fn summand_at(&self, reg: &SequenceRegistry, k: i64) -> Result<BigRat, SequenceError> {
        let c = self.p.eval_i64(k);
        if c.is_zero() {
            return Ok(c);
        }
        let (sa, sb) = self.target();
        let v = reg.term(&self.seq_a, k + sa)? * self.b_term(reg, k + sb)?;
        Ok(c * BigRat::from_integer(v))
    }

    fn seq_symbol(name: &str, shift: i64) -> String {
        match shift {
            0 => format!("{name}_k"),
            s if s > 0 => format!("{name}_{{k+{s}}}"),
            s => format!("{name}_{{k{s}}}"),
        }
    }

    fn product_symbol(&self, i: i64, j: i64) -> String {
        let a = Self::seq_symbol(&self.seq_a, i);
        match &self.seq_b {
            None => a,
            Some(b) if b == &self.seq_a && i == j => format!("{a}^2"),
            Some(b) => format!("{a}{}", Self::seq_symbol(b, j)),
        }
    }

    /// Human-readable identity, e.g.
    /// `(8k+9)W_k^2 = Δ_k S_k` followed by the expansion of `S_k`.
    pub fn pretty(&self) -> String {
        let (sa, sb) = self.target();
        let mut out = format!(
            "({}){} = Δ_k S_k\nS_k =",
            self.p,
            self.product_symbol(sa, sb)
        );
        if self.g.is_empty() {
            out.push_str(" 0");
        }
        for (idx, e) in self.g.iter().enumerate() {
            out.push_str(if idx == 0 { " " } else { "\n    + " });
            out.push_str(&format!("({}){}", e.poly, self.product_symbol(e.i, e.j)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telescoper::reference;

    #[test]
    fn json_shape() {
        let c = reference::w_square();
        let js = serde_json::to_value(&c).unwrap();
        assert_eq!(js["seqA"], "W");
        assert_eq!(js["windows"], serde_json::json!([[-2, 0], [-2, 0]]));
        assert_eq!(js["p"], serde_json::json!(["9", "8"]));
        let back: TelescoperCertificate = serde_json::from_value(js).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn canonicalize_folds_symmetric_pairs() {
        let mut c = reference::w_square();
        let orig = c.clone();
        // split the (-2, -1) entry across both orderings
        let e = c.g.iter_mut().find(|e| (e.i, e.j) == (-2, -1)).unwrap();
        let half = e.poly.scale(&crate::exactmath::rat(1, 2));
        e.poly = half.clone();
        c.g.push(GEntry { i: -1, j: -2, poly: half });
        c.canonicalize();
        assert_eq!(c, orig);
    }

    #[test]
    fn pretty_form() {
        let s = reference::w_square().pretty();
        assert!(s.starts_with("(8k+9)W_k^2 = Δ_k S_k"), "{s}");
        assert!(s.contains("W_{k-2}W_{k-1}"), "{s}");
        let s = reference::t_cross_lower().pretty();
        assert!(s.starts_with("(8k^3+17k^2+9k)T_kT_{k+1}"), "{s}");
    }

    #[test]
    fn shape_validation() {
        let mut c = reference::w_square();
        c.g.push(GEntry { i: 1, j: 0, poly: Poly::one() });
        assert!(c.validate_shape().is_err());
        let mut c = reference::w_square();
        c.windows.pop();
        assert!(c.validate_shape().is_err());
    }
}
