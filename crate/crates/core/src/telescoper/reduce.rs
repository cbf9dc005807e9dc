use std::collections::BTreeMap;

use crate::exactmath::{Poly, RatFunc};
use crate::sequences::Recurrence;

use super::{ShiftWindow, TelescopeError};

/// Rewrites `a_{k+m}` as `sum_{s in window} r_s(k) a_{k+s}` with rational
/// function coefficients, by solving the recurrence for its top term (above
/// the window) or its bottom term (below it).
pub fn reduce_shift(
    rec: &Recurrence,
    m: i64,
    window: ShiftWindow,
) -> Result<Vec<RatFunc>, TelescopeError> {
    ShiftReducer::new(rec.clone(), window)?.reduce(m)
}

/// Memoizing form of [`reduce_shift`] for one recurrence and window.
#[derive(Clone, Debug)]
pub struct ShiftReducer {
    rec: Recurrence,
    window: ShiftWindow,
    cache: BTreeMap<i64, Vec<RatFunc>>,
}

impl ShiftReducer {
    pub fn new(rec: Recurrence, window: ShiftWindow) -> Result<Self, TelescopeError> {
        if window.len() != rec.order() {
            return Err(TelescopeError::WindowOrderMismatch {
                window,
                order: rec.order(),
            });
        }
        let mut cache = BTreeMap::new();
        for s in window.lo..=window.hi {
            let mut unit = vec![RatFunc::zero(); window.len()];
            unit[(s - window.lo) as usize] = RatFunc::one();
            cache.insert(s, unit);
        }
        Ok(ShiftReducer { rec, window, cache })
    }

    pub fn window(&self) -> ShiftWindow {
        self.window
    }

    pub fn reduce(&mut self, m: i64) -> Result<Vec<RatFunc>, TelescopeError> {
        if let Some(v) = self.cache.get(&m) {
            return Ok(v.clone());
        }
        let d = self.rec.order() as i64;
        if m > self.window.hi {
            for top in self.window.hi + 1..=m {
                if self.cache.contains_key(&top) {
                    continue;
                }
                // recurrence at n = k + top - d, solved for a_{k+top}
                let base = top - d;
                let lead = self.rec.leading().shift_by(base);
                let mut acc = vec![RatFunc::zero(); self.window.len()];
                for i in 0..d {
                    let c = &self.rec.coeffs()[i as usize];
                    let factor = RatFunc::new(-c.shift_by(base), lead.clone())?;
                    if factor.is_zero() {
                        continue;
                    }
                    let lower = self.cache[&(base + i)].clone();
                    add_scaled(&mut acc, &lower, &factor);
                }
                self.cache.insert(top, acc);
            }
        } else {
            let c0 = &self.rec.coeffs()[0];
            if c0.is_zero() {
                return Err(TelescopeError::BackwardReductionImpossible);
            }
            for bottom in (m..self.window.lo).rev() {
                if self.cache.contains_key(&bottom) {
                    continue;
                }
                // recurrence at n = k + bottom, solved for a_{k+bottom}
                let trail = c0.shift_by(bottom);
                let mut acc = vec![RatFunc::zero(); self.window.len()];
                for i in 1..=d {
                    let c = &self.rec.coeffs()[i as usize];
                    let factor = RatFunc::new(-c.shift_by(bottom), trail.clone())?;
                    if factor.is_zero() {
                        continue;
                    }
                    let upper = self.cache[&(bottom + i)].clone();
                    add_scaled(&mut acc, &upper, &factor);
                }
                self.cache.insert(bottom, acc);
            }
        }
        Ok(self.cache[&m].clone())
    }
}

fn add_scaled(acc: &mut [RatFunc], v: &[RatFunc], f: &RatFunc) {
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a = &*a + &(x * f);
        }
    }
}

/// Constant sequence recurrence `a_{n+1} - a_n = 0`.
pub(crate) fn constant_recurrence() -> Recurrence {
    Recurrence::new(vec![-Poly::one(), Poly::one()]).expect("valid recurrence")
}
