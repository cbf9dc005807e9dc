use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::BigRat;

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![BigRat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigRat>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRat::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[BigRat]) -> Vec<BigRat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(BigRat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduced row echelon form; returns the pivot column of each nonzero row.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    if self.get(r, j).is_zero() {
                        continue;
                    }
                    let v = self.get(i, j) - &f * self.get(r, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

/// Rank by exact elimination.
pub fn rank(m: &Matrix) -> usize {
    m.clone().rref().len()
}

/// Right nullspace basis, one vector per free column of the reduced row
/// echelon form (pivots are taken leftmost first). Each vector is scaled to
/// coprime integer entries whose first nonzero entry is positive.
///
/// The free column index is returned alongside its vector; the vector is
/// zero on every other free column.
pub fn nullspace_by_free_column(m: &Matrix) -> Vec<(usize, Vec<BigRat>)> {
    let mut red = m.clone();
    let pivots = red.rref();
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![BigRat::zero(); m.cols];
            v[f] = BigRat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -red.get(row, f).clone();
            }
            (f, normalize_integral(v))
        })
        .collect()
}

/// Right nullspace basis; empty when the nullspace is trivial.
pub fn nullspace(m: &Matrix) -> Vec<Vec<BigRat>> {
    nullspace_by_free_column(m)
        .into_iter()
        .map(|(_, v)| v)
        .collect()
}

fn normalize_integral(v: Vec<BigRat>) -> Vec<BigRat> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&den / x.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    let scale = sign * g;
    ints.into_iter()
        .map(|x| BigRat::from_integer(x / &scale))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int;

    fn ints(v: &[i64]) -> Vec<BigRat> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn single_row() {
        let m = Matrix::from_i64(&[&[1, -1]]);
        assert_eq!(nullspace(&m), vec![ints(&[1, 1])]);
    }

    #[test]
    fn identity_has_trivial_nullspace() {
        let m = Matrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(nullspace(&m).is_empty());
        assert_eq!(rank(&m), 3);
    }

    #[test]
    fn rank_one_square() {
        let m = Matrix::from_i64(&[&[2, 4], &[1, 2]]);
        let basis = nullspace(&m);
        assert_eq!(basis.len(), 1);
        // sign normalized: positive leading entry
        assert_eq!(basis[0], ints(&[2, -1]));
        assert!(m.mul_vec(&basis[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn free_column_vectors_vanish_on_other_free_columns() {
        let m = Matrix::from_i64(&[&[1, 2, 0, 3], &[0, 0, 1, 5]]);
        let basis = nullspace_by_free_column(&m);
        let frees: Vec<usize> = basis.iter().map(|(f, _)| *f).collect();
        assert_eq!(frees, vec![1, 3]);
        for (f, v) in &basis {
            for g in &frees {
                assert_eq!(v[*g].is_zero(), g != f);
            }
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }
}
