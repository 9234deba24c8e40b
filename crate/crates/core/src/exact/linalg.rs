//! Small exact linear algebra over the rationals: reduced row echelon,
//! solving, inverse, nullspace. Sizes here are tiny (basis dimensions per
//! weight), so fraction-free tricks are unnecessary.

use crate::error::{Error, Result};
use crate::exact::rational::Rational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rational::one();
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = self.at(i, k) * other.at(k, j);
                    *out.at_mut(i, j) += v;
                }
            }
        }
        out
    }

    /// In-place Gauss-Jordan; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self.at(p, j).clone();
                *self.at_mut(p, j) = self.at(r, j).clone();
                *self.at_mut(r, j) = tmp;
            }
            let inv = Rational::one() / self.at(r, c).clone();
            for j in 0..self.cols {
                let v = self.at(r, j) * &inv;
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in 0..self.cols {
                        let v = self.at(i, j) - &(&f * self.at(r, j));
                        *self.at_mut(i, j) = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Solves self * x = rhs for a single column; errors when singular or
    /// inconsistent.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = rhs[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return Err(Error::SingularSystem);
        }
        if pivots.len() < self.cols {
            return Err(Error::SingularSystem);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = Rational::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
            return Err(Error::SingularSystem);
        }
        let mut out = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Ok(out)
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.at(r, f).clone();
            }
            basis.push(v);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, rat_i};

    #[test]
    fn solve_and_inverse() {
        let mut m = QMatrix::zeros(2, 2);
        *m.at_mut(0, 0) = rat_i(2);
        *m.at_mut(0, 1) = rat_i(1);
        *m.at_mut(1, 0) = rat_i(1);
        *m.at_mut(1, 1) = rat_i(3);
        let x = m.solve(&[rat_i(5), rat_i(10)]).unwrap();
        assert_eq!(x, vec![rat_i(1), rat_i(3)]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul(&m), QMatrix::identity(2));
        assert_eq!(*inv.at(0, 0), rat(3, 5));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let mut m = QMatrix::zeros(1, 3);
        *m.at_mut(0, 0) = rat_i(1);
        *m.at_mut(0, 1) = rat_i(2);
        *m.at_mut(0, 2) = rat_i(3);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot = &v[0] * rat_i(1) + &v[1] * rat_i(2) + &v[2] * rat_i(3);
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn singular_detection() {
        let mut m = QMatrix::zeros(2, 2);
        *m.at_mut(0, 0) = rat_i(1);
        *m.at_mut(0, 1) = rat_i(2);
        *m.at_mut(1, 0) = rat_i(2);
        *m.at_mut(1, 1) = rat_i(4);
        assert!(m.inverse().is_err());
        assert!(m.solve(&[rat_i(1), rat_i(0)]).is_err());
    }
}
