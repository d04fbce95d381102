use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn from_int(m: &IntMatrix) -> Self {
        RatMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut data = vec![BigRational::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        RatMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// First entry (row-major) that is not an integer.
    pub fn first_non_integral(&self) -> Option<(usize, usize, BigRational)> {
        self.data
            .iter()
            .position(|x| !x.is_integer())
            .map(|k| (k / self.cols, k % self.cols, self.data[k].clone()))
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        IntMatrix::new(self.rows, self.cols, self.data.iter().map(|x| x.to_integer()).collect()).ok()
    }

    /// lcm of denominators in row i.
    pub fn row_denominator_lcm(&self, i: usize) -> BigInt {
        self.row(i).iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        RatMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, s: &BigRational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }
}

/// Exact inverse over Q by Gauss-Jordan elimination.
pub fn rational_inverse(m: &IntMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let n = m.rows();
    let mut a = RatMatrix::from_int(m).data;
    let mut inv: Vec<BigRational> = (0..n * n)
        .map(|k| if k / n == k % n { BigRational::one() } else { BigRational::zero() })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r * n + c].is_zero()).ok_or(Error::SingularMatrix)?;
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
                inv.swap(p * n + j, c * n + j);
            }
        }
        let piv = a[c * n + c].clone();
        for j in 0..n {
            a[c * n + j] /= &piv;
            inv[c * n + j] /= &piv;
        }
        for r in 0..n {
            if r == c || a[r * n + c].is_zero() {
                continue;
            }
            let f = a[r * n + c].clone();
            for j in 0..n {
                let x = &f * &a[c * n + j];
                a[r * n + j] -= x;
                let y = &f * &inv[c * n + j];
                inv[r * n + j] -= y;
            }
        }
    }
    Ok(RatMatrix { rows: n, cols: n, data: inv })
}
