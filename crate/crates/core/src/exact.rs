//! Exact Gaussian-integer arithmetic for integer-valued matrices.
//!
//! Used to make the vectorization identities and similarity checks hold
//! with zero tolerance. Entries are `i128`; every operation returns `None`
//! on overflow instead of wrapping.

use num_complex::Complex;
use num_rational::Ratio;

use crate::matrix::{CMatrix, Complex as C64};

pub type GaussianInt = Complex<i128>;

const F64_EXACT: i128 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianInt>,
}

fn checked_mul(a: GaussianInt, b: GaussianInt) -> Option<GaussianInt> {
    let re = a.re.checked_mul(b.re)?.checked_sub(a.im.checked_mul(b.im)?)?;
    let im = a.re.checked_mul(b.im)?.checked_add(a.im.checked_mul(b.re)?)?;
    Some(Complex::new(re, im))
}

fn checked_add(a: GaussianInt, b: GaussianInt) -> Option<GaussianInt> {
    Some(Complex::new(a.re.checked_add(b.re)?, a.im.checked_add(b.im)?))
}

fn checked_sub(a: GaussianInt, b: GaussianInt) -> Option<GaussianInt> {
    Some(Complex::new(a.re.checked_sub(b.re)?, a.im.checked_sub(b.im)?))
}

impl ExactMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_integers(rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| Complex::new(values[i * cols + j] as i128, 0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| Complex::new(i128::from(i == j), 0))
    }

    /// `Some` iff every component of `m` is an integer below 2^53 in magnitude.
    pub fn from_cmatrix(m: &CMatrix) -> Option<Self> {
        if !m.is_integer_valued() {
            return None;
        }
        let data = m.entries().iter().map(|z| Complex::new(z.re as i128, z.im as i128)).collect();
        Some(Self { rows: m.rows(), cols: m.cols(), data })
    }

    /// `None` if some entry is too large to be represented exactly in f64.
    pub fn to_cmatrix(&self) -> Option<CMatrix> {
        let ok = self.data.iter().all(|z| z.re.abs() < F64_EXACT && z.im.abs() < F64_EXACT);
        if !ok {
            return None;
        }
        let data = self.data.iter().map(|z| C64::new(z.re as f64, z.im as f64)).collect();
        Some(CMatrix::from_vec_unchecked(self.rows, self.cols, data))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> GaussianInt {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[GaussianInt] {
        &self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, rhs: &Self) -> Option<Self> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Complex::new(0, 0);
                for l in 0..self.cols {
                    acc = checked_add(acc, checked_mul(self.get(i, l), rhs.get(l, j))?)?;
                }
                data.push(acc);
            }
        }
        Some(Self { rows: self.rows, cols: rhs.cols, data })
    }

    pub fn sub(&self, rhs: &Self) -> Option<Self> {
        if self.shape() != rhs.shape() {
            return None;
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| checked_sub(a, b)).collect::<Option<Vec<_>>>()?;
        Some(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| -z).collect() }
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (p, q) = rhs.shape();
        Self::from_fn(self.rows * p, self.cols * q, |i, j| self.get(i / p, j / q) * rhs.get(i % p, j % q))
    }

    pub fn commutator(&self, rhs: &Self) -> Option<Self> {
        self.mul(rhs)?.sub(&rhs.mul(self)?)
    }

    /// `A ⊗ I − I ⊗ Aᵀ`.
    pub fn comm_operator(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let id = Self::identity(self.rows);
        self.kron(&id).sub(&id.kron(&self.transpose()))
    }

    pub fn vec_row(&self) -> Vec<GaussianInt> {
        self.data.clone()
    }

    pub fn mul_vec(&self, v: &[GaussianInt]) -> Option<Vec<GaussianInt>> {
        if v.len() != self.cols {
            return None;
        }
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .try_fold(Complex::new(0, 0), |acc, l| checked_add(acc, checked_mul(self.get(i, l), v[l])?))
            })
            .collect()
    }

    /// Exact determinant of a real integer matrix (fraction-free elimination).
    pub fn det_real(&self) -> Option<i128> {
        if self.rows != self.cols || !self.is_real() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(1);
        }
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).re).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Some(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                    a[i][j] = num / prev;
                }
            }
            prev = a[k][k];
        }
        Some(sign * a[n - 1][n - 1])
    }

    /// Exact inverse of a real integer matrix with determinant ±1.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        let det = self.det_real()?;
        if det.abs() != 1 {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<Ratio<i128>>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            Ratio::from_integer(self.get(i, j).re)
                        } else {
                            Ratio::from_integer(i128::from(j - n == i))
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..n {
            let piv = (k..n).find(|&r| a[r][k] != Ratio::from_integer(0))?;
            a.swap(k, piv);
            let p = a[k][k];
            for x in a[k].iter_mut() {
                *x /= p;
            }
            for i in 0..n {
                if i != k && a[i][k] != Ratio::from_integer(0) {
                    let f = a[i][k];
                    let pivot_row = a[k].clone();
                    for (x, &t) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= t * f;
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(n * n);
        for row in &a {
            for x in &row[n..] {
                if !x.is_integer() {
                    return None;
                }
                out.push(Complex::new(x.to_integer(), 0));
            }
        }
        Some(Self { rows: n, cols: n, data: out })
    }
}
