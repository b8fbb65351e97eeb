//! Dense complex matrices with row-stacking vectorization, Kronecker
//! products and the commutator operator.
//!
//! Every matrix is stored as complex; a real matrix is one whose imaginary
//! parts are all exactly zero. Vectorization stacks ROWS:
//! `vec_row(X)[i * n + j] == X[(i, j)]`. Under this convention
//! `vec_row(A X) = (A ⊗ I) vec_row(X)` and `vec_row(X A) = (I ⊗ Aᵀ) vec_row(X)`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;

pub type Complex = num_complex::Complex64;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

/// Which right factor the commutator operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorMode {
    /// `A ⊗ I − I ⊗ Aᵀ`; annihilates `vec_row(X)` exactly when `[A, X] = 0`,
    /// for real and complex `A` alike.
    Transpose,
    /// `A ⊗ I − I ⊗ A*`. Its kernel is `{X : A X = X conj(A)}`, which is the
    /// commutant only when `A` is real.
    Adjoint,
}

impl OperatorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OperatorMode::Transpose => "transpose",
            OperatorMode::Adjoint => "adjoint",
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / cols.max(1), col: k % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<Complex>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(format!("row {bad} has {} entries, expected {c}", rows[bad].len())));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Real matrix from nested rows.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<Complex>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&x| Complex::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[Complex]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let v: Vec<Complex> = values.iter().map(|&x| Complex::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Matrix unit `e_ij` of order `n` (0-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    /// Jordan block of order `size` at `value`.
    pub fn jordan_block(value: Complex, size: usize) -> Self {
        Self::from_fn(size, size, |i, j| {
            if i == j {
                value
            } else if j == i + 1 {
                ONE
            } else {
                ZERO
            }
        })
    }

    pub fn block_diag(blocks: &[CMatrix]) -> Self {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Vertical concatenation; all parts must share a column count.
    pub fn vstack(parts: &[CMatrix]) -> Result<Self> {
        let cols = match parts.first() {
            Some(p) => p.cols,
            None => return Ok(Self::zeros(0, 0)),
        };
        if let Some(p) = parts.iter().find(|p| p.cols != cols) {
            return Err(Error::DimensionMismatch(format!("vstack of {}-column and {}-column blocks", cols, p.cols)));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let data = parts.iter().flat_map(|p| p.data.iter().copied()).collect();
        Ok(Self { rows, cols, data })
    }

    /// Horizontal concatenation; all parts must share a row count.
    pub fn hstack(parts: &[CMatrix]) -> Result<Self> {
        let rows = match parts.first() {
            Some(p) => p.rows,
            None => return Ok(Self::zeros(0, 0)),
        };
        if let Some(p) = parts.iter().find(|p| p.rows != rows) {
            return Err(Error::DimensionMismatch(format!("hstack of {}-row and {}-row blocks", rows, p.rows)));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        Ok(out)
    }

    /// Single-column matrix.
    pub fn column(values: &[Complex]) -> Self {
        Self { rows: values.len(), cols: 1, data: values.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Order of a square matrix.
    pub fn order(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_values(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// All components are integers of magnitude below 2^53.
    pub fn is_integer_valued(&self) -> bool {
        const LIMIT: f64 = 9_007_199_254_740_992.0;
        self.data.iter().all(|z| z.re.fract() == 0.0 && z.im.fract() == 0.0 && z.re.abs() < LIMIT && z.im.abs() < LIMIT)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn re(&self) -> Self {
        self.map(|z| Complex::new(z.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map(|z| Complex::new(z.im, 0.0))
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: Complex) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Matrix product; exact when both factors are integer-valued.
    pub fn matmul(&self, rhs: &CMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        if let (Some(a), Some(b)) = (ExactMatrix::from_cmatrix(self), ExactMatrix::from_cmatrix(rhs)) {
            if let Some(p) = a.mul(&b).and_then(|p| p.to_cmatrix()) {
                return Ok(p);
            }
        }
        Ok(self.matmul_float(rhs))
    }

    pub(crate) fn matmul_float(&self, rhs: &CMatrix) -> Self {
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; m * n];
        for i in 0..m {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[l * n..(l + 1) * n];
                let orow = &mut out[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self { rows: m, cols: n, data: out }
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to a length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn try_add(&self, rhs: &CMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &CMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &CMatrix, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!("{}x{} and {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Integer power of a square matrix.
    pub fn powi(&self, k: usize) -> Result<Self> {
        let n = self.order()?;
        let mut out = Self::identity(n);
        for _ in 0..k {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    /// `self − shift·I`.
    pub fn shifted(&self, shift: Complex) -> Result<Self> {
        let n = self.order()?;
        let mut out = self.clone();
        for i in 0..n {
            out[(i, i)] -= shift;
        }
        Ok(out)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn to_nalgebra_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> =
                self.row(i).iter().map(|z| if z.im == 0.0 { format!("{}", z.re) } else { format!("{z}") }).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// Operator sugar for shape-compatible operands; prefer the `try_*` forms when
// shapes come from user input.
impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("shape mismatch in matrix addition")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.try_sub(rhs).expect("shape mismatch in matrix subtraction")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("shape mismatch in matrix product")
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

/// Row-stacked vectorization of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RowVec {
    order: usize,
    values: Vec<Complex>,
}

impl RowVec {
    /// Wraps `values`, which must have a perfect-square length.
    pub fn new(values: Vec<Complex>) -> Result<Self> {
        let order = (values.len() as f64).sqrt().round() as usize;
        if order * order != values.len() {
            return Err(Error::NotVectorized { len: values.len(), order });
        }
        Ok(Self { order, values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn source_order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex> {
        self.values
    }
}

pub fn vec_row(x: &CMatrix) -> Result<RowVec> {
    let n = x.order()?;
    Ok(RowVec { order: n, values: x.data.clone() })
}

pub fn unvec_row(v: &RowVec, n: usize) -> Result<CMatrix> {
    unvec_slice(v.values(), n)
}

/// Reshapes any length-n² slice into an n×n matrix by rows.
pub fn unvec_slice(v: &[Complex], n: usize) -> Result<CMatrix> {
    if v.len() != n * n {
        return Err(Error::NotVectorized { len: v.len(), order: n });
    }
    Ok(CMatrix { rows: n, cols: n, data: v.to_vec() })
}

/// Kronecker product; block (i, j) of the result is `a_ij · B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if let (Some(ea), Some(eb)) = (ExactMatrix::from_cmatrix(a), ExactMatrix::from_cmatrix(b)) {
        if let Some(k) = ea.kron(&eb).to_cmatrix() {
            return k;
        }
    }
    kron_float(a, b)
}

pub(crate) fn kron_float(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = b.shape();
    CMatrix::from_fn(a.rows * p, a.cols * q, |i, j| a[(i / p, j / q)] * b[(i % p, j % q)])
}

/// `A ⊕ B = A ⊗ I + I ⊗ B`.
pub fn kron_sum(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.order()?;
    let m = b.order()?;
    if n != m {
        return Err(Error::DimensionMismatch(format!("Kronecker sum of orders {n} and {m}")));
    }
    let id = CMatrix::identity(n);
    kron(a, &id).try_add(&kron(&id, b))
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.order()?;
    let m = b.order()?;
    if n != m {
        return Err(Error::DimensionMismatch(format!("commutator of orders {n} and {m}")));
    }
    if let (Some(ea), Some(eb)) = (ExactMatrix::from_cmatrix(a), ExactMatrix::from_cmatrix(b)) {
        if let Some(c) = ea.commutator(&eb).and_then(|c| c.to_cmatrix()) {
            return Ok(c);
        }
    }
    a.matmul_float(b).try_sub(&b.matmul_float(a))
}

/// The Kronecker-sum operator `A ⊗ I − I ⊗ Aᵀ` (or `A*` in adjoint mode).
///
/// In transpose mode, `comm_operator(A) · vec_row(X) = vec_row([A, X])`.
pub fn comm_operator(a: &CMatrix, mode: OperatorMode) -> Result<CMatrix> {
    let rhs = match mode {
        OperatorMode::Transpose => a.transpose(),
        OperatorMode::Adjoint => a.adjoint(),
    };
    kron_sum(a, &-&rhs)
}

/// Transpose-mode commutator operator.
pub fn commutator_operator(a: &CMatrix) -> Result<CMatrix> {
    comm_operator(a, OperatorMode::Transpose)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u, v⟩ = Σ conj(u_i) v_i`.
pub fn inner(u: &[Complex], v: &[Complex]) -> Complex {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
