//! Rank-revealing factorization services.
//!
//! All rank decisions go through one policy: a singular value counts when it
//! exceeds `max(rows, cols) · tol.rel · scale + tol.abs`, where `scale` is
//! the largest singular value unless a caller supplies a different one.
//! Real inputs are factored in real arithmetic so their kernel bases are real.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::matrix::{inner, vec_norm, CMatrix, Complex, ZERO};
use crate::svd;

const RECONSTRUCTION_REL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative cut on singular values.
    pub rel: f64,
    /// Absolute floor added to every threshold.
    pub abs: f64,
    /// Relative acceptance level for derived residuals (witnesses, matrix
    /// functions, split correspondences).
    pub residual: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-12, residual: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        Self { rel, abs, ..Self::default() }.validated()
    }

    /// Default tolerance with a different relative cut.
    pub fn with_rel(rel: f64) -> Result<Self> {
        Self { rel, ..Self::default() }.validated()
    }

    fn validated(self) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if ok(self.rel) && ok(self.abs) && ok(self.residual) {
            Ok(self)
        } else {
            Err(Error::DimensionMismatch(format!("tolerances must be positive and finite: {self:?}")))
        }
    }

    pub fn threshold(&self, rows: usize, cols: usize, scale: f64) -> f64 {
        rows.max(cols) as f64 * self.rel * scale + self.abs
    }
}

/// Singular values (descending) and a full set of right singular vectors.
pub(crate) struct SvdParts {
    pub sigma: Vec<f64>,
    /// rows × k, k = sigma.len()
    pub u: CMatrix,
    /// cols × cols; the first k columns pair with `sigma`.
    pub v: CMatrix,
}

fn svd_generic<T>(m: DMatrix<T>) -> (Vec<f64>, DMatrix<T>, DMatrix<T>)
where
    T: ComplexField<RealField = f64>,
{
    let svd = m.svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v = svd.v_t.expect("right vectors requested").adjoint();
    (svd.singular_values.iter().copied().collect(), u, v)
}

/// nalgebra occasionally returns orthonormal factors that do not reproduce
/// the input; those are redone with Jacobi.
fn checked(
    a: DMatrix<Complex>,
    sigma: Vec<f64>,
    u: DMatrix<Complex>,
    v: DMatrix<Complex>,
) -> (Vec<f64>, CMatrix, CMatrix) {
    let d = DMatrix::from_fn(sigma.len(), sigma.len(), |i, j| if i == j { Complex::new(sigma[i], 0.0) } else { ZERO });
    let defect = (&u * d * v.adjoint() - &a).norm();
    if defect <= RECONSTRUCTION_REL * a.norm() {
        return (sigma, CMatrix::from_nalgebra(&u), CMatrix::from_nalgebra(&v));
    }
    let (sigma, u, v) = svd::jacobi_svd(a);
    (sigma, CMatrix::from_nalgebra(&u), CMatrix::from_nalgebra(&v))
}

pub(crate) fn svd_parts(m: &CMatrix) -> SvdParts {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return SvdParts { sigma: vec![], u: CMatrix::zeros(rows, 0), v: CMatrix::identity(cols) };
    }
    // Pad wide matrices so the right factor spans the whole domain.
    let padded_rows = rows.max(cols);
    let (sigma, u, v) = if m.is_real() {
        let mut a = DMatrix::<f64>::zeros(padded_rows, cols);
        a.view_mut((0, 0), (rows, cols)).copy_from(&m.to_nalgebra_real());
        let (s, u, v) = svd_generic(a.clone());
        let lift = |x: &DMatrix<f64>| x.map(|r| Complex::new(r, 0.0));
        checked(lift(&a), s, lift(&u), lift(&v))
    } else {
        let mut a = DMatrix::<Complex>::zeros(padded_rows, cols);
        a.view_mut((0, 0), (rows, cols)).copy_from(&m.to_nalgebra());
        let (s, u, v) = svd_generic(a.clone());
        checked(a, s, u, v)
    };
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let k = rows.min(cols);
    let sigma_sorted: Vec<f64> = order.iter().take(k).map(|&i| sigma[i].max(0.0)).collect();
    let u_sorted = CMatrix::from_fn(rows, k, |i, j| u[(i, order[j])]);
    let v_sorted = CMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])]);
    SvdParts { sigma: sigma_sorted, u: u_sorted, v: v_sorted }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd_parts(m).sigma
}

pub fn rank_of(m: &CMatrix, tol: &Tolerance) -> usize {
    let s = singular_values(m);
    let scale = s.first().copied().unwrap_or(0.0);
    count_above(&s, tol.threshold(m.rows(), m.cols(), scale))
}

/// Rank with the threshold scaled by `scale` instead of the largest singular
/// value; used when `m` may itself be a numerically vanishing matrix.
pub fn rank_at_scale(m: &CMatrix, scale: f64, tol: &Tolerance) -> usize {
    let s = singular_values(m);
    count_above(&s, tol.threshold(m.rows(), m.cols(), scale))
}

fn count_above(s: &[f64], threshold: f64) -> usize {
    s.iter().filter(|&&x| x > threshold).count()
}

/// Orthonormal basis of a null space.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Complex>>,
}

impl KernelBasis {
    pub fn nullity(&self) -> usize {
        self.vectors.len()
    }

    /// Orthonormalizes `vectors` (dropping dependent ones) into a basis.
    pub fn from_spanning(ambient_dim: usize, vectors: &[Vec<Complex>], drop_below: f64) -> Self {
        Self { ambient_dim, vectors: orthonormalize(vectors, drop_below) }
    }

    /// Reshape every basis vector into an n×n matrix (n² = ambient_dim).
    pub fn matrices(&self, n: usize) -> Result<Vec<CMatrix>> {
        self.vectors.iter().map(|v| crate::matrix::unvec_slice(v, n)).collect()
    }

    /// Orthogonal projection of `v` onto the span.
    pub fn project(&self, v: &[Complex]) -> Vec<Complex> {
        let mut out = vec![ZERO; v.len()];
        for q in &self.vectors {
            let c = inner(q, v);
            for (o, &qi) in out.iter_mut().zip(q) {
                *o += c * qi;
            }
        }
        out
    }

    /// Distance from `v` to the span.
    pub fn distance(&self, v: &[Complex]) -> f64 {
        let p = self.project(v);
        v.iter().zip(&p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let g = inner(a, b);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass; vectors whose
/// residual falls below `drop_below` relative to their own norm are dropped.
pub fn orthonormalize(vectors: &[Vec<Complex>], drop_below: f64) -> Vec<Vec<Complex>> {
    let mut basis: Vec<Vec<Complex>> = Vec::new();
    for v in vectors {
        let norm0 = vec_norm(v);
        if norm0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                for (wi, &qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let nw = vec_norm(&w);
        if nw > drop_below * norm0 {
            basis.push(w.iter().map(|z| z / nw).collect());
        }
    }
    basis
}

/// Rotates `v` so its largest-magnitude entry is real and positive.
fn orient(v: &mut [Complex]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        for z in v.iter_mut() {
            *z *= phase;
            if z.im.abs() < 1e-300 {
                z.im = 0.0;
            }
        }
    }
}

pub fn kernel_basis(m: &CMatrix, tol: &Tolerance) -> KernelBasis {
    kernel_basis_with(m, None, tol)
}

/// Kernel basis with the rank threshold scaled by `scale`.
pub fn kernel_basis_at_scale(m: &CMatrix, scale: f64, tol: &Tolerance) -> KernelBasis {
    kernel_basis_with(m, Some(scale), tol)
}

fn kernel_basis_with(m: &CMatrix, scale: Option<f64>, tol: &Tolerance) -> KernelBasis {
    let parts = svd_parts(m);
    let scale = scale.unwrap_or_else(|| parts.sigma.first().copied().unwrap_or(0.0));
    let rank = count_above(&parts.sigma, tol.threshold(m.rows(), m.cols(), scale));
    let cols = m.cols();
    let vectors = (rank..cols)
        .map(|j| {
            let mut v = parts.v.column_values(j);
            orient(&mut v);
            v
        })
        .collect();
    KernelBasis { ambient_dim: cols, vectors }
}

/// Outcome of a rank (Kronecker–Capelli) consistency test for `M x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub operator_rank: usize,
    pub augmented_rank: usize,
    pub consistent: bool,
    /// Minimum-norm solution, present iff consistent.
    pub solution: Option<Vec<Complex>>,
    /// `‖M x − b‖` for the minimum-norm least-squares `x`.
    pub residual: f64,
}

pub fn solve_consistent(m: &CMatrix, b: &[Complex], tol: &Tolerance) -> Result<ConsistencyReport> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for a {}-row system",
            b.len(),
            m.rows()
        )));
    }
    let parts = svd_parts(m);
    let scale = parts.sigma.first().copied().unwrap_or(0.0);
    let operator_rank = count_above(&parts.sigma, tol.threshold(m.rows(), m.cols(), scale));
    let augmented = CMatrix::hstack(&[m.clone(), CMatrix::column(b)])?;
    let augmented_rank = rank_of(&augmented, tol);

    let mut x = vec![ZERO; m.cols()];
    for k in 0..operator_rank {
        let uk = parts.u.column_values(k);
        let coeff = inner(&uk, b) / parts.sigma[k];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += coeff * parts.v[(i, k)];
        }
    }
    let mx = m.mul_vec(&x)?;
    let residual = mx.iter().zip(b).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt();
    let consistent = operator_rank == augmented_rank;
    Ok(ConsistencyReport { operator_rank, augmented_rank, consistent, solution: consistent.then_some(x), residual })
}

/// Permuted 2×2 block form `E·M·F = [[A11, A12], [A21, A22]]` with `A11`
/// nonsingular of order `rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub rank: usize,
    /// Source row placed at each position of the permuted matrix.
    pub row_order: Vec<usize>,
    /// Source column placed at each position of the permuted matrix.
    pub col_order: Vec<usize>,
    pub e: CMatrix,
    pub f: CMatrix,
    pub a11: CMatrix,
    pub a12: CMatrix,
    pub a21: CMatrix,
    pub a22: CMatrix,
    pub a11_sigma_min: f64,
}

fn permutation_rows(order: &[usize]) -> CMatrix {
    let n = order.len();
    let mut p = CMatrix::zeros(n, n);
    for (i, &src) in order.iter().enumerate() {
        p[(i, src)] = Complex::new(1.0, 0.0);
    }
    p
}

/// Greedy column pivoting: picks `count` columns of largest remaining norm.
fn pivot_columns(m: &CMatrix, count: usize) -> Vec<usize> {
    let cols: Vec<Vec<Complex>> = (0..m.cols()).map(|j| m.column_values(j)).collect();
    let mut residual = cols.clone();
    let mut chosen = Vec::with_capacity(count);
    let mut used = vec![false; cols.len()];
    for _ in 0..count {
        let best = (0..residual.len())
            .filter(|&j| !used[j])
            .max_by(|&a, &b| vec_norm(&residual[a]).total_cmp(&vec_norm(&residual[b])).then(b.cmp(&a)));
        let Some(j) = best else { break };
        let nj = vec_norm(&residual[j]);
        if nj == 0.0 {
            break;
        }
        used[j] = true;
        chosen.push(j);
        let q: Vec<Complex> = residual[j].iter().map(|z| z / nj).collect();
        for (k, r) in residual.iter_mut().enumerate() {
            if used[k] {
                continue;
            }
            let c = inner(&q, r);
            for (ri, &qi) in r.iter_mut().zip(&q) {
                *ri -= c * qi;
            }
        }
    }
    chosen
}

fn complete_order(chosen: &[usize], n: usize) -> Vec<usize> {
    let mut first: Vec<usize> = chosen.to_vec();
    first.sort_unstable();
    let rest = (0..n).filter(|i| !chosen.contains(i));
    first.into_iter().chain(rest).collect()
}

pub fn block_partition(m: &CMatrix, tol: &Tolerance) -> Result<BlockPartition> {
    let n = m.order()?;
    let sigma = singular_values(m);
    let scale = sigma.first().copied().unwrap_or(0.0);
    let threshold = tol.threshold(n, n, scale);
    let r = count_above(&sigma, threshold);

    let cols = pivot_columns(m, r);
    let all_rows: Vec<usize> = (0..n).collect();
    let selected = m.submatrix(&all_rows, &cols);
    let rows = pivot_columns(&selected.transpose(), r);
    if rows.len() < r || cols.len() < r {
        return Err(Error::PivotFailure { order: r, sigma_min: 0.0 });
    }
    let row_order = complete_order(&rows, n);
    let col_order = complete_order(&cols, n);
    let permuted = m.submatrix(&row_order, &col_order);
    let a11 = permuted.block(0, 0, r, r);
    let a11_sigma_min = singular_values(&a11).last().copied().unwrap_or(f64::INFINITY);
    if r > 0 && a11_sigma_min <= threshold {
        return Err(Error::PivotFailure { order: r, sigma_min: a11_sigma_min });
    }
    let e = permutation_rows(&row_order);
    let f = permutation_rows(&col_order).transpose();
    Ok(BlockPartition {
        rank: r,
        a12: permuted.block(0, r, r, n - r),
        a21: permuted.block(r, 0, n - r, r),
        a22: permuted.block(r, r, n - r, n - r),
        a11,
        row_order,
        col_order,
        e,
        f,
        a11_sigma_min,
    })
}

impl BlockPartition {
    pub fn order(&self) -> usize {
        self.row_order.len()
    }

    /// Reassembled `E·M·F`.
    pub fn permuted(&self) -> CMatrix {
        let n = self.order();
        let mut out = CMatrix::zeros(n, n);
        out.set_block(0, 0, &self.a11);
        out.set_block(0, self.rank, &self.a12);
        out.set_block(self.rank, 0, &self.a21);
        out.set_block(self.rank, self.rank, &self.a22);
        out
    }

    /// `A22 − A21·A11⁻¹·A12`.
    pub fn schur_complement(&self) -> Result<CMatrix> {
        if self.rank == 0 {
            return Ok(self.a22.clone());
        }
        let x = solve_matrix(&self.a11, &self.a12)?;
        self.a22.try_sub(&self.a21.matmul_float(&x))
    }

    /// Particular solution of `M x = b` through the partition: the free block
    /// `x̄₂` is taken from `free` (zero when absent), `x̄₁ = A11⁻¹(b̄₁ − A12 x̄₂)`.
    /// Returns `x` and the residual of the compatibility condition
    /// `(A22 − A21 A11⁻¹ A12) x̄₂ = b̄₂ − A21 A11⁻¹ b̄₁`.
    pub fn solve(&self, b: &[Complex], free: Option<&[Complex]>) -> Result<(Vec<Complex>, f64)> {
        let n = self.order();
        let r = self.rank;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("right-hand side of length {} for order {n}", b.len())));
        }
        let bbar: Vec<Complex> = self.row_order.iter().map(|&i| b[i]).collect();
        let (b1, b2) = bbar.split_at(r);
        let x2: Vec<Complex> = match free {
            Some(f) if f.len() == n - r => f.to_vec(),
            Some(f) => {
                return Err(Error::DimensionMismatch(format!("free block of length {} (expected {})", f.len(), n - r)))
            }
            None => vec![ZERO; n - r],
        };
        let a12x2 = self.a12.mul_vec(&x2)?;
        let rhs1: Vec<Complex> = b1.iter().zip(&a12x2).map(|(a, c)| a - c).collect();
        let x1 = if r > 0 { solve_vector(&self.a11, &rhs1)? } else { vec![] };

        let a21x1 = self.a21.mul_vec(&x1)?;
        let a22x2 = self.a22.mul_vec(&x2)?;
        // b̄₂ − A21 x̄₁ − A22 x̄₂ equals the compatibility residual.
        let compat =
            b2.iter().zip(a21x1.iter().zip(&a22x2)).map(|(bb, (p, q))| (bb - p - q).norm_sqr()).sum::<f64>().sqrt();

        let mut x = vec![ZERO; n];
        for (j, &src) in self.col_order.iter().enumerate() {
            x[src] = if j < r { x1[j] } else { x2[j - r] };
        }
        Ok((x, compat))
    }
}

/// Solves `A X = B` for square nonsingular `A` by LU with partial pivoting.
pub fn solve_matrix(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.order()?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!("{}-row right-hand side for order {n}", b.rows())));
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, b.cols()));
    }
    let lu = a.to_nalgebra().lu();
    let x = lu.solve(&b.to_nalgebra()).ok_or(Error::Singular)?;
    let out = CMatrix::from_nalgebra(&x);
    if out.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(out)
}

pub fn solve_vector(a: &CMatrix, b: &[Complex]) -> Result<Vec<Complex>> {
    Ok(solve_matrix(a, &CMatrix::column(b))?.column_values(0))
}

/// Inverse of a square matrix; exact for integer matrices with determinant ±1.
pub fn inverse(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let n = a.order()?;
    if let Some(inv) = ExactMatrix::from_cmatrix(a).and_then(|e| e.inverse_unimodular()).and_then(|i| i.to_cmatrix()) {
        return Ok(inv);
    }
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    if n > 0 && s.last().copied().unwrap_or(0.0) <= tol.threshold(n, n, smax) {
        return Err(Error::Singular);
    }
    solve_matrix(a, &CMatrix::identity(n))
}

/// Largest principal angle (radians) between two spans; π/2 when the
/// dimensions differ.
pub fn max_principal_angle(a: &KernelBasis, b: &KernelBasis) -> f64 {
    if a.nullity() != b.nullity() || a.ambient_dim != b.ambient_dim {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.nullity() == 0 {
        return 0.0;
    }
    // sin θ_max = max over unit vectors of b of their distance to span(a),
    // which is the spectral norm of (I − Qa Qa*) Qb.
    let n = a.ambient_dim;
    let k = b.nullity();
    let resid = CMatrix::from_fn(n, k, |i, j| {
        let v = &b.vectors[j];
        let p = a.project(v);
        v[i] - p[i]
    });
    let s = singular_values(&resid).first().copied().unwrap_or(0.0);
    s.min(1.0).asin()
}
