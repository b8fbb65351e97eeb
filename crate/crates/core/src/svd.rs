//! One-sided Jacobi SVD, used when a library factorization fails its
//! reconstruction check.

use nalgebra::DMatrix;

use crate::matrix::Complex;

const MAX_SWEEPS: usize = 80;

/// `(σ, U, V)` with `M = U·diag(σ)·Vᴴ` for a matrix with at least as many
/// rows as columns. Columns of `U` belonging to a zero singular value are
/// left at zero.
pub(crate) fn jacobi_svd(m: DMatrix<Complex>) -> (Vec<f64>, DMatrix<Complex>, DMatrix<Complex>) {
    let (rows, cols) = m.shape();
    debug_assert!(rows >= cols);
    let mut a = m;
    let mut v = DMatrix::<Complex>::identity(cols, cols);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a.column(p).iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a.column(q).iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex = a.column(p).iter().zip(a.column(q).iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = Vec::with_capacity(cols);
    let mut u = DMatrix::<Complex>::zeros(rows, cols);
    for j in 0..cols {
        let norm = a.column(j).norm();
        sigma.push(norm);
        if norm > 0.0 {
            u.set_column(j, &(a.column(j) / Complex::new(norm, 0.0)));
        }
    }
    (sigma, u, v)
}

fn rotate(m: &mut DMatrix<Complex>, p: usize, q: usize, c: f64, s: f64, phase: Complex) {
    for i in 0..m.nrows() {
        let x = m[(i, p)];
        let y = m[(i, q)] * phase;
        m[(i, p)] = x * c - y * s;
        m[(i, q)] = x * s + y * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_complex_matrix() {
        let m = DMatrix::from_fn(5, 3, |i, j| Complex::new((i * 3 + j) as f64 - 4.0, (i as f64 - j as f64) * 0.5));
        let (s, u, v) = jacobi_svd(m.clone());
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, s.iter().map(|&x| Complex::new(x, 0.0))));
        assert!((&u * d * v.adjoint() - &m).norm() < 1e-12 * m.norm());
        assert!((v.adjoint() * &v - DMatrix::identity(3, 3)).norm() < 1e-13);
    }

    #[test]
    fn rank_deficient_columns() {
        let m = DMatrix::from_fn(4, 3, |i, j| Complex::new((i + 1) as f64 * (j + 1) as f64, 0.0));
        let (mut s, _, _) = jacobi_svd(m);
        s.sort_by(|a, b| b.total_cmp(a));
        assert!(s[0] > 1.0 && s[1] < 1e-12 && s[2] < 1e-12);
    }
}
