//! Eigenvalues by shifted QR iteration on the upper Hessenberg form.
//!
//! Single-shift complex iteration with Wilkinson shifts, exceptional shifts
//! every ten stalled sweeps and deflation on negligible subdiagonal entries.
//! Only the active window is updated since no Schur vectors are needed.

use nalgebra::linalg::Hessenberg;
use nalgebra::DMatrix;

use crate::matrix::Complex;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a square matrix, or `None` if the iteration stalls.
pub(crate) fn eigenvalues(m: DMatrix<Complex>) -> Option<Vec<Complex>> {
    let n = m.nrows();
    if n == 0 {
        return Some(vec![]);
    }
    let mut h = Hessenberg::new(m).h();
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = Complex::new(0.0, 0.0);
        }
    }
    let full_norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut values = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut stalled = 0usize;
    loop {
        if hi == 0 {
            values.push(h[(0, 0)]);
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = full_norm;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = Complex::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values.push(h[(hi, hi)]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        stalled += 1;
        if stalled > MAX_SWEEPS_PER_EIGENVALUE {
            return None;
        }
        let shift = if stalled.is_multiple_of(10) {
            let s = h[(hi, hi - 1)].norm() + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + Complex::new(0.75 * s, 0.4375 * s)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    values.reverse();
    Some(values)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson(a: Complex, b: Complex, c: Complex, d: Complex) -> Complex {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (r1, r2) = (mid + disc, mid - disc);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// One explicit shifted QR step `H − σI = QR, H ← RQ + σI` on rows and
/// columns `lo..=hi`.
fn qr_sweep(h: &mut DMatrix<Complex>, lo: usize, hi: usize, shift: Complex) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (x, y) = (h[(k, k)], h[(k + 1, k)]);
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 { (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)) } else { (x / r, y / r) };
        for j in k..=hi {
            let (u, v) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = c.conj() * u + s.conj() * v;
            h[(k + 1, j)] = -s * u + c * v;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let (u, v) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = u * c + v * s;
            h[(i, k + 1)] = -u * s.conj() + v * c.conj();
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}
