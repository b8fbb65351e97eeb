#![allow(dead_code)]

use kronsum::matfunc;
use kronsum::spectral::{partitions, JordanSpec};
use kronsum::{CMatrix, Complex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

pub fn int_matrix(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-bound..=bound) as f64))
}

pub fn real_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0)))
}

pub fn complex_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Integer matrix with determinant ±1: a product of a few elementary row
/// operations with multipliers in {−1, 1} and one optional row swap.
pub fn unimodular(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> CMatrix {
    let mut p = CMatrix::identity(n);
    if n < 2 {
        return p;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut next = p.clone();
        for col in 0..n {
            next[(i, col)] = p[(i, col)] + p[(j, col)] * s;
        }
        p = next;
    }
    if rng.gen_bool(0.5) {
        let (a, b) = (0, n - 1);
        let mut next = p.clone();
        for col in 0..n {
            next[(a, col)] = p[(b, col)];
            next[(b, col)] = p[(a, col)];
        }
        p = next;
    }
    p
}

/// `q(A)` for random coefficients in [−1, 1] of degree ≤ `degree`.
pub fn random_polynomial_in(rng: &mut ChaCha8Rng, a: &CMatrix, degree: usize) -> CMatrix {
    let coeffs: Vec<Complex> = (0..=degree).map(|_| c(rng.gen_range(-1.0..1.0))).collect();
    matfunc::polynomial_at(&coeffs, a).unwrap()
}

/// Every Jordan structure of total order ≤ `max_order` with 1 to 3 distinct
/// eigenvalues drawn in order from `values`.
pub fn jordan_structures(max_order: usize, values: &[f64]) -> Vec<JordanSpec> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        for k in 1..=3.min(n).min(values.len()) {
            for mults in compositions(n, k) {
                let choices: Vec<Vec<Vec<usize>>> = mults.iter().map(|&m| partitions(m)).collect();
                let mut idx = vec![0usize; k];
                loop {
                    let blocks = (0..k).map(|e| (c(values[e]), choices[e][idx[e]].clone())).collect();
                    out.push(JordanSpec::new(blocks));
                    let mut pos = 0;
                    while pos < k {
                        idx[pos] += 1;
                        if idx[pos] < choices[pos].len() {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == k {
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Ordered ways to write `n` as `k` positive parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    (1..n)
        .flat_map(|first| {
            compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Rank of an integer matrix by fraction-free elimination over `i128`.
pub fn exact_rank(m: &CMatrix) -> Option<usize> {
    if !m.is_integer_valued() || !m.is_real() {
        return None;
    }
    let mut a: Vec<Vec<i128>> = m.to_rows().iter().map(|r| r.iter().map(|z| z.re as i128).collect()).collect();
    let (rows, cols) = m.shape();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else { continue };
        a.swap(rank, piv);
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let (p, q) = (a[rank][col], a[r][col]);
                let pivot_row = a[rank].clone();
                let mut g = 0i128;
                for (x, &y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = x.checked_mul(p)?.checked_sub(y.checked_mul(q)?)?;
                    g = gcd(g, *x);
                }
                if g > 1 {
                    for x in a[r].iter_mut() {
                        *x /= g;
                    }
                }
            }
        }
        rank += 1;
    }
    Some(rank)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
