//! Eigenstructure analysis: multiplicities, index and Weyr/Segre data,
//! the spectrum of `A ⊕ (−Aᵀ)`, and the Frobenius centralizer-dimension
//! oracle.
//!
//! Jordan structure of numeric input is never obtained from a similarity
//! transform. It comes from the nested kernels
//! `Ker (A−λI) ⊆ Ker (A−λI)² ⊆ …`, where `Ker (A−λI)^k` is computed as the
//! kernel of `(I − Q Qᴴ)(A − λI)` with `Q` an orthonormal basis of the
//! previous kernel. That keeps every rank decision at the scale of
//! `‖A − λI‖` instead of its powers.

use crate::error::{Error, Result};
use crate::factor::{self, KernelBasis, Tolerance};
use crate::matrix::{self, kron, CMatrix, Complex, OperatorMode};
use crate::qr;

/// Default clustering radius relative to `max(1, ‖A‖_F)`.
pub const DEFAULT_RADIUS_REL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    pub value: Complex,
    pub alg_mult: usize,
    pub geo_mult: usize,
    pub index: usize,
    /// Jordan block sizes, descending.
    pub segre: Vec<usize>,
    /// `dim Ker (A−λI)^k − dim Ker (A−λI)^(k−1)`, k = 1, 2, …
    pub weyr: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    pub order: usize,
    pub eigen: Vec<EigenData>,
    /// Clustering radius that produced this summary.
    pub radius: f64,
}

impl SpectralSummary {
    pub fn distinct_count(&self) -> usize {
        self.eigen.len()
    }

    pub fn sum_alg_sq(&self) -> usize {
        self.eigen.iter().map(|e| e.alg_mult * e.alg_mult).sum()
    }

    pub fn sum_geo_sq(&self) -> usize {
        self.eigen.iter().map(|e| e.geo_mult * e.geo_mult).sum()
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.eigen.iter().all(|e| e.index == 1)
    }

    pub fn max_index(&self) -> usize {
        self.eigen.iter().map(|e| e.index).max().unwrap_or(0)
    }

    /// Checks the multiplicity bookkeeping invariants.
    pub fn is_consistent(&self) -> bool {
        let total: usize = self.eigen.iter().map(|e| e.alg_mult).sum();
        total == self.order
            && self.eigen.iter().all(|e| {
                e.segre.iter().sum::<usize>() == e.alg_mult
                    && e.segre.len() == e.geo_mult
                    && e.segre.first().copied() == Some(e.index)
                    && e.segre.windows(2).all(|w| w[0] >= w[1])
                    && 1 <= e.index
                    && e.index <= e.alg_mult
                    && e.geo_mult <= e.alg_mult
                    && conjugate_partition(&e.segre) == e.weyr
            })
    }
}

/// Jordan structure plus an optional similarity `P` (A = P J P⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpec {
    pub blocks: Vec<(Complex, Vec<usize>)>,
    pub transform: Option<CMatrix>,
}

impl JordanSpec {
    pub fn new(blocks: Vec<(Complex, Vec<usize>)>) -> Self {
        Self { blocks, transform: None }
    }

    pub fn with_transform(mut self, p: CMatrix) -> Self {
        self.transform = Some(p);
        self
    }

    pub fn order(&self) -> usize {
        self.blocks.iter().flat_map(|(_, b)| b.iter()).sum()
    }

    pub fn jordan_matrix(&self) -> CMatrix {
        let blocks: Vec<CMatrix> = self
            .blocks
            .iter()
            .flat_map(|(v, sizes)| sizes.iter().map(move |&s| CMatrix::jordan_block(*v, s)))
            .collect();
        CMatrix::block_diag(&blocks)
    }

    /// Exact summary from the stated structure (eigenvalues assumed distinct).
    pub fn summary(&self) -> SpectralSummary {
        let eigen = self
            .blocks
            .iter()
            .map(|(v, sizes)| {
                let mut segre = sizes.clone();
                segre.sort_unstable_by(|a, b| b.cmp(a));
                EigenData {
                    value: *v,
                    alg_mult: segre.iter().sum(),
                    geo_mult: segre.len(),
                    index: segre.first().copied().unwrap_or(0),
                    weyr: conjugate_partition(&segre),
                    segre,
                }
            })
            .collect();
        SpectralSummary { order: self.order(), eigen, radius: 0.0 }
    }
}

/// Conjugate (transposed Young diagram) of a partition given in any order.
pub fn conjugate_partition(parts: &[usize]) -> Vec<usize> {
    let max = parts.iter().copied().max().unwrap_or(0);
    (1..=max).map(|k| parts.iter().filter(|&&p| p >= k).count()).collect()
}

/// All partitions of `n` as descending sequences.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Eigenvalues by shifted QR iteration, checked against the trace.
pub fn eigenvalues(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Complex>> {
    let n = a.order()?;
    if n == 0 {
        return Ok(vec![]);
    }
    let values =
        qr::eigenvalues(a.to_nalgebra()).ok_or_else(|| Error::EigenFailure("QR iteration did not converge".into()))?;
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenFailure("non-finite eigenvalue".into()));
    }
    let sum: Complex = values.iter().sum();
    let scale = a.frobenius_norm().max(1.0);
    let bound = tol.rel * scale * n as f64 + tol.abs;
    if (sum - a.trace()).norm() > bound {
        return Err(Error::EigenFailure(format!("eigenvalue sum misses the trace by {:e}", (sum - a.trace()).norm())));
    }
    Ok(values)
}

fn sort_key(z: &Complex) -> (f64, f64) {
    (z.re, z.im)
}

fn cluster_weighted(values: &[(Complex, usize)], radius: f64) -> Vec<(Complex, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i].0 - values[j].0).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex, usize)> = Vec::new();
    for (i, &(v, w)) in values.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += v * w as f64;
                g.2 += w;
            }
            None => groups.push((r, v * w as f64, w)),
        }
    }
    let mut out: Vec<(Complex, usize)> =
        groups.into_iter().filter(|g| g.2 > 0).map(|(_, s, w)| (s / w as f64, w)).collect();
    out.sort_by(|a, b| sort_key(&a.0).partial_cmp(&sort_key(&b.0)).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Single-linkage clustering: values within `radius` of each other (directly
/// or through a chain) share a cluster. Representatives are cluster means,
/// sorted by (re, im).
pub fn cluster_spectrum(values: &[Complex], radius: f64) -> Vec<(Complex, usize)> {
    let weighted: Vec<(Complex, usize)> = values.iter().map(|&v| (v, 1)).collect();
    cluster_weighted(&weighted, radius)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeyrSegre {
    pub weyr: Vec<usize>,
    pub segre: Vec<usize>,
    pub index: usize,
    pub geo_mult: usize,
    /// `dim Ker (A−λI)^index`, the algebraic multiplicity.
    pub alg_mult: usize,
}

/// Weyr and Segre characteristics of `A` at `lambda`.
pub fn weyr_and_segre(a: &CMatrix, lambda: Complex, tol: &Tolerance) -> Result<WeyrSegre> {
    let n = a.order()?;
    let b = a.shifted(lambda)?;
    let scale = factor::singular_values(&b).first().copied().unwrap_or(0.0).max(a.frobenius_norm() * 1e-3);
    let mut weyr = Vec::new();
    let mut prev = KernelBasis { ambient_dim: n, vectors: vec![] };
    loop {
        let c = if prev.nullity() == 0 { b.clone() } else { project_out(&b, &prev) };
        let next = factor::kernel_basis_at_scale(&c, scale, tol);
        let gain = next.nullity() as isize - prev.nullity() as isize;
        if gain <= 0 {
            break;
        }
        weyr.push(gain as usize);
        prev = next;
        if prev.nullity() >= n {
            break;
        }
    }
    if weyr.is_empty() {
        return Err(Error::NotAnEigenvalue { re: lambda.re, im: lambda.im });
    }
    if weyr.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InconsistentStructure(format!("Weyr sequence {weyr:?} is not non-increasing")));
    }
    let segre = conjugate_partition(&weyr);
    Ok(WeyrSegre { index: weyr.len(), geo_mult: weyr[0], alg_mult: weyr.iter().sum(), segre, weyr })
}

/// `(I − Q Qᴴ) B` for the orthonormal columns `Q` of `basis`.
fn project_out(b: &CMatrix, basis: &KernelBasis) -> CMatrix {
    let n = b.rows();
    let mut out = b.clone();
    for j in 0..b.cols() {
        let col = b.column_values(j);
        let p = basis.project(&col);
        for i in 0..n {
            out[(i, j)] = col[i] - p[i];
        }
    }
    out
}

/// Full spectral summary.
///
/// Clustering starts coarse (`0.1·max(1, ‖A‖_F)`) and refines by decades down
/// to the default radius; the first clustering whose every cluster has a
/// Weyr sum equal to its size is accepted. Coarse-first matters: the
/// eigenvalues of a perturbed Jordan block scatter on a small circle, and
/// each scattered value on its own also looks like a simple eigenvalue.
pub fn spectral_summary(a: &CMatrix, tol: &Tolerance) -> Result<SpectralSummary> {
    let n = a.order()?;
    if n == 0 {
        return Ok(SpectralSummary { order: 0, eigen: vec![], radius: 0.0 });
    }
    let values = eigenvalues(a, tol)?;
    let scale = a.frobenius_norm().max(1.0);
    let mut last_problem = String::new();
    for k in (0..=6).rev() {
        let radius = DEFAULT_RADIUS_REL * scale * 10f64.powi(k);
        let clusters = cluster_spectrum(&values, radius);
        match summarize_clusters(a, &clusters, tol) {
            Ok(eigen) => return Ok(SpectralSummary { order: n, eigen, radius }),
            Err(e) => last_problem = e.to_string(),
        }
    }
    Err(Error::InconsistentStructure(last_problem))
}

fn summarize_clusters(a: &CMatrix, clusters: &[(Complex, usize)], tol: &Tolerance) -> Result<Vec<EigenData>> {
    clusters
        .iter()
        .map(|&(value, size)| {
            let ws = weyr_and_segre(a, value, tol)?;
            if ws.alg_mult != size {
                return Err(Error::InconsistentStructure(format!(
                    "cluster of {size} eigenvalues near {value} has generalized eigenspace of dimension {}",
                    ws.alg_mult
                )));
            }
            Ok(EigenData {
                value,
                alg_mult: size,
                geo_mult: ws.geo_mult,
                index: ws.index,
                segre: ws.segre,
                weyr: ws.weyr,
            })
        })
        .collect()
}

/// Predicted spectrum of `A ⊕ (−Aᵀ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KronSumSpectrum {
    /// Distinct differences `λᵢ − λⱼ` with merged multiplicities.
    pub differences: Vec<(Complex, usize)>,
    /// Algebraic multiplicity of the eigenvalue 0.
    pub zero_alg_mult: usize,
    /// Geometric multiplicity of 0, i.e. the centralizer dimension.
    pub zero_geo_mult: usize,
    /// `Σ νᵢ²`, which equals `zero_geo_mult` only for diagonalizable `A`.
    pub sum_geo_sq: usize,
    /// `Σ μᵢ²`.
    pub sum_alg_sq: usize,
}

impl KronSumSpectrum {
    /// All differences with repetition.
    pub fn expanded(&self) -> Vec<Complex> {
        self.differences.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m)).collect()
    }

    pub fn total(&self) -> usize {
        self.differences.iter().map(|d| d.1).sum()
    }

    pub fn geo_formula_agrees(&self) -> bool {
        self.sum_geo_sq == self.zero_geo_mult
    }
}

pub fn kron_sum_spectrum(summary: &SpectralSummary) -> KronSumSpectrum {
    let mut raw = Vec::with_capacity(summary.eigen.len().pow(2));
    for ei in &summary.eigen {
        for ej in &summary.eigen {
            raw.push((ei.value - ej.value, ei.alg_mult * ej.alg_mult));
        }
    }
    let scale = summary.eigen.iter().map(|e| e.value.norm()).fold(1.0, f64::max);
    // the eigenvalue clusters may have been accepted at a coarse radius, but
    // their centers are accurate, so differences merge only at the floor
    let floor = DEFAULT_RADIUS_REL * scale;
    let radius = if summary.radius > 0.0 { summary.radius.min(floor) } else { floor };
    let differences = cluster_weighted(&raw, radius);
    let zero_alg_mult = differences.iter().filter(|d| d.0.norm() <= radius).map(|d| d.1).sum();
    KronSumSpectrum {
        differences,
        zero_alg_mult,
        zero_geo_mult: centralizer_dim_oracle(summary),
        sum_geo_sq: summary.sum_geo_sq(),
        sum_alg_sq: summary.sum_alg_sq(),
    }
}

/// Frobenius formula `Σ_λ Σ_{j,k} min(d_j, d_k)` over the Jordan block sizes
/// of each eigenvalue.
pub fn centralizer_dim_oracle(summary: &SpectralSummary) -> usize {
    summary
        .eigen
        .iter()
        .map(|e| e.segre.iter().map(|&dj| e.segre.iter().map(|&dk| dj.min(dk)).sum::<usize>()).sum::<usize>())
        .sum()
}

/// `P·J·P⁻¹` for the block-diagonal Jordan matrix of a structure (P = I by default).
pub fn build_from_jordan(spec: &JordanSpec, tol: &Tolerance) -> Result<CMatrix> {
    let j = spec.jordan_matrix();
    match &spec.transform {
        None => Ok(j),
        Some(p) => {
            if p.order()? != j.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "transform of order {} for a Jordan matrix of order {}",
                    p.rows(),
                    j.rows()
                )));
            }
            let p_inv = factor::inverse(p, tol)?;
            p.matmul(&j)?.matmul(&p_inv)
        }
    }
}

/// `‖T⁻¹·(A ⊗ I − I ⊗ Aᵀ)·T − (J ⊗ I − I ⊗ Jᵀ)‖_F` with `T = P ⊗ P⁻ᵀ`, relative
/// to `max(1, ‖J ⊗ I − I ⊗ Jᵀ‖_F)`.
pub fn jordan_similarity_residual(spec: &JordanSpec, tol: &Tolerance) -> Result<f64> {
    let j = spec.jordan_matrix();
    let n = j.rows();
    let p = spec.transform.clone().unwrap_or_else(|| CMatrix::identity(n));
    let p_inv = factor::inverse(&p, tol)?;
    let a = p.matmul(&j)?.matmul(&p_inv)?;
    let t = kron(&p, &p_inv.transpose());
    let t_inv = kron(&p_inv, &p.transpose());
    let op_a = matrix::comm_operator(&a, OperatorMode::Transpose)?;
    let op_j = matrix::comm_operator(&j, OperatorMode::Transpose)?;
    let lhs = t_inv.matmul(&op_a)?.matmul(&t)?;
    Ok(lhs.try_sub(&op_j)?.frobenius_norm() / op_j.frobenius_norm().max(1.0))
}

/// Outcome of the eigenvector tensor identity on a diagonalizable matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCheck {
    pub passed: bool,
    pub max_residual: f64,
    pub pairs: usize,
}

/// For eigenpairs `A x = λ x` and `Aᵀ z = η z`, checks
/// `(A ⊗ I − I ⊗ Aᵀ)(x ⊗ z) = (λ − η)(x ⊗ z)`.
pub fn eig_tensor_check(a: &CMatrix, tol: &Tolerance) -> Result<TensorCheck> {
    let n = a.order()?;
    let summary = spectral_summary(a, tol)?;
    if let Some(e) = summary.eigen.iter().find(|e| e.index > 1) {
        return Err(Error::Defective { index: e.index });
    }
    let at = a.transpose();
    let scale = a.frobenius_norm().max(1.0);
    let mut right = Vec::new();
    let mut left = Vec::new();
    for e in &summary.eigen {
        let kx = eigenvectors(a, e.value, tol)?;
        let kz = eigenvectors(&at, e.value, tol)?;
        if kx.nullity() != e.alg_mult || kz.nullity() != e.alg_mult {
            return Err(Error::Defective { index: 2 });
        }
        right.extend(kx.vectors.into_iter().map(|v| (e.value, v)));
        left.extend(kz.vectors.into_iter().map(|v| (e.value, v)));
    }
    let op = matrix::comm_operator(a, OperatorMode::Transpose)?;
    let mut max_residual: f64 = 0.0;
    for (lx, x) in &right {
        for (lz, z) in &left {
            let w = kron(&CMatrix::column(x), &CMatrix::column(z)).column_values(0);
            let ow = op.mul_vec(&w)?;
            let shift = lx - lz;
            let r = ow.iter().zip(&w).map(|(o, wi)| (o - shift * wi).norm_sqr()).sum::<f64>().sqrt();
            max_residual = max_residual.max(r);
        }
    }
    debug_assert_eq!(right.len(), n);
    Ok(TensorCheck { passed: max_residual <= tol.rel * scale, max_residual, pairs: right.len() * left.len() })
}

/// Orthonormal eigenvectors of `a` for the eigenvalue `lambda`.
pub fn eigenvectors(a: &CMatrix, lambda: Complex, tol: &Tolerance) -> Result<KernelBasis> {
    let b = a.shifted(lambda)?;
    let scale = factor::singular_values(&b).first().copied().unwrap_or(0.0).max(a.frobenius_norm() * 1e-3);
    Ok(factor::kernel_basis_at_scale(&b, scale, tol))
}

/// Greedy nearest matching of two multisets; returns the largest matched
/// distance, or `None` when the sizes differ or some element has no partner
/// within `radius`.
pub fn match_multisets(a: &[Complex], b: &[Complex], radius: f64) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| sort_key(&a[i]).partial_cmp(&sort_key(&a[j])).unwrap_or(std::cmp::Ordering::Equal));
    let mut worst: f64 = 0.0;
    for i in order {
        let best = (0..b.len())
            .filter(|&k| !used[k])
            .min_by(|&k, &l| (a[i] - b[k]).norm().total_cmp(&(a[i] - b[l]).norm()))?;
        let d = (a[i] - b[best]).norm();
        if d > radius {
            return None;
        }
        used[best] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// Algebraic multiplicity of zero among `values` at `radius`.
pub fn count_near_zero(values: &[Complex], radius: f64) -> usize {
    values.iter().filter(|z| z.norm() <= radius).count()
}
