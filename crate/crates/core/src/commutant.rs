//! Commutant bases, membership tests, non-commuting witnesses, set
//! certification through stacked operators, and the real/imaginary split
//! systems for complex matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factor::{self, ConsistencyReport, KernelBasis, Tolerance};
use crate::matrix::{self, vec_norm, vec_row, CMatrix, Complex, OperatorMode};
use crate::spectral::JordanSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct CommutantBasis {
    pub order: usize,
    pub dim: usize,
    pub members: Vec<CMatrix>,
    pub source_mode: OperatorMode,
    /// False when the operator was built in adjoint mode from a matrix with
    /// a nonzero imaginary part; the kernel is then `{X : A X = X conj(A)}`.
    pub is_commutant: bool,
    pub kernel: KernelBasis,
}

impl CommutantBasis {
    fn from_kernel(order: usize, kernel: KernelBasis, mode: OperatorMode, is_commutant: bool) -> Result<Self> {
        Ok(Self {
            order,
            dim: kernel.nullity(),
            members: kernel.matrices(order)?,
            source_mode: mode,
            is_commutant,
            kernel,
        })
    }

    /// `‖v(X) − P v(X)‖ / max(1, ‖X‖_F)` where `P` projects onto the span.
    pub fn projection_residual(&self, x: &CMatrix) -> Result<f64> {
        let v = vec_row(x)?;
        if v.dim() != self.kernel.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "order-{} matrix against a basis of order {}",
                x.rows(),
                self.order
            )));
        }
        Ok(self.kernel.distance(v.values()) / x.frobenius_norm().max(1.0))
    }

    pub fn contains(&self, x: &CMatrix, tol: &Tolerance) -> Result<bool> {
        Ok(self.projection_residual(x)? <= tol.residual)
    }
}

/// Commutant of `A` in the default (transpose) mode.
pub fn commutant_basis(a: &CMatrix, tol: &Tolerance) -> Result<CommutantBasis> {
    commutant_basis_with_mode(a, OperatorMode::Transpose, tol)
}

pub fn commutant_basis_with_mode(a: &CMatrix, mode: OperatorMode, tol: &Tolerance) -> Result<CommutantBasis> {
    let n = a.order()?;
    let op = matrix::comm_operator(a, mode)?;
    let kernel = factor::kernel_basis(&op, tol);
    let is_commutant = mode == OperatorMode::Transpose || a.is_real();
    CommutantBasis::from_kernel(n, kernel, mode, is_commutant)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub commutes: bool,
    /// `‖[A, X]‖_F`.
    pub residual: f64,
    pub threshold: f64,
}

/// `[A, X] = 0` at tolerance: `‖[A, X]‖_F ≤ tol.rel · max(1, ‖A‖_F ‖X‖_F)`.
pub fn in_commutant(a: &CMatrix, x: &CMatrix, tol: &Tolerance) -> Result<Membership> {
    let residual = matrix::commutator(a, x)?.frobenius_norm();
    let threshold = pair_threshold(a, x, tol);
    Ok(Membership { commutes: residual <= threshold, residual, threshold })
}

fn pair_threshold(a: &CMatrix, x: &CMatrix, tol: &Tolerance) -> f64 {
    tol.rel * (a.frobenius_norm() * x.frobenius_norm()).max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessResult {
    pub consistency: ConsistencyReport,
    pub x: Option<CMatrix>,
    /// `[A, X]` when `X` is present.
    pub achieved_m: Option<CMatrix>,
    /// `‖[A, X] − M‖_F`.
    pub residual: Option<f64>,
    /// Residual of the same system solved through the permuted block
    /// partition, as an independent route.
    pub partition_residual: Option<f64>,
    /// `scale = ‖A‖_F ‖X‖_F + ‖M‖_F`.
    pub scale: f64,
}

impl WitnessResult {
    pub fn consistent(&self) -> bool {
        self.consistency.consistent
    }
}

/// Solves `[A, X] = M` for `X`.
///
/// Returns the minimum-norm solution; with `seed`, adds a reproducible
/// random combination of commutant members (which does not change `[A, X]`).
pub fn noncommuting_witness(a: &CMatrix, m: &CMatrix, tol: &Tolerance, seed: Option<u64>) -> Result<WitnessResult> {
    let n = a.order()?;
    if m.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("target is {}x{}, A has order {n}", m.rows(), m.cols())));
    }
    let op = matrix::comm_operator(a, OperatorMode::Transpose)?;
    let target = vec_row(m)?.into_values();
    let consistency = factor::solve_consistent(&op, &target, tol)?;
    let mut result = WitnessResult {
        consistency,
        x: None,
        achieved_m: None,
        residual: None,
        partition_residual: None,
        scale: m.frobenius_norm(),
    };
    let Some(sol) = result.consistency.solution.clone() else {
        return Ok(result);
    };
    let mut v = sol;
    if let Some(seed) = seed {
        let kernel = factor::kernel_basis(&op, tol);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for basis_vec in &kernel.vectors {
            let c: f64 = rng.gen_range(-1.0..1.0);
            for (vi, bi) in v.iter_mut().zip(basis_vec) {
                *vi += bi * c;
            }
        }
    }
    let x = matrix::unvec_slice(&v, n)?;
    let achieved = matrix::commutator(a, &x)?;
    result.residual = Some(achieved.try_sub(m)?.frobenius_norm());
    result.scale = a.frobenius_norm() * x.frobenius_norm() + m.frobenius_norm();

    let part = factor::block_partition(&op, tol)?;
    let (xp, _) = part.solve(&target, None)?;
    let xp = matrix::unvec_slice(&xp, n)?;
    result.partition_residual = Some(matrix::commutator(a, &xp)?.try_sub(m)?.frobenius_norm());

    result.x = Some(x);
    result.achieved_m = Some(achieved);
    Ok(result)
}

fn uniform_order(set: &[CMatrix]) -> Result<usize> {
    let first = set.first().ok_or(Error::EmptySet)?;
    let n = first.order()?;
    for (k, m) in set.iter().enumerate() {
        if m.order()? != n {
            return Err(Error::DimensionMismatch(format!("member {k} has order {}, expected {n}", m.rows())));
        }
    }
    Ok(n)
}

/// Vertical stack of the commutator operators of every member except `exclude`.
pub fn stacked_operator(set: &[CMatrix], exclude: Option<usize>) -> Result<CMatrix> {
    let n = uniform_order(set)?;
    if let Some(i) = exclude {
        if i >= set.len() {
            return Err(Error::IndexOutOfRange { index: i, len: set.len() });
        }
    }
    let blocks = set
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != exclude)
        .map(|(_, a)| matrix::comm_operator(a, OperatorMode::Transpose))
        .collect::<Result<Vec<_>>>()?;
    if blocks.is_empty() {
        return Ok(CMatrix::zeros(0, n * n));
    }
    CMatrix::vstack(&blocks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetReport {
    pub p: usize,
    pub order: usize,
    /// `‖[Aᵢ, Aⱼ]‖_F`, symmetric with zero diagonal.
    pub pair_residuals: Vec<Vec<f64>>,
    pub pairwise_commuting: bool,
    pub stacked_rank: usize,
    pub mutual_dim: usize,
    /// `v(Aᵢ) ∈ ∩_{j > i} Ker(comm_operator(Aⱼ))` at tolerance.
    pub triangular_verdicts: Vec<bool>,
    /// Direct pairwise test and triangular kernel test give the same answer.
    pub tests_agree: bool,
}

pub fn pairwise_commuting(set: &[CMatrix], tol: &Tolerance) -> Result<SetReport> {
    let n = uniform_order(set)?;
    let p = set.len();
    let mut pair_residuals = vec![vec![0.0; p]; p];
    let mut direct = true;
    for i in 0..p {
        for j in i + 1..p {
            let m = in_commutant(&set[i], &set[j], tol)?;
            pair_residuals[i][j] = m.residual;
            pair_residuals[j][i] = m.residual;
            direct &= m.commutes;
        }
    }

    let vecs: Vec<Vec<Complex>> = set.iter().map(|a| vec_row(a).map(|v| v.into_values())).collect::<Result<_>>()?;
    let mut triangular_verdicts = Vec::with_capacity(p);
    for i in 0..p {
        let mut ok = true;
        for j in i + 1..p {
            let image = matrix::comm_operator(&set[j], OperatorMode::Transpose)?.mul_vec(&vecs[i])?;
            ok &= vec_norm(&image) <= pair_threshold(&set[i], &set[j], tol);
        }
        triangular_verdicts.push(ok);
    }
    let triangular = triangular_verdicts.iter().all(|&b| b);

    let stack = stacked_operator(set, None)?;
    let stacked_rank = factor::rank_of(&stack, tol);
    Ok(SetReport {
        p,
        order: n,
        pair_residuals,
        pairwise_commuting: direct,
        stacked_rank,
        mutual_dim: n * n - stacked_rank,
        triangular_verdicts,
        tests_agree: direct == triangular,
    })
}

/// Basis of the matrices commuting with every member of `set`.
pub fn mutual_commutant_basis(set: &[CMatrix], tol: &Tolerance) -> Result<CommutantBasis> {
    let n = uniform_order(set)?;
    let kernel = factor::kernel_basis(&stacked_operator(set, None)?, tol);
    CommutantBasis::from_kernel(n, kernel, OperatorMode::Transpose, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub order: usize,
    /// `rank(comm_operator(Aⱼ))`.
    pub block_ranks: Vec<usize>,
    /// `rank(Nᵢ)`, `Nᵢ` the stack without member `i`; `None` for a singleton.
    pub excluded_ranks: Vec<Option<usize>>,
    /// `rank(N)`.
    pub stacked_rank: usize,
    /// `rank(blockⱼ) ≤ rank(Nᵢ) ≤ rank(N) < n²` for all `j ≠ i`, and
    /// `rank(blockⱼ) ≤ rank(N)`.
    pub chain_holds: bool,
    /// `Nᴴ N` is singular at tolerance.
    pub gram_singular: bool,
}

pub fn rank_defectiveness_report(set: &[CMatrix], tol: &Tolerance) -> Result<RankReport> {
    let n = uniform_order(set)?;
    let p = set.len();
    let n2 = n * n;
    let block_ranks = set
        .iter()
        .map(|a| Ok(factor::rank_of(&matrix::comm_operator(a, OperatorMode::Transpose)?, tol)))
        .collect::<Result<Vec<_>>>()?;
    let excluded_ranks = (0..p)
        .map(|i| if p == 1 { Ok(None) } else { Ok(Some(factor::rank_of(&stacked_operator(set, Some(i))?, tol))) })
        .collect::<Result<Vec<_>>>()?;
    let stack = stacked_operator(set, None)?;
    let stacked_rank = factor::rank_of(&stack, tol);

    let mut chain_holds = stacked_rank < n2 && block_ranks.iter().all(|&r| r <= stacked_rank);
    for (i, ri) in excluded_ranks.iter().enumerate() {
        if let Some(ri) = *ri {
            chain_holds &= ri <= stacked_rank;
            chain_holds &= block_ranks.iter().enumerate().all(|(j, &rj)| j == i || rj <= ri);
        }
    }
    let gram = stack.adjoint().matmul(&stack)?;
    let gram_singular = factor::rank_of(&gram, tol) < n2;
    Ok(RankReport { order: n, block_ranks, excluded_ranks, stacked_rank, chain_holds, gram_singular })
}

/// Real coefficient matrix whose kernel is the (re, im) split of a complex
/// commutant.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSplitSystem {
    /// `2pn² × 2n²`, all entries real.
    pub matrix: CMatrix,
    pub order: usize,
    pub members: usize,
}

fn split_block(a: &CMatrix) -> Result<CMatrix> {
    let k_re = matrix::comm_operator(&a.re(), OperatorMode::Transpose)?;
    let k_im = matrix::comm_operator(&a.im(), OperatorMode::Transpose)?;
    let top = CMatrix::hstack(&[k_re.clone(), -&k_im])?;
    let bottom = CMatrix::hstack(&[k_im, k_re])?;
    CMatrix::vstack(&[top, bottom])
}

/// `[[K_re, −K_im], [K_im, K_re]]` with `K_x = A_x ⊗ I − I ⊗ A_xᵀ`, acting on
/// `(v(B_re), v(B_im))`.
pub fn real_split_operator(a: &CMatrix) -> Result<RealSplitSystem> {
    real_split_set_operator(std::slice::from_ref(a))
}

pub fn real_split_set_operator(set: &[CMatrix]) -> Result<RealSplitSystem> {
    let n = uniform_order(set)?;
    let blocks = set.iter().map(split_block).collect::<Result<Vec<_>>>()?;
    Ok(RealSplitSystem { matrix: CMatrix::vstack(&blocks)?, order: n, members: set.len() })
}

/// `(v(B_re), v(B_im))` for a complex `B`.
pub fn split_vector(v: &[Complex]) -> Vec<Complex> {
    v.iter().map(|z| Complex::new(z.re, 0.0)).chain(v.iter().map(|z| Complex::new(z.im, 0.0))).collect()
}

/// Inverse of [`split_vector`].
pub fn join_vector(w: &[Complex]) -> Vec<Complex> {
    let h = w.len() / 2;
    (0..h).map(|k| Complex::new(w[k].re, w[h + k].re)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitEquivalence {
    pub complex_dim: usize,
    pub split_dim: usize,
    /// Largest `‖S · split(b)‖` and `‖S · split(i b)‖` over complex kernel vectors `b`.
    pub forward_residual: f64,
    /// Largest `‖N · join(w)‖` over split kernel vectors `w`.
    pub backward_residual: f64,
}

impl SplitEquivalence {
    pub fn holds(&self, tol: &Tolerance) -> bool {
        self.split_dim == 2 * self.complex_dim
            && self.forward_residual <= tol.residual
            && self.backward_residual <= tol.residual
    }
}

/// Compares the split kernel with the complex mutual commutant of `set`.
pub fn split_equivalence(set: &[CMatrix], tol: &Tolerance) -> Result<SplitEquivalence> {
    let stack = stacked_operator(set, None)?;
    let complex_kernel = factor::kernel_basis(&stack, tol);
    let split = real_split_set_operator(set)?;
    let split_kernel = factor::kernel_basis(&split.matrix, tol);
    let scale = stack.frobenius_norm().max(1.0);

    let mut forward: f64 = 0.0;
    for b in &complex_kernel.vectors {
        let ib: Vec<Complex> = b.iter().map(|z| z * Complex::i()).collect();
        for v in [split_vector(b), split_vector(&ib)] {
            forward = forward.max(vec_norm(&split.matrix.mul_vec(&v)?) / scale);
        }
    }
    let mut backward: f64 = 0.0;
    for w in &split_kernel.vectors {
        backward = backward.max(vec_norm(&stack.mul_vec(&join_vector(w))?) / scale);
    }
    Ok(SplitEquivalence {
        complex_dim: complex_kernel.nullity(),
        split_dim: split_kernel.nullity(),
        forward_residual: forward,
        backward_residual: backward,
    })
}

/// The four real commutators of a complex pair and the verdicts built on them.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub re_re: CMatrix,
    pub im_im: CMatrix,
    pub im_re: CMatrix,
    pub re_im: CMatrix,
    /// `[A, B] = 0` computed directly.
    pub direct_commutes: bool,
    /// `[A_re, B_re] = [A_im, B_im]` and `[A_im, B_re] = −[A_re, B_im]`.
    pub component_commutes: bool,
    /// All four real commutators vanish.
    pub all_four_vanish: bool,
    /// `B_re` and `B_im` each commute with both `A_re` and `A_im`.
    pub parts_commute_with_a_parts: bool,
    /// `A_re` and `A_im` each commute with both `B_re` and `B_im`.
    pub a_parts_commute_with_parts: bool,
}

impl ComponentReport {
    /// The equivalence and both sufficient conditions are consistent with the
    /// direct verdict.
    pub fn verdicts_consistent(&self) -> bool {
        self.direct_commutes == self.component_commutes
            && (!self.all_four_vanish || self.direct_commutes)
            && (!self.parts_commute_with_a_parts || self.direct_commutes)
            && (!self.a_parts_commute_with_parts || self.direct_commutes)
    }
}

pub fn component_commutation_report(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<ComponentReport> {
    let (ar, ai, br, bi) = (a.re(), a.im(), b.re(), b.im());
    let re_re = matrix::commutator(&ar, &br)?;
    let im_im = matrix::commutator(&ai, &bi)?;
    let im_re = matrix::commutator(&ai, &br)?;
    let re_im = matrix::commutator(&ar, &bi)?;
    let threshold = pair_threshold(a, b, tol);
    let small = |m: &CMatrix| m.frobenius_norm() <= threshold;
    let direct_commutes = in_commutant(a, b, tol)?.commutes;
    let real_part = re_re.try_sub(&im_im)?;
    let imag_part = im_re.try_add(&re_im)?;
    let component_commutes =
        (real_part.frobenius_norm().powi(2) + imag_part.frobenius_norm().powi(2)).sqrt() <= threshold;
    let all_four_vanish = [&re_re, &im_im, &im_re, &re_im].iter().all(|m| small(m));
    let commutes = |x: &CMatrix, y: &CMatrix| -> Result<bool> { Ok(in_commutant(x, y, tol)?.commutes) };
    let parts_commute_with_a_parts =
        commutes(&br, &ar)? && commutes(&br, &ai)? && commutes(&bi, &ai)? && commutes(&bi, &ar)?;
    let a_parts_commute_with_parts =
        commutes(&ar, &br)? && commutes(&ar, &bi)? && commutes(&ai, &bi)? && commutes(&ai, &br)?;
    Ok(ComponentReport {
        re_re,
        im_im,
        im_re,
        re_im,
        direct_commutes,
        component_commutes,
        all_four_vanish,
        parts_commute_with_a_parts,
        a_parts_commute_with_parts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownPart {
    Re,
    Im,
}

impl KnownPart {
    pub fn as_str(self) -> &'static str {
        match self {
            KnownPart::Re => "re",
            KnownPart::Im => "im",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialCompletion {
    pub consistency: ConsistencyReport,
    /// Assembled `B = B_re + i B_im` when consistent.
    pub completion: Option<CMatrix>,
    /// `‖[A, B]‖_F` of the assembled matrix.
    pub commutator_residual: Option<f64>,
}

/// Given the real (or imaginary) part of `B`, solves for the other part so
/// that `[A, B] = 0`, from the real and imaginary parts of
/// `(K_re + i K_im)(v(B_re) + i v(B_im)) = 0`.
pub fn partial_data_system(
    a: &CMatrix,
    b_known: &CMatrix,
    known: KnownPart,
    tol: &Tolerance,
) -> Result<PartialCompletion> {
    let n = a.order()?;
    if b_known.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "known part is {}x{}, A has order {n}",
            b_known.rows(),
            b_known.cols()
        )));
    }
    if !b_known.is_real() {
        return Err(Error::DimensionMismatch("known part must be real-valued".into()));
    }
    let k_re = matrix::comm_operator(&a.re(), OperatorMode::Transpose)?;
    let k_im = matrix::comm_operator(&a.im(), OperatorMode::Transpose)?;
    let u = vec_row(b_known)?.into_values();
    // known re part u, unknown w:  K_im w = K_re u,  K_re w = −K_im u
    // known im part w, unknown u:  K_re u = K_im w,  K_im u = −K_re w
    let (coeff, rhs_top, rhs_bottom) = match known {
        KnownPart::Re => (CMatrix::vstack(&[k_im.clone(), k_re.clone()])?, k_re.mul_vec(&u)?, k_im.mul_vec(&u)?),
        KnownPart::Im => (CMatrix::vstack(&[k_re.clone(), k_im.clone()])?, k_im.mul_vec(&u)?, k_re.mul_vec(&u)?),
    };
    let rhs: Vec<Complex> = rhs_top.into_iter().chain(rhs_bottom.into_iter().map(|z| -z)).collect();
    let consistency = factor::solve_consistent(&coeff, &rhs, tol)?;
    let Some(sol) = consistency.solution.clone() else {
        return Ok(PartialCompletion { consistency, completion: None, commutator_residual: None });
    };
    let other = matrix::unvec_slice(&sol, n)?;
    let i = Complex::i();
    let b = match known {
        KnownPart::Re => b_known.try_add(&other.re().scale(i))?,
        KnownPart::Im => other.re().try_add(&b_known.scale(i))?,
    };
    let residual = matrix::commutator(a, &b)?.frobenius_norm();
    Ok(PartialCompletion { consistency, completion: Some(b), commutator_residual: Some(residual) })
}

/// Mutual commutant of `Aᵢ = Pᵢ Jᵢ Pᵢ⁻¹` computed from the Jordan data as
/// `∩ᵢ Ker[(Jᵢ ⊗ I − I ⊗ Jᵢᵀ)(Pᵢ⁻¹ ⊗ Pᵢᵀ)]`.
pub fn jordan_route_kernel(specs: &[JordanSpec], tol: &Tolerance) -> Result<CommutantBasis> {
    let first = specs.first().ok_or(Error::EmptySet)?;
    let n = first.order();
    let mut blocks = Vec::with_capacity(specs.len());
    for (k, spec) in specs.iter().enumerate() {
        if spec.order() != n {
            return Err(Error::DimensionMismatch(format!("spec {k} has order {}, expected {n}", spec.order())));
        }
        let j = spec.jordan_matrix();
        let p = spec.transform.clone().unwrap_or_else(|| CMatrix::identity(n));
        let p_inv = factor::inverse(&p, tol)?;
        let t_inv = matrix::kron(&p_inv, &p.transpose());
        blocks.push(matrix::comm_operator(&j, OperatorMode::Transpose)?.matmul(&t_inv)?);
    }
    let kernel = factor::kernel_basis(&CMatrix::vstack(&blocks)?, tol);
    CommutantBasis::from_kernel(n, kernel, OperatorMode::Transpose, true)
}

/// Orthogonal split of `v(X)` into its commutant component and the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub in_commutant: bool,
    /// Relative distance of `v(X)` from the commutant.
    pub outside_component: f64,
}

/// Classifies `X` as a member of the commutant or of its complement; the
/// two outcomes are exclusive and exhaustive.
pub fn classify(basis: &CommutantBasis, x: &CMatrix, tol: &Tolerance) -> Result<Classification> {
    let outside_component = basis.projection_residual(x)?;
    Ok(Classification { in_commutant: outside_component <= tol.residual, outside_component })
}
