//! Matrix functions through Hermite interpolation on the spectrum, and
//! commutation checks for functions of commuting matrices.
//!
//! `f(A)` is `p(A)` where `p` matches `f` and its first `mₖ − 1` derivatives
//! at every eigenvalue `λₖ` of index `mₖ`. The polynomial is built in Newton
//! form from divided differences over repeated nodes and evaluated at `A`
//! with a nested (Horner) scheme.

use std::fmt;
use std::sync::Arc;

use crate::commutant::{self, CommutantBasis};
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::factor::{self, Tolerance};
use crate::matrix::{self, vec_norm, vec_row, CMatrix, Complex, OperatorMode, ONE, ZERO};
use crate::spectral::{self, SpectralSummary};

/// Interpolation whose Newton coefficients grow past this factor relative
/// to the data is reported as ill-conditioned.
pub const MAX_GROWTH: f64 = 1e12;

type Evaluator = dyn Fn(Complex, usize) -> Option<Complex> + Send + Sync;

/// `f` together with its derivatives: `eval(λ, k) = f⁽ᵏ⁾(λ)`.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFunction({})", self.name)
    }
}

impl ScalarFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(Complex, usize) -> Option<Complex> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn derivative(&self, z: Complex, k: usize) -> Option<Complex> {
        (self.eval)(z, k)
    }

    pub fn exp() -> Self {
        Self::new("exp", |z, _| Some(z.exp()))
    }

    pub fn identity() -> Self {
        Self::polynomial("identity", vec![ZERO, ONE])
    }

    /// `λ ↦ λᵏ`.
    pub fn power(k: u32) -> Self {
        let mut coeffs = vec![ZERO; k as usize + 1];
        coeffs[k as usize] = ONE;
        Self::polynomial(format!("pow{k}"), coeffs)
    }

    /// `λ ↦ Σ cᵢ λⁱ` (coefficients in ascending order).
    pub fn polynomial(name: impl Into<String>, coeffs: Vec<Complex>) -> Self {
        Self::new(name, move |z, k| Some(poly_derivative(&coeffs, z, k)))
    }

    /// `λ ↦ 1 / (λ − c)`; undefined at `c`.
    pub fn shifted_inverse(c: Complex) -> Self {
        Self::new(format!("inv_shift({},{})", c.re, c.im), move |z, k| {
            let d = z - c;
            if d.norm() == 0.0 {
                return None;
            }
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Some(Complex::new(sign * fact, 0.0) / d.powu(k as u32 + 1))
        })
    }
}

fn poly_derivative(coeffs: &[Complex], z: Complex, k: usize) -> Complex {
    let mut acc = ZERO;
    for (i, &c) in coeffs.iter().enumerate().skip(k).rev() {
        let falling: f64 = ((i - k + 1)..=i).map(|t| t as f64).product();
        acc = acc * z + c * falling;
    }
    acc
}

/// Hermite interpolating polynomial in Newton form.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitePolynomial {
    /// Distinct eigenvalues with their indices.
    pub nodes: Vec<(Complex, usize)>,
    /// Node sequence with each `λₖ` repeated `mₖ` times.
    pub newton_nodes: Vec<Complex>,
    /// Divided differences `f[x₀], f[x₀,x₁], …`.
    pub newton_coeffs: Vec<Complex>,
    /// Monomial coefficients, ascending.
    pub coefficients: Vec<Complex>,
    /// Bound on the rounding-error amplification of the divided differences.
    pub growth: f64,
    /// Smallest distance between distinct nodes (∞ for one node).
    pub separation: f64,
}

impl HermitePolynomial {
    pub fn degree_bound(&self) -> usize {
        self.newton_nodes.len()
    }

    pub fn eval(&self, z: Complex) -> Complex {
        poly_derivative(&self.coefficients, z, 0)
    }

    pub fn derivative(&self, z: Complex, k: usize) -> Complex {
        poly_derivative(&self.coefficients, z, k)
    }

    /// Largest relative violation of `p⁽ⁱ⁾(λₖ) = f⁽ⁱ⁾(λₖ)`.
    pub fn interpolation_defect(&self, f: &ScalarFunction) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &(z, m) in &self.nodes {
            for k in 0..m {
                let target = required(f, z, k)?;
                worst = worst.max((self.derivative(z, k) - target).norm() / target.norm().max(1.0));
            }
        }
        Ok(worst)
    }
}

fn required(f: &ScalarFunction, z: Complex, k: usize) -> Result<Complex> {
    f.derivative(z, k).filter(|v| v.re.is_finite() && v.im.is_finite()).ok_or_else(|| Error::MissingDerivative {
        name: f.name.clone(),
        order: k,
        re: z.re,
        im: z.im,
    })
}

/// Hermite interpolant of `f` on the spectrum described by `summary`.
pub fn hermite_interpolant(summary: &SpectralSummary, f: &ScalarFunction) -> Result<HermitePolynomial> {
    let nodes: Vec<(Complex, usize)> = summary.eigen.iter().map(|e| (e.value, e.index)).collect();
    hermite_on_nodes(&nodes, f)
}

/// Hermite interpolant on explicit `(node, multiplicity)` pairs.
pub fn hermite_on_nodes(nodes: &[(Complex, usize)], f: &ScalarFunction) -> Result<HermitePolynomial> {
    let xs: Vec<Complex> = nodes.iter().flat_map(|&(z, m)| std::iter::repeat_n(z, m)).collect();
    let n = xs.len();
    // table[i] holds f[x_i, …, x_{i+level}] after each pass; err[i] bounds
    // its propagated rounding error in units of eps·max|f(xⱼ)|.
    let mut table: Vec<Complex> = xs.iter().map(|&x| required(f, x, 0)).collect::<Result<_>>()?;
    let value_scale = table.iter().fold(0.0f64, |s, v| s.max(v.norm())).max(f64::MIN_POSITIVE);
    let mut err: Vec<f64> = vec![1.0; n];
    let mut coeffs = Vec::with_capacity(n);
    let mut growth: f64 = if n > 0 { 1.0 } else { 0.0 };
    if n > 0 {
        coeffs.push(table[0]);
    }
    let mut fact = 1.0;
    for level in 1..n {
        fact *= level as f64;
        let mut next = Vec::with_capacity(n - level);
        let mut next_err = Vec::with_capacity(n - level);
        for i in 0..n - level {
            let (a, b) = (xs[i], xs[i + level]);
            if a == b {
                let d = required(f, a, level)? / fact;
                next_err.push(d.norm() / value_scale);
                next.push(d);
            } else {
                next.push((table[i + 1] - table[i]) / (b - a));
                next_err.push((err[i] + err[i + 1]) / (b - a).norm());
            }
        }
        coeffs.push(next[0]);
        growth = growth.max(next_err[0]);
        table = next;
        err = next_err;
    }
    let mut separation = f64::INFINITY;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            separation = separation.min((nodes[i].0 - nodes[j].0).norm());
        }
    }
    if !growth.is_finite() || growth > MAX_GROWTH {
        return Err(Error::IllConditioned { growth, separation });
    }

    // monomial form: expand c₀ + (z−x₀)(c₁ + (z−x₁)(c₂ + …))
    let mut mono: Vec<Complex> = Vec::with_capacity(n);
    for k in (0..n).rev() {
        // mono ← coeffs[k] + (z − x_k)·mono
        let mut shifted = vec![ZERO; mono.len() + 1];
        for (i, &m) in mono.iter().enumerate() {
            shifted[i + 1] += m;
            shifted[i] -= m * xs[k];
        }
        if shifted.is_empty() {
            shifted.push(ZERO);
        }
        shifted[0] += coeffs[k];
        mono = shifted;
    }
    Ok(HermitePolynomial {
        nodes: nodes.to_vec(),
        newton_nodes: xs,
        newton_coeffs: coeffs,
        coefficients: mono,
        growth,
        separation,
    })
}

/// Evaluates a Newton-form polynomial at a square matrix.
pub fn eval_newton_at(p: &HermitePolynomial, a: &CMatrix) -> Result<CMatrix> {
    let n = a.order()?;
    let mut acc = CMatrix::zeros(n, n);
    for k in (0..p.newton_coeffs.len()).rev() {
        let shifted = a.shifted(p.newton_nodes[k])?;
        acc = shifted.matmul(&acc)?.try_add(&CMatrix::identity(n).scale(p.newton_coeffs[k]))?;
    }
    Ok(acc)
}

/// Direct evaluation `Σ cᵢ Aⁱ` by Horner's rule (exact for integer data).
pub fn polynomial_at(coeffs: &[Complex], a: &CMatrix) -> Result<CMatrix> {
    let n = a.order()?;
    let mut acc = CMatrix::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = a.matmul(&acc)?.try_add(&CMatrix::identity(n).scale(c))?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFunction {
    pub value: CMatrix,
    pub polynomial: HermitePolynomial,
    pub summary: SpectralSummary,
    /// `‖p(A) − V f(Λ) V⁻¹‖_F / max(1, ‖p(A)‖_F)` for diagonalizable `A`
    /// with an eigenvector matrix of condition number at most 1e8.
    pub eigenbasis_discrepancy: Option<f64>,
}

pub fn matrix_function(a: &CMatrix, f: &ScalarFunction, tol: &Tolerance) -> Result<MatrixFunction> {
    let summary = spectral::spectral_summary(a, tol)?;
    let polynomial = hermite_interpolant(&summary, f)?;
    let value = eval_newton_at(&polynomial, a)?;
    let eigenbasis_discrepancy = eigenbasis_value(a, &summary, f, tol)?
        .map(|other| Ok::<_, Error>(value.try_sub(&other)?.frobenius_norm() / value.frobenius_norm().max(1.0)))
        .transpose()?;
    Ok(MatrixFunction { value, polynomial, summary, eigenbasis_discrepancy })
}

fn eigenbasis_value(
    a: &CMatrix,
    summary: &SpectralSummary,
    f: &ScalarFunction,
    tol: &Tolerance,
) -> Result<Option<CMatrix>> {
    if !summary.is_diagonalizable() {
        return Ok(None);
    }
    let n = a.order()?;
    let mut cols = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n);
    for e in &summary.eigen {
        let basis = spectral::eigenvectors(a, e.value, tol)?;
        if basis.nullity() != e.alg_mult {
            return Ok(None);
        }
        let fv = required(f, e.value, 0)?;
        for v in basis.vectors {
            cols.push(CMatrix::column(&v));
            vals.push(fv);
        }
    }
    let v = CMatrix::hstack(&cols)?;
    let sigma = factor::singular_values(&v);
    let (smax, smin) = (sigma[0], sigma[sigma.len() - 1]);
    if smin <= 0.0 || smax / smin > 1e8 {
        return Ok(None);
    }
    let v_inv = factor::inverse(&v, tol)?;
    Ok(Some(v.matmul(&CMatrix::diag(&vals))?.matmul(&v_inv)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionCommuteReport {
    /// `[A, B] = 0` at tolerance; when false the remaining checks are vacuous.
    pub pair_commutes: bool,
    pub f_name: String,
    /// `‖[A, f(B)]‖_F`.
    pub commutator_residual: f64,
    /// `‖(A ⊗ I − I ⊗ Aᵀ) v(f(B))‖`, the same quantity through the operator.
    pub kernel_residual: f64,
    /// `max(1, ‖A‖_F ‖f(B)‖_F)`.
    pub scale: f64,
    /// `f(B)` lies in the span of the computed commutant basis of `A`.
    pub in_commutant_span: bool,
    pub g_name: Option<String>,
    /// `‖[f(A), g(B)]‖_F` and its scale `max(1, ‖f(A)‖_F ‖g(B)‖_F)`.
    pub g_residual: Option<(f64, f64)>,
    pub passed: bool,
}

pub fn function_commutes_check(
    a: &CMatrix,
    b: &CMatrix,
    f: &ScalarFunction,
    g: Option<&ScalarFunction>,
    tol: &Tolerance,
) -> Result<FunctionCommuteReport> {
    let pair_commutes = commutant::in_commutant(a, b, tol)?.commutes;
    let fb = matrix_function(b, f, tol)?.value;
    let commutator_residual = matrix::commutator(a, &fb)?.frobenius_norm();
    let op = matrix::comm_operator(a, OperatorMode::Transpose)?;
    let kernel_residual = vec_norm(&op.mul_vec(vec_row(&fb)?.values())?);
    let scale = (a.frobenius_norm() * fb.frobenius_norm()).max(1.0);
    let basis: CommutantBasis = commutant::commutant_basis(a, tol)?;
    let in_commutant_span = basis.contains(&fb, tol)?;
    let g_residual = match g {
        Some(g) => {
            let fa = matrix_function(a, f, tol)?.value;
            let gb = matrix_function(b, g, tol)?.value;
            let r = matrix::commutator(&fa, &gb)?.frobenius_norm();
            Some((r, (fa.frobenius_norm() * gb.frobenius_norm()).max(1.0)))
        }
        None => None,
    };
    let bound = tol.residual;
    let passed = pair_commutes
        && commutator_residual <= bound * scale
        && kernel_residual <= bound * scale
        && in_commutant_span
        && g_residual.is_none_or(|(r, s)| r <= bound * s);
    Ok(FunctionCommuteReport {
        pair_commutes,
        f_name: f.name.clone(),
        commutator_residual,
        kernel_residual,
        scale,
        in_commutant_span,
        g_name: g.map(|g| g.name.clone()),
        g_residual,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionKernel {
    pub name: String,
    /// Nullity of the commutator operator of `fᵢ(A)`.
    pub dim: usize,
    /// Largest `‖K_{fᵢ(A)} x‖ / ‖K_{fᵢ(A)}‖_F` over kernel vectors `x` of `A`'s operator.
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionReport {
    pub kernel_dim: usize,
    pub functions: Vec<FunctionKernel>,
    pub max_residual: f64,
    pub intersection_dim: usize,
    pub included: bool,
    pub strict: bool,
    /// A matrix commuting with every `fᵢ(A)` but not with `A`.
    pub strictness_witness: Option<CMatrix>,
}

/// Checks `Ker K_A ⊆ ∩ᵢ Ker K_{fᵢ(A)}` and looks for a strictness witness.
pub fn kernel_inclusion_check(a: &CMatrix, fs: &[ScalarFunction], tol: &Tolerance) -> Result<InclusionReport> {
    let n = a.order()?;
    let base = commutant::commutant_basis(a, tol)?;
    let values = fs.iter().map(|f| Ok(matrix_function(a, f, tol)?.value)).collect::<Result<Vec<_>>>()?;
    let mut functions = Vec::with_capacity(fs.len());
    let mut max_residual: f64 = 0.0;
    for (f, fa) in fs.iter().zip(&values) {
        let op = matrix::comm_operator(fa, OperatorMode::Transpose)?;
        let op_scale = op.frobenius_norm().max(1.0);
        let mut worst: f64 = 0.0;
        for x in &base.kernel.vectors {
            worst = worst.max(vec_norm(&op.mul_vec(x)?) / op_scale);
        }
        max_residual = max_residual.max(worst);
        functions.push(FunctionKernel {
            name: f.name.clone(),
            dim: factor::kernel_basis(&op, tol).nullity(),
            max_residual: worst,
        });
    }
    let intersection = if values.is_empty() {
        factor::KernelBasis {
            ambient_dim: n * n,
            vectors: (0..n * n).map(|k| (0..n * n).map(|i| if i == k { ONE } else { ZERO }).collect()).collect(),
        }
    } else {
        commutant::mutual_commutant_basis(&values, tol)?.kernel
    };
    let strictness_witness = intersection
        .vectors
        .iter()
        .map(|v| (base.kernel.distance(v), v))
        .filter(|(d, _)| *d > tol.residual)
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, v)| matrix::unvec_slice(v, n))
        .transpose()?;
    let included = max_residual <= tol.residual;
    Ok(InclusionReport {
        kernel_dim: base.dim,
        functions,
        max_residual,
        intersection_dim: intersection.nullity(),
        included,
        strict: strictness_witness.is_some(),
        strictness_witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    /// `T⁻¹ [A, B] T`.
    pub lhs: CMatrix,
    /// `[T⁻¹ A T, T⁻¹ B T]`.
    pub rhs: CMatrix,
    pub residual: f64,
    /// Both sides were computed in exact integer arithmetic.
    pub exact: bool,
    pub identity_holds: bool,
    pub pair_commutes: bool,
    pub transformed_commutes: bool,
}

pub fn similarity_commutator(a: &CMatrix, b: &CMatrix, t: &CMatrix, tol: &Tolerance) -> Result<SimilarityReport> {
    let n = a.order()?;
    if b.shape() != (n, n) || t.shape() != (n, n) {
        return Err(Error::DimensionMismatch("A, B and T must share one order".into()));
    }
    if let Some(report) = exact_similarity(a, b, t) {
        return Ok(report);
    }
    let t_inv = factor::inverse(t, tol)?;
    let conj = |m: &CMatrix| -> Result<CMatrix> { t_inv.matmul(m)?.matmul(t) };
    let lhs = conj(&matrix::commutator(a, b)?)?;
    let (la, lb) = (conj(a)?, conj(b)?);
    let rhs = matrix::commutator(&la, &lb)?;
    let residual = lhs.try_sub(&rhs)?.frobenius_norm();
    let scale = (la.frobenius_norm() * lb.frobenius_norm()).max(1.0);
    Ok(SimilarityReport {
        identity_holds: residual <= tol.residual * scale,
        pair_commutes: commutant::in_commutant(a, b, tol)?.commutes,
        transformed_commutes: commutant::in_commutant(&la, &lb, tol)?.commutes,
        lhs,
        rhs,
        residual,
        exact: false,
    })
}

fn exact_similarity(a: &CMatrix, b: &CMatrix, t: &CMatrix) -> Option<SimilarityReport> {
    let (ea, eb, et) = (ExactMatrix::from_cmatrix(a)?, ExactMatrix::from_cmatrix(b)?, ExactMatrix::from_cmatrix(t)?);
    let t_inv = et.inverse_unimodular()?;
    let conj = |m: &ExactMatrix| t_inv.mul(m)?.mul(&et);
    let ab = ea.commutator(&eb)?;
    let lhs = conj(&ab)?;
    let (la, lb) = (conj(&ea)?, conj(&eb)?);
    let rhs = la.commutator(&lb)?;
    let zero = |m: &ExactMatrix| m.entries().iter().all(|z| z.re == 0 && z.im == 0);
    let report = SimilarityReport {
        identity_holds: lhs == rhs,
        pair_commutes: zero(&ab),
        transformed_commutes: zero(&rhs),
        residual: if lhs == rhs { 0.0 } else { lhs.sub(&rhs)?.to_cmatrix()?.frobenius_norm() },
        lhs: lhs.to_cmatrix()?,
        rhs: rhs.to_cmatrix()?,
        exact: true,
    };
    Some(report)
}

/// `‖(λI − B)⁻¹ A − A (λI − B)⁻¹‖_F` for `λ ∉ σ(B)`.
pub fn resolvent_commutator(a: &CMatrix, b: &CMatrix, lambda: Complex, tol: &Tolerance) -> Result<f64> {
    let n = b.order()?;
    let shifted = CMatrix::identity(n).scale(lambda).try_sub(b)?;
    let r = factor::inverse(&shifted, tol)?;
    Ok(matrix::commutator(&r, a)?.frobenius_norm())
}
