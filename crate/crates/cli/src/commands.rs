use std::path::{Path, PathBuf};

use kronsum::commutant::{self, CommutantBasis, KnownPart};
use kronsum::factor;
use kronsum::matfunc;
use kronsum::matrix::{self, OperatorMode};
use kronsum::spectral;
use kronsum::{CMatrix, Error, Tolerance};
use serde_json::{json, Value};

use crate::input::{load_jordan_spec, load_matrix};
use crate::report::{complex, complexes, matrices, matrix, num, opt_num};
use crate::{Cli, CliError, Command, Known, Mode};

type Outcome = Result<(Value, String), CliError>;

/// Subcommand name, input files and command-specific flags for the echo.
fn paths<'a>(ps: &[&'a PathBuf]) -> Vec<&'a Path> {
    ps.iter().map(|p| p.as_path()).collect()
}

pub(crate) fn describe(cmd: &Command) -> (&'static str, Vec<&Path>, Vec<(&'static str, Value)>) {
    match cmd {
        Command::Basis { a } => ("basis", paths(&[a]), vec![]),
        Command::Check { a, b } => ("check", paths(&[a, b]), vec![]),
        Command::SetCheck { set } => ("set-check", set.iter().map(PathBuf::as_path).collect(), vec![]),
        Command::Mutual { set } => ("mutual", set.iter().map(PathBuf::as_path).collect(), vec![]),
        Command::Witness { a, m } => ("witness", paths(&[a, m]), vec![]),
        Command::Funccheck { a, b, f, g } => (
            "funccheck",
            paths(&[a, b]),
            vec![("f", f.to_string().into()), ("g", g.as_ref().map_or(Value::Null, |g| g.to_string().into()))],
        ),
        Command::Spectrum { a } => ("spectrum", paths(&[a]), vec![]),
        Command::Split { set } => ("split", set.iter().map(PathBuf::as_path).collect(), vec![]),
        Command::Operator { a } => ("operator", paths(&[a]), vec![]),
        Command::KronSum { a, b } => ("kron-sum", paths(&[a, b]), vec![]),
        Command::Func { a, f } => ("func", paths(&[a]), vec![("f", f.to_string().into())]),
        Command::Complete { a, part, known } => {
            ("complete", paths(&[a, part]), vec![("known", if *known == Known::Re { "re" } else { "im" }.into())])
        }
        Command::Similarity { a, b, t } => ("similarity", paths(&[a, b, t]), vec![]),
        Command::JordanRoute { specs } => ("jordan-route", specs.iter().map(PathBuf::as_path).collect(), vec![]),
    }
}

pub(crate) fn dispatch(cli: &Cli, tol: &Tolerance) -> Outcome {
    match &cli.command {
        Command::Basis { a } => basis(&load_matrix(a)?, cli, tol),
        Command::Check { a, b } => check(&load_matrix(a)?, &load_matrix(b)?, tol),
        Command::SetCheck { set } => set_check(&load_set(set)?, tol),
        Command::Mutual { set } => mutual(&load_set(set)?, cli, tol),
        Command::Witness { a, m } => witness(&load_matrix(a)?, &load_matrix(m)?, cli, tol),
        Command::Funccheck { a, b, f, g } => {
            let g = g.as_ref().map(|g| g.to_scalar());
            funccheck(&load_matrix(a)?, &load_matrix(b)?, &f.to_scalar(), g.as_ref(), tol)
        }
        Command::Spectrum { a } => spectrum(&load_matrix(a)?, tol),
        Command::Split { set } => split(&load_set(set)?, tol),
        Command::Operator { a } => operator(&load_matrix(a)?, cli, tol),
        Command::KronSum { a, b } => kron_sum(&load_matrix(a)?, &load_matrix(b)?, tol),
        Command::Func { a, f } => func(&load_matrix(a)?, &f.to_scalar(), tol),
        Command::Complete { a, part, known } => complete(&load_matrix(a)?, &load_matrix(part)?, *known, tol),
        Command::Similarity { a, b, t } => similarity(&load_matrix(a)?, &load_matrix(b)?, &load_matrix(t)?, tol),
        Command::JordanRoute { specs } => jordan_route(specs, cli, tol),
    }
}

fn load_set(paths: &[PathBuf]) -> Result<Vec<CMatrix>, CliError> {
    paths.iter().map(|p| load_matrix(p)).collect()
}

fn operator_mode(mode: Mode) -> OperatorMode {
    match mode {
        Mode::Transpose => OperatorMode::Transpose,
        Mode::Adjoint => OperatorMode::Adjoint,
    }
}

fn verdict(commutes: bool) -> &'static str {
    if commutes {
        "commuting"
    } else {
        "not commuting"
    }
}

fn basis_json(b: &CommutantBasis, emit: bool) -> Value {
    let mut v = json!({
        "order": b.order,
        "dim": b.dim,
        "mode": b.source_mode.as_str(),
        "is_commutant": b.is_commutant,
    });
    if emit {
        v["members"] = matrices(&b.members);
    }
    v
}

fn basis(a: &CMatrix, cli: &Cli, tol: &Tolerance) -> Outcome {
    let b = commutant::commutant_basis_with_mode(a, operator_mode(cli.mode), tol)?;
    let n = b.order;
    let mut result = basis_json(&b, cli.emit_basis);
    result["operator_rank"] = (n * n - b.dim).into();
    result["contains_identity"] = b.contains(&CMatrix::identity(n), tol)?.into();
    let summary = format!("basis: commutant of an order-{n} matrix has dimension {}", b.dim);
    Ok((result, summary))
}

fn check(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Outcome {
    let m = commutant::in_commutant(a, b, tol)?;
    let comm = matrix::commutator(a, b)?;
    let parts = commutant::component_commutation_report(a, b, tol)?;
    let result = json!({
        "verdict": verdict(m.commutes),
        "commutes": m.commutes,
        "residual": num(m.residual),
        "threshold": num(m.threshold),
        "commutator": matrix(&comm),
        "components": {
            "re_re": num(parts.re_re.frobenius_norm()),
            "im_im": num(parts.im_im.frobenius_norm()),
            "im_re": num(parts.im_re.frobenius_norm()),
            "re_im": num(parts.re_im.frobenius_norm()),
            "direct_commutes": parts.direct_commutes,
            "component_commutes": parts.component_commutes,
            "all_four_vanish": parts.all_four_vanish,
            "parts_commute_with_a_parts": parts.parts_commute_with_a_parts,
            "a_parts_commute_with_parts": parts.a_parts_commute_with_parts,
            "verdicts_consistent": parts.verdicts_consistent(),
        },
    });
    Ok((result, format!("check: {} (residual {:e})", verdict(m.commutes), m.residual)))
}

fn set_check(set: &[CMatrix], tol: &Tolerance) -> Outcome {
    let r = commutant::pairwise_commuting(set, tol)?;
    let ranks = commutant::rank_defectiveness_report(set, tol)?;
    let residuals: Vec<Value> = r.pair_residuals.iter().map(|row| row.iter().copied().map(num).collect()).collect();
    let result = json!({
        "verdict": verdict(r.pairwise_commuting),
        "p": r.p,
        "order": r.order,
        "pairwise_commuting": r.pairwise_commuting,
        "pair_residuals": residuals,
        "triangular_verdicts": r.triangular_verdicts,
        "tests_agree": r.tests_agree,
        "stacked_rank": r.stacked_rank,
        "mutual_dim": r.mutual_dim,
        "ranks": {
            "block_ranks": ranks.block_ranks,
            "excluded_ranks": ranks.excluded_ranks,
            "stacked_rank": ranks.stacked_rank,
            "chain_holds": ranks.chain_holds,
            "gram_singular": ranks.gram_singular,
        },
    });
    let summary = format!("set-check: {} matrices, {}", r.p, verdict(r.pairwise_commuting));
    Ok((result, summary))
}

fn mutual(set: &[CMatrix], cli: &Cli, tol: &Tolerance) -> Outcome {
    let b = commutant::mutual_commutant_basis(set, tol)?;
    let mut result = basis_json(&b, cli.emit_basis);
    let contains: Vec<bool> = set.iter().map(|x| b.contains(x, tol)).collect::<Result<_, Error>>()?;
    result["contains_members"] = contains.into();
    result["contains_identity"] = b.contains(&CMatrix::identity(b.order), tol)?.into();
    Ok((result, format!("mutual: mutual commutant of {} matrices has dimension {}", set.len(), b.dim)))
}

fn witness(a: &CMatrix, m: &CMatrix, cli: &Cli, tol: &Tolerance) -> Outcome {
    let w = commutant::noncommuting_witness(a, m, tol, cli.seed)?;
    let consistent = w.consistent();
    let result = json!({
        "verdict": if consistent { "consistent" } else { "inconsistent" },
        "consistent": consistent,
        "operator_rank": w.consistency.operator_rank,
        "augmented_rank": w.consistency.augmented_rank,
        "least_squares_residual": num(w.consistency.residual),
        "x": w.x.as_ref().map_or(Value::Null, matrix),
        "residual": opt_num(w.residual),
        "partition_residual": opt_num(w.partition_residual),
        "scale": num(w.scale),
    });
    let summary = if consistent {
        format!("witness: consistent, residual {:e}", w.residual.unwrap_or(f64::NAN))
    } else {
        format!("witness: inconsistent (ranks {} vs {})", w.consistency.operator_rank, w.consistency.augmented_rank)
    };
    Ok((result, summary))
}

fn funccheck(
    a: &CMatrix,
    b: &CMatrix,
    f: &matfunc::ScalarFunction,
    g: Option<&matfunc::ScalarFunction>,
    tol: &Tolerance,
) -> Outcome {
    let r = matfunc::function_commutes_check(a, b, f, g, tol)?;
    let result = json!({
        "verdict": if r.passed { "passed" } else { "failed" },
        "passed": r.passed,
        "pair_commutes": r.pair_commutes,
        "f": r.f_name,
        "commutator_residual": num(r.commutator_residual),
        "kernel_residual": num(r.kernel_residual),
        "scale": num(r.scale),
        "in_commutant_span": r.in_commutant_span,
        "g": r.g_name,
        "g_residual": r.g_residual.map_or(Value::Null, |(res, scale)| json!({ "residual": num(res), "scale": num(scale) })),
    });
    let summary = format!("funccheck: {} for f = {}", if r.passed { "passed" } else { "failed" }, r.f_name);
    Ok((result, summary))
}

fn spectrum(a: &CMatrix, tol: &Tolerance) -> Outcome {
    let n = a.order()?;
    let s = spectral::spectral_summary(a, tol)?;
    let k = spectral::kron_sum_spectrum(&s);
    let op = matrix::commutator_operator(a)?;
    let measured_nullity = factor::kernel_basis(&op, tol).nullity();
    let op_eigs = spectral::eigenvalues(&op, tol)?;
    let radius = 1e-6 * a.frobenius_norm().max(1.0);
    let matched = spectral::match_multisets(&op_eigs, &k.expanded(), radius);
    let tensor = match spectral::eig_tensor_check(a, tol) {
        Ok(t) => json!({ "passed": t.passed, "max_residual": num(t.max_residual), "pairs": t.pairs }),
        Err(Error::Defective { index }) => json!({ "skipped": "defective", "index": index }),
        Err(e) => return Err(e.into()),
    };
    let eigen: Vec<Value> = s
        .eigen
        .iter()
        .map(|e| {
            json!({
                "value": complex(e.value),
                "alg_mult": e.alg_mult,
                "geo_mult": e.geo_mult,
                "index": e.index,
                "segre": e.segre,
                "weyr": e.weyr,
            })
        })
        .collect();
    let differences: Vec<Value> =
        k.differences.iter().map(|&(d, mult)| json!({ "value": complex(d), "mult": mult })).collect();
    let result = json!({
        "order": n,
        "radius": num(s.radius),
        "distinct": s.distinct_count(),
        "diagonalizable": s.is_diagonalizable(),
        "eigen": eigen,
        "kron_sum": {
            "differences": differences,
            "zero_alg_mult": k.zero_alg_mult,
            "zero_geo_mult_oracle": k.zero_geo_mult,
            "zero_geo_mult_measured": measured_nullity,
            "oracle_agrees": measured_nullity == k.zero_geo_mult,
            "sum_alg_sq": k.sum_alg_sq,
            "sum_geo_sq": k.sum_geo_sq,
            "geo_formula_agrees": k.geo_formula_agrees(),
            "bound_chain": n * n >= k.zero_alg_mult
                && k.zero_alg_mult >= k.sum_alg_sq
                && measured_nullity >= k.sum_geo_sq.max(n),
        },
        "operator_eigenvalues": complexes(&op_eigs),
        "match_radius": num(radius),
        "match_distance": opt_num(matched),
        "tensor_check": tensor,
    });
    let summary = format!(
        "spectrum: {} distinct eigenvalues, centralizer dimension {} (measured {})",
        s.distinct_count(),
        k.zero_geo_mult,
        measured_nullity
    );
    Ok((result, summary))
}

fn split(set: &[CMatrix], tol: &Tolerance) -> Outcome {
    let sys = commutant::real_split_set_operator(set)?;
    let eq = commutant::split_equivalence(set, tol)?;
    let holds = eq.holds(tol);
    let result = json!({
        "order": sys.order,
        "members": sys.members,
        "split_rows": sys.matrix.rows(),
        "split_cols": sys.matrix.cols(),
        "complex_dim": eq.complex_dim,
        "split_dim": eq.split_dim,
        "forward_residual": num(eq.forward_residual),
        "backward_residual": num(eq.backward_residual),
        "holds": holds,
    });
    let summary =
        format!("split: complex kernel {} and split kernel {}, equivalence {}", eq.complex_dim, eq.split_dim, holds);
    Ok((result, summary))
}

fn operator(a: &CMatrix, cli: &Cli, tol: &Tolerance) -> Outcome {
    let op = matrix::comm_operator(a, operator_mode(cli.mode))?;
    let sigma = factor::singular_values(&op);
    let rank = factor::rank_of(&op, tol);
    let part = factor::block_partition(&op, tol)?;
    let schur = part.schur_complement()?.frobenius_norm();
    let result = json!({
        "mode": operator_mode(cli.mode).as_str(),
        "operator": matrix(&op),
        "rank": rank,
        "nullity": op.cols() - rank,
        "singular_values": sigma.iter().copied().map(num).collect::<Vec<_>>(),
        "partition": {
            "rank": part.rank,
            "row_order": part.row_order,
            "col_order": part.col_order,
            "a11": matrix(&part.a11),
            "a11_sigma_min": num(part.a11_sigma_min),
            "schur_norm": num(schur),
        },
    });
    Ok((result, format!("operator: {0}x{0} commutator operator of rank {rank}", op.rows())))
}

fn kron_sum(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Outcome {
    let s = matrix::kron_sum(a, b)?;
    let ea = spectral::eigenvalues(a, tol)?;
    let eb = spectral::eigenvalues(b, tol)?;
    let es = spectral::eigenvalues(&s, tol)?;
    let sums: Vec<_> = ea.iter().flat_map(|x| eb.iter().map(move |y| x + y)).collect();
    let radius = 1e-6 * (a.frobenius_norm() + b.frobenius_norm()).max(1.0);
    let matched = spectral::match_multisets(&es, &sums, radius);
    let result = json!({
        "kron_sum": matrix(&s),
        "eigenvalues_a": complexes(&ea),
        "eigenvalues_b": complexes(&eb),
        "eigenvalues": complexes(&es),
        "pairwise_sums": complexes(&sums),
        "match_radius": num(radius),
        "match_distance": opt_num(matched),
    });
    let summary = format!("kron-sum: order {}, spectrum matches pairwise sums: {}", s.rows(), matched.is_some());
    Ok((result, summary))
}

fn func(a: &CMatrix, f: &matfunc::ScalarFunction, tol: &Tolerance) -> Outcome {
    let mf = matfunc::matrix_function(a, f, tol)?;
    let inc = matfunc::kernel_inclusion_check(a, std::slice::from_ref(f), tol)?;
    let p = &mf.polynomial;
    let nodes: Vec<Value> = p.nodes.iter().map(|&(z, m)| json!({ "value": complex(z), "index": m })).collect();
    let kernels: Vec<Value> = inc
        .functions
        .iter()
        .map(|k| json!({ "name": k.name, "dim": k.dim, "max_residual": num(k.max_residual) }))
        .collect();
    let result = json!({
        "f": f.name(),
        "value": matrix(&mf.value),
        "polynomial": {
            "nodes": nodes,
            "coefficients": complexes(&p.coefficients),
            "newton_nodes": complexes(&p.newton_nodes),
            "newton_coeffs": complexes(&p.newton_coeffs),
            "growth": num(p.growth),
            "separation": num(p.separation),
        },
        "eigenbasis_discrepancy": opt_num(mf.eigenbasis_discrepancy),
        "inclusion": {
            "kernel_dim": inc.kernel_dim,
            "functions": kernels,
            "max_residual": num(inc.max_residual),
            "intersection_dim": inc.intersection_dim,
            "included": inc.included,
            "strict": inc.strict,
            "strictness_witness": inc.strictness_witness.as_ref().map_or(Value::Null, matrix),
        },
    });
    let summary = format!(
        "func: {} of an order-{} matrix, interpolant of degree {}",
        f.name(),
        mf.value.rows(),
        p.coefficients.len().saturating_sub(1)
    );
    Ok((result, summary))
}

fn complete(a: &CMatrix, part: &CMatrix, known: Known, tol: &Tolerance) -> Outcome {
    let which = match known {
        Known::Re => KnownPart::Re,
        Known::Im => KnownPart::Im,
    };
    let c = commutant::partial_data_system(a, part, which, tol)?;
    let consistent = c.consistency.consistent;
    let result = json!({
        "verdict": if consistent { "consistent" } else { "inconsistent" },
        "consistent": consistent,
        "known": which.as_str(),
        "operator_rank": c.consistency.operator_rank,
        "augmented_rank": c.consistency.augmented_rank,
        "least_squares_residual": num(c.consistency.residual),
        "completion": c.completion.as_ref().map_or(Value::Null, matrix),
        "commutator_residual": opt_num(c.commutator_residual),
    });
    let summary = format!("complete: {}", if consistent { "completion found" } else { "no completion exists" });
    Ok((result, summary))
}

fn similarity(a: &CMatrix, b: &CMatrix, t: &CMatrix, tol: &Tolerance) -> Outcome {
    let r = matfunc::similarity_commutator(a, b, t, tol)?;
    let result = json!({
        "identity_holds": r.identity_holds,
        "exact": r.exact,
        "residual": num(r.residual),
        "lhs": matrix(&r.lhs),
        "rhs": matrix(&r.rhs),
        "pair_commutes": r.pair_commutes,
        "transformed_commutes": r.transformed_commutes,
    });
    let summary = format!(
        "similarity: identity holds {} ({}), residual {:e}",
        r.identity_holds,
        if r.exact { "exact" } else { "floating point" },
        r.residual
    );
    Ok((result, summary))
}

fn jordan_route(paths: &[PathBuf], cli: &Cli, tol: &Tolerance) -> Outcome {
    let specs = paths.iter().map(|p| load_jordan_spec(p)).collect::<Result<Vec<_>, _>>()?;
    let via_jordan = commutant::jordan_route_kernel(&specs, tol)?;
    let built = specs.iter().map(|s| spectral::build_from_jordan(s, tol)).collect::<Result<Vec<_>, Error>>()?;
    let direct = commutant::mutual_commutant_basis(&built, tol)?;
    let angle = factor::max_principal_angle(&via_jordan.kernel, &direct.kernel);
    let result = json!({
        "jordan_route": basis_json(&via_jordan, cli.emit_basis),
        "direct": basis_json(&direct, cli.emit_basis),
        "max_principal_angle": num(angle),
        "dims_agree": via_jordan.dim == direct.dim,
    });
    let summary = format!(
        "jordan-route: dimension {} against {} directly, largest principal angle {:e}",
        via_jordan.dim, direct.dim, angle
    );
    Ok((result, summary))
}
