//! One verifier per Bessel-type inequality.
//!
//! Every checker evaluates both sides exactly as the inequality is stated,
//! symmetrizes the left side (recording the anti-Hermitian residual) and
//! compares in the Loewner order.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gram::GramSummary;
use crate::error::{Error, Result};
use crate::linalg::{
    inverse, loewner_leq, op_norm, psd_sqrt, singular_values, ComplexMatrix, HermitianMatrix, OrderReport,
};
use crate::module_space::{abs_sq, inner, module_norm, AlgebraElement, ModuleSpec, ModuleVector};
use crate::tolerance::ToleranceConfig;

/// Which of the two `B_n` expressions to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    First,
    Second,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::First => "first",
            Branch::Second => "second",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "first" => Some(Branch::First),
            "second" => Some(Branch::Second),
            _ => None,
        }
    }
}

/// Left-hand side form for the scalar-combination bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarCombForm {
    /// `|Σ λ_i T_i|²`, the form the bound actually controls.
    Squared,
    /// `|Σ λ_i T_i|` against the same right side. Experimental: it is not
    /// homogeneous and fails for small operators.
    AsPrinted,
}

impl ScalarCombForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarCombForm::Squared => "squared",
            ScalarCombForm::AsPrinted => "as_printed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "squared" => Some(ScalarCombForm::Squared),
            "as_printed" => Some(ScalarCombForm::AsPrinted),
            _ => None,
        }
    }
}

/// Result of one checker: the order comparison plus everything needed to
/// explain it.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub order: OrderReport,
    pub lhs: HermitianMatrix,
    pub rhs: HermitianMatrix,
    pub gram: Option<GramSummary>,
    pub terms: BTreeMap<String, f64>,
    pub anti_hermitian_residual: f64,
}

type Terms = BTreeMap<String, f64>;

fn finish(
    lhs_raw: &ComplexMatrix,
    rhs: HermitianMatrix,
    tol: &ToleranceConfig,
    gram: Option<GramSummary>,
    terms: Terms,
) -> Result<Verdict> {
    let (lhs, residual) = HermitianMatrix::symmetrize(lhs_raw);
    let scale = lhs_raw.frobenius_norm().max(1.0);
    if residual > tol.hermitian_tol * scale {
        return Err(Error::numerical(format!(
            "left side is not self-adjoint: residual {residual:e} exceeds {:e}",
            tol.hermitian_tol * scale
        )));
    }
    let order = loewner_leq(&lhs, &rhs, tol)?;
    Ok(Verdict {
        order,
        lhs,
        rhs,
        gram,
        terms,
        anti_hermitian_residual: residual,
    })
}

fn terms<const N: usize>(pairs: [(&str, f64); N]) -> Terms {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn family_spec(y: &[ModuleVector], x: Option<&ModuleVector>) -> Result<ModuleSpec> {
    let first = y.first().ok_or_else(|| Error::contract("the vector family is empty"))?;
    let spec = first.spec();
    for (i, v) in y.iter().enumerate() {
        if v.spec() != spec {
            return Err(Error::contract(format!(
                "vector {i} is {}x{}, expected {}x{}",
                v.spec().m,
                v.spec().d,
                spec.m,
                spec.d
            )));
        }
    }
    if let Some(x) = x {
        if x.spec() != spec {
            return Err(Error::contract(format!(
                "x is {}x{}, family is {}x{}",
                x.spec().m,
                x.spec().d,
                spec.m,
                spec.d
            )));
        }
    }
    Ok(spec)
}

fn coefficient_dims(a: &[AlgebraElement], d: usize, n: usize) -> Result<()> {
    if a.len() != n {
        return Err(Error::contract(format!("expected {n} coefficients, got {}", a.len())));
    }
    if let Some(i) = a.iter().position(|c| c.d() != d) {
        return Err(Error::contract(format!(
            "coefficient {i} is {0}x{0}, module has d={d}",
            a[i].d()
        )));
    }
    Ok(())
}

fn square_dims(ops: &[&ComplexMatrix], h: usize, what: &str) -> Result<()> {
    for (i, t) in ops.iter().enumerate() {
        if t.shape() != (h, h) {
            return Err(Error::contract(format!(
                "{what} {i} is {}x{}, expected {h}x{h}",
                t.rows(),
                t.cols()
            )));
        }
    }
    Ok(())
}

/// Requires `‖⟨y_i, y_j⟩‖ ≤ psd_rel_tol · max(1, ‖y_i‖‖y_j‖)` for `i ≠ j`.
fn require_orthogonal(y: &[ComplexMatrix], tol: &ToleranceConfig, what: &str) -> Result<()> {
    let norms = y.iter().map(op_norm).collect::<Result<Vec<_>>>()?;
    for i in 0..y.len() {
        for j in (i + 1)..y.len() {
            let cross = op_norm(&y[i].adjoint_mul(&y[j]))?;
            let bound = tol.psd_rel_tol * (norms[i] * norms[j]).max(1.0);
            if cross > bound {
                return Err(Error::precondition(format!(
                    "{what} {i} and {j} are not orthogonal: cross norm {cross:e} exceeds {bound:e}"
                )));
            }
        }
    }
    Ok(())
}

fn matrices(y: &[ModuleVector]) -> Vec<ComplexMatrix> {
    y.iter().map(|v| v.matrix().clone()).collect()
}

/// `Σ_i y_i a_i` as an `m×d` matrix.
fn combine(y: &[ModuleVector], a: &[AlgebraElement]) -> ComplexMatrix {
    let spec = y[0].spec();
    let mut acc = ComplexMatrix::zeros(spec.m, spec.d);
    for (yi, ai) in y.iter().zip(a) {
        acc = &acc + &yi.matrix().matmul(ai.matrix());
    }
    acc
}

/// `Σ_i |a_i|² = Σ a_i* a_i`.
fn sum_abs_sq(a: &[AlgebraElement], d: usize) -> HermitianMatrix {
    a.iter()
        .fold(HermitianMatrix::zeros(d), |acc, ai| acc.add(&ai.abs_sq()))
}

/// `Σ_i |⟨y_i, x⟩|²`.
fn bessel_sum(y: &[ModuleVector], x: &ModuleVector) -> Result<HermitianMatrix> {
    let d = x.spec().d;
    y.iter().try_fold(HermitianMatrix::zeros(d), |acc, yi| {
        Ok(acc.add(&HermitianMatrix::gram(inner(yi, x)?.matrix())))
    })
}

fn sum_norm_sq(a: &[AlgebraElement]) -> Result<f64> {
    a.iter().map(|ai| Ok(ai.norm()?.powi(2))).sum()
}

fn max_norm(a: &[AlgebraElement]) -> Result<f64> {
    a.iter().try_fold(0.0f64, |acc, ai| Ok(acc.max(ai.norm()?)))
}

/// `Σ|⟨e_i,x⟩|² ≤ |x|²` for an orthogonal family of unit vectors.
pub fn check_bessel(e: &[ModuleVector], x: &ModuleVector, tol: &ToleranceConfig) -> Result<Verdict> {
    family_spec(e, Some(x))?;
    for (i, ei) in e.iter().enumerate() {
        let norm = module_norm(ei)?;
        if (norm - 1.0).abs() > tol.equality_rel_tol {
            return Err(Error::precondition(format!("e_{i} is not a unit vector: norm {norm}")));
        }
    }
    require_orthogonal(&matrices(e), tol, "vectors")?;
    let lhs = bessel_sum(e, x)?;
    finish(lhs.matrix(), abs_sq(x), tol, None, Terms::new())
}

/// `a*cb + b*c*a ≤ ‖c‖(|a|² + |b|²)`.
pub fn check_lemma_3_2(
    a: &AlgebraElement,
    b: &AlgebraElement,
    c: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<Verdict> {
    let d = a.d();
    if b.d() != d || c.d() != d {
        return Err(Error::contract(format!(
            "elements have sizes {}, {}, {}",
            a.d(),
            b.d(),
            c.d()
        )));
    }
    let (am, bm, cm) = (a.matrix(), b.matrix(), c.matrix());
    let acb = am.adjoint_mul(&cm.matmul(bm));
    let bca = bm.adjoint_mul(&cm.adjoint().matmul(am));
    let c_norm = c.norm()?;
    let rhs = a.abs_sq().add(&b.abs_sq()).scale(c_norm);
    finish(&(&acb + &bca), rhs, tol, None, terms([("c_norm", c_norm)]))
}

/// `|Σ y_i a_i|² ≤ (Σ|a_i|²)·max_i Σ_j ‖⟨y_i,y_j⟩‖`.
pub fn check_bombieri(y: &[ModuleVector], a: &[AlgebraElement], tol: &ToleranceConfig) -> Result<Verdict> {
    let spec = family_spec(y, None)?;
    coefficient_dims(a, spec.d, y.len())?;
    let gram = GramSummary::compute(y)?;
    let w = combine(y, a);
    let coefficient = gram.max_row_sum;
    let rhs = sum_abs_sq(a, spec.d).scale(coefficient);
    finish(
        &w.adjoint_mul(&w),
        rhs,
        tol,
        Some(gram),
        terms([("rhs_coefficient", coefficient)]),
    )
}

/// With `S = Σ|⟨y_i,x⟩|²`: `S² ≤ |x|²·‖S‖·max_i Σ_j ‖⟨y_i,y_j⟩‖`.
pub fn check_bombieri_cor(y: &[ModuleVector], x: &ModuleVector, tol: &ToleranceConfig) -> Result<Verdict> {
    family_spec(y, Some(x))?;
    let gram = GramSummary::compute(y)?;
    let s = bessel_sum(y, x)?;
    let s_norm = s.spectral_radius()?;
    let coefficient = s_norm * gram.max_row_sum;
    let rhs = abs_sq(x).scale(coefficient);
    let lhs = s.matrix().matmul(s.matrix());
    finish(
        &lhs,
        rhs,
        tol,
        Some(gram),
        terms([("s_norm", s_norm), ("rhs_coefficient", coefficient)]),
    )
}

/// Operators with orthogonal ranges: `|Σ T_i S_i|² ≤ (Σ|S_i|²)·max_i ‖T_i‖²`.
pub fn check_orth_ranges(t: &[ComplexMatrix], s: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<Verdict> {
    let first = t.first().ok_or_else(|| Error::contract("no operators given"))?;
    let (k, h) = first.shape();
    if s.len() != t.len() {
        return Err(Error::contract(format!(
            "{} operators T but {} operators S",
            t.len(),
            s.len()
        )));
    }
    if let Some(i) = t.iter().position(|ti| ti.shape() != (k, h)) {
        return Err(Error::contract(format!(
            "T_{i} is {}x{}, expected {k}x{h}",
            t[i].rows(),
            t[i].cols()
        )));
    }
    square_dims(&s.iter().collect::<Vec<_>>(), h, "S")?;
    require_orthogonal(t, tol, "operators")?;
    let mut w = ComplexMatrix::zeros(k, h);
    let mut sum_s = HermitianMatrix::zeros(h);
    let mut max_t_sq = 0.0f64;
    for (ti, si) in t.iter().zip(s) {
        w = &w + &ti.matmul(si);
        sum_s = sum_s.add(&HermitianMatrix::gram(si));
        max_t_sq = max_t_sq.max(op_norm(ti)?.powi(2));
    }
    let rhs = sum_s.scale(max_t_sq);
    finish(
        &w.adjoint_mul(&w),
        rhs,
        tol,
        None,
        terms([("rhs_coefficient", max_t_sq)]),
    )
}

/// Invertible `T`: `|T S1 + (T*)^{-1} S2|² ≤ (|S1|² + |S2|²)(1 + max(‖T‖², ‖T⁻¹‖²))`.
pub fn check_invertible(
    t: &ComplexMatrix,
    s1: &ComplexMatrix,
    s2: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<Verdict> {
    let h = t.rows();
    square_dims(&[t, s1, s2], h, "operator")?;
    let sv = singular_values(t)?;
    let (smax, smin) = (sv[0], sv[sv.len() - 1]);
    let well_conditioned = smin > 1e-8 * smax;
    if !well_conditioned {
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        return Err(Error::precondition(format!(
            "T is numerically singular: condition number {cond:e}"
        )));
    }
    let cond = smax / smin;
    let t_inv = inverse(t)?;
    let residual = op_norm(&(&t.matmul(&t_inv) - &ComplexMatrix::identity(h)))?;
    if residual > 1e-10 * cond.max(1.0) {
        return Err(Error::numerical(format!(
            "inverse residual {residual:e} too large for condition number {cond:e}"
        )));
    }
    let w = &t.matmul(s1) + &t_inv.adjoint().matmul(s2);
    let t_inv_norm = 1.0 / smin;
    let coefficient = 1.0 + (smax * smax).max(t_inv_norm * t_inv_norm);
    let rhs = HermitianMatrix::gram(s1)
        .add(&HermitianMatrix::gram(s2))
        .scale(coefficient);
    finish(
        &w.adjoint_mul(&w),
        rhs,
        tol,
        None,
        terms([
            ("t_norm", smax),
            ("t_inv_norm", t_inv_norm),
            ("condition_number", cond),
            ("inverse_residual", residual),
            ("rhs_coefficient", coefficient),
        ]),
    )
}

/// `|Σ λ_i T_i|² ≤ max_i|λ_i|·Σ_j|λ_j|·Σ_i|T_i|²` (or the unsquared variant).
pub fn check_scalar_comb(
    lambda: &[Complex64],
    t: &[ComplexMatrix],
    form: ScalarCombForm,
    tol: &ToleranceConfig,
) -> Result<Verdict> {
    let first = t.first().ok_or_else(|| Error::contract("no operators given"))?;
    if lambda.len() != t.len() {
        return Err(Error::contract(format!(
            "{} scalars but {} operators",
            lambda.len(),
            t.len()
        )));
    }
    let h = first.rows();
    square_dims(&t.iter().collect::<Vec<_>>(), h, "T")?;
    let mut w = ComplexMatrix::zeros(h, h);
    let mut sum_t = HermitianMatrix::zeros(h);
    for (l, ti) in lambda.iter().zip(t) {
        w.add_scaled(ti, *l);
        sum_t = sum_t.add(&HermitianMatrix::gram(ti));
    }
    let max_abs = lambda.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let sum_abs: f64 = lambda.iter().map(|l| l.norm()).sum();
    let coefficient = max_abs * sum_abs;
    let rhs = sum_t.scale(coefficient);
    let w_sq = w.adjoint_mul(&w);
    let lhs = match form {
        ScalarCombForm::Squared => w_sq,
        ScalarCombForm::AsPrinted => psd_sqrt(&HermitianMatrix::symmetrize(&w_sq).0, tol)?.into_matrix(),
    };
    finish(
        &lhs,
        rhs,
        tol,
        None,
        terms([
            ("max_abs_lambda", max_abs),
            ("sum_abs_lambda", sum_abs),
            ("rhs_coefficient", coefficient),
        ]),
    )
}

/// `|Σ a_i⟨y_i,x⟩|² ≤ |x|²·Σ‖a_i‖²·[max‖y_i‖² + (Σ_{i≠j}‖⟨y_i,y_j⟩‖²)^{1/2}]`.
pub fn check_mpf(y: &[ModuleVector], x: &ModuleVector, a: &[AlgebraElement], tol: &ToleranceConfig) -> Result<Verdict> {
    let spec = family_spec(y, Some(x))?;
    coefficient_dims(a, spec.d, y.len())?;
    let gram = GramSummary::compute(y)?;
    let mut w = ComplexMatrix::zeros(spec.d, spec.d);
    for (yi, ai) in y.iter().zip(a) {
        w = &w + &ai.matrix().matmul(inner(yi, x)?.matrix());
    }
    let coeff_norm_sq = sum_norm_sq(a)?;
    let bracket = gram.max_norm_sq + gram.offdiag_sq_sum.sqrt();
    let coefficient = coeff_norm_sq * bracket;
    let rhs = abs_sq(x).scale(coefficient);
    finish(
        &w.adjoint_mul(&w),
        rhs,
        tol,
        Some(gram),
        terms([
            ("sum_coeff_norm_sq", coeff_norm_sq),
            ("bracket", bracket),
            ("rhs_coefficient", coefficient),
        ]),
    )
}

/// The previous bound with `a_i = ⟨x, y_i⟩`.
pub fn check_boas_bellman(y: &[ModuleVector], x: &ModuleVector, tol: &ToleranceConfig) -> Result<Verdict> {
    family_spec(y, Some(x))?;
    let a = y.iter().map(|yi| inner(x, yi)).collect::<Result<Vec<_>>>()?;
    check_mpf(y, x, &a, tol)
}

fn bn_coefficients(gram: &GramSummary, a: &[AlgebraElement]) -> Result<(f64, f64)> {
    let n = a.len() as f64;
    let first = (n - 1.0) * n.sqrt() * max_norm(a)? * gram.max_offdiag;
    let second = (n - 1.0).sqrt() * gram.max_offdiag_row_sq_sum.sqrt() * sum_norm_sq(a)?.sqrt();
    Ok((first, second))
}

fn pick(branch: Branch, first: f64, second: f64) -> f64 {
    match branch {
        Branch::First => first,
        Branch::Second => second,
    }
}

/// `|Σ y_i a_i|² ≤ max‖y_i‖²·Σ|a_i|² + B_n`, evaluated for both branches of `B_n`.
pub fn check_bn_lemma_both(
    y: &[ModuleVector],
    a: &[AlgebraElement],
    tol: &ToleranceConfig,
) -> Result<(Verdict, Verdict)> {
    let spec = family_spec(y, None)?;
    coefficient_dims(a, spec.d, y.len())?;
    let gram = GramSummary::compute(y)?;
    let w = combine(y, a);
    let lhs = w.adjoint_mul(&w);
    let sum_a = sum_abs_sq(a, spec.d);
    let sqrt_sum_a = psd_sqrt(&sum_a, tol)?;
    let (bn_first, bn_second) = bn_coefficients(&gram, a)?;
    let diagonal = sum_a.scale(gram.max_norm_sq);
    let verdict = |branch: Branch| {
        let coefficient = pick(branch, bn_first, bn_second);
        let rhs = diagonal.add(&sqrt_sum_a.scale(coefficient));
        finish(
            &lhs,
            rhs,
            tol,
            Some(gram.clone()),
            terms([
                ("bn_first", bn_first),
                ("bn_second", bn_second),
                ("bn_coefficient", coefficient),
                ("max_norm_sq", gram.max_norm_sq),
            ]),
        )
    };
    Ok((verdict(Branch::First)?, verdict(Branch::Second)?))
}

pub fn check_bn_lemma(
    y: &[ModuleVector],
    a: &[AlgebraElement],
    branch: Branch,
    tol: &ToleranceConfig,
) -> Result<Verdict> {
    let (first, second) = check_bn_lemma_both(y, a, tol)?;
    Ok(match branch {
        Branch::First => first,
        Branch::Second => second,
    })
}

/// With `Q = ‖Σ|a_i*|²‖`:
/// `|Σ a_i⟨y_i,x⟩|² ≤ |x|²·Q^{1/2}·[max‖y_i‖²·Q^{1/2} + B_n]`, both branches.
pub fn check_thm_3_11_both(
    y: &[ModuleVector],
    x: &ModuleVector,
    a: &[AlgebraElement],
    tol: &ToleranceConfig,
) -> Result<(Verdict, Verdict)> {
    let spec = family_spec(y, Some(x))?;
    coefficient_dims(a, spec.d, y.len())?;
    let gram = GramSummary::compute(y)?;
    let mut w = ComplexMatrix::zeros(spec.d, spec.d);
    let mut sum_adj = HermitianMatrix::zeros(spec.d);
    for (yi, ai) in y.iter().zip(a) {
        w = &w + &ai.matrix().matmul(inner(yi, x)?.matrix());
        sum_adj = sum_adj.add(&ai.abs_sq_adjoint());
    }
    let lhs = w.adjoint_mul(&w);
    let q = sum_adj.spectral_radius()?;
    let (bn_first, bn_second) = bn_coefficients(&gram, a)?;
    let x_sq = abs_sq(x);
    let verdict = |branch: Branch| {
        let bn = pick(branch, bn_first, bn_second);
        let coefficient = q.sqrt() * (gram.max_norm_sq * q.sqrt() + bn);
        finish(
            &lhs,
            x_sq.scale(coefficient),
            tol,
            Some(gram.clone()),
            terms([
                ("q", q),
                ("bn_first", bn_first),
                ("bn_second", bn_second),
                ("bn_coefficient", bn),
                ("rhs_coefficient", coefficient),
            ]),
        )
    };
    Ok((verdict(Branch::First)?, verdict(Branch::Second)?))
}

pub fn check_thm_3_11(
    y: &[ModuleVector],
    x: &ModuleVector,
    a: &[AlgebraElement],
    branch: Branch,
    tol: &ToleranceConfig,
) -> Result<Verdict> {
    let (first, second) = check_thm_3_11_both(y, x, a, tol)?;
    Ok(match branch {
        Branch::First => first,
        Branch::Second => second,
    })
}

/// Orthogonal family: `S² ≤ |x|²·max‖y_i‖²·‖S‖` with `S = Σ|⟨y_i,x⟩|²`.
///
/// Also records the Boas–Bellman coefficient for the same instance so the
/// two right sides (both multiples of `|x|²`) can be compared.
pub fn check_remark_3_12(y: &[ModuleVector], x: &ModuleVector, tol: &ToleranceConfig) -> Result<Verdict> {
    family_spec(y, Some(x))?;
    require_orthogonal(&matrices(y), tol, "vectors")?;
    let gram = GramSummary::compute(y)?;
    let s = bessel_sum(y, x)?;
    let s_norm = s.spectral_radius()?;
    let coefficient = gram.max_norm_sq * s_norm;
    let inner_norm_sq: f64 = y
        .iter()
        .map(|yi| Ok(inner(yi, x)?.norm()?.powi(2)))
        .sum::<Result<f64>>()?;
    let boas_coefficient = inner_norm_sq * (gram.max_norm_sq + gram.offdiag_sq_sum.sqrt());
    let rhs = abs_sq(x).scale(coefficient);
    finish(
        &s.matrix().matmul(s.matrix()),
        rhs,
        tol,
        Some(gram),
        terms([
            ("s_norm", s_norm),
            ("rhs_coefficient", coefficient),
            ("boas_coefficient", boas_coefficient),
        ]),
    )
}

/// `⟨y,x⟩⟨x,y⟩ ≤ ‖⟨x,x⟩‖·⟨y,y⟩`.
pub fn check_cauchy_schwarz(x: &ModuleVector, y: &ModuleVector, tol: &ToleranceConfig) -> Result<Verdict> {
    let xy = inner(x, y)?;
    let x_norm_sq = module_norm(x)?.powi(2);
    let rhs = abs_sq(y).scale(x_norm_sq);
    finish(
        &xy.matrix().adjoint_mul(xy.matrix()),
        rhs,
        tol,
        None,
        terms([("x_norm_sq", x_norm_sq)]),
    )
}
