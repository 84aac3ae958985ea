use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::checks::{self, Branch, ScalarCombForm, Verdict};
use super::gram::GramSummary;
use super::InequalityId;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::module_space::{AlgebraElement, ModuleVector};
use crate::tolerance::ToleranceConfig;

/// Largest accepted matrix side.
pub const MAX_DIM: usize = 128;

const FIELDS: [&str; 6] = ["id", "vectors", "coefficients", "scalars", "operators", "meta"];

/// Tagged inputs for one inequality.
///
/// Layout per tag is given by [`InequalityId::fields`]; `x` always comes
/// first in `vectors`. Recognized `meta` keys: `branch` (`first`/`second`)
/// and `form` (`squared`/`as_printed`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityInstance {
    pub id: InequalityId,
    #[serde(default)]
    pub vectors: Vec<ModuleVector>,
    #[serde(default)]
    pub coefficients: Vec<AlgebraElement>,
    #[serde(default)]
    pub scalars: Vec<Complex64>,
    #[serde(default)]
    pub operators: Vec<ComplexMatrix>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

fn parse_list<T: serde::de::DeserializeOwned>(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    errors: &mut Vec<String>,
) -> Vec<T> {
    let Some(v) = obj.get(key) else {
        return Vec::new();
    };
    let Some(items) = v.as_array() else {
        errors.push(format!("field '{key}' must be an array"));
        return Vec::new();
    };
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        match serde_json::from_value::<T>(item.clone()) {
            Ok(t) => out.push(t),
            Err(e) => errors.push(format!("{key}[{i}]: {e}")),
        }
    }
    out
}

impl InequalityInstance {
    pub fn new(id: InequalityId) -> Self {
        Self {
            id,
            vectors: Vec::new(),
            coefficients: Vec::new(),
            scalars: Vec::new(),
            operators: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    /// Parses and validates, reporting every problem found at once.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("invalid JSON: {e}")))?;
        let Some(obj) = value.as_object() else {
            return Err(Error::invalid("instance must be a JSON object"));
        };
        let mut errors = Vec::new();
        for key in obj.keys() {
            if !FIELDS.contains(&key.as_str()) {
                errors.push(format!("unknown field '{key}'"));
            }
        }
        let id = match obj.get("id") {
            None => {
                errors.push("missing field 'id'".to_string());
                None
            }
            Some(Value::String(s)) => match serde_json::from_value::<InequalityId>(Value::String(s.clone())) {
                Ok(id) => Some(id),
                Err(_) => {
                    errors.push(format!("unknown inequality tag '{s}'"));
                    None
                }
            },
            Some(_) => {
                errors.push("field 'id' must be a string".to_string());
                None
            }
        };
        let vectors = parse_list(obj, "vectors", &mut errors);
        let coefficients = parse_list(obj, "coefficients", &mut errors);
        let scalars = parse_list(obj, "scalars", &mut errors);
        let operators = parse_list(obj, "operators", &mut errors);
        let meta = match obj.get("meta") {
            None => BTreeMap::new(),
            Some(v) => serde_json::from_value(v.clone()).unwrap_or_else(|_| {
                errors.push("field 'meta' must be an object of strings".to_string());
                BTreeMap::new()
            }),
        };
        let Some(id) = id else {
            return Err(Error::Validation(errors));
        };
        let inst = Self {
            id,
            vectors,
            coefficients,
            scalars,
            operators,
            meta,
        };
        errors.extend(inst.problems());
        if errors.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Every arity, shape and meta problem.
    pub fn problems(&self) -> Vec<String> {
        let id = self.id;
        let arity = id.arity();
        let layout = id.fields();
        let mut errs = Vec::new();
        let mut unexpected = |name: &str, present: bool, used: bool| {
            if present && !used {
                errs.push(format!("unexpected field '{name}' for {id} (expects {layout})"));
            }
        };
        unexpected("vectors", !self.vectors.is_empty(), arity.x || arity.family);
        unexpected("coefficients", !self.coefficients.is_empty(), arity.coefficients);
        unexpected("scalars", !self.scalars.is_empty(), arity.scalars);
        unexpected("operators", !self.operators.is_empty(), arity.operators);

        // vectors
        if arity.x || arity.family {
            let min = if id == InequalityId::CauchySchwarz {
                2
            } else {
                usize::from(arity.x) + usize::from(arity.family)
            };
            if self.vectors.len() < min {
                errs.push(format!(
                    "missing vectors for {id}: need at least {min}, got {} ({layout})",
                    self.vectors.len()
                ));
            }
            if id == InequalityId::CauchySchwarz && self.vectors.len() > 2 {
                errs.push(format!(
                    "extra vectors for {id}: need exactly 2, got {}",
                    self.vectors.len()
                ));
            }
            if let Some(first) = self.vectors.first() {
                let spec = first.spec();
                for (i, v) in self.vectors.iter().enumerate() {
                    if v.spec() != spec {
                        errs.push(format!(
                            "vectors[{i}] is {}x{}, vectors[0] is {}x{}",
                            v.spec().m,
                            v.spec().d,
                            spec.m,
                            spec.d
                        ));
                    }
                }
                if spec.m > MAX_DIM || spec.d > MAX_DIM {
                    errs.push(format!("vector dimensions {}x{} exceed {MAX_DIM}", spec.m, spec.d));
                }
            }
        }

        // coefficients
        if arity.coefficients {
            let expected = if id == InequalityId::Lemma {
                3
            } else {
                self.vectors.len().saturating_sub(usize::from(arity.x))
            };
            if self.coefficients.len() != expected {
                let kind = if self.coefficients.len() < expected {
                    "missing"
                } else {
                    "extra"
                };
                errs.push(format!(
                    "{kind} coefficients for {id}: need {expected}, got {} ({layout})",
                    self.coefficients.len()
                ));
            }
            let d = match (id, self.vectors.first(), self.coefficients.first()) {
                (InequalityId::Lemma, _, Some(c)) => Some(c.d()),
                (_, Some(v), _) => Some(v.spec().d),
                _ => None,
            };
            if let Some(d) = d {
                for (i, c) in self.coefficients.iter().enumerate() {
                    if c.d() != d {
                        errs.push(format!("coefficients[{i}] is {0}x{0}, expected {d}x{d}", c.d()));
                    }
                }
                if d > MAX_DIM {
                    errs.push(format!("coefficient dimension {d} exceeds {MAX_DIM}"));
                }
            }
        }

        // operators and scalars
        if arity.operators {
            let ops = &self.operators;
            if ops.iter().any(|t| t.rows() > MAX_DIM || t.cols() > MAX_DIM) {
                errs.push(format!("operator dimensions exceed {MAX_DIM}"));
            }
            match id {
                InequalityId::OrthRanges => {
                    if ops.len() < 2 || !ops.len().is_multiple_of(2) {
                        errs.push(format!(
                            "{id} needs an even, nonzero number of operators ({layout}), got {}",
                            ops.len()
                        ));
                    } else {
                        let n = ops.len() / 2;
                        let (k, h) = ops[0].shape();
                        for (i, t) in ops[..n].iter().enumerate() {
                            if t.shape() != (k, h) {
                                errs.push(format!("T_{i} is {}x{}, expected {k}x{h}", t.rows(), t.cols()));
                            }
                        }
                        for (i, s) in ops[n..].iter().enumerate() {
                            if s.shape() != (h, h) {
                                errs.push(format!("S_{i} is {}x{}, expected {h}x{h}", s.rows(), s.cols()));
                            }
                        }
                    }
                }
                InequalityId::Invertible | InequalityId::ScalarComb => {
                    if id == InequalityId::Invertible && ops.len() != 3 {
                        errs.push(format!("{id} needs exactly 3 operators ({layout}), got {}", ops.len()));
                    }
                    if id == InequalityId::ScalarComb {
                        if ops.is_empty() {
                            errs.push(format!("missing operators for {id} ({layout})"));
                        }
                        if self.scalars.len() != ops.len() {
                            errs.push(format!(
                                "{id} needs one scalar per operator: {} scalars, {} operators",
                                self.scalars.len(),
                                ops.len()
                            ));
                        }
                    }
                    if let Some(first) = ops.first() {
                        let h = first.rows();
                        for (i, t) in ops.iter().enumerate() {
                            if t.shape() != (h, h) {
                                errs.push(format!("operators[{i}] is {}x{}, expected {h}x{h}", t.rows(), t.cols()));
                            }
                        }
                    }
                }
                _ => {}
            }
        }

        // meta
        if let Some(b) = self.meta.get("branch") {
            if !id.has_branches() {
                errs.push(format!(
                    "meta 'branch' is only meaningful for bn_lemma_3_10 and thm_3_11, not {id}"
                ));
            } else if Branch::parse(b).is_none() {
                errs.push(format!("meta 'branch' must be 'first' or 'second', got '{b}'"));
            }
        }
        if let Some(f) = self.meta.get("form") {
            if id != InequalityId::ScalarComb {
                errs.push(format!("meta 'form' is only meaningful for scalar_comb_3_7, not {id}"));
            } else if ScalarCombForm::parse(f).is_none() {
                errs.push(format!("meta 'form' must be 'squared' or 'as_printed', got '{f}'"));
            }
        }
        errs
    }

    /// Branch named in meta, defaulting to the first.
    pub fn branch(&self) -> Option<Branch> {
        self.id.has_branches().then(|| {
            self.meta
                .get("branch")
                .and_then(|b| Branch::parse(b))
                .unwrap_or(Branch::First)
        })
    }

    pub fn form(&self) -> Option<ScalarCombForm> {
        (self.id == InequalityId::ScalarComb).then(|| {
            self.meta
                .get("form")
                .and_then(|f| ScalarCombForm::parse(f))
                .unwrap_or(ScalarCombForm::Squared)
        })
    }

    pub fn dims(&self) -> Dims {
        let arity = self.id.arity();
        match self.id {
            InequalityId::Lemma => {
                let d = self.coefficients.first().map_or(0, |c| c.d());
                Dims { m: d, d, n: 1 }
            }
            InequalityId::OrthRanges => {
                let (k, h) = self.operators.first().map_or((0, 0), |t| t.shape());
                Dims {
                    m: k,
                    d: h,
                    n: self.operators.len() / 2,
                }
            }
            InequalityId::Invertible => {
                let h = self.operators.first().map_or(0, |t| t.rows());
                Dims { m: h, d: h, n: 1 }
            }
            InequalityId::ScalarComb => {
                let h = self.operators.first().map_or(0, |t| t.rows());
                Dims {
                    m: h,
                    d: h,
                    n: self.operators.len(),
                }
            }
            _ => {
                let spec = self.vectors.first().map(|v| v.spec());
                Dims {
                    m: spec.map_or(0, |s| s.m),
                    d: spec.map_or(0, |s| s.d),
                    n: if arity.family {
                        self.vectors.len() - usize::from(arity.x)
                    } else {
                        1
                    },
                }
            }
        }
    }

    fn x_and_family(&self) -> (&ModuleVector, &[ModuleVector]) {
        (&self.vectors[0], &self.vectors[1..])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub d: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchOutcome {
    pub bn_coefficient: f64,
    pub holds: bool,
    pub min_eig_gap: f64,
    pub relative_slack: f64,
}

/// Both `B_n` branches on one instance. Neither dominates in general.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchComparison {
    pub first: BranchOutcome,
    pub second: BranchOutcome,
    /// `first`, `second` or `equal`: which branch has the smaller `B_n`.
    pub smaller: String,
}

/// Everything `evaluate` learns about one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_version: Option<String>,
    pub id: InequalityId,
    pub dims: Dims,
    pub holds: bool,
    pub min_eig_gap: f64,
    pub rhs_scale: f64,
    pub relative_slack: f64,
    pub near_equality: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<ScalarCombForm>,
    pub experimental: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<GramSummary>,
    pub anti_hermitian_residual: f64,
    pub terms: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_comparison: Option<BranchComparison>,
    pub lhs: HermitianMatrix,
    pub rhs: HermitianMatrix,
    pub gap: HermitianMatrix,
}

impl EvaluationReport {
    /// The selected comparison holds, and so does the other branch if any.
    pub fn all_hold(&self) -> bool {
        self.holds
            && self
                .branch_comparison
                .as_ref()
                .is_none_or(|c| c.first.holds && c.second.holds)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn outcome(v: &Verdict) -> BranchOutcome {
    BranchOutcome {
        bn_coefficient: v.terms["bn_coefficient"],
        holds: v.order.holds,
        min_eig_gap: v.order.min_eig_gap,
        relative_slack: v.order.relative_slack,
    }
}

fn comparison(first: &Verdict, second: &Verdict) -> BranchComparison {
    let (a, b) = (outcome(first), outcome(second));
    let smaller = match a.bn_coefficient.total_cmp(&b.bn_coefficient) {
        std::cmp::Ordering::Less => "first",
        std::cmp::Ordering::Greater => "second",
        std::cmp::Ordering::Equal => "equal",
    };
    BranchComparison {
        first: a,
        second: b,
        smaller: smaller.to_string(),
    }
}

/// Validates the instance and runs its checker.
pub fn evaluate(inst: &InequalityInstance, tol: &ToleranceConfig) -> Result<EvaluationReport> {
    tol.validate()?;
    inst.validate()?;
    let branch = inst.branch();
    let form = inst.form();
    let mut branch_comparison = None;
    let verdict = match inst.id {
        InequalityId::Bessel => {
            let (x, e) = inst.x_and_family();
            checks::check_bessel(e, x, tol)?
        }
        InequalityId::Lemma => {
            let c = &inst.coefficients;
            checks::check_lemma_3_2(&c[0], &c[1], &c[2], tol)?
        }
        InequalityId::Bombieri => checks::check_bombieri(&inst.vectors, &inst.coefficients, tol)?,
        InequalityId::BombieriCor => {
            let (x, y) = inst.x_and_family();
            checks::check_bombieri_cor(y, x, tol)?
        }
        InequalityId::OrthRanges => {
            let n = inst.operators.len() / 2;
            checks::check_orth_ranges(&inst.operators[..n], &inst.operators[n..], tol)?
        }
        InequalityId::Invertible => {
            let o = &inst.operators;
            checks::check_invertible(&o[0], &o[1], &o[2], tol)?
        }
        InequalityId::ScalarComb => {
            checks::check_scalar_comb(&inst.scalars, &inst.operators, form.expect("set for this tag"), tol)?
        }
        InequalityId::Mpf => {
            let (x, y) = inst.x_and_family();
            checks::check_mpf(y, x, &inst.coefficients, tol)?
        }
        InequalityId::BoasBellman => {
            let (x, y) = inst.x_and_family();
            checks::check_boas_bellman(y, x, tol)?
        }
        InequalityId::BnLemma | InequalityId::Thm311 => {
            let (first, second) = if inst.id == InequalityId::BnLemma {
                checks::check_bn_lemma_both(&inst.vectors, &inst.coefficients, tol)?
            } else {
                let (x, y) = inst.x_and_family();
                checks::check_thm_3_11_both(y, x, &inst.coefficients, tol)?
            };
            branch_comparison = Some(comparison(&first, &second));
            match branch.expect("set for this tag") {
                Branch::First => first,
                Branch::Second => second,
            }
        }
        InequalityId::Remark => {
            let (x, y) = inst.x_and_family();
            checks::check_remark_3_12(y, x, tol)?
        }
        InequalityId::CauchySchwarz => checks::check_cauchy_schwarz(&inst.vectors[0], &inst.vectors[1], tol)?,
    };
    let Verdict {
        order,
        lhs,
        rhs,
        gram,
        terms,
        anti_hermitian_residual,
    } = verdict;
    Ok(EvaluationReport {
        tool_version: None,
        id: inst.id,
        dims: inst.dims(),
        holds: order.holds,
        min_eig_gap: order.min_eig_gap,
        rhs_scale: order.rhs_scale,
        relative_slack: order.relative_slack,
        near_equality: order.near_equality,
        branch,
        form,
        experimental: form == Some(ScalarCombForm::AsPrinted),
        gram,
        anti_hermitian_residual,
        terms,
        branch_comparison,
        lhs,
        rhs,
        gap: order.gap,
    })
}
