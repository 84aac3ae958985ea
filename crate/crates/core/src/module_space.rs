//! The Hilbert module `X = M_{m×d}(ℂ)` over `A = M_d(ℂ)` with `⟨x, y⟩ = x*y`.
//!
//! The inner product is conjugate-linear in its first argument and
//! `A`-linear on the right in its second. `d = 1` recovers `ℂ^m` with its
//! usual inner product.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{loewner_leq, op_norm, ComplexMatrix, HermitianMatrix, OrderReport};
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub m: usize,
    pub d: usize,
}

impl ModuleSpec {
    pub fn new(m: usize, d: usize) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::invalid(format!(
                "module dimensions must be positive, got m={m}, d={d}"
            )));
        }
        Ok(Self { m, d })
    }

    /// `d > m` is allowed, but every inner product is then singular.
    pub fn is_degenerate(&self) -> bool {
        self.d > self.m
    }
}

/// Element of the module: an `m×d` complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct ModuleVector {
    spec: ModuleSpec,
    mat: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorRepr {
    m: usize,
    d: usize,
    mat: ComplexMatrix,
}

impl TryFrom<VectorRepr> for ModuleVector {
    type Error = Error;

    fn try_from(r: VectorRepr) -> Result<Self> {
        let spec = ModuleSpec::new(r.m, r.d)?;
        ModuleVector::new(spec, r.mat)
    }
}

impl From<ModuleVector> for VectorRepr {
    fn from(v: ModuleVector) -> Self {
        VectorRepr {
            m: v.spec.m,
            d: v.spec.d,
            mat: v.mat,
        }
    }
}

impl ModuleVector {
    pub fn new(spec: ModuleSpec, mat: ComplexMatrix) -> Result<Self> {
        if mat.shape() != (spec.m, spec.d) {
            return Err(Error::invalid(format!(
                "module vector declared {}x{} but matrix is {}x{}",
                spec.m,
                spec.d,
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { spec, mat })
    }

    pub fn from_matrix(mat: ComplexMatrix) -> Self {
        Self {
            spec: ModuleSpec {
                m: mat.rows(),
                d: mat.cols(),
            },
            mat,
        }
    }

    pub fn zeros(spec: ModuleSpec) -> Self {
        Self::from_matrix(ComplexMatrix::zeros(spec.m, spec.d))
    }

    pub fn spec(&self) -> ModuleSpec {
        self.spec
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_matrix(self.mat.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_spec(self, other)?;
        Ok(Self::from_matrix(&self.mat + &other.mat))
    }
}

/// Element of `A = M_d(ℂ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr", into = "AlgebraRepr")]
pub struct AlgebraElement {
    mat: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraRepr {
    d: usize,
    mat: ComplexMatrix,
}

impl TryFrom<AlgebraRepr> for AlgebraElement {
    type Error = Error;

    fn try_from(r: AlgebraRepr) -> Result<Self> {
        if r.mat.shape() != (r.d, r.d) {
            return Err(Error::invalid(format!(
                "algebra element declared {0}x{0} but matrix is {1}x{2}",
                r.d,
                r.mat.rows(),
                r.mat.cols()
            )));
        }
        Ok(AlgebraElement { mat: r.mat })
    }
}

impl From<AlgebraElement> for AlgebraRepr {
    fn from(a: AlgebraElement) -> Self {
        AlgebraRepr { d: a.d(), mat: a.mat }
    }
}

impl AlgebraElement {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::invalid(format!(
                "algebra element must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { mat })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            mat: ComplexMatrix::zeros(d, d),
        }
    }

    /// `λ·I`.
    pub fn scalar(d: usize, lambda: Complex64) -> Self {
        Self {
            mat: ComplexMatrix::identity(d).scale(lambda),
        }
    }

    pub fn d(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.matmul(&other.mat),
        }
    }

    pub fn norm(&self) -> Result<f64> {
        op_norm(&self.mat)
    }

    /// `|a|² = a*a`.
    pub fn abs_sq(&self) -> HermitianMatrix {
        HermitianMatrix::gram(&self.mat)
    }

    /// `|a*|² = a a*`.
    pub fn abs_sq_adjoint(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrize(&self.mat.mul_adjoint(&self.mat)).0
    }
}

fn same_spec(x: &ModuleVector, y: &ModuleVector) -> Result<()> {
    if x.spec != y.spec {
        return Err(Error::contract(format!(
            "module vectors live in different modules: {}x{} vs {}x{}",
            x.spec.m, x.spec.d, y.spec.m, y.spec.d
        )));
    }
    Ok(())
}

/// `⟨x, y⟩ = x* y`.
pub fn inner(x: &ModuleVector, y: &ModuleVector) -> Result<AlgebraElement> {
    same_spec(x, y)?;
    Ok(AlgebraElement {
        mat: x.mat.adjoint_mul(&y.mat),
    })
}

/// Right action `x·a`.
pub fn right_act(x: &ModuleVector, a: &AlgebraElement) -> Result<ModuleVector> {
    if x.spec.d != a.d() {
        return Err(Error::contract(format!(
            "right action of a {0}x{0} element on a module with d={1}",
            a.d(),
            x.spec.d
        )));
    }
    Ok(ModuleVector::from_matrix(x.mat.matmul(&a.mat)))
}

/// `|x|² = ⟨x, x⟩`.
pub fn abs_sq(x: &ModuleVector) -> HermitianMatrix {
    HermitianMatrix::gram(&x.mat)
}

/// `‖x‖ = ‖⟨x,x⟩‖^{1/2}`, computed as the largest singular value of `x`.
pub fn module_norm(x: &ModuleVector) -> Result<f64> {
    op_norm(&x.mat)
}

/// `⟨y,x⟩⟨x,y⟩ ≤ ‖⟨x,x⟩‖·⟨y,y⟩`.
pub fn cauchy_schwarz_gap(x: &ModuleVector, y: &ModuleVector, tol: &ToleranceConfig) -> Result<OrderReport> {
    let xy = inner(x, y)?;
    let lhs = HermitianMatrix::gram(xy.matrix());
    let rhs = abs_sq(y).scale(module_norm(x)?.powi(2));
    loewner_leq(&lhs, &rhs, tol)
}
