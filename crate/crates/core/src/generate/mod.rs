//! Seeded instance generation.
//!
//! Every instance is a deterministic function of a *latent*: an ordered list
//! of slots, each a vector of standard complex normals (both parts `N(0,1)`).
//! Slot `k` is drawn from `NormalStream::new(mix(master_seed, k))`. Slots are
//! consumed in the order family, `x`, coefficients, scalars, operators, and
//! the build step applies all scaling, orthogonalization and normalization.
//! The search perturbs the latent and rebuilds, so every iterate satisfies
//! the structural hypotheses exactly.

pub mod rng;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::{Branch, InequalityId, InequalityInstance, ScalarCombForm};
use crate::linalg::{op_norm, orthonormalize_columns, polar, ComplexMatrix};
use crate::module_space::{AlgebraElement, ModuleSpec, ModuleVector};
use rng::{mix, NormalStream};

pub use crate::inequality::Dims;

/// Largest dimension accepted by the generator.
pub const MAX_DIM: usize = 128;

/// Relative size of the perturbation in `near_parallel` families.
pub const NEAR_PARALLEL_NOISE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Generic,
    Orthogonal,
    UnitOrthogonal,
    NearParallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    Generic,
    Unitary,
    ScalarIdentity,
    Zero,
}

macro_rules! text_enum {
    ($ty:ty { $($variant:ident => $s:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $s),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($s => Ok(Self::$variant),)+
                    _ => Err(format!(concat!("unknown ", stringify!($ty), " '{}'; expected one of: ", $($s, " "),+), s)),
                }
            }
        }
    };
}

text_enum!(FamilyKind {
    Generic => "generic",
    Orthogonal => "orthogonal",
    UnitOrthogonal => "unit_orthogonal",
    NearParallel => "near_parallel",
});

text_enum!(CoeffKind {
    Generic => "generic",
    Unitary => "unitary",
    ScalarIdentity => "scalar_identity",
    Zero => "zero",
});

impl FamilyKind {
    /// Default family for a tag; `None` when the tag has no family.
    pub fn default_for(id: InequalityId) -> Option<FamilyKind> {
        match id {
            InequalityId::Bessel => Some(FamilyKind::UnitOrthogonal),
            InequalityId::Remark | InequalityId::OrthRanges => Some(FamilyKind::Orthogonal),
            _ if id.uses_family() => Some(FamilyKind::Generic),
            _ => None,
        }
    }

    /// Families a tag accepts.
    pub fn allowed_for(id: InequalityId) -> &'static [FamilyKind] {
        use FamilyKind::*;
        match id {
            InequalityId::Bessel => &[UnitOrthogonal],
            InequalityId::Remark => &[Orthogonal, UnitOrthogonal],
            InequalityId::OrthRanges => &[Orthogonal],
            _ if id.uses_family() => &[Generic, Orthogonal, UnitOrthogonal, NearParallel],
            _ => &[],
        }
    }

    fn is_orthogonal(self) -> bool {
        matches!(self, FamilyKind::Orthogonal | FamilyKind::UnitOrthogonal)
    }
}

/// Generation parameters. `family: None` picks the tag default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub master_seed: u64,
    pub m: usize,
    pub d: usize,
    pub n: usize,
    #[serde(default)]
    pub family: Option<FamilyKind>,
    pub coeffs: CoeffKind,
    pub magnitude: f64,
    /// Build the known equality case (supported for bessel, lemma,
    /// orthogonal ranges and Cauchy-Schwarz).
    #[serde(default)]
    pub probe: bool,
    #[serde(default)]
    pub branch: Option<Branch>,
    #[serde(default)]
    pub form: Option<ScalarCombForm>,
}

impl GenConfig {
    pub fn new(master_seed: u64, m: usize, d: usize, n: usize) -> Self {
        Self {
            master_seed,
            m,
            d,
            n,
            family: None,
            coeffs: CoeffKind::Generic,
            magnitude: 1.0,
            probe: false,
            branch: None,
            form: None,
        }
    }

    pub fn dims(&self) -> Dims {
        Dims {
            m: self.m,
            d: self.d,
            n: self.n,
        }
    }

    pub fn with_seed(&self, master_seed: u64) -> Self {
        Self {
            master_seed,
            ..self.clone()
        }
    }

    /// Family actually used for `id`.
    pub fn family_for(&self, id: InequalityId) -> Option<FamilyKind> {
        FamilyKind::default_for(id).map(|default| self.family.unwrap_or(default))
    }

    /// Checks feasibility of this configuration for `id`, listing every problem.
    pub fn validate_for(&self, id: InequalityId) -> Result<()> {
        let mut errs = Vec::new();
        for (name, v) in [("m", self.m), ("d", self.d), ("n", self.n)] {
            if v == 0 || v > MAX_DIM {
                errs.push(format!("{name} must be in 1..={MAX_DIM}, got {v}"));
            }
        }
        if !(self.magnitude.is_finite() && self.magnitude >= 0.0) {
            errs.push(format!(
                "magnitude must be finite and nonnegative, got {}",
                self.magnitude
            ));
        }
        if let Some(family) = self.family_for(id) {
            if !FamilyKind::allowed_for(id).contains(&family) {
                let allowed: Vec<_> = FamilyKind::allowed_for(id).iter().map(|f| f.as_str()).collect();
                errs.push(format!("{id} needs family {}, got {family}", allowed.join(" or ")));
            }
            if (family.is_orthogonal() || id == InequalityId::OrthRanges) && self.n > self.m {
                errs.push(format!(
                    "{family} family for {id} needs n <= m, got n={} m={}",
                    self.n, self.m
                ));
            }
        }
        if self.probe
            && !matches!(
                id,
                InequalityId::Bessel | InequalityId::Lemma | InequalityId::OrthRanges | InequalityId::CauchySchwarz
            )
        {
            errs.push(format!("no equality probe is defined for {id}"));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Slot values of one generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Latent {
    pub slots: Vec<Vec<Complex64>>,
}

impl Latent {
    pub fn len(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

trait SlotSource {
    fn take(&mut self, len: usize) -> Vec<Complex64>;
}

struct Drawing {
    seed: u64,
    slots: Vec<Vec<Complex64>>,
}

impl SlotSource for Drawing {
    fn take(&mut self, len: usize) -> Vec<Complex64> {
        let slot = NormalStream::new(mix(self.seed, self.slots.len() as u64)).complex_vec(len, 1.0);
        self.slots.push(slot.clone());
        slot
    }
}

struct Replay<'a> {
    latent: &'a Latent,
    next: usize,
}

impl SlotSource for Replay<'_> {
    fn take(&mut self, len: usize) -> Vec<Complex64> {
        let slot = self
            .latent
            .slots
            .get(self.next)
            .unwrap_or_else(|| panic!("latent has no slot {}", self.next));
        assert_eq!(slot.len(), len, "latent slot {} has the wrong length", self.next);
        self.next += 1;
        slot.clone()
    }
}

fn matrix_from(raw: Vec<Complex64>, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    let data = raw.into_iter().map(|z| z * scale).collect();
    ComplexMatrix::from_row_major(rows, cols, data).expect("slot length matches shape")
}

fn zero_c() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Haar unitary from a Gaussian slot (QR with positive `R` diagonal).
fn haar(src: &mut dyn SlotSource, k: usize) -> Result<ComplexMatrix> {
    orthonormalize_columns(&matrix_from(src.take(k * k), k, k, 1.0))
}

/// Module vector with i.i.d. entries, both parts `N(0, (magnitude/√(2m))²)`.
pub fn gen_module_vector(seed: u64, m: usize, d: usize, magnitude: f64) -> Result<ModuleVector> {
    ModuleSpec::new(m, d)?;
    let raw = NormalStream::new(seed).complex_vec(m * d, 1.0);
    Ok(ModuleVector::from_matrix(matrix_from(
        raw,
        m,
        d,
        magnitude / (2.0 * m as f64).sqrt(),
    )))
}

fn vector(src: &mut dyn SlotSource, m: usize, d: usize, magnitude: f64) -> ModuleVector {
    ModuleVector::from_matrix(matrix_from(src.take(m * d), m, d, magnitude / (2.0 * m as f64).sqrt()))
}

/// Near-even split of `k` rows into `n` contiguous blocks; the first `k mod n` get one extra row.
fn row_blocks(k: usize, n: usize) -> Vec<(usize, usize)> {
    let (base, extra) = (k / n, k % n);
    let mut start = 0;
    (0..n)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let block = (start, start + len);
            start += len;
            block
        })
        .collect()
}

fn embed(block: &ComplexMatrix, rows: usize, start: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, block.cols(), |r, c| {
        if r >= start && r < start + block.rows() {
            block[(r - start, c)]
        } else {
            zero_c()
        }
    })
}

/// Nonzero block rescaled to unit operator norm; a vanishing block becomes
/// the first matrix unit.
fn normalize(block: ComplexMatrix) -> Result<ComplexMatrix> {
    let norm = op_norm(&block)?;
    if norm > 0.0 && norm.is_finite() {
        Ok(block.scale_real(1.0 / norm))
    } else {
        Ok(ComplexMatrix::from_fn(block.rows(), block.cols(), |r, c| {
            Complex64::new(if r == 0 && c == 0 { 1.0 } else { 0.0 }, 0.0)
        }))
    }
}

/// Blocks of height `min(d, ⌊m/n⌋)` on disjoint rows, mixed by one Haar unitary.
fn orthogonal_family(
    src: &mut dyn SlotSource,
    m: usize,
    d: usize,
    n: usize,
    unit: bool,
    isometric: bool,
    magnitude: f64,
) -> Result<Vec<ModuleVector>> {
    let b = d.min(m / n);
    let scale = if unit { 1.0 } else { magnitude / (2.0 * m as f64).sqrt() };
    let mut blocks = Vec::with_capacity(n);
    for _ in 0..n {
        let raw = matrix_from(src.take(b * d), b, d, scale);
        let block = if isometric {
            polar(&raw)?.unitary
        } else if unit {
            normalize(raw)?
        } else {
            raw
        };
        blocks.push(block);
    }
    let u = haar(src, m)?;
    Ok(blocks
        .iter()
        .enumerate()
        .map(|(i, block)| ModuleVector::from_matrix(u.matmul(&embed(block, m, i * b))))
        .collect())
}

/// Orthonormal family of `n` unit vectors on disjoint `d`-row blocks, mixed
/// by a Haar unitary. Requires `n·d ≤ m`.
pub fn gen_unit_orthogonal_family(seed: u64, m: usize, d: usize, n: usize) -> Result<Vec<ModuleVector>> {
    ModuleSpec::new(m, d)?;
    if n == 0 || n * d > m {
        return Err(Error::contract(format!(
            "unit orthogonal family needs 1 <= n and n*d <= m, got n={n} d={d} m={m}"
        )));
    }
    let mut src = Drawing {
        seed,
        slots: Vec::new(),
    };
    orthogonal_family(&mut src, m, d, n, true, false, 1.0)
}

fn range_operators(
    src: &mut dyn SlotSource,
    h: usize,
    k: usize,
    n: usize,
    isometric: bool,
) -> Result<Vec<ComplexMatrix>> {
    let scale = 1.0 / (2.0 * k as f64).sqrt();
    row_blocks(k, n)
        .into_iter()
        .map(|(lo, hi)| {
            let raw = matrix_from(src.take((hi - lo) * h), hi - lo, h, scale);
            let block = if isometric { polar(&raw)?.unitary } else { raw };
            Ok(embed(&block, k, lo))
        })
        .collect()
}

/// `n` operators `ℂ^h → ℂ^k` on disjoint near-even row blocks, so
/// `T_i* T_j = 0` exactly for `i ≠ j`. Requires `n ≤ k`.
pub fn gen_orthogonal_range_operators(seed: u64, h: usize, k: usize, n: usize) -> Result<Vec<ComplexMatrix>> {
    if h == 0 || n == 0 || n > k {
        return Err(Error::contract(format!(
            "orthogonal ranges need h >= 1 and 1 <= n <= k, got h={h} k={k} n={n}"
        )));
    }
    let mut src = Drawing {
        seed,
        slots: Vec::new(),
    };
    range_operators(&mut src, h, k, n, false)
}

fn coefficient(src: &mut dyn SlotSource, d: usize, kind: CoeffKind) -> Result<AlgebraElement> {
    Ok(match kind {
        CoeffKind::Generic => AlgebraElement::new(matrix_from(src.take(d * d), d, d, 1.0 / (2.0 * d as f64).sqrt()))?,
        CoeffKind::Unitary => AlgebraElement::new(haar(src, d)?)?,
        CoeffKind::ScalarIdentity => AlgebraElement::scalar(d, src.take(1)[0] * std::f64::consts::FRAC_1_SQRT_2),
        CoeffKind::Zero => AlgebraElement::zeros(d),
    })
}

fn scalars(src: &mut dyn SlotSource, n: usize, kind: CoeffKind) -> Vec<Complex64> {
    match kind {
        CoeffKind::Zero => vec![zero_c(); n],
        CoeffKind::Unitary => src
            .take(n)
            .into_iter()
            .map(|z| {
                if z.norm() > 0.0 {
                    z / z.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect(),
        CoeffKind::Generic | CoeffKind::ScalarIdentity => src
            .take(n)
            .into_iter()
            .map(|z| z * std::f64::consts::FRAC_1_SQRT_2)
            .collect(),
    }
}

fn family(src: &mut dyn SlotSource, cfg: &GenConfig, kind: FamilyKind, isometric: bool) -> Result<Vec<ModuleVector>> {
    let (m, d, n) = (cfg.m, cfg.d, cfg.n);
    match kind {
        FamilyKind::Generic => Ok((0..n).map(|_| vector(src, m, d, cfg.magnitude)).collect()),
        FamilyKind::NearParallel => {
            let base = vector(src, m, d, 1.0);
            Ok((0..n)
                .map(|_| {
                    let noise = vector(src, m, d, NEAR_PARALLEL_NOISE);
                    let v = &base.matrix().clone() + noise.matrix();
                    ModuleVector::from_matrix(v.scale_real(cfg.magnitude))
                })
                .collect())
        }
        FamilyKind::Orthogonal => orthogonal_family(src, m, d, n, false, isometric, cfg.magnitude),
        FamilyKind::UnitOrthogonal => orthogonal_family(src, m, d, n, true, isometric, cfg.magnitude),
    }
}

fn build(cfg: &GenConfig, id: InequalityId, src: &mut dyn SlotSource) -> Result<InequalityInstance> {
    cfg.validate_for(id)?;
    let (m, d, n) = (cfg.m, cfg.d, cfg.n);
    let kind = cfg.coeffs;
    let mut inst = InequalityInstance::new(id);
    let fam_kind = cfg.family_for(id);
    match id {
        InequalityId::Bessel => {
            let e = family(src, cfg, fam_kind.expect("family tag"), cfg.probe)?;
            let x = if cfg.probe {
                // x in the span of the e_i·c_i: Bessel is then an equality
                let mut acc = ComplexMatrix::zeros(m, d);
                for ei in &e {
                    let c = coefficient(src, d, CoeffKind::Generic)?;
                    acc = &acc + &ei.matrix().matmul(c.matrix());
                }
                ModuleVector::from_matrix(acc.scale_real(cfg.magnitude))
            } else {
                vector(src, m, d, cfg.magnitude)
            };
            inst.vectors = std::iter::once(x).chain(e).collect();
        }
        InequalityId::Lemma => {
            let a = coefficient(src, d, kind)?;
            if cfg.probe {
                inst.coefficients = vec![a.clone(), a, AlgebraElement::identity(d)];
            } else {
                let b = coefficient(src, d, kind)?;
                let c = coefficient(src, d, kind)?;
                inst.coefficients = vec![a, b, c];
            }
        }
        InequalityId::Bombieri | InequalityId::BnLemma => {
            inst.vectors = family(src, cfg, fam_kind.expect("family tag"), false)?;
            inst.coefficients = (0..n).map(|_| coefficient(src, d, kind)).collect::<Result<_>>()?;
        }
        InequalityId::BombieriCor | InequalityId::BoasBellman | InequalityId::Remark => {
            let y = family(src, cfg, fam_kind.expect("family tag"), false)?;
            let x = vector(src, m, d, cfg.magnitude);
            inst.vectors = std::iter::once(x).chain(y).collect();
        }
        InequalityId::Mpf | InequalityId::Thm311 => {
            let y = family(src, cfg, fam_kind.expect("family tag"), false)?;
            let x = vector(src, m, d, cfg.magnitude);
            inst.vectors = std::iter::once(x).chain(y).collect();
            inst.coefficients = (0..n).map(|_| coefficient(src, d, kind)).collect::<Result<_>>()?;
        }
        InequalityId::OrthRanges => {
            let t = range_operators(src, d, m, n, cfg.probe)?;
            let t = t.into_iter().map(|ti| ti.scale_real(cfg.magnitude));
            let s = (0..n).map(|_| Ok(coefficient(src, d, kind)?.matrix().clone()));
            inst.operators = t.map(Ok).chain(s).collect::<Result<_>>()?;
        }
        InequalityId::Invertible => {
            // T = Q1 diag(σ) Q2 with log σ confined to (-4, 4)
            let q1 = haar(src, d)?;
            let sigma: Vec<f64> = src.take(d).iter().map(|z| (4.0 * (z.re / 4.0).tanh()).exp()).collect();
            let q2 = haar(src, d)?;
            let t = q1.matmul(&ComplexMatrix::from_real_diag(&sigma)).matmul(&q2);
            let s1 = coefficient(src, d, kind)?.matrix().clone();
            let s2 = coefficient(src, d, kind)?.matrix().clone();
            inst.operators = vec![t, s1, s2];
        }
        InequalityId::ScalarComb => {
            inst.scalars = scalars(src, n, kind);
            inst.operators = (0..n)
                .map(|_| matrix_from(src.take(d * d), d, d, cfg.magnitude / (2.0 * d as f64).sqrt()))
                .collect();
        }
        InequalityId::CauchySchwarz => {
            if cfg.probe {
                let x = polar(&matrix_from(src.take(m * d), m, d, 1.0))?.unitary;
                let a = coefficient(src, d, CoeffKind::Generic)?;
                let y = x.matmul(a.matrix()).scale_real(cfg.magnitude);
                inst.vectors = vec![ModuleVector::from_matrix(x), ModuleVector::from_matrix(y)];
            } else {
                let x = vector(src, m, d, cfg.magnitude);
                let y = vector(src, m, d, cfg.magnitude);
                inst.vectors = vec![x, y];
            }
        }
    }
    inst.meta = meta(cfg, id);
    debug_assert!(inst.validate().is_ok(), "generated instance must validate");
    Ok(inst)
}

fn meta(cfg: &GenConfig, id: InequalityId) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("master_seed".to_string(), cfg.master_seed.to_string());
    meta.insert("coeffs".to_string(), cfg.coeffs.to_string());
    if let Some(f) = cfg.family_for(id) {
        meta.insert("family".to_string(), f.to_string());
    }
    if cfg.probe {
        meta.insert("probe".to_string(), "true".to_string());
    }
    if id.has_branches() {
        meta.insert(
            "branch".to_string(),
            cfg.branch.unwrap_or(Branch::First).as_str().to_string(),
        );
    }
    if id == InequalityId::ScalarComb {
        meta.insert(
            "form".to_string(),
            cfg.form.unwrap_or(ScalarCombForm::Squared).as_str().to_string(),
        );
    }
    meta
}

/// Draws a fresh latent and builds the instance from it.
pub fn gen_instance_with_latent(cfg: &GenConfig, id: InequalityId) -> Result<(InequalityInstance, Latent)> {
    let mut src = Drawing {
        seed: cfg.master_seed,
        slots: Vec::new(),
    };
    let inst = build(cfg, id, &mut src)?;
    Ok((inst, Latent { slots: src.slots }))
}

pub fn gen_instance(cfg: &GenConfig, id: InequalityId) -> Result<InequalityInstance> {
    Ok(gen_instance_with_latent(cfg, id)?.0)
}

/// Rebuilds the instance for a (possibly perturbed) latent of the same config.
pub fn build_from_latent(cfg: &GenConfig, id: InequalityId, latent: &Latent) -> Result<InequalityInstance> {
    let mut src = Replay { latent, next: 0 };
    let inst = build(cfg, id, &mut src)?;
    if src.next != latent.slots.len() {
        return Err(Error::contract(format!(
            "latent has {} slots, build used {}",
            latent.slots.len(),
            src.next
        )));
    }
    Ok(inst)
}

#[cfg(test)]
mod tests;
