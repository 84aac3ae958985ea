use super::*;
use crate::inequality::{evaluate, GramSummary};
use crate::module_space::{inner, module_norm};
use crate::tolerance::ToleranceConfig;

const PROFILES: [(usize, usize, usize); 5] = [(3, 1, 2), (4, 2, 2), (6, 2, 3), (6, 3, 3), (8, 2, 4)];

#[test]
fn module_vector_is_deterministic_and_scales() {
    let a = gen_module_vector(42, 4, 2, 1.0).unwrap();
    assert_eq!(a, gen_module_vector(42, 4, 2, 1.0).unwrap());
    assert_ne!(a, gen_module_vector(43, 4, 2, 1.0).unwrap());
    assert!(gen_module_vector(42, 4, 2, 0.0).unwrap().matrix().is_zero());
    let big = gen_module_vector(42, 4, 2, 3.0).unwrap();
    assert!(big.matrix().max_abs_diff(&a.matrix().scale_real(3.0)) <= 1e-15);
}

#[test]
fn unit_orthogonal_family_post_checks() {
    let e = gen_unit_orthogonal_family(7, 6, 2, 3).unwrap();
    for i in 0..3 {
        assert!((module_norm(&e[i]).unwrap() - 1.0).abs() <= 1e-12);
        for j in (i + 1)..3 {
            assert!(inner(&e[i], &e[j]).unwrap().norm().unwrap() <= 1e-12);
        }
    }
    assert!(matches!(
        gen_unit_orthogonal_family(7, 6, 3, 3),
        Err(Error::Contract(_))
    ));
    assert_eq!(gen_unit_orthogonal_family(1, 5, 2, 1).unwrap().len(), 1);
}

#[test]
fn complete_scalar_family_is_a_basis() {
    let e = gen_unit_orthogonal_family(3, 4, 1, 4).unwrap();
    let mut frame = ComplexMatrix::zeros(4, 4);
    for ei in &e {
        frame = &frame + &ei.matrix().mul_adjoint(ei.matrix());
    }
    assert!(frame.max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-12);
}

#[test]
fn orthogonal_range_operators() {
    let t = gen_orthogonal_range_operators(11, 3, 6, 2).unwrap();
    assert!(t[0].adjoint_mul(&t[1]).is_zero());
    let single = gen_orthogonal_range_operators(1, 2, 4, 1).unwrap();
    assert!(single[0].as_slice().iter().all(|z| z.norm() > 0.0));
    let basis = gen_orthogonal_range_operators(2, 1, 3, 3).unwrap();
    for (i, ti) in basis.iter().enumerate() {
        for r in 0..3 {
            assert_eq!(ti[(r, 0)].norm() > 0.0, r == i);
        }
    }
    assert!(gen_orthogonal_range_operators(2, 1, 3, 4).is_err());
    assert_eq!(row_blocks(7, 3), vec![(0, 3), (3, 5), (5, 7)]);
}

#[test]
fn left_unitary_mixing_preserves_gram() {
    let mut src = Drawing {
        seed: 5,
        slots: Vec::new(),
    };
    let y: Vec<ModuleVector> = (0..3).map(|_| vector(&mut src, 6, 2, 1.0)).collect();
    let u = haar(&mut src, 6).unwrap();
    let mixed: Vec<ModuleVector> = y
        .iter()
        .map(|v| ModuleVector::from_matrix(u.matmul(v.matrix())))
        .collect();
    for i in 0..3 {
        for j in 0..3 {
            let before = inner(&y[i], &y[j]).unwrap();
            let after = inner(&mixed[i], &mixed[j]).unwrap();
            assert!(before.matrix().max_abs_diff(after.matrix()) <= 1e-12);
        }
    }
}

#[test]
fn magnitude_scales_gram_norms() {
    for family in [FamilyKind::Generic, FamilyKind::Orthogonal, FamilyKind::NearParallel] {
        let mut cfg = GenConfig::new(9, 6, 2, 3);
        cfg.family = Some(family);
        let base = gen_instance(&cfg, InequalityId::Bombieri).unwrap();
        cfg.magnitude = 2.5;
        let big = gen_instance(&cfg, InequalityId::Bombieri).unwrap();
        let (g0, g1) = (
            GramSummary::compute(&base.vectors).unwrap(),
            GramSummary::compute(&big.vectors).unwrap(),
        );
        for (r0, r1) in g0.gram_norms.iter().zip(&g1.gram_norms) {
            for (a, b) in r0.iter().zip(r1) {
                // off-diagonal zeros of orthogonal families are roundoff, so compare at family scale
                assert!((b - 6.25 * a).abs() <= 1e-10 * g1.max_norm_sq, "{family}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn every_tag_and_profile_generates_valid_instances() {
    let tol = ToleranceConfig::default();
    for id in InequalityId::ALL {
        for &(m, d, n) in &PROFILES {
            for seed in 0..5 {
                let cfg = GenConfig::new(seed, m, d, n);
                let (inst, latent) = gen_instance_with_latent(&cfg, id).unwrap();
                inst.validate().unwrap();
                let report = evaluate(&inst, &tol).unwrap_or_else(|e| panic!("{id} {m},{d},{n}: {e}"));
                assert!(report.all_hold(), "{id} ({m},{d},{n}) seed {seed}");
                assert_eq!(build_from_latent(&cfg, id, &latent).unwrap(), inst);
                assert_eq!(gen_instance(&cfg, id).unwrap(), inst);
            }
        }
    }
}

#[test]
fn zero_coefficients_give_zero_gap() {
    let tol = ToleranceConfig::default();
    for id in InequalityId::ALL.into_iter().filter(|t| t.quadratic_in_coefficients()) {
        let mut cfg = GenConfig::new(3, 6, 2, 3);
        cfg.coeffs = CoeffKind::Zero;
        let r = evaluate(&gen_instance(&cfg, id).unwrap(), &tol).unwrap();
        assert!(r.holds && r.near_equality && r.min_eig_gap == 0.0, "{id}");
    }
}

#[test]
fn parseval_and_probes_reach_equality() {
    let tol = ToleranceConfig::default();
    for seed in 0..20 {
        let r = evaluate(
            &gen_instance(&GenConfig::new(seed, 3, 1, 3), InequalityId::Bessel).unwrap(),
            &tol,
        )
        .unwrap();
        assert!(r.near_equality, "parseval seed {seed}");
        for (id, (m, d, n)) in [
            (InequalityId::Bessel, (6, 2, 3)),
            (InequalityId::Bessel, (6, 3, 3)),
            (InequalityId::Lemma, (3, 3, 1)),
            (InequalityId::CauchySchwarz, (5, 2, 1)),
            (InequalityId::OrthRanges, (6, 2, 1)),
        ] {
            let mut cfg = GenConfig::new(seed, m, d, n);
            cfg.probe = true;
            let r = evaluate(&gen_instance(&cfg, id).unwrap(), &tol).unwrap();
            assert!(r.near_equality, "{id} probe seed {seed}: {}", r.relative_slack);
        }
    }
}

#[test]
fn incompatible_configs_are_rejected() {
    let mut cfg = GenConfig::new(1, 6, 2, 3);
    cfg.family = Some(FamilyKind::Generic);
    assert!(matches!(
        gen_instance(&cfg, InequalityId::Bessel),
        Err(Error::Validation(_))
    ));
    assert!(gen_instance(&cfg, InequalityId::Lemma).is_ok());
    let mut cfg = GenConfig::new(1, 6, 2, 3);
    cfg.probe = true;
    assert!(matches!(
        gen_instance(&cfg, InequalityId::Mpf),
        Err(Error::Validation(_))
    ));
    let cfg = GenConfig::new(1, 2, 1, 3);
    assert!(matches!(
        gen_instance(&cfg, InequalityId::Remark),
        Err(Error::Validation(_))
    ));
    let cfg = GenConfig::new(1, 0, 1, 3);
    assert!(gen_instance(&cfg, InequalityId::Mpf).is_err());
}

#[test]
fn invertible_operator_is_well_conditioned() {
    for seed in 0..50 {
        let inst = gen_instance(&GenConfig::new(seed, 4, 3, 2), InequalityId::Invertible).unwrap();
        let sv = crate::linalg::singular_values(&inst.operators[0]).unwrap();
        assert!(sv[0] / sv[2] <= 8f64.exp() * (1.0 + 1e-12));
    }
}

#[test]
fn kind_names_parse() {
    for k in [
        FamilyKind::Generic,
        FamilyKind::Orthogonal,
        FamilyKind::UnitOrthogonal,
        FamilyKind::NearParallel,
    ] {
        assert_eq!(k.as_str().parse::<FamilyKind>().unwrap(), k);
    }
    for k in [
        CoeffKind::Generic,
        CoeffKind::Unitary,
        CoeffKind::ScalarIdentity,
        CoeffKind::Zero,
    ] {
        assert_eq!(k.as_str().parse::<CoeffKind>().unwrap(), k);
    }
    assert!("bogus".parse::<CoeffKind>().is_err());
}

#[test]
fn orth_ranges_trial_that_stalled_the_svd() {
    let inst = gen_instance(&GenConfig::new(2425324803916189926, 6, 2, 3), InequalityId::OrthRanges).unwrap();
    let report = evaluate(&inst, &ToleranceConfig::default()).unwrap();
    assert!(report.all_hold());
}
