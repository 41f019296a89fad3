use super::*;
use crate::linalg::Matrix;
use crate::model::{Direction, ProblemSpec};
use alloc::vec;
use approx::assert_relative_eq;
use proptest::prelude::*;

const EQ5: [f64; 10] = [40.0, 20.0, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
const GROUP3: [f64; 10] = [40.0, 20.0, 10.0, 5.0, 5.0, 5.0, 1.0, 1.0, 1.0, 1.0];

fn spd(seed: u64, n: usize) -> Matrix {
    let mut s = seed;
    let mut next = || {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let m = Matrix::from_fn(n, n, |_, _| next());
    &m * m.transpose() + Matrix::identity(n, n) * 0.5
}

fn check_factors(e: &Estimate, x: &[f64]) {
    if let Some(f) = &e.shrink_factors {
        for j in 0..x.len() {
            assert_eq!(e.value[j], f[j] * x[j]);
        }
    }
}

#[test]
fn bayes_rule_examples() {
    assert_eq!(
        bayes_rule(&[3.0, -1.0], &[1.0, 2.0], &[0.0, 0.0])
            .unwrap()
            .value,
        vec![0.0, -0.0]
    );
    assert_eq!(
        bayes_rule(&[2.0, 2.0], &[1.0, 1.0], &[1.0, 1.0])
            .unwrap()
            .value,
        vec![1.0, 1.0]
    );
    let e = bayes_rule(&[5.0, 4.0], &[4.0, 1.0], &[1.0, 3.0]).unwrap();
    assert_relative_eq!(e.value.as_slice(), [1.0, 3.0].as_slice(), epsilon = 1e-12);
}

#[test]
fn james_stein_examples() {
    let x = [2.0, 0.0, 0.0, 0.0];
    assert_eq!(
        james_stein(&x, 1.0, 2.0, false).unwrap().value,
        vec![1.0, 0.0, 0.0, 0.0]
    );
    assert_eq!(james_stein(&x, 1.0, 0.0, false).unwrap().value, x.to_vec());
    assert_eq!(
        james_stein(&[0.5, 0.5], 1.0, 2.0, true).unwrap().value,
        vec![0.0, 0.0]
    );
    assert_eq!(
        james_stein(&[0.0; 3], 1.0, 1.0, false).unwrap().value,
        vec![0.0; 3]
    );
}

#[test]
fn eb_examples() {
    let e = eb_morris(&[0.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    assert!(e.value.iter().all(|v| *v == 0.0));
    let mut x = vec![0.0; 10];
    x[0] = libm::sqrt(20.0);
    let e = eb_morris(&x, &[1.0; 10]).unwrap();
    assert_relative_eq!(e.meta_real("gamma_hat").unwrap(), 1.0, epsilon = 1e-12);
    assert_eq!(e.meta("converged"), Some(MetaValue::Flag(true)));
    for f in e.shrink_factors.as_ref().unwrap() {
        assert_relative_eq!(*f, 0.6, epsilon = 1e-12);
    }
}

#[test]
fn xkb_examples() {
    let d = [4.0, 2.0, 1.0, 0.5];
    let e = xkb_sure(&[0.0; 4], &d).unwrap();
    assert_eq!(e.meta_real("gamma_tilde"), Some(0.0));
    assert!(e.value.iter().all(|v| *v == 0.0));
    // D = I: the printed SURE has derivative sign 2p - ||X||^2.
    let e = xkb_sure(&[1.0, 1.0, 1.0, 1.0, 1.0], &[1.0; 5]).unwrap();
    assert_eq!(e.meta_real("gamma_tilde"), Some(0.0));
    assert!(e.value.iter().all(|v| *v == 0.0));
    let x = [3.0, 3.0, 3.0, 3.0, 3.0];
    let e = xkb_sure(&x, &[1.0; 5]).unwrap();
    assert_eq!(e.meta_real("gamma_tilde"), Some(f64::INFINITY));
    assert_eq!(e.value, x.to_vec());
}

#[test]
fn xkb_interior_minimum_matches_brute_force() {
    let d = [10.0, 5.0, 1.0, 0.2];
    let x = [4.0, 1.0, 2.5, 0.1];
    let e = xkb_sure(&x, &d).unwrap();
    let g = e.meta_real("gamma_tilde").unwrap();
    let mut best = f64::INFINITY;
    for i in 0..200_000 {
        best = best.min(sure_printed(&x, &d, i as f64 * 1e-4));
    }
    assert!(e.meta_real("sure").unwrap() <= best + 1e-9);
    assert_relative_eq!(
        sure_printed(&x, &d, g),
        e.meta_real("sure").unwrap(),
        epsilon = 1e-12
    );
}

#[test]
fn spherical_examples() {
    assert_eq!(minimax_range_s(&EQ5), None);
    assert_eq!(minimax_range_s(&[1.0; 4]), Some((0.0, 4.0)));
    let x = [2.0, 0.0, 0.0, 0.0];
    assert_eq!(
        spherical_s(&x, 2.0).unwrap().value,
        vec![1.0, 0.0, 0.0, 0.0]
    );
    assert_eq!(spherical_s(&x, 0.0).unwrap().value, x.to_vec());
    assert_eq!(
        spherical_s_fn(&x, |t| t.min(2.0)).value,
        vec![1.0, 0.0, 0.0, 0.0]
    );
}

#[test]
fn berger_examples() {
    let e = berger_b(&[2.0, 2.0, 1.0], &[4.0, 1.0, 1.0], 1.0, false).unwrap();
    let q = 0.25 + 4.0 + 1.0;
    let want = [
        2.0 * (1.0 - 1.0 / (4.0 * q)),
        2.0 * (1.0 - 1.0 / q),
        1.0 - 1.0 / q,
    ];
    assert_relative_eq!(e.value.as_slice(), want.as_slice(), epsilon = 1e-12);
    assert_relative_eq!(
        e.value.as_slice(),
        [1.9048, 1.6190, 0.8095].as_slice(),
        epsilon = 1e-4
    );
    let x = [2.0, 2.0, 1.0];
    assert_eq!(
        berger_b(&x, &[4.0, 1.0, 1.0], 0.0, false).unwrap().value,
        x.to_vec()
    );
    // X^T D^{-2} X = 8.25 lies between c / d_2 = 5 and c / d_3 = 10
    let e = berger_b(&x, &[4.0, 1.0, 0.5], 5.0, true).unwrap();
    assert_eq!(e.value[2], 0.0);
    assert!(e.value[0] > 0.0);
}

#[test]
fn robust_rb_examples() {
    let g = EffectiveGamma::Finite(vec![0.0; 4]);
    let e = robust_rb(&[1.0, 1.0, 1.0, 1.0], &[1.0; 4], &g, FactorVersion::Usual).unwrap();
    assert_eq!(e.value, vec![0.5; 4]);
    let d = [3.0, 2.0, 1.0, 0.5];
    let x = [2.0, -1.0, 0.5, 3.0];
    let e = robust_rb(&x, &d, &g, FactorVersion::Usual).unwrap();
    let q: f64 = x.iter().zip(&d).map(|(x, d)| x * x / d).sum();
    let f = (1.0 - 2.0 / q).max(0.0);
    for j in 0..4 {
        assert_relative_eq!(e.value[j], f * x[j], epsilon = 1e-12);
    }
    let big: Vec<f64> = x.iter().map(|v| v * 1e8).collect();
    let e = robust_rb(&big, &d, &g, FactorVersion::Usual).unwrap();
    for j in 0..4 {
        assert_relative_eq!(e.value[j], big[j], max_relative = 1e-12);
    }
    let e = robust_rb(
        &x,
        &d,
        &EffectiveGamma::HomoscedasticInfinity,
        FactorVersion::Usual,
    )
    .unwrap();
    assert_eq!(e.value, x.to_vec());
}

/// Term-by-term evaluation of Berger's estimator, written independently of
/// the prefix/suffix implementation.
fn mb_oracle(x: &[f64], d: &[f64], g: &[f64], double: f64) -> Vec<f64> {
    let p = x.len();
    let ds: Vec<f64> = (0..p).map(|j| d[j] * d[j] / (d[j] + g[j])).collect();
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| ds[b].partial_cmp(&ds[a]).unwrap());
    let mut out = vec![0.0; p];
    for (rj, &j) in idx.iter().enumerate() {
        let mut sum = 0.0;
        for rk in rj..p {
            let next = if rk + 1 < p { ds[idx[rk + 1]] } else { 0.0 };
            let s: f64 = idx[..=rk]
                .iter()
                .map(|&l| x[l] * x[l] / (d[l] + g[l]))
                .sum();
            let km2 = (rk as f64 + 1.0 - 2.0).max(0.0);
            sum += (ds[idx[rk]] - next) * (double * km2 / s).min(1.0);
        }
        out[j] = x[j] - sum / ds[j] * d[j] / (d[j] + g[j]) * x[j];
    }
    out
}

#[test]
fn minimax_mb_examples() {
    let zero = EffectiveGamma::Finite(vec![0.0; 5]);
    let x = [1.0, -2.0, 0.5, 0.3, 1.1];
    let mb = minimax_mb(&x, &[1.0; 5], &zero, MbVariant::Standard).unwrap();
    let js = james_stein(&x, 1.0, 3.0, true).unwrap();
    assert_relative_eq!(mb.value.as_slice(), js.value.as_slice(), epsilon = 1e-12);
    assert_eq!(
        minimax_mb(&[0.0; 5], &[1.0; 5], &zero, MbVariant::Standard)
            .unwrap()
            .value,
        vec![0.0; 5]
    );
    let g3 = EffectiveGamma::Finite(vec![0.0; 3]);
    let e = minimax_mb(&[2.0, 2.0, 1.0], &[4.0, 1.0, 1.0], &g3, MbVariant::Standard).unwrap();
    let want = mb_oracle(&[2.0, 2.0, 1.0], &[4.0, 1.0, 1.0], &[0.0; 3], 1.0);
    assert_relative_eq!(e.value.as_slice(), want.as_slice(), epsilon = 1e-12);
}

#[test]
fn minimax_mb_simplified_infinite_prior_limit() {
    let d = [4.0, 3.0, 2.0, 1.0, 0.5];
    let x = [1.0, -2.0, 0.5, 0.3, 1.1];
    let lim = minimax_mb(
        &x,
        &d,
        &EffectiveGamma::HomoscedasticInfinity,
        MbVariant::Simplified,
    )
    .unwrap();
    let big = minimax_mb(
        &x,
        &d,
        &EffectiveGamma::Finite(vec![1e9; 5]),
        MbVariant::Simplified,
    )
    .unwrap();
    assert_relative_eq!(lim.value.as_slice(), big.value.as_slice(), epsilon = 1e-6);
    let std = minimax_mb(
        &x,
        &d,
        &EffectiveGamma::HomoscedasticInfinity,
        MbVariant::Standard,
    )
    .unwrap();
    assert_eq!(std.value, x.to_vec());
}

#[test]
fn linear_shrink_examples() {
    let d = vec![4.0, 2.0, 1.0, 0.5];
    let x = [1.0, 2.0, -1.0, 0.7];
    let problem = ProblemSpec::canonical(d.clone()).unwrap();
    let inv = Direction::diagonal(d.iter().map(|v| 1.0 / v).collect()).unwrap();
    let e = linear_shrink(&x, &problem, &inv, Magnitude::AutoCStar).unwrap();
    let b = berger_b(&x, &d, 2.0, false).unwrap();
    assert_relative_eq!(e.value.as_slice(), b.value.as_slice(), epsilon = 1e-12);

    let x10: Vec<f64> = (0..10).map(|i| i as f64 * 0.3 - 1.0).collect();
    let id = ProblemSpec::canonical(vec![1.0; 10]).unwrap();
    let e = linear_shrink(
        &x10,
        &id,
        &Direction::Diagonal(vec![1.0; 10]),
        Magnitude::AutoCStar,
    )
    .unwrap();
    let js = james_stein(&x10, 1.0, 8.0, false).unwrap();
    assert_relative_eq!(e.value.as_slice(), js.value.as_slice(), epsilon = 1e-12);

    let e = linear_shrink(
        &x,
        &problem,
        &Direction::Diagonal(vec![0.0; 4]),
        Magnitude::AutoCStar,
    )
    .unwrap();
    assert_eq!(e.value, x.to_vec());
    let eq5 = ProblemSpec::canonical(EQ5.to_vec()).unwrap();
    let r = linear_shrink(
        &[1.0; 10],
        &eq5,
        &Direction::Diagonal(vec![1.0; 10]),
        Magnitude::AutoCStar,
    );
    assert_eq!(r, Err(crate::Error::NegativeCStar(-3.0)));
}

#[test]
fn linear_shrink_general_matches_canonical_reduction() {
    let (s, q) = (spd(41, 4), spd(42, 4));
    let problem = ProblemSpec::general(s.clone(), q.clone()).unwrap();
    let a = Direction::General((&s * &q).try_inverse().unwrap());
    let x = [1.0, -0.5, 2.0, 0.3];
    let e = linear_shrink(&x, &problem, &a, Magnitude::AutoCStar).unwrap();
    assert_relative_eq!(e.meta_real("magnitude").unwrap(), 2.0, epsilon = 1e-9);
    assert!(e.shrink_factors.is_none());
}

#[test]
fn positive_part_canonical_examples() {
    let x = [1.0, -2.0, 0.5, 0.3, 1.1];
    let e = positive_part_canonical(&x, &[1.0; 5], &[0.4; 5], FactorVersion::Usual).unwrap();
    let js = james_stein(&x, 1.0, 3.0, true).unwrap();
    assert_relative_eq!(e.value.as_slice(), js.value.as_slice(), epsilon = 1e-12);

    let sol = crate::direction::solve_direction(&EQ5, &crate::PriorSpec::Zero).unwrap();
    let big = [10.0, 12.0, -9.0, 11.0, 10.0, -10.0, 13.0, 10.0, 9.5, 10.0];
    let pp = positive_part_canonical(&big, &EQ5, &sol.a_dag, FactorVersion::Usual).unwrap();
    let problem = ProblemSpec::canonical(EQ5.to_vec()).unwrap();
    let lin = linear_shrink(&big, &problem, &sol.direction(), Magnitude::AutoCStar).unwrap();
    assert_relative_eq!(pp.value.as_slice(), lin.value.as_slice(), epsilon = 1e-12);

    let e = positive_part_canonical(
        &[0.1, 0.1, 3.0],
        &[1.0; 3],
        &[1.0, 0.1, 0.1],
        FactorVersion::Usual,
    );
    assert!(matches!(e, Err(crate::Error::NegativeCStar(_))));
    let e = positive_part_canonical(
        &[0.1, 0.1, 3.0, 0.2],
        &[1.0; 4],
        &[1.0, 1.0, 0.1, 1.0],
        FactorVersion::Usual,
    )
    .unwrap();
    assert_eq!(e.value[0], 0.0);
    assert!(e.value[2] > 0.0);
}

#[test]
fn positive_part_general_examples() {
    let d = vec![4.0, 2.0, 1.0, 0.5];
    let a = vec![0.3, 0.5, 1.0, 1.0];
    let x = [1.0, -2.0, 0.5, 0.3];
    let problem = ProblemSpec::canonical(d.clone()).unwrap();
    let g = positive_part_general(
        &x,
        &problem,
        &Direction::Diagonal(a.clone()),
        FactorVersion::Usual,
    )
    .unwrap();
    let c = positive_part_canonical(&x, &d, &a, FactorVersion::Usual).unwrap();
    assert_eq!(g.value, c.value);

    let (s, q) = (spd(51, 4), spd(52, 4));
    let problem = ProblemSpec::general(s.clone(), q.clone()).unwrap();
    let a = Direction::General((&s * &q).try_inverse().unwrap());
    let big = [30.0, -25.0, 40.0, 35.0];
    let pp = positive_part_general(&big, &problem, &a, FactorVersion::Usual).unwrap();
    let lin = linear_shrink(&big, &problem, &a, Magnitude::AutoCStar).unwrap();
    assert_relative_eq!(pp.value.as_slice(), lin.value.as_slice(), epsilon = 1e-9);
    let small = [0.1, 0.05, -0.1, 0.2];
    assert!(
        positive_part_general(&small, &problem, &a, FactorVersion::Usual)
            .unwrap()
            .value
            .iter()
            .all(|v| v.is_finite())
    );

    let zero = Direction::General(Matrix::zeros(4, 4));
    let e = positive_part_general(&big, &problem, &zero, FactorVersion::Usual).unwrap();
    assert_relative_eq!(e.value.as_slice(), big.as_slice(), epsilon = 1e-9);
}

#[test]
fn block_examples() {
    let zero = EffectiveGamma::Finite(vec![0.0; 10]);
    assert_eq!(BlockPlan::new(&GROUP3, &zero).unwrap().tau(), 6);
    // p = 3: L_1 = L_2 = 0 < L_3, so the single block of dimension 3 gets c = 1
    let x = [1.0, 2.0, -1.0];
    let e = block_shrink(&x, &[3.0, 2.0, 1.0], &EffectiveGamma::Finite(vec![0.0; 3])).unwrap();
    assert_eq!(e.meta("tau"), Some(MetaValue::Count(3)));
    assert_eq!(
        e.value,
        berger_b(&x, &[3.0, 2.0, 1.0], 1.0, false).unwrap().value
    );
    let x = [1.0, 2.0];
    assert_eq!(
        block_shrink(&x, &[3.0, 2.0], &EffectiveGamma::Finite(vec![0.0; 2]))
            .unwrap()
            .value,
        x.to_vec()
    );
    let x: Vec<f64> = (0..10).map(|i| (i as f64 - 4.0) * 0.7).collect();
    let e = block_shrink(&x, &[2.0; 10], &zero).unwrap();
    let tau = e.meta("tau").unwrap();
    let MetaValue::Count(tau) = tau else { panic!() };
    let tau = tau as usize;
    if tau > 2 {
        let head = berger_b(&x[..tau], &[2.0; 10][..tau], tau as f64 - 2.0, false).unwrap();
        assert_relative_eq!(&e.value[..tau], head.value.as_slice(), epsilon = 1e-12);
    }
}

#[test]
fn registry_compiles_every_kind() {
    for &kind in crate::EstimatorKind::ALL {
        let spec = EstimatorSpec::new(kind);
        let d = if matches!(
            kind,
            EstimatorKind::JamesStein | EstimatorKind::JamesSteinPlus
        ) {
            vec![2.0; 10]
        } else {
            EQ5.to_vec()
        };
        let est = Estimator::new(&spec, &d).unwrap_or_else(|e| panic!("{kind:?}: {e}"));
        let zero = est.apply(&[0.0; 10]).unwrap();
        assert!(zero.value.iter().all(|v| *v == 0.0), "{kind:?}");
        let x: Vec<f64> = (0..10).map(|i| i as f64 - 3.5).collect();
        let e = est.apply(&x).unwrap();
        assert!(e.value.iter().all(|v| v.is_finite()), "{kind:?}");
        check_factors(&e, &x);
        assert!(est.apply(&[1.0; 3]).is_err());
    }
    let bplus = EstimatorSpec::new(EstimatorKind::BergerPlus)
        .with_param("c", 1.0)
        .unwrap();
    let e = Estimator::new(&bplus, &[4.0, 1.0, 1.0])
        .unwrap()
        .apply(&[2.0, 2.0, 1.0])
        .unwrap();
    assert_relative_eq!(
        e.value.as_slice(),
        [1.9048, 1.6190, 0.8095].as_slice(),
        epsilon = 1e-4
    );
    let js = EstimatorSpec::new(EstimatorKind::JamesStein);
    assert!(Estimator::new(&js, &EQ5).is_err());
}

#[test]
fn alternative_version_doubles_factor() {
    let x: Vec<f64> = (0..10).map(|i| i as f64 - 3.5).collect();
    let usual = Estimator::new(&EstimatorSpec::new(EstimatorKind::BergerPlus), &GROUP3).unwrap();
    let alt = Estimator::new(
        &EstimatorSpec::new(EstimatorKind::BergerPlus)
            .with_version(FactorVersion::Alternative)
            .unwrap(),
        &GROUP3,
    )
    .unwrap();
    let u = usual.apply(&x).unwrap();
    let a = alt.apply(&x).unwrap();
    let want = berger_b(&x, &GROUP3, 16.0, true).unwrap();
    assert_eq!(a.value, want.value);
    assert_ne!(u.value, a.value);
}

fn vec_strategy(p: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-20.0f64..20.0, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn james_stein_reduction(p in 3usize..15, s2 in 0.1f64..10.0, g in 0.0f64..10.0, seed in vec_strategy(15)) {
        let x = &seed[..p];
        let d = vec![s2; p];
        let sol = crate::direction::solve_direction(&d, &crate::PriorSpec::homoscedastic(g, p).unwrap()).unwrap();
        let problem = ProblemSpec::canonical(d.clone()).unwrap();
        let a = linear_shrink(x, &problem, &sol.direction(), Magnitude::AutoCStar).unwrap();
        let js = james_stein(x, s2, p as f64 - 2.0, false).unwrap();
        for j in 0..p {
            prop_assert!((a.value[j] - js.value[j]).abs() <= 1e-12 * js.value[j].abs().max(1.0));
        }
    }

    #[test]
    fn linear_shrink_scale_invariant(x in vec_strategy(6), a in proptest::collection::vec(0.01f64..5.0, 6), s in 0.01f64..100.0) {
        let d = vec![5.0, 4.0, 3.0, 2.0, 1.0, 0.5];
        let problem = ProblemSpec::canonical(d.clone()).unwrap();
        let c = crate::canonical::c_star_canonical(&d, &a);
        prop_assume!(c >= 0.0);
        let scaled: Vec<f64> = a.iter().map(|v| v * s).collect();
        let e1 = linear_shrink(&x, &problem, &Direction::Diagonal(a), Magnitude::AutoCStar).unwrap();
        let e2 = linear_shrink(&x, &problem, &Direction::Diagonal(scaled), Magnitude::AutoCStar).unwrap();
        for j in 0..6 {
            prop_assert!((e1.value[j] - e2.value[j]).abs() <= 1e-9 * e1.value[j].abs().max(1.0));
        }
    }

    #[test]
    fn positive_part_preserves_sign(x in vec_strategy(10), gamma in proptest::collection::vec(0.0f64..30.0, 10)) {
        let prior = crate::PriorSpec::explicit(gamma).unwrap();
        for kind in [EstimatorKind::BergerPlus, EstimatorKind::JamesSteinPlus, EstimatorKind::DaggerPlus,
                     EstimatorKind::DaggerPlusZero, EstimatorKind::DaggerPlusInfinity, EstimatorKind::RobustBayes,
                     EstimatorKind::MinimaxBerger] {
            let mut spec = EstimatorSpec::new(kind);
            if matches!(kind, EstimatorKind::DaggerPlus | EstimatorKind::RobustBayes | EstimatorKind::MinimaxBerger) {
                spec = spec.with_prior(prior.clone()).unwrap();
            }
            if kind == EstimatorKind::JamesSteinPlus {
                spec = spec.with_param("sigma2", 3.0).unwrap();
            }
            let e = Estimator::new(&spec, &GROUP3).unwrap().apply(&x).unwrap();
            for j in 0..10 {
                prop_assert!(e.value[j] == 0.0 || e.value[j].signum() == x[j].signum(), "{:?}", kind);
            }
        }
    }

    #[test]
    fn minimax_mb_matches_oracle(x in vec_strategy(7), d in proptest::collection::vec(0.1f64..20.0, 7),
                                 g in proptest::collection::vec(0.0f64..10.0, 7), alt in any::<bool>()) {
        let (variant, double) = if alt { (MbVariant::Alternative, 2.0) } else { (MbVariant::Standard, 1.0) };
        let e = minimax_mb(&x, &d, &EffectiveGamma::Finite(g.clone()), variant).unwrap();
        let want = mb_oracle(&x, &d, &g, double);
        for j in 0..7 {
            prop_assert!((e.value[j] - want[j]).abs() <= 1e-9 * want[j].abs().max(1.0));
        }
    }
}

#[test]
fn linear_transformation_invariance() {
    for seed in 0..10 {
        let (s, q) = (spd(seed, 4), spd(seed + 60, 4));
        let a = (&s * &q).try_inverse().unwrap() + spd(seed + 90, 4).try_inverse().unwrap() * 0.0;
        let b = spd(seed + 120, 4) + Matrix::from_fn(4, 4, |i, j| (i as f64 - j as f64) * 0.2);
        let bi = b.clone().try_inverse().unwrap();
        let x = nalgebra::DVector::from_vec(vec![1.0, -0.3, 0.8, 2.0]);
        let p1 = ProblemSpec::general(s.clone(), q.clone()).unwrap();
        let p2 = ProblemSpec::general(
            crate::linalg::symmetrize(&(&b * &s * b.transpose())),
            crate::linalg::symmetrize(&(bi.transpose() * &q * &bi)),
        )
        .unwrap();
        let e1 = linear_shrink(
            x.as_slice(),
            &p1,
            &Direction::General(a.clone()),
            Magnitude::AutoCStar,
        )
        .unwrap();
        let bx = &b * &x;
        let e2 = linear_shrink(
            bx.as_slice(),
            &p2,
            &Direction::General(&b * &a * &bi),
            Magnitude::AutoCStar,
        )
        .unwrap();
        let back = &bi * nalgebra::DVector::from_vec(e2.value);
        for j in 0..4 {
            assert!(
                (back[j] - e1.value[j]).abs() < 1e-9 * e1.value[j].abs().max(1.0),
                "seed {seed}"
            );
        }
    }
}
