use hetshrink_core::bounds;
use hetshrink_core::canonical::c_star_general;
use hetshrink_core::direction::solve_direction;
use hetshrink_core::estimators::{linear_shrink, Estimator, Magnitude};
use hetshrink_core::linalg::{trace, Matrix};
use hetshrink_core::risk::{
    bayes_risk, pointwise_risk, pointwise_risk_with, risk_curve, theta_path, variance_config,
    DirectionKind, GeneralPointwiseExperiment, Runner, Sequential,
};
use hetshrink_core::{Direction, EstimatorKind, EstimatorSpec, PriorSpec, ProblemSpec};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

const N: usize = 4000;

fn spec(kind: EstimatorKind) -> EstimatorSpec {
    EstimatorSpec::new(kind)
}

#[test]
fn positive_part_dominates_unclipped() {
    let pairs = [
        (spec(EstimatorKind::Berger), spec(EstimatorKind::BergerPlus)),
        (spec(EstimatorKind::Dagger), spec(EstimatorKind::DaggerPlus)),
    ];
    for name in ["eq5", "group3"] {
        let d = variance_config(name).unwrap().d;
        for kind in [
            DirectionKind::Homoscedastic,
            DirectionKind::Heteroscedastic,
            DirectionKind::Axis(0),
        ] {
            for eta in [0.0, 2.0, 6.0] {
                let theta = theta_path(kind, &d, eta).unwrap();
                for (raw, plus) in &pairs {
                    let r = pointwise_risk(raw, &theta, &d, N, 5).unwrap();
                    let rp = pointwise_risk(plus, &theta, &d, N, 5).unwrap();
                    assert!(
                        rp.mean <= r.mean + 3.0 * rp.std_err.max(r.std_err),
                        "{name} {kind:?} {eta}: {rp:?} vs {r:?}"
                    );
                }
            }
        }
    }
    let js = spec(EstimatorKind::JamesStein);
    let jsp = spec(EstimatorKind::JamesSteinPlus);
    for eta in [0.0, 1.0, 3.0] {
        let theta = theta_path(DirectionKind::Homoscedastic, &[1.0; 8], eta).unwrap();
        let r = pointwise_risk(&js, &theta, &[1.0; 8], N, 3).unwrap();
        let rp = pointwise_risk(&jsp, &theta, &[1.0; 8], N, 3).unwrap();
        assert!(rp.mean <= r.mean + 3.0 * rp.std_err.max(r.std_err));
    }
}

#[test]
fn curves_are_reproducible() {
    let d = variance_config("group22").unwrap().d;
    let grid = [0.0, 4.0, 8.0];
    let est = spec(EstimatorKind::EmpiricalBayes);
    let a = risk_curve(&est, DirectionKind::Heteroscedastic, &d, &grid, 2500, 77).unwrap();
    let b = risk_curve(&est, DirectionKind::Heteroscedastic, &d, &grid, 2500, 77).unwrap();
    assert_eq!(a, b);
    let c = risk_curve(&est, DirectionKind::Heteroscedastic, &d, &grid, 2500, 78).unwrap();
    assert_ne!(a.risk, c.risk);
    assert!(a.std_err.iter().all(|s| *s >= 0.0));
}

fn random_spd(rng: &mut ChaCha8Rng, p: usize, spread: f64) -> Matrix {
    let m = Matrix::from_fn(p, p, |_, _| StandardNormal.sample(rng));
    &m * m.transpose() * (spread / p as f64) + Matrix::identity(p, p)
}

#[test]
fn general_shrinkage_is_minimax() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let p = 6;
    let mut checked = 0;
    while checked < 4 {
        let sigma = random_spd(&mut rng, p, 0.5);
        let q = random_spd(&mut rng, p, 0.5);
        let inner = random_spd(&mut rng, p, 0.3);
        let a = &inner * sigma.clone().try_inverse().unwrap();
        let c = c_star_general(&sigma, &q, &a).unwrap();
        if c <= 0.0 {
            continue;
        }
        checked += 1;
        let problem = ProblemSpec::general(sigma.clone(), q.clone()).unwrap();
        let dir = Direction::general(a).unwrap();
        let ramp = move |s: f64| 2.0 * c * s / (1.0 + s);
        let shrink = |x: &[f64]| {
            linear_shrink(x, &problem, &dir, Magnitude::Function(&ramp))
                .unwrap()
                .value
        };
        let limit = trace(&(&sigma * &q));
        let unif = Uniform::new(-4.0, 4.0).unwrap();
        for _ in 0..20 {
            let theta: Vec<f64> = (0..p).map(|_| unif.sample(&mut rng)).collect();
            let exp = GeneralPointwiseExperiment::new(&shrink, &theta, &sigma, &q).unwrap();
            let r = Sequential.run(&exp, 1500, 9);
            assert!(
                r.mean <= limit + 3.0 * r.std_err(),
                "risk {} se {} limit {limit}",
                r.mean,
                r.std_err()
            );
        }
    }
}

#[test]
fn bayes_risks_respect_closed_forms() {
    for name in ["eq5", "group3", "group22", "invchisq8df3", "invchisq24df5"] {
        let d = variance_config(name).unwrap().d;
        for scale in [0.0, 1.0, 10.0] {
            let gamma: Vec<f64> = d
                .iter()
                .enumerate()
                .map(|(j, v)| scale * (v + j as f64))
                .collect();
            let prior = PriorSpec::explicit(gamma.clone()).unwrap();
            let dag = spec(EstimatorKind::Dagger)
                .with_prior(prior.clone())
                .unwrap();
            let r = bayes_risk(&dag, &gamma, &d, N, 1).unwrap();
            let t3 = bounds::theorem3_bounds(&d, &gamma).unwrap();
            assert!(
                r.mean <= t3.tight.value + 3.0 * r.std_err,
                "{name} {scale}: {r:?} vs {t3:?}"
            );
            let sol = solve_direction(&d, &prior).unwrap();
            let ub = bounds::bayes_upper_bound(&d, &gamma, &sol.a_dag).unwrap();
            assert!(r.mean <= ub.value + 3.0 * r.std_err);
            let mb2 = spec(EstimatorKind::MinimaxBergerSimplified)
                .with_prior(prior)
                .unwrap();
            let r = bayes_risk(&mb2, &gamma, &d, N, 1).unwrap();
            let exact = bounds::mb2_bayes_risk(&d, &gamma).unwrap();
            assert!(
                (r.mean - exact).abs() <= 3.0 * r.std_err,
                "{name} {scale}: {r:?} vs {exact}"
            );
        }
    }
}

#[test]
fn dagger_estimator_within_worst_case_bound_on_rectangle() {
    let d = variance_config("group3").unwrap().d;
    let gamma: Vec<f64> = d.iter().map(|v| 2.0 * v).collect();
    let prior = PriorSpec::explicit(gamma.clone()).unwrap();
    let est = Estimator::new(
        &spec(EstimatorKind::Dagger)
            .with_prior(prior.clone())
            .unwrap(),
        &d,
    )
    .unwrap();
    let a = solve_direction(&d, &prior).unwrap().a_dag;
    let bound = bounds::worst_case_bound(&d, &gamma, &a).unwrap().value;
    let corner: Vec<f64> = gamma.iter().map(|g| g.sqrt()).collect();
    for theta in [vec![0.0; 10], corner] {
        let r = pointwise_risk_with(&Sequential, &est, &theta, &d, N, 4).unwrap();
        assert!(r.mean <= bound + 3.0 * r.std_err, "{r:?} vs {bound}");
    }
}
