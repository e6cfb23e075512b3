use num_rational::BigRational;
use proptest::prelude::*;
use rumorlab::theory::{
    solve_q, solve_qhat, solve_sigma_gw, solve_sigma_gw_bisection, solve_sigma_gw_hat,
    variance_clt, variance_clt_hat,
};
use rumorlab::{predict, EmissionMode, ExactLaw, Law};

/// Bisection-only root of `q m + ln(1 - q)` written independently of the library.
fn bisection_q(m: f64) -> f64 {
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * m + (1.0 - mid).ln() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn grid() -> Vec<(Law<f64>, f64)> {
    let laws = [
        Law::constant(3),
        Law::constant(6),
        Law::from_pmf(vec![(0, 0.2), (4, 0.8)]).unwrap(),
        Law::from_pmf(vec![(1, 0.5), (2, 0.25), (7, 0.25)]).unwrap(),
    ];
    let ps = [0.45, 0.6, 0.75, 0.9, 1.0];
    laws.iter()
        .flat_map(|l| ps.iter().map(move |&p| (l.clone(), p)))
        .collect()
}

#[test]
fn solver_certificate() {
    let q: f64 = solve_q(2.0).unwrap();
    assert!((2.0 * q + (1.0 - q).ln()).abs() < 1e-10);
    assert!((q - bisection_q(2.0)).abs() < 1e-9);
    assert!((q - 0.7968121).abs() < 1e-7);
}

#[test]
fn thinning_identities_on_grid() {
    let g = grid();
    assert_eq!(g.len(), 20);
    for (law, p) in g {
        let m = law.mean();
        let thin = law.thin(&p).unwrap();
        assert!((solve_qhat(m, p).unwrap() - solve_q(p * m).unwrap()).abs() < 1e-10);
        assert!((solve_sigma_gw_hat(&law, p).unwrap() - solve_sigma_gw(&thin)).abs() < 1e-10);
        if p * m > 1.0 {
            let q_hat = solve_qhat(m, p).unwrap();
            let direct = variance_clt_hat(&law, p).unwrap();
            let via_thin = variance_clt(&thin, q_hat).unwrap();
            assert!(
                (direct - via_thin).abs() < 1e-10,
                "{law:?} p={p}: {direct} vs {via_thin}"
            );
        }
    }
}

#[test]
fn hat_fields_follow_the_mode() {
    let law = Law::<f64>::constant(4);
    let one = predict(&law, 0.5, EmissionMode::EdgeCheck).unwrap();
    let two = predict(&law, 0.5, EmissionMode::NeighborOnly).unwrap();
    assert!((one.q_hat - 0.7968121).abs() < 1e-7);
    assert_eq!(two.q_hat, two.q);
    assert_eq!(one.q, two.q);
    let sub = predict(
        &Law::from_pmf(vec![(0, 0.5), (2, 0.5)]).unwrap(),
        0.5,
        EmissionMode::EdgeCheck,
    )
    .unwrap();
    assert!(!sub.supercritical && !sub.supercritical_hat);
    assert_eq!((sub.q, sub.q_hat, sub.sigma_gw_hat), (0.0, 0.0, 0.0));
}

#[test]
fn variance_of_thinned_constant() {
    // K = 4, p = 1/2: K^ ~ Bin(4, 1/2), mean 2, variance 1
    let q = bisection_q(2.0);
    let r = 1.0 - q;
    let expected = (q * 1.0 * r * r + q * r + r * r * r.ln()) / (2.0 * r - 1.0).powi(2);
    let v = variance_clt_hat(&Law::<f64>::constant(4), 0.5).unwrap();
    assert!((v - expected).abs() < 1e-9);
    assert!((v - 0.366089).abs() < 1e-6);
}

#[test]
fn exact_thinning_algebra() {
    let half = BigRational::new(1.into(), 2.into());
    let third = BigRational::new(1.into(), 3.into());
    let law: ExactLaw = Law::from_pmf(vec![
        (0, BigRational::new(1.into(), 5.into())),
        (2, BigRational::new(3.into(), 10.into())),
        (3, BigRational::new(1.into(), 2.into())),
    ])
    .unwrap();
    let twice = law.thin(&half).unwrap().thin(&third).unwrap();
    let once = law.thin(&(half.clone() * third.clone())).unwrap();
    assert_eq!(twice, once);
    let p = half.clone();
    let thin = law.thin(&p).unwrap();
    assert_eq!(thin.mean(), p.clone() * law.mean());
    let one = BigRational::from_integer(1.into());
    let expected_var =
        p.clone() * (one.clone() - p.clone()) * law.mean() + p.clone() * p.clone() * law.variance();
    assert_eq!(thin.variance(), expected_var);
    for s in [
        BigRational::from_integer(0.into()),
        third.clone(),
        one.clone(),
    ] {
        let lhs = thin.pgf_at(&s).unwrap();
        let rhs = law
            .pgf_at(&(one.clone() - p.clone() + p.clone() * s))
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}

proptest! {
    #[test]
    fn root_certificate(m in 1.05f64..12.0) {
        let q = solve_q(m).unwrap();
        prop_assert!(q > 0.0 && q < 1.0);
        prop_assert!((1.0 - q - (-m * q).exp()).abs() < 1e-12);
        prop_assert!((q - bisection_q(m)).abs() < 1e-9);
    }

    #[test]
    fn root_is_increasing(a in 1.05f64..8.0, d in 0.01f64..4.0) {
        prop_assert!(solve_q(a).unwrap() < solve_q(a + d).unwrap());
    }

    #[test]
    fn gw_fixed_point(w0 in 0.01f64..0.6, k in 2u32..6) {
        let law = Law::from_pmf(vec![(0, w0), (k, 1.0 - w0)]).unwrap();
        let s = solve_sigma_gw(&law);
        prop_assert!((1.0 - s - law.pgf_at(&(1.0 - s)).unwrap()).abs() < 1e-9);
        prop_assert!((s - solve_sigma_gw_bisection(&law)).abs() < 1e-8);
    }

    #[test]
    fn thinning_preserves_mass(p in 0.0f64..=1.0, w in 0.05f64..0.95) {
        let law = Law::from_pmf(vec![(1, w), (4, 1.0 - w)]).unwrap();
        let thin = law.thin(&p).unwrap();
        prop_assert!((thin.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((thin.mean() - p * law.mean()).abs() < 1e-12);
    }

    #[test]
    fn f32_tracks_f64(m in 1.2f64..6.0) {
        let a = solve_q(m).unwrap();
        let b = solve_q(m as f32).unwrap() as f64;
        prop_assert!((a - b).abs() < 1e-4);
    }
}
