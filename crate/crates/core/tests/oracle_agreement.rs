use std::collections::BTreeMap;

use num_rational::BigRational;
use rumorlab::experiments::stats::{chi_square, histogram, two_sample_chi_square};
use rumorlab::experiments::{exact_small_distribution, pmf_to_f64, run_model, Model};
use rumorlab::{derive_seed, Law, RandomSource};

const LEVEL: f64 = 0.001;

fn sample_counts(
    model: Model,
    n: usize,
    p: f64,
    law: &Law<f64>,
    runs: u64,
    base: u64,
) -> BTreeMap<usize, u64> {
    histogram((0..runs).map(|r| {
        let src = RandomSource::new(derive_seed(base, r), n, p, law.clone()).unwrap();
        run_model(model, &src).unwrap().final_informed
    }))
}

fn check(model: Model, n: usize, p: f64, law: &Law<f64>, base: u64) {
    let exact = pmf_to_f64(&exact_small_distribution(model, n, &p, law, 64).unwrap());
    let observed = sample_counts(model, n, p, law, 20_000, base);
    let c = chi_square(&observed, &exact).unwrap();
    assert!(
        c.accepts(LEVEL),
        "{model} n={n} p={p}: {c:?} observed {observed:?} exact {exact:?}"
    );
}

#[test]
fn er1_two_servers_exact() {
    let half = BigRational::new(1.into(), 2.into());
    let pmf = exact_small_distribution(Model::Er1, 2, &half, &Law::constant(1), 64).unwrap();
    assert_eq!(pmf[&1], BigRational::new(3.into(), 4.into()));
    assert_eq!(pmf[&2], BigRational::new(1.into(), 4.into()));
}

#[test]
fn every_model_matches_its_oracle() {
    let laws = [
        Law::constant(1),
        Law::constant(2),
        Law::from_pmf(vec![(0, 0.25), (2, 0.75)]).unwrap(),
    ];
    let mut base = 100;
    for model in Model::ALL {
        for n in [2, 3] {
            for law in &laws {
                for p in [0.5, 0.8] {
                    base += 1;
                    check(model, n, p, law, base);
                }
            }
        }
    }
}

#[test]
fn sequential_and_delayed_agree_in_law() {
    let law = Law::from_pmf(vec![(1, 0.5), (4, 0.5)]).unwrap();
    let a = sample_counts(Model::CgSeq, 30, 0.4, &law, 10_000, 7);
    let b = sample_counts(Model::Coupled, 30, 0.4, &law, 10_000, 8);
    let c = two_sample_chi_square(&a, &b).unwrap();
    assert!(c.accepts(LEVEL), "{c:?}");
}

#[test]
fn er2_direct_and_coupled_agree_at_moderate_size() {
    let law = Law::constant(2);
    let a = sample_counts(Model::Er2, 12, 0.5, &law, 10_000, 21);
    let b = sample_counts(Model::Er2Coupled, 12, 0.5, &law, 10_000, 22);
    let c = two_sample_chi_square(&a, &b).unwrap();
    assert!(c.accepts(LEVEL), "{c:?}\n{a:?}\n{b:?}");
}

#[test]
fn p_one_second_mode_is_the_chain() {
    let law = Law::constant(1);
    let chain = pmf_to_f64(&exact_small_distribution(Model::Complete, 3, &1.0, &law, 64).unwrap());
    let er2 = pmf_to_f64(&exact_small_distribution(Model::Er2, 3, &1.0, &law, 64).unwrap());
    assert_eq!(chain, er2);
    let a = sample_counts(Model::Er2, 20, 1.0, &Law::constant(2), 10_000, 31);
    let b = sample_counts(Model::Complete, 20, 1.0, &Law::constant(2), 10_000, 32);
    assert!(two_sample_chi_square(&a, &b).unwrap().accepts(LEVEL));
}
