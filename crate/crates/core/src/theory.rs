//! Fixed-point equations of the limit theorems.
//!
//! `q` solves `q E[K] + ln(1 - q) = 0`, `sigma_gw` is the survival probability
//! of the Galton-Watson process with offspring law `K`, and the CLT variance is
//!
//! ```text
//! sigma_q^2 = (q var(K) (1-q)^2 + q (1-q) + (1-q)^2 ln(1-q)) / ((1-q) E[K] - 1)^2
//! ```
//!
//! Hatted quantities are the same objects for the thinned resource
//! `K^ = B_1 + ... + B_K`.

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::resource::Law;
use crate::scalar::{tol, Scalar};

/// Which emission dynamics a prediction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EmissionMode {
    /// Attempts target uniform servers and are lost on closed edges; the
    /// effective resource is the thinned `K^`.
    EdgeCheck,
    /// Attempts target uniform neighbors; the effective resource is `K`.
    NeighborOnly,
}

const FIXED_POINT_STEPS: usize = 1_000_000;

fn is_supercritical<T: Float>(mean: T) -> bool {
    mean > T::one() + tol(1e-12)
}

/// Bisection for a function positive at `lo` and negative at `hi`.
fn bisect<T: Float>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, width: T) -> T {
    let two = T::one() + T::one();
    while hi - lo > width {
        let mid = (lo + hi) / two;
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// Largest root of `q m + ln(1 - q) = 0` in `[0, 1)`; zero when `m <= 1`.
pub fn solve_q<T: Float + Scalar>(mean_k: T) -> Result<T> {
    if mean_k.is_nan() || mean_k <= T::zero() || !mean_k.is_finite() {
        return Err(Error::Domain(format!(
            "mean resource must be positive, got {mean_k:?}"
        )));
    }
    if !is_supercritical(mean_k) {
        return Ok(T::zero());
    }
    let f = |q: T| q * mean_k + (-q).ln_1p();
    let df = |q: T| mean_k - T::one() / (T::one() - q);
    let lo = tol::<T>(1e-12);
    let mut hi = T::one() - tol::<T>(1e-12);
    if f(hi) > T::zero() {
        // Root closer to 1 than the default bracket (very large means).
        hi = T::one() - T::epsilon();
        if f(hi) > T::zero() {
            return Ok(hi);
        }
    }
    let mut q = bisect(f, lo, hi, tol(1e-13));
    for _ in 0..2 {
        let next = q - f(q) / df(q);
        if next > lo && next < hi && f(next).abs() <= f(q).abs() {
            q = next;
        }
    }
    Ok(q)
}

/// Root for the thinned resource: `solve_q(p m)`.
pub fn solve_qhat<T: Float + Scalar>(mean_k: T, p: T) -> Result<T> {
    check_probability(p)?;
    if mean_k.is_nan() || mean_k <= T::zero() {
        return Err(Error::Domain(format!(
            "mean resource must be positive, got {mean_k:?}"
        )));
    }
    if p.is_zero() {
        return Ok(T::zero());
    }
    solve_q(p * mean_k)
}

fn check_probability<T: Float + Scalar>(p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Config(format!("probability {p:?} outside [0, 1]")));
    }
    Ok(())
}

/// Survival probability for an offspring pgf `g`: largest `s` in `[0, 1]`
/// with `s = 1 - g(1 - s)`, by monotone iteration from `s = 1`.
fn gw_survival<T: Float + Scalar>(g: impl Fn(T) -> T, mean: T) -> T {
    if !is_supercritical(mean) {
        return T::zero();
    }
    let step = |s: T| T::one() - g(T::one() - s);
    let mut s = T::one();
    for _ in 0..FIXED_POINT_STEPS {
        let next = step(s);
        if (next - s).abs() < tol(1e-13) {
            return next;
        }
        s = next;
    }
    gw_survival_bisection(g, mean)
}

fn gw_survival_bisection<T: Float + Scalar>(g: impl Fn(T) -> T, mean: T) -> T {
    if !is_supercritical(mean) {
        return T::zero();
    }
    let h = |s: T| T::one() - g(T::one() - s) - s;
    if h(T::one()) >= T::zero() {
        return T::one();
    }
    bisect(h, tol(1e-12), T::one(), tol(1e-13))
}

/// Survival probability of the Galton-Watson process with offspring law `law`.
pub fn solve_sigma_gw<T: Float + Scalar>(law: &Law<T>) -> T {
    gw_survival(|x| law.pgf_unchecked(&x), law.mean())
}

/// The same root found by bisection on `[1e-12, 1]`; used as a cross-check.
pub fn solve_sigma_gw_bisection<T: Float + Scalar>(law: &Law<T>) -> T {
    gw_survival_bisection(|x| law.pgf_unchecked(&x), law.mean())
}

/// Largest root of `s = 1 - E[(1 - p s)^K]`, i.e. the survival probability
/// for the thinned offspring law.
pub fn solve_sigma_gw_hat<T: Float + Scalar>(law: &Law<T>, p: T) -> Result<T> {
    check_probability(p)?;
    let g = |x: T| law.pgf_unchecked(&(T::one() - p + p * x));
    Ok(gw_survival(g, p * law.mean()))
}

fn variance_from_moments<T: Float + Scalar>(mean: T, var: T, q: T) -> T {
    let r = T::one() - q;
    let num = q * var * r * r + q * r + r * r * r.ln();
    let den = r * mean - T::one();
    num / (den * den)
}

/// CLT variance `sigma_q^2` for a supercritical law at its root `q`.
pub fn variance_clt<T: Float + Scalar>(law: &Law<T>, q: T) -> Result<T> {
    let mean = law.mean();
    if !is_supercritical(mean) {
        return Err(Error::Domain(format!(
            "CLT variance needs E[K] > 1, got {mean:?}"
        )));
    }
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::Domain(format!("root {q:?} outside (0, 1)")));
    }
    Ok(variance_from_moments(mean, law.variance(), q))
}

/// CLT variance for the thinned resource, with
/// `var(K^) = p(1-p) E[K] + p^2 var(K)`.
pub fn variance_clt_hat<T: Float + Scalar>(law: &Law<T>, p: T) -> Result<T> {
    check_probability(p)?;
    let mean = law.mean();
    let mean_hat = p * mean;
    if !is_supercritical(mean_hat) {
        return Err(Error::Domain(format!(
            "CLT variance needs p E[K] > 1, got {mean_hat:?}"
        )));
    }
    let var_hat = p * (T::one() - p) * mean + p * p * law.variance();
    let q_hat = solve_q(mean_hat)?;
    Ok(variance_from_moments(mean_hat, var_hat, q_hat))
}

/// Limit quantities for one `(law, p, mode)`.
///
/// The hatted fields describe the effective resource of the chosen mode: the
/// thinned `K^` under [`EmissionMode::EdgeCheck`], `K` itself under
/// [`EmissionMode::NeighborOnly`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction<T> {
    pub q: T,
    pub q_hat: T,
    pub sigma_gw: T,
    pub sigma_gw_hat: T,
    pub var_clt: Option<T>,
    pub var_clt_hat: Option<T>,
    pub supercritical: bool,
    pub supercritical_hat: bool,
}

/// The `(q*, sigma*, var*)` triple a mode's statistics are compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target<T> {
    pub q: T,
    pub sigma_gw: T,
    pub var_clt: Option<T>,
    pub supercritical: bool,
}

impl<T: Copy> Prediction<T> {
    pub fn target(&self) -> Target<T> {
        Target {
            q: self.q_hat,
            sigma_gw: self.sigma_gw_hat,
            var_clt: self.var_clt_hat,
            supercritical: self.supercritical_hat,
        }
    }
}

pub fn predict<T: Float + Scalar>(law: &Law<T>, p: T, mode: EmissionMode) -> Result<Prediction<T>> {
    check_probability(p)?;
    let mean = law.mean();
    if mean.is_zero() {
        // K = 0 almost surely: nothing ever spreads.
        let zero = Prediction {
            q: T::zero(),
            q_hat: T::zero(),
            sigma_gw: T::zero(),
            sigma_gw_hat: T::zero(),
            var_clt: None,
            var_clt_hat: None,
            supercritical: false,
            supercritical_hat: false,
        };
        return Ok(zero);
    }
    let q = solve_q(mean)?;
    let sigma_gw = solve_sigma_gw(law);
    let supercritical = is_supercritical(mean);
    let var_clt = if supercritical {
        Some(variance_clt(law, q)?)
    } else {
        None
    };
    let (q_hat, sigma_gw_hat, var_clt_hat, supercritical_hat) = match mode {
        EmissionMode::NeighborOnly => (q, sigma_gw, var_clt, supercritical),
        EmissionMode::EdgeCheck => {
            let sup = is_supercritical(p * mean);
            let var = if sup {
                Some(variance_clt_hat(law, p)?)
            } else {
                None
            };
            (solve_qhat(mean, p)?, solve_sigma_gw_hat(law, p)?, var, sup)
        }
    };
    Ok(Prediction {
        q,
        q_hat,
        sigma_gw,
        sigma_gw_hat,
        var_clt,
        var_clt_hat,
        supercritical,
        supercritical_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(pairs: &[(u32, f64)]) -> Law<f64> {
        Law::from_pmf(pairs.to_vec()).unwrap()
    }

    #[test]
    fn subcritical_roots_vanish() {
        assert_eq!(solve_q(1.0).unwrap(), 0.0);
        assert_eq!(solve_q(0.5).unwrap(), 0.0);
        assert_eq!(solve_qhat(3.0, 0.3).unwrap(), 0.0);
        assert!(matches!(solve_q(0.0), Err(Error::Domain(_))));
        assert!(solve_q(-1.0).is_err());
    }

    #[test]
    fn q_for_mean_two() {
        let q = solve_q(2.0).unwrap();
        assert!((2.0 * q + (1.0 - q).ln()).abs() < 1e-10);
        assert!((q - 0.7968121).abs() < 1e-7);
        assert_eq!(solve_qhat(4.0, 0.5).unwrap(), q);
        assert_eq!(solve_qhat(2.0, 1.0).unwrap(), q);
    }

    #[test]
    fn q_for_large_means() {
        let q = solve_q(20.0).unwrap();
        // near 1 the residual is ill-conditioned; compare 1 - q with exp(-20 q)
        assert!(q < 1.0 && ((1.0 - q) - (-20.0 * q).exp()).abs() < 1e-15);
    }

    #[test]
    fn q_is_monotone() {
        let qs: Vec<f64> = (1..60)
            .map(|j| solve_q(1.0 + j as f64 * 0.1).unwrap())
            .collect();
        assert!(qs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn f32_solver() {
        let q: f32 = solve_q(2.0f32).unwrap();
        assert!((q - 0.796_812).abs() < 1e-4);
    }

    #[test]
    fn sigma_gw_cases() {
        assert_eq!(solve_sigma_gw(&Law::<f64>::constant(2)), 1.0);
        assert_eq!(solve_sigma_gw(&pmf(&[(0, 0.5), (2, 0.5)])), 0.0);
        let law = pmf(&[(0, 0.5), (3, 0.5)]);
        let s = solve_sigma_gw(&law);
        // extinction x solves x = 0.5 + 0.5 x^3, i.e. x^2 + x - 1 = 0
        let x = (5f64.sqrt() - 1.0) / 2.0;
        assert!((s - (1.0 - x)).abs() < 1e-10);
        assert!((1.0 - s - law.pgf_at(&(1.0 - s)).unwrap()).abs() < 1e-10);
        assert!((s - solve_sigma_gw_bisection(&law)).abs() < 1e-9);
    }

    #[test]
    fn sigma_gw_hat_matches_thinned_law() {
        let law = Law::<f64>::constant(4);
        let direct = solve_sigma_gw_hat(&law, 0.5).unwrap();
        let thinned = solve_sigma_gw(&law.thin(&0.5).unwrap());
        assert!((direct - thinned).abs() < 1e-10);
        assert_eq!(solve_sigma_gw_hat(&law, 1.0).unwrap(), solve_sigma_gw(&law));
        assert_eq!(solve_sigma_gw_hat(&law, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn clt_variance_constant_two() {
        let law = Law::<f64>::constant(2);
        let q = solve_q(2.0).unwrap();
        let r = 1.0 - q;
        let num = q * r + r * r * r.ln();
        let den = (2.0 * r - 1.0).powi(2);
        assert!((num - 0.09611).abs() < 1e-5);
        assert!((den - 0.352390).abs() < 1e-6);
        let v = variance_clt(&law, q).unwrap();
        assert!((v - num / den).abs() < 1e-14);
        assert!((v - 0.2727).abs() < 1e-4);
        assert!(matches!(
            variance_clt(&Law::<f64>::constant(1), 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn clt_variance_hat() {
        let law = Law::<f64>::constant(4);
        let q_hat = solve_qhat(4.0, 0.5).unwrap();
        let thinned = law.thin(&0.5).unwrap();
        assert!((thinned.variance() - 1.0).abs() < 1e-12);
        let a = variance_clt_hat(&law, 0.5).unwrap();
        let b = variance_clt(&thinned, q_hat).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!(variance_clt_hat(&law, 0.25).is_err());
        let v1 = variance_clt_hat(&law, 1.0).unwrap();
        assert!((v1 - variance_clt(&law, solve_q(4.0).unwrap()).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn predictions() {
        let law = pmf(&[(0, 0.2), (3, 0.8)]);
        let a = predict(&law, 0.4, EmissionMode::NeighborOnly).unwrap();
        let b = predict(&law, 0.9, EmissionMode::NeighborOnly).unwrap();
        assert_eq!(a, b);
        let one = predict(&law, 1.0, EmissionMode::EdgeCheck).unwrap();
        let two = predict(&law, 1.0, EmissionMode::NeighborOnly).unwrap();
        assert_eq!(one, two);
        let sub = predict(&pmf(&[(0, 0.5), (2, 0.5)]), 0.5, EmissionMode::EdgeCheck).unwrap();
        assert!(!sub.supercritical && !sub.supercritical_hat);
        assert_eq!(sub.var_clt, None);
        let k4 = predict(&Law::<f64>::constant(4), 0.5, EmissionMode::EdgeCheck).unwrap();
        assert!((k4.q_hat - 0.7968121).abs() < 1e-7);
        assert_eq!(k4.target().q, k4.q_hat);
        let k0 = predict(&Law::<f64>::constant(0), 0.5, EmissionMode::EdgeCheck).unwrap();
        assert_eq!(k0.q, 0.0);
    }
}
