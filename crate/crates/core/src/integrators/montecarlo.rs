//! Monte-Carlo estimators. Both are bit-reproducible for a given
//! `(inputs, seed, samples)` regardless of thread count.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use super::rng::{shards, stream, Moments};
use super::IntegratorConfig;
use crate::error::{Error, Result};
use crate::spectrum::{Kind, Method, PartitionEstimate, Spectrum};

/// Rates at or below this make the unit-rate importance weights square-divergent.
const MIN_TARGET_RATE: f64 = 0.5;

fn sharded<F>(cfg: &IntegratorConfig, draw: F) -> Moments
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let parts: Vec<Moments> = shards(cfg.samples)
        .into_par_iter()
        .map(|(index, len)| {
            let mut rng = stream(cfg.seed, index);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(1/N!) E[exp(-ρ z†hz)]` with `z` uniform on the unit sphere of C^{N+1}.
///
/// Accepts any `rho >= 0` and unvalidated energies; `rho = 0` gives exactly
/// `1/N!` with zero error.
pub fn sphere_average(theta: &[f64], rho: f64, cfg: &IntegratorConfig) -> Result<PartitionEstimate> {
    if theta.len() < 2 {
        return Err(Error::TooFewLevels(theta.len()));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::NonPositiveRho(rho));
    }
    let moments = sharded(cfg, |rng| {
        let mut energy = 0.0;
        let mut norm = 0.0;
        for &t in theta {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let w = re * re + im * im;
            energy += t * w;
            norm += w;
        }
        (-rho * energy / norm).exp()
    });
    let volume = 1.0 / factorial(theta.len() - 1);
    Ok(PartitionEstimate {
        value: volume * moments.mean,
        method: Method::MonteCarlo,
        err: volume * moments.std_error(),
        samples: moments.count,
    })
}

/// Monte-Carlo CP^N partition function over the unit sphere.
pub fn z_cpn_montecarlo(s: &Spectrum, cfg: &IntegratorConfig) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cp)?;
    sphere_average(s.theta(), s.rho(), cfg)
}

/// Importance-sampled CQ^N partition function in the orthant coordinates
/// `x_α = u_α/(1−Σu)`, where the integrand is `e^{-ρθ_0} e^{-Σ a_α x_α}`,
/// `a_α = ρ(θ_0−θ_α)`. Proposals are unit-rate exponentials and each sample is
/// weighted by `exp[-Σ(a_α−1)x_α]`.
///
/// Fails with `WeightOverflow` when some `a_α <= 1/2`, where the weights
/// have infinite variance; quadrature handles that regime.
pub fn z_cqn_exponential_mc(s: &Spectrum, cfg: &IntegratorConfig) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cq)?;
    let theta = s.theta();
    let rho = s.rho();
    let rates: Vec<f64> = theta[1..].iter().map(|t| rho * (theta[0] - t)).collect();
    if let Some(mode) = rates.iter().position(|&a| a <= MIN_TARGET_RATE) {
        return Err(Error::WeightOverflow { mode: mode + 1, rate: rates[mode] });
    }
    let moments = sharded(cfg, |rng| {
        let mut exponent = 0.0;
        for &a in &rates {
            let x: f64 = rng.sample(Exp1);
            exponent -= (a - 1.0) * x;
        }
        exponent.exp()
    });
    let prefactor = (-rho * theta[0]).exp();
    Ok(PartitionEstimate {
        value: prefactor * moments.mean,
        method: Method::MonteCarlo,
        err: prefactor * moments.std_error(),
        samples: moments.count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::z_cpn_dh;
    use crate::spectrum::validate_spectrum;

    #[test]
    fn sphere_average_zero_rho_is_exact_volume() {
        let cfg = IntegratorConfig { samples: 10_000, ..Default::default() };
        for (theta, vol) in [(vec![1.0, 2.0], 1.0), (vec![1.0, 2.0, 3.0, 4.0], 1.0 / 6.0)] {
            let e = sphere_average(&theta, 0.0, &cfg).unwrap();
            assert_eq!(e.value, vol);
            assert_eq!(e.err, 0.0);
        }
    }

    #[test]
    fn cp_mc_within_three_sigma() {
        let s = validate_spectrum(Kind::Cp, &[1.0, 2.0], 1.0).unwrap();
        let cfg = IntegratorConfig { samples: 200_000, seed: 11, ..Default::default() };
        let e = z_cpn_montecarlo(&s, &cfg).unwrap();
        let exact = z_cpn_dh(&s).unwrap().value;
        assert!((e.value - exact).abs() < 3.0 * e.err, "{} ± {} vs {exact}", e.value, e.err);
        assert_eq!(e.samples, 200_000);
    }

    #[test]
    fn same_seed_same_bits() {
        let s = validate_spectrum(Kind::Cp, &[1.0, 2.0, 3.0], 1.0).unwrap();
        let cfg = IntegratorConfig { samples: 150_000, seed: 5, ..Default::default() };
        let a = z_cpn_montecarlo(&s, &cfg).unwrap();
        let b = z_cpn_montecarlo(&s, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.err.to_bits(), b.err.to_bits());
        let c = z_cpn_montecarlo(&s, &IntegratorConfig { seed: 6, ..cfg }).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let s = validate_spectrum(Kind::Cq, &[3.0, 2.0, 1.0], 2.0).unwrap();
        let cfg = IntegratorConfig { samples: 300_000, seed: 9, ..Default::default() };
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = single.install(|| z_cqn_exponential_mc(&s, &cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let b = many.install(|| z_cqn_exponential_mc(&s, &cfg).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn cq_mc_examples() {
        let cfg = IntegratorConfig { samples: 100_000, seed: 3, ..Default::default() };
        let s = validate_spectrum(Kind::Cq, &[2.0, 1.0], 2.0).unwrap();
        let e = z_cqn_exponential_mc(&s, &cfg).unwrap();
        let exact = (-4f64).exp() / 2.0;
        assert!((e.value - exact).abs() < 3.0 * e.err, "{} ± {}", e.value, e.err);

        let s = validate_spectrum(Kind::Cq, &[3.0, 2.0, 1.0], 2.0).unwrap();
        let e = z_cqn_exponential_mc(&s, &cfg).unwrap();
        let exact = (-6f64).exp() / 8.0;
        assert!((e.value - exact).abs() < 3.0 * e.err, "{} ± {}", e.value, e.err);
    }

    #[test]
    fn unit_rate_has_zero_variance() {
        // a = ρ(θ0-θ1) = 1 makes every weight exactly 1
        let cfg = IntegratorConfig { samples: 1000, ..Default::default() };
        let s = validate_spectrum(Kind::Cq, &[2.0, 1.0], 1.0).unwrap();
        let e = z_cqn_exponential_mc(&s, &cfg).unwrap();
        assert_eq!(e.value, (-2f64).exp());
        assert_eq!(e.err, 0.0);
    }

    #[test]
    fn slow_rates_are_refused() {
        let s = validate_spectrum(Kind::Cq, &[2.0, 1.9], 1.0).unwrap();
        assert!(matches!(
            z_cqn_exponential_mc(&s, &IntegratorConfig::default()),
            Err(Error::WeightOverflow { mode: 1, .. })
        ));
    }
}
