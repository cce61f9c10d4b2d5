//! Tensor-product quadrature of the reduced (angle-integrated) partition
//! functions.

use rayon::prelude::*;

use super::gauss::{laguerre, legendre, Rule};
use super::IntegratorConfig;
use crate::error::{Error, Result};
use crate::spectrum::{Kind, Method, PartitionEstimate, Spectrum};

/// Per-axis orders tried in turn; the first successive pair closer than `tol` wins.
pub const ORDERS: [usize; 4] = [8, 16, 32, 64];

/// Largest dimension the tensor rules accept.
pub const MAX_DIM: usize = 6;

/// Integrand of the CP^N orthant integral
/// `∫_{u>0} du (1+Σu)^{-(N+1)} exp[-ρ(θ_0+Σθ_α u_α)/(1+Σu)]`.
fn cp_orthant_integrand(theta: &[f64], rho: f64, u: &[f64]) -> f64 {
    let n = u.len() as i32;
    let sum_u: f64 = u.iter().sum();
    let energy = theta[0] + theta[1..].iter().zip(u).map(|(t, x)| t * x).sum::<f64>();
    let denom = 1.0 + sum_u;
    denom.powi(-(n + 1)) * (-rho * energy / denom).exp()
}

/// ln of the CQ^N simplex integrand
/// `(1−Σu)^{-(N+1)} exp[-ρ(θ_0−Σθ_α u_α)/(1−Σu)]`.
fn cq_simplex_log_integrand(theta: &[f64], rho: f64, u: &[f64], one_minus_sum: f64) -> f64 {
    let n = u.len() as f64;
    let energy = theta[0] - theta[1..].iter().zip(u).map(|(t, x)| t * x).sum::<f64>();
    -(n + 1.0) * one_minus_sum.ln() - rho * energy / one_minus_sum
}

/// Sums `f` over the tensor grid of `rule` in dimension `dim`, returning
/// `(Σ w f, Σ |w f|)`. The outermost axis is split across threads; partial
/// sums are combined in index order so the result is thread-count independent.
fn tensor_sum<F>(rule: &Rule, dim: usize, f: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let m = rule.len();
    let inner = m.pow(dim as u32 - 1);
    let partials: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; dim];
            idx[0] = first;
            let mut point = vec![0.0; dim];
            let mut sum = 0.0;
            let mut abs = 0.0;
            for flat in 0..inner {
                let mut rem = flat;
                for axis in (1..dim).rev() {
                    idx[axis] = rem % m;
                    rem /= m;
                }
                let mut w = 1.0;
                for axis in 0..dim {
                    point[axis] = rule.nodes[idx[axis]];
                    w *= rule.weights[idx[axis]];
                }
                let v = w * f(&point);
                sum += v;
                abs += v.abs();
            }
            (sum, abs)
        })
        .collect();
    partials.iter().fold((0.0, 0.0), |(s, a), &(ps, pa)| (s + ps, a + pa))
}

/// Runs the order ladder, stopping when successive estimates agree to `tol` (relative).
fn refine<F>(dim: usize, cfg: &IntegratorConfig, make_rule: fn(usize) -> Rule, eval: F) -> Result<PartitionEstimate>
where
    F: Fn(&Rule) -> (f64, f64),
{
    let mut spent: u64 = 0;
    let mut previous: Option<f64> = None;
    for &order in &ORDERS {
        let cost = (order as u64).saturating_pow(dim as u32);
        if spent.saturating_add(cost) > cfg.max_evals {
            return Err(Error::BudgetExhausted { budget: cfg.max_evals, needed: spent.saturating_add(cost) });
        }
        spent += cost;
        let (value, abs_sum) = eval(&make_rule(order));
        if let Some(prev) = previous {
            let delta = (value - prev).abs();
            if delta <= cfg.tol * value.abs() {
                let rounding = 16.0 * f64::EPSILON * abs_sum;
                return Ok(PartitionEstimate {
                    value,
                    method: Method::Quadrature,
                    err: delta + rounding,
                    samples: 0,
                });
            }
        }
        previous = Some(value);
    }
    let last = *ORDERS.last().expect("non-empty ladder") as u64;
    Err(Error::BudgetExhausted { budget: spent, needed: spent + (2 * last).pow(dim as u32) })
}

/// CP^N orthant integral for arbitrary (unvalidated) energies.
///
/// The orthant is mapped to the open simplex by `y = u/(1+Σu)` and the
/// simplex to the unit cube by the collapsed map
/// `y_k = t_k ∏_{j<k}(1−t_j)`; the orthant integrand itself is evaluated at
/// `u(y)` and multiplied by both Jacobians.
pub fn cpn_orthant_integral(theta: &[f64], rho: f64, cfg: &IntegratorConfig) -> Result<PartitionEstimate> {
    let dim = theta.len().checked_sub(1).filter(|&d| d >= 1).ok_or(Error::TooFewLevels(theta.len()))?;
    if dim > MAX_DIM {
        return Err(Error::InvalidParameter(format!("tensor quadrature supports N <= {MAX_DIM}, got {dim}")));
    }
    let nplus = dim as i32 + 1;
    refine(dim, cfg, |n| legendre(n).rescaled(0.0, 1.0), |rule| {
        tensor_sum(rule, dim, |t| {
            let mut y = [0.0f64; MAX_DIM];
            let mut remaining = 1.0;
            let mut collapse_jac = 1.0;
            for (k, &tk) in t.iter().enumerate() {
                y[k] = remaining * tk;
                collapse_jac *= remaining;
                remaining *= 1.0 - tk;
            }
            // remaining == 1 - Σy
            let mut u = [0.0f64; MAX_DIM];
            for k in 0..dim {
                u[k] = y[k] / remaining;
            }
            let projective_jac = remaining.powi(-nplus);
            cp_orthant_integrand(theta, rho, &u[..dim]) * projective_jac * collapse_jac
        })
    })
}

/// Tensor quadrature of the CP^N partition function (N ≤ 6).
pub fn z_cpn_quadrature(s: &Spectrum, cfg: &IntegratorConfig) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cp)?;
    cpn_orthant_integral(s.theta(), s.rho(), cfg)
}

/// Gauss-Laguerre quadrature of the CQ^N partition function (N ≤ 6).
///
/// The simplex `Σu < 1` is opened to the orthant by `x = u/(1−Σu)`
/// (Jacobian `(1+Σx)^{-(N+1)}`). Each axis uses a Laguerre rule scaled to the
/// decay rate `ρ(θ_0−θ_α)` of the transformed integrand; the original simplex
/// integrand is still what gets evaluated.
pub fn z_cqn_quadrature(s: &Spectrum, cfg: &IntegratorConfig) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cq)?;
    let dim = s.dim();
    if dim > MAX_DIM {
        return Err(Error::InvalidParameter(format!("tensor quadrature supports N <= {MAX_DIM}, got {dim}")));
    }
    let theta = s.theta();
    let rho = s.rho();
    let rates: Vec<f64> = theta[1..].iter().map(|t| rho * (theta[0] - t)).collect();
    let ln_rates: f64 = rates.iter().map(|r| r.ln()).sum();
    let nplus = dim as f64 + 1.0;

    refine(dim, cfg, laguerre, |rule| {
        tensor_sum(rule, dim, |y| {
            let mut x = [0.0f64; MAX_DIM];
            for k in 0..dim {
                x[k] = y[k] / rates[k];
            }
            let one_plus = 1.0 + x[..dim].iter().sum::<f64>();
            let mut u = [0.0f64; MAX_DIM];
            for k in 0..dim {
                u[k] = x[k] / one_plus;
            }
            let one_minus_sum = 1.0 - u[..dim].iter().sum::<f64>();
            let ln_f = cq_simplex_log_integrand(theta, rho, &u[..dim], one_minus_sum) - nplus * one_plus.ln();
            // strip the Laguerre weight e^{-Σy} and the axis scaling
            (ln_f + y.iter().sum::<f64>() - ln_rates).exp()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{z_cpn_dh, z_cqn_closed};
    use crate::spectrum::validate_spectrum;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cp_quadrature_matches_fixed_point_sum() {
        let s = validate_spectrum(Kind::Cp, &[1.0, 2.0], 1.0).unwrap();
        let q = z_cpn_quadrature(&s, &cfg()).unwrap();
        assert!(rel(q.value, z_cpn_dh(&s).unwrap().value) < 1e-8);

        let s = validate_spectrum(Kind::Cp, &[1.0, 2.0, 3.0], 1.0).unwrap();
        let q = z_cpn_quadrature(&s, &cfg()).unwrap();
        assert!(rel(q.value, z_cpn_dh(&s).unwrap().value) < 1e-6);
        assert_eq!(q.method, Method::Quadrature);
    }

    #[test]
    fn equal_energies_give_volume() {
        // θ ≡ c: integrand is e^{-ρc} (1+Σu)^{-(N+1)}, total e^{-ρc}/N!
        for (n, fact) in [(1usize, 1.0), (2, 2.0), (3, 6.0)] {
            let theta = vec![0.7; n + 1];
            let q = cpn_orthant_integral(&theta, 1.5, &cfg()).unwrap();
            let expected = (-1.5f64 * 0.7).exp() / fact;
            assert!(rel(q.value, expected) < 1e-12, "N={n}: {} vs {expected}", q.value);
        }
    }

    #[test]
    fn small_rho_volume() {
        for (n, fact) in [(1usize, 1.0), (2, 2.0), (3, 6.0)] {
            let theta: Vec<f64> = (1..=n + 1).map(|k| k as f64).collect();
            let q = cpn_orthant_integral(&theta, 1e-4, &cfg()).unwrap();
            assert!(rel(q.value, 1.0 / fact) < 1e-3);
        }
    }

    #[test]
    fn cq_quadrature_examples() {
        let s = validate_spectrum(Kind::Cq, &[2.0, 1.0], 1.0).unwrap();
        assert!(rel(z_cqn_quadrature(&s, &cfg()).unwrap().value, (-2f64).exp()) < 1e-10);

        let s = validate_spectrum(Kind::Cq, &[3.0, 2.0, 1.0], 1.0).unwrap();
        assert!(rel(z_cqn_quadrature(&s, &cfg()).unwrap().value, (-3f64).exp() / 2.0) < 1e-8);

        let s = validate_spectrum(Kind::Cq, &[2.0, 1.0], 10.0).unwrap();
        assert!(rel(z_cqn_quadrature(&s, &cfg()).unwrap().value, (-20f64).exp() / 10.0) < 1e-8);

        let s = validate_spectrum(Kind::Cq, &[4.0, 3.0, 2.0, 1.0], 2.0).unwrap();
        let q = z_cqn_quadrature(&s, &cfg()).unwrap().value;
        assert!(rel(q, z_cqn_closed(&s).unwrap().value) < 1e-8);
    }

    #[test]
    fn budget_is_enforced() {
        let s = validate_spectrum(Kind::Cp, &[1.0, 2.0, 3.0, 4.0], 1.0).unwrap();
        let tight = IntegratorConfig { max_evals: 100, ..cfg() };
        assert!(matches!(z_cpn_quadrature(&s, &tight), Err(Error::BudgetExhausted { .. })));
    }

    #[test]
    fn dimension_cap() {
        let theta: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let s = validate_spectrum(Kind::Cp, &theta, 1.0).unwrap();
        assert!(matches!(z_cpn_quadrature(&s, &cfg()), Err(Error::InvalidParameter(_))));
    }
}
