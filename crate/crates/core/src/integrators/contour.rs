//! The Lagrange-multiplier representation
//! `Z = (1/2π) ∫ dλ e^{iλ} ∏_α (ρθ_α + iλ)^{-1}`, integrated numerically on
//! a truncated real line and by residues.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gauss::{legendre, Rule};
use super::IntegratorConfig;
use crate::error::{Error, Result};
use crate::linalg::compensated_sum;
use crate::spectrum::{Kind, Method, PartitionEstimate, Spectrum};

const PANEL_ORDER: usize = 16;
const MAX_DEPTH: u32 = 40;

fn integrand(rho_theta: &[f64], lambda: f64) -> Complex64 {
    let i = Complex64::i();
    let den: Complex64 = rho_theta.iter().map(|&a| Complex64::new(a, lambda)).product();
    (i * lambda).exp() / den
}

/// Certified bound on `(1/2π) ∫_{|λ|>Λ} ∏|ρθ_α + iλ|^{-1} dλ ≤ Λ^{-N}/(πN)`.
pub fn contour_tail_bound(n: usize, cutoff: f64) -> f64 {
    cutoff.powi(-(n as i32)) / (PI * n as f64)
}

fn panel(rule: &Rule, rho_theta: &[f64], a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| w * integrand(rho_theta, mid + half * x).re)
        .sum::<f64>()
}

/// Adaptive bisection of one panel; returns (integral, error estimate).
fn adaptive(rule: &Rule, rho_theta: &[f64], a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let left = panel(rule, rho_theta, a, m);
    let right = panel(rule, rho_theta, m, b);
    let diff = (left + right - whole).abs();
    if diff <= tol || depth >= MAX_DEPTH {
        return (left + right, diff);
    }
    let (l, le) = adaptive(rule, rho_theta, a, m, left, 0.5 * tol, depth + 1);
    let (r, re) = adaptive(rule, rho_theta, m, b, right, 0.5 * tol, depth + 1);
    (l + r, le + re)
}

/// Residue sum of the λ-integrand at its poles `λ = iρθ_α`, all in the upper
/// half plane where `e^{iλ}` decays.
pub fn z_cpn_residue(s: &Spectrum) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cp)?;
    let rho_theta: Vec<f64> = s.theta().iter().map(|t| s.rho() * t).collect();
    let i = Complex64::i();
    let mut order: Vec<usize> = (0..rho_theta.len()).collect();
    order.sort_by(|&a, &b| rho_theta[a].total_cmp(&rho_theta[b]));
    let residues = order.iter().map(|&a| {
        let pole = i * rho_theta[a];
        let rest: Complex64 = rho_theta
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != a)
            .map(|(_, &rb)| rb + i * pole)
            .product();
        // d/dλ (ρθ_a + iλ) = i
        let res = (i * pole).exp() / (i * rest);
        // (1/2π) · 2πi · Res
        (i * res).re
    });
    Ok(PartitionEstimate::exact(compensated_sum(residues), Method::Residue))
}

/// Numerical λ-integral on `[-Λ, Λ]`, with `Λ = cfg.lambda_cutoff`.
///
/// The integrand satisfies `f(-λ) = conj f(λ)`, so only the real part on
/// `[0, Λ]` is integrated. `err` combines the panel error estimates with the
/// analytic tail bound; `tol` is absolute here. The result is cross-checked
/// against [`z_cpn_residue`].
pub fn z_cpn_contour(s: &Spectrum, cfg: &IntegratorConfig) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cp)?;
    let n = s.dim();
    let cutoff = cfg.lambda_cutoff;
    let tail = contour_tail_bound(n, cutoff);
    if tail > cfg.tol {
        return Err(Error::TailDominates { bound: tail, tol: cfg.tol });
    }

    let rho_theta: Vec<f64> = s.theta().iter().map(|t| s.rho() * t).collect();
    let rule = legendre(PANEL_ORDER);
    let width = 0.5 * PI;
    let panels = (cutoff / width).ceil() as u64;
    let evals = panels.saturating_mul(3 * PANEL_ORDER as u64);
    if evals > cfg.max_evals {
        return Err(Error::BudgetExhausted { budget: cfg.max_evals, needed: evals });
    }
    // quadrature error target: a small fraction of the remaining tolerance
    let panel_tol = 1e-3 * (cfg.tol - tail).max(1e-15) / panels as f64;

    let mut pieces = Vec::with_capacity(panels as usize);
    let mut quad_err = 0.0;
    for k in 0..panels {
        let a = k as f64 * width;
        let b = ((k + 1) as f64 * width).min(cutoff);
        let whole = panel(&rule, &rho_theta, a, b);
        let (v, e) = adaptive(&rule, &rho_theta, a, b, whole, panel_tol, 0);
        pieces.push(v);
        quad_err += e;
    }
    let value = compensated_sum(pieces) / PI;
    let err = quad_err / PI + tail;

    let residue = z_cpn_residue(s)?.value;
    if (value - residue).abs() > err + 1e-12 * residue.abs() {
        return Err(Error::CrossCheckFailed { what: "contour integral vs residue sum", lhs: value, rhs: residue });
    }
    Ok(PartitionEstimate { value, method: Method::Contour, err, samples: 0 })
}
