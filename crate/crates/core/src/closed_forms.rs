//! Exact expressions: fixed-point (localization) sums, determinant forms,
//! the hyperbolic closed form, the quantum trace, and the two auxiliary
//! identities the derivations lean on.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{compensated_sum, log_det};
use crate::spectrum::{Kind, Method, PartitionEstimate, QuantumParams, Spectrum};

/// Relative agreement demanded between a closed form and its determinant form
/// inside [`z_cqn_closed`].
const DET_CROSS_CHECK: f64 = 1e-8;

/// Fixed-point sum for CP^N:
/// `Z = Σ_α e^{-ρθ_α} / (ρ^N ∏_{β≠α}(θ_β−θ_α))`.
///
/// Terms alternate in sign through the gap products, so they are accumulated
/// largest-Boltzmann-factor first with compensated summation. Cancellation
/// still costs roughly a factor `N!/(ρ·min gap)^N` in relative accuracy.
pub fn z_cpn_dh(s: &Spectrum) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cp)?;
    let theta = s.theta();
    let rho = s.rho();
    let n = s.dim() as i32;

    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&a, &b| theta[a].total_cmp(&theta[b]));

    let terms = order.iter().map(|&a| {
        let gaps: f64 = theta
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != a)
            .map(|(_, &tb)| tb - theta[a])
            .product();
        (-rho * theta[a]).exp() / (rho.powi(n) * gaps)
    });
    Ok(PartitionEstimate::exact(compensated_sum(terms), Method::DhSum))
}

/// Builds the row-major `(N+1)×(N+1)` matrix whose first row is `first` and
/// whose remaining rows are θ^0..θ^{N-1}.
fn bordered_vandermonde(first: &[f64], theta: &[f64]) -> Vec<f64> {
    let m = theta.len();
    let mut out = Vec::with_capacity(m * m);
    out.extend_from_slice(first);
    for power in 0..m as i32 - 1 {
        out.extend(theta.iter().map(|t| t.powi(power)));
    }
    out
}

fn vandermonde(theta: &[f64]) -> Vec<f64> {
    let m = theta.len();
    (0..m as i32).flat_map(|p| theta.iter().map(move |t| t.powi(p))).collect()
}

/// `det(num) / det(den) · prefactor`, via log-determinants with sign tracking.
fn det_ratio(num: Vec<f64>, den: Vec<f64>, m: usize, ln_prefactor: f64, sign: f64) -> Result<f64> {
    let d = log_det(den, m).ok_or(Error::DegenerateSpectrum { i: 0, j: 0 })?;
    match log_det(num, m) {
        None => Ok(0.0),
        Some(nu) => Ok(sign * nu.sign * d.sign * (nu.ln_abs - d.ln_abs + ln_prefactor).exp()),
    }
}

/// Determinant form of the CP^N partition function: the fixed-point sum
/// written as a bordered Vandermonde determinant over the full Vandermonde,
/// divided by ρ^N.
pub fn z_cpn_det(s: &Spectrum) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cp)?;
    let theta = s.theta();
    let rho = s.rho();
    let boltzmann: Vec<f64> = theta.iter().map(|t| (-rho * t).exp()).collect();
    let m = theta.len();
    let value = det_ratio(
        bordered_vandermonde(&boltzmann, theta),
        vandermonde(theta),
        m,
        -(s.dim() as f64) * rho.ln(),
        1.0,
    )?;
    Ok(PartitionEstimate::exact(value, Method::DetForm))
}

/// Determinant form for CQ^N: first row `(e^{-ρθ_0}, 0, …, 0)`, prefactor `(−1)^N/ρ^N`.
pub fn z_cqn_det(s: &Spectrum) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cq)?;
    let theta = s.theta();
    let rho = s.rho();
    let mut first = vec![0.0; theta.len()];
    first[0] = (-rho * theta[0]).exp();
    let sign = if s.dim().is_multiple_of(2) { 1.0 } else { -1.0 };
    let value = det_ratio(
        bordered_vandermonde(&first, theta),
        vandermonde(theta),
        theta.len(),
        -(s.dim() as f64) * rho.ln(),
        sign,
    )?;
    Ok(PartitionEstimate::exact(value, Method::DetForm))
}

/// Closed form for CQ^N: `e^{-ρθ_0} / ∏_{α≥1} ρ(θ_0−θ_α)`.
///
/// Cross-checked against [`z_cqn_det`] for well-conditioned spectra.
pub fn z_cqn_closed(s: &Spectrum) -> Result<PartitionEstimate> {
    s.expect_kind(Kind::Cq)?;
    let theta = s.theta();
    let rho = s.rho();
    let ln_den: f64 = theta[1..].iter().map(|t| (rho * (theta[0] - t)).ln()).sum();
    let value = (-rho * theta[0] - ln_den).exp();

    if !s.is_ill_conditioned() {
        let det = z_cqn_det(s)?.value;
        if (det - value).abs() > DET_CROSS_CHECK * value.abs() {
            return Err(Error::CrossCheckFailed {
                what: "CQ closed form vs determinant form",
                lhs: value,
                rhs: det,
            });
        }
    }
    Ok(PartitionEstimate::exact(value, Method::Closed))
}

/// Exact quantum trace `e^{-iKc_{N+1}T} / ∏_α (1 − e^{-iμ_α T})`.
///
/// Only defined here where every mode sum converges absolutely; real `T`
/// is rejected rather than regularized.
pub fn quantum_trace_closed(qp: &QuantumParams) -> Result<PartitionEstimate<Complex64>> {
    qp.check_convergent()?;
    let i = Complex64::i();
    let t = qp.time();
    let phase = (-i * qp.k() as f64 * qp.last_coupling() * t).exp();
    let den: Complex64 = qp.mu().iter().map(|&m| Complex64::new(1.0, 0.0) - (-i * m * t).exp()).product();
    Ok(PartitionEstimate::exact(phase / den, Method::Closed))
}

fn check_distinct(theta: &[f64]) -> Result<()> {
    for i in 0..theta.len() {
        for j in i + 1..theta.len() {
            if theta[i] == theta[j] {
                return Err(Error::DegenerateSpectrum { i, j });
            }
        }
    }
    Ok(())
}

/// `|LHS − RHS|` for `Σ_{α=1}^{N} 1/∏_{β≠α}(θ_β−θ_α) = −1/∏_{β=1}^{N}(θ_β−θ_0)`,
/// with β running over 0..N.
pub fn vandermonde_identity_residual(theta: &[f64]) -> Result<f64> {
    if theta.len() < 2 {
        return Err(Error::TooFewLevels(theta.len()));
    }
    check_distinct(theta)?;
    let lhs = compensated_sum((1..theta.len()).map(|a| {
        let gaps: f64 = (0..theta.len()).filter(|&b| b != a).map(|b| theta[b] - theta[a]).product();
        1.0 / gaps
    }));
    let rhs = -1.0 / theta[1..].iter().map(|t| t - theta[0]).product::<f64>();
    Ok((lhs - rhs).abs())
}

/// Exact version of [`vandermonde_identity_residual`]; returns `LHS − RHS`,
/// which is zero exactly when the identity holds.
pub fn vandermonde_identity_residual_exact(theta: &[BigRational]) -> Result<BigRational> {
    if theta.len() < 2 {
        return Err(Error::TooFewLevels(theta.len()));
    }
    for i in 0..theta.len() {
        for j in i + 1..theta.len() {
            if theta[i] == theta[j] {
                return Err(Error::DegenerateSpectrum { i, j });
            }
        }
    }
    let mut lhs = BigRational::zero();
    for a in 1..theta.len() {
        let mut gaps = BigRational::one();
        for b in (0..theta.len()).filter(|&b| b != a) {
            gaps *= &theta[b] - &theta[a];
        }
        lhs += gaps.recip();
    }
    let mut rhs_den = BigRational::one();
    for t in &theta[1..] {
        rhs_den *= t - &theta[0];
    }
    Ok(lhs + rhs_den.recip())
}

/// Integer energies lifted to exact rationals.
pub fn rationals_from_integers(theta: &[i64]) -> Vec<BigRational> {
    theta.iter().map(|&t| BigRational::from_integer(BigInt::from(t))).collect()
}

/// Result of the Fourier-series check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierSum {
    /// Symmetric partial sum with ±n terms paired.
    pub partial: Complex64,
    /// `i e^{-iφε} / (1 − e^{-iφ})`.
    pub closed: Complex64,
    /// `e^{i(1/2−ε)φ} / (2 sin(φ/2))`.
    pub alternate: Complex64,
    pub residual: f64,
}

/// Partial sums of `Σ_n e^{i2nπε}/(2nπ+φ)` for `|n| ≤ m`, compared with its closed form.
///
/// The raw series converges only conditionally (terms ~ 1/n). Pairing n with
/// −n gives a partial sum whose tail is O(1/m); the pairs are added smallest
/// first.
pub fn fourier_series_sum(phi: f64, eps: f64, m: u64) -> Result<FourierSum> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0,1)")));
    }
    let half_sin = (phi / 2.0).sin();
    if !phi.is_finite() || half_sin.abs() < 1e-15 {
        return Err(Error::SingularPhi(phi));
    }

    let i = Complex64::i();
    let term = |n: f64| (i * 2.0 * PI * n * eps).exp() / (2.0 * PI * n + phi);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for n in (1..=m).rev() {
        let nf = n as f64;
        let pair = term(nf) + term(-nf);
        // Kahan on each component
        let y = pair - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    let partial = acc + 1.0 / phi;

    let closed = i * (-i * phi * eps).exp() / (1.0 - (-i * phi).exp());
    let alternate = (i * (0.5 - eps) * phi).exp() / (2.0 * half_sin);
    Ok(FourierSum { partial, closed, alternate, residual: (partial - closed).norm() })
}
