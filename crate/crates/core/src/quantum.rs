//! Truncated Fock-space checks: the trace of `e^{-iTH}`, coherent-state
//! overlaps, the resolution of unity, and the Poisson resummation identity.
//!
//! Basis states are labelled by occupations `m_α ∈ [0, m_max]` of the N
//! modes. The remaining label fixed by K only contributes the overall phase
//! `e^{-iK c_{N+1} T}`, which is carried analytically.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::closed_forms::quantum_trace_closed;
use crate::error::{Error, Result};
use crate::spectrum::QuantumParams;

/// Default cap on the truncated basis size `(m_max+1)^N`.
pub const DEFAULT_BASIS_BUDGET: u64 = 1 << 24;

/// Cap on the work `q^N · D²` of the resolution-of-unity check.
pub const RESOLUTION_WORK_BUDGET: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    m_max: u64,
    modes: usize,
}

impl FockTruncation {
    pub fn new(m_max: u64, modes: usize) -> Result<Self> {
        Self::with_budget(m_max, modes, DEFAULT_BASIS_BUDGET)
    }

    pub fn with_budget(m_max: u64, modes: usize, budget: u64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("need at least one mode".into()));
        }
        let size = basis_size(m_max, modes).unwrap_or(u64::MAX);
        if size > budget {
            return Err(Error::BudgetExhausted { budget, needed: size });
        }
        Ok(Self { m_max, modes })
    }

    pub fn m_max(&self) -> u64 {
        self.m_max
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn basis_size(&self) -> u64 {
        basis_size(self.m_max, self.modes).expect("checked at construction")
    }
}

fn basis_size(m_max: u64, modes: usize) -> Option<u64> {
    m_max.checked_add(1)?.checked_pow(u32::try_from(modes).ok()?)
}

/// Truncated trace next to the closed form it approximates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockTrace {
    pub value: Complex64,
    pub closed: Complex64,
    /// Certified bound on the discarded occupations.
    pub tail_bound: f64,
    /// Allowance for floating-point error in the two evaluations.
    pub rounding: f64,
}

impl FockTrace {
    pub fn deviation(&self) -> f64 {
        (self.value - self.closed).norm()
    }
}

fn check_modes(qp: &QuantumParams, tr: &FockTruncation) -> Result<()> {
    if qp.n() != tr.modes() {
        return Err(Error::InvalidParameter(format!(
            "truncation has {} modes, parameters have N = {}",
            tr.modes(),
            qp.n()
        )));
    }
    Ok(())
}

fn overall_phase(qp: &QuantumParams) -> Complex64 {
    (-Complex64::i() * qp.k() as f64 * qp.last_coupling() * qp.time()).exp()
}

/// `Σ_{m=0}^{m_max} z^m` by direct accumulation of powers.
fn geometric_partial(z: Complex64, m_max: u64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for _ in 0..=m_max {
        sum += power;
        power *= z;
    }
    sum
}

/// Single-mode truncated trace `Σ_{m ≤ m_max} e^{-iμ_α T m}` for mode `alpha` (0-based).
pub fn single_mode_trace(qp: &QuantumParams, alpha: usize, m_max: u64) -> Complex64 {
    let z = (-Complex64::i() * qp.mu()[alpha] * qp.time()).exp();
    geometric_partial(z, m_max)
}

/// `e^{-iKc_{N+1}T} ∏_α Σ_{m ≤ m_max} e^{-iμ_α T m}`, checked against the
/// closed form.
///
/// With `r_α = |e^{-iμ_α T}|`, each mode's truncated sum has modulus at most
/// `(1−r^{M+1})/(1−r)` and its tail at most `r^{M+1}/(1−r)`, `M = m_max`. Expanding
/// the product gives the bound `|phase| ∏(1−r_α)^{-1} (1 − ∏(1 − r_α^{M+1}))`,
/// which is the exact tail modulus for a single mode with real `z`.
pub fn fock_trace_truncated(qp: &QuantumParams, tr: &FockTruncation) -> Result<FockTrace> {
    qp.check_convergent()?;
    check_modes(qp, tr)?;
    let phase = overall_phase(qp);
    let value = (0..qp.n()).map(|a| single_mode_trace(qp, a, tr.m_max())).product::<Complex64>() * phase;
    let closed = quantum_trace_closed(qp)?.value;

    let moduli = qp.mode_moduli();
    let exponent = tr.m_max().saturating_add(1) as f64;
    let inv: f64 = moduli.iter().map(|r| 1.0 / (1.0 - r)).product();
    let kept_ln: f64 = moduli.iter().map(|r| (-r.powf(exponent)).ln_1p()).sum();
    let tail_bound = phase.norm() * inv * -kept_ln.exp_m1();
    let rounding = 4.0 * (exponent + 1.0) * qp.n() as f64 * f64::EPSILON * closed.norm().max(value.norm());

    let out = FockTrace { value, closed, tail_bound, rounding };
    if out.deviation() > tail_bound + rounding {
        return Err(Error::CrossCheckFailed {
            what: "truncated Fock trace vs closed form",
            lhs: out.deviation(),
            rhs: tail_bound + rounding,
        });
    }
    Ok(out)
}

/// Brute-force sum of `e^{-iT E(m)}` over every basis state of the truncation,
/// with `E(m) = K c_{N+1} + Σ μ_α m_α`. Independent of the per-mode factorization.
pub fn fock_trace_enumerated(qp: &QuantumParams, tr: &FockTruncation) -> Result<Complex64> {
    qp.check_convergent()?;
    check_modes(qp, tr)?;
    let mu = qp.mu();
    let ground = qp.k() as f64 * qp.last_coupling();
    let minus_it = -Complex64::i() * qp.time();
    let side = tr.m_max() + 1;
    let mut occupation = vec![0u64; tr.modes()];
    let mut sum = Complex64::new(0.0, 0.0);
    for flat in 0..tr.basis_size() {
        let mut rem = flat;
        for slot in occupation.iter_mut().rev() {
            *slot = rem % side;
            rem /= side;
        }
        let energy = ground + mu.iter().zip(&occupation).map(|(m, &k)| m * k as f64).sum::<f64>();
        sum += (minus_it * energy).exp();
    }
    Ok(sum)
}

/// Truncated overlap kernel of two multi-periodic coherent states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub value: Complex64,
    /// Set when some mode has `φ_α ≡ φ'_α (mod 2π)`; that factor grows like
    /// `m_max + 1` and has no limit.
    pub divergent: bool,
}

/// `⟨φ'|φ⟩` truncated to `m ≤ m_max`: `(2π)^{-N} ∏_α Σ_m e^{im(φ_α−φ'_α)}`.
pub fn coherent_overlap(phi: &[f64], phi2: &[f64], m_max: u64) -> Result<Overlap> {
    if phi.len() != phi2.len() || phi.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "angle vectors must be non-empty and of equal length, got {} and {}",
            phi.len(),
            phi2.len()
        )));
    }
    let mut value = Complex64::new((2.0 * PI).powi(-(phi.len() as i32)), 0.0);
    let mut divergent = false;
    for (a, b) in phi.iter().zip(phi2) {
        let delta = a - b;
        let wrapped = delta.rem_euclid(2.0 * PI);
        divergent |= wrapped == 0.0;
        value *= geometric_partial(Complex64::from_polar(1.0, delta), m_max);
    }
    Ok(Overlap { value, divergent })
}

/// `max |R − 1|` where `R = Σ_nodes w |φ⟩⟨φ|` on the truncated basis, with `q`
/// equispaced nodes per angle and `|φ⟩ = (2π)^{-N/2} Σ_m e^{-imφ}|m⟩`.
///
/// The product rule integrates `e^{ikφ}` exactly for `|k| < q`, and entries
/// of `R` only involve `|k| ≤ m_max`; `q > 2 m_max` is required regardless.
pub fn resolution_of_unity_residual(n: usize, m_max: u64, q: u64) -> Result<f64> {
    if q <= m_max.saturating_mul(2) {
        return Err(Error::InsufficientNodes { q, m_max });
    }
    let tr = FockTruncation::new(m_max, n)?;
    let dim = tr.basis_size();
    let nodes = q.checked_pow(n as u32).unwrap_or(u64::MAX);
    let work = nodes.saturating_mul(dim.saturating_mul(dim));
    if work > RESOLUTION_WORK_BUDGET {
        return Err(Error::BudgetExhausted { budget: RESOLUTION_WORK_BUDGET, needed: work });
    }
    let dim = dim as usize;
    let side = m_max + 1;
    let step = 2.0 * PI / q as f64;
    // (2π/q)^N node weight times the (2π)^{-N} state normalization
    let weight = (q as f64).powi(-(n as i32));

    let mut r = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut ket = vec![Complex64::new(0.0, 0.0); dim];
    let mut angles = vec![0.0f64; n];
    for node in 0..nodes {
        let mut rem = node;
        for slot in angles.iter_mut().rev() {
            *slot = (rem % q) as f64 * step;
            rem /= q;
        }
        for (idx, entry) in ket.iter_mut().enumerate() {
            let mut rem = idx as u64;
            let mut phase = 0.0;
            for angle in angles.iter().rev() {
                phase -= (rem % side) as f64 * angle;
                rem /= side;
            }
            *entry = Complex64::from_polar(1.0, phase);
        }
        for i in 0..dim {
            let ki = ket[i] * weight;
            for j in 0..dim {
                r[i * dim + j] += ki * ket[j].conj();
            }
        }
    }
    let residual = (0..dim * dim)
        .map(|k| {
            let target = if k / dim == k % dim { 1.0 } else { 0.0 };
            (r[k] - target).norm()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}

/// Both sides of `Σ_m e^{imφ} f(m) = Σ_n ∫dp e^{ip(φ+2πn)} f(p)` for the
/// Gaussian `f(p) = e^{-p²/2σ²}`, with certified bounds on both truncations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Bound on the omitted `|m| > m_cut` terms.
    pub lhs_tail: f64,
    /// Bound on the omitted `|n| > n_images` terms.
    pub rhs_tail: f64,
}

/// Truncated Poisson resummation at angle `phi`.
///
/// The left side keeps `|m| ≤ m_cut`; the right side keeps `|n| ≤ n_images`
/// images `√(2π)σ e^{-σ²(φ+2πn)²/2}`. Both sums are real by symmetry.
pub fn poisson_resum_residual(sigma: f64, phi: f64, n_images: u64, m_cut: u64) -> Result<PoissonCheck> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("phi must be finite, got {phi}")));
    }
    if n_images == 0 || m_cut == 0 {
        return Err(Error::InvalidParameter("n_images and m_cut must be at least 1".into()));
    }
    let inv_two_var = 0.5 / (sigma * sigma);
    // smallest terms first
    let lhs = (1..=m_cut)
        .rev()
        .map(|m| {
            let m = m as f64;
            2.0 * (m * phi).cos() * (-m * m * inv_two_var).exp()
        })
        .sum::<f64>()
        + 1.0;

    let amp = (2.0 * PI).sqrt() * sigma;
    let image = |n: i64| amp * (-0.5 * sigma * sigma * (phi + 2.0 * PI * n as f64).powi(2)).exp();
    let mut images: Vec<f64> = (-(n_images as i64)..=n_images as i64).map(image).collect();
    images.sort_by(f64::total_cmp);
    let rhs: f64 = images.iter().sum();

    // Σ_{m>M} e^{-m²/2σ²} ≤ e^{-(M+1)²/2σ²} / (1 − e^{-(M+1)/σ²})
    let m1 = (m_cut + 1) as f64;
    let lhs_tail = 2.0 * (-m1 * m1 * inv_two_var).exp() / -(-m1 / (sigma * sigma)).exp_m1();
    // images beyond n_images sit at distance ≥ a = 2π(n_images+1) − |φ|
    let a = 2.0 * PI * (n_images + 1) as f64 - phi.abs();
    let rhs_tail = if a > 0.0 {
        let s2 = sigma * sigma;
        2.0 * amp * (-0.5 * s2 * a * a).exp() / -(-2.0 * PI * s2 * a).exp_m1()
    } else {
        f64::INFINITY
    };
    Ok(PoissonCheck { lhs, rhs, residual: (lhs - rhs).abs(), lhs_tail, rhs_tail })
}
