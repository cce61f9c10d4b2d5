//! The tensor tower `ξ̂ = (ξ, ξ⊗ξ, ξ⊗ξ⊗ξ, …)` that embeds the unit ball in
//! l², truncated at a finite level with explicit geometric tail bounds.
//!
//! Level `m` is stored as a flat vector of length `N^m`, with
//! `ξ^{⊗m} = ξ ⊗ ξ^{⊗(m−1)}` and the first factor most significant.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::MetricCoefficients;
use crate::spectrum::{ChartPoint, Kind, Spectrum};

/// Default cap on `n_max · N^{n_max}`.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedEmbedding {
    base: ChartPoint,
    n_max: usize,
    levels: Vec<Vec<Complex64>>,
}

/// A truncated series next to its closed-form limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedValue {
    pub truncated: f64,
    pub exact: f64,
    /// Bound on `|exact − truncated|` (exact value of the tail for the norm series).
    pub tail_bound: f64,
}

impl TruncatedValue {
    pub fn truncation_error(&self) -> f64 {
        (self.exact - self.truncated).abs()
    }

    pub fn within_bound(&self) -> bool {
        self.truncation_error() <= self.tail_bound
    }
}

fn budget_need(n: usize, n_max: usize) -> Option<u64> {
    (n as u64).checked_pow(u32::try_from(n_max).ok()?)?.checked_mul(n_max as u64)
}

/// Tower up to `n_max` under the default budget.
pub fn embed(p: &ChartPoint, n_max: usize) -> Result<TruncatedEmbedding> {
    embed_with_budget(p, n_max, DEFAULT_BUDGET)
}

pub fn embed_with_budget(p: &ChartPoint, n_max: usize, budget: u64) -> Result<TruncatedEmbedding> {
    p.expect_kind(Kind::Cq)?;
    if p.norm_sq() >= 1.0 {
        return Err(Error::OutOfChart { norm_sq: p.norm_sq() });
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let needed = budget_need(p.dim(), n_max).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(Error::BudgetExhausted { budget, needed });
    }
    let xi = p.xi();
    let mut levels: Vec<Vec<Complex64>> = Vec::with_capacity(n_max);
    levels.push(xi.to_vec());
    for _ in 1..n_max {
        let prev = levels.last().expect("level 1 present");
        let next: Vec<Complex64> = xi.iter().flat_map(|&a| prev.iter().map(move |&b| a * b)).collect();
        levels.push(next);
    }
    Ok(TruncatedEmbedding { base: p.clone(), n_max, levels })
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

impl TruncatedEmbedding {
    pub fn base(&self) -> &ChartPoint {
        &self.base
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Level `m` (1-based), of length `N^m`.
    pub fn level(&self, m: usize) -> &[Complex64] {
        &self.levels[m - 1]
    }

    pub fn levels(&self) -> &[Vec<Complex64>] {
        &self.levels
    }

    /// `ξ̂†ξ̂` over the stored levels.
    pub fn truncated_norm_sq(&self) -> f64 {
        self.levels.iter().map(|l| norm_sq(l)).sum()
    }
}

/// `Σ_{m ≤ n_max} ‖ξ^{⊗m}‖²` from the stored entries against `s/(1−s)`; the
/// tail `s^{n_max+1}/(1−s)` is the exact remainder.
pub fn embed_norm_residual(e: &TruncatedEmbedding) -> TruncatedValue {
    let s = e.base.norm_sq();
    TruncatedValue {
        truncated: e.truncated_norm_sq(),
        exact: s / (1.0 - s),
        tail_bound: s.powi(e.n_max as i32 + 1) / (1.0 - s),
    }
}

/// `tr(Q̂Ĥ)` of the universal Hamiltonian over the stored levels.
///
/// Level `m` carries `Ĥ_m = ((m+1)θ_0 − m θ̃) ⊗ 1`, acting on the first
/// tensor factor, so it contributes `(m+1)θ_0 s^m − m ξ†θ̃ξ s^{m−1}`; the
/// level-0 block contributes `θ_0` and the whole sum is scaled by `1 − s`.
/// The limit is `(θ_0 − ξ†θ̃ξ)/(1−s)`, and the tail past `n_max` is bounded by
/// `(θ_0 + max θ̃) s^{M} (M + 1 + s/(1−s))` with `M = n_max + 1`.
pub fn universal_energy(e: &TruncatedEmbedding, spectrum: &Spectrum) -> Result<TruncatedValue> {
    spectrum.expect_kind(Kind::Cq)?;
    let n = e.base.dim();
    if spectrum.dim() != n {
        return Err(Error::InvalidParameter(format!("embedding has N = {n}, spectrum has N = {}", spectrum.dim())));
    }
    let theta0 = spectrum.theta()[0];
    let tilde = &spectrum.theta()[1..];
    let s = e.base.norm_sq();

    let mut inner = theta0;
    for (idx, level) in e.levels.iter().enumerate() {
        let m = (idx + 1) as f64;
        let block = level.len() / n;
        // ⟨ξ^{⊗m}| θ̃ ⊗ 1 |ξ^{⊗m}⟩ by the leading index of each entry
        let weighted: f64 = level.iter().enumerate().map(|(k, z)| tilde[k / block] * z.norm_sqr()).sum();
        inner += (m + 1.0) * theta0 * norm_sq(level) - m * weighted;
    }
    let truncated = (1.0 - s) * inner;

    let t: f64 = e.base.xi().iter().zip(tilde).map(|(z, th)| th * z.norm_sqr()).sum();
    let exact = (theta0 - t) / (1.0 - s);
    let big_m = (e.n_max + 1) as f64;
    let max_tilde = tilde.iter().cloned().fold(0.0, f64::max);
    let tail_bound = (theta0 + max_tilde) * s.powf(big_m) * (big_m + 1.0 + s / (1.0 - s));
    Ok(TruncatedValue { truncated, exact, tail_bound })
}

/// Column entries `∂(ξ^{⊗m})_I/∂ξ_β` for all β at multi-index `I`, from
/// prefix/suffix products over its digits (one product-rule insertion per slot).
fn jacobian_row(xi: &[Complex64], digits: &[usize], prefix: &mut Vec<Complex64>, out: &mut [Complex64]) {
    let m = digits.len();
    out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    prefix.clear();
    let mut acc = Complex64::new(1.0, 0.0);
    for &d in digits {
        prefix.push(acc);
        acc *= xi[d];
    }
    let mut suffix = Complex64::new(1.0, 0.0);
    for k in (0..m).rev() {
        out[digits[k]] += prefix[k] * suffix;
        suffix *= xi[digits[k]];
    }
}

/// Pullback of the Fubini-Study coefficients of the truncated projective space
/// along `ξ ↦ ξ̂`:
/// `G = (1+Ŝ)^{-1} [J†J − (J†ξ̂)(ξ̂†J)/(1+Ŝ)]`, `J = ∂ξ̂/∂ξ`, `Ŝ = ξ̂†ξ̂`.
///
/// `J` is never materialized: each entry of each level yields its N Jacobian
/// entries on the fly, so extra memory is O(N + n_max).
pub fn pullback_metric(e: &TruncatedEmbedding) -> Result<MetricCoefficients> {
    let xi = e.base.xi();
    let n = xi.len();
    let mut jtj = DMatrix::<Complex64>::zeros(n, n);
    let mut jt_xi = vec![Complex64::new(0.0, 0.0); n];
    let mut prefix = Vec::with_capacity(e.n_max);
    let mut row = vec![Complex64::new(0.0, 0.0); n];

    for (idx, level) in e.levels.iter().enumerate() {
        let m = idx + 1;
        let mut digits = vec![0usize; m];
        for (flat, &value) in level.iter().enumerate() {
            let mut rem = flat;
            for slot in (0..m).rev() {
                digits[slot] = rem % n;
                rem /= n;
            }
            jacobian_row(xi, &digits, &mut prefix, &mut row);
            for a in 0..n {
                let ca = row[a].conj();
                jt_xi[a] += ca * value;
                for b in 0..n {
                    jtj[(a, b)] += ca * row[b];
                }
            }
        }
    }

    let one_plus = 1.0 + e.truncated_norm_sq();
    let g = DMatrix::from_fn(n, n, |a, b| (jtj[(a, b)] - jt_xi[a] * jt_xi[b].conj() / one_plus) / one_plus);
    Ok(MetricCoefficients { g, spurious: 0.0 })
}
