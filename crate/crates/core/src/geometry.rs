//! Projector charts, the (1,1)-form coefficients of `ω = tr(P dP∧dP)`, and
//! finite-difference checks of both.
//!
//! Wirtinger convention: `∂/∂ξ = (∂/∂Re ξ − i ∂/∂Im ξ)/2`. The coefficient
//! matrix `G` multiplies `dξ*_α ∧ dξ_β`; its overall sign is fixed so that
//! `G(0) = 1_N` for both kinds.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectrum::{ChartPoint, Kind, Spectrum};

pub type CMatrix = DMatrix<Complex64>;

/// Step sizes accepted by [`metric_fd`].
pub const FD_STEP_RANGE: (f64, f64) = (1e-7, 1e-3);

/// CQ points beyond this `|ξ|²` are refused by the finite-difference paths.
pub const FD_MAX_NORM_SQ: f64 = 0.99;

const IDENTITY_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A rank-one idempotent of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub kind: Kind,
    pub mat: CMatrix,
}

/// `η = diag(1, −1, …, −1)`.
pub fn eta(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| match (i == j, i) {
        (false, _) => c(0.0),
        (true, 0) => c(1.0),
        (true, _) => c(-1.0),
    })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

impl Projector {
    pub fn idempotence_residual(&self) -> f64 {
        max_abs(&(&self.mat * &self.mat - &self.mat))
    }

    /// `‖P† − P‖` for CP, `‖ηQ†η − Q‖` for CQ.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.mat.adjoint();
        match self.kind {
            Kind::Cp => max_abs(&(adj - &self.mat)),
            Kind::Cq => {
                let e = eta(self.mat.nrows());
                max_abs(&(&e * adj * &e - &self.mat))
            }
        }
    }

    pub fn trace_residual(&self) -> f64 {
        (self.mat.trace() - c(1.0)).norm()
    }

    /// Largest of the three defining-identity residuals.
    pub fn identity_residual(&self) -> f64 {
        self.idempotence_residual().max(self.hermiticity_residual()).max(self.trace_residual())
    }
}

/// `(1+ξ†ξ)^{-1} [[1, ξ†], [ξ, ξξ†]]`.
pub fn projector_cp(p: &ChartPoint) -> Result<Projector> {
    p.expect_kind(Kind::Cp)?;
    Ok(Projector { kind: Kind::Cp, mat: block_projector(p.xi(), 1.0) })
}

/// `(1−ξ†ξ)^{-1} [[1, −ξ†], [ξ, −ξξ†]]`.
pub fn projector_cq(p: &ChartPoint) -> Result<Projector> {
    p.expect_kind(Kind::Cq)?;
    if p.norm_sq() >= 1.0 {
        return Err(Error::OutOfChart { norm_sq: p.norm_sq() });
    }
    Ok(Projector { kind: Kind::Cq, mat: block_projector(p.xi(), -1.0) })
}

pub fn projector(p: &ChartPoint) -> Result<Projector> {
    match p.kind() {
        Kind::Cp => projector_cp(p),
        Kind::Cq => projector_cq(p),
    }
}

/// `(1 + σ ξ†ξ)^{-1} [[1, σξ†], [ξ, σξξ†]]`, σ = ±1. No chart check.
fn block_projector(xi: &[Complex64], sigma: f64) -> CMatrix {
    let n = xi.len();
    let s: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
    let scale = 1.0 / (1.0 + sigma * s);
    // column vector (1, ξ) times row (1, σξ†)
    CMatrix::from_fn(n + 1, n + 1, |i, j| {
        let left = if i == 0 { c(1.0) } else { xi[i - 1] };
        let right = if j == 0 { c(1.0) } else { xi[j - 1].conj() * sigma };
        left * right * scale
    })
}

/// Coefficient matrix `G` of `ω = Σ G_{αβ} dξ*_α ∧ dξ_β` with the off-type
/// residue found by the finite-difference extractor (zero for the analytic path).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCoefficients {
    pub g: CMatrix,
    pub spurious: f64,
}

impl MetricCoefficients {
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(self.g.adjoint() - &self.g))
    }

    /// Max-norm distance between two coefficient matrices.
    pub fn distance(&self, other: &MetricCoefficients) -> f64 {
        max_abs(&(&self.g - &other.g))
    }

    /// Real part of `det G` (G is Hermitian, so the imaginary part is roundoff).
    pub fn determinant(&self) -> f64 {
        self.g.clone().determinant().re
    }
}

/// Closed-form coefficients from the chart expressions:
/// CP `G = (1+s)^{-1}(1 − ξξ†/(1+s))`, CQ `G = (1−s)^{-1}(1 + ξξ†/(1−s))`.
pub fn metric_analytic(p: &ChartPoint) -> Result<MetricCoefficients> {
    let s = p.norm_sq();
    let sigma = match p.kind() {
        Kind::Cp => 1.0,
        Kind::Cq => {
            if s >= 1.0 {
                return Err(Error::OutOfChart { norm_sq: s });
            }
            -1.0
        }
    };
    Ok(MetricCoefficients { g: analytic_g(p.xi(), sigma), spurious: 0.0 })
}

fn analytic_g(xi: &[Complex64], sigma: f64) -> CMatrix {
    let n = xi.len();
    let s: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
    let d = 1.0 + sigma * s;
    CMatrix::from_fn(n, n, |a, b| {
        let delta = if a == b { 1.0 } else { 0.0 };
        (c(delta) - xi[a] * xi[b].conj() * (sigma / d)) / d
    })
}

fn check_step(h: f64) -> Result<()> {
    if !(h >= FD_STEP_RANGE.0 && h <= FD_STEP_RANGE.1) {
        return Err(Error::InvalidParameter(format!(
            "step {h} outside [{:e}, {:e}]",
            FD_STEP_RANGE.0, FD_STEP_RANGE.1
        )));
    }
    Ok(())
}

/// Rejects CQ points where a step of size `h` in any coordinate could leave the ball.
fn check_fd_point(p: &ChartPoint, h: f64) -> Result<()> {
    if p.kind() == Kind::Cq {
        let s = p.norm_sq();
        if s >= 1.0 {
            return Err(Error::OutOfChart { norm_sq: s });
        }
        if s > FD_MAX_NORM_SQ {
            return Err(Error::NearBoundary { norm_sq: s });
        }
        let radius = s.sqrt();
        if (radius + h) * (radius + h) >= 1.0 {
            return Err(Error::StepTooLarge { h });
        }
    }
    Ok(())
}

fn shifted(xi: &[Complex64], index: usize, delta: Complex64) -> Vec<Complex64> {
    let mut out = xi.to_vec();
    out[index] += delta;
    out
}

/// Holomorphic and antiholomorphic Wirtinger derivatives of `f` along every
/// coordinate, by central differences of step `h`.
fn wirtinger<F>(xi: &[Complex64], h: f64, f: F) -> (Vec<CMatrix>, Vec<CMatrix>)
where
    F: Fn(&[Complex64]) -> CMatrix,
{
    let mut holo = Vec::with_capacity(xi.len());
    let mut anti = Vec::with_capacity(xi.len());
    for a in 0..xi.len() {
        let dx = (f(&shifted(xi, a, c(h))) - f(&shifted(xi, a, c(-h)))) / c(2.0 * h);
        let i_h = Complex64::new(0.0, h);
        let dy = (f(&shifted(xi, a, i_h)) - f(&shifted(xi, a, -i_h))) / c(2.0 * h);
        let i = Complex64::i();
        holo.push((&dx - &dy * i) * c(0.5));
        anti.push((&dx + &dy * i) * c(0.5));
    }
    (holo, anti)
}

/// `G` extracted from `tr(P dP∧dP)` by central differences of the projector.
///
/// `G_{αβ} = σ tr(P(∂̄_α P ∂_β P − ∂_β P ∂̄_α P))` with σ = +1 (CP), −1 (CQ).
/// `spurious` is the largest (2,0) or (0,2) coefficient, which vanishes for a
/// (1,1)-form.
pub fn metric_fd(p: &ChartPoint, h: f64) -> Result<MetricCoefficients> {
    check_step(h)?;
    check_fd_point(p, h)?;
    let (sigma, orientation) = match p.kind() {
        Kind::Cp => (1.0, 1.0),
        Kind::Cq => (-1.0, -1.0),
    };
    let base = block_projector(p.xi(), sigma);
    let (holo, anti) = wirtinger(p.xi(), h, |xi| block_projector(xi, sigma));

    let n = p.dim();
    let two_form = |x: &CMatrix, y: &CMatrix| (&base * (x * y - y * x)).trace();
    let g = CMatrix::from_fn(n, n, |a, b| two_form(&anti[a], &holo[b]) * orientation);

    let mut spurious = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            spurious = spurious.max(two_form(&holo[a], &holo[b]).norm());
            spurious = spurious.max(two_form(&anti[a], &anti[b]).norm());
        }
    }
    Ok(MetricCoefficients { g, spurious })
}

/// Least-squares slope of `log ‖G_fd(h) − G_analytic‖` against `log h`.
pub fn fd_convergence_order(p: &ChartPoint, steps: &[f64]) -> Result<f64> {
    let exact = metric_analytic(p)?;
    let mut pts = Vec::with_capacity(steps.len());
    for &h in steps {
        let err = metric_fd(p, h)?.distance(&exact);
        pts.push((h.ln(), err.max(f64::MIN_POSITIVE).ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// `(1 ± s)^{-(N+1)}` for CP / CQ.
pub fn volume_density_closed(p: &ChartPoint) -> Result<f64> {
    let s = p.norm_sq();
    let nplus = p.dim() as i32 + 1;
    match p.kind() {
        Kind::Cp => Ok((1.0 + s).powi(-nplus)),
        Kind::Cq if s < 1.0 => Ok((1.0 - s).powi(-nplus)),
        Kind::Cq => Err(Error::OutOfChart { norm_sq: s }),
    }
}

/// `det G`, checked against the closed-form density to relative 1e-12.
pub fn volume_density(p: &ChartPoint) -> Result<f64> {
    let det = metric_analytic(p)?.determinant();
    let closed = volume_density_closed(p)?;
    if (det - closed).abs() > IDENTITY_TOL * closed.abs() {
        return Err(Error::CrossCheckFailed { what: "det G vs closed-form volume density", lhs: det, rhs: closed });
    }
    Ok(det)
}

/// `max |∂_γ G_{αβ} − ∂_β G_{αγ}|` over all index triples, by central
/// differences of the analytic coefficients. This is the (2,1) part of `dω`;
/// the (1,2) part is its conjugate.
pub fn kahler_closedness_residual(p: &ChartPoint, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= FD_STEP_RANGE.1) {
        return Err(Error::InvalidParameter(format!("step {h} outside (0, {:e}]", FD_STEP_RANGE.1)));
    }
    check_fd_point(p, h)?;
    let sigma = match p.kind() {
        Kind::Cp => 1.0,
        Kind::Cq => -1.0,
    };
    let (holo, _) = wirtinger(p.xi(), h, |xi| analytic_g(xi, sigma));
    let n = p.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                worst = worst.max((holo[g][(a, b)] - holo[b][(a, g)]).norm());
            }
        }
    }
    Ok(worst)
}

/// `tr(P h)` with `h = diag(θ)`, computed both by matrix trace and by the
/// rational chart expression, which must agree to 1e-12.
pub fn hamiltonian_trace(p: &ChartPoint, s: &Spectrum) -> Result<f64> {
    if p.kind() != s.kind() {
        return Err(Error::KindMismatch { expected: s.kind(), found: p.kind() });
    }
    if p.dim() != s.dim() {
        return Err(Error::InvalidParameter(format!(
            "chart point has N = {}, spectrum has N = {}",
            p.dim(),
            s.dim()
        )));
    }
    let proj = projector(p)?;
    let theta = s.theta();
    let by_trace: f64 = (0..theta.len()).map(|k| (proj.mat[(k, k)] * theta[k]).re).sum();

    let sigma = match s.kind() {
        Kind::Cp => 1.0,
        Kind::Cq => -1.0,
    };
    let weighted: f64 = p.xi().iter().zip(&theta[1..]).map(|(z, t)| t * z.norm_sqr()).sum();
    let closed = (theta[0] + sigma * weighted) / (1.0 + sigma * p.norm_sq());

    if (by_trace - closed).abs() > IDENTITY_TOL * closed.abs().max(1.0) {
        return Err(Error::CrossCheckFailed { what: "tr(Ph) vs chart expression", lhs: by_trace, rhs: closed });
    }
    Ok(closed)
}

/// Random chart point: Gaussian direction, with `|ξ|²` uniform in
/// `[0, max_norm_sq]` for CQ and standard complex Gaussian entries for CP.
pub fn sample_chart_point<R: Rng + ?Sized>(kind: Kind, n: usize, max_norm_sq: f64, rng: &mut R) -> ChartPoint {
    let mut xi: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    if kind == Kind::Cq {
        let norm: f64 = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let target = (rng.random::<f64>() * max_norm_sq).sqrt();
        for z in &mut xi {
            *z *= target / norm;
        }
    }
    ChartPoint::new(kind, xi).expect("sampled point lies inside the chart")
}
