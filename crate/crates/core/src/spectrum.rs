//! Parameter types shared by the rest of the crate.
//!
//! Everything here is validated on construction and immutable afterwards, so
//! downstream code can rely on the ordering and chart invariants without
//! re-checking them.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gap below which residue-type formulas are flagged as ill-conditioned.
pub const CONDITIONING_GAP: f64 = 1e-6;

/// Which of the two homogeneous spaces an object lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Complex projective space; energies increase.
    Cp,
    /// Its non-compact dual (positive sheet, the unit ball); energies decrease.
    Cq,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Cp => "CP",
            Kind::Cq => "CQ",
        })
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cp" => Ok(Kind::Cp),
            "cq" => Ok(Kind::Cq),
            other => Err(Error::InvalidParameter(format!("unknown manifold kind {other:?}"))),
        }
    }
}

/// Diagonal Hamiltonian energies plus inverse temperature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    kind: Kind,
    theta: Vec<f64>,
    rho: f64,
    ill_conditioned: bool,
}

impl Spectrum {
    /// Validates `theta` against the ordering contract of `kind`.
    ///
    /// CP requires `0 < θ_0 < … < θ_N`, CQ requires `θ_0 > … > θ_N > 0`.
    /// Energies are kept in input order; nothing is sorted.
    pub fn new(kind: Kind, theta: Vec<f64>, rho: f64) -> Result<Self> {
        if theta.len() < 2 {
            return Err(Error::TooFewLevels(theta.len()));
        }
        if let Some(i) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::OrderingViolation { kind, index: i });
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::NonPositiveRho(rho));
        }
        for i in 0..theta.len() {
            for j in i + 1..theta.len() {
                if theta[i] == theta[j] {
                    return Err(Error::DegenerateSpectrum { i, j });
                }
            }
        }
        let ordered = |a: f64, b: f64| match kind {
            Kind::Cp => a < b,
            Kind::Cq => a > b,
        };
        let lowest = match kind {
            Kind::Cp => 0,
            Kind::Cq => theta.len() - 1,
        };
        if theta[lowest] <= 0.0 {
            return Err(Error::OrderingViolation { kind, index: lowest });
        }
        if let Some(i) = theta.windows(2).position(|w| !ordered(w[0], w[1])) {
            return Err(Error::OrderingViolation { kind, index: i + 1 });
        }

        let scale = theta.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let min_gap = theta
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(f64::INFINITY, f64::min);
        let ill_conditioned = min_gap < CONDITIONING_GAP * scale;

        Ok(Self { kind, theta, rho, ill_conditioned })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Energies θ_0..θ_N in input order.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Complex dimension N (one less than the number of energies).
    pub fn dim(&self) -> usize {
        self.theta.len() - 1
    }

    /// True when the smallest gap is below `CONDITIONING_GAP` times the largest |θ|.
    pub fn is_ill_conditioned(&self) -> bool {
        self.ill_conditioned
    }

    pub(crate) fn expect_kind(&self, expected: Kind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::KindMismatch { expected, found: self.kind })
        }
    }
}

/// Free-function form of [`Spectrum::new`].
pub fn validate_spectrum(kind: Kind, theta: &[f64], rho: f64) -> Result<Spectrum> {
    Spectrum::new(kind, theta.to_vec(), rho)
}

/// Local coordinate ξ ∈ C^N on the single chart used for each kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    kind: Kind,
    xi: Vec<Complex64>,
}

impl ChartPoint {
    /// CQ points must lie in the open unit ball; CP points are unconstrained.
    pub fn new(kind: Kind, xi: Vec<Complex64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidParameter("chart point needs N >= 1 coordinates".into()));
        }
        if xi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("chart coordinates must be finite".into()));
        }
        let p = Self { kind, xi };
        if kind == Kind::Cq && p.norm_sq() >= 1.0 {
            return Err(Error::OutOfChart { norm_sq: p.norm_sq() });
        }
        Ok(p)
    }

    pub fn origin(kind: Kind, n: usize) -> Self {
        Self { kind, xi: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn xi(&self) -> &[Complex64] {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// s = ξ†ξ.
    pub fn norm_sq(&self) -> f64 {
        self.xi.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn expect_kind(&self, expected: Kind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::KindMismatch { expected, found: self.kind })
        }
    }
}

/// Rank, level, couplings and complex time of the quantum trace.
///
/// The Hamiltonian is `Σ_α μ_α E_αα + K c_{N+1}` with `μ_α = c_α + c_{N+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumParams {
    n: usize,
    k: u64,
    c: Vec<f64>,
    t: Complex64,
}

impl QuantumParams {
    /// `c` carries N+1 couplings, so N = `c.len() - 1`.
    pub fn new(k: u64, c: Vec<f64>, t: Complex64) -> Result<Self> {
        if c.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need N+1 >= 2 couplings, got {}",
                c.len()
            )));
        }
        let n = c.len() - 1;
        if k < n as u64 {
            return Err(Error::InvalidParameter(format!("level K = {k} must be >= N = {n}")));
        }
        if c.iter().any(|x| !x.is_finite()) || !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::InvalidParameter("couplings and time must be finite".into()));
        }
        Ok(Self { n, k, c, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn couplings(&self) -> &[f64] {
        &self.c
    }

    pub fn time(&self) -> Complex64 {
        self.t
    }

    /// c_{N+1}, the coupling that only contributes an overall phase.
    pub fn last_coupling(&self) -> f64 {
        self.c[self.n]
    }

    pub fn mu(&self) -> Vec<f64> {
        mu_vector(self)
    }

    /// |e^{-iμ_α T}| per mode.
    pub fn mode_moduli(&self) -> Vec<f64> {
        self.mu().iter().map(|&m| (m * self.t.im).exp()).collect()
    }

    /// All geometric mode sums converge absolutely.
    pub fn is_convergent(&self) -> bool {
        self.mode_moduli().iter().all(|&r| r < 1.0)
    }

    pub(crate) fn check_convergent(&self) -> Result<()> {
        match self.mode_moduli().iter().position(|&r| r.is_nan() || r >= 1.0) {
            None => Ok(()),
            Some(mode) => Err(Error::DivergentRegime {
                mode: mode + 1,
                modulus: self.mode_moduli()[mode],
            }),
        }
    }
}

/// μ_α = c_α + c_{N+1} for α = 1..N.
pub fn mu_vector(qp: &QuantumParams) -> Vec<f64> {
    let last = qp.last_coupling();
    qp.c[..qp.n].iter().map(|c| c + last).collect()
}

/// How a partition-function value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DhSum,
    DetForm,
    Residue,
    Contour,
    Quadrature,
    #[serde(rename = "montecarlo")]
    MonteCarlo,
    FockTruncated,
    Closed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::DhSum => "dh_sum",
            Method::DetForm => "det_form",
            Method::Residue => "residue",
            Method::Contour => "contour",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "montecarlo",
            Method::FockTruncated => "fock_truncated",
            Method::Closed => "closed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value together with the method that produced it and its error estimate.
///
/// `err` is zero for exact formulas, a refinement delta or certified bound for
/// deterministic numerics, and a standard error for Monte-Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionEstimate<V = f64> {
    pub value: V,
    pub method: Method,
    pub err: f64,
    pub samples: u64,
}

impl<V> PartitionEstimate<V> {
    pub fn exact(value: V, method: Method) -> Self {
        Self { value, method, err: 0.0, samples: 0 }
    }
}

/// Parameter file schema:
/// `{"kind":"cp"|"cq", "theta":[...], "rho":..., "quantum":{"k":..., "c":[...], "t":[re,im]}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumSection {
    pub k: u64,
    pub c: Vec<f64>,
    pub t: [f64; 2],
}

impl ParamFile {
    pub fn spectrum(&self) -> Result<Spectrum> {
        let kind = self.kind.ok_or_else(|| Error::InvalidParameter("missing \"kind\"".into()))?;
        let theta = self.theta.clone().ok_or_else(|| Error::InvalidParameter("missing \"theta\"".into()))?;
        let rho = self.rho.ok_or_else(|| Error::InvalidParameter("missing \"rho\"".into()))?;
        Spectrum::new(kind, theta, rho)
    }

    pub fn quantum_params(&self) -> Result<QuantumParams> {
        let q = self.quantum.as_ref().ok_or_else(|| Error::InvalidParameter("missing \"quantum\"".into()))?;
        QuantumParams::new(q.k, q.c.clone(), Complex64::new(q.t[0], q.t[1]))
    }
}
