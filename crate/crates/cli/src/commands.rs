//! One function per subcommand, plus the row builders that `suite` reuses.

use std::f64::consts::PI;

use localize::closed_forms::{fourier_series_sum, z_cpn_det, z_cpn_dh, z_cqn_closed, z_cqn_det};
use localize::embedding::{embed, embed_norm_residual, pullback_metric, universal_energy};
use localize::geometry::{
    fd_convergence_order, hamiltonian_trace, kahler_closedness_residual, metric_analytic, metric_fd, projector,
    sample_chart_point, volume_density_closed,
};
use localize::integrators::rng::stream;
use localize::integrators::{
    z_cpn_contour, z_cpn_montecarlo, z_cpn_quadrature, z_cpn_residue, z_cqn_exponential_mc, z_cqn_quadrature,
    IntegratorConfig,
};
use localize::quantum::{
    fock_trace_enumerated, fock_trace_truncated, poisson_resum_residual, resolution_of_unity_residual, FockTruncation,
};
use localize::{ChartPoint, Error, Kind, PartitionEstimate, QuantumParams, Spectrum};
use num_complex::Complex64;
use serde_json::json;

use crate::args::{parse_complex_list, parse_time, ConfigFile, EmbedArgs, GeometryArgs, PartitionArgs, QuantumArgs};
use crate::report::{Row, RunReport, Tolerance};
use crate::CliError;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_CONTOUR_TOL: f64 = 1e-4;
pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_STEP: f64 = 1e-5;
pub const CLOSEDNESS_STEP: f64 = 1e-4;
pub const DEFAULT_MMAX: u64 = 40;
pub const DEFAULT_NMAX: usize = 20;

/// Largest `|ξ|²` sampled for CQ geometry checks.
pub const CQ_SAMPLE_MAX: f64 = 0.9;

pub const WKB_NOTE: &str = "The leading-order stationary-phase evaluation of the trace is not reproduced numerically; \
its endpoint, the closed-form trace, is checked against truncated Fock sums instead.";

/// Rows that could not be produced go to the notes instead.
#[derive(Default)]
pub struct Rows {
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl Rows {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records an estimate, or a note when the method does not apply.
    fn push_estimate<F>(&mut self, label: &str, est: localize::Result<PartitionEstimate>, build: F) -> Result<(), CliError>
    where
        F: FnOnce(PartitionEstimate) -> Row,
    {
        match est {
            Ok(e) => self.rows.push(build(e)),
            Err(err @ (Error::InvalidParameter(_) | Error::WeightOverflow { .. } | Error::TailDominates { .. } | Error::BudgetExhausted { .. })) => {
                self.notes.push(format!("{label} skipped: {err}"))
            }
            Err(Error::CrossCheckFailed { what, lhs, rhs }) => {
                self.rows.push(Row::new(label, what, lhs, None, "internal cross-check", rhs, Tolerance::relative(0.0)))
            }
            Err(other) => return Err(other.into()),
        }
        Ok(())
    }
}

fn quantity(s: &Spectrum) -> String {
    format!("Z[{} N={} rho={}]", s.kind(), s.dim(), s.rho())
}

/// CP: fixed-point sum, determinant, residues, contour, quadrature, Monte-Carlo.
/// CQ: closed form, determinant, quadrature, importance-sampled Monte-Carlo.
pub fn partition_rows(s: &Spectrum, cfg: &IntegratorConfig, contour_tol: f64) -> Result<Rows, CliError> {
    let mut out = Rows::new();
    let q = quantity(s);
    if s.is_ill_conditioned() {
        out.notes.push("spectrum is ill-conditioned: adjacent gaps below 1e-6 of max|θ|".into());
    }
    match s.kind() {
        Kind::Cp => {
            let dh = z_cpn_dh(s)?;
            let det = z_cpn_det(s)?;
            let res = z_cpn_residue(s)?;
            out.rows.push(Row::new(&q, "dh_sum", dh.value, Some(0.0), "det_form", det.value, Tolerance::relative(1e-10)));
            out.rows.push(Row::new(&q, "det_form", det.value, Some(0.0), "residue", res.value, Tolerance::relative(1e-10)));
            out.rows.push(Row::new(&q, "residue", res.value, Some(0.0), "dh_sum", dh.value, Tolerance::relative(1e-10)));
            let contour_cfg = IntegratorConfig { tol: contour_tol, ..*cfg };
            out.push_estimate("contour", z_cpn_contour(s, &contour_cfg), |e| {
                Row::new(&q, "contour", e.value, Some(e.err), "residue", res.value, Tolerance::certified(e.err + 1e-12 * res.value.abs()))
            })?;
            out.push_estimate("quadrature", z_cpn_quadrature(s, cfg), |e| {
                Row::new(&q, "quadrature", e.value, Some(e.err), "dh_sum", dh.value, Tolerance::relative_within_err(1e-6))
            })?;
            out.push_estimate("montecarlo", z_cpn_montecarlo(s, cfg), |e| {
                Row::new(&q, "montecarlo", e.value, Some(e.err), "dh_sum", dh.value, Tolerance::sigma(3.0))
            })?;
        }
        Kind::Cq => {
            let closed = z_cqn_closed(s)?;
            let det = z_cqn_det(s)?;
            out.rows.push(Row::new(&q, "closed", closed.value, Some(0.0), "det_form", det.value, Tolerance::relative(1e-10)));
            out.push_estimate("quadrature", z_cqn_quadrature(s, cfg), |e| {
                Row::new(&q, "quadrature", e.value, Some(e.err), "closed", closed.value, Tolerance::relative(1e-8))
            })?;
            out.push_estimate("montecarlo", z_cqn_exponential_mc(s, cfg), |e| {
                Row::new(&q, "montecarlo", e.value, Some(e.err), "closed", closed.value, Tolerance::sigma(3.0))
            })?;
        }
    }
    Ok(out)
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

fn required<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("missing --{name}")))
}

pub fn cmd_partition(args: &PartitionArgs, file: &ConfigFile) -> Result<RunReport, CliError> {
    let kind = required(pick(&args.kind, &file.kind), "kind")?;
    let theta = required(pick(&args.theta, &file.theta), "theta")?;
    let rho = required(pick(&args.rho, &file.rho), "rho")?;
    let defaults = IntegratorConfig::default();
    let cfg = IntegratorConfig {
        tol: pick(&args.tol, &file.tol).unwrap_or(defaults.tol),
        max_evals: pick(&args.max_evals, &file.max_evals).unwrap_or(defaults.max_evals),
        seed: pick(&args.seed, &file.seed).unwrap_or(defaults.seed),
        lambda_cutoff: pick(&args.lambda_cutoff, &file.lambda_cutoff).unwrap_or(defaults.lambda_cutoff),
        samples: pick(&args.samples, &file.samples).unwrap_or(DEFAULT_SAMPLES),
    }
    .validate()?;
    let contour_tol = pick(&args.contour_tol, &file.contour_tol).unwrap_or(DEFAULT_CONTOUR_TOL);
    let s = Spectrum::new(kind, theta.clone(), rho)?;

    let mut report = RunReport::new(
        "partition",
        json!({"kind": kind, "theta": theta, "rho": rho, "config": cfg, "contour_tol": contour_tol}),
        cfg.seed,
    );
    let rows = partition_rows(&s, &cfg, contour_tol)?;
    report.rows = rows.rows;
    report.notes = rows.notes;
    Ok(report)
}

/// A generic point with `|ξ|² = 1/2`, used to measure the FD order.
pub fn order_probe(kind: Kind, n: usize) -> ChartPoint {
    let r = (0.5 / n as f64).sqrt();
    let xi = (0..n).map(|k| Complex64::from_polar(r, 0.7 + 1.3 * k as f64)).collect();
    ChartPoint::new(kind, xi).expect("probe lies inside the ball")
}

/// Closedness step: `CLOSEDNESS_STEP`, shrunk by `(1 − s)²` near the CQ
/// boundary, where third derivatives of `G` grow like `(1 − s)^{-5}`.
pub fn closedness_step(p: &ChartPoint) -> f64 {
    match p.kind() {
        Kind::Cp => CLOSEDNESS_STEP,
        Kind::Cq => CLOSEDNESS_STEP * (1.0 - p.norm_sq()).powi(2),
    }
}

/// Worst-case geometry rows over `points`.
pub fn geometry_rows(kind: Kind, points: &[ChartPoint], h: f64) -> Result<Rows, CliError> {
    let first = points.first().ok_or_else(|| CliError::Input("no chart points".into()))?;
    let n = first.dim();
    let tag = format!("{kind} N={n}");
    let fd_tol = match kind {
        Kind::Cp => 1e-6,
        Kind::Cq => 1e-5,
    };

    let mut proj = 0.0f64;
    let mut fd_dist = 0.0f64;
    let mut spurious = 0.0f64;
    let mut volume = 0.0f64;
    let mut closed = 0.0f64;
    for p in points {
        proj = proj.max(projector(p)?.identity_residual());
        let analytic = metric_analytic(p)?;
        let fd = metric_fd(p, h)?;
        fd_dist = fd_dist.max(fd.distance(&analytic));
        spurious = spurious.max(fd.spurious);
        let det = analytic.determinant();
        let vol = volume_density_closed(p)?;
        volume = volume.max((det - vol).abs() / vol);
        closed = closed.max(kahler_closedness_residual(p, closedness_step(p))?);
    }

    let mut out = Rows::new();
    out.rows.push(Row::residual(format!("projector identities [{tag}]"), "projector", proj, "P²=P, (η-)Hermitian, tr=1", 1e-12));
    let g = metric_analytic(first)?.g[(0, 0)];
    let g_fd = metric_fd(first, h)?.g[(0, 0)];
    out.rows.push(Row::new(format!("G_11 at first point [{tag}]"), "metric_analytic", g, None, "metric_fd", g_fd, Tolerance::absolute(fd_tol)));
    out.rows.push(Row::residual(format!("max |G_fd − G| [{tag}]"), "metric_fd", fd_dist, "metric_analytic", fd_tol));
    let order = fd_convergence_order(&order_probe(kind, n), &[1e-3, 1e-4, 1e-5])?;
    out.rows.push(Row::new(format!("fd order [{tag}]"), "metric_fd", order, None, "central differences", 2.0, Tolerance::absolute(0.2)));
    let noise = fd_dist.max(1e-10);
    out.rows.push(Row::residual(format!("(2,0)+(0,2) part [{tag}]"), "metric_fd", spurious, "10 × FD noise floor", 10.0 * noise));
    out.rows.push(Row::residual(format!("det G vs volume density [{tag}]"), "metric_analytic", volume, "(1±s)^-(N+1)", 1e-12));
    out.rows.push(Row::residual(format!("dω (2,1) part [{tag}]"), "central differences", closed, "closedness", 1e-5));
    Ok(out)
}

pub fn sample_points(kind: Kind, n: usize, count: usize, seed: u64) -> Vec<ChartPoint> {
    let mut rng = stream(seed, 0);
    (0..count).map(|_| sample_chart_point(kind, n, CQ_SAMPLE_MAX, &mut rng)).collect()
}

pub fn cmd_geometry(args: &GeometryArgs, file: &ConfigFile) -> Result<RunReport, CliError> {
    let kind = required(pick(&args.kind, &file.kind), "kind")?;
    let seed = pick(&args.seed, &file.seed).unwrap_or(0);
    let h = pick(&args.h, &file.h).unwrap_or(DEFAULT_STEP);
    let at = pick(&args.at, &file.at);
    let points = match &at {
        Some(raw) => {
            let xi = parse_complex_list(raw)?;
            if let Some(n) = pick(&args.n, &file.n) {
                if n != xi.len() {
                    return Err(CliError::Input(format!("--n {n} but --at has {} coordinates", xi.len())));
                }
            }
            vec![ChartPoint::new(kind, xi)?]
        }
        None => {
            let n = required(pick(&args.n, &file.n), "n")?;
            if n == 0 {
                return Err(CliError::Input("--n must be at least 1".into()));
            }
            let count = pick(&args.points, &file.points).unwrap_or(DEFAULT_POINTS);
            if count == 0 {
                return Err(CliError::Input("--points must be at least 1".into()));
            }
            sample_points(kind, n, count, seed)
        }
    };
    let mut report = RunReport::new(
        "geometry",
        json!({"kind": kind, "n": points[0].dim(), "points": points.len(), "at": at, "h": h}),
        seed,
    );
    let rows = geometry_rows(kind, &points, h)?;
    report.rows = rows.rows;
    report.notes = rows.notes;
    Ok(report)
}

/// Trace, factorization, resolution-of-unity and Poisson rows.
pub fn quantum_rows(qp: &QuantumParams, m_max: u64) -> Result<Rows, CliError> {
    let mut out = Rows::new();
    let tag = format!("N={} m_max={m_max}", qp.n());
    let tr = FockTruncation::new(m_max, qp.n())?;
    let f = fock_trace_truncated(qp, &tr)?;
    out.rows.push(Row::new(
        format!("trace [{tag}]"),
        "fock_truncated",
        f.value,
        Some(f.tail_bound),
        "closed",
        f.closed,
        Tolerance::certified(f.tail_bound + f.rounding),
    ));
    if tr.basis_size() <= 1 << 20 {
        let full = fock_trace_enumerated(qp, &tr)?;
        out.rows.push(Row::new(format!("mode factorization [{tag}]"), "basis enumeration", full, None, "mode product", f.value, Tolerance::relative(1e-12)));
    } else {
        out.notes.push(format!("mode factorization skipped: basis of {} states", tr.basis_size()));
    }

    let res_mmax = m_max.min(5);
    let q = 2 * res_mmax + 6;
    match resolution_of_unity_residual(qp.n(), res_mmax, q) {
        Ok(r) => out.rows.push(Row::residual(format!("resolution of unity [N={} m_max={res_mmax} q={q}]", qp.n()), "equispaced rule", r, "identity", 1e-12)),
        Err(e @ Error::BudgetExhausted { .. }) => out.notes.push(format!("resolution of unity skipped: {e}")),
        Err(e) => return Err(e.into()),
    }
    for phi in [0.0, 1.0, PI] {
        out.rows.push(poisson_row(1.0, phi, 5, 20)?);
    }
    Ok(out)
}

pub fn poisson_row(sigma: f64, phi: f64, n_images: u64, m_cut: u64) -> Result<Row, CliError> {
    let p = poisson_resum_residual(sigma, phi, n_images, m_cut)?;
    Ok(Row::new(
        format!("Poisson [σ={sigma} φ={phi:.6} images={n_images} m_cut={m_cut}]"),
        "integer sum",
        p.lhs,
        Some(p.lhs_tail),
        "Gaussian images",
        p.rhs,
        Tolerance::absolute(1e-10),
    ))
}

pub fn fourier_rows(phi: f64, eps: f64, m: u64) -> Result<Rows, CliError> {
    let f = fourier_series_sum(phi, eps, m)?;
    let tag = format!("φ={phi} ε={eps} m={m}");
    let mut out = Rows::new();
    out.rows.push(Row::new(format!("Fourier sum [{tag}]"), "paired partial sum", f.partial, None, "closed", f.closed, Tolerance::absolute(1e-4)));
    out.rows.push(Row::new(format!("Fourier closed forms [{tag}]"), "closed", f.closed, None, "alternate", f.alternate, Tolerance::absolute(1e-12)));
    Ok(out)
}

pub fn cmd_quantum(args: &QuantumArgs, file: &ConfigFile) -> Result<RunReport, CliError> {
    if args.fourier {
        let phi = required(pick(&args.phi, &file.phi), "phi")?;
        let eps = required(pick(&args.eps, &file.eps), "eps")?;
        let m = pick(&args.m, &file.m).unwrap_or(10_000);
        let mut report = RunReport::new("quantum --fourier", json!({"phi": phi, "eps": eps, "m": m}), 0);
        let rows = fourier_rows(phi, eps, m)?;
        report.rows = rows.rows;
        report.notes = rows.notes;
        return Ok(report);
    }
    let section = file.quantum.as_ref();
    let c = pick(&args.c, &file.c).or_else(|| section.map(|q| q.c.clone()));
    let c = required(c, "c")?;
    let k = pick(&args.k, &file.k).or_else(|| section.map(|q| q.k));
    let t = match pick(&args.t, &file.t.map(|t| t.to_vec())).or_else(|| section.map(|q| q.t.to_vec())) {
        Some(parts) => parse_time(&parts)?,
        None => return Err(CliError::Input("missing --t".into())),
    };
    let n = c.len().saturating_sub(1);
    if let Some(flag_n) = pick(&args.n, &file.n) {
        if flag_n != n {
            return Err(CliError::Input(format!("--n {flag_n} needs {} couplings, got {}", flag_n + 1, c.len())));
        }
    }
    let k = k.unwrap_or(n as u64);
    let m_max = pick(&args.mmax, &file.mmax).unwrap_or(DEFAULT_MMAX);
    let qp = QuantumParams::new(k, c.clone(), t)?;

    let mut report = RunReport::new("quantum", json!({"n": n, "k": k, "c": c, "t": [t.re, t.im], "mmax": m_max}), 0);
    let rows = quantum_rows(&qp, m_max)?;
    report.rows = rows.rows;
    report.notes = rows.notes;
    report.notes.push(WKB_NOTE.into());
    Ok(report)
}

/// Norm series, universal energy and pullback-metric rows at one point.
pub fn embed_rows(p: &ChartPoint, spectrum: &Spectrum, n_max: usize) -> Result<Rows, CliError> {
    let e = embed(p, n_max)?;
    let tag = format!("N={} s={:.6} n_max={n_max}", p.dim(), p.norm_sq());
    let mut out = Rows::new();

    let norm = embed_norm_residual(&e);
    out.rows.push(Row::new(
        format!("ξ̂†ξ̂ [{tag}]"),
        "stored levels",
        norm.truncated,
        Some(norm.tail_bound),
        "s/(1−s)",
        norm.exact,
        Tolerance::certified(norm.tail_bound * (1.0 + 1e-12) + 1e-14),
    ));
    out.rows.push(Row::new(
        format!("norm truncation error [{tag}]"),
        "exact − truncated",
        norm.exact - norm.truncated,
        None,
        "geometric tail",
        norm.tail_bound,
        Tolerance::absolute(1e-14 * norm.exact.max(1.0)),
    ));

    let energy = universal_energy(&e, spectrum)?;
    let h = hamiltonian_trace(p, spectrum)?;
    out.rows.push(Row::new(format!("tr(Q̂Ĥ) limit [{tag}]"), "universal_energy", energy.exact, None, "hamiltonian_trace", h, Tolerance::relative(1e-12)));
    out.rows.push(Row::new(
        format!("tr(Q̂Ĥ) truncated [{tag}]"),
        "universal_energy",
        energy.truncated,
        Some(energy.tail_bound),
        "limit",
        energy.exact,
        Tolerance::certified(energy.tail_bound + 1e-13 * energy.exact.abs().max(1.0)),
    ));

    let analytic = metric_analytic(p)?;
    let dist = pullback_metric(&e)?.distance(&analytic);
    let coarse = n_max.div_ceil(2);
    let coarse_dist = pullback_metric(&embed(p, coarse)?)?.distance(&analytic);
    out.rows.push(Row::new(
        format!("pullback metric error [{tag}]"),
        "pullback_metric",
        dist,
        None,
        format!("error at n_max={coarse}"),
        coarse_dist,
        // must not grow when the tower is refined
        Tolerance::certified(coarse_dist.max(1e-13)),
    ));
    Ok(out)
}

pub fn cmd_embed(args: &EmbedArgs, file: &ConfigFile) -> Result<RunReport, CliError> {
    let raw = required(pick(&args.xi, &file.xi), "xi")?;
    let xi = parse_complex_list(&raw)?;
    if let Some(n) = pick(&args.n, &file.n) {
        if n != xi.len() {
            return Err(CliError::Input(format!("--n {n} but --xi has {} coordinates", xi.len())));
        }
    }
    let n = xi.len();
    let n_max = pick(&args.nmax, &file.nmax).unwrap_or(DEFAULT_NMAX);
    let theta = pick(&args.theta, &file.theta).unwrap_or_else(|| (1..=n + 1).rev().map(|k| k as f64).collect());
    let p = ChartPoint::new(Kind::Cq, xi)?;
    let spectrum = Spectrum::new(Kind::Cq, theta.clone(), 1.0)?;
    let mut report = RunReport::new("embed", json!({"n": n, "xi": raw, "nmax": n_max, "theta": theta}), 0);
    let rows = embed_rows(&p, &spectrum, n_max)?;
    report.rows = rows.rows;
    report.notes = rows.notes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(xs: &[f64]) -> Option<Vec<f64>> {
        Some(xs.to_vec())
    }

    #[test]
    fn partition_cp_has_six_passing_rows() {
        let args = PartitionArgs { kind: Some(Kind::Cp), theta: theta(&[1.0, 2.0, 3.0]), rho: Some(1.0), samples: Some(100_000), ..Default::default() };
        let r = cmd_partition(&args, &ConfigFile::default()).unwrap();
        assert_eq!(r.rows.len(), 6, "{:?}", r.notes);
        assert!(r.all_pass(), "{}", r.to_table());
    }

    #[test]
    fn partition_cq_reports_closed_value() {
        let args = PartitionArgs { kind: Some(Kind::Cq), theta: theta(&[3.0, 2.0, 1.0]), rho: Some(1.0), samples: Some(100_000), ..Default::default() };
        let r = cmd_partition(&args, &ConfigFile::default()).unwrap();
        let closed = r.rows.iter().find(|row| row.method == "closed").unwrap();
        let expected = (-3f64).exp() / 2.0;
        match closed.value {
            crate::report::Value::Real(v) => assert!((v - expected).abs() <= 1e-15 * expected, "{v}"),
            ref other => panic!("{other:?}"),
        }
        assert!(r.all_pass());
    }

    #[test]
    fn degenerate_spectrum_is_rejected() {
        let args = PartitionArgs { kind: Some(Kind::Cp), theta: theta(&[1.0, 1.0, 2.0]), rho: Some(1.0), ..Default::default() };
        assert!(matches!(cmd_partition(&args, &ConfigFile::default()), Err(CliError::Core(Error::DegenerateSpectrum { .. }))));
    }

    #[test]
    fn config_fills_missing_flags() {
        let file: ConfigFile = serde_json::from_str(r#"{"kind":"cq","theta":[2,1],"rho":2,"samples":1000}"#).unwrap();
        let args = PartitionArgs { rho: Some(1.0), ..Default::default() };
        let r = cmd_partition(&args, &file).unwrap();
        assert_eq!(r.inputs["rho"], 1.0);
        assert_eq!(r.inputs["config"]["samples"], 1000);
    }

    #[test]
    fn geometry_at_point() {
        let args = GeometryArgs { kind: Some(Kind::Cp), n: Some(1), points: Some(1), at: Some(vec!["1+0i".into()]), ..Default::default() };
        let r = cmd_geometry(&args, &ConfigFile::default()).unwrap();
        let metric = r.rows.iter().find(|row| row.quantity.starts_with("G_11")).unwrap();
        match metric.value {
            crate::report::Value::Complex([re, im]) => assert!((re - 0.25).abs() < 1e-15 && im == 0.0),
            other => panic!("{other:?}"),
        }
        assert!(r.all_pass(), "{}", r.to_table());
    }

    #[test]
    fn geometry_is_deterministic() {
        let args = GeometryArgs { kind: Some(Kind::Cq), n: Some(2), points: Some(50), seed: Some(7), ..Default::default() };
        let a = cmd_geometry(&args, &ConfigFile::default()).unwrap();
        let b = cmd_geometry(&args, &ConfigFile::default()).unwrap();
        assert!(a.all_pass(), "{}", a.to_table());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn quantum_trace_rows() {
        let args = QuantumArgs { n: Some(1), k: Some(2), c: Some(vec![1.0, 0.0]), t: Some(vec![0.0, -1.0]), mmax: Some(40), ..Default::default() };
        let r = cmd_quantum(&args, &ConfigFile::default()).unwrap();
        assert!(r.all_pass(), "{}", r.to_table());
        let trace = &r.rows[0];
        let expected = 1.0 / (1.0 - (-1f64).exp());
        assert!(matches!(trace.reference_value, crate::report::Value::Complex([re, _]) if (re - expected).abs() < 1e-15));
    }

    #[test]
    fn real_time_is_rejected() {
        let args = QuantumArgs { n: Some(1), k: Some(2), c: Some(vec![1.0, 0.0]), t: Some(vec![1.0, 0.0]), ..Default::default() };
        assert!(matches!(cmd_quantum(&args, &ConfigFile::default()), Err(CliError::Core(Error::DivergentRegime { .. }))));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn fourier_mode() {
        let args = QuantumArgs { fourier: true, phi: Some(3.14159), eps: Some(0.5), m: Some(10_000), ..Default::default() };
        let r = cmd_quantum(&args, &ConfigFile::default()).unwrap();
        assert!(r.all_pass(), "{}", r.to_table());
        match r.rows[0].reference_value {
            crate::report::Value::Complex([re, _]) => assert!((re - 0.5).abs() < 1e-4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn embed_rows_examples() {
        let args = EmbedArgs { n: Some(1), xi: Some(vec!["0.5".into()]), nmax: Some(20), theta: theta(&[2.0, 1.0]) };
        let r = cmd_embed(&args, &ConfigFile::default()).unwrap();
        assert!(r.all_pass(), "{}", r.to_table());
        let energy = r.rows.iter().find(|row| row.quantity.starts_with("tr(Q̂Ĥ) limit")).unwrap();
        assert_eq!(energy.reference_value, crate::report::Value::Real(7.0 / 3.0));

        let outside = EmbedArgs { n: Some(2), xi: Some(vec!["0.9".into(), "0.9".into()]), ..Default::default() };
        assert!(matches!(cmd_embed(&outside, &ConfigFile::default()), Err(CliError::Core(Error::OutOfChart { .. }))));
    }
}
