//! The acceptance battery at pinned parameters. Every row is tagged with the
//! criterion it belongs to; the report is byte-identical for a given seed.

use std::f64::consts::PI;

use localize::closed_forms::{rationals_from_integers, vandermonde_identity_residual, vandermonde_identity_residual_exact};
use localize::embedding::{embed, pullback_metric};
use localize::geometry::metric_analytic;
use localize::integrators::{z_cpn_quadrature, IntegratorConfig};
use localize::quantum::{fock_trace_truncated, resolution_of_unity_residual, FockTruncation};
use localize::{ChartPoint, Kind, QuantumParams, Spectrum};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use crate::commands::{
    embed_rows, fourier_rows, geometry_rows, partition_rows, poisson_row, sample_points, Rows, DEFAULT_CONTOUR_TOL,
    DEFAULT_POINTS, DEFAULT_SAMPLES, DEFAULT_STEP, WKB_NOTE,
};
use crate::report::{Row, RunReport, Tolerance};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;

/// Integer energies for the exact Vandermonde identity; the first N+1 are used.
pub const VANDERMONDE_THETA: [i64; 7] = [1, 2, 4, 7, 11, 16, 22];

fn tag(criterion: u8, rows: Rows, report: &mut RunReport) {
    report.rows.extend(rows.rows.into_iter().map(|r| r.with_criterion(criterion)));
    report.notes.extend(rows.notes.into_iter().map(|n| format!("[{criterion}] {n}")));
}

fn ascending(n: usize) -> Vec<f64> {
    (1..=n + 1).map(|k| k as f64).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn run(seed: u64) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("suite", json!({"seed": seed}), seed);
    let cfg = IntegratorConfig { seed, samples: DEFAULT_SAMPLES, ..IntegratorConfig::default() };

    // 1: CP methods on θ = 1..N+1
    for n in 1..=3 {
        for rho in [0.5, 1.0, 2.0] {
            let s = Spectrum::new(Kind::Cp, ascending(n), rho)?;
            tag(1, partition_rows(&s, &cfg, DEFAULT_CONTOUR_TOL)?, &mut report);
        }
    }

    // 2: CQ methods on θ = N+1..1
    for n in 1..=3 {
        for rho in [1.0, 2.0] {
            let mut theta = ascending(n);
            theta.reverse();
            let s = Spectrum::new(Kind::Cq, theta, rho)?;
            tag(2, partition_rows(&s, &cfg, DEFAULT_CONTOUR_TOL)?, &mut report);
        }
    }

    // 3: volume at tiny ρ
    let mut rows = Rows::new();
    for n in 1..=3 {
        let s = Spectrum::new(Kind::Cp, ascending(n), 1e-4)?;
        let q = z_cpn_quadrature(&s, &cfg)?;
        rows.rows.push(Row::new(format!("volume [CP N={n} rho=1e-4]"), "quadrature", q.value, Some(q.err), "1/N!", 1.0 / factorial(n), Tolerance::relative(1e-3)));
    }
    tag(3, rows, &mut report);

    // 4: geometry battery
    for (k, kind) in [Kind::Cp, Kind::Cq].into_iter().enumerate() {
        for n in 1..=4 {
            let points = sample_points(kind, n, DEFAULT_POINTS, seed.wrapping_add((10 * k + n) as u64));
            tag(4, geometry_rows(kind, &points, DEFAULT_STEP)?, &mut report);
        }
    }

    // 5: embedding battery
    let half = ChartPoint::new(Kind::Cq, vec![Complex64::new(0.5, 0.0)])?;
    tag(5, embed_rows(&half, &Spectrum::new(Kind::Cq, vec![2.0, 1.0], 1.0)?, 20)?, &mut report);
    for p in &sample_points(Kind::Cq, 2, 3, seed.wrapping_add(50)) {
        tag(5, embed_rows(p, &Spectrum::new(Kind::Cq, vec![3.0, 2.0, 1.0], 1.0)?, 10)?, &mut report);
    }
    tag(5, pullback_convergence(&half)?, &mut report);

    // 6: quantum battery
    tag(6, quantum_battery()?, &mut report);

    // 7: Vandermonde identity
    tag(7, vandermonde_rows()?, &mut report);

    report.notes.push(WKB_NOTE.into());
    Ok(report)
}

fn pullback_convergence(p: &ChartPoint) -> Result<Rows, CliError> {
    let target = metric_analytic(p)?;
    let mut rows = Rows::new();
    let mut previous: Option<(usize, f64)> = None;
    for n_max in [5, 10, 15, 20] {
        let d = pullback_metric(&embed(p, n_max)?)?.distance(&target);
        if let Some((prev_n, prev_d)) = previous {
            rows.rows.push(Row::new(
                format!("pullback error n_max={n_max} [N=1 ξ=1/2]"),
                "pullback_metric",
                d,
                None,
                format!("error at n_max={prev_n}"),
                prev_d,
                Tolerance::certified(prev_d),
            ));
        }
        previous = Some((n_max, d));
    }
    let g = pullback_metric(&embed(p, 20)?)?.g[(0, 0)];
    rows.rows.push(Row::new("pullback G_11 [N=1 ξ=1/2 n_max=20]", "pullback_metric", g, None, "16/9", 16.0 / 9.0, Tolerance::absolute(1e-4)));
    Ok(rows)
}

fn quantum_battery() -> Result<Rows, CliError> {
    let mut rows = Rows::new();
    let minus_i = Complex64::new(0.0, -1.0);
    for c in [vec![1.0, 0.0], vec![1.0, 2.0, 0.0]] {
        let qp = QuantumParams::new(2, c, minus_i)?;
        let mut last_tail = f64::INFINITY;
        for m_max in [10, 20, 40] {
            let f = fock_trace_truncated(&qp, &FockTruncation::new(m_max, qp.n())?)?;
            rows.rows.push(Row::new(
                format!("trace [N={} m_max={m_max} T=-i]", qp.n()),
                "fock_truncated",
                f.value,
                Some(f.tail_bound),
                "closed",
                f.closed,
                Tolerance::certified(f.tail_bound + f.rounding),
            ));
            rows.rows.push(Row::new(
                format!("tail shrinks [N={} m_max={m_max}]", qp.n()),
                "tail bound",
                f.tail_bound,
                None,
                "previous bound",
                0.0,
                Tolerance::absolute(last_tail * (1.0 - 1e-12)),
            ));
            last_tail = f.tail_bound;
        }
    }
    for (n, m_max, q) in [(1, 5, 16), (1, 10, 21), (2, 3, 16), (2, 4, 9)] {
        let r = resolution_of_unity_residual(n, m_max, q)?;
        rows.rows.push(Row::residual(format!("resolution of unity [N={n} m_max={m_max} q={q}]"), "equispaced rule", r, "identity", 1e-12));
    }
    // 3.14159 sits just below the pole at π on purpose
    #[allow(clippy::approx_constant)]
    for (phi, eps) in [(3.14159, 0.5), (1.0, 0.25), (2.5, 0.7)] {
        let f = fourier_rows(phi, eps, 10_000)?;
        rows.rows.extend(f.rows);
    }
    for phi in [0.0, 1.0, PI] {
        rows.rows.push(poisson_row(1.0, phi, 5, 20)?);
    }
    Ok(rows)
}

fn vandermonde_rows() -> Result<Rows, CliError> {
    let mut rows = Rows::new();
    for n in 1..=6 {
        let ints = &VANDERMONDE_THETA[..=n];
        let exact = vandermonde_identity_residual_exact(&rationals_from_integers(ints))?;
        let value = if exact.is_zero() { 0.0 } else { exact.to_f64().unwrap_or(f64::NAN).abs().max(f64::MIN_POSITIVE) };
        rows.rows.push(Row::residual(format!("Vandermonde identity [N={n}]"), "exact rationals", value, "zero", 0.0));
        let floats: Vec<f64> = ints.iter().map(|&k| k as f64).collect();
        let r = vandermonde_identity_residual(&floats)?;
        rows.rows.push(Row::residual(format!("Vandermonde identity [N={n}]"), "floating point", r, "zero", 1e-12));
    }
    Ok(rows)
}
