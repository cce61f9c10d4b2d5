//! Randomized invariants of the geometry, embedding and quantum layers.

use std::f64::consts::TAU;

use localize::embedding::{embed, embed_norm_residual, universal_energy};
use localize::geometry::{
    hamiltonian_trace, metric_analytic, metric_fd, projector, volume_density, volume_density_closed,
};
use localize::quantum::{
    coherent_overlap, fock_trace_enumerated, fock_trace_truncated, resolution_of_unity_residual,
    single_mode_trace, FockTruncation,
};
use localize::{validate_spectrum, ChartPoint, Kind, QuantumParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Cp), Just(Kind::Cq)]
}

/// A chart point with `|ξ|² ≤ 0.9` for CQ and entries in [-2, 2]² for CP.
fn chart_point() -> impl Strategy<Value = ChartPoint> {
    (kind(), 1usize..=4).prop_flat_map(|(kind, n)| {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n).prop_map(move |raw| {
            let mut xi: Vec<Complex64> = raw.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
            if kind == Kind::Cq {
                let s: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
                if s > 0.9 {
                    let scale = (0.9 / s).sqrt();
                    xi.iter_mut().for_each(|z| *z *= scale);
                }
            }
            ChartPoint::new(kind, xi).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn projector_identities(p in chart_point()) {
        let proj = projector(&p).unwrap();
        prop_assert!(proj.identity_residual() < 1e-12);
    }

    #[test]
    fn metric_is_hermitian_with_closed_form_determinant(p in chart_point()) {
        let g = metric_analytic(&p).unwrap();
        prop_assert!(g.hermiticity_residual() < 1e-12);
        let det = volume_density(&p).unwrap();
        let closed = volume_density_closed(&p).unwrap();
        prop_assert!((det - closed).abs() <= 1e-12 * closed);
    }

    #[test]
    fn fd_metric_tracks_analytic(p in chart_point()) {
        let fd = metric_fd(&p, 1e-5).unwrap();
        let d = fd.distance(&metric_analytic(&p).unwrap());
        let tol = if p.kind() == Kind::Cp { 1e-6 } else { 1e-5 };
        prop_assert!(d < tol, "{}", d);
    }

    #[test]
    fn energy_limit_equals_hamiltonian(p in chart_point().prop_filter("CQ only", |p| p.kind() == Kind::Cq)) {
        let theta: Vec<f64> = (1..=p.dim() + 1).rev().map(|k| k as f64).collect();
        let s = validate_spectrum(Kind::Cq, &theta, 1.0).unwrap();
        let e = embed(&p, 3).unwrap();
        let v = universal_energy(&e, &s).unwrap();
        let h = hamiltonian_trace(&p, &s).unwrap();
        prop_assert!((v.exact - h).abs() <= 1e-12 * h.abs().max(1.0));
        prop_assert!(v.truncation_error() <= v.tail_bound + 1e-13);
        let norm = embed_norm_residual(&e);
        prop_assert!((norm.exact - norm.truncated - norm.tail_bound).abs() <= 1e-13 * norm.exact.max(1.0));
    }

    #[test]
    fn overlap_depends_on_differences(
        a in prop::collection::vec(0.0f64..TAU, 2),
        b in prop::collection::vec(0.0f64..TAU, 2),
        shift in -3.0f64..3.0,
        m_max in 0u64..12,
    ) {
        let base = coherent_overlap(&a, &b, m_max).unwrap().value;
        let a2: Vec<f64> = a.iter().map(|x| x + shift).collect();
        let b2: Vec<f64> = b.iter().map(|x| x + shift).collect();
        let moved = coherent_overlap(&a2, &b2, m_max).unwrap().value;
        prop_assert!((base - moved).norm() <= 1e-12 * base.norm().max(1.0));
    }

    #[test]
    fn trace_factorizes_over_modes(
        c in prop::collection::vec(0.2f64..2.0, 3),
        re_t in -1.0f64..1.0,
        im_t in -1.5f64..-0.3,
        m_max in 0u64..10,
    ) {
        let qp = QuantumParams::new(2, c, Complex64::new(re_t, im_t)).unwrap();
        let tr = FockTruncation::new(m_max, 2).unwrap();
        let full = fock_trace_enumerated(&qp, &tr).unwrap();
        let product = fock_trace_truncated(&qp, &tr).unwrap().value;
        prop_assert!((full - product).norm() <= 1e-12 * product.norm());
        let phase = (-Complex64::i() * 2.0 * qp.last_coupling() * qp.time()).exp();
        let modes = single_mode_trace(&qp, 0, m_max) * single_mode_trace(&qp, 1, m_max) * phase;
        prop_assert!((modes - product).norm() <= 1e-14 * product.norm());
    }

    #[test]
    fn resolution_exact_above_threshold(m_max in 0u64..6, extra in 1u64..6) {
        let q = 2 * m_max + extra;
        prop_assert!(resolution_of_unity_residual(1, m_max, q).unwrap() < 1e-12);
    }
}
