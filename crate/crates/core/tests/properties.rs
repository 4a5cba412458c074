use proptest::prelude::*;

use sepvol::analytic;
use sepvol::integrate;
use sepvol::metrics::{MetricName, MonotoneMetric};
use sepvol::qstate::{self, AngleVector, FRAME_RANGES, STATE_DIM};
use sepvol::sequences::{SequenceConfig, SequenceKind};

const MONOTONE: [MetricName; 9] = [
    MetricName::Bures,
    MetricName::Gks,
    MetricName::Wy,
    MetricName::Average,
    MetricName::KuboMori,
    MetricName::NonInformative,
    MetricName::Maximal,
    MetricName::Interpolated(0.3),
    MetricName::Interpolated(0.05),
];

fn unit_cube() -> impl Strategy<Value = [f64; STATE_DIM]> {
    prop::array::uniform15(0.0..1.0f64)
}

fn angles() -> impl Strategy<Value = AngleVector> {
    unit_cube().prop_map(|u| AngleVector::from_unit_cube(&u, std::f64::consts::FRAC_PI_2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn morozova_chentsov_axioms(x in 1e-4..1.0f64, y in 1e-4..1.0f64, t in 0.1..10.0f64, k in 0usize..9) {
        let m = MonotoneMetric::new(MONOTONE[k], false);
        let c = m.c(x, y);
        prop_assert!((c * y * m.f(x / y) - 1.0).abs() < 1e-10);
        prop_assert!((c - m.c(y, x)).abs() <= 1e-12 * c);
        prop_assert!((m.c(t * x, t * y) * t - c).abs() <= 1e-10 * c);
        prop_assert!((m.f(1.0) - 1.0).abs() < 1e-14);
        let r = x / y;
        prop_assert!((m.f(r) - r * m.f(1.0 / r)).abs() <= 1e-10 * m.f(r));
    }

    #[test]
    fn metric_dominance(x in 1e-4..1.0f64, y in 1e-4..1.0f64, k in 0usize..9) {
        let m = MonotoneMetric::new(MONOTONE[k], false);
        let c = m.c(x, y);
        let max = MonotoneMetric::new(MetricName::Maximal, false).c(x, y);
        let bures = MonotoneMetric::new(MetricName::Bures, false).c(x, y);
        prop_assert!(c <= max * (1.0 + 1e-12));
        prop_assert!(c >= bures * (1.0 - 1e-12));
    }

    #[test]
    fn ppt_determinant_agrees_with_eigenvalues(a in angles()) {
        let d = qstate::angles_to_state(&a);
        let det = qstate::det_partial_transpose(&d);
        let min = qstate::min_eigenvalue_partial_transpose(&d);
        // only the boundary band is ambiguous
        prop_assume!(det.abs() > 1e-12 && min.abs() > 1e-9);
        prop_assert_eq!(qstate::is_separable(&d), min >= 0.0);
    }

    #[test]
    fn partial_transpose_is_an_involution(a in angles()) {
        let m = *qstate::angles_to_state(&a).matrix();
        prop_assert_eq!(qstate::partial_transpose(&qstate::partial_transpose(&m)), m);
    }

    #[test]
    fn cap_boundary_is_symmetric(alpha in 0.0..1.0f64) {
        let a = analytic::cap_boundary_area(15, alpha).unwrap();
        let b = analytic::cap_boundary_area(15, 1.0 - alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn cap_boundary_is_monotone_below_half(a in 0.0..0.5f64, b in 0.0..0.5f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(analytic::cap_boundary_area(15, lo).unwrap() < analytic::cap_boundary_area(15, hi).unwrap());
    }

    #[test]
    fn ricci_is_symmetric_in_its_arguments(seed in 0u64..1000) {
        use nalgebra::DMatrix;
        use sepvol::linalg::C64;
        let n = 3 + (seed % 2) as usize;
        let basis = analytic::traceless_hermitian_basis(n);
        let coeffs = |s: u64| -> DMatrix<C64> {
            basis.iter().enumerate().fold(DMatrix::zeros(n, n), |acc, (i, b)| {
                let w = ((s.wrapping_mul(2654435761).wrapping_add(i as u64 * 97)) % 1000) as f64 / 500.0 - 1.0;
                acc + b * C64::new(w, 0.0)
            })
        };
        let rho: Vec<f64> = (0..n).map(|i| 1.0 + ((seed + i as u64 * 7) % 5) as f64).collect();
        let tr: f64 = rho.iter().sum();
        let rho: Vec<f64> = rho.iter().map(|r| r / tr).collect();
        let (y, z) = (coeffs(seed), coeffs(seed + 17));
        let a = analytic::ricci_diag(&rho, &y, &z).unwrap();
        let b = analytic::ricci_diag(&rho, &z, &y).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn frame_angles_stay_in_range(u in unit_cube()) {
        let a = AngleVector::from_unit_cube(&u, std::f64::consts::FRAC_PI_2);
        for (x, (lo, hi)) in a.euler.iter().zip(FRAME_RANGES) {
            prop_assert!(*x >= lo && *x <= hi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn volume_parts_sum_exactly(seed in 0u64..1_000_000, every in 1_000u64..9_000) {
        let cfg = SequenceConfig::new(SequenceKind::Halton, STATE_DIM, seed);
        let metrics = [MonotoneMetric::new(MetricName::Bures, true), MonotoneMetric::new(MetricName::KuboMori, true)];
        let n = 20_000;
        for run in integrate::estimate_volumes(&metrics, &cfg, n, every).unwrap() {
            prop_assert_eq!(run.checkpoints.len() as u64, n / every);
            for c in run.checkpoints.iter().chain([&run.final_estimate]) {
                prop_assert_eq!(c.sep + c.nonsep, c.total);
            }
        }
    }

    #[test]
    fn results_do_not_depend_on_thread_count(seed in 0u64..1_000_000, threads in 2usize..5) {
        let metrics = [MonotoneMetric::new(MetricName::Bures, true), MonotoneMetric::new(MetricName::Wy, true)];
        let vcfg = SequenceConfig::new(SequenceKind::FaureTezuka, STATE_DIM, seed);
        let bcfg = SequenceConfig::new(SequenceKind::Halton, 14, seed);
        let run = |t: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| {
                let v = integrate::estimate_volumes(&metrics, &vcfg, 12_345, 5_000).unwrap();
                let b = integrate::estimate_boundaries(
                    &metrics, &bcfg, 3_000, 1_000, &[integrate::Surface::Rank3, integrate::Surface::Rank4Sep],
                ).unwrap();
                (v, b)
            })
        };
        let (v1, b1) = run(1);
        let (vt, bt) = run(threads);
        for (x, y) in v1.iter().zip(&vt) {
            for (c, d) in x.checkpoints.iter().chain([&x.final_estimate]).zip(y.checkpoints.iter().chain([&y.final_estimate])) {
                prop_assert_eq!(c.total.to_bits(), d.total.to_bits());
                prop_assert_eq!(c.sep.to_bits(), d.sep.to_bits());
            }
        }
        for (x, y) in b1.iter().zip(&bt) {
            let (c, d) = (&x.final_estimate, &y.final_estimate);
            prop_assert_eq!(c.b_total.to_bits(), d.b_total.to_bits());
            prop_assert_eq!(c.beta.to_bits(), d.beta.to_bits());
            prop_assert_eq!(&x.diagnostics, &y.diagnostics);
        }
    }
}
