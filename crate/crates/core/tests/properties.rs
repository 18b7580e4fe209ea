use std::f64::consts::PI;

use fdcran_core::analytic::{f1_integral, f2_integral, hyp2f1, se_cutset, QuadratureSpec};
use fdcran_core::beamforming::zf_precoder;
use fdcran_core::channel::sample_rayleigh_matrix;
use fdcran_core::gamma_approx::{gamma_sum_mgf, GammaTerm};
use fdcran_core::geometry::xi;
use fdcran_core::montecarlo::{estimate_se, Components, TrialOutcome};
use fdcran_core::DuplexMode;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xi_lies_between_chord_extremes(r in 0.05f64..5.0, frac in 0.0f64..=1.0, theta in 0.0f64..(2.0 * PI)) {
        let y = frac * r;
        let v = xi(y, theta, r).unwrap();
        prop_assert!(v >= (r - y) * (1.0 - 1e-12) - 1e-15 && v <= (r + y) * (1.0 + 1e-12));
        let mirrored = xi(y, PI - theta, r).unwrap();
        prop_assert!((v - mirrored).abs() <= 1e-12 * r);
    }

    #[test]
    fn gamma_characteristic_function_is_bounded(
        betas in prop::collection::vec(1e-6f64..1e6, 1..6),
        shape in 0.05f64..20.0,
        s in -1e4f64..1e4,
    ) {
        let terms: Vec<GammaTerm> = betas.iter().map(|&b| GammaTerm::new(b, shape, 1.0).unwrap()).collect();
        let m = gamma_sum_mgf(&terms, Complex64::new(0.0, s));
        prop_assert!(m.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn real_f1_is_between_zero_and_half_square(
        z in 1e-3f64..1e3, alpha in 2.2f64..5.0, shape in 0.1f64..10.0, t in 0.05f64..3.0,
    ) {
        let v = f1_integral(Complex64::new(z, 0.0), 0.2, alpha, shape, 1.0, t).unwrap();
        prop_assert!(v.im.abs() <= 1e-12 * v.re.abs().max(1e-300));
        prop_assert!(v.re > 0.0 && v.re < 0.5 * t * t * (1.0 + 1e-12));
    }

    #[test]
    fn f2_grows_with_shape(z in 1e-3f64..1e3, alpha in 2.2f64..5.0, shape in 0.1f64..10.0, t in 0.05f64..3.0) {
        let z = Complex64::new(z, 0.0);
        let a = f2_integral(z, 0.1, alpha, shape, 1.0, t).unwrap().re;
        let b = f2_integral(z, 0.1, alpha, shape * 1.5, 1.0, t).unwrap().re;
        prop_assert!(b >= a * (1.0 - 1e-10));
    }

    #[test]
    fn hypergeometric_is_symmetric_in_numerator_parameters(
        a in -2.5f64..3.0, b in -2.5f64..3.0, c in 0.3f64..4.0, re in -5.0f64..0.9, im in -5.0f64..5.0,
    ) {
        let z = Complex64::new(re, im);
        prop_assume!((z - 1.0).norm() > 0.1);
        let x = hyp2f1(a, b, c, z).unwrap();
        let y = hyp2f1(b, a, c, z).unwrap();
        prop_assert!((x - y).norm() <= 1e-8 * x.norm().max(1.0), "{x} vs {y}");
    }

    #[test]
    fn cutset_is_capped_and_monotone(g in 1e-3f64..1e6, c in 0.0f64..20.0, dc in 0.0f64..5.0) {
        let quad = QuadratureSpec::default();
        let step = |x: f64| Ok(if x < g { 0.0 } else { 1.0 });
        let lo = se_cutset(step, c, &quad).unwrap();
        let hi = se_cutset(step, c + dc, &quad).unwrap();
        prop_assert!(lo.value <= c + lo.error + 1e-12 && lo.value >= 0.0);
        prop_assert!(hi.value >= lo.value - lo.error - hi.error - 1e-12);
    }

    #[test]
    fn zero_forcing_nulls_random_channels(k in 1usize..5, extra in 0usize..5, seed in any::<u64>()) {
        let g = sample_rayleigh_matrix(k, k + extra, seed).unwrap();
        let v = zf_precoder(&g).unwrap();
        let gv = &g * &v.v;
        let min_diag = (0..k).map(|i| gv[(i, i)].norm()).fold(f64::INFINITY, f64::min);
        for i in 0..k {
            prop_assert!((v.v.column(i).norm() - 1.0).abs() < 1e-12);
            prop_assert!(gv[(i, i)].im.abs() <= 1e-10 * gv[(i, i)].re);
            for j in 0..k {
                if i != j {
                    prop_assert!(gv[(i, j)].norm() <= 1e-8 * min_diag);
                }
            }
        }
    }

    #[test]
    fn mc_se_respects_fronthaul(
        sinrs in prop::collection::vec(0.0f64..1e6, 1..50), c in 0.0f64..20.0, split in 0.05f64..0.95,
    ) {
        let c0 = Components::default();
        let trials: Vec<TrialOutcome> = sinrs
            .iter()
            .map(|&g| TrialOutcome { dl_sinr: g, ul_sinr: g, dl: c0, ul: c0, resampled: false, empty_cluster: false })
            .collect();
        let fd = DuplexMode { fd_split: split, ..DuplexMode::fd() };
        let (cd, cu) = fd.effective_capacity(c, c);
        let f = estimate_se(&trials, c, c, fd).unwrap();
        prop_assert!(f.dl_se <= cd + 1e-12 && f.ul_se <= cu + 1e-12 && f.dl_se >= 0.0);
        let h = estimate_se(&trials, c, c, DuplexMode::hd()).unwrap();
        prop_assert!(h.dl_se <= 0.5 * c + 1e-12);
    }
}
