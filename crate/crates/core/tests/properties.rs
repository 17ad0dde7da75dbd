use std::f64::consts::TAU;

use patchnoise::experiments::{
    fit_zeta, heating_rate, invert_heating, read_dataset, rescale, ExperimentRecord, FitStatus, ProbeKind,
};
use patchnoise::kernel::{kernel, kernel_gradient, propagate_potential};
use patchnoise::quantities::validate_model;
use patchnoise::spectrum::{noise_density, scaling_function};
use patchnoise::{AngularFrequency, BoundaryGrid, FieldNoiseDensity, IonSpecies, KernelPoint, Length, NoiseAmplitude};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed_2024),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn boundary(n: usize) -> impl Strategy<Value = BoundaryGrid> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| BoundaryGrid::new(n, n, 0.1, v).unwrap())
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn kernel_scales_homogeneously(
        x in -5.0f64..5.0, y in 0.01f64..5.0, z in -5.0f64..5.0, lambda in log_uniform(1e-3, 1e3),
    ) {
        let p = KernelPoint::new(x, y, z).unwrap();
        let q = p.scaled(lambda).unwrap();
        prop_assert!(close(kernel(q), kernel(p) / (lambda * lambda), 1e-12));
        let (gp, gq) = (kernel_gradient(p), kernel_gradient(q));
        let norm = gp.iter().map(|g| g * g).sum::<f64>().sqrt();
        for i in 0..3 {
            prop_assert!((gq[i] - gp[i] / lambda.powi(3)).abs() <= 1e-12 * norm / lambda.powi(3));
        }
    }

    #[test]
    fn scaling_function_is_bounded_by_both_asymptotes(rho in log_uniform(1e-3, 1e3)) {
        let s = scaling_function(rho).unwrap();
        let bound = (1.0 / rho).min(0.75 / rho.powi(4));
        prop_assert!(s > 0.0);
        prop_assert!(s < bound * (1.0 + 1e-9), "s({}) = {} bound {}", rho, s, bound);
        let further = scaling_function(rho * 1.01).unwrap();
        prop_assert!(further < s);
    }

    #[test]
    fn noise_density_depends_on_ratio_only(
        zeta in log_uniform(1e-8, 1e-4), rho in log_uniform(1e-3, 1e3), lambda in log_uniform(1e-2, 1e2),
    ) {
        let omega = AngularFrequency::from_hz(1e6).unwrap();
        let base = validate_model(zeta, 3.2e-16, TAU * 1e6).unwrap();
        let scaled = validate_model(lambda * zeta, 3.2e-16, TAU * 1e6).unwrap();
        let a = noise_density(&base, Length::new(rho * zeta).unwrap(), omega).unwrap().get();
        let b = noise_density(&scaled, Length::new(lambda * rho * zeta).unwrap(), omega).unwrap().get();
        prop_assert!(close(a, b * lambda * lambda, 1e-10));
    }

    #[test]
    fn rescale_round_trips(
        s in log_uniform(1e-14, 1e2), f in log_uniform(1e3, 1e8), alpha in 0.0f64..2.0,
    ) {
        let s_e = FieldNoiseDensity::new(s).unwrap();
        let there = rescale(s_e, f, 1e6, alpha).unwrap();
        let back = rescale(there, 1e6, f, alpha).unwrap();
        prop_assert!(close(back.get(), s, 1e-12));
    }

    #[test]
    fn heating_inverts(gamma in log_uniform(1e-3, 1e8), mass in 1.0f64..200.0, f in log_uniform(1e5, 1e8)) {
        let ion = IonSpecies::singly_charged(mass, f).unwrap();
        let s_e = invert_heating(gamma, &ion).unwrap();
        prop_assert!(close(heating_rate(s_e, &ion), gamma, 1e-12));
    }

    #[test]
    fn fitted_zeta_reproduces_the_record(d_um in 20.0f64..200.0, s_e in log_uniform(1e-13, 1e-10)) {
        let record = ExperimentRecord::new("synthetic", ProbeKind::IonTrap, d_um * 1e-6, 1e6, s_e, 1.0).unwrap();
        let nsv = NoiseAmplitude::new(3.2e-16).unwrap();
        let fit = fit_zeta(&record, nsv).unwrap();
        if fit.status != FitStatus::NoRoot {
            let zeta = fit.zeta.unwrap();
            let model = validate_model(zeta, 3.2e-16, TAU * 1e6).unwrap();
            let omega = AngularFrequency::from_hz(1e6).unwrap();
            let predicted = noise_density(&model, record.d, omega).unwrap().get();
            // The model scales as ζ² on this branch; 1e-6 in ζ is ~2e-6 in S_E.
            prop_assert!(close(predicted, s_e, 3e-6), "{} vs {}", predicted, s_e);
        }
    }

    #[test]
    fn fits_commute_with_unit_choice(d_um in 20.0f64..200.0, f_mhz in 0.1f64..20.0, s_e in log_uniform(1e-13, 1e-10)) {
        let csv = format!("source,kind,d_um,f_MHz,s_e_si\nx,ion-trap,{d_um},{f_mhz},{s_e}\n");
        let from_csv = read_dataset(csv.as_bytes(), 1.0).unwrap().remove(0);
        let si = ExperimentRecord::new("x", ProbeKind::IonTrap, d_um * 1e-6, f_mhz * 1e6, s_e, 1.0).unwrap();
        prop_assert_eq!(&from_csv, &si);
        let nsv = NoiseAmplitude::new(3.2e-16).unwrap();
        prop_assert_eq!(fit_zeta(&from_csv, nsv).unwrap(), fit_zeta(&si, nsv).unwrap());
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn propagator_is_a_semigroup(b in boundary(16), y1 in 0.01f64..0.5, y2 in 0.01f64..0.5) {
        let l = |y: f64| Length::new(y).unwrap();
        let two = propagate_potential(&propagate_potential(&b, l(y1)), l(y2));
        let one = propagate_potential(&b, l(y1 + y2));
        for (a, c) in two.values().iter().zip(one.values()) {
            prop_assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn propagated_potential_obeys_maximum_principle(b in boundary(16), y in 0.05f64..1.0) {
        let (lo, hi) = b.min_max();
        let (plo, phi) = propagate_potential(&b, Length::new(y).unwrap()).min_max();
        prop_assert!(plo >= lo - 1e-12 && phi <= hi + 1e-12, "[{}, {}] outside [{}, {}]", plo, phi, lo, hi);
    }
}
