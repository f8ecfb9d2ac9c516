use proptest::prelude::*;
use ssh_lambda::oracle::boundary_matched_solve;
use ssh_lambda::params::{validate, Band, CouplingConfig, EmitterParams, System, WaveguideParams};
use ssh_lambda::scattering::{amplitudes, pipeline};

fn system(delta: f64, coupling: CouplingConfig, omega_rabi: f64, x1: i64) -> System {
    let em = EmitterParams {
        omega_e: 1.5,
        delta_c: 0.0,
        omega_rabi,
        g: 0.2,
        x1,
    };
    validate(WaveguideParams::new(delta), em, coupling).unwrap()
}

#[test]
fn ab_grid_matches_lattice_for_both_signs() {
    for delta in [0.5, -0.5] {
        let s = system(delta, CouplingConfig::ab(0.5).unwrap(), 0.0045, 20);
        for i in 0..50 {
            let omega = 1.5 - 0.02 + 0.04 * (i as f64 + 0.5) / 50.0;
            let (t, r) = amplitudes(&s, omega, Band::Upper).unwrap();
            let lat = boundary_matched_solve(omega, 40, &s, Band::Upper).unwrap();
            assert!((lat.t - t).norm() < 1e-10, "delta={delta} omega={omega}");
            assert!((lat.r - r).norm() < 1e-10, "delta={delta} omega={omega}");
        }
    }
}

#[test]
fn transmission_independent_of_emitter_cell() {
    let c = CouplingConfig::ab(0.3).unwrap();
    for x1 in [6, 13, 30] {
        let s = system(-0.5, c, 0.1, x1);
        let lat = boundary_matched_solve(1.52, 40, &s, Band::Upper).unwrap();
        let (t, _) = amplitudes(&s, 1.52, Band::Upper).unwrap();
        assert!((lat.t - t).norm() < 1e-10);
        let (t20, _) = amplitudes(&s.with_x1(20), 1.52, Band::Upper).unwrap();
        assert!((t - t20).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_routes_agree(
        delta in prop_oneof![-0.8..-0.1f64, 0.1..0.8f64],
        alpha in 0.05..0.95f64,
        frac in 0.05..0.95f64,
        omega_rabi in 0.0..0.3f64,
        lower in any::<bool>(),
    ) {
        let band = if lower { Band::Lower } else { Band::Upper };
        let lo = 2.0 * delta.abs();
        let omega = band.sign() * (lo + frac * (2.0 - lo));
        let mut s = system(delta, CouplingConfig::ab(alpha).unwrap(), omega_rabi, 17);
        s.emitter.omega_e = omega + 0.01;
        let (t, r) = amplitudes(&s, omega, band).unwrap();
        let lat = boundary_matched_solve(omega, 40, &s, band).unwrap();
        let sm = pipeline(&s, omega, band).unwrap();
        prop_assert!((lat.t - t).norm() < 1e-10);
        prop_assert!((lat.r - r).norm() < 1e-10);
        prop_assert!((sm.t_l - t).norm() < 1e-10);
    }
}
