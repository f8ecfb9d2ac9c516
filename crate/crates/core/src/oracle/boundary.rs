use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::hamiltonian::{build_hamiltonian, LatticeHamiltonian};
use crate::bands::{bloch_point, momentum_from_energy};
use crate::error::{Error, Result};
use crate::params::{Band, System};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterSolution {
    pub t: Complex64,
    pub r: Complex64,
    /// Largest violation of the linear system after solving.
    pub residual: f64,
}

/// Exact scattering state of a finite chain at energy `omega`.
///
/// Every equation of motion `(omega - H) psi = 0` is kept except the two
/// that would reach past the chain ends (rows `A_1` and `B_N`). They are
/// replaced by pinning the first cell to an incoming wave plus `r` times the
/// reflected one, and the last cell to `t` times the transmitted wave. The
/// result is `2N + 4` equations for the `2N + 2` amplitudes plus `r`, `t`.
pub fn boundary_matched_solve(
    omega: f64,
    n_cells: usize,
    system: &System,
    band: Band,
) -> Result<ScatterSolution> {
    let h = build_hamiltonian(n_cells, system)?;
    if h.x1 < 4 || h.x1 + 3 > n_cells {
        return Err(Error::Placement {
            x1: system.emitter.x1,
            n_cells,
        });
    }
    let k = momentum_from_energy(omega, &system.waveguide, band)?;
    let phi = bloch_point(k, &system.waveguide).phi;
    let s = band.sign();
    let chi_in = [s * Complex64::from_polar(1.0, phi), Complex64::new(1.0, 0.0)];
    let chi_out = [s * Complex64::from_polar(1.0, -phi), Complex64::new(1.0, 0.0)];

    let dim = h.dim();
    let (ir, it) = (dim, dim + 1);
    let mut m = DMatrix::<Complex64>::zeros(dim + 2, dim + 2);
    let mut rhs = DVector::<Complex64>::zeros(dim + 2);
    let skip = [
        LatticeHamiltonian::site_a(1),
        LatticeHamiltonian::site_b(n_cells),
    ];
    let mut row = 0;
    for i in (0..dim).filter(|i| !skip.contains(i)) {
        for j in 0..dim {
            let delta = if i == j { omega } else { 0.0 };
            m[(row, j)] = Complex64::new(delta - h.matrix[(i, j)], 0.0);
        }
        row += 1;
    }
    let e_in = Complex64::from_polar(1.0, k);
    let sites = |j: usize| [LatticeHamiltonian::site_a(j), LatticeHamiltonian::site_b(j)];
    for (c, idx) in sites(1).into_iter().enumerate() {
        m[(row, idx)] = Complex64::new(1.0, 0.0);
        m[(row, ir)] = -e_in.conj() * chi_out[c];
        rhs[row] = e_in * chi_in[c];
        row += 1;
    }
    let e_last = Complex64::from_polar(1.0, k * n_cells as f64);
    for (c, idx) in sites(n_cells).into_iter().enumerate() {
        m[(row, idx)] = Complex64::new(1.0, 0.0);
        m[(row, it)] = -e_last * chi_in[c];
        row += 1;
    }
    debug_assert_eq!(row, dim + 2);

    let x = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem)?;
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let residual = (&m * &x - &rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(ScatterSolution {
        t: x[it],
        r: x[ir],
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate, CouplingConfig, EmitterParams, WaveguideParams};

    fn system(delta: f64, coupling: CouplingConfig, omega_rabi: f64) -> System {
        let em = EmitterParams {
            omega_e: 1.5,
            delta_c: 0.0,
            omega_rabi,
            g: 0.2,
            x1: 20,
        };
        validate(WaveguideParams::new(delta), em, coupling).unwrap()
    }

    #[test]
    fn reference_point() {
        let s = system(0.5, CouplingConfig::A, 0.0);
        let w = 2.5f64.sqrt();
        let sol = boundary_matched_solve(w, 40, &s, Band::Upper).unwrap();
        // Hand evaluation with V = g^2 / (w - omega_e) and 2 t1 t2 sin k = 1.5.
        let v = 0.04 / (w - 1.5);
        let expect = 1.5 / Complex64::new(1.5, -v * w);
        assert!((sol.t - expect).norm() < 1e-10);
        assert!((sol.t.norm_sqr() - 0.787).abs() < 5e-4);
        assert!((sol.t.norm_sqr() + sol.r.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn transparent_at_zero_potential() {
        for c in [CouplingConfig::A, CouplingConfig::B, CouplingConfig::ab(0.4).unwrap()] {
            let sol = boundary_matched_solve(1.5, 40, &system(-0.5, c, 0.2), Band::Upper).unwrap();
            assert!((sol.t - 1.0).norm() < 1e-10);
            assert!(sol.r.norm() < 1e-10);
        }
    }

    #[test]
    fn free_chain_in_lower_band() {
        let mut s = system(0.3, CouplingConfig::A, 0.0);
        s.emitter.g = 0.0;
        let sol = boundary_matched_solve(-1.2, 30, &s.with_x1(15), Band::Lower).unwrap();
        assert!((sol.t - 1.0).norm() < 1e-10);
        assert!(sol.r.norm() < 1e-10);
    }

    #[test]
    fn translation_leaves_magnitude() {
        let s = system(-0.5, CouplingConfig::ab(0.3).unwrap(), 0.05);
        let a = boundary_matched_solve(1.53, 40, &s, Band::Upper).unwrap();
        let b = boundary_matched_solve(1.53, 40, &s.with_x1(21), Band::Upper).unwrap();
        assert!((a.t.norm() - b.t.norm()).abs() < 1e-10);
        assert!((a.r.norm() - b.r.norm()).abs() < 1e-10);
    }

    #[test]
    fn emitter_near_end_rejected() {
        let s = system(0.5, CouplingConfig::A, 0.0);
        assert!(matches!(
            boundary_matched_solve(1.6, 40, &s.with_x1(3), Band::Upper),
            Err(Error::Placement { .. })
        ));
        assert!(matches!(
            boundary_matched_solve(1.6, 40, &s.with_x1(38), Band::Upper),
            Err(Error::Placement { .. })
        ));
        assert!(boundary_matched_solve(1.6, 40, &s.with_x1(37), Band::Upper).is_ok());
        assert!(matches!(
            boundary_matched_solve(0.5, 40, &s, Band::Upper),
            Err(Error::InBandGap { .. })
        ));
    }
}
