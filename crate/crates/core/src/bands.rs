//! Bulk band structure of the dimerized chain: dispersion, Bloch phase and
//! eigenvectors, the d-vector, and the winding number / Zak phase.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Band, WaveguideParams};

/// Relative tolerance for deciding that an energy sits on a band edge.
const EDGE_TOL: f64 = 1e-12;

/// Bloch data at quasi-momentum `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub k: f64,
    /// Off-diagonal Bloch element `h(k) = -t1 - t2 e^{-ik}`.
    pub h: Complex64,
    /// `arg h(k)` on the principal branch (-pi, pi].
    pub phi: f64,
    /// Upper-band energy `|h(k)|`.
    pub omega: f64,
}

pub fn bloch_point(k: f64, wg: &WaveguideParams) -> BlochPoint {
    let (t1, t2) = (wg.t1(), wg.t2());
    let h = Complex64::new(-t1 - t2 * k.cos(), t2 * k.sin());
    let omega = (t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * k.cos()).max(0.0).sqrt();
    BlochPoint {
        k,
        h,
        phi: h.arg(),
        omega,
    }
}

/// `(gap_edge, outer_edge) = (2|delta|J, 2J)`; the gap is `4|delta|J` wide.
pub fn band_edges(wg: &WaveguideParams) -> (f64, f64) {
    (2.0 * wg.delta.abs() * wg.j, 2.0 * wg.j)
}

/// Inverts the dispersion for a photon of energy `omega` in `band`,
/// returning `k` in the open interval (0, pi).
///
/// Energies on either band edge are rejected because every transmission
/// formula divides by `sin k`.
pub fn momentum_from_energy(omega: f64, wg: &WaveguideParams, band: Band) -> Result<f64> {
    let (gap_edge, outer_edge) = band_edges(wg);
    let w = omega.abs();
    let scale = wg.j;
    if (w - gap_edge).abs() <= EDGE_TOL * scale || (w - outer_edge).abs() <= EDGE_TOL * scale {
        return Err(Error::BandEdge { omega });
    }
    if w < gap_edge {
        return Err(Error::InBandGap { omega });
    }
    if w > outer_edge {
        return Err(Error::BeyondBandEdge { omega });
    }
    if omega * band.sign() < 0.0 {
        return Err(Error::WrongBand {
            omega,
            band: band.name(),
        });
    }
    let (t1, t2) = (wg.t1(), wg.t2());
    if t1 * t2 == 0.0 {
        return Err(Error::FlatBand);
    }
    let cos_k = ((w * w - t1 * t1 - t2 * t2) / (2.0 * t1 * t2)).clamp(-1.0, 1.0);
    Ok(cos_k.acos())
}

/// Upper-band group velocity `d omega_k / dk = -t1 t2 sin k / omega_k`.
///
/// The sign is the true derivative: modes with k in (0, pi) move towards
/// negative cell index in the upper band. At `k = 0` or `pi` (and at the
/// gap-closing point) this returns zero.
pub fn group_velocity(k: f64, wg: &WaveguideParams) -> f64 {
    let p = bloch_point(k, wg);
    let num = wg.t1() * wg.t2() * k.sin();
    if p.omega == 0.0 || num == 0.0 {
        return 0.0;
    }
    -num / p.omega
}

/// Bloch Hamiltonian `[[0, h], [h*, 0]]` in the (A, B) basis.
pub fn bloch_hamiltonian(k: f64, wg: &WaveguideParams) -> [[Complex64; 2]; 2] {
    let h = bloch_point(k, wg).h;
    let zero = Complex64::new(0.0, 0.0);
    [[zero, h], [h.conj(), zero]]
}

/// Normalized Bloch eigenvectors on the (A, B) sublattices:
/// `upper = (1, e^{-i phi}) / sqrt 2`, `lower = (-1, e^{-i phi}) / sqrt 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochEigenvectors {
    pub upper: [Complex64; 2],
    pub lower: [Complex64; 2],
}

pub fn bloch_eigenvectors(k: f64, wg: &WaveguideParams) -> Result<BlochEigenvectors> {
    let p = bloch_point(k, wg);
    if p.omega <= f64::EPSILON * wg.j {
        return Err(Error::DegenerateEigenvectors);
    }
    let n = std::f64::consts::FRAC_1_SQRT_2;
    let b = Complex64::from_polar(n, -p.phi);
    Ok(BlochEigenvectors {
        upper: [Complex64::new(n, 0.0), b],
        lower: [Complex64::new(-n, 0.0), b],
    })
}

/// Pseudospin vector with `H_k = d . sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DVector {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

pub fn d_vector(k: f64, wg: &WaveguideParams) -> DVector {
    DVector {
        dx: -wg.t1() - wg.t2() * k.cos(),
        dy: -wg.t2() * k.sin(),
        dz: 0.0,
    }
}

/// Unrounded winding of `d(k)` around the origin over the Brillouin zone,
/// accumulated from branch-safe increments `arg(d_{i+1} / d_i)`.
pub fn winding_raw(wg: &WaveguideParams, n_samples: usize) -> Result<f64> {
    if wg.delta == 0.0 {
        return Err(Error::UndefinedWinding);
    }
    if n_samples < 64 {
        return Err(Error::InvalidArgument(format!(
            "winding needs at least 64 samples, got {n_samples}"
        )));
    }
    let d = |i: usize| {
        let k = -PI + 2.0 * PI * (i as f64) / (n_samples as f64);
        let v = d_vector(k, wg);
        Complex64::new(v.dx, v.dy)
    };
    let mut total = 0.0;
    let mut prev = d(0);
    for i in 1..=n_samples {
        let next = d(i % n_samples);
        total += (next / prev).arg();
        prev = next;
    }
    Ok(total / (2.0 * PI))
}

/// Integer winding number: 0 for `delta > 0`, 1 for `delta < 0`.
pub fn winding_number(wg: &WaveguideParams, n_samples: usize) -> Result<i32> {
    let raw = winding_raw(wg, n_samples)?;
    let nu = raw.round();
    if (raw - nu).abs() >= 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "winding did not converge (raw {raw}); increase the sample count"
        )));
    }
    Ok(nu as i32)
}

/// Zak phase `nu * pi`.
pub fn zak_phase(wg: &WaveguideParams) -> Result<f64> {
    Ok(winding_number(wg, 1024)? as f64 * PI)
}
