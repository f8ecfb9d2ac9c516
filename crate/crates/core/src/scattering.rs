//! Effective potential of the driven emitter, transfer and scattering
//! matrices, and closed-form transmission/reflection amplitudes.
//!
//! Amplitude convention: a photon in band `s = +-1` with momentum `k` in
//! (0, pi) has sublattice amplitudes `u_A(j) = s e^{i(kj + phi)}`,
//! `u_B(j) = e^{ikj}`. The transfer matrix maps `(psi_k^in, psi_-k^out)` on
//! the left of the emitter to `(psi_k^out, psi_-k^in)` on the right.

use std::ops::Mul;

use num_complex::Complex64;

use crate::bands::{bloch_point, momentum_from_energy};
use crate::error::{Error, Result};
use crate::params::{Band, Coupling, System};

/// Potential denominators smaller than this (in units of J) are singular.
pub const SINGULAR_TOL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Energy-dependent scattering strength of the driven emitter.
///
/// `v = 4 g^2 G`; the AB split `v1, v2, v3` uses `g1 = g alpha` and
/// `g2 = g (1 - alpha)` and is filled by [`EffectivePotential::split`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePotential {
    pub v: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub g_factor: f64,
}

impl EffectivePotential {
    /// Sublattice-resolved potentials `4 g1^2 G`, `4 g1 g2 G`, `4 g2^2 G`.
    pub fn split(mut self, g1: f64, g2: f64) -> Self {
        self.v1 = 4.0 * g1 * g1 * self.g_factor;
        self.v2 = 4.0 * g1 * g2 * self.g_factor;
        self.v3 = 4.0 * g2 * g2 * self.g_factor;
        self
    }
}

/// `G = (dk + dc) / [4 dk (dk + dc) - omega_rabi^2]`, reducing to
/// `1 / (4 dk)` without drive.
pub fn g_factor(delta_k: f64, delta_c: f64, omega_rabi: f64) -> Result<f64> {
    let (num, den) = if omega_rabi == 0.0 {
        (1.0, 4.0 * delta_k)
    } else {
        (
            delta_k + delta_c,
            4.0 * delta_k * (delta_k + delta_c) - omega_rabi * omega_rabi,
        )
    };
    if den.abs() < SINGULAR_TOL {
        return Err(Error::PotentialSingularity { delta_k });
    }
    Ok(num / den)
}

/// Effective potential for total coupling `g`. The split fields are set as
/// if the whole coupling went through one site (`v1 = v2 = v3 = v`).
pub fn effective_potential(
    delta_k: f64,
    delta_c: f64,
    omega_rabi: f64,
    g: f64,
) -> Result<EffectivePotential> {
    let g_factor = g_factor(delta_k, delta_c, omega_rabi)?;
    let v = 4.0 * g * g * g_factor;
    Ok(EffectivePotential {
        v,
        v1: v,
        v2: v,
        v3: v,
        g_factor,
    })
}

/// `V = num / den` with the pole kept in `den`, so formulas can be cleared
/// of it and stay finite when the potential diverges.
fn potential_ratio(delta_k: f64, delta_c: f64, omega_rabi: f64, g: f64) -> (f64, f64) {
    if omega_rabi == 0.0 {
        (g * g, delta_k)
    } else {
        (
            4.0 * g * g * (delta_k + delta_c),
            4.0 * delta_k * (delta_k + delta_c) - omega_rabi * omega_rabi,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub t11: Complex64,
    pub t12: Complex64,
    pub t21: Complex64,
    pub t22: Complex64,
    /// Determinant, tracked analytically through products. Near a
    /// transmission zero the entries grow like `1 / |t|` and the entry
    /// formula loses all precision, while this stays exact.
    pub det: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        t11: ONE,
        t12: Complex64::new(0.0, 0.0),
        t21: Complex64::new(0.0, 0.0),
        t22: ONE,
        det: ONE,
    };

    /// Matrix with its determinant taken from the entries.
    pub fn new(t11: Complex64, t12: Complex64, t21: Complex64, t22: Complex64) -> Self {
        Self {
            t11,
            t12,
            t21,
            t22,
            det: t11 * t22 - t12 * t21,
        }
    }

    /// `t11 t22 - t12 t21` evaluated from the entries.
    pub fn entries_det(&self) -> Complex64 {
        self.t11 * self.t22 - self.t12 * self.t21
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, o: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            t11: self.t11 * o.t11 + self.t12 * o.t21,
            t12: self.t11 * o.t12 + self.t12 * o.t22,
            t21: self.t21 * o.t11 + self.t22 * o.t21,
            t22: self.t21 * o.t12 + self.t22 * o.t22,
            det: self.det * o.det,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub t_l: Complex64,
    pub t_r: Complex64,
    pub r_l: Complex64,
    pub r_r: Complex64,
}

/// Transfer matrix of the emitter for a photon of momentum `k` in `band`.
///
/// A and B use the single-site forms; AB is the product of the two
/// single-site steps with the cross potential `v2` carried between them.
pub fn transfer_matrix(system: &System, k: f64, band: Band) -> Result<TransferMatrix> {
    let wg = &system.waveguide;
    let em = &system.emitter;
    let (t1, t2) = (system.t1(), system.t2());
    let p = bloch_point(k, wg);
    let s = band.sign();
    let phi = p.phi;
    let x1 = em.x1 as f64;
    let energy = s * p.omega;
    let pot = effective_potential(energy - em.omega_e, em.delta_c, em.omega_rabi, em.g)?
        .split(system.g1(), system.g2());

    let theta = k * x1 + phi;
    let e_theta = Complex64::from_polar(1.0, 2.0 * theta);
    let e_kx = Complex64::from_polar(1.0, 2.0 * k * x1);

    match system.coupling.variant() {
        Coupling::A => {
            let den = 2.0 * I * t2 * (k + phi).sin();
            let sv = s * pot.v;
            Ok(TransferMatrix {
                t11: ONE + sv / den,
                t12: sv / e_theta / den,
                t21: -sv * e_theta / den,
                t22: ONE - sv / den,
                det: ONE,
            })
        }
        Coupling::B => {
            let den = 2.0 * I * t1 * phi.sin();
            let sv = s * pot.v;
            Ok(TransferMatrix {
                t11: ONE - sv / den,
                t12: -sv / e_kx / den,
                t21: sv * e_kx / den,
                t22: ONE + sv / den,
                det: ONE,
            })
        }
        Coupling::AB => {
            // First step: A-site equation of motion, with the B-site
            // amplitude at x1 feeding in through v2.
            let den1 = 2.0 * I * (t2 * (k + phi).sin() + pot.v2 * phi.sin());
            if den1.norm() < SINGULAR_TOL {
                return Err(Error::DegenerateDenominator);
            }
            let c_a = [
                s * Complex64::from_polar(1.0, theta),
                s * Complex64::from_polar(1.0, -theta),
            ];
            let c_b = [
                Complex64::from_polar(1.0, k * x1),
                Complex64::from_polar(1.0, -k * x1),
            ];
            let back = Complex64::from_polar(1.0, -theta);
            let row: [Complex64; 2] =
                std::array::from_fn(|i| -(pot.v1 * c_a[i] + pot.v2 * c_b[i]) * back / den1);
            let step1 = TransferMatrix {
                t11: ONE - row[0],
                t12: -row[1],
                t21: e_theta * row[0],
                t22: ONE + e_theta * row[1],
                det: ONE - 2.0 * I * pot.v2 * phi.sin() / den1,
            };

            // Second step: B-site equation of motion.
            let den2 = 2.0 * I * s * t2 * (k + phi).sin();
            let back = Complex64::from_polar(1.0, -k * x1);
            let row: [Complex64; 2] =
                std::array::from_fn(|i| (pot.v2 * c_a[i] + pot.v3 * c_b[i]) * back / den2);
            let step2 = TransferMatrix {
                t11: ONE + row[0],
                t12: row[1],
                t21: -e_kx * row[0],
                t22: ONE - e_kx * row[1],
                det: ONE + 2.0 * I * s * pot.v2 * phi.sin() / den2,
            };
            Ok(step2 * step1)
        }
    }
}

/// Rearranges a transfer matrix into transmission and reflection amplitudes.
/// A vanishing `t22` is reported as total reflection.
pub fn scattering_matrix(u: &TransferMatrix) -> ScatteringMatrix {
    if u.t22.norm() < SINGULAR_TOL {
        return ScatteringMatrix {
            t_l: Complex64::new(0.0, 0.0),
            t_r: Complex64::new(0.0, 0.0),
            r_l: ONE,
            r_r: ONE,
        };
    }
    ScatteringMatrix {
        t_l: u.det / u.t22,
        t_r: ONE / u.t22,
        r_l: -u.t21 / u.t22,
        r_r: u.t12 / u.t22,
    }
}

/// Scattering matrix at photon energy `omega` through the transfer-matrix
/// pipeline. Fails at potential singularities.
pub fn pipeline(system: &System, omega: f64, band: Band) -> Result<ScatteringMatrix> {
    let k = momentum_from_energy(omega, &system.waveguide, band)?;
    Ok(scattering_matrix(&transfer_matrix(system, k, band)?))
}

/// Closed-form transmission and reflection amplitudes `(t, r)`.
///
/// Both are written with the potential's denominator multiplied through,
/// so they stay finite (and unitary) where the potential diverges.
pub fn amplitudes(system: &System, omega: f64, band: Band) -> Result<(Complex64, Complex64)> {
    let wg = &system.waveguide;
    let em = &system.emitter;
    let k = momentum_from_energy(omega, wg, band)?;
    if em.g == 0.0 {
        return Ok((ONE, Complex64::new(0.0, 0.0)));
    }
    let (t1, t2) = (system.t1(), system.t2());
    let s = band.sign();
    let phi = bloch_point(k, wg).phi;
    let alpha = system.coupling.alpha();
    let c = alpha * (1.0 - alpha);
    let (num, den) = potential_ratio(omega - em.omega_e, em.delta_c, em.omega_rabi, em.g);

    let sin_k = k.sin();
    let e_phi = Complex64::from_polar(1.0, phi);
    let a_s = 2.0 * c * (s * e_phi.conj() - 1.0) + 1.0;
    let denom = 2.0 * I * t1 * t2 * sin_k * den + num * omega * a_s;
    let t = 2.0 * I * t2 * sin_k * (t1 * den - c * num) / denom;
    let w = alpha * s * e_phi + (1.0 - alpha);
    let phase = Complex64::from_polar(1.0, 2.0 * k * em.x1 as f64);
    let r = -num * omega * phase * w * w / denom;
    Ok((t, r))
}

/// Closed-form transmission amplitude at photon energy `omega`.
pub fn transmittance(system: &System, omega: f64, band: Band) -> Result<Complex64> {
    amplitudes(system, omega, band).map(|(t, _)| t)
}

/// Closed-form reflection amplitude (left incidence) at photon energy `omega`.
pub fn reflectance(system: &System, omega: f64, band: Band) -> Result<Complex64> {
    amplitudes(system, omega, band).map(|(_, r)| r)
}
