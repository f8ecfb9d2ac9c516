use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::{build_hamiltonian, LatticeHamiltonian};
use crate::bands::{bloch_eigenvectors, group_velocity};
use crate::error::{Error, Result};
use crate::params::System;

const NORM_TOL: f64 = 1e-8;
/// Population left on the emitter when a run is allowed to stop.
const EMITTER_CLEAR: f64 = 1e-6;
/// Probability allowed to reach the outermost `EDGE_CELLS` cells of the chain.
const EDGE_LIMIT: f64 = 1e-6;
const EDGE_CELLS: usize = 5;
const QUADRATURE_POINTS: usize = 1601;

/// Exact propagator from the eigendecomposition of a real symmetric
/// Hamiltonian.
pub struct Propagator {
    energies: DVector<f64>,
    modes: DMatrix<f64>,
}

impl Propagator {
    pub fn new(h: &LatticeHamiltonian) -> Self {
        let eig = SymmetricEigen::new(h.matrix.clone());
        Self {
            energies: eig.eigenvalues,
            modes: eig.eigenvectors,
        }
    }

    /// `exp(-i H t) state`.
    pub fn apply(&self, state: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let re = state.map(|c| c.re);
        let im = state.map(|c| c.im);
        let cr = self.modes.tr_mul(&re);
        let ci = self.modes.tr_mul(&im);
        let mut rot_re = DVector::<f64>::zeros(cr.len());
        let mut rot_im = DVector::<f64>::zeros(cr.len());
        for i in 0..cr.len() {
            let c = Complex64::new(cr[i], ci[i]) * Complex64::from_polar(1.0, -self.energies[i] * t);
            rot_re[i] = c.re;
            rot_im[i] = c.im;
        }
        let out_re = &self.modes * rot_re;
        let out_im = &self.modes * rot_im;
        DVector::from_fn(state.len(), |i, _| Complex64::new(out_re[i], out_im[i]))
    }
}

/// Evolves a normalized state for time `t`.
pub fn evolve(
    state: &DVector<Complex64>,
    h: &LatticeHamiltonian,
    t: f64,
) -> Result<DVector<Complex64>> {
    if state.len() != h.dim() {
        return Err(Error::InvalidArgument(format!(
            "state has {} entries, Hamiltonian is {}-dimensional",
            state.len(),
            h.dim()
        )));
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!(
            "state norm {norm} is not 1"
        )));
    }
    let out = Propagator::new(h).apply(state, t);
    let drift = (out.norm() - norm).abs();
    if drift > NORM_TOL {
        return Err(Error::IntegrationAccuracy { drift });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketRun {
    pub k0: f64,
    pub sigma_x: f64,
    pub n_cells: usize,
    pub x1: usize,
    /// Total evolution time.
    pub time: f64,
    /// Probability on cells right of `x1`.
    pub t_wp: f64,
    /// Probability on cells left of `x1`.
    pub r_wp: f64,
    /// Probability left on cell `x1` and the emitter.
    pub residual: f64,
    pub norm_drift: f64,
    /// Quadrature momenta `|k|` of the packet and their probability weights
    /// (unnormalized), for averaging stationary results over the packet.
    pub momenta: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Sends a Gaussian upper-band packet at the emitter and measures how much
/// gets through.
///
/// The packet is built in momentum space with amplitudes
/// `exp(-(k - kc)^2 sigma_x^2 / 2)` (so `sigma_x sigma_k = 1` for the
/// amplitude), projected on the upper Bloch eigenvector, and starts
/// `4 sigma_x` cells left of `x1`, which needs `x1 >= 8 sigma_x`. Since the
/// upper band moves towards negative cells for k in (0, pi), the
/// right-moving carrier is `kc = -k0`.
/// The run lasts until the packet centre has travelled `8 sigma_x` and the
/// emitter population is below `1e-6`; the chain must be long enough that
/// nothing reaches its last cells before then.
pub fn wavepacket_transport(
    k0: f64,
    sigma_x: f64,
    n_cells: usize,
    system: &System,
) -> Result<WavepacketRun> {
    if !(k0 > 0.2 && k0 < PI - 0.2) {
        return Err(Error::InvalidArgument(format!(
            "carrier k0 = {k0} must lie in (0.2, pi - 0.2)"
        )));
    }
    if !(sigma_x >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma_x = {sigma_x} must be at least one cell"
        )));
    }
    if (n_cells as f64) < 10.0 * sigma_x {
        return Err(Error::ChainTooShort);
    }
    let h = build_hamiltonian(n_cells, system)?;
    let x1 = h.x1;
    let x0 = x1 as f64 - 4.0 * sigma_x;
    if x0 - 4.0 * sigma_x < 0.0 || x1 as f64 + 9.0 * sigma_x > n_cells as f64 {
        return Err(Error::ChainTooShort);
    }

    let wg = &system.waveguide;
    let kc = -k0;
    let half = 8.0 / sigma_x;
    let dk = 2.0 * half / (QUADRATURE_POINTS - 1) as f64;
    let ks: Vec<f64> = (0..QUADRATURE_POINTS)
        .map(|i| kc - half + dk * i as f64)
        .collect();
    let amps: Vec<f64> = ks
        .iter()
        .map(|k| (-(k - kc).powi(2) * sigma_x * sigma_x / 2.0).exp())
        .collect();
    let mut psi = DVector::<Complex64>::zeros(h.dim());
    for (&k, &c) in ks.iter().zip(&amps) {
        if c < 1e-300 {
            continue;
        }
        let u = bloch_eigenvectors(k, wg)?.upper;
        for j in 1..=n_cells {
            let wave = c * Complex64::from_polar(1.0, k * (j as f64 - x0));
            psi[LatticeHamiltonian::site_a(j)] += wave * u[0];
            psi[LatticeHamiltonian::site_b(j)] += wave * u[1];
        }
    }
    let norm = psi.norm();
    psi /= Complex64::new(norm, 0.0);

    let speed = group_velocity(k0, wg).abs();
    if speed == 0.0 {
        return Err(Error::InvalidArgument("carrier has zero group velocity".into()));
    }
    let prop = Propagator::new(&h);
    let cell_prob = |v: &DVector<Complex64>, j: usize| {
        v[LatticeHamiltonian::site_a(j)].norm_sqr() + v[LatticeHamiltonian::site_b(j)].norm_sqr()
    };

    let step = sigma_x / speed;
    let mut time = 8.0 * step;
    let out = loop {
        let out = prop.apply(&psi, time);
        let edge: f64 = (1..=EDGE_CELLS)
            .chain(n_cells + 1 - EDGE_CELLS..=n_cells)
            .map(|j| cell_prob(&out, j))
            .sum();
        if edge > EDGE_LIMIT {
            return Err(Error::ChainTooShort);
        }
        let emitter = out[h.excited()].norm_sqr() + out[h.metastable()].norm_sqr();
        if emitter < EMITTER_CLEAR {
            break out;
        }
        time += step;
    };

    let norm_drift = (out.norm() - 1.0).abs();
    if norm_drift > NORM_TOL {
        return Err(Error::IntegrationAccuracy { drift: norm_drift });
    }
    let t_wp: f64 = (x1 + 1..=n_cells).map(|j| cell_prob(&out, j)).sum();
    let r_wp: f64 = (1..x1).map(|j| cell_prob(&out, j)).sum();
    let residual =
        cell_prob(&out, x1) + out[h.excited()].norm_sqr() + out[h.metastable()].norm_sqr();

    Ok(WavepacketRun {
        k0,
        sigma_x,
        n_cells,
        x1,
        time,
        t_wp,
        r_wp,
        residual,
        norm_drift,
        momenta: ks.iter().map(|k| k.abs()).collect(),
        weights: amps.iter().map(|c| c * c).collect(),
    })
}
