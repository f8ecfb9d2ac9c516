//! Agreement suite: closed forms against the transfer-matrix pipeline, the
//! boundary-matched lattice solve, and wavepacket transport.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bands::{bloch_point, momentum_from_energy};
use crate::error::Result;
use crate::oracle::{boundary_matched_solve, wavepacket_transport, WavepacketRun};
use crate::params::{validate, Band, Coupling, CouplingConfig, EmitterParams, System, WaveguideParams};
use crate::scattering::{amplitudes, pipeline};

/// Tolerance for closed form vs. pipeline and vs. lattice.
pub const AGREEMENT_TOL: f64 = 1e-10;
/// Tolerance for wavepacket transmission vs. the bandwidth-averaged formula.
pub const WAVEPACKET_TOL: f64 = 2e-2;
pub const DRAWS_PER_CONFIG: usize = 20;
pub const DEFAULT_SEED: u64 = 0x55_48_4c;

const LATTICE_CELLS: usize = 40;
const PACKET_CELLS: usize = 400;
const PACKET_SIGMA: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavepacketCase {
    pub config: Coupling,
    pub k0: f64,
    #[serde(rename = "T_analytic_avg")]
    pub t_analytic_avg: f64,
    #[serde(rename = "T_wp")]
    pub t_wp: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n_cases: usize,
    pub max_abs_error_closed_vs_matrix: f64,
    pub max_abs_error_closed_vs_lattice: f64,
    pub wavepacket_cases: Vec<WavepacketCase>,
    pub passed: bool,
}

/// One random in-band scattering problem.
#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub system: System,
    pub omega: f64,
    pub band: Band,
}

/// Random regular scattering problems for one coupling variant. The lattice
/// is `LATTICE_CELLS` long and `x1` stays at least 4 cells from either end.
pub fn random_draws(variant: Coupling, n: usize, seed: u64) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ variant as u64);
    (0..n)
        .map(|_| {
            let mag: f64 = rng.gen_range(0.1..0.9);
            let delta = if rng.gen_bool(0.5) { mag } else { -mag };
            let band = if rng.gen_bool(0.75) { Band::Upper } else { Band::Lower };
            let lo = 2.0 * mag;
            let omega = band.sign() * (lo + rng.gen_range(0.05..0.95) * (2.0 - lo));
            let coupling = match variant {
                Coupling::A => CouplingConfig::A,
                Coupling::B => CouplingConfig::B,
                Coupling::AB => CouplingConfig::ab(rng.gen_range(0.1..0.9)).expect("alpha in (0, 1)"),
            };
            let em = EmitterParams {
                omega_e: omega + rng.gen_range(-0.1..0.1),
                delta_c: rng.gen_range(-0.05..0.05),
                omega_rabi: rng.gen_range(0.0..0.3),
                g: rng.gen_range(0.05..0.3),
                x1: rng.gen_range(4..=(LATTICE_CELLS as i64 - 4)),
            };
            let system = validate(WaveguideParams::new(delta), em, coupling).expect("valid draw");
            Draw { system, omega, band }
        })
        .collect()
}

/// Largest `|t|` and `|r|` discrepancy of the pipeline and the lattice
/// against the closed form over `draws`.
pub fn agreement(draws: &[Draw]) -> Result<(f64, f64)> {
    let mut vs_matrix: f64 = 0.0;
    let mut vs_lattice: f64 = 0.0;
    for d in draws {
        let (t, r) = amplitudes(&d.system, d.omega, d.band)?;
        let sm = pipeline(&d.system, d.omega, d.band)?;
        vs_matrix = vs_matrix.max((sm.t_l - t).norm()).max((sm.r_l - r).norm());
        let lat = boundary_matched_solve(d.omega, LATTICE_CELLS, &d.system, d.band)?;
        vs_lattice = vs_lattice.max((lat.t - t).norm()).max((lat.r - r).norm());
    }
    Ok((vs_matrix, vs_lattice))
}

/// Packet-averaged `|t|^2` using the run's momentum weights.
pub fn bandwidth_average(system: &System, run: &WavepacketRun) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&k, &w) in run.momenta.iter().zip(&run.weights) {
        let omega = bloch_point(k, &system.waveguide).omega;
        // Quadrature points on a band edge carry negligible weight.
        if let Ok((t, _)) = amplitudes(system, omega, Band::Upper) {
            num += w * t.norm_sqr();
            den += w;
        }
    }
    num / den
}

/// Wavepacket settings: per coupling variant, a system and three carrier
/// energies around the emitter.
pub fn wavepacket_settings() -> Vec<(System, [f64; 3])> {
    let em = EmitterParams {
        omega_e: 1.5,
        delta_c: 0.0,
        // A weaker drive narrows the EIT pole so much that the emitter is
        // still populated when the packet reaches the chain ends.
        omega_rabi: 0.2,
        g: 0.2,
        x1: (PACKET_CELLS / 2) as i64,
    };
    let carriers = [1.3, 1.5, 1.7];
    [
        (0.5, CouplingConfig::A),
        (-0.5, CouplingConfig::B),
        (-0.5, CouplingConfig::ab(0.5).expect("alpha in (0, 1)")),
    ]
    .into_iter()
    .map(|(delta, c)| (validate(WaveguideParams::new(delta), em, c).expect("valid"), carriers))
    .collect()
}

pub fn wavepacket_case(system: &System, carrier_omega: f64) -> Result<WavepacketCase> {
    let k0 = momentum_from_energy(carrier_omega, &system.waveguide, Band::Upper)?;
    let run = wavepacket_transport(k0, PACKET_SIGMA, PACKET_CELLS, system)?;
    let avg = bandwidth_average(system, &run);
    Ok(WavepacketCase {
        config: system.coupling.variant(),
        k0,
        t_analytic_avg: avg,
        t_wp: run.t_wp,
        diff: (run.t_wp - avg).abs(),
    })
}

/// Full suite: `DRAWS_PER_CONFIG` random draws per coupling variant and
/// three wavepacket carriers per variant.
pub fn run_validation(seed: u64) -> Result<ValidationReport> {
    let variants = [Coupling::A, Coupling::B, Coupling::AB];
    let draws: Vec<Draw> = variants
        .iter()
        .flat_map(|&v| random_draws(v, DRAWS_PER_CONFIG, seed))
        .collect();
    let (vs_matrix, vs_lattice) = agreement(&draws)?;

    let jobs: Vec<(System, f64)> = wavepacket_settings()
        .into_iter()
        .flat_map(|(s, ws)| ws.into_iter().map(move |w| (s, w)))
        .collect();
    let wavepacket_cases = jobs
        .par_iter()
        .map(|(s, w)| wavepacket_case(s, *w))
        .collect::<Result<Vec<_>>>()?;

    let passed = vs_matrix < AGREEMENT_TOL
        && vs_lattice < AGREEMENT_TOL
        && wavepacket_cases.iter().all(|c| c.diff < WAVEPACKET_TOL);
    Ok(ValidationReport {
        n_cases: draws.len(),
        max_abs_error_closed_vs_matrix: vs_matrix,
        max_abs_error_closed_vs_lattice: vs_lattice,
        wavepacket_cases,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_seeded_and_in_band() {
        let a = random_draws(Coupling::AB, 20, 7);
        let b = random_draws(Coupling::AB, 20, 7);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.system, y.system);
            assert_eq!(x.omega, y.omega);
        }
        for d in &a {
            assert!(momentum_from_energy(d.omega, &d.system.waveguide, d.band).is_ok());
            assert_eq!(d.system.coupling.variant(), Coupling::AB);
        }
    }

    #[test]
    fn random_agreement() {
        for v in [Coupling::A, Coupling::B, Coupling::AB] {
            let (m, l) = agreement(&random_draws(v, 5, 11)).unwrap();
            assert!(m < AGREEMENT_TOL && l < AGREEMENT_TOL, "{v}: {m:e} {l:e}");
        }
    }
}
