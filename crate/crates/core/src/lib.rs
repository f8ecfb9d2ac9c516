//! Single-photon scattering through a dimerized (SSH) coupled-resonator
//! waveguide that carries a driven Lambda-type emitter.
//!
//! The emitter can couple to the A sublattice, the B sublattice, or both
//! (mixing parameter `alpha`). Closed-form transmission and the transfer
//! matrix pipeline live in [`scattering`]; [`oracle`] solves the same problem
//! directly on a finite lattice and is kept free of the scattering algebra so
//! the two can check each other.

pub mod bands;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod params;
pub mod scattering;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use params::{Band, Coupling, CouplingConfig, EmitterParams, System, WaveguideParams};

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Scientific notation with 12 significant digits. Used for every float the
/// CLI writes so output is byte-stable.
pub fn fmt_sci(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0.00000000000e0".
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

/// Rounds to 12 significant digits, for JSON output.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    fmt_sci(x).parse().unwrap_or(x)
}
