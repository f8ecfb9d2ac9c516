//! Finite-lattice reference solutions built straight from the real-space
//! Hamiltonian. Nothing here depends on the transfer-matrix algebra, so these
//! results can arbitrate the closed forms.

mod boundary;
mod hamiltonian;
mod wavepacket;

pub use boundary::{boundary_matched_solve, ScatterSolution};
pub use hamiltonian::{build_hamiltonian, LatticeHamiltonian};
pub use wavepacket::{evolve, wavepacket_transport, Propagator, WavepacketRun};
