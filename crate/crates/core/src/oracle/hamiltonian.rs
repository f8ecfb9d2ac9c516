use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::params::{CouplingConfig, System};

/// Single-excitation Hamiltonian of an `N`-cell chain plus the emitter, over
/// the basis `[A_1, B_1, ..., A_N, B_N, e, a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeHamiltonian {
    pub matrix: DMatrix<f64>,
    pub n_cells: usize,
    pub x1: usize,
    pub coupling: CouplingConfig,
}

impl LatticeHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Index of `A_j` (cells counted from 1).
    pub fn site_a(j: usize) -> usize {
        2 * (j - 1)
    }

    pub fn site_b(j: usize) -> usize {
        2 * (j - 1) + 1
    }

    pub fn excited(&self) -> usize {
        2 * self.n_cells
    }

    pub fn metastable(&self) -> usize {
        2 * self.n_cells + 1
    }

    /// Builds the matrix without the bulk-placement checks, only requiring
    /// the coupling cell to exist.
    pub fn assemble(n_cells: usize, system: &System) -> Result<Self> {
        let x1 = system.emitter.x1;
        if n_cells == 0 || x1 < 1 || x1 as usize > n_cells {
            return Err(Error::Placement { x1, n_cells });
        }
        let x1 = x1 as usize;
        let (t1, t2) = (system.t1(), system.t2());
        let dim = 2 * n_cells + 2;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        let mut set = |i: usize, j: usize, v: f64| {
            h[(i, j)] = v;
            h[(j, i)] = v;
        };
        for j in 1..=n_cells {
            set(Self::site_a(j), Self::site_b(j), -t1);
            if j < n_cells {
                set(Self::site_b(j), Self::site_a(j + 1), -t2);
            }
        }
        let em = &system.emitter;
        let (e, a) = (2 * n_cells, 2 * n_cells + 1);
        set(e, e, em.omega_e);
        set(a, a, em.omega_e - em.delta_c);
        set(e, a, em.omega_rabi / 2.0);
        set(e, Self::site_a(x1), system.g1());
        set(e, Self::site_b(x1), system.g2());
        Ok(Self {
            matrix: h,
            n_cells,
            x1,
            coupling: system.coupling,
        })
    }
}

/// Lattice Hamiltonian with the emitter in the bulk: `N >= 8` and
/// `2 <= x1 <= N - 2`.
pub fn build_hamiltonian(n_cells: usize, system: &System) -> Result<LatticeHamiltonian> {
    let x1 = system.emitter.x1;
    if n_cells < 8 || x1 < 2 || x1 > n_cells as i64 - 2 {
        return Err(Error::Placement { x1, n_cells });
    }
    LatticeHamiltonian::assemble(n_cells, system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate, EmitterParams, WaveguideParams};

    fn system(delta: f64, coupling: CouplingConfig, g: f64, x1: i64) -> System {
        let em = EmitterParams {
            omega_e: 1.5,
            delta_c: 0.01,
            omega_rabi: 0.2,
            g,
            x1,
        };
        validate(WaveguideParams::new(delta), em, coupling).unwrap()
    }

    #[test]
    fn two_cell_structure() {
        let s = system(0.5, CouplingConfig::A, 0.2, 1);
        let h = LatticeHamiltonian::assemble(2, &s).unwrap();
        assert_eq!(h.dim(), 6);
        let mut couplings = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                if h.matrix[(i, j)] != 0.0 {
                    couplings.push(h.matrix[(i, j)]);
                }
            }
        }
        couplings.sort_by(f64::total_cmp);
        assert_eq!(couplings, [-1.5, -1.5, -0.5, 0.1, 0.2]);
        assert!(build_hamiltonian(2, &s).is_err());
    }

    #[test]
    fn blocks_and_symmetry() {
        let s = system(-0.3, CouplingConfig::ab(0.25).unwrap(), 0.2, 5);
        let h = build_hamiltonian(10, &s).unwrap();
        assert_eq!(h.matrix, h.matrix.transpose());
        for i in 0..20 {
            assert_eq!(h.matrix[(i, i)], 0.0);
        }
        assert_eq!(h.matrix[(0, 1)], -0.7);
        assert_eq!(h.matrix[(1, 2)], -1.3);
        assert_eq!(h.matrix[(20, 20)], 1.5);
        assert_eq!(h.matrix[(21, 21)], 1.49);
        assert_eq!(h.matrix[(20, 21)], 0.1);
        assert_eq!(h.matrix[(20, LatticeHamiltonian::site_a(5))], 0.05);
        assert!((h.matrix[(20, LatticeHamiltonian::site_b(5))] - 0.15).abs() < 1e-16);
        let b = build_hamiltonian(10, &s.with_coupling(CouplingConfig::B)).unwrap();
        assert_eq!(b.matrix[(20, LatticeHamiltonian::site_a(5))], 0.0);
        assert_eq!(b.matrix[(20, LatticeHamiltonian::site_b(5))], 0.2);
    }

    #[test]
    fn placement_checks() {
        let s = system(0.5, CouplingConfig::A, 0.2, 1);
        assert_eq!(
            build_hamiltonian(20, &s),
            Err(Error::Placement { x1: 1, n_cells: 20 })
        );
        assert!(build_hamiltonian(20, &s.with_x1(19)).is_err());
        assert!(build_hamiltonian(20, &s.with_x1(18)).is_ok());
        assert!(build_hamiltonian(7, &s.with_x1(3)).is_err());
    }

    #[test]
    fn decoupled_chain_spectrum_inside_bands() {
        let s = system(0.5, CouplingConfig::A, 0.0, 50);
        let h = build_hamiltonian(100, &s).unwrap();
        let chain = h.matrix.view((0, 0), (200, 200)).into_owned();
        let eig = chain.symmetric_eigenvalues();
        for e in eig.iter() {
            assert!(e.abs() >= 1.0 - 1e-9 && e.abs() <= 2.0 + 1e-9, "{e}");
        }
        // Emitter block decouples when g = 0.
        for i in 0..200 {
            assert_eq!(h.matrix[(200, i)], 0.0);
        }
    }
}
