//! Two-site DMRG ground-state search: an MPO encoding of the Hamiltonian,
//! left/right environment caches, an iterative local eigensolver on each
//! neighboring tensor pair, and SVD splits with bond-dimension and
//! discarded-weight truncation.
//!
//! Everything is real f64: the TFIM Hamiltonian is real symmetric, so its
//! ground MPS can be taken real.

mod mpo;
mod mps;
mod solver;

pub use mpo::{build_tfim_mpo, Mpo};
pub use mps::Mps;
pub use solver::{dmrg_ground_state, DmrgDiagnostics};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// DMRG run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmrgConfig {
    /// Maximum bond dimension D.
    pub max_bond: usize,
    /// Discarded-weight threshold per SVD split.
    pub svd_cutoff: f64,
    pub max_sweeps: usize,
    /// Stop when |ΔE| between successive full sweeps falls below this.
    pub energy_tol: f64,
    /// Lanczos iteration cap for each local two-site solve.
    pub local_solver_iters: usize,
    pub seed: u64,
}

impl DmrgConfig {
    pub fn new(max_bond: usize, seed: u64) -> Self {
        Self {
            max_bond,
            svd_cutoff: 1e-12,
            max_sweeps: 50,
            energy_tol: 1e-10,
            local_solver_iters: 30,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_bond < 2 {
            return Err(Error::Config("DMRG bond dimension must be at least 2".into()));
        }
        if self.energy_tol <= 0.0 {
            return Err(Error::Config("DMRG energy tolerance must be positive".into()));
        }
        if self.max_sweeps == 0 || self.local_solver_iters == 0 {
            return Err(Error::Config("DMRG iteration counts must be positive".into()));
        }
        Ok(())
    }
}
