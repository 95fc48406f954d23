//! Ground-state benchmarking of the transverse-field Ising chain.
//!
//! Four solvers — exact diagonalization, a restricted-Boltzmann-machine
//! neural quantum state trained by variational Monte Carlo, two-site DMRG
//! over matrix product states, and a simulated variational quantum
//! eigensolver — all produce dense statevectors that get scored on energy
//! accuracy, 2-Rényi stabilizer entropy (magic) accuracy, and infidelity
//! against the exact ground state across the phase diagram.
//!
//! Conventions, fixed once and tested:
//!   - little-endian basis indexing: qubit `j` is bit `j`
//!   - bit set ⇔ σ = −1, so index 0 is the all-up ferromagnet
//!   - Pauli strings are Hermitian: P(x, z) = i^{|x∧z|} X(x) Z(z)
//!   - rotation gates are R_a(θ) = exp(−i θ σ^a / 2)
//!   - logarithms in stabilizer entropies are base 2

pub mod dmrg;
pub mod error;
pub mod exact;
pub mod gates;
pub mod linalg;
pub mod magic;
pub mod nqs;
pub mod pauli;
pub mod state;
pub mod seeding;
pub mod sweep;
pub mod tfim;
pub mod vqe;

pub use dmrg::{build_tfim_mpo, dmrg_ground_state, DmrgConfig, Mpo, Mps};
pub use error::{Error, Result};
pub use exact::{dense_hamiltonian, ground_state_ed, GoldenCache, GoldenEntry, GroundState};
pub use magic::{infidelity, m2_fast, m2_naive, pauli_z_spectrum, MagicResult};
pub use nqs::{
    log_amplitude, log_amplitude_symmetric, rbm_statevector, train_rbm, AmplitudeKind,
    RbmParameters, SamplerConfig, TrainConfig,
};
pub use pauli::PauliString;
pub use state::{SpinConfiguration, StateVector};
pub use sweep::{
    aggregate, default_h_grid, emit_report, run_sweep, AggregateRow, BenchmarkRecord, Method,
    SweepConfig,
};
pub use tfim::{expectation_of_terms, PauliTerm, TfimModel};
pub use vqe::{
    apply_ansatz, parameter_shift_gradient, train_vqe, AnsatzConfig, CircuitParameters, Entangler,
    VqeTrainConfig,
};
