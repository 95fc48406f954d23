//! Simulated variational quantum eigensolver: a layered hardware-efficient
//! ansatz (Rx, Ry, Rz columns plus a CNOT entangling block per layer),
//! exact or shot-sampled energy estimation, parameter-shift gradients, and
//! Adam training with a two-stage stopping rule (inner energy window, then
//! restart agreement).

mod ansatz;
mod energy;
mod train;

pub use ansatz::apply_ansatz;
pub use energy::{parameter_shift_gradient, vqe_energy};
pub use train::{train_vqe, InstanceRecord, VqeDiagnostics, VqeOutcome};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::MAX_QUBITS;

/// CNOT placement per layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// Every ordered pair (i, j), i < j, in lexicographic order — the
    /// 3-qubit reference pattern generalized to all pairs.
    AllPairsLex,
    /// Nearest-neighbor chain (i, i+1) only.
    Chain,
}

impl Entangler {
    /// (control, target) pairs for an n-qubit layer.
    pub fn pairs(&self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Entangler::AllPairsLex => {
                let mut out = Vec::with_capacity(n * (n - 1) / 2);
                for i in 0..n {
                    for j in i + 1..n {
                        out.push((i, j));
                    }
                }
                out
            }
            Entangler::Chain => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        }
    }
}

/// Circuit shape: layer count and entangler pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub n: usize,
    pub layers: usize,
    pub entangler: Entangler,
}

impl AnsatzConfig {
    /// The benchmark circuit: four layers, all-pairs entangler.
    pub fn benchmark(n: usize) -> Result<Self> {
        Self::new(n, 4, Entangler::AllPairsLex)
    }

    pub fn new(n: usize, layers: usize, entangler: Entangler) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidModel(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if layers == 0 {
            return Err(Error::Config("ansatz needs at least one layer".into()));
        }
        Ok(Self { n, layers, entangler })
    }

    /// layers · 3n rotation angles.
    pub fn num_parameters(&self) -> usize {
        self.layers * 3 * self.n
    }

    /// Flat index of (layer, column, qubit); columns are 0 = Rx, 1 = Ry, 2 = Rz.
    pub fn angle_index(&self, layer: usize, column: usize, qubit: usize) -> usize {
        debug_assert!(layer < self.layers && column < 3 && qubit < self.n);
        layer * 3 * self.n + column * self.n + qubit
    }
}

/// Rotation angles in layer-major order: per layer the Rx block, then Ry,
/// then Rz, each indexed by qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParameters {
    pub angles: Vec<f64>,
}

impl CircuitParameters {
    pub fn zeros(config: &AnsatzConfig) -> Self {
        Self {
            angles: vec![0.0; config.num_parameters()],
        }
    }

    /// Uniform angles in (−π, π].
    pub fn random<R: Rng + ?Sized>(config: &AnsatzConfig, rng: &mut R) -> Self {
        Self {
            angles: (0..config.num_parameters())
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect(),
        }
    }

    pub fn check(&self, config: &AnsatzConfig) -> Result<()> {
        if self.angles.len() != config.num_parameters() {
            return Err(Error::DimensionMismatch {
                expected: config.num_parameters(),
                got: self.angles.len(),
            });
        }
        if self.angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("circuit angle".into()));
        }
        Ok(())
    }
}

/// How ⟨H⟩ is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    Exact,
    /// Projective measurements: diagonal terms in the computational basis,
    /// X terms after a Hadamard rotation on every qubit.
    Shots,
}

/// Training configuration for the two-stage stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqeTrainConfig {
    pub learning_rate: f64,
    /// Inner convergence: the last `inner_window` energies agree within this
    /// absolute tolerance.
    pub inner_tol: f64,
    pub inner_window: usize,
    /// Restart agreement: consecutive converged energies must match within
    /// this relative tolerance.
    pub restart_tol: f64,
    pub max_restarts: usize,
    pub max_inner_epochs: usize,
    pub energy_mode: EnergyMode,
    pub shots: usize,
    pub seed: u64,
}

impl VqeTrainConfig {
    pub fn default_with_seed(seed: u64) -> Self {
        Self {
            learning_rate: 0.05,
            inner_tol: 1e-6,
            inner_window: 3,
            restart_tol: 1e-4,
            max_restarts: 5,
            max_inner_epochs: 5000,
            energy_mode: EnergyMode::Exact,
            shots: 0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner_tol <= 0.0 || self.restart_tol <= 0.0 {
            return Err(Error::Config("VQE tolerances must be positive".into()));
        }
        if self.inner_window < 2 {
            return Err(Error::Config("inner window needs at least two epochs".into()));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.energy_mode == EnergyMode::Shots && self.shots == 0 {
            return Err(Error::Config("shots mode requires a positive shot count".into()));
        }
        Ok(())
    }
}

/// Serialized trained circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedCircuit {
    pub n: usize,
    pub layers: usize,
    pub entangler: Entangler,
    pub angles: Vec<f64>,
    pub seed: u64,
    pub energy: f64,
    pub converged: bool,
}
