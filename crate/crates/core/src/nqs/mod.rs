//! Restricted-Boltzmann-machine neural quantum state with variational Monte
//! Carlo training: analytic hidden-layer summation, optional Z₂
//! symmetrization, Metropolis sampling, stochastic-reconfiguration
//! preconditioning, and Adam updates with improvement-based early stopping.

mod rbm;
mod sampler;
mod vmc;

pub use rbm::{
    log_amplitude, log_amplitude_symmetric, log_derivatives, rbm_statevector, ThetaCache,
    LOG_ZERO,
};
pub use sampler::sample;
pub use vmc::{energy_and_gradient, local_energy, train_rbm, EnergyGradient, EstimatorInput};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::MAX_QUBITS;

/// Which amplitude the RBM exposes: the raw network or its Z₂-symmetrized
/// mean over a configuration and its global spin flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeKind {
    Conventional,
    Symmetric,
}

/// Complex RBM parameters θ = {a, b, W} with M = α·N hidden units.
///
/// Packed ordering (used by gradients, the covariance matrix, and the
/// optimizer) is a[0..n], b[0..m], then W row-major as w[i·n + j].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmParameters {
    n: usize,
    m: usize,
    visible_bias: Vec<C64>,
    hidden_bias: Vec<C64>,
    weights: Vec<C64>,
}

impl RbmParameters {
    pub fn new(
        n: usize,
        m: usize,
        visible_bias: Vec<C64>,
        hidden_bias: Vec<C64>,
        weights: Vec<C64>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS || m == 0 {
            return Err(Error::InvalidModel(format!(
                "RBM sizes out of range: n = {n}, m = {m}"
            )));
        }
        if visible_bias.len() != n || hidden_bias.len() != m || weights.len() != m * n {
            return Err(Error::DimensionMismatch {
                expected: n + m + m * n,
                got: visible_bias.len() + hidden_bias.len() + weights.len(),
            });
        }
        let finite = visible_bias
            .iter()
            .chain(&hidden_bias)
            .chain(&weights)
            .all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::NonFinite("RBM parameter".into()));
        }
        Ok(Self {
            n,
            m,
            visible_bias,
            hidden_bias,
            weights,
        })
    }

    /// All-zero parameters (the uniform wavefunction, amplitude 2^M).
    pub fn zeros(n: usize, alpha: usize) -> Result<Self> {
        let m = alpha * n;
        Self::new(
            n,
            m,
            vec![C64::new(0.0, 0.0); n],
            vec![C64::new(0.0, 0.0); m],
            vec![C64::new(0.0, 0.0); m * n],
        )
    }

    /// Complex Gaussian initialization with the given per-component scale.
    pub fn random<R: Rng + ?Sized>(n: usize, alpha: usize, scale: f64, rng: &mut R) -> Result<Self> {
        let m = alpha * n;
        let mut draw = |len: usize| -> Vec<C64> {
            (0..len)
                .map(|_| {
                    C64::new(
                        scale * rng.sample::<f64, _>(StandardNormal),
                        scale * rng.sample::<f64, _>(StandardNormal),
                    )
                })
                .collect()
        };
        let a = draw(n);
        let b = draw(m);
        let w = draw(m * n);
        Self::new(n, m, a, b, w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn visible_bias(&self) -> &[C64] {
        &self.visible_bias
    }

    pub fn hidden_bias(&self) -> &[C64] {
        &self.hidden_bias
    }

    /// W in row-major M×N layout.
    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> C64 {
        self.weights[i * self.n + j]
    }

    /// Total parameter count N + M + M·N.
    pub fn num_params(&self) -> usize {
        self.n + self.m + self.m * self.n
    }

    /// Flatten into the packed ordering.
    pub fn to_packed(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.num_params());
        out.extend_from_slice(&self.visible_bias);
        out.extend_from_slice(&self.hidden_bias);
        out.extend_from_slice(&self.weights);
        out
    }

    /// Rebuild from the packed ordering.
    pub fn from_packed(n: usize, m: usize, packed: &[C64]) -> Result<Self> {
        if packed.len() != n + m + m * n {
            return Err(Error::DimensionMismatch {
                expected: n + m + m * n,
                got: packed.len(),
            });
        }
        Self::new(
            n,
            m,
            packed[..n].to_vec(),
            packed[n..n + m].to_vec(),
            packed[n + m..].to_vec(),
        )
    }
}

/// Metropolis sampling configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_samples: usize,
    pub n_chains: usize,
    /// Full sweeps (N proposed flips each) discarded before recording.
    pub burn_in_sweeps: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(n_samples: usize, n_chains: usize, burn_in_sweeps: usize, seed: u64) -> Result<Self> {
        let config = Self {
            n_samples,
            n_chains,
            burn_in_sweeps,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    /// Benchmark default: 1,000 samples over 8 chains, 100 burn-in sweeps.
    pub fn default_for(n: usize, seed: u64) -> Self {
        let n_samples = if n >= 12 { 5000 } else { 1000 };
        Self {
            n_samples,
            n_chains: 8,
            burn_in_sweeps: 100,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.n_chains == 0 {
            return Err(Error::Config("sample and chain counts must be positive".into()));
        }
        if self.n_samples % self.n_chains != 0 {
            return Err(Error::Config(format!(
                "n_samples = {} not divisible by n_chains = {}",
                self.n_samples, self.n_chains
            )));
        }
        if self.burn_in_sweeps == 0 {
            return Err(Error::Config("burn-in must be at least one sweep".into()));
        }
        Ok(())
    }

    pub fn samples_per_chain(&self) -> usize {
        self.n_samples / self.n_chains
    }
}

/// How expectations over the wavefunction are evaluated during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpectationMode {
    MonteCarlo,
    FullSum,
}

/// Training configuration for stochastic reconfiguration + Adam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Diagonal regularization added to the covariance before the SR solve.
    pub sr_shift: f64,
    pub max_epochs: usize,
    /// Relative improvement below this counts as stagnation...
    pub stop_tol: f64,
    /// ...and this many consecutive stagnant epochs stop the run.
    pub stop_patience: usize,
    pub expectation_mode: ExpectationMode,
    pub symmetric: bool,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stop_tol <= 0.0 {
            return Err(Error::Config("stop_tol must be positive".into()));
        }
        if self.stop_patience == 0 {
            return Err(Error::Config("stop_patience must be at least 1".into()));
        }
        if self.learning_rate <= 0.0 || self.sr_shift < 0.0 {
            return Err(Error::Config("learning rate and SR shift must be positive".into()));
        }
        Ok(())
    }

    pub fn amplitude_kind(&self) -> AmplitudeKind {
        if self.symmetric {
            AmplitudeKind::Symmetric
        } else {
            AmplitudeKind::Conventional
        }
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            sr_shift: 1e-3,
            max_epochs: 20_000,
            stop_tol: 1e-7,
            stop_patience: 500,
            expectation_mode: ExpectationMode::MonteCarlo,
            symmetric: false,
        }
    }
}

/// Per-epoch energies and the stopping outcome of one training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainHistory {
    pub energies: Vec<f64>,
    pub converged: bool,
    pub epochs: usize,
    pub final_energy: f64,
    /// Monte Carlo standard error of the last epoch's energy (0 for full sums).
    pub final_std_error: f64,
}

/// Self-describing serialization of a trained RBM.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedRbm {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    #[serde(rename = "W")]
    pub w: Vec<Vec<C64>>,
    pub symmetric: bool,
    pub seed: u64,
    pub history: TrainHistory,
}

impl TrainedRbm {
    pub fn new(params: &RbmParameters, symmetric: bool, seed: u64, history: TrainHistory) -> Self {
        let w = (0..params.m())
            .map(|i| (0..params.n()).map(|j| params.weight(i, j)).collect())
            .collect();
        Self {
            n: params.n(),
            m: params.m(),
            a: params.visible_bias().to_vec(),
            b: params.hidden_bias().to_vec(),
            w,
            symmetric,
            seed,
            history,
        }
    }

    pub fn parameters(&self) -> Result<RbmParameters> {
        let mut weights = Vec::with_capacity(self.m * self.n);
        for row in &self.w {
            weights.extend_from_slice(row);
        }
        RbmParameters::new(self.n, self.m, self.a.clone(), self.b.clone(), weights)
    }
}
