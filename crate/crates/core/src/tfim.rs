//! The transverse-field Ising chain and its Pauli-term decomposition,
//!
//!   H = J Σ_i σ^z_i σ^z_{i+1} − h Σ_i σ^x_i,
//!
//! with an optional periodic wrap bond (n−1, 0). Benchmarks fix J = −1 and
//! sweep h over [0, 3].

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::state::{StateVector, MAX_QUBITS};

/// One weighted Pauli string of a Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub op: PauliString,
    pub coefficient: f64,
}

/// Transverse-field Ising chain parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfimModel {
    pub n: usize,
    pub j: f64,
    pub h: f64,
    pub periodic: bool,
}

impl TfimModel {
    pub fn new(n: usize, j: f64, h: f64, periodic: bool) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidModel(format!(
                "chain length {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if !j.is_finite() || !h.is_finite() {
            return Err(Error::InvalidModel(format!(
                "couplings must be finite, got J={j}, h={h}"
            )));
        }
        if periodic && n < 3 {
            // At n = 2 the wrap bond coincides with the open bond and would
            // silently double-count it.
            return Err(Error::InvalidModel(format!(
                "periodic chain needs n >= 3, got n = {n}"
            )));
        }
        Ok(Self { n, j, h, periodic })
    }

    /// Standard periodic benchmark chain at J = −1.
    pub fn periodic_ferromagnet(n: usize, h: f64) -> Result<Self> {
        Self::new(n, -1.0, h, true)
    }

    /// The term list of H: ZZ bonds in site order, then X fields in site
    /// order. At h = 0 the X terms are kept with coefficient −0.
    pub fn terms(&self) -> Vec<PauliTerm> {
        let n_bonds = if self.periodic { self.n } else { self.n - 1 };
        let mut terms = Vec::with_capacity(n_bonds + self.n);
        for i in 0..n_bonds {
            terms.push(PauliTerm {
                op: PauliString::zz(self.n, i, (i + 1) % self.n),
                coefficient: self.j,
            });
        }
        for i in 0..self.n {
            terms.push(PauliTerm {
                op: PauliString::x(self.n, i),
                coefficient: -self.h,
            });
        }
        terms
    }
}

/// Σ_k c_k ⟨ψ|P_k|ψ⟩ / ⟨ψ|ψ⟩. Unnormalized inputs are fine; an empty term
/// list yields 0 with a logged warning.
pub fn expectation_of_terms(terms: &[PauliTerm], psi: &StateVector) -> Result<f64> {
    if terms.is_empty() {
        log::warn!("expectation over an empty term list; returning 0");
        return Ok(0.0);
    }
    for t in terms {
        if t.op.n() != psi.n() {
            return Err(Error::DimensionMismatch {
                expected: 1 << t.op.n(),
                got: psi.dim(),
            });
        }
    }
    let norm_sqr = psi.norm_sqr();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroAmplitude("zero-norm state".into()));
    }
    let sum: f64 = terms
        .iter()
        .map(|t| t.coefficient * t.op.expectation_raw(psi).re)
        .sum();
    Ok(sum / norm_sqr)
}
