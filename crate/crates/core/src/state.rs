//! Spin configurations and dense statevectors in the computational basis.
//!
//! Indexing is little-endian throughout the crate: qubit `j` is bit `j` of
//! the basis index. A set bit encodes spin down (σ = −1), a clear bit spin up
//! (σ = +1), so index 0 is the all-up product state.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest qubit count representable by the bitmask types in this crate.
pub const MAX_QUBITS: usize = 16;

/// Tolerance on |Σ|ψ|² − 1| for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// One z-basis spin configuration of an `n`-site chain, packed into a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    bits: usize,
    n: usize,
}

impl SpinConfiguration {
    pub fn new(n: usize, bits: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidModel(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if bits >> n != 0 {
            return Err(Error::InvalidModel(format!(
                "configuration bits {bits:#x} exceed {n} qubits"
            )));
        }
        Ok(Self { bits, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// σ_j ∈ {+1, −1}; bit set means −1.
    pub fn sigma(&self, j: usize) -> f64 {
        debug_assert!(j < self.n);
        if (self.bits >> j) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Configuration with spin `j` flipped.
    pub fn flipped(&self, j: usize) -> Self {
        debug_assert!(j < self.n);
        Self {
            bits: self.bits ^ (1 << j),
            n: self.n,
        }
    }

    /// Configuration with every spin flipped (the global Z₂ image).
    pub fn global_flip(&self) -> Self {
        Self {
            bits: self.bits ^ ((1 << self.n) - 1),
            n: self.n,
        }
    }
}

/// Dense 2^n-amplitude wavefunction over the z basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    n: usize,
}

impl StateVector {
    /// Wrap raw amplitudes; the length must be exactly 2^n.
    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidModel(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        Ok(Self { amps, n })
    }

    /// The basis state |index⟩.
    pub fn computational_basis(n: usize, index: usize) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS && index < (1 << n));
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Self { amps, n }
    }

    /// The uniform superposition |+⟩^⊗n.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS);
        let dim = 1usize << n;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amps: vec![a; dim],
            n,
        }
    }

    /// A Haar-ish random state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS);
        let amps: Vec<C64> = (0..1usize << n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut state = Self { amps, n };
        state.normalize();
        state
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescale to unit norm. No-op direction is undefined on the zero vector.
    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Error unless normalized within [`NORM_TOL`].
    pub fn require_normalized(&self) -> Result<()> {
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev <= NORM_TOL {
            Ok(())
        } else {
            Err(Error::NotNormalized { deviation: dev })
        }
    }

    /// ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product; `self` occupies the low bits of the combined index.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::Capability(format!(
                "tensor product of {} and {} qubits exceeds {MAX_QUBITS}",
                self.n, other.n
            )));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { amps, n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_encoding_bit_set_is_down() {
        let s = SpinConfiguration::new(4, 0b0101).unwrap();
        assert_eq!(s.sigma(0), -1.0);
        assert_eq!(s.sigma(1), 1.0);
        assert_eq!(s.sigma(2), -1.0);
        assert_eq!(s.sigma(3), 1.0);
        assert_eq!(s.global_flip().bits(), 0b1010);
        assert_eq!(s.flipped(1).bits(), 0b0111);
    }

    #[test]
    fn configuration_bounds_checked() {
        assert!(SpinConfiguration::new(0, 0).is_err());
        assert!(SpinConfiguration::new(17, 0).is_err());
        assert!(SpinConfiguration::new(3, 0b1000).is_err());
        assert!(SpinConfiguration::new(3, 0b111).is_ok());
    }

    #[test]
    fn basis_and_uniform_states() {
        let zero = StateVector::computational_basis(3, 0);
        assert!(zero.is_normalized());
        assert_eq!(zero.amplitudes()[0], C64::new(1.0, 0.0));

        let plus = StateVector::uniform(3);
        assert!(plus.is_normalized());
        let overlap = plus.inner(&zero).unwrap();
        assert!((overlap.re - 1.0 / 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn from_amplitudes_validates_length() {
        let err = StateVector::from_amplitudes(3, vec![C64::new(1.0, 0.0); 7]);
        assert!(matches!(
            err,
            Err(Error::DimensionMismatch {
                expected: 8,
                got: 7
            })
        ));
    }

    #[test]
    fn kron_orders_low_bits_first() {
        // |1> ⊗ |0> should put the excitation in bit 0.
        let one = StateVector::computational_basis(1, 1);
        let zero = StateVector::computational_basis(1, 0);
        let prod = one.kron(&zero).unwrap();
        assert_eq!(prod.amplitudes()[0b01], C64::new(1.0, 0.0));
    }

    #[test]
    fn random_state_is_normalized() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let psi = StateVector::random(5, &mut rng);
        assert!(psi.is_normalized());
    }
}
