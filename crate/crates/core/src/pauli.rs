//! N-qubit Pauli strings over a pair of bitmasks.
//!
//! A string is stored as (x_mask, z_mask) and represents the operator
//!
//!   P(x, z) = i^{|x ∧ z|} · X(x) · Z(z),
//!
//! where |·| counts set bits. The i^{|x∧z|} prefactor makes every P
//! Hermitian with ±1 eigenvalues (single-qubit (1,1) is exactly Y), and the
//! 4^n mask pairs enumerate the Pauli group modulo phase.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::{StateVector, MAX_QUBITS};

const I_POW: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

/// i^k for integer k.
#[inline]
pub(crate) fn i_pow(k: u32) -> C64 {
    I_POW[(k & 3) as usize]
}

/// A Hermitian N-qubit Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    x_mask: usize,
    z_mask: usize,
    n: usize,
}

impl PauliString {
    pub fn new(n: usize, x_mask: usize, z_mask: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidModel(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if x_mask >> n != 0 || z_mask >> n != 0 {
            return Err(Error::InvalidModel(format!(
                "mask ({x_mask:#x}, {z_mask:#x}) exceeds {n} qubits"
            )));
        }
        Ok(Self { x_mask, z_mask, n })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, 0, 0).expect("identity mask always valid")
    }

    pub fn x(n: usize, site: usize) -> Self {
        Self::new(n, 1 << site, 0).expect("single-site mask valid")
    }

    pub fn y(n: usize, site: usize) -> Self {
        Self::new(n, 1 << site, 1 << site).expect("single-site mask valid")
    }

    pub fn z(n: usize, site: usize) -> Self {
        Self::new(n, 0, 1 << site).expect("single-site mask valid")
    }

    pub fn zz(n: usize, site_a: usize, site_b: usize) -> Self {
        assert_ne!(site_a, site_b);
        Self::new(n, 0, (1 << site_a) | (1 << site_b)).expect("two-site mask valid")
    }

    /// The k-th string in the canonical enumeration of all 4^n:
    /// x = low n bits of k, z = high n bits.
    pub fn from_index(n: usize, k: usize) -> Self {
        let mask = (1usize << n) - 1;
        Self {
            x_mask: k & mask,
            z_mask: (k >> n) & mask,
            n,
        }
    }

    pub fn index(&self) -> usize {
        self.x_mask | (self.z_mask << self.n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> usize {
        self.x_mask
    }

    pub fn z_mask(&self) -> usize {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of sites acted on non-trivially.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    /// P|s⟩ = phase · |s ⊕ x⟩; returns (s ⊕ x, phase).
    #[inline]
    pub fn basis_action(&self, s: usize) -> (usize, C64) {
        let mut k = (self.x_mask & self.z_mask).count_ones();
        // (−1)^{|z ∧ s|} folded into the power of i
        k += 2 * (self.z_mask & s).count_ones();
        (s ^ self.x_mask, i_pow(k))
    }

    /// P|ψ⟩. The input is untouched.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if self.n != psi.n() {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n,
                got: psi.dim(),
            });
        }
        let src = psi.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); src.len()];
        for (s, amp) in src.iter().enumerate() {
            let (t, phase) = self.basis_action(s);
            out[t] = phase * amp;
        }
        StateVector::from_amplitudes(self.n, out)
    }

    /// Re⟨ψ|P|ψ⟩ for a normalized |ψ⟩. Hermiticity keeps the imaginary part
    /// at rounding level, which is checked in debug builds.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if self.n != psi.n() {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n,
                got: psi.dim(),
            });
        }
        psi.require_normalized()?;
        let value = self.expectation_raw(psi);
        debug_assert!(
            value.im.abs() < 1e-10,
            "Hermitian expectation had imaginary part {:.3e}",
            value.im
        );
        Ok(value.re)
    }

    /// ⟨ψ|P|ψ⟩ without the normalization contract (used by term sums).
    pub(crate) fn expectation_raw(&self, psi: &StateVector) -> C64 {
        let amps = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for (s, amp) in amps.iter().enumerate() {
            let (t, phase) = self.basis_action(s);
            acc += amps[t].conj() * phase * amp;
        }
        acc
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for j in 0..self.n {
            let x = (self.x_mask >> j) & 1;
            let z = (self.z_mask >> j) & 1;
            f.write_str(match (x, z) {
                (0, 0) => "I",
                (1, 0) => "X",
                (0, 1) => "Z",
                _ => "Y",
            })?;
        }
        Ok(())
    }
}
