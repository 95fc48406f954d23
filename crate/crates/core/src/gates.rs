//! In-place statevector gate application (single-qubit unitaries and CNOT).
//!
//! Used by the circuit ansatz, the measured-expectation basis rotations, and
//! the Clifford property tests.

use num_complex::Complex64 as C64;

use crate::state::StateVector;

/// Apply a 2×2 unitary `u` (row-major) to `qubit`.
pub fn apply_single_qubit(psi: &mut StateVector, qubit: usize, u: &[[C64; 2]; 2]) {
    let dim = psi.dim();
    assert!(qubit < psi.n());
    let bit = 1usize << qubit;
    let amps = psi.amplitudes_mut();
    let mut s = 0usize;
    while s < dim {
        if s & bit == 0 {
            let a0 = amps[s];
            let a1 = amps[s | bit];
            amps[s] = u[0][0] * a0 + u[0][1] * a1;
            amps[s | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
        s += 1;
    }
}

/// CNOT with the given control and target.
pub fn apply_cnot(psi: &mut StateVector, control: usize, target: usize) {
    assert!(control < psi.n() && target < psi.n() && control != target);
    let c = 1usize << control;
    let t = 1usize << target;
    let amps = psi.amplitudes_mut();
    for s in 0..amps.len() {
        if s & c != 0 && s & t == 0 {
            amps.swap(s, s | t);
        }
    }
}

/// Rx(θ) = exp(−i θ σ^x / 2).
pub fn rx(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ]
}

/// Ry(θ) = exp(−i θ σ^y / 2).
pub fn ry(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

/// Rz(θ) = exp(−i θ σ^z / 2).
pub fn rz(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, -s), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(c, s)],
    ]
}

pub fn hadamard() -> [[C64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        [C64::new(r, 0.0), C64::new(r, 0.0)],
        [C64::new(r, 0.0), C64::new(-r, 0.0)],
    ]
}

/// The S phase gate diag(1, i).
pub fn s_gate() -> [[C64; 2]; 2] {
    [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rx_pi_maps_zero_to_minus_i_one() {
        let mut psi = StateVector::computational_basis(1, 0);
        apply_single_qubit(&mut psi, 0, &rx(std::f64::consts::PI));
        let a = psi.amplitudes();
        assert!(a[0].norm() < 1e-15);
        assert!((a[1] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_entangles_plus_zero() {
        let mut psi = StateVector::computational_basis(2, 0);
        apply_single_qubit(&mut psi, 0, &hadamard());
        apply_cnot(&mut psi, 0, 1);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = psi.amplitudes();
        assert!((a[0b00].re - r).abs() < 1e-15);
        assert!((a[0b11].re - r).abs() < 1e-15);
        assert!(a[0b01].norm() < 1e-15 && a[0b10].norm() < 1e-15);
    }

    #[test]
    fn gates_preserve_norm() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut psi = StateVector::random(4, &mut rng);
        for _ in 0..50 {
            let q = rng.gen_range(0..4);
            match rng.gen_range(0..4) {
                0 => apply_single_qubit(&mut psi, q, &rx(rng.gen_range(-3.0..3.0))),
                1 => apply_single_qubit(&mut psi, q, &ry(rng.gen_range(-3.0..3.0))),
                2 => apply_single_qubit(&mut psi, q, &rz(rng.gen_range(-3.0..3.0))),
                _ => {
                    let t = (q + rng.gen_range(1..4)) % 4;
                    apply_cnot(&mut psi, q, t);
                }
            }
        }
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
