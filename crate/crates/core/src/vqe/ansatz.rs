//! Circuit application: per layer, Rx/Ry/Rz rotation columns over every
//! qubit followed by the entangling CNOT block.

use super::{AnsatzConfig, CircuitParameters};
use crate::error::{Error, Result};
use crate::gates::{apply_cnot, apply_single_qubit, rx, ry, rz};
use crate::state::StateVector;

/// |ψ_θ⟩ = 𝒰(θ)|ψ_in⟩; the input is untouched.
pub fn apply_ansatz(
    config: &AnsatzConfig,
    params: &CircuitParameters,
    psi_in: &StateVector,
) -> Result<StateVector> {
    params.check(config)?;
    if psi_in.n() != config.n {
        return Err(Error::DimensionMismatch {
            expected: 1 << config.n,
            got: psi_in.dim(),
        });
    }
    let pairs = config.entangler.pairs(config.n);
    let mut psi = psi_in.clone();
    for layer in 0..config.layers {
        for (column, gate) in [rx as fn(f64) -> _, ry, rz].into_iter().enumerate() {
            for qubit in 0..config.n {
                let theta = params.angles[config.angle_index(layer, column, qubit)];
                apply_single_qubit(&mut psi, qubit, &gate(theta));
            }
        }
        for &(control, target) in &pairs {
            apply_cnot(&mut psi, control, target);
        }
    }
    debug_assert!(
        (psi.norm_sqr() - 1.0).abs() < 1e-12 || !psi_in.is_normalized(),
        "unitary circuit drifted off norm"
    );
    Ok(psi)
}
