//! Matrix-product-operator form of the TFIM Hamiltonian.
//!
//! The open chain uses the standard first-order bond-dimension-3 layout;
//! periodic boundaries route the wrap bond J·Z_{n−1}Z_0 through one extra
//! carrier channel, for a total bond dimension of 4.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tfim::TfimModel;

/// One MPO site tensor with shape (left, out, in, right), out/in physical
/// dimension 2, indexed data[((l·2 + po)·2 + pi)·right + r].
#[derive(Debug, Clone, PartialEq)]
pub struct MpoTensor {
    pub left: usize,
    pub right: usize,
    data: Vec<f64>,
}

impl MpoTensor {
    fn zeros(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            data: vec![0.0; left * 2 * 2 * right],
        }
    }

    #[inline]
    pub fn get(&self, l: usize, po: usize, pi: usize, r: usize) -> f64 {
        self.data[((l * 2 + po) * 2 + pi) * self.right + r]
    }

    fn add_block(&mut self, l: usize, r: usize, op: &[[f64; 2]; 2]) {
        for (po, row) in op.iter().enumerate() {
            for (pi, &v) in row.iter().enumerate() {
                self.data[((l * 2 + po) * 2 + pi) * self.right + r] += v;
            }
        }
    }
}

/// Hamiltonian as a chain of operator tensors with 1-dimensional edge bonds.
#[derive(Debug, Clone, PartialEq)]
pub struct Mpo {
    pub tensors: Vec<MpoTensor>,
}

impl Mpo {
    pub fn n(&self) -> usize {
        self.tensors.len()
    }

    /// Internal bond dimensions (length n − 1).
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.n() - 1].iter().map(|t| t.right).collect()
    }

    /// Full contraction into a dense 2^n × 2^n matrix (test oracle, n ≤ 8).
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.n();
        if n > 8 {
            return Err(Error::Capability(format!(
                "dense MPO contraction supports n <= 8, got {n}"
            )));
        }
        // running block C[(out_bits, in_bits), right_channel]
        let mut dim = 1usize;
        let mut block = vec![1.0f64];
        let mut channels = 1usize;
        for t in &self.tensors {
            let new_dim = dim * 2;
            let mut next = vec![0.0; new_dim * new_dim * t.right];
            for out_bits in 0..dim {
                for in_bits in 0..dim {
                    for c in 0..channels {
                        let v = block[(out_bits * dim + in_bits) * channels + c];
                        if v == 0.0 {
                            continue;
                        }
                        for po in 0..2 {
                            for pi in 0..2 {
                                for r in 0..t.right {
                                    let w = t.get(c, po, pi, r);
                                    if w == 0.0 {
                                        continue;
                                    }
                                    // little-endian: the new site is the high bit
                                    let o = out_bits | (po << self.site_shift(dim));
                                    let i = in_bits | (pi << self.site_shift(dim));
                                    next[(o * new_dim + i) * t.right + r] += v * w;
                                }
                            }
                        }
                    }
                }
            }
            block = next;
            dim = new_dim;
            channels = t.right;
        }
        debug_assert_eq!(channels, 1);
        let mut out = DMatrix::zeros(dim, dim);
        for o in 0..dim {
            for i in 0..dim {
                out[(o, i)] = block[o * dim + i];
            }
        }
        Ok(out)
    }

    fn site_shift(&self, dim_so_far: usize) -> usize {
        dim_so_far.trailing_zeros() as usize
    }
}

/// Build the TFIM MPO. Channels: 0 = nothing placed, 1 = Z pending,
/// 2 = finished, 3 = wrap carrier (periodic only).
pub fn build_tfim_mpo(model: &TfimModel) -> Mpo {
    let n = model.n;
    let identity = [[1.0, 0.0], [0.0, 1.0]];
    let pauli_z = [[1.0, 0.0], [0.0, -1.0]];
    let field = [[0.0, -model.h], [-model.h, 0.0]]; // −h·X
    let j_z = [[model.j, 0.0], [0.0, -model.j]];

    let channels = if model.periodic { 4 } else { 3 };
    let mut tensors = Vec::with_capacity(n);

    if n == 1 {
        let mut t = MpoTensor::zeros(1, 1);
        t.add_block(0, 0, &field);
        return Mpo { tensors: vec![t] };
    }

    for site in 0..n {
        let first = site == 0;
        let last = site == n - 1;
        let left = if first { 1 } else { channels };
        let right = if last { 1 } else { channels };
        let mut t = MpoTensor::zeros(left, right);
        if first {
            // boundary row of the generic tensor, entering from channel 0
            t.add_block(0, 0, &identity);
            t.add_block(0, 1, &pauli_z);
            t.add_block(0, 2, &field);
            if model.periodic {
                t.add_block(0, 3, &j_z);
            }
        } else if last {
            // boundary column, exiting into the finished channel
            t.add_block(0, 0, &field);
            t.add_block(1, 0, &j_z);
            t.add_block(2, 0, &identity);
            if model.periodic {
                t.add_block(3, 0, &pauli_z);
            }
        } else {
            t.add_block(0, 0, &identity);
            t.add_block(0, 1, &pauli_z);
            t.add_block(0, 2, &field);
            t.add_block(1, 2, &j_z);
            t.add_block(2, 2, &identity);
            if model.periodic {
                t.add_block(3, 3, &identity);
            }
        }
        tensors.push(t);
    }
    Mpo { tensors }
}
