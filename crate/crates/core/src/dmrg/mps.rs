//! Matrix product states in mixed-canonical form, with dense conversion and
//! a lossless file format (JSON header plus raw little-endian payload).

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// One MPS site tensor (left, physical 2, right), data[(l·2 + p)·right + r].
#[derive(Debug, Clone, PartialEq)]
pub struct SiteTensor {
    pub left: usize,
    pub right: usize,
    pub data: Vec<f64>,
}

impl SiteTensor {
    pub fn zeros(left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            data: vec![0.0; left * 2 * right],
        }
    }

    #[inline]
    pub fn get(&self, l: usize, p: usize, r: usize) -> f64 {
        self.data[(l * 2 + p) * self.right + r]
    }

    #[inline]
    pub fn set(&mut self, l: usize, p: usize, r: usize, v: f64) {
        self.data[(l * 2 + p) * self.right + r] = v;
    }

    /// Reshape to ((left·2) × right), the left-fused matrix.
    pub fn to_matrix_left_fused(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.left * 2, self.right, |row, col| {
            self.data[row * self.right + col]
        })
    }

    /// Reshape to (left × (2·right)), the right-fused matrix.
    pub fn to_matrix_right_fused(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.left, 2 * self.right, |row, col| {
            self.data[row * 2 * self.right + col]
        })
    }
}

/// Mixed-canonical MPS: left-orthonormal tensors before the center,
/// right-orthonormal after it.
#[derive(Debug, Clone, PartialEq)]
pub struct Mps {
    tensors: Vec<SiteTensor>,
    center: usize,
}

#[derive(Serialize, Deserialize)]
struct MpsHeader {
    version: u32,
    n: usize,
    bond_dims: Vec<usize>,
    center: usize,
}

impl Mps {
    /// Random-entry MPS with bond dimensions capped by `bond` and by the
    /// exact Schmidt ranks, brought to right-canonical form (center 0).
    pub fn random(n: usize, bond: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("empty chain".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = bond_profile(n, bond);
        let mut tensors = Vec::with_capacity(n);
        for site in 0..n {
            let mut t = SiteTensor::zeros(dims[site], dims[site + 1]);
            for v in &mut t.data {
                *v = rng.gen_range(-1.0..1.0);
            }
            tensors.push(t);
        }
        let mut mps = Self { tensors, center: n - 1 };
        mps.canonicalize_right()?;
        Ok(mps)
    }

    /// Bond-1 product state |bits⟩.
    pub fn product_state(n: usize, bits: usize) -> Self {
        let tensors = (0..n)
            .map(|site| {
                let mut t = SiteTensor::zeros(1, 1);
                let p = (bits >> site) & 1;
                t.set(0, p, 0, 1.0);
                t
            })
            .collect();
        Self { tensors, center: 0 }
    }

    pub fn n(&self) -> usize {
        self.tensors.len()
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn tensor(&self, site: usize) -> &SiteTensor {
        &self.tensors[site]
    }

    pub(crate) fn tensors_mut(&mut self) -> &mut Vec<SiteTensor> {
        &mut self.tensors
    }

    pub(crate) fn set_center(&mut self, center: usize) {
        self.center = center;
    }

    /// Bond dimensions including the unit edge bonds (length n + 1).
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.n() + 1);
        dims.push(self.tensors[0].left);
        for t in &self.tensors {
            dims.push(t.right);
        }
        dims
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Sweep right-to-left with SVDs so every tensor right of site 0 is
    /// right-orthonormal; the state norm is absorbed and dropped.
    fn canonicalize_right(&mut self) -> Result<()> {
        for site in (1..self.n()).rev() {
            let m = self.tensors[site].to_matrix_right_fused();
            let svd = m.svd(true, true);
            let u = svd.u.as_ref().expect("svd computed with u");
            let vt = svd.v_t.as_ref().expect("svd computed with v_t");
            let rank = svd.singular_values.len();
            // right tensor becomes the orthonormal V^T rows
            let mut new_t = SiteTensor::zeros(rank, self.tensors[site].right);
            for l in 0..rank {
                for col in 0..2 * self.tensors[site].right {
                    new_t.data[l * 2 * self.tensors[site].right + col] = vt[(l, col)];
                }
            }
            // absorb U·S into the left neighbor
            let prev = &self.tensors[site - 1];
            let mut absorbed = SiteTensor::zeros(prev.left, rank);
            for l in 0..prev.left {
                for p in 0..2 {
                    for r in 0..rank {
                        let mut acc = 0.0;
                        for k in 0..prev.right {
                            acc += prev.get(l, p, k) * u[(k, r)] * svd.singular_values[r];
                        }
                        absorbed.set(l, p, r, acc);
                    }
                }
            }
            self.tensors[site] = new_t;
            self.tensors[site - 1] = absorbed;
        }
        // normalize the center tensor
        let norm: f64 = self.tensors[0].data.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NumericalConsistency("zero-norm MPS".into()));
        }
        for v in &mut self.tensors[0].data {
            *v /= norm;
        }
        self.center = 0;
        Ok(())
    }

    /// ‖A†A − I‖ for the left-fused tensor (0 when left-orthonormal).
    pub fn left_orthonormality_defect(&self, site: usize) -> f64 {
        let m = self.tensors[site].to_matrix_left_fused();
        let gram = m.transpose() * &m;
        (&gram - DMatrix::identity(gram.nrows(), gram.ncols())).norm()
    }

    /// ‖AA† − I‖ for the right-fused tensor (0 when right-orthonormal).
    pub fn right_orthonormality_defect(&self, site: usize) -> f64 {
        let m = self.tensors[site].to_matrix_right_fused();
        let gram = &m * m.transpose();
        (&gram - DMatrix::identity(gram.nrows(), gram.ncols())).norm()
    }

    /// Largest orthonormality defect over all non-center sites.
    pub fn canonical_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for site in 0..self.center {
            worst = worst.max(self.left_orthonormality_defect(site));
        }
        for site in self.center + 1..self.n() {
            worst = worst.max(self.right_orthonormality_defect(site));
        }
        worst
    }

    /// Contract into a normalized dense statevector (n ≤ 14).
    pub fn statevector(&self) -> Result<StateVector> {
        let n = self.n();
        if n > 14 {
            return Err(Error::Capability(format!(
                "dense MPS contraction supports n <= 14, got {n}"
            )));
        }
        // running block M[s_bits, r]: amplitudes of the first k sites
        let mut block = vec![1.0f64];
        let mut right = 1usize;
        let mut dim = 1usize;
        for (site, t) in self.tensors.iter().enumerate() {
            let new_dim = dim * 2;
            let mut next = vec![0.0f64; new_dim * t.right];
            for bits in 0..dim {
                for l in 0..right {
                    let v = block[bits * right + l];
                    if v == 0.0 {
                        continue;
                    }
                    for p in 0..2 {
                        let out_bits = bits | (p << site);
                        for r in 0..t.right {
                            next[out_bits * t.right + r] += v * t.get(l, p, r);
                        }
                    }
                }
            }
            block = next;
            right = t.right;
            dim = new_dim;
        }
        debug_assert_eq!(right, 1);
        let amps: Vec<C64> = block.into_iter().map(|v| C64::new(v, 0.0)).collect();
        let mut state = StateVector::from_amplitudes(n, amps)?;
        state.normalize();
        Ok(state)
    }

    /// Write as a one-line JSON header plus raw little-endian f64 payload.
    pub fn save(&self, path: &Path) -> Result<()> {
        let header = MpsHeader {
            version: 1,
            n: self.n(),
            bond_dims: self.bond_dims(),
            center: self.center,
        };
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for t in &self.tensors {
            for v in &t.data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let mut header_line = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            r.read_exact(&mut byte)?;
            if byte[0] == b'\n' {
                break;
            }
            header_line.push(byte[0]);
        }
        let header: MpsHeader = serde_json::from_slice(&header_line)?;
        if header.version != 1 {
            return Err(Error::Parse(format!("MPS file version {}", header.version)));
        }
        if header.bond_dims.len() != header.n + 1 {
            return Err(Error::Parse("bond dimension list length mismatch".into()));
        }
        let mut tensors = Vec::with_capacity(header.n);
        for site in 0..header.n {
            let left = header.bond_dims[site];
            let right = header.bond_dims[site + 1];
            let mut t = SiteTensor::zeros(left, right);
            let mut buf = [0u8; 8];
            for v in &mut t.data {
                r.read_exact(&mut buf)?;
                *v = f64::from_le_bytes(buf);
            }
            tensors.push(t);
        }
        Ok(Self {
            tensors,
            center: header.center,
        })
    }
}

fn bond_profile(n: usize, bond: usize) -> Vec<usize> {
    (0..=n)
        .map(|cut| {
            let exact_left = 1usize << cut.min(14);
            let exact_right = 1usize << (n - cut).min(14);
            bond.min(exact_left).min(exact_right)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_state_contracts_to_one_hot() {
        let mps = Mps::product_state(4, 0b1010);
        let psi = mps.statevector().unwrap();
        for (bits, a) in psi.amplitudes().iter().enumerate() {
            let expected = if bits == 0b1010 { 1.0 } else { 0.0 };
            assert!((a.re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn random_mps_is_right_canonical_and_normalized() {
        let mps = Mps::random(6, 8, 3).unwrap();
        assert_eq!(mps.center(), 0);
        assert!(mps.canonical_defect() < 1e-10);
        let psi = mps.statevector().unwrap();
        assert!(psi.is_normalized());
        let self_overlap = psi.inner(&psi).unwrap();
        assert!((self_overlap.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bond_profile_respects_exact_ranks() {
        let mps = Mps::random(5, 16, 1).unwrap();
        assert_eq!(mps.bond_dims(), vec![1, 2, 4, 4, 2, 1]);
    }

    #[test]
    fn save_load_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.mps");
        let mps = Mps::random(5, 6, 11).unwrap();
        mps.save(&path).unwrap();
        let loaded = Mps::load(&path).unwrap();
        assert_eq!(mps, loaded);
    }
}
