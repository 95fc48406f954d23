//! Exact-diagonalization reference: ground energy and ground statevector,
//! with a dense path for small chains and a matrix-free Lanczos path above.
//!
//! Near ground-state degeneracy the returned representative is pinned to the
//! even-parity sector so repeated runs (and downstream non-stabilizerness
//! scores) are reproducible; the flag for this is surfaced in the result.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lanczos_lowest;
use crate::state::StateVector;
use crate::tfim::{PauliTerm, TfimModel};

/// Dense-matrix assembly refuses above this size (2^14 × 2^14 is the limit).
pub const DENSE_MATRIX_MAX_QUBITS: usize = 14;

/// Dense eigensolver handles up to here; beyond it the Lanczos path is used.
pub const DENSE_EIGEN_MAX_QUBITS: usize = 10;

/// Two lowest eigenvalues closer than this count as a degenerate pair.
pub const DEGENERACY_TOL: f64 = 1e-10;

const RESIDUAL_TOL: f64 = 1e-10;
const LANCZOS_TARGET_TOL: f64 = 1e-12;
const LANCZOS_MAX_ITER: usize = 600;
const START_VECTOR_SEED: u64 = 0x5EED_ED00;

/// Which eigensolver produced a ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdSolver {
    Dense,
    Lanczos,
}

/// Ground-state output with degeneracy diagnostics.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// E₁ − E₀ of the two lowest levels.
    pub gap: f64,
    /// True when the representative was projected onto the even-parity sector.
    pub parity_projected: bool,
    pub solver: EdSolver,
}

/// H as a dense real symmetric 2^n × 2^n matrix.
pub fn dense_hamiltonian(model: &TfimModel) -> Result<DMatrix<f64>> {
    if model.n > DENSE_MATRIX_MAX_QUBITS {
        return Err(Error::Capability(format!(
            "dense Hamiltonian at n = {} would need {} GiB; use the matrix-free Lanczos path",
            model.n,
            ((1u64 << (2 * model.n)) * 8) >> 30
        )));
    }
    let dim = 1usize << model.n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for term in model.terms() {
        for s in 0..dim {
            let (t, phase) = term.op.basis_action(s);
            debug_assert!(phase.im == 0.0, "TFIM terms are real");
            h[(t, s)] += term.coefficient * phase.re;
        }
    }
    Ok(h)
}

/// Matrix-free H·v from a Pauli-term list.
pub fn apply_terms(terms: &[PauliTerm], v: &DVector<f64>) -> DVector<f64> {
    let dim = v.len();
    let mut out = DVector::zeros(dim);
    for term in terms {
        let x = term.op.x_mask();
        let z = term.op.z_mask();
        if x == 0 {
            for s in 0..dim {
                let sign = if (z & s).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
                out[s] += term.coefficient * sign * v[s];
            }
        } else {
            for s in 0..dim {
                let (t, phase) = term.op.basis_action(s);
                out[t] += term.coefficient * phase.re * v[s];
            }
        }
    }
    out
}

/// Ground state via the size-appropriate solver.
pub fn ground_state_ed(model: &TfimModel) -> Result<GroundState> {
    if model.n <= DENSE_EIGEN_MAX_QUBITS {
        ground_state_dense(model)
    } else {
        ground_state_lanczos(model)
    }
}

/// Ground state from a full dense symmetric eigendecomposition.
pub fn ground_state_dense(model: &TfimModel) -> Result<GroundState> {
    let h = dense_hamiltonian(model)?;
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let e1 = eig.eigenvalues[order[1]];
    let v0: DVector<f64> = eig.eigenvectors.column(order[0]).into();
    let v1: DVector<f64> = eig.eigenvectors.column(order[1]).into();
    finish(model, e0, e1, v0, Some(v1), EdSolver::Dense, &h)
}

/// Ground state from deflated matrix-free Lanczos (two lowest pairs).
pub fn ground_state_lanczos(model: &TfimModel) -> Result<GroundState> {
    let dim = 1usize << model.n;
    let terms = model.terms();
    let matvec = |v: &DVector<f64>| apply_terms(&terms, v);

    let start = start_vector(dim);
    let first = lanczos_lowest(&matvec, &start, &[], LANCZOS_TARGET_TOL, LANCZOS_MAX_ITER)?;
    if first.residual > RESIDUAL_TOL {
        return Err(Error::NonConvergence {
            what: format!(
                "ED Lanczos (residual {:.3e} > {RESIDUAL_TOL:.0e})",
                first.residual
            ),
            iterations: first.iterations,
        });
    }
    // second pair in the orthogonal complement; needed for the gap and for a
    // clean even-parity projection of degenerate pairs
    let second = lanczos_lowest(
        &matvec,
        &second_start_vector(dim),
        std::slice::from_ref(&first.vector),
        LANCZOS_TARGET_TOL,
        LANCZOS_MAX_ITER,
    )?;
    if second.residual > RESIDUAL_TOL {
        return Err(Error::NonConvergence {
            what: format!(
                "ED Lanczos, second eigenpair (residual {:.3e} > {RESIDUAL_TOL:.0e})",
                second.residual
            ),
            iterations: second.iterations,
        });
    }

    finish_matrix_free(
        model,
        first.value,
        second.value,
        first.vector,
        Some(second.vector),
        EdSolver::Lanczos,
        &matvec,
    )
}

fn start_vector(dim: usize) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED);
    let mut v = DVector::from_fn(dim, |_, _| 0.05 * rng.gen_range(-1.0..1.0));
    v[0] += 1.0;
    v
}

fn second_start_vector(dim: usize) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED ^ 0xFF);
    let mut v = DVector::from_fn(dim, |_, _| 0.05 * rng.gen_range(-1.0..1.0));
    v[dim - 1] += 1.0;
    v
}

fn finish(
    model: &TfimModel,
    e0: f64,
    e1: f64,
    v0: DVector<f64>,
    v1: Option<DVector<f64>>,
    solver: EdSolver,
    h: &DMatrix<f64>,
) -> Result<GroundState> {
    let check = |v: &DVector<f64>, e: f64| (h * v - v * e).norm();
    finish_impl(model, e0, e1, v0, v1, solver, check)
}

fn finish_matrix_free<F>(
    model: &TfimModel,
    e0: f64,
    e1: f64,
    v0: DVector<f64>,
    v1: Option<DVector<f64>>,
    solver: EdSolver,
    matvec: &F,
) -> Result<GroundState>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let check = |v: &DVector<f64>, e: f64| (matvec(v) - v * e).norm();
    finish_impl(model, e0, e1, v0, v1, solver, check)
}

fn finish_impl<C>(
    model: &TfimModel,
    e0: f64,
    e1: f64,
    v0: DVector<f64>,
    v1: Option<DVector<f64>>,
    solver: EdSolver,
    residual_of: C,
) -> Result<GroundState>
where
    C: Fn(&DVector<f64>, f64) -> f64,
{
    let gap = e1 - e0;
    let dim = v0.len();
    let full = dim - 1;

    let mut vec = v0;
    let mut parity_projected = false;
    if gap < DEGENERACY_TOL {
        // Project the degenerate ground space onto the even-parity sector.
        let mut even = DVector::zeros(dim);
        for s in 0..dim {
            even[s] = 0.5 * (vec[s] + vec[s ^ full]);
        }
        if even.norm() < 1e-6 {
            let v1 = v1.as_ref().expect("degenerate pair needs both vectors");
            for s in 0..dim {
                even[s] = 0.5 * (v1[s] + v1[s ^ full]);
            }
        }
        vec = even;
        parity_projected = true;
    }
    vec /= vec.norm();

    // deterministic global sign: positive overlap with |+...+⟩
    let overlap: f64 = vec.iter().sum();
    if overlap < 0.0 {
        vec = -vec;
    } else if overlap == 0.0 {
        let imax = (0..dim).max_by(|&a, &b| vec[a].abs().total_cmp(&vec[b].abs())).unwrap();
        if vec[imax] < 0.0 {
            vec = -vec;
        }
    }

    let residual = residual_of(&vec, e0);
    // The parity projection of a degenerate pair stays in the eigenspace, so
    // the residual bound applies to the representative too.
    if residual > RESIDUAL_TOL.max(2.0 * gap.abs()) {
        return Err(Error::NonConvergence {
            what: format!(
                "ED eigenvector residual {:.3e} > {RESIDUAL_TOL:.0e} (n = {}, h = {})",
                residual, model.n, model.h
            ),
            iterations: 0,
        });
    }

    let amps: Vec<C64> = vec.iter().map(|&x| C64::new(x, 0.0)).collect();
    Ok(GroundState {
        energy: e0,
        state: StateVector::from_amplitudes(model.n, amps)?,
        gap,
        parity_projected,
        solver,
    })
}

/// One cached exact-reference row, keyed by (n, J, h, boundary).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GoldenEntry {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub h: f64,
    pub periodic: bool,
    pub energy: f64,
    pub m2: f64,
}

/// Versioned JSON store of exact reference values.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct GoldenCache {
    pub version: u32,
    pub entries: Vec<GoldenEntry>,
}

impl GoldenCache {
    pub const VERSION: u32 = 1;

    pub fn new() -> Self {
        Self {
            version: Self::VERSION,
            entries: Vec::new(),
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cache: Self = serde_json::from_str(&text)?;
        if cache.version != Self::VERSION {
            return Err(Error::Parse(format!(
                "golden cache version {} (expected {})",
                cache.version,
                Self::VERSION
            )));
        }
        Ok(cache)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn lookup(&self, model: &TfimModel) -> Option<&GoldenEntry> {
        self.entries.iter().find(|e| {
            e.n == model.n
                && e.j.to_bits() == model.j.to_bits()
                && e.h.to_bits() == model.h.to_bits()
                && e.periodic == model.periodic
        })
    }

    /// Insert or replace the entry for this model.
    pub fn upsert(&mut self, entry: GoldenEntry) {
        let key = |e: &GoldenEntry| (e.n, e.j.to_bits(), e.h.to_bits(), e.periodic);
        if let Some(existing) = self.entries.iter_mut().find(|e| key(e) == key(&entry)) {
            *existing = entry;
        } else {
            self.entries.push(entry);
        }
    }
}
