//! Small numerical building blocks: compensated summation, a matrix-free
//! symmetric Lanczos solver, and conjugate gradients for Hermitian systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Kahan compensated accumulator for long f64 sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Adam optimizer over a flat real parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    t: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    /// Standard moment decays 0.9/0.999 and epsilon 1e−8.
    pub fn new(dim: usize, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            t: 0,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
        }
    }

    /// One descent step in place: params ← params − lr·m̂/(√v̂ + ε).
    pub fn step(&mut self, params: &mut [f64], gradient: &[f64]) {
        assert_eq!(params.len(), gradient.len());
        assert_eq!(params.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for (k, (&g, p)) in gradient.iter().zip(params.iter_mut()).enumerate() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[k] / bc1;
            let v_hat = self.v[k] / bc2;
            *p -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// Result of a Lanczos run: the best Ritz pair found and its true residual
/// ‖Av − λv‖. Callers decide whether the residual is good enough.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: f64,
    pub vector: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Lowest eigenpair of a real symmetric operator by Lanczos with full
/// reorthogonalization.
///
/// `deflate` vectors (assumed orthonormal) are projected out of the Krylov
/// space, so passing a converged ground vector yields the next eigenpair —
/// this stays correct for degenerate pairs.
pub fn lanczos_lowest<F>(
    matvec: F,
    start: &DVector<f64>,
    deflate: &[DVector<f64>],
    residual_tol: f64,
    max_iter: usize,
) -> Result<RitzPair>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let dim = start.len();
    if dim == 0 {
        return Err(Error::InvalidModel("empty operator".into()));
    }
    let max_iter = max_iter.min(dim);

    let project = |v: &mut DVector<f64>| {
        for d in deflate {
            let overlap = d.dot(v);
            v.axpy(-overlap, d, 1.0);
        }
    };

    let mut q = start.clone();
    project(&mut q);
    let norm = q.norm();
    if norm < 1e-14 {
        return Err(Error::InvalidModel(
            "start vector lies in the deflated subspace".into(),
        ));
    }
    q /= norm;

    let mut basis: Vec<DVector<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut iterations = 0;
    for j in 0..max_iter {
        iterations = j + 1;
        let mut w = matvec(&basis[j]);
        project(&mut w);
        let a = basis[j].dot(&w);
        alpha.push(a);
        w.axpy(-a, &basis[j], 1.0);
        if j > 0 {
            let b_prev = beta[j - 1];
            w.axpy(-b_prev, &basis[j - 1], 1.0);
        }
        // full reorthogonalization keeps the basis clean over many iterations
        for q_i in &basis {
            let overlap = q_i.dot(&w);
            w.axpy(-overlap, q_i, 1.0);
        }
        let b = w.norm();

        // Ritz residual estimate |β_m · y_last|; cheap enough to do each step.
        let (_, y) = lowest_tridiag_eigpair(&alpha, &beta);
        let est = b * y[y.len() - 1].abs();
        if est <= residual_tol || b < 1e-14 || j + 1 == max_iter {
            let mut v = DVector::zeros(dim);
            for (coeff, q_i) in y.iter().zip(&basis) {
                v.axpy(*coeff, q_i, 1.0);
            }
            let norm = v.norm();
            if norm < 1e-14 {
                return Err(Error::NonConvergence {
                    what: "Lanczos Ritz vector collapsed".into(),
                    iterations,
                });
            }
            v /= norm;
            let hv = matvec(&v);
            let value = v.dot(&hv);
            let residual = (&hv - &v * value).norm();
            if residual <= residual_tol || b < 1e-14 || j + 1 == max_iter {
                return Ok(RitzPair {
                    value,
                    vector: v,
                    iterations,
                    residual,
                });
            }
        }

        beta.push(b);
        basis.push(w / b);
    }

    Err(Error::NonConvergence {
        what: "Lanczos".into(),
        iterations,
    })
}

/// Lowest eigenpair of the tridiagonal (alpha, beta) via dense symmetric eigen.
fn lowest_tridiag_eigpair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i > 0 {
            t[(i, i - 1)] = beta[i - 1];
            t[(i - 1, i)] = beta[i - 1];
        }
    }
    let eig = t.symmetric_eigen();
    let mut best = 0;
    for i in 1..m {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (
        eig.eigenvalues[best],
        eig.eigenvectors.column(best).iter().copied().collect(),
    )
}

/// Solve A x = b for Hermitian positive-definite A by conjugate gradients.
/// `apply` computes A·v. Converges when ‖r‖ ≤ tol·‖b‖.
pub fn solve_hermitian_cg<F>(apply: F, b: &[C64], tol: f64, max_iter: usize) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    let dim = b.len();
    let b_norm: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); dim]);
    }
    let mut x = vec![C64::new(0.0, 0.0); dim];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rho: f64 = r.iter().map(|x| x.norm_sqr()).sum();

    for _ in 0..max_iter {
        if rho.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        let ap = apply(&p);
        let denom: C64 = p.iter().zip(&ap).map(|(pi, api)| pi.conj() * api).sum();
        if denom.re <= 0.0 || !denom.re.is_finite() {
            return Err(Error::NonConvergence {
                what: format!("CG: operator not positive definite (p†Ap = {:.3e})", denom.re),
                iterations: 0,
            });
        }
        let alpha = rho / denom.re;
        for i in 0..dim {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rho_new: f64 = r.iter().map(|x| x.norm_sqr()).sum();
        let beta = rho_new / rho;
        for i in 0..dim {
            p[i] = r[i] + beta * p[i];
        }
        rho = rho_new;
    }

    if rho.sqrt() <= tol * b_norm {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            what: "conjugate gradients".into(),
            iterations: max_iter,
        })
    }
}
