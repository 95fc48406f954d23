//! RBM amplitudes with the hidden layer summed analytically:
//!
//!   log ψ(s) = Σ_j a_j σ_j + Σ_i log 2cosh(b_i + Σ_j W_ij σ_j).
//!
//! The Z₂-symmetric variant averages ψ over a configuration and its global
//! flip in log space. Hidden pre-activations θ_i are cached and updated in
//! O(M) per spin flip; the cache is validated against full recomputation.

use num_complex::Complex64 as C64;

use super::{AmplitudeKind, RbmParameters};
use crate::error::{Error, Result};
use crate::state::{SpinConfiguration, StateVector};

/// Designated log of an exactly-cancelled amplitude; exp gives 0.
pub const LOG_ZERO: C64 = C64::new(f64::NEG_INFINITY, 0.0);

pub(crate) fn is_log_zero(l: C64) -> bool {
    l.re == f64::NEG_INFINITY
}

/// log(2 cosh z), stable for large |Re z|.
fn ln_2cosh(z: C64) -> C64 {
    let (pole, tail) = if z.re >= 0.0 { (z, -2.0 * z) } else { (-z, 2.0 * z) };
    pole + (C64::new(1.0, 0.0) + tail.exp()).ln()
}

/// log ψ for the raw RBM.
pub fn log_amplitude(params: &RbmParameters, s: &SpinConfiguration) -> Result<C64> {
    check_dims(params, s)?;
    let cache = ThetaCache::new(params, s);
    let value = cache.log_amplitude(params);
    if value.re.is_nan() || value.im.is_nan() || value.re == f64::INFINITY {
        return Err(Error::NonFinite(format!(
            "RBM log-amplitude at configuration {:#x}",
            s.bits()
        )));
    }
    Ok(value)
}

/// log[(ψ(s) + ψ(−s)) / 2]; identical for s and its global flip. Exact
/// cancellation returns [`LOG_ZERO`].
pub fn log_amplitude_symmetric(params: &RbmParameters, s: &SpinConfiguration) -> Result<C64> {
    let l1 = log_amplitude(params, s)?;
    let l2 = log_amplitude(params, &s.global_flip())?;
    Ok(log_mean(l1, l2))
}

/// log[(e^l1 + e^l2)/2] by log-sum-exp; commutative bitwise in (l1, l2).
pub(crate) fn log_mean(l1: C64, l2: C64) -> C64 {
    let pivot = l1.re.max(l2.re);
    if pivot == f64::NEG_INFINITY {
        return LOG_ZERO;
    }
    let shift = C64::new(pivot, 0.0);
    let sum = (l1 - shift).exp() + (l2 - shift).exp();
    if sum == C64::new(0.0, 0.0) {
        return LOG_ZERO;
    }
    shift + sum.ln() - C64::new(std::f64::consts::LN_2, 0.0)
}

fn check_dims(params: &RbmParameters, s: &SpinConfiguration) -> Result<()> {
    if params.n() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: params.n(),
            got: s.n(),
        });
    }
    Ok(())
}

/// Cached hidden pre-activations θ_i = b_i + Σ_j W_ij σ_j for one
/// configuration, with O(M) single-flip updates.
#[derive(Debug, Clone)]
pub struct ThetaCache {
    bits: usize,
    n: usize,
    visible_sum: C64,
    thetas: Vec<C64>,
}

impl ThetaCache {
    pub fn new(params: &RbmParameters, s: &SpinConfiguration) -> Self {
        let mut visible_sum = C64::new(0.0, 0.0);
        for (j, a) in params.visible_bias().iter().enumerate() {
            visible_sum += a * s.sigma(j);
        }
        let thetas = (0..params.m())
            .map(|i| {
                let mut t = params.hidden_bias()[i];
                for j in 0..params.n() {
                    t += params.weight(i, j) * s.sigma(j);
                }
                t
            })
            .collect();
        Self {
            bits: s.bits(),
            n: s.n(),
            visible_sum,
            thetas,
        }
    }

    pub fn configuration(&self) -> SpinConfiguration {
        SpinConfiguration::new(self.n, self.bits).expect("cache holds a valid configuration")
    }

    /// Flip spin `j`, updating θ and the visible sum in O(M).
    pub fn flip(&mut self, params: &RbmParameters, j: usize) {
        let sigma_old = if (self.bits >> j) & 1 == 1 { -1.0 } else { 1.0 };
        let delta = -2.0 * sigma_old;
        self.visible_sum += params.visible_bias()[j] * delta;
        for (i, theta) in self.thetas.iter_mut().enumerate() {
            *theta += params.weight(i, j) * delta;
        }
        self.bits ^= 1 << j;
    }

    /// log ψ from the cached quantities.
    pub fn log_amplitude(&self, params: &RbmParameters) -> C64 {
        debug_assert_eq!(self.thetas.len(), params.m());
        let mut acc = self.visible_sum;
        for &t in &self.thetas {
            acc += ln_2cosh(t);
        }
        acc
    }

    /// tanh θ_i, the hidden-unit derivative factors.
    pub fn tanh_thetas(&self) -> Vec<C64> {
        self.thetas.iter().map(|t| t.tanh()).collect()
    }
}

/// O_k = ∂ log ψ / ∂θ_k in the packed ordering (a, b, W).
pub fn log_derivatives(
    params: &RbmParameters,
    s: &SpinConfiguration,
    kind: AmplitudeKind,
) -> Result<Vec<C64>> {
    check_dims(params, s)?;
    match kind {
        AmplitudeKind::Conventional => Ok(raw_derivatives(params, s)),
        AmplitudeKind::Symmetric => {
            let flipped = s.global_flip();
            let l1 = log_amplitude(params, s)?;
            let l2 = log_amplitude(params, &flipped)?;
            if is_log_zero(log_mean(l1, l2)) {
                return Err(Error::ZeroAmplitude(format!(
                    "symmetric amplitude cancels at configuration {:#x}",
                    s.bits()
                )));
            }
            // weights ψ(±s)/(ψ(s) + ψ(−s)), evaluated from the log ratio
            let (w1, w2) = if l1.re >= l2.re {
                let t = (l2 - l1).exp();
                let w1 = (C64::new(1.0, 0.0) + t).finv();
                (w1, C64::new(1.0, 0.0) - w1)
            } else {
                let t = (l1 - l2).exp();
                let w2 = (C64::new(1.0, 0.0) + t).finv();
                (C64::new(1.0, 0.0) - w2, w2)
            };
            let d1 = raw_derivatives(params, s);
            let d2 = raw_derivatives(params, &flipped);
            Ok(d1
                .iter()
                .zip(&d2)
                .map(|(a, b)| w1 * a + w2 * b)
                .collect())
        }
    }
}

fn raw_derivatives(params: &RbmParameters, s: &SpinConfiguration) -> Vec<C64> {
    let cache = ThetaCache::new(params, s);
    let tanh = cache.tanh_thetas();
    let mut out = Vec::with_capacity(params.num_params());
    for j in 0..params.n() {
        out.push(C64::new(s.sigma(j), 0.0));
    }
    out.extend_from_slice(&tanh);
    for i in 0..params.m() {
        for j in 0..params.n() {
            out.push(tanh[i] * s.sigma(j));
        }
    }
    out
}

/// Evaluate the RBM on the whole basis and normalize.
pub fn rbm_statevector(params: &RbmParameters, kind: AmplitudeKind) -> Result<StateVector> {
    let n = params.n();
    if n > 14 {
        return Err(Error::Capability(format!(
            "dense RBM evaluation supports n <= 14, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut logs = Vec::with_capacity(dim);
    let mut max_re = f64::NEG_INFINITY;
    for bits in 0..dim {
        let s = SpinConfiguration::new(n, bits)?;
        let l = match kind {
            AmplitudeKind::Conventional => log_amplitude(params, &s)?,
            AmplitudeKind::Symmetric => log_amplitude_symmetric(params, &s)?,
        };
        max_re = max_re.max(l.re);
        logs.push(l);
    }
    if max_re == f64::NEG_INFINITY {
        return Err(Error::ZeroAmplitude(
            "every RBM amplitude vanished; state is degenerate".into(),
        ));
    }
    let amps: Vec<C64> = logs
        .into_iter()
        .map(|l| {
            if is_log_zero(l) {
                C64::new(0.0, 0.0)
            } else {
                (l - C64::new(max_re, 0.0)).exp()
            }
        })
        .collect();
    let mut state = StateVector::from_amplitudes(n, amps)?;
    state.normalize();
    Ok(state)
}
