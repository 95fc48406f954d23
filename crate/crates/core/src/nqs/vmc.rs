//! Local energies, gradient/covariance estimation, and the training loop:
//! stochastic reconfiguration (natural gradient) with an Adam step on the
//! preconditioned direction and improvement-based early stopping.
//!
//! For a holomorphic ansatz the packed complex gradient is
//!
//!   g_k = 2(⟨E_loc·conj(O_k)⟩ − ⟨E_loc⟩⟨conj(O_k)⟩),   O_k = ∂ log ψ / ∂θ_k,
//!
//! whose real and imaginary parts are ∂E/∂Re θ_k and ∂E/∂Im θ_k. The
//! covariance S = ⟨conj(O)Oᵀ⟩ − ⟨conj(O)⟩⟨Oᵀ⟩ feeds the SR solve
//! (S + λI)δ = g.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rbm::{is_log_zero, log_mean, ThetaCache};
use super::sampler::sample;
use super::{
    AmplitudeKind, ExpectationMode, RbmParameters, SamplerConfig, TrainConfig, TrainHistory,
};
use crate::error::{Error, Result};
use crate::linalg::solve_hermitian_cg;
use crate::seeding::split_seed;
use crate::state::SpinConfiguration;
use crate::tfim::{PauliTerm, TfimModel};

const ACCUMULATION_CHUNK: usize = 128;
const SR_CG_TOL: f64 = 1e-8;
const SR_CG_MAX_ITER: usize = 1000;
const SR_SHIFT_RETRIES: usize = 3;
const INIT_SCALE: f64 = 0.01;

/// What the estimator averages over.
pub enum EstimatorInput<'a> {
    /// Monte Carlo samples, each with weight 1/N.
    Samples(&'a [SpinConfiguration]),
    /// All 2^n configurations weighted by the exact |ψ|² distribution.
    FullSum,
}

/// Energy estimate with its gradient and quantum geometric tensor.
#[derive(Debug, Clone)]
pub struct EnergyGradient {
    pub energy: f64,
    /// Imaginary part of ⟨E_loc⟩, tracked as a sanity diagnostic.
    pub energy_imag: f64,
    /// Standard error of the energy mean (0 in full-sum mode).
    pub std_error: f64,
    pub gradient: Vec<C64>,
    pub covariance: DMatrix<C64>,
}

/// Cached amplitude evaluator for one configuration and, in symmetric mode,
/// its global flip.
struct AmpCache {
    cache: ThetaCache,
    flip_cache: Option<ThetaCache>,
}

impl AmpCache {
    fn new(params: &RbmParameters, s: &SpinConfiguration, kind: AmplitudeKind) -> Self {
        let cache = ThetaCache::new(params, s);
        let flip_cache = match kind {
            AmplitudeKind::Conventional => None,
            AmplitudeKind::Symmetric => Some(ThetaCache::new(params, &s.global_flip())),
        };
        Self { cache, flip_cache }
    }

    fn log_amp(&self, params: &RbmParameters) -> C64 {
        match &self.flip_cache {
            None => self.cache.log_amplitude(params),
            Some(fc) => log_mean(
                self.cache.log_amplitude(params),
                fc.log_amplitude(params),
            ),
        }
    }

    /// log ψ of the configuration with the bits of `mask` flipped; O(|mask|·M).
    fn log_amp_flipped(&self, params: &RbmParameters, mask: usize) -> C64 {
        let mut cache = self.cache.clone();
        let mut flip_cache = self.flip_cache.clone();
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            cache.flip(params, j);
            if let Some(fc) = &mut flip_cache {
                fc.flip(params, j);
            }
            bits &= bits - 1;
        }
        match &flip_cache {
            None => cache.log_amplitude(params),
            Some(fc) => log_mean(cache.log_amplitude(params), fc.log_amplitude(params)),
        }
    }

    /// O_k in packed ordering, from the cached pre-activations.
    fn derivatives(&self, params: &RbmParameters) -> Vec<C64> {
        let s = self.cache.configuration();
        match &self.flip_cache {
            None => derivatives_from_cache(params, &self.cache, &s),
            Some(fc) => {
                let l1 = self.cache.log_amplitude(params);
                let l2 = fc.log_amplitude(params);
                let (w1, w2) = if l1.re >= l2.re {
                    let t = (l2 - l1).exp();
                    let w1 = (C64::new(1.0, 0.0) + t).finv();
                    (w1, C64::new(1.0, 0.0) - w1)
                } else {
                    let t = (l1 - l2).exp();
                    let w2 = (C64::new(1.0, 0.0) + t).finv();
                    (C64::new(1.0, 0.0) - w2, w2)
                };
                let d1 = derivatives_from_cache(params, &self.cache, &s);
                let d2 = derivatives_from_cache(params, fc, &s.global_flip());
                d1.iter().zip(&d2).map(|(a, b)| w1 * a + w2 * b).collect()
            }
        }
    }
}

fn derivatives_from_cache(
    params: &RbmParameters,
    cache: &ThetaCache,
    s: &SpinConfiguration,
) -> Vec<C64> {
    let tanh = cache.tanh_thetas();
    let mut out = Vec::with_capacity(params.num_params());
    for j in 0..params.n() {
        out.push(C64::new(s.sigma(j), 0.0));
    }
    out.extend_from_slice(&tanh);
    for t in &tanh {
        for j in 0..params.n() {
            out.push(t * s.sigma(j));
        }
    }
    out
}

/// E_loc(s) = Σ_{s'} ⟨s|H|s'⟩ ψ(s')/ψ(s) over the configurations connected
/// by the term list.
pub fn local_energy(
    params: &RbmParameters,
    s: &SpinConfiguration,
    terms: &[PauliTerm],
    kind: AmplitudeKind,
) -> Result<C64> {
    let cache = AmpCache::new(params, s, kind);
    local_energy_cached(params, &cache, s, terms)
}

fn local_energy_cached(
    params: &RbmParameters,
    cache: &AmpCache,
    s: &SpinConfiguration,
    terms: &[PauliTerm],
) -> Result<C64> {
    let log_s = cache.log_amp(params);
    if is_log_zero(log_s) {
        return Err(Error::ZeroAmplitude(format!(
            "local estimator undefined: ψ = 0 at configuration {:#x}",
            s.bits()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for term in terms {
        let x = term.op.x_mask();
        if x == 0 {
            let sign = if (term.op.z_mask() & s.bits()).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            acc += term.coefficient * sign;
        } else {
            // ⟨s|P|s'⟩ with s' = s ⊕ x equals the phase P puts on |s'⟩
            let s_prime = s.bits() ^ x;
            let (back, phase) = term.op.basis_action(s_prime);
            debug_assert_eq!(back, s.bits());
            let log_sp = cache.log_amp_flipped(params, x);
            if is_log_zero(log_sp) {
                continue;
            }
            acc += term.coefficient * phase * (log_sp - log_s).exp();
        }
    }
    Ok(acc)
}

/// Weighted accumulator for one chunk of configurations.
struct Partial {
    weight: f64,
    e_sum: C64,
    e_sqr: f64,
    o_conj: Vec<C64>,
    e_o_conj: Vec<C64>,
    /// lower triangle of Σ w·conj(O_k)·O_l, row-major k ≥ l
    s_lower: Vec<C64>,
}

impl Partial {
    fn new(p: usize) -> Self {
        Self {
            weight: 0.0,
            e_sum: C64::new(0.0, 0.0),
            e_sqr: 0.0,
            o_conj: vec![C64::new(0.0, 0.0); p],
            e_o_conj: vec![C64::new(0.0, 0.0); p],
            s_lower: vec![C64::new(0.0, 0.0); p * (p + 1) / 2],
        }
    }

    fn accumulate(&mut self, w: f64, e_loc: C64, o: &[C64]) {
        self.weight += w;
        self.e_sum += w * e_loc;
        self.e_sqr += w * e_loc.re * e_loc.re;
        let mut idx = 0;
        for (k, ok) in o.iter().enumerate() {
            let ok_conj = ok.conj();
            self.o_conj[k] += w * ok_conj;
            self.e_o_conj[k] += w * e_loc * ok_conj;
            let w_ok_conj = w * ok_conj;
            for ol in &o[..=k] {
                self.s_lower[idx] += w_ok_conj * ol;
                idx += 1;
            }
        }
    }

    fn merge(&mut self, other: &Partial) {
        self.weight += other.weight;
        self.e_sum += other.e_sum;
        self.e_sqr += other.e_sqr;
        for (a, b) in self.o_conj.iter_mut().zip(&other.o_conj) {
            *a += b;
        }
        for (a, b) in self.e_o_conj.iter_mut().zip(&other.e_o_conj) {
            *a += b;
        }
        for (a, b) in self.s_lower.iter_mut().zip(&other.s_lower) {
            *a += b;
        }
    }
}

/// Energy, gradient, and covariance from samples or the full Hilbert space.
pub fn energy_and_gradient(
    params: &RbmParameters,
    terms: &[PauliTerm],
    input: EstimatorInput<'_>,
    kind: AmplitudeKind,
) -> Result<EnergyGradient> {
    let p = params.num_params();

    // (configuration bits, weight) items; weights sum to 1
    let (items, mc_count): (Vec<(usize, f64)>, Option<usize>) = match input {
        EstimatorInput::Samples(samples) => {
            if samples.is_empty() {
                return Err(Error::Config("estimator needs at least one sample".into()));
            }
            let w = 1.0 / samples.len() as f64;
            (
                samples.iter().map(|s| (s.bits(), w)).collect(),
                Some(samples.len()),
            )
        }
        EstimatorInput::FullSum => {
            let dim = 1usize << params.n();
            let mut log_norms = Vec::with_capacity(dim);
            let mut max_re = f64::NEG_INFINITY;
            for bits in 0..dim {
                let s = SpinConfiguration::new(params.n(), bits)?;
                let cache = AmpCache::new(params, &s, kind);
                let l = cache.log_amp(params);
                max_re = max_re.max(l.re);
                log_norms.push(l.re);
            }
            if max_re == f64::NEG_INFINITY {
                return Err(Error::ZeroAmplitude("all amplitudes vanish".into()));
            }
            let unnorm: Vec<f64> = log_norms
                .iter()
                .map(|&r| {
                    if r == f64::NEG_INFINITY {
                        0.0
                    } else {
                        (2.0 * (r - max_re)).exp()
                    }
                })
                .collect();
            let total: f64 = unnorm.iter().sum();
            (
                unnorm
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(bits, &w)| (bits, w / total))
                    .collect(),
                None,
            )
        }
    };

    // fixed-size chunks with an ordered merge keep the result identical
    // across thread counts
    let partials: Vec<Result<Partial>> = items
        .par_chunks(ACCUMULATION_CHUNK)
        .map(|chunk| {
            let mut part = Partial::new(p);
            for &(bits, w) in chunk {
                let s = SpinConfiguration::new(params.n(), bits)?;
                let cache = AmpCache::new(params, &s, kind);
                let e_loc = local_energy_cached(params, &cache, &s, terms)?;
                let o = cache.derivatives(params);
                part.accumulate(w, e_loc, &o);
            }
            Ok(part)
        })
        .collect();

    let mut total = Partial::new(p);
    for part in partials {
        total.merge(&part?);
    }
    if (total.weight - 1.0).abs() > 1e-9 {
        return Err(Error::NumericalConsistency(format!(
            "estimator weights sum to {}",
            total.weight
        )));
    }

    let energy = total.e_sum.re;
    let variance = (total.e_sqr - energy * energy).max(0.0);
    let std_error = match mc_count {
        Some(count) => (variance / count as f64).sqrt(),
        None => 0.0,
    };

    let mut gradient = Vec::with_capacity(p);
    for k in 0..p {
        gradient.push(2.0 * (total.e_o_conj[k] - total.e_sum * total.o_conj[k]));
    }

    let mut covariance = DMatrix::zeros(p, p);
    let mut idx = 0;
    for k in 0..p {
        for l in 0..=k {
            let value = total.s_lower[idx] - total.o_conj[k] * total.o_conj[l].conj();
            covariance[(k, l)] = value;
            covariance[(l, k)] = value.conj();
            idx += 1;
        }
    }

    Ok(EnergyGradient {
        energy,
        energy_imag: total.e_sum.im,
        std_error,
        gradient,
        covariance,
    })
}

/// Solve (S + shift·I)δ = g, escalating the shift ×10 on CG failure.
fn sr_precondition(
    covariance: &DMatrix<C64>,
    gradient: &[C64],
    base_shift: f64,
) -> Result<Vec<C64>> {
    let p = gradient.len();
    let mut shift = base_shift;
    for attempt in 0..=SR_SHIFT_RETRIES {
        let apply = |v: &[C64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); p];
            for k in 0..p {
                let mut acc = shift * v[k];
                for l in 0..p {
                    acc += covariance[(k, l)] * v[l];
                }
                out[k] = acc;
            }
            out
        };
        match solve_hermitian_cg(apply, gradient, SR_CG_TOL, SR_CG_MAX_ITER) {
            Ok(delta) => return Ok(delta),
            Err(err) if attempt < SR_SHIFT_RETRIES => {
                log::warn!("SR solve failed at shift {shift:.1e} ({err}); retrying ×10");
                shift *= 10.0;
            }
            Err(err) => return Err(err),
        }
    }
    unreachable!("retry loop returns or errors")
}

/// Adam over the packed complex parameters: real and imaginary parts are
/// independent lanes of a real optimizer.
struct ComplexAdam {
    inner: crate::linalg::Adam,
    lanes: Vec<f64>,
    grad_lanes: Vec<f64>,
}

impl ComplexAdam {
    fn new(p: usize, lr: f64) -> Self {
        Self {
            inner: crate::linalg::Adam::new(2 * p, lr),
            lanes: vec![0.0; 2 * p],
            grad_lanes: vec![0.0; 2 * p],
        }
    }

    fn step(&mut self, params: &mut [C64], direction: &[C64]) {
        for (k, (p, d)) in params.iter().zip(direction).enumerate() {
            self.lanes[2 * k] = p.re;
            self.lanes[2 * k + 1] = p.im;
            self.grad_lanes[2 * k] = d.re;
            self.grad_lanes[2 * k + 1] = d.im;
        }
        self.inner.step(&mut self.lanes, &self.grad_lanes);
        for (k, p) in params.iter_mut().enumerate() {
            p.re = self.lanes[2 * k];
            p.im = self.lanes[2 * k + 1];
        }
    }
}

/// Train an RBM on the model's ground state.
///
/// Each epoch samples (or fully sums), estimates energy/gradient/covariance,
/// preconditions through SR, and takes an Adam step. Training stops when the
/// energy has not improved by more than `stop_tol` (relative) for
/// `stop_patience` consecutive epochs, or at `max_epochs`.
pub fn train_rbm(
    model: &TfimModel,
    alpha: usize,
    train: &TrainConfig,
    sampler: &SamplerConfig,
    seed: u64,
) -> Result<(RbmParameters, TrainHistory)> {
    train.validate()?;
    sampler.validate()?;
    if alpha == 0 {
        return Err(Error::Config("alpha must be a positive integer".into()));
    }
    let terms = model.terms();
    let kind = train.amplitude_kind();

    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, 0));
    let mut params = RbmParameters::random(model.n, alpha, INIT_SCALE, &mut rng)?;
    let mut adam = ComplexAdam::new(params.num_params(), train.learning_rate);

    let mut energies = Vec::new();
    let mut best = f64::INFINITY;
    let mut stall = 0usize;
    let mut converged = false;
    let mut last_std_error = 0.0;

    for epoch in 0..train.max_epochs {
        let eg = match train.expectation_mode {
            ExpectationMode::MonteCarlo => {
                let epoch_sampler = SamplerConfig {
                    seed: split_seed(split_seed(seed, 1), epoch as u64),
                    ..*sampler
                };
                let samples = sample(&params, &epoch_sampler, kind)?;
                energy_and_gradient(&params, &terms, EstimatorInput::Samples(&samples), kind)?
            }
            ExpectationMode::FullSum => {
                energy_and_gradient(&params, &terms, EstimatorInput::FullSum, kind)?
            }
        };
        if !eg.energy.is_finite() {
            return Err(Error::NonFinite(format!(
                "RBM energy diverged at epoch {epoch}"
            )));
        }

        let delta = sr_precondition(&eg.covariance, &eg.gradient, train.sr_shift)?;
        let mut packed = params.to_packed();
        adam.step(&mut packed, &delta);
        params = RbmParameters::from_packed(model.n, alpha * model.n, &packed)?;

        energies.push(eg.energy);
        last_std_error = eg.std_error;

        // improvement-based stagnation counter
        let threshold = if best.is_finite() && best.abs() > 1e-12 {
            train.stop_tol * best.abs()
        } else {
            train.stop_tol
        };
        if eg.energy < best - threshold {
            best = eg.energy;
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= train.stop_patience {
            converged = true;
            break;
        }
    }

    let epochs = energies.len();
    let final_energy = *energies.last().expect("at least one epoch ran");
    Ok((
        params,
        TrainHistory {
            energies,
            converged,
            epochs,
            final_energy,
            final_std_error: last_std_error,
        },
    ))
}
