//! Metropolis–Hastings sampling of |ψ(s)|² with single-spin-flip proposals.
//!
//! Chains carry independent seeded generators and run in parallel; samples
//! are returned in (chain, sweep) order, so the output is identical across
//! runs and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rbm::{is_log_zero, log_mean, ThetaCache};
use super::{AmplitudeKind, RbmParameters, SamplerConfig};
use crate::error::{Error, Result};
use crate::seeding::split_seed;
use crate::state::SpinConfiguration;

const START_RETRIES: usize = 100;

/// Draw `config.n_samples` configurations from P(s) ∝ |ψ(s)|².
///
/// Each chain burns in `burn_in_sweeps` full sweeps (N proposed flips per
/// sweep) and then records one configuration per sweep.
pub fn sample(
    params: &RbmParameters,
    config: &SamplerConfig,
    kind: AmplitudeKind,
) -> Result<Vec<SpinConfiguration>> {
    config.validate()?;
    let per_chain = config.samples_per_chain();
    let chains: Vec<Result<Vec<SpinConfiguration>>> = (0..config.n_chains)
        .into_par_iter()
        .map(|chain| run_chain(params, config, kind, chain as u64, per_chain))
        .collect();
    let mut out = Vec::with_capacity(config.n_samples);
    for chain in chains {
        out.extend(chain?);
    }
    Ok(out)
}

/// One Metropolis chain state: configuration plus cached log-amplitude parts.
struct Walker {
    cache: ThetaCache,
    /// Cache of the globally flipped configuration, kept for the symmetric
    /// amplitude (a single-site flip moves both images together).
    flip_cache: Option<ThetaCache>,
    log_amp: num_complex::Complex64,
}

impl Walker {
    fn new(params: &RbmParameters, s: SpinConfiguration, kind: AmplitudeKind) -> Self {
        let cache = ThetaCache::new(params, &s);
        let flip_cache = match kind {
            AmplitudeKind::Conventional => None,
            AmplitudeKind::Symmetric => Some(ThetaCache::new(params, &s.global_flip())),
        };
        let log_amp = Self::log_amp_of(params, &cache, &flip_cache);
        Self {
            cache,
            flip_cache,
            log_amp,
        }
    }

    fn log_amp_of(
        params: &RbmParameters,
        cache: &ThetaCache,
        flip_cache: &Option<ThetaCache>,
    ) -> num_complex::Complex64 {
        match flip_cache {
            None => cache.log_amplitude(params),
            Some(fc) => log_mean(cache.log_amplitude(params), fc.log_amplitude(params)),
        }
    }

    /// Propose flipping site `j`; returns the new log-amplitude.
    fn proposed_log_amp(&self, params: &RbmParameters, j: usize) -> num_complex::Complex64 {
        let mut cache = self.cache.clone();
        cache.flip(params, j);
        match &self.flip_cache {
            None => cache.log_amplitude(params),
            Some(fc) => {
                let mut fc = fc.clone();
                fc.flip(params, j);
                log_mean(cache.log_amplitude(params), fc.log_amplitude(params))
            }
        }
    }

    fn accept(&mut self, params: &RbmParameters, j: usize, new_log_amp: num_complex::Complex64) {
        self.cache.flip(params, j);
        if let Some(fc) = &mut self.flip_cache {
            fc.flip(params, j);
        }
        self.log_amp = new_log_amp;
    }
}

fn run_chain(
    params: &RbmParameters,
    config: &SamplerConfig,
    kind: AmplitudeKind,
    chain: u64,
    per_chain: usize,
) -> Result<Vec<SpinConfiguration>> {
    let n = params.n();
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(config.seed, chain));

    // start anywhere with nonzero amplitude
    let mut walker = None;
    for _ in 0..START_RETRIES {
        let bits = rng.gen_range(0..(1usize << n));
        let s = SpinConfiguration::new(n, bits)?;
        let candidate = Walker::new(params, s, kind);
        if !is_log_zero(candidate.log_amp) {
            walker = Some(candidate);
            break;
        }
    }
    let mut walker = walker.ok_or_else(|| {
        Error::ZeroAmplitude(format!(
            "no nonzero-amplitude start configuration found in {START_RETRIES} draws"
        ))
    })?;

    let mut samples = Vec::with_capacity(per_chain);
    let total_sweeps = config.burn_in_sweeps + per_chain;
    // An even number of proposals between records locks the popcount parity
    // on always-accept targets (the hypercube walk has period 2), so sweeps
    // are rounded up to an odd length.
    let proposals_per_sweep = n | 1;
    for sweep in 0..total_sweeps {
        for _ in 0..proposals_per_sweep {
            let j = rng.gen_range(0..n);
            let proposed = walker.proposed_log_amp(params, j);
            let log_ratio = if is_log_zero(proposed) {
                f64::NEG_INFINITY
            } else {
                2.0 * (proposed.re - walker.log_amp.re)
            };
            // acceptance min(1, |ψ'/ψ|²); draw consumed even on sure accepts
            // to keep the stream length fixed
            let u: f64 = rng.gen();
            if log_ratio >= 0.0 || u.ln() < log_ratio {
                walker.accept(params, j, proposed);
            }
        }
        if sweep >= config.burn_in_sweeps {
            samples.push(walker.cache.configuration());
        }
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn uniform_target_visits_all_configurations_uniformly() {
        // zero parameters: |ψ|² uniform over 16 configurations
        let params = RbmParameters::zeros(4, 1).unwrap();
        let config = SamplerConfig::new(100_000, 8, 20, 99).unwrap();
        let samples = sample(&params, &config, AmplitudeKind::Conventional).unwrap();
        let mut counts = [0usize; 16];
        for s in &samples {
            counts[s.bits()] += 1;
        }
        let expected = samples.len() as f64 / 16.0;
        let sigma = (samples.len() as f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
        for (bits, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expected).abs() < 3.0 * sigma,
                "configuration {bits:04b}: count {c}, expected {expected:.0} ± {:.0}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn product_state_magnetization_matches_tanh() {
        // b = W = 0, real a: ⟨σ_j⟩ = tanh(2 a_j)
        let a = vec![C64::new(0.4, 0.0), C64::new(-0.3, 0.0), C64::new(0.1, 0.0)];
        let params = RbmParameters::new(
            3,
            3,
            a.clone(),
            vec![C64::new(0.0, 0.0); 3],
            vec![C64::new(0.0, 0.0); 9],
        )
        .unwrap();
        let config = SamplerConfig::new(200_000, 8, 30, 7).unwrap();
        let samples = sample(&params, &config, AmplitudeKind::Conventional).unwrap();
        for j in 0..3 {
            let mean: f64 =
                samples.iter().map(|s| s.sigma(j)).sum::<f64>() / samples.len() as f64;
            let expected = (2.0 * a[j].re).tanh();
            let sigma = ((1.0 - expected * expected) / samples.len() as f64).sqrt().max(1e-6);
            assert!(
                (mean - expected).abs() < 4.0 * sigma,
                "site {j}: ⟨σ⟩ = {mean:.4}, tanh(2a) = {expected:.4}"
            );
        }
    }

    #[test]
    fn fixed_seed_reproduces_sample_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let params = RbmParameters::random(5, 1, 0.2, &mut rng).unwrap();
        let config = SamplerConfig::new(64, 4, 5, 1234).unwrap();
        let a = sample(&params, &config, AmplitudeKind::Conventional).unwrap();
        let b = sample(&params, &config, AmplitudeKind::Conventional).unwrap();
        assert_eq!(a, b);
        // and across thread counts
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample(&params, &config, AmplitudeKind::Conventional).unwrap());
        assert_eq!(a, single);
    }

    #[test]
    fn flip_site_proposals_are_uniform_on_uniform_target() {
        // on the uniform target every proposal is accepted, so transition
        // frequencies s -> s⊕e_j measure the proposal distribution
        let params = RbmParameters::zeros(3, 1).unwrap();
        let config = SamplerConfig::new(30_000, 6, 10, 3).unwrap();
        let samples = sample(&params, &config, AmplitudeKind::Conventional).unwrap();
        let mut flips = [0usize; 3];
        let mut transitions = 0usize;
        for pair in samples.windows(2) {
            let diff = pair[0].bits() ^ pair[1].bits();
            if diff.count_ones() == 1 {
                flips[diff.trailing_zeros() as usize] += 1;
                transitions += 1;
            }
        }
        let expected = transitions as f64 / 3.0;
        let sigma = (transitions as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for (j, &f) in flips.iter().enumerate() {
            assert!(
                (f as f64 - expected).abs() < 3.0 * sigma,
                "site {j}: {f} single-flip transitions, expected {expected:.0}"
            );
        }
    }

    #[test]
    fn symmetric_sampler_runs_and_balances_flip_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let params = RbmParameters::random(4, 1, 0.3, &mut rng).unwrap();
        let config = SamplerConfig::new(40_000, 8, 20, 5).unwrap();
        let samples = sample(&params, &config, AmplitudeKind::Symmetric).unwrap();
        // P(s) = P(−s) under the symmetric amplitude; compare paired counts
        let mut counts = [0usize; 16];
        for s in &samples {
            counts[s.bits()] += 1;
        }
        for bits in 0..8 {
            let a = counts[bits] as f64;
            let b = counts[bits ^ 0b1111] as f64;
            let sigma = (a + b).sqrt().max(1.0);
            assert!(
                (a - b).abs() < 5.0 * sigma,
                "pair {bits:04b}: {a} vs {b}"
            );
        }
    }
}
