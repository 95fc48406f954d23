//! Benchmark sweeps across methods, fields, and repeats.
//!
//! Each (h, method, repeat) job runs a solver with a seed that is a pure
//! function of the sweep seed, converts the result to a dense statevector,
//! and scores energy, 2-Rényi stabilizer entropy, and infidelity against the
//! exact-diagonalization reference of the same (n, h). Records persist
//! incrementally to a journal so interrupted sweeps resume without
//! recomputing or duplicating anything.

mod plot;
mod record;
mod report;
mod statefile;

pub use record::{BenchmarkRecord, CanonicalRecord, Method};
pub use report::{aggregate, emit_report, spearman, AggregateRow};
pub use statefile::{read_state_file, write_state_file};

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dmrg::{build_tfim_mpo, dmrg_ground_state, DmrgConfig};
use crate::error::{Error, Result};
use crate::exact::{ground_state_ed, GoldenCache, GoldenEntry, GroundState};
use crate::magic::{infidelity, m2_fast};
use crate::nqs::{
    rbm_statevector, train_rbm, AmplitudeKind, ExpectationMode, SamplerConfig, TrainConfig,
};
use crate::seeding::job_seed;
use crate::state::StateVector;
use crate::tfim::{expectation_of_terms, TfimModel};
use crate::vqe::{apply_ansatz, train_vqe, AnsatzConfig, Entangler, VqeTrainConfig};

/// RBM solver knobs for a sweep (applies to both the conventional and the
/// symmetric variant).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RbmSweepSettings {
    pub alpha: usize,
    pub learning_rate: f64,
    pub sr_shift: f64,
    pub max_epochs: usize,
    pub stop_tol: f64,
    pub stop_patience: usize,
    /// Monte Carlo estimation by default; full Hilbert-space sums opt-in.
    pub full_sum: bool,
    /// Overrides the size-dependent default (1,000 below 12 sites, 5,000 at
    /// and above) when set.
    pub n_samples: Option<usize>,
    pub n_chains: usize,
    pub burn_in_sweeps: usize,
}

impl Default for RbmSweepSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            alpha: 1,
            learning_rate: t.learning_rate,
            sr_shift: t.sr_shift,
            max_epochs: t.max_epochs,
            stop_tol: t.stop_tol,
            stop_patience: t.stop_patience,
            full_sum: false,
            n_samples: None,
            n_chains: 8,
            burn_in_sweeps: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct DmrgSweepSettings {
    pub max_bond: usize,
    pub svd_cutoff: f64,
    pub max_sweeps: usize,
    pub energy_tol: f64,
    pub local_solver_iters: usize,
}

impl Default for DmrgSweepSettings {
    fn default() -> Self {
        let c = DmrgConfig::new(32, 0);
        Self {
            max_bond: c.max_bond,
            svd_cutoff: c.svd_cutoff,
            max_sweeps: c.max_sweeps,
            energy_tol: c.energy_tol,
            local_solver_iters: c.local_solver_iters,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct VqeSweepSettings {
    pub layers: usize,
    pub entangler: Entangler,
    pub learning_rate: f64,
    pub inner_tol: f64,
    pub inner_window: usize,
    pub restart_tol: f64,
    pub max_restarts: usize,
    pub max_inner_epochs: usize,
}

impl Default for VqeSweepSettings {
    fn default() -> Self {
        let c = VqeTrainConfig::default_with_seed(0);
        Self {
            layers: 4,
            entangler: Entangler::AllPairsLex,
            learning_rate: c.learning_rate,
            inner_tol: c.inner_tol,
            inner_window: c.inner_window,
            restart_tol: c.restart_tol,
            max_restarts: c.max_restarts,
            max_inner_epochs: c.max_inner_epochs,
        }
    }
}

/// Full sweep description; the unit of reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    #[serde(rename = "J", default = "default_j")]
    pub j: f64,
    pub h_grid: Vec<f64>,
    pub methods: Vec<Method>,
    #[serde(default = "default_repeats")]
    pub repeats: u32,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed_base: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub rbm: RbmSweepSettings,
    #[serde(default)]
    pub dmrg: DmrgSweepSettings,
    #[serde(default)]
    pub vqe: VqeSweepSettings,
}

fn default_j() -> f64 {
    -1.0
}

fn default_repeats() -> u32 {
    10
}

/// The benchmark h grids: step 0.125 up to 8 sites, 0.25 above.
pub fn default_h_grid(n: usize) -> Vec<f64> {
    let step: f64 = if n <= 8 { 0.125 } else { 0.25 };
    let count = (3.0 / step).round() as usize + 1;
    (0..count).map(|i| i as f64 * step).collect()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        TfimModel::new(self.n, self.j, 0.0, true)?;
        if self.h_grid.is_empty() {
            return Err(Error::Config("h grid is empty".into()));
        }
        for pair in self.h_grid.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::Config(format!(
                    "h grid must be strictly increasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if self.h_grid.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::Config("h values must be finite and nonnegative".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        Ok(())
    }

    fn model(&self, h: f64) -> Result<TfimModel> {
        TfimModel::new(self.n, self.j, h, true)
    }

    /// ED and DMRG are deterministic and run once per (n, h); stochastic
    /// methods run `repeats` times.
    fn repeats_for(&self, method: Method) -> u32 {
        match method {
            Method::Ed | Method::Dmrg => 1,
            Method::Rbm | Method::RbmSymmetric | Method::Vqe => self.repeats,
        }
    }
}

/// Everything needed to score a state against the exact reference.
struct EdReference {
    ground: GroundState,
    m2: f64,
}

/// Run (or resume) a sweep; returns the complete, canonically ordered
/// record set after writing reports.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<BenchmarkRecord>> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)?;

    let journal_path = config.output_dir.join("records.jsonl");
    let mut completed = record::load_journal(&journal_path)?;
    for rec in completed.values() {
        rec.check_consistent(config)?;
    }

    // jobs that still need to run
    let mut pending: Vec<(Method, f64, u32)> = Vec::new();
    for &h in &config.h_grid {
        for &method in &config.methods {
            for repeat in 0..config.repeats_for(method) {
                if !completed.contains_key(&record::key(method, h, repeat)) {
                    pending.push((method, h, repeat));
                }
            }
        }
    }

    if !pending.is_empty() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

        // exact references for every h that still has work
        let mut h_needing_ed: Vec<f64> = pending.iter().map(|(_, h, _)| *h).collect();
        h_needing_ed.sort_by(f64::total_cmp);
        h_needing_ed.dedup();

        let references: BTreeMap<u64, EdReference> = pool.install(|| {
            use rayon::prelude::*;
            h_needing_ed
                .par_iter()
                .map(|&h| {
                    let started = Instant::now();
                    let model = config.model(h)?;
                    let ground = ground_state_ed(&model)?;
                    let m2 = m2_fast(&ground.state)?.m2;
                    log::info!(
                        "ED reference at h = {h}: E = {:.12}, M2 = {:.6} ({:.2?})",
                        ground.energy,
                        m2,
                        started.elapsed()
                    );
                    Ok((h.to_bits(), EdReference { ground, m2 }))
                })
                .collect::<Result<_>>()
        })?;

        // keep the golden file in sync with what this sweep has proven
        let golden_path = config.output_dir.join("golden.json");
        let mut golden = if golden_path.exists() {
            GoldenCache::load(&golden_path)?
        } else {
            GoldenCache::new()
        };
        for (&h_bits, reference) in &references {
            golden.upsert(GoldenEntry {
                n: config.n,
                j: config.j,
                h: f64::from_bits(h_bits),
                periodic: true,
                energy: reference.ground.energy,
                m2: reference.m2,
            });
        }
        golden.save(&golden_path)?;

        let writer = Mutex::new(record::JournalWriter::open(&journal_path)?);
        let new_records: Vec<BenchmarkRecord> = pool.install(|| {
            use rayon::prelude::*;
            pending
                .par_iter()
                .map(|&(method, h, repeat)| {
                    let reference = &references[&h.to_bits()];
                    let rec = run_job(config, method, h, repeat, reference);
                    if let Ok(mut w) = writer.lock() {
                        if let Err(err) = w.append(&rec) {
                            log::error!("journal write failed: {err}");
                        }
                    }
                    rec
                })
                .collect()
        });
        for rec in new_records {
            completed.insert(record::key(rec.method, rec.h, rec.repeat), rec);
        }
    }

    let mut records: Vec<BenchmarkRecord> = completed.into_values().collect();
    records.sort_by(record::canonical_order);

    let rows = aggregate(&records);
    emit_report(&rows, &records, &config.output_dir)?;
    Ok(records)
}

/// One solver job; failures become error-flagged records.
fn run_job(
    config: &SweepConfig,
    method: Method,
    h: f64,
    repeat: u32,
    reference: &EdReference,
) -> BenchmarkRecord {
    let seed = job_seed(config.seed_base, h, method.as_str(), repeat);
    let started = Instant::now();
    match solve(config, method, h, seed, reference) {
        Ok((state, converged, metadata)) => {
            match score(config, method, h, repeat, seed, &state, reference) {
                Ok(mut rec) => {
                    rec.converged = converged;
                    rec.metadata = metadata;
                    rec.wall_time_s = started.elapsed().as_secs_f64();
                    rec
                }
                Err(err) => BenchmarkRecord::failed(
                    config, method, h, repeat, seed,
                    started.elapsed().as_secs_f64(),
                    err.to_string(),
                ),
            }
        }
        Err(err) => {
            log::error!("{method:?} failed at h = {h}, repeat {repeat}: {err}");
            BenchmarkRecord::failed(
                config, method, h, repeat, seed,
                started.elapsed().as_secs_f64(),
                err.to_string(),
            )
        }
    }
}

type SolveOutput = (StateVector, bool, BTreeMap<String, String>);

fn solve(
    config: &SweepConfig,
    method: Method,
    h: f64,
    seed: u64,
    reference: &EdReference,
) -> Result<SolveOutput> {
    let model = config.model(h)?;
    match method {
        Method::Ed => {
            let mut metadata = BTreeMap::new();
            metadata.insert("gap".into(), format!("{:.6e}", reference.ground.gap));
            metadata.insert(
                "parity_projected".into(),
                reference.ground.parity_projected.to_string(),
            );
            metadata.insert("solver".into(), format!("{:?}", reference.ground.solver));
            Ok((reference.ground.state.clone(), true, metadata))
        }
        Method::Rbm | Method::RbmSymmetric => {
            let symmetric = method == Method::RbmSymmetric;
            let settings = &config.rbm;
            let train = TrainConfig {
                learning_rate: settings.learning_rate,
                sr_shift: settings.sr_shift,
                max_epochs: settings.max_epochs,
                stop_tol: settings.stop_tol,
                stop_patience: settings.stop_patience,
                expectation_mode: if settings.full_sum {
                    ExpectationMode::FullSum
                } else {
                    ExpectationMode::MonteCarlo
                },
                symmetric,
            };
            let default_sampler = SamplerConfig::default_for(config.n, seed);
            let sampler = SamplerConfig::new(
                settings.n_samples.unwrap_or(default_sampler.n_samples),
                settings.n_chains,
                settings.burn_in_sweeps,
                seed,
            )?;
            let (params, history) = train_rbm(&model, settings.alpha, &train, &sampler, seed)?;
            let kind = if symmetric {
                AmplitudeKind::Symmetric
            } else {
                AmplitudeKind::Conventional
            };
            let state = rbm_statevector(&params, kind)?;
            let mut metadata = BTreeMap::new();
            metadata.insert("epochs".into(), history.epochs.to_string());
            metadata.insert("alpha".into(), settings.alpha.to_string());
            metadata.insert(
                "final_std_error".into(),
                format!("{:.6e}", history.final_std_error),
            );
            Ok((state, history.converged, metadata))
        }
        Method::Dmrg => {
            let settings = &config.dmrg;
            let dmrg_config = DmrgConfig {
                max_bond: settings.max_bond,
                svd_cutoff: settings.svd_cutoff,
                max_sweeps: settings.max_sweeps,
                energy_tol: settings.energy_tol,
                local_solver_iters: settings.local_solver_iters,
                seed,
            };
            let mpo = build_tfim_mpo(&model);
            let (_, mps, diag) = dmrg_ground_state(&mpo, &dmrg_config)?;
            let state = mps.statevector()?;
            let mut metadata = BTreeMap::new();
            metadata.insert("sweeps".into(), diag.sweeps.to_string());
            metadata.insert("max_bond".into(), mps.max_bond().to_string());
            metadata.insert(
                "max_discarded_weight".into(),
                format!("{:.6e}", diag.max_discarded_weight),
            );
            Ok((state, diag.converged, metadata))
        }
        Method::Vqe => {
            let settings = &config.vqe;
            let ansatz = AnsatzConfig::new(config.n, settings.layers, settings.entangler)?;
            let train = VqeTrainConfig {
                learning_rate: settings.learning_rate,
                inner_tol: settings.inner_tol,
                inner_window: settings.inner_window,
                restart_tol: settings.restart_tol,
                max_restarts: settings.max_restarts,
                max_inner_epochs: settings.max_inner_epochs,
                energy_mode: crate::vqe::EnergyMode::Exact,
                shots: 0,
                seed,
            };
            let outcome = train_vqe(&model, &ansatz, &train)?;
            let state = apply_ansatz(
                &ansatz,
                &outcome.params,
                &StateVector::computational_basis(config.n, 0),
            )?;
            let mut metadata = BTreeMap::new();
            metadata.insert(
                "instances".into(),
                outcome.diagnostics.instances.len().to_string(),
            );
            metadata.insert(
                "inner_epochs".into(),
                outcome
                    .diagnostics
                    .instances
                    .iter()
                    .map(|i| i.epochs.to_string())
                    .collect::<Vec<_>>()
                    .join("+"),
            );
            Ok((state, outcome.diagnostics.converged, metadata))
        }
    }
}

/// Score a solver state against the exact reference.
fn score(
    config: &SweepConfig,
    method: Method,
    h: f64,
    repeat: u32,
    seed: u64,
    state: &StateVector,
    reference: &EdReference,
) -> Result<BenchmarkRecord> {
    // the ED record IS the reference; its errors are zero by definition
    let (energy, m2, infid) = if method == Method::Ed {
        (reference.ground.energy, reference.m2, 0.0)
    } else {
        let model = config.model(h)?;
        (
            expectation_of_terms(&model.terms(), state)?,
            m2_fast(state)?.m2,
            infidelity(state, &reference.ground.state)?,
        )
    };
    let e_ref = reference.ground.energy;
    let energy_error_abs = (energy - e_ref).abs();
    let energy_error_rel = energy_error_abs / e_ref.abs().max(1e-12);
    Ok(BenchmarkRecord {
        method,
        n: config.n,
        j: config.j,
        h,
        repeat,
        seed,
        energy,
        m2,
        infidelity: infid,
        energy_error_abs,
        energy_error_rel,
        m2_error_abs: (m2 - reference.m2).abs(),
        wall_time_s: 0.0,
        converged: true,
        error: None,
        metadata: BTreeMap::new(),
    })
}

/// Convenience reference runner used by the CLI `ed` subcommand.
pub fn ed_point(n: usize, j: f64, h: f64) -> Result<(GroundState, f64)> {
    let model = TfimModel::new(n, j, h, true)?;
    let ground = ground_state_ed(&model)?;
    let m2 = m2_fast(&ground.state)?.m2;
    Ok((ground, m2))
}
