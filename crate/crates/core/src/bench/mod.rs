//! Experiment runner: VQE search and Grover runs, sweeps over `n`, success
//! versus evaluation-count curves, and depth tables.
//!
//! Every random choice in a run is derived from `ExperimentConfig::seed`:
//! targets come from their own stream (shared across modes and backends at
//! the same `n`), and each trial gets a child seed from which the initial
//! point, optimizer, per-evaluation shots and final measurement are derived.

pub mod settings;
pub mod table;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{ansatz_depth, ansatz_state, build_real_amplitude, parameter_count, AnsatzParams};
use crate::bitstring::{BitString, Counts};
use crate::error::{Error, Result};
use crate::grover::{build_grover, grover_depth, MczDepthCost};
use crate::noise::{run_noisy_counts, NoiseRates};
use crate::optimize::{
    best_within, floor_sqrt_dim, Evaluation, iteration_budget, one_eval_minimize, spsa_minimize, BudgetProfile, Method,
    OneEvalConfig, OptTrace, Objective, SpsaConfig,
};
use crate::oracle::{build_oracle, OracleHamiltonian, SIGMA_Z_CONVENTION};
use crate::seed::{self, TAG_CHECKPOINT, TAG_EVAL, TAG_FINAL, TAG_OPTIMIZER, TAG_TARGETS, TAG_THETA0, TAG_TRIAL};

pub use table::{CurveRow, DepthRow, SweepRow, TracePoint};

/// Largest `n` the runner will simulate.
pub const MAX_QUBITS: usize = 14;

macro_rules! kebab_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::Config(format!(
                        concat!("unknown ", stringify!($name), " {:?}; expected one of: ", $($text, " "),+),
                        other
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($name::$variant => $text,)+ })
            }
        }
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Vqe,
    Grover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Ideal,
    Noisy,
}

kebab_enum!(Mode { Vqe => "vqe", Grover => "grover" });
kebab_enum!(Backend { Ideal => "ideal", Noisy => "noisy" });
kebab_enum!(Method { Spsa => "spsa", OneEval => "one-eval" });
kebab_enum!(BudgetProfile { Simulation => "simulation", Hardware => "hardware" });

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub backend: Backend,
    pub n: usize,
    /// Fixed target; when absent targets are drawn at random per trial.
    pub target: Option<BitString>,
    pub trials: usize,
    pub seed: u64,
    pub shots_eval: u64,
    pub shots_final: u64,
    /// Defaults to SPSA for the simulation profile and the one-evaluation
    /// method for the hardware profile.
    pub optimizer: Option<Method>,
    pub profile: BudgetProfile,
    pub noise: NoiseRates,
    /// Use the exact expectation as objective (ideal backend only).
    pub exact_objective: bool,
    /// Overrides the profile's iteration budget.
    pub iterations: Option<usize>,
    pub spsa: SpsaConfig,
    pub one_eval: OneEvalConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Vqe,
            backend: Backend::Ideal,
            n: 3,
            target: None,
            trials: 10,
            seed: 0,
            shots_eval: 1024,
            shots_final: 4096,
            optimizer: None,
            profile: BudgetProfile::Simulation,
            noise: NoiseRates::default(),
            exact_objective: false,
            iterations: None,
            spsa: SpsaConfig::default(),
            one_eval: OneEvalConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = &self.target {
            if t.len() != self.n {
                return Err(Error::Config(format!(
                    "target {t} has length {} but n = {}",
                    t.len(),
                    self.n
                )));
            }
        }
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.n > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "n = {} exceeds the simulation limit of {MAX_QUBITS}",
                self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.shots_eval == 0 || self.shots_final == 0 {
            return Err(Error::Config("shot counts must be at least 1".into()));
        }
        if self.exact_objective && self.backend == Backend::Noisy {
            return Err(Error::Config(
                "exact objective is only available on the ideal backend".into(),
            ));
        }
        if self.iterations == Some(0) {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        self.noise.model().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn optimizer(&self) -> Method {
        self.optimizer.unwrap_or(match self.profile {
            BudgetProfile::Simulation => Method::Spsa,
            BudgetProfile::Hardware => Method::OneEval,
        })
    }

    pub fn budget(&self) -> usize {
        self.iterations
            .unwrap_or_else(|| iteration_budget(self.n, self.profile))
    }

    /// Target for each trial. Random targets depend only on `(seed, n)`.
    pub fn targets(&self) -> Result<Vec<BitString>> {
        match self.target {
            Some(t) => Ok(vec![t; self.trials]),
            None => {
                let mut rng = seed::rng(seed::derive(self.seed, TAG_TARGETS, self.n as u64));
                (0..self.trials)
                    .map(|_| BitString::random(self.n, &mut rng))
                    .collect()
            }
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        seed::derive(self.seed, TAG_TRIAL, trial as u64)
    }

    fn target_for(&self, trial: usize) -> Result<BitString> {
        match self.target {
            Some(t) => Ok(t),
            None => self
                .targets_upto(trial + 1)
                .map(|v| *v.last().expect("trial + 1 ≥ 1")),
        }
    }

    fn targets_upto(&self, count: usize) -> Result<Vec<BitString>> {
        Self {
            trials: count,
            ..self.clone()
        }
        .targets()
    }
}

/// Timing never participates in record equality.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WallClock(pub f64);

impl PartialEq for WallClock {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthInfo {
    pub logical: usize,
    /// With MCZ charged by the decomposed-cost model.
    pub decomposed: usize,
}

/// Full record of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub trial: usize,
    pub trial_seed: u64,
    pub target: BitString,
    pub convention: String,
    /// Every objective evaluation in order (VQE only).
    pub evaluations: Vec<Evaluation>,
    pub theta0: Vec<f64>,
    pub best_theta: Vec<f64>,
    pub best_expectation: Option<f64>,
    /// Ideal-state `⟨H⟩` at the best parameters (VQE only).
    pub final_expectation_exact: Option<f64>,
    pub iterations: usize,
    pub setup_nfev: usize,
    pub nfev_total: usize,
    pub counts: Counts,
    pub success_probability: f64,
    pub depth: DepthInfo,
    pub wall_clock_secs: WallClock,
}

impl RunRecord {
    pub fn trace_points(&self) -> Vec<TracePoint> {
        self.evaluations
            .iter()
            .map(|e| TracePoint {
                nfev: e.nfev,
                expectation: e.value,
            })
            .collect()
    }

    pub fn sweep_row(&self) -> SweepRow {
        SweepRow {
            n: self.config.n,
            mode: self.config.mode,
            backend: self.config.backend,
            trial: self.trial,
            target: self.target,
            success_prob: self.success_probability,
            nfev_total: self.nfev_total,
            depth: self.depth.logical,
        }
    }
}

fn success(counts: &Counts, target: &BitString, shots: u64) -> f64 {
    counts.get(target).copied().unwrap_or(0) as f64 / shots as f64
}

/// Measures `|ψ(θ)⟩` `shots` times on the configured backend.
fn measure_ansatz(config: &ExperimentConfig, theta: &[f64], shots: u64, rng_seed: u64) -> Result<Counts> {
    let params = AnsatzParams::new(config.n, theta.to_vec())?;
    match config.backend {
        Backend::Ideal => ansatz_state(&params)?.sample(shots, rng_seed),
        Backend::Noisy => run_noisy_counts(
            &build_real_amplitude(&params)?,
            &config.noise.model()?,
            shots,
            rng_seed,
        ),
    }
}

fn objective_value(
    config: &ExperimentConfig,
    oracle: &OracleHamiltonian,
    theta: &[f64],
    rng_seed: u64,
) -> Result<f64> {
    if config.exact_objective {
        let params = AnsatzParams::new(config.n, theta.to_vec())?;
        oracle.expectation_exact(&ansatz_state(&params)?)
    } else {
        oracle.expectation_from_counts(&measure_ansatz(config, theta, config.shots_eval, rng_seed)?)
    }
}

/// Optimizes the ansatz for one trial and returns the raw trace.
fn optimize_trial(config: &ExperimentConfig, oracle: &OracleHamiltonian, trial_seed: u64) -> Result<OptTrace> {
    let n = config.n;
    let theta0 = AnsatzParams::random(n, &mut seed::rng(seed::derive(trial_seed, TAG_THETA0, 0)))?;
    let mut evals = 0u64;
    let f = |theta: &[f64]| {
        let s = seed::derive(trial_seed, TAG_EVAL, evals);
        evals += 1;
        // a failed evaluation surfaces as a non-finite objective
        objective_value(config, oracle, theta, s).unwrap_or(f64::NAN)
    };
    let obj = Objective::new(parameter_count(n), f);
    match config.optimizer() {
        Method::Spsa => spsa_minimize(
            obj,
            theta0.theta(),
            config.budget(),
            seed::derive(trial_seed, TAG_OPTIMIZER, 0),
            &config.spsa,
        ),
        Method::OneEval => one_eval_minimize(obj, theta0.theta(), config.budget(), &config.one_eval),
    }
}

/// One VQE search trial.
pub fn run_vqe_trial(config: &ExperimentConfig, trial: usize) -> Result<RunRecord> {
    config.validate()?;
    let started = Instant::now();
    let target = config.target_for(trial)?;
    let trial_seed = config.trial_seed(trial);
    let oracle = build_oracle(&target);
    let trace = optimize_trial(config, &oracle, trial_seed)?;

    let best = AnsatzParams::new(config.n, trace.best_theta.clone())?;
    let counts = measure_ansatz(
        config,
        best.theta(),
        config.shots_final,
        seed::derive(trial_seed, TAG_FINAL, 0),
    )?;
    let depth = ansatz_depth(config.n);
    Ok(RunRecord {
        config: config.clone(),
        trial,
        trial_seed,
        target,
        convention: SIGMA_Z_CONVENTION.into(),
        evaluations: trace.evaluations,
        theta0: trace.theta0.clone(),
        best_expectation: Some(trace.best_value),
        final_expectation_exact: Some(oracle.expectation_exact(&ansatz_state(&best)?)?),
        best_theta: trace.best_theta,
        iterations: trace.total_iterations,
        setup_nfev: trace.setup_nfev,
        nfev_total: trace.total_nfev,
        success_probability: success(&counts, &target, config.shots_final),
        counts,
        depth: DepthInfo {
            logical: depth,
            decomposed: depth,
        },
        wall_clock_secs: WallClock(started.elapsed().as_secs_f64()),
    })
}

/// One Grover search trial.
pub fn run_grover_trial(config: &ExperimentConfig, trial: usize) -> Result<RunRecord> {
    config.validate()?;
    let started = Instant::now();
    let target = config.target_for(trial)?;
    let trial_seed = config.trial_seed(trial);
    let plan = build_grover(&target)?;
    let final_seed = seed::derive(trial_seed, TAG_FINAL, 0);
    let counts = match config.backend {
        Backend::Ideal => plan.final_state()?.sample(config.shots_final, final_seed)?,
        Backend::Noisy => run_noisy_counts(
            &plan.circuit,
            &config.noise.model()?,
            config.shots_final,
            final_seed,
        )?,
    };
    Ok(RunRecord {
        config: config.clone(),
        trial,
        trial_seed,
        target,
        convention: SIGMA_Z_CONVENTION.into(),
        evaluations: Vec::new(),
        theta0: Vec::new(),
        best_theta: Vec::new(),
        best_expectation: None,
        final_expectation_exact: None,
        iterations: plan.iterations,
        setup_nfev: 0,
        nfev_total: 0,
        success_probability: success(&counts, &target, config.shots_final),
        counts,
        depth: DepthInfo {
            logical: plan.depth(MczDepthCost::Logical),
            decomposed: plan.depth(MczDepthCost::Decomposed),
        },
        wall_clock_secs: WallClock(started.elapsed().as_secs_f64()),
    })
}

pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<RunRecord> {
    match config.mode {
        Mode::Vqe => run_vqe_trial(config, trial),
        Mode::Grover => run_grover_trial(config, trial),
    }
}

/// First trial of a VQE configuration.
pub fn run_vqe_search(config: &ExperimentConfig) -> Result<RunRecord> {
    if config.mode != Mode::Vqe {
        return Err(Error::Config("run_vqe_search needs mode = vqe".into()));
    }
    run_vqe_trial(config, 0)
}

/// First trial of a Grover configuration.
pub fn run_grover_search(config: &ExperimentConfig) -> Result<RunRecord> {
    if config.mode != Mode::Grover {
        return Err(Error::Config("run_grover_search needs mode = grover".into()));
    }
    run_grover_trial(config, 0)
}

/// Runs every trial of `config` in parallel, ordered by trial index.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub ns: Vec<usize>,
    pub modes: Vec<Mode>,
    pub backends: Vec<Backend>,
    /// Shared settings; `n`, `mode`, `backend` are overridden per cell.
    pub base: ExperimentConfig,
}

/// Runs every `(n, mode, backend, trial)` cell. Rows come back in that
/// nesting order regardless of scheduling.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut cells = Vec::new();
    for &n in &spec.ns {
        for &mode in &spec.modes {
            for &backend in &spec.backends {
                let config = ExperimentConfig {
                    n,
                    mode,
                    backend,
                    target: spec.base.target.filter(|t| t.len() == n),
                    ..spec.base.clone()
                };
                config.validate()?;
                for trial in 0..config.trials {
                    cells.push((config.clone(), trial));
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|(c, t)| run_trial(c, *t).map(|r| r.sweep_row()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub mode: Mode,
    pub backend: Backend,
    pub trials: usize,
    pub median_success: f64,
    pub mean_success: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Per-cell median and mean success, in first-appearance order.
pub fn summarize(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut keys: Vec<(usize, Mode, Backend)> = Vec::new();
    for r in rows {
        let k = (r.n, r.mode, r.backend);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(n, mode, backend)| {
            let mut v: Vec<f64> = rows
                .iter()
                .filter(|r| (r.n, r.mode, r.backend) == (n, mode, backend))
                .map(|r| r.success_prob)
                .collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            SweepSummary {
                n,
                mode,
                backend,
                trials: v.len(),
                median_success: median(&mut v),
                mean_success: mean,
            }
        })
        .collect()
}

/// Success-probability curve for one finished VQE record, using the best
/// parameters seen within each evaluation prefix. Checkpoints are in units
/// of `⌊√N⌋` evaluations; those beyond the run's total are skipped.
pub fn curve_from_record(record: &RunRecord, checkpoints: &[f64]) -> Result<Vec<CurveRow>> {
    let config = &record.config;
    if config.mode != Mode::Vqe {
        return Err(Error::Config("curves need mode = vqe".into()));
    }
    let unit = floor_sqrt_dim(config.n) as f64;
    let mut rows = Vec::new();
    for (i, &units) in checkpoints.iter().enumerate() {
        if !(units >= 0.0 && units.is_finite()) {
            return Err(Error::Config(format!("invalid checkpoint {units}")));
        }
        let nfev = (units * unit).round() as usize;
        if nfev > record.nfev_total {
            continue;
        }
        let (theta, _) = best_within(&record.theta0, &record.evaluations, nfev);
        let counts = measure_ansatz(
            config,
            theta,
            config.shots_final,
            seed::derive(record.trial_seed, TAG_CHECKPOINT, i as u64),
        )?;
        rows.push(CurveRow {
            n: config.n,
            target: record.target,
            seed: record.trial_seed,
            nfev_units_sqrt_n: units,
            nfev,
            success_prob: success(&counts, &record.target, config.shots_final),
        });
    }
    Ok(rows)
}

/// Runs `config.trials` VQE trials and derives each one's curve.
pub fn success_vs_nfev(config: &ExperimentConfig, checkpoints: &[f64]) -> Result<Vec<CurveRow>> {
    if config.mode != Mode::Vqe {
        return Err(Error::Config("curves need mode = vqe".into()));
    }
    let records = run_trials(config)?;
    let per_trial: Vec<Vec<CurveRow>> = records
        .par_iter()
        .map(|r| curve_from_record(r, checkpoints))
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

pub fn depth_report(ns: &[usize]) -> Result<Vec<DepthRow>> {
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::Config("n must be at least 1".into()));
            }
            Ok(DepthRow {
                n,
                ansatz_depth: ansatz_depth(n),
                grover_logical_depth: grover_depth(n, MczDepthCost::Logical),
                grover_decomposed_depth: grover_depth(n, MczDepthCost::Decomposed),
            })
        })
        .collect()
}
