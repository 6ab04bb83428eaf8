//! Derivative-free minimizers with exact function-evaluation accounting.
//!
//! Every objective call goes through [`Objective::evaluate`], which records
//! the point, the value and a running `nfev` index. Optimizers only see that
//! entry point, so the tally in an [`OptTrace`] is the number of times the
//! objective actually ran.
//!
//! Two methods are provided:
//! - [`spsa_minimize`]: simultaneous-perturbation stochastic approximation,
//!   two evaluations per iteration after a fixed calibration stage;
//! - [`one_eval_minimize`]: a linear-model trust-region simplex method in the
//!   COBYLA family, one evaluation per iteration after `dim + 1` setup points.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// 1-based position in the evaluation sequence.
    pub nfev: usize,
    pub theta: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptTrace {
    pub method: Method,
    pub theta0: Vec<f64>,
    pub evaluations: Vec<Evaluation>,
    pub best_theta: Vec<f64>,
    pub best_value: f64,
    pub total_iterations: usize,
    pub total_nfev: usize,
    /// Evaluations spent before the first iteration (SPSA calibration or the
    /// initial simplex).
    pub setup_nfev: usize,
}

impl OptTrace {
    /// Best point among the first `nfev` evaluations, or `theta0` if none.
    pub fn best_within(&self, nfev: usize) -> (&[f64], Option<f64>) {
        best_within(&self.theta0, &self.evaluations, nfev)
    }
}

/// Lowest-valued evaluation among the first `nfev`, falling back to `theta0`.
/// Ties keep the earlier evaluation.
pub fn best_within<'a>(theta0: &'a [f64], evaluations: &'a [Evaluation], nfev: usize) -> (&'a [f64], Option<f64>) {
    evaluations[..nfev.min(evaluations.len())]
        .iter()
        .fold((theta0, None), |(t, v), e| match v {
            Some(b) if e.value >= b => (t, v),
            _ => (e.theta.as_slice(), Some(e.value)),
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Spsa,
    OneEval,
}

type ObjectiveFn<'a> = Box<dyn FnMut(&[f64]) -> f64 + 'a>;

/// A counted objective `θ ↦ f(θ)`.
pub struct Objective<'a> {
    dim: usize,
    f: ObjectiveFn<'a>,
    evaluations: Vec<Evaluation>,
}

impl<'a> Objective<'a> {
    pub fn new(dim: usize, f: impl FnMut(&[f64]) -> f64 + 'a) -> Self {
        Self {
            dim,
            f: Box::new(f),
            evaluations: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nfev(&self) -> usize {
        self.evaluations.len()
    }

    /// Runs the objective once. A non-finite value is recorded and returned
    /// as `Err(value)`.
    pub fn evaluate(&mut self, theta: &[f64]) -> std::result::Result<f64, f64> {
        debug_assert_eq!(theta.len(), self.dim);
        let value = (self.f)(theta);
        self.evaluations.push(Evaluation {
            nfev: self.evaluations.len() + 1,
            theta: theta.to_vec(),
            value,
        });
        if value.is_finite() {
            Ok(value)
        } else {
            Err(value)
        }
    }

    fn into_trace(self, method: Method, theta0: &[f64], iterations: usize, setup: usize) -> OptTrace {
        let (best_theta, best_value) = self
            .evaluations
            .iter()
            .filter(|e| e.value.is_finite())
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .map_or((theta0.to_vec(), f64::INFINITY), |e| (e.theta.clone(), e.value));
        OptTrace {
            method,
            theta0: theta0.to_vec(),
            total_nfev: self.evaluations.len(),
            evaluations: self.evaluations,
            best_theta,
            best_value,
            total_iterations: iterations,
            setup_nfev: setup,
        }
    }

    fn abort(self, value: f64, method: Method, theta0: &[f64], iterations: usize, setup: usize) -> Error {
        let nfev = self.nfev();
        Error::NonFiniteObjective {
            value,
            nfev,
            trace: Box::new(self.into_trace(method, theta0, iterations, setup)),
        }
    }
}

fn check_start(obj: &Objective<'_>, theta0: &[f64], max_iterations: usize) -> Result<()> {
    if obj.dim == 0 {
        return Err(Error::InvalidArgument("objective dimension must be positive".into()));
    }
    if theta0.len() != obj.dim {
        return Err(Error::Dimension {
            expected: obj.dim,
            actual: theta0.len(),
        });
    }
    if max_iterations == 0 {
        return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
    }
    Ok(())
}

/// SPSA hyperparameters.
///
/// Gains are `a_k = a / (k + 1 + A)^α` and `c_k = c / (k + 1)^γ` with
/// `A = stability_fraction · max_iterations`. When `learning_rate` is `None`,
/// `a` is calibrated from `calibration_pairs` perturbation pairs at `θ0` so
/// that the first update moves each coordinate by about `target_magnitude`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub c: f64,
    pub stability_fraction: f64,
    pub calibration_pairs: usize,
    pub target_magnitude: f64,
    pub learning_rate: Option<f64>,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            alpha: 0.602,
            gamma: 0.101,
            c: 0.1,
            stability_fraction: 0.1,
            calibration_pairs: 25,
            target_magnitude: 0.25,
            learning_rate: None,
        }
    }
}

impl SpsaConfig {
    pub fn calibration_nfev(&self) -> usize {
        if self.learning_rate.is_some() {
            0
        } else {
            2 * self.calibration_pairs
        }
    }
}

fn rademacher<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Simultaneous-perturbation gradient estimate from `f(θ + cΔ)` and `f(θ − cΔ)`.
///
/// For Rademacher `Δ`, `1/Δ_i = Δ_i`.
pub fn spsa_gradient(f_plus: f64, f_minus: f64, ck: f64, delta: &[f64]) -> Vec<f64> {
    let slope = (f_plus - f_minus) / (2.0 * ck);
    delta.iter().map(|d| slope * d).collect()
}

fn shifted(theta: &[f64], delta: &[f64], scale: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + scale * d).collect()
}

pub fn spsa_minimize(
    mut obj: Objective<'_>,
    theta0: &[f64],
    max_iterations: usize,
    rng_seed: u64,
    config: &SpsaConfig,
) -> Result<OptTrace> {
    check_start(&obj, theta0, max_iterations)?;
    let method = Method::Spsa;
    let dim = obj.dim;
    let mut rng = seed::rng(rng_seed);
    let big_a = config.stability_fraction * max_iterations as f64;
    let setup = config.calibration_nfev();

    let a = match config.learning_rate {
        Some(a) => a,
        None => {
            let mut total = 0.0;
            for _ in 0..config.calibration_pairs {
                let delta = rademacher(dim, &mut rng);
                let fp = obj.evaluate(&shifted(theta0, &delta, config.c));
                let fp = match fp {
                    Ok(v) => v,
                    Err(v) => return Err(obj.abort(v, method, theta0, 0, setup)),
                };
                let fm = match obj.evaluate(&shifted(theta0, &delta, -config.c)) {
                    Ok(v) => v,
                    Err(v) => return Err(obj.abort(v, method, theta0, 0, setup)),
                };
                total += ((fp - fm) / (2.0 * config.c)).abs();
            }
            let mean = total / config.calibration_pairs.max(1) as f64;
            let scale = config.target_magnitude * (1.0 + big_a).powf(config.alpha);
            if mean > 0.0 && (scale / mean).is_finite() {
                scale / mean
            } else {
                scale
            }
        }
    };

    let mut theta = theta0.to_vec();
    for k in 0..max_iterations {
        let ck = config.c / ((k + 1) as f64).powf(config.gamma);
        let ak = a / ((k + 1) as f64 + big_a).powf(config.alpha);
        let delta = rademacher(dim, &mut rng);
        let fp = match obj.evaluate(&shifted(&theta, &delta, ck)) {
            Ok(v) => v,
            Err(v) => return Err(obj.abort(v, method, theta0, k, setup)),
        };
        let fm = match obj.evaluate(&shifted(&theta, &delta, -ck)) {
            Ok(v) => v,
            Err(v) => return Err(obj.abort(v, method, theta0, k, setup)),
        };
        for (t, g) in theta.iter_mut().zip(spsa_gradient(fp, fm, ck, &delta)) {
            *t -= ak * g;
        }
    }
    Ok(obj.into_trace(method, theta0, max_iterations, setup))
}

/// Settings for [`one_eval_minimize`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneEvalConfig {
    /// Initial trust radius, also the initial simplex edge length.
    pub rho_begin: f64,
    /// The method stops early once the radius falls below this.
    pub rho_end: f64,
}

impl Default for OneEvalConfig {
    fn default() -> Self {
        Self {
            rho_begin: 1.0,
            rho_end: 1e-6,
        }
    }
}

// Simplex acceptability: every vertex within BETA·ρ of the best one and at
// least ALPHA·ρ away from the opposite face.
const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
// Actual/predicted reduction below this counts as a failed step.
const RATIO_FLOOR: f64 = 0.1;
// At or above this the radius doubles, up to `rho_begin`.
const RATIO_EXPAND: f64 = 0.7;

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

/// Linear interpolation model about the best vertex.
struct Model {
    best: usize,
    /// Indices of the other vertices, row order of `inv`'s columns.
    others: Vec<usize>,
    gradient: DVector<f64>,
    /// `inv[:, r]` is orthogonal to every edge except edge `r`.
    inv: DMatrix<f64>,
}

impl Simplex {
    fn best(&self) -> usize {
        (0..self.values.len())
            .min_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))
            .expect("non-empty simplex")
    }

    fn edge(&self, from: usize, to: usize) -> DVector<f64> {
        DVector::from_iterator(
            self.points[to].len(),
            self.points[to].iter().zip(&self.points[from]).map(|(a, b)| a - b),
        )
    }

    fn model(&self) -> std::result::Result<Model, (usize, usize)> {
        let best = self.best();
        let others: Vec<usize> = (0..self.points.len()).filter(|&i| i != best).collect();
        let dim = others.len();
        let mut edges = DMatrix::zeros(dim, dim);
        let mut df = DVector::zeros(dim);
        for (r, &j) in others.iter().enumerate() {
            edges.set_row(r, &self.edge(best, j).transpose());
            df[r] = self.values[j] - self.values[best];
        }
        match edges.clone().try_inverse() {
            Some(inv) => Ok(Model {
                best,
                gradient: &inv * df,
                others,
                inv,
            }),
            None => {
                let far = others
                    .iter()
                    .copied()
                    .max_by(|&a, &b| {
                        self.edge(best, a).norm().total_cmp(&self.edge(best, b).norm())
                    })
                    .expect("dim ≥ 1");
                Err((best, far))
            }
        }
    }
}

/// Minimizes with one objective evaluation per iteration.
///
/// Each iteration either takes a trust-region step `−ρ·g/|g|` along the
/// linear model through the current simplex, or, after a failed step on a
/// poorly shaped simplex, replaces one vertex to restore its geometry. When
/// a step fails on a well-shaped simplex the radius is halved without an
/// evaluation; a step that achieves most of its predicted reduction doubles
/// it, never beyond `rho_begin`.
pub fn one_eval_minimize(
    mut obj: Objective<'_>,
    theta0: &[f64],
    max_iterations: usize,
    config: &OneEvalConfig,
) -> Result<OptTrace> {
    check_start(&obj, theta0, max_iterations)?;
    if !(config.rho_begin > 0.0 && config.rho_end > 0.0) {
        return Err(Error::InvalidArgument("trust radii must be positive".into()));
    }
    let method = Method::OneEval;
    let dim = obj.dim;
    let setup = dim + 1;

    let mut simplex = Simplex {
        points: Vec::with_capacity(setup),
        values: Vec::with_capacity(setup),
    };
    for v in 0..setup {
        let mut x = theta0.to_vec();
        if v > 0 {
            x[v - 1] += config.rho_begin;
        }
        match obj.evaluate(&x) {
            Ok(f) => {
                simplex.points.push(x);
                simplex.values.push(f);
            }
            Err(f) => return Err(obj.abort(f, method, theta0, 0, setup)),
        }
    }

    let mut rho = config.rho_begin;
    let mut iterations = 0;
    let mut stalled = false;
    while iterations < max_iterations {
        let model = match simplex.model() {
            Ok(m) => m,
            Err((best, far)) => {
                // Degenerate simplex: push the farthest vertex back out along
                // a coordinate axis it has collapsed onto least.
                let e = simplex.edge(best, far);
                let axis = e.iamin();
                let mut x = simplex.points[best].clone();
                x[axis] += rho;
                match obj.evaluate(&x) {
                    Ok(f) => {
                        simplex.points[far] = x;
                        simplex.values[far] = f;
                    }
                    Err(f) => return Err(obj.abort(f, method, theta0, iterations, setup)),
                }
                iterations += 1;
                continue;
            }
        };
        let best = model.best;
        let x_best = simplex.points[best].clone();
        let f_best = simplex.values[best];

        if stalled {
            stalled = false;
            let mut worst: Option<(usize, f64)> = None;
            for (r, &j) in model.others.iter().enumerate() {
                let eta = simplex.edge(best, j).norm();
                let sigma = 1.0 / model.inv.column(r).norm();
                // too far beats too flat
                let badness = if eta > BETA * rho {
                    2.0 + eta / rho
                } else if sigma < ALPHA * rho {
                    1.0 - sigma / rho
                } else {
                    continue;
                };
                if worst.is_none_or(|(_, b)| badness > b) {
                    worst = Some((r, badness));
                }
            }
            match worst {
                Some((r, _)) => {
                    let col = model.inv.column(r);
                    let u = col / col.norm();
                    let sign = if model.gradient.dot(&u) > 0.0 { -1.0 } else { 1.0 };
                    let x: Vec<f64> = x_best
                        .iter()
                        .zip(u.iter())
                        .map(|(b, ui)| b + sign * rho * ui)
                        .collect();
                    let j = model.others[r];
                    match obj.evaluate(&x) {
                        Ok(f) => {
                            simplex.points[j] = x;
                            simplex.values[j] = f;
                        }
                        Err(f) => return Err(obj.abort(f, method, theta0, iterations, setup)),
                    }
                    iterations += 1;
                }
                None => {
                    rho *= 0.5;
                    if rho < config.rho_end {
                        break;
                    }
                }
            }
            continue;
        }

        let gnorm = model.gradient.norm();
        if gnorm <= f64::EPSILON * (1.0 + f_best.abs()) {
            stalled = true;
            continue;
        }
        let step = &model.gradient * (-rho / gnorm);
        let x_new: Vec<f64> = x_best.iter().zip(step.iter()).map(|(a, s)| a + s).collect();
        let f_new = match obj.evaluate(&x_new) {
            Ok(f) => f,
            Err(f) => return Err(obj.abort(f, method, theta0, iterations, setup)),
        };
        iterations += 1;

        // Barycentric weight of each vertex in x_new; replacing vertex v
        // scales the simplex volume by |λ_v|.
        let lambda_others = model.inv.tr_mul(&step);
        let lambda_best = 1.0 - lambda_others.sum();
        let score = |j: usize, lambda: f64| {
            let dist: f64 = simplex.points[j]
                .iter()
                .zip(&x_new)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            lambda.abs() * (dist / rho).max(1.0).powi(2)
        };
        let mut pick = model
            .others
            .iter()
            .enumerate()
            .map(|(r, &j)| (j, score(j, lambda_others[r])))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("dim ≥ 1");
        if f_new < f_best {
            let keep_best = score(best, lambda_best);
            if keep_best > pick.1 {
                pick = (best, keep_best);
            }
            simplex.points[pick.0] = x_new;
            simplex.values[pick.0] = f_new;
        } else if pick.1 > 1.0 {
            simplex.points[pick.0] = x_new;
            simplex.values[pick.0] = f_new;
        }

        let ratio = (f_best - f_new) / (rho * gnorm);
        if ratio < RATIO_FLOOR {
            stalled = true;
        } else if ratio >= RATIO_EXPAND {
            rho = (2.0 * rho).min(config.rho_begin);
        }
    }
    Ok(obj.into_trace(method, theta0, iterations, setup))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetProfile {
    /// `10·⌊√N⌋` iterations.
    Simulation,
    /// `max(10·⌊√N⌋, 200)` iterations.
    Hardware,
}

/// `⌊√(2^n)⌋`, exact.
pub fn floor_sqrt_dim(n: usize) -> u64 {
    assert!(n < 64, "n = {n} too large");
    (1u64 << n).isqrt()
}

pub fn iteration_budget(n: usize, profile: BudgetProfile) -> usize {
    let base = 10 * floor_sqrt_dim(n) as usize;
    match profile {
        BudgetProfile::Simulation => base,
        BudgetProfile::Hardware => base.max(200),
    }
}
