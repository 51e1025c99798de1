//! Stochastic approximation drivers: the cutting-plane loop with the
//! max-one-cut or multi-cut model, its multi-stage warm-started variant,
//! the RSA and DA baselines, stepsize rules, and the subgradient-bound
//! estimator.
//!
//! Sample bookkeeping in the cutting-plane loop: the cut formed at
//! iteration `j` uses only the sample drawn at that iteration, evaluated at
//! the previous iterate, so `z_j` never depends on its own sample. The
//! running objective average `u_j` needs the oracle value at `z_j` under
//! the *next* sample and is therefore finalized one iteration late; one
//! extra draw after the loop finalizes `u_I`, for `I + 1` draws in total.

use std::time::Instant;

use rand::RngCore;
use thiserror::Error;

use crate::composite::CompositeTerm;
use crate::linalg::{dist2, norm2};
use crate::model::{beta_for_horizon, Cut, MaxOneCutModel, ModelError, MultiCutModel, StartSet};
use crate::prox::{prox_point_warm, ProxError, ProxSettings};
use crate::seedstream::{rng_from, RunRng};

/// One stochastic oracle evaluation: `F(x; xi)` and a subgradient
/// `s(x; xi)`, with the draw counter of the oracle instance.
#[derive(Debug, Clone)]
pub struct OracleSample {
    pub value: f64,
    pub subgradient: Vec<f64>,
    pub sample_id: u64,
}

/// A stochastic first-order oracle. `call` draws a fresh sample of the
/// randomness and evaluates the pair `(F(x; xi), s(x; xi))`. Instances are
/// stateful only through their draw counter; the harness gives each run its
/// own instance.
pub trait Oracle {
    fn dim(&self) -> usize;
    fn call(&mut self, x: &[f64], rng: &mut dyn RngCore) -> OracleSample;
}

/// Per-iteration diagnostics of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub stage: usize,
    pub iteration: usize,
    pub model_pieces: usize,
    pub prox_gap: f64,
    pub prox_iterations: usize,
    pub step_norm: f64,
}

/// Output of a run: the last iterate, the averaged iterate, the averaged
/// observed objective value when the method defines one, and the trace.
/// `wall_time_s` is measurement, not part of the deterministic contract.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub last_iterate: Vec<f64>,
    pub averaged_iterate: Vec<f64>,
    pub averaged_value: Option<f64>,
    pub trace: Vec<TraceRecord>,
    pub seed: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("prox subproblem failed at iteration {iteration}: {source}")]
    Prox { iteration: usize, source: ProxError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("oracle returned a non-finite {what} at iteration {iteration}")]
    NonFiniteOracle {
        iteration: usize,
        what: &'static str,
    },
    #[error("starting point is outside the domain of h")]
    InfeasibleStart,
    #[error("iteration count must be at least {min}, got {got}")]
    TooFewIterations { min: usize, got: usize },
    #[error("stage count must be at least 1")]
    NoStages,
    #[error("{what} must be positive, got {got}")]
    NonPositive { what: &'static str, got: f64 },
}

/// Which bundle model the cutting-plane loop maintains.
#[derive(Debug, Clone)]
pub enum ModelScheme {
    /// Max of one-cut aggregates spawned at the given start indices.
    MaxOneCut { starts: StartSet },
    /// Pointwise max of every raw cut. Storage and model noise grow with
    /// the iteration count; kept for verification workloads.
    MultiCut,
}

#[derive(Debug)]
enum BundleState {
    MaxOneCut(MaxOneCutModel),
    MultiCut(MultiCutModel),
}

/// A finished cutting-plane run together with its final bundle model,
/// which verification workloads evaluate at probe points.
#[derive(Debug)]
pub struct ScpRun {
    pub result: RunResult,
    model: BundleState,
}

impl ScpRun {
    /// Final-model value `Gamma_I(u)` (`h` included).
    pub fn model_value(&self, u: &[f64]) -> Result<f64, ModelError> {
        match &self.model {
            BundleState::MaxOneCut(m) => m.evaluate(u),
            BundleState::MultiCut(m) => m.evaluate(u),
        }
    }

    pub fn max_one_cut_model(&self) -> Option<&MaxOneCutModel> {
        match &self.model {
            BundleState::MaxOneCut(m) => Some(m),
            BundleState::MultiCut(_) => None,
        }
    }
}

/// Parameters of a single cutting-plane stage.
#[derive(Debug, Clone)]
pub struct ScpParams {
    pub lambda: f64,
    pub iterations: usize,
    pub prox: ProxSettings,
}

impl ScpParams {
    pub fn new(lambda: f64, iterations: usize) -> Self {
        ScpParams {
            lambda,
            iterations,
            prox: ProxSettings::default(),
        }
    }
}

/// Runs the single-stage cutting-plane loop with a fresh RNG seeded from
/// `seed`. See the module docs for the sampling discipline.
pub fn run_scp<O: Oracle + ?Sized>(
    oracle: &mut O,
    h: &CompositeTerm,
    scheme: &ModelScheme,
    params: &ScpParams,
    z0: &[f64],
    seed: u64,
) -> Result<ScpRun, RunError> {
    let mut rng = rng_from(seed);
    run_scp_with_rng(oracle, h, scheme, params, z0, seed, 1, 0, &mut rng)
}

#[allow(clippy::too_many_arguments)]
fn run_scp_with_rng<O: Oracle + ?Sized>(
    oracle: &mut O,
    h: &CompositeTerm,
    scheme: &ModelScheme,
    params: &ScpParams,
    z0: &[f64],
    seed: u64,
    stage: usize,
    iteration_offset: usize,
    rng: &mut RunRng,
) -> Result<ScpRun, RunError> {
    let total = params.iterations;
    if total < 1 {
        return Err(RunError::TooFewIterations { min: 1, got: total });
    }
    if !h.contains(z0) {
        return Err(RunError::InfeasibleStart);
    }
    let beta = beta_for_horizon(total)?;
    let mut model = match scheme {
        ModelScheme::MaxOneCut { .. } => {
            BundleState::MaxOneCut(MaxOneCutModel::new(h.clone(), beta)?)
        }
        ModelScheme::MultiCut => BundleState::MultiCut(MultiCutModel::empty(h.clone())),
    };

    let started = Instant::now();
    let mut trace = Vec::with_capacity(total);
    let mut z_prev = z0.to_vec();
    let mut z_avg: Vec<f64> = Vec::new();
    let mut u_prev: Option<f64> = None;
    let mut warm_theta: Vec<f64> = Vec::new();

    for j in 1..=total {
        let sample = checked_call(oracle, &z_prev, rng, j)?;
        // Phi(z_{j-1}; xi_{j-1}); z_prev is feasible so h contributes 0.
        let phi_prev = sample.value;
        if j >= 2 {
            u_prev = Some(match u_prev {
                None => phi_prev,
                Some(u) => (1.0 - beta) * phi_prev + beta * u,
            });
        }

        let cut = Cut::from_oracle(&z_prev, sample.value, sample.subgradient);
        let spawned = match (&mut model, scheme) {
            (BundleState::MaxOneCut(m), ModelScheme::MaxOneCut { starts }) => {
                let before = m.aggregates().len();
                m.update(cut, j, starts)?;
                m.aggregates().len() > before
            }
            (BundleState::MultiCut(m), ModelScheme::MultiCut) => {
                m.push(cut)?;
                true
            }
            _ => unreachable!("model state matches scheme by construction"),
        };
        if spawned {
            warm_theta.push(0.0);
        }

        let solution = match &model {
            BundleState::MaxOneCut(m) => {
                prox_point_warm(m, z0, params.lambda, &params.prox, Some(&warm_theta))
            }
            BundleState::MultiCut(m) => {
                prox_point_warm(m, z0, params.lambda, &params.prox, Some(&warm_theta))
            }
        }
        .map_err(|source| RunError::Prox {
            iteration: iteration_offset + j,
            source,
        })?;
        warm_theta = solution.dual_weights.clone();
        let z_j = solution.point;

        if j == 1 {
            z_avg = z_j.clone();
        } else {
            for (a, zj) in z_avg.iter_mut().zip(&z_j) {
                *a = (1.0 - beta) * zj + beta * *a;
            }
        }

        trace.push(TraceRecord {
            stage,
            iteration: iteration_offset + j,
            model_pieces: match &model {
                BundleState::MaxOneCut(m) => m.aggregates().len(),
                BundleState::MultiCut(m) => m.cuts().len(),
            },
            prox_gap: solution.gap,
            prox_iterations: solution.iterations,
            step_norm: dist2(&z_j, &z_prev),
        });
        z_prev = z_j;
    }

    // Extra draw finalizing u_I with a sample independent of z_I.
    let final_sample = checked_call(oracle, &z_prev, rng, total + 1)?;
    let u_final = match u_prev {
        None => final_sample.value,
        Some(u) => (1.0 - beta) * final_sample.value + beta * u,
    };

    Ok(ScpRun {
        result: RunResult {
            last_iterate: z_prev,
            averaged_iterate: z_avg,
            averaged_value: Some(u_final),
            trace,
            seed,
            wall_time_s: started.elapsed().as_secs_f64(),
        },
        model,
    })
}

fn checked_call<O: Oracle + ?Sized>(
    oracle: &mut O,
    x: &[f64],
    rng: &mut dyn RngCore,
    iteration: usize,
) -> Result<OracleSample, RunError> {
    let sample = oracle.call(x, rng);
    if !sample.value.is_finite() {
        return Err(RunError::NonFiniteOracle {
            iteration,
            what: "value",
        });
    }
    if sample.subgradient.iter().any(|g| !g.is_finite()) {
        return Err(RunError::NonFiniteOracle {
            iteration,
            what: "subgradient",
        });
    }
    Ok(sample)
}

/// Single-stage max-one-cut method: the cutting-plane loop with the
/// max-one-cut bundle. With `starts = {1}` it degenerates to the classical
/// one-cut recursion.
#[allow(clippy::too_many_arguments)]
pub fn run_smax1c<O: Oracle + ?Sized>(
    oracle: &mut O,
    h: &CompositeTerm,
    lambda: f64,
    iterations: usize,
    starts: &StartSet,
    z0: &[f64],
    seed: u64,
    prox: &ProxSettings,
) -> Result<ScpRun, RunError> {
    if iterations < 2 {
        return Err(RunError::TooFewIterations {
            min: 2,
            got: iterations,
        });
    }
    let params = ScpParams {
        lambda,
        iterations,
        prox: *prox,
    };
    run_scp(
        oracle,
        h,
        &ModelScheme::MaxOneCut {
            starts: starts.clone(),
        },
        &params,
        z0,
        seed,
    )
}

/// Output of the multi-stage method: stage outputs are plainly averaged.
#[derive(Debug, Clone)]
pub struct MultiStageRun {
    pub result: RunResult,
    pub stage_averaged_iterates: Vec<Vec<f64>>,
    pub stage_averaged_values: Vec<f64>,
}

/// Multi-stage max-one-cut method: `stages` warm-started runs of the
/// single-stage method, each seeded from the same stream so that one stage
/// reduces exactly to the single-stage method. Reports the plain average of
/// the stage averaged iterates and of the stage averaged values.
#[allow(clippy::too_many_arguments)]
pub fn run_mmax1c<O: Oracle + ?Sized>(
    oracle: &mut O,
    h: &CompositeTerm,
    lambda: f64,
    iterations_per_stage: usize,
    stages: usize,
    starts: &StartSet,
    z0: &[f64],
    seed: u64,
    prox: &ProxSettings,
) -> Result<MultiStageRun, RunError> {
    if stages < 1 {
        return Err(RunError::NoStages);
    }
    if iterations_per_stage < 2 {
        return Err(RunError::TooFewIterations {
            min: 2,
            got: iterations_per_stage,
        });
    }
    let params = ScpParams {
        lambda,
        iterations: iterations_per_stage,
        prox: *prox,
    };
    let scheme = ModelScheme::MaxOneCut {
        starts: starts.clone(),
    };
    let started = Instant::now();
    let mut rng = rng_from(seed);
    let mut x = z0.to_vec();
    let mut trace = Vec::with_capacity(stages * iterations_per_stage);
    let mut stage_iterates = Vec::with_capacity(stages);
    let mut stage_values = Vec::with_capacity(stages);
    for stage in 1..=stages {
        let offset = (stage - 1) * iterations_per_stage;
        let run = run_scp_with_rng(
            oracle, h, &scheme, &params, &x, seed, stage, offset, &mut rng,
        )?;
        x = run.result.last_iterate;
        trace.extend(run.result.trace);
        stage_iterates.push(run.result.averaged_iterate);
        stage_values.push(
            run.result
                .averaged_value
                .expect("cutting-plane stages always produce a value average"),
        );
    }
    let n = z0.len();
    let mut averaged_iterate = vec![0.0; n];
    for y in &stage_iterates {
        for (a, yi) in averaged_iterate.iter_mut().zip(y) {
            *a += yi / stages as f64;
        }
    }
    let averaged_value = stage_values.iter().sum::<f64>() / stages as f64;
    Ok(MultiStageRun {
        result: RunResult {
            last_iterate: x,
            averaged_iterate,
            averaged_value: Some(averaged_value),
            trace,
            seed,
            wall_time_s: started.elapsed().as_secs_f64(),
        },
        stage_averaged_iterates: stage_iterates,
        stage_averaged_values: stage_values,
    })
}

/// Robust stochastic approximation: constant-step projected stochastic
/// subgradient with uniform averaging of the post-step iterates.
pub fn run_rsa<O: Oracle + ?Sized>(
    oracle: &mut O,
    projection: &CompositeTerm,
    gamma: f64,
    iterations: usize,
    x0: &[f64],
    seed: u64,
) -> Result<RunResult, RunError> {
    if iterations < 1 {
        return Err(RunError::TooFewIterations {
            min: 1,
            got: iterations,
        });
    }
    if !(gamma > 0.0) {
        return Err(RunError::NonPositive {
            what: "gamma",
            got: gamma,
        });
    }
    if !projection.contains(x0) {
        return Err(RunError::InfeasibleStart);
    }
    let started = Instant::now();
    let mut rng = rng_from(seed);
    let mut x = x0.to_vec();
    let mut sum = vec![0.0; x.len()];
    let mut trace = Vec::with_capacity(iterations);
    for t in 1..=iterations {
        let sample = checked_call(oracle, &x, &mut rng, t)?;
        let moved: Vec<f64> = x
            .iter()
            .zip(&sample.subgradient)
            .map(|(xi, gi)| xi - gamma * gi)
            .collect();
        let next = projection.project(&moved);
        trace.push(TraceRecord {
            stage: 1,
            iteration: t,
            model_pieces: 1,
            prox_gap: 0.0,
            prox_iterations: 0,
            step_norm: dist2(&next, &x),
        });
        x = next;
        for (s, xi) in sum.iter_mut().zip(&x) {
            *s += xi;
        }
    }
    let averaged: Vec<f64> = sum.iter().map(|s| s / iterations as f64).collect();
    Ok(RunResult {
        last_iterate: x,
        averaged_iterate: averaged,
        averaged_value: None,
        trace,
        seed,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Dual averaging: steps against the running subgradient sum with the
/// increasing regularization schedule `gamma_k = M * alpha_k / (C sqrt(D))`,
/// `alpha_0 = alpha_1 = 1` and `alpha_k = alpha_{k-1} + 1/alpha_{k-1}`.
/// Reports the uniform average of the iterates; the last iterate stays
/// available in the result.
#[allow(clippy::too_many_arguments)]
pub fn run_da<O: Oracle + ?Sized>(
    oracle: &mut O,
    feasible_set: &CompositeTerm,
    c: f64,
    d: f64,
    m: f64,
    iterations: usize,
    x0: &[f64],
    seed: u64,
) -> Result<RunResult, RunError> {
    if iterations < 1 {
        return Err(RunError::TooFewIterations {
            min: 1,
            got: iterations,
        });
    }
    for (what, got) in [("C", c), ("D", d), ("M", m)] {
        if !(got > 0.0) {
            return Err(RunError::NonPositive { what, got });
        }
    }
    if !feasible_set.contains(x0) {
        return Err(RunError::InfeasibleStart);
    }
    let started = Instant::now();
    let mut rng = rng_from(seed);
    let mut x = x0.to_vec();
    let mut gsum = vec![0.0; x.len()];
    let mut sum = vec![0.0; x.len()];
    let mut alpha = 1.0_f64;
    let mut trace = Vec::with_capacity(iterations);
    for k in 0..iterations {
        let sample = checked_call(oracle, &x, &mut rng, k + 1)?;
        for (s, gi) in gsum.iter_mut().zip(&sample.subgradient) {
            *s += gi;
        }
        if k >= 2 {
            alpha += 1.0 / alpha;
        }
        let gamma_k = m * alpha / (c * d.sqrt());
        let moved: Vec<f64> = x0
            .iter()
            .zip(&gsum)
            .map(|(x0i, gi)| x0i - gi / gamma_k)
            .collect();
        let next = feasible_set.project(&moved);
        trace.push(TraceRecord {
            stage: 1,
            iteration: k + 1,
            model_pieces: 1,
            prox_gap: 0.0,
            prox_iterations: 0,
            step_norm: dist2(&next, &x),
        });
        x = next;
        for (s, xi) in sum.iter_mut().zip(&x) {
            *s += xi;
        }
    }
    let averaged: Vec<f64> = sum.iter().map(|s| s / iterations as f64).collect();
    Ok(RunResult {
        last_iterate: x,
        averaged_iterate: averaged,
        averaged_value: None,
        trace,
        seed,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Prox stepsize rules. `d` over-estimates the distance from the starting
/// point to the solution set; `m` bounds the second moment of the
/// stochastic subgradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizeRule {
    /// D sqrt(I+1) / (2 M sqrt(22 ln(I+1)))
    TheoreticalSingle { d: f64, m: f64 },
    /// D sqrt(I+1) / (2 M sqrt(22 N ln(I+1)))
    TheoreticalMulti { d: f64, m: f64 },
    /// C sqrt(I) D / M
    Practical { c: f64, d: f64, m: f64 },
}

/// Evaluates a stepsize rule for `iterations` per stage and `stages`
/// stages (the stage count only matters for the multi-stage rule).
pub fn stepsize(rule: &StepsizeRule, iterations: usize, stages: usize) -> Result<f64, RunError> {
    if iterations < 1 {
        return Err(RunError::TooFewIterations {
            min: 1,
            got: iterations,
        });
    }
    if stages < 1 {
        return Err(RunError::NoStages);
    }
    let check = |what: &'static str, v: f64| -> Result<f64, RunError> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(RunError::NonPositive { what, got: v })
        }
    };
    let i1 = (iterations + 1) as f64;
    match *rule {
        StepsizeRule::TheoreticalSingle { d, m } => {
            let d = check("D", d)?;
            let m = check("M", m)?;
            Ok(d * i1.sqrt() / (2.0 * m * (22.0 * i1.ln()).sqrt()))
        }
        StepsizeRule::TheoreticalMulti { d, m } => {
            let d = check("D", d)?;
            let m = check("M", m)?;
            Ok(d * i1.sqrt() / (2.0 * m * (22.0 * stages as f64 * i1.ln()).sqrt()))
        }
        StepsizeRule::Practical { c, d, m } => {
            let c = check("C", c)?;
            let d = check("D", d)?;
            let m = check("M", m)?;
            Ok(c * (iterations as f64).sqrt() * d / m)
        }
    }
}

/// Constant RSA stepsize `gamma = C D / (M sqrt(N))`.
pub fn rsa_gamma(c: f64, d: f64, m: f64, iterations: usize) -> Result<f64, RunError> {
    for (what, got) in [("C", c), ("D", d), ("M", m)] {
        if !(got > 0.0) {
            return Err(RunError::NonPositive { what, got });
        }
    }
    if iterations < 1 {
        return Err(RunError::TooFewIterations {
            min: 1,
            got: iterations,
        });
    }
    Ok(c * d / (m * (iterations as f64).sqrt()))
}

/// Estimates the subgradient bound as the maximum subgradient norm over
/// `count` oracle calls at sampled feasible points.
pub fn estimate_m<O, S>(oracle: &mut O, mut feasible_sampler: S, count: usize, seed: u64) -> f64
where
    O: Oracle + ?Sized,
    S: FnMut(&mut dyn RngCore) -> Vec<f64>,
{
    let mut rng = rng_from(seed);
    let mut best = 0.0_f64;
    for _ in 0..count {
        let x = feasible_sampler(&mut rng);
        let sample = oracle.call(&x, &mut rng);
        best = best.max(norm2(&sample.subgradient));
    }
    best
}
