//! Monte Carlo verification of the statistical facts the methods rest on:
//! the expected-max bound for centered variables, the variance bound for
//! geometric averages of oracle values, the model-noise bounds for the
//! one-cut / max-one-cut / multi-cut schemes, and the expected-gap bound of
//! the max-one-cut method on a known-optimum problem.
//!
//! Every check is one-sided with an explicit `3 * SE` slack and a fixed
//! seed; a failing check reports the estimate, the bound, the standard
//! error, and the seed that reproduces it.

use rayon::prelude::*;

use crate::algo::{
    estimate_m, run_scp, run_smax1c, stepsize, ModelScheme, Oracle, RunError, ScpParams,
    StepsizeRule,
};
use crate::composite::CompositeTerm;
use crate::model::{
    aggregate_weights, beta_for_horizon, powers_of_two_start_set, ModelError, StartSet,
};
use crate::problems::{NewsvendorOracle, NewsvendorProblem};
use crate::prox::ProxSettings;
use crate::seedstream::{derive_seed, rng_from};

/// Sample mean and (unbiased) sample standard deviation of `t` independent
/// oracle values at a fixed point.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalMean {
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
}

impl EmpiricalMean {
    pub fn std_error(&self) -> f64 {
        if self.samples > 0 {
            self.std / (self.samples as f64).sqrt()
        } else {
            f64::INFINITY
        }
    }
}

pub fn empirical_mean<O: Oracle + ?Sized>(
    oracle: &mut O,
    x: &[f64],
    t: usize,
    seed: u64,
) -> EmpiricalMean {
    let mut rng = rng_from(seed);
    let mut values = Vec::with_capacity(t);
    for _ in 0..t {
        values.push(oracle.call(x, &mut rng).value);
    }
    let mean = values.iter().sum::<f64>() / t.max(1) as f64;
    let var = if t > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1) as f64
    } else {
        0.0
    };
    EmpiricalMean {
        mean,
        std: var.sqrt(),
        samples: t,
    }
}

/// Estimate of `sigma(u)`, the standard deviation of the stochastic
/// composite value at a fixed feasible point.
#[derive(Debug, Clone)]
pub struct SigmaEstimate {
    pub point: Vec<f64>,
    pub sigma_hat: f64,
    pub samples: usize,
}

pub fn sigma_hat<O: Oracle + ?Sized>(
    oracle: &mut O,
    h: &CompositeTerm,
    u: &[f64],
    samples: usize,
    seed: u64,
) -> SigmaEstimate {
    assert!(samples >= 2, "variance needs at least two samples");
    assert!(h.contains(u), "sigma is defined on the domain of h");
    let est = empirical_mean(oracle, u, samples, seed);
    SigmaEstimate {
        point: u.to_vec(),
        sigma_hat: est.std,
        samples,
    }
}

/// Monte Carlo estimate of the model noise
/// `max(0, E[Gamma_I(u)] - phi(u))` for a configured algorithm.
#[derive(Debug, Clone)]
pub struct NoiseEstimate {
    pub point: Vec<f64>,
    pub mean_model_value: f64,
    pub phi_u: f64,
    pub noise_hat: f64,
    pub std_error: f64,
    pub runs: usize,
}

/// Runs the configured algorithm `runs` times with independent derived
/// seeds, evaluating the final model at `u` each time.
/// `model_value_at_u(seed)` must build a fresh oracle, run the algorithm,
/// and return `Gamma_I(u)`; `phi_u` is the objective value at `u` (analytic
/// where available, a large-sample empirical mean otherwise).
pub fn model_noise_hat<F>(
    model_value_at_u: F,
    u: &[f64],
    phi_u: f64,
    runs: usize,
    seed: u64,
) -> Result<NoiseEstimate, RunError>
where
    F: Fn(u64) -> Result<f64, RunError> + Sync,
{
    assert!(runs >= 2, "noise estimation needs replication");
    let values: Vec<f64> = (0..runs)
        .into_par_iter()
        .map(|r| model_value_at_u(derive_seed(seed, &["noise-run"], r as u64)))
        .collect::<Result<_, _>>()?;
    let mean = values.iter().sum::<f64>() / runs as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (runs - 1) as f64;
    Ok(NoiseEstimate {
        point: u.to_vec(),
        mean_model_value: mean,
        phi_u,
        noise_hat: (mean - phi_u).max(0.0),
        std_error: (var / runs as f64).sqrt(),
        runs,
    })
}

/// Monte Carlo check of the expected-max bound: for `b_size` iid centered
/// variables with standard deviation at most `sigma_x`,
/// `E[max_k Y_k] <= 2 sigma_x sqrt(b_size - 1)`.
#[derive(Debug, Clone, Copy)]
pub struct MaxLemmaReport {
    pub lhs_hat: f64,
    pub rhs: f64,
    pub std_error: f64,
    pub trials: usize,
}

pub fn max_lemma_check(sigma_x: f64, b_size: usize, trials: usize, seed: u64) -> MaxLemmaReport {
    assert!(b_size >= 2);
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rng_from(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..trials {
        let mut max = f64::NEG_INFINITY;
        for _ in 0..b_size {
            let z: f64 = StandardNormal.sample(&mut rng);
            max = max.max(sigma_x * z);
        }
        sum += max;
        sumsq += max * max;
    }
    let mean = sum / trials as f64;
    let var = (sumsq / trials as f64 - mean * mean).max(0.0);
    MaxLemmaReport {
        lhs_hat: mean,
        rhs: 2.0 * sigma_x * ((b_size - 1) as f64).sqrt(),
        std_error: (var / trials as f64).sqrt(),
        trials,
    }
}

/// Monte Carlo check of the variance bound for the geometric average
/// `Q_k^I(u)` of `I - k + 1` oracle values at `u`, together with its mean
/// identity `E[Q_k^I(u)] = phi(u)`.
#[derive(Debug, Clone)]
pub struct QVarianceReport {
    pub var_hat: f64,
    pub bound: f64,
    pub var_std_error: f64,
    pub mean_q: f64,
    pub mean_se: f64,
    pub phi_hat: f64,
    pub phi_se: f64,
    pub sigma_hat: f64,
    pub trials: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn q_variance_check<O, G>(
    mut fresh_oracle: G,
    h: &CompositeTerm,
    u: &[f64],
    k: usize,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<QVarianceReport, ModelError>
where
    O: Oracle,
    G: FnMut() -> O,
{
    if k > horizon / 2 {
        return Err(ModelError::StartBeyondHalf {
            index: k,
            limit: horizon / 2,
        });
    }
    assert!(h.contains(u), "u must be feasible");
    let beta = beta_for_horizon(horizon)?;
    let weights = aggregate_weights(k, horizon, beta)?;

    // Large-sample reference estimates of phi(u) and sigma(u).
    let ref_samples = (10 * trials).max(100_000);
    let mut oracle = fresh_oracle();
    let phi_est = empirical_mean(&mut oracle, u, ref_samples, derive_seed(seed, &["phi"], 0));

    let mut rng = rng_from(derive_seed(seed, &["q-trials"], 0));
    let mut oracle = fresh_oracle();
    let mut q_values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut q = 0.0;
        for w in &weights {
            q += w * oracle.call(u, &mut rng).value;
        }
        q_values.push(q);
    }
    let mean_q = q_values.iter().sum::<f64>() / trials as f64;
    // Variance about the reference mean (the quantity the bound controls).
    let sq: Vec<f64> = q_values
        .iter()
        .map(|q| (q - phi_est.mean) * (q - phi_est.mean))
        .collect();
    let var_hat = sq.iter().sum::<f64>() / trials as f64;
    let sq_mean = var_hat;
    let sq_var = sq
        .iter()
        .map(|s| (s - sq_mean) * (s - sq_mean))
        .sum::<f64>()
        / (trials - 1) as f64;
    let mean_var = q_values
        .iter()
        .map(|q| (q - mean_q) * (q - mean_q))
        .sum::<f64>()
        / (trials - 1) as f64;

    let i1 = (horizon + 1) as f64;
    let sigma = phi_est.std;
    Ok(QVarianceReport {
        var_hat,
        bound: 4.0 * i1.ln() / i1 * sigma * sigma,
        var_std_error: (sq_var / trials as f64).sqrt(),
        mean_q,
        mean_se: (mean_var / trials as f64).sqrt(),
        phi_hat: phi_est.mean,
        phi_se: phi_est.std_error(),
        sigma_hat: sigma,
        trials,
    })
}

/// Right-hand side of the expected-gap bound for the single-stage
/// max-one-cut method:
/// `2 sqrt(ln(I+1)/(I+1)) * (sqrt(22) M D + 2 sigma_star sqrt(|B|-1))`.
pub fn rate_bound_rhs(m: f64, d: f64, horizon: usize, b_size: usize, sigma_star: f64) -> f64 {
    let i1 = (horizon + 1) as f64;
    2.0 * (i1.ln() / i1).sqrt()
        * (22.0_f64.sqrt() * m * d + 2.0 * sigma_star * ((b_size - 1) as f64).sqrt())
}

/// Multi-stage variant: the deterministic term shrinks with the stage
/// count, the noise term does not.
pub fn rate_bound_rhs_multi(
    m: f64,
    d: f64,
    horizon: usize,
    stages: usize,
    b_size: usize,
    sigma_star: f64,
) -> f64 {
    let i1 = (horizon + 1) as f64;
    2.0 * (i1.ln() / i1).sqrt()
        * (22.0_f64.sqrt() * m * d / (stages as f64).sqrt()
            + 2.0 * sigma_star * ((b_size - 1) as f64).sqrt())
}

// ---------------------------------------------------------------------------
// Named checks (shared by the CLI and the acceptance suite)
// ---------------------------------------------------------------------------

/// One row of the verification report.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub std_error: f64,
    pub seed: u64,
    pub runtime_s: f64,
    pub pass: bool,
}

impl CheckReport {
    fn timed<F: FnOnce() -> (f64, f64, f64, bool)>(name: &str, seed: u64, body: F) -> Self {
        let started = std::time::Instant::now();
        let (lhs, rhs, std_error, pass) = body();
        CheckReport {
            name: name.to_string(),
            lhs,
            rhs,
            std_error,
            seed,
            runtime_s: started.elapsed().as_secs_f64(),
            pass,
        }
    }
}

/// Renders check reports as a fixed-width text table.
pub fn render_checks(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>14} {:>14} {:>12} {:>12} {:>10} {:>6}\n",
        "check", "lhs", "rhs", "std_err", "seed", "time_s", "pass"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<28} {:>14.6e} {:>14.6e} {:>12.3e} {:>12} {:>10.3} {:>6}\n",
            r.name,
            r.lhs,
            r.rhs,
            r.std_error,
            r.seed,
            r.runtime_s,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

/// `(I+1) * beta^(I+1) <= 1` exhaustively up to `max_horizon`.
pub fn check_schedule_power(max_horizon: usize) -> CheckReport {
    CheckReport::timed("schedule-beta-power", 0, || {
        let mut worst = f64::NEG_INFINITY;
        for i in 1..=max_horizon {
            let beta = beta_for_horizon(i).expect("valid horizon");
            worst = worst.max(beta.powi(i as i32 + 1) * (i + 1) as f64);
        }
        (worst, 1.0, 0.0, worst <= 1.0 + 1e-12)
    })
}

/// `beta >= 1/3` exhaustively up to `max_horizon`.
pub fn check_schedule_floor(max_horizon: usize) -> CheckReport {
    CheckReport::timed("schedule-beta-floor", 0, || {
        let mut min_beta = f64::INFINITY;
        for i in 1..=max_horizon {
            min_beta = min_beta.min(beta_for_horizon(i).expect("valid horizon"));
        }
        (1.0 / 3.0, min_beta, 0.0, min_beta >= 1.0 / 3.0)
    })
}

pub fn check_max_lemma(sigma_x: f64, b_size: usize, trials: usize, seed: u64) -> CheckReport {
    let name = format!("max-lemma-b{b_size}");
    let report = max_lemma_check(sigma_x, b_size, trials, seed);
    CheckReport {
        name,
        lhs: report.lhs_hat,
        rhs: report.rhs,
        std_error: report.std_error,
        seed,
        runtime_s: 0.0,
        pass: report.lhs_hat <= report.rhs + 3.0 * report.std_error,
    }
}

/// Variance and mean checks of the geometric oracle average on the standard
/// newsvendor problem at `u = 0`.
pub fn check_q_variance(
    k: usize,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> (CheckReport, CheckReport) {
    let problem = NewsvendorProblem::standard();
    let h = problem.composite();
    let report = q_variance_check(
        || NewsvendorOracle::new(problem.clone()),
        &h,
        &[0.0],
        k,
        horizon,
        trials,
        seed,
    )
    .expect("k <= I/2");
    let variance = CheckReport {
        name: format!("q-variance-k{k}-I{horizon}"),
        lhs: report.var_hat,
        rhs: report.bound,
        std_error: report.var_std_error,
        seed,
        runtime_s: 0.0,
        pass: report.var_hat <= report.bound + 3.0 * report.var_std_error,
    };
    let combined_se = (report.mean_se * report.mean_se + report.phi_se * report.phi_se).sqrt();
    let mean = CheckReport {
        name: format!("q-mean-k{k}-I{horizon}"),
        lhs: (report.mean_q - report.phi_hat).abs(),
        rhs: 3.0 * combined_se,
        std_error: combined_se,
        seed,
        runtime_s: 0.0,
        pass: (report.mean_q - report.phi_hat).abs() <= 3.0 * combined_se,
    };
    (variance, mean)
}

fn newsvendor_lambda(problem: &NewsvendorProblem, horizon: usize, seed: u64) -> f64 {
    let mut oracle = NewsvendorOracle::new(problem.clone());
    let p = problem.clone();
    let m_hat = estimate_m(
        &mut oracle,
        move |rng| p.sample_feasible(rng),
        10_000,
        derive_seed(seed, &["m-hat"], 0),
    );
    let (lower, upper) = problem.bounds();
    let d = (upper - lower) / 2.0 + problem.x_star().abs();
    stepsize(&StepsizeRule::TheoreticalSingle { d, m: m_hat }, horizon, 1).expect("positive inputs")
}

/// Noise estimate at the optimum of a newsvendor problem for one of the
/// three model schemes.
fn newsvendor_noise(
    problem: &NewsvendorProblem,
    scheme_of: impl Fn(usize) -> ModelScheme + Sync,
    horizon: usize,
    runs: usize,
    seed: u64,
) -> NoiseEstimate {
    let x_star = problem.x_star();
    let lambda = newsvendor_lambda(problem, horizon, seed);
    let h = problem.composite();
    let runner = |run_seed: u64| -> Result<f64, RunError> {
        let mut oracle = NewsvendorOracle::new(problem.clone());
        let params = ScpParams {
            lambda,
            iterations: horizon,
            prox: ProxSettings::default(),
        };
        let run = run_scp(
            &mut oracle,
            &h,
            &scheme_of(horizon),
            &params,
            &[0.0],
            run_seed,
        )?;
        Ok(run.model_value(&[x_star])?)
    };
    model_noise_hat(runner, &[x_star], problem.phi_star(), runs, seed)
        .expect("newsvendor runs stay feasible")
}

/// One-cut scheme: the expected model never overestimates the objective,
/// so the positive-part noise estimate must vanish within noise.
pub fn check_noise_one_cut(horizon: usize, runs: usize, seed: u64) -> CheckReport {
    CheckReport::timed("noise-one-cut", seed, || {
        let problem = NewsvendorProblem::standard();
        let est = newsvendor_noise(
            &problem,
            |i| ModelScheme::MaxOneCut {
                starts: StartSet::singleton(i).expect("I >= 2"),
            },
            horizon,
            runs,
            seed,
        );
        (
            est.noise_hat,
            0.0,
            est.std_error,
            est.noise_hat <= 3.0 * est.std_error,
        )
    })
}

/// Max-one-cut scheme with power-of-two starts: noise at the optimum obeys
/// `4 sigma(x*) sqrt(|B|-1) sqrt(ln(I+1)/(I+1))`.
pub fn check_noise_max_one_cut(horizon: usize, runs: usize, seed: u64) -> CheckReport {
    CheckReport::timed("noise-max-one-cut", seed, || {
        let problem = NewsvendorProblem::standard();
        let starts = powers_of_two_start_set(horizon).expect("I >= 2");
        let b_size = starts.len();
        let mut oracle = NewsvendorOracle::new(problem.clone());
        let sigma = sigma_hat(
            &mut oracle,
            &problem.composite(),
            &[problem.x_star()],
            100_000,
            derive_seed(seed, &["sigma"], 0),
        );
        let est = newsvendor_noise(
            &problem,
            |i| ModelScheme::MaxOneCut {
                starts: powers_of_two_start_set(i).expect("I >= 2"),
            },
            horizon,
            runs,
            seed,
        );
        let i1 = (horizon + 1) as f64;
        let bound = 4.0 * sigma.sigma_hat * ((b_size - 1) as f64).sqrt() * (i1.ln() / i1).sqrt();
        (
            est.noise_hat,
            bound,
            est.std_error,
            est.noise_hat <= bound + 3.0 * est.std_error,
        )
    })
}

/// Multi-cut scheme: noise at a fixed point is bounded by
/// `2 sigma(u) sqrt(I-1)`.
pub fn check_noise_multi_cut(horizon: usize, runs: usize, seed: u64) -> CheckReport {
    CheckReport::timed("noise-multi-cut", seed, || {
        let problem = NewsvendorProblem::standard();
        let mut oracle = NewsvendorOracle::new(problem.clone());
        let sigma = sigma_hat(
            &mut oracle,
            &problem.composite(),
            &[problem.x_star()],
            100_000,
            derive_seed(seed, &["sigma"], 0),
        );
        let est = newsvendor_noise(&problem, |_| ModelScheme::MultiCut, horizon, runs, seed);
        let bound = 2.0 * sigma.sigma_hat * ((horizon - 1) as f64).sqrt();
        (
            est.noise_hat,
            bound,
            est.std_error,
            est.noise_hat <= bound + 3.0 * est.std_error,
        )
    })
}

/// On a high-variance newsvendor the multi-cut noise strictly exceeds the
/// max-one-cut noise (the qualitative gap between the two schemes).
pub fn check_noise_contrast(horizon: usize, runs: usize, seed: u64) -> CheckReport {
    CheckReport::timed("noise-contrast", seed, || {
        let problem = NewsvendorProblem::new(0.9, 0.0, 4.0, -20.0, 20.0).expect("valid parameters");
        let multi = newsvendor_noise(&problem, |_| ModelScheme::MultiCut, horizon, runs, seed);
        let maxed = newsvendor_noise(
            &problem,
            |i| ModelScheme::MaxOneCut {
                starts: powers_of_two_start_set(i).expect("I >= 2"),
            },
            horizon,
            runs,
            seed,
        );
        let combined_se =
            (multi.std_error * multi.std_error + maxed.std_error * maxed.std_error).sqrt();
        let diff = multi.noise_hat - maxed.noise_hat;
        (
            diff,
            3.0 * combined_se,
            combined_se,
            diff > 3.0 * combined_se,
        )
    })
}

/// Expected-gap checks on the standard newsvendor with the theoretical
/// stepsize: the averaged observed value dominates the optimum (within
/// noise) and sits below the rate bound; the empirical objective at the
/// averaged iterate does too.
pub fn check_value_bounds(horizon: usize, runs: usize, seed: u64) -> Vec<CheckReport> {
    let problem = NewsvendorProblem::standard();
    let phi_star = problem.phi_star();
    let x_star = problem.x_star();
    let starts = powers_of_two_start_set(horizon).expect("I >= 2");
    let lambda = newsvendor_lambda(&problem, horizon, seed);
    let h = problem.composite();

    let mut oracle = NewsvendorOracle::new(problem.clone());
    let p = problem.clone();
    let m_hat = estimate_m(
        &mut oracle,
        move |rng| p.sample_feasible(rng),
        10_000,
        derive_seed(seed, &["m-hat"], 0),
    );
    let (lower, upper) = problem.bounds();
    let d = (upper - lower) / 2.0 + x_star.abs();
    let mut sigma_oracle = NewsvendorOracle::new(problem.clone());
    let sigma = sigma_hat(
        &mut sigma_oracle,
        &h,
        &[x_star],
        100_000,
        derive_seed(seed, &["sigma"], 0),
    );
    let rhs = rate_bound_rhs(m_hat, d, horizon, starts.len(), sigma.sigma_hat);

    let started = std::time::Instant::now();
    let outcomes: Vec<(f64, f64)> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let run_seed = derive_seed(seed, &["value-run"], r as u64);
            let mut oracle = NewsvendorOracle::new(problem.clone());
            let run = run_smax1c(
                &mut oracle,
                &h,
                lambda,
                horizon,
                &starts,
                &[0.0],
                run_seed,
                &ProxSettings::default(),
            )
            .expect("newsvendor run");
            let u_final = run.result.averaged_value.expect("cutting-plane value");
            let phi_avg = problem.phi(run.result.averaged_iterate[0]);
            (u_final, phi_avg)
        })
        .collect();
    let runtime = started.elapsed().as_secs_f64();

    let stats = |xs: &[f64]| -> (f64, f64) {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
        (mean, (var / xs.len() as f64).sqrt())
    };
    let (u_mean, u_se) = stats(&outcomes.iter().map(|o| o.0).collect::<Vec<_>>());
    let (phi_mean, phi_se) = stats(&outcomes.iter().map(|o| o.1).collect::<Vec<_>>());

    vec![
        CheckReport {
            name: "value-average-floor".into(),
            lhs: phi_star - u_mean,
            rhs: 3.0 * u_se,
            std_error: u_se,
            seed,
            runtime_s: runtime,
            pass: u_mean - phi_star >= -3.0 * u_se,
        },
        CheckReport {
            name: "value-average-rate".into(),
            lhs: u_mean - phi_star,
            rhs,
            std_error: u_se,
            seed,
            runtime_s: 0.0,
            pass: u_mean - phi_star <= rhs + 3.0 * u_se,
        },
        CheckReport {
            name: "iterate-average-rate".into(),
            lhs: phi_mean - phi_star,
            rhs,
            std_error: phi_se,
            seed,
            runtime_s: 0.0,
            pass: phi_mean - phi_star >= -1e-12 && phi_mean - phi_star <= rhs + 3.0 * phi_se,
        },
    ]
}

/// The full verification battery at CLI-friendly sizes.
pub fn run_all_checks(seed: u64) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    reports.push(check_schedule_power(10_000));
    reports.push(check_schedule_floor(10_000));
    reports.push(check_max_lemma(
        1.0,
        2,
        1_000_000,
        derive_seed(seed, &["max-lemma"], 2),
    ));
    reports.push(check_max_lemma(
        1.0,
        7,
        1_000_000,
        derive_seed(seed, &["max-lemma"], 7),
    ));
    let (variance, mean) = check_q_variance(1, 100, 10_000, derive_seed(seed, &["q-var"], 0));
    reports.push(variance);
    reports.push(mean);
    reports.push(check_noise_one_cut(
        200,
        100,
        derive_seed(seed, &["noise-s1"], 0),
    ));
    reports.push(check_noise_max_one_cut(
        200,
        100,
        derive_seed(seed, &["noise-max"], 0),
    ));
    reports.push(check_noise_multi_cut(
        64,
        100,
        derive_seed(seed, &["noise-s2"], 0),
    ));
    reports.push(check_noise_contrast(
        64,
        200,
        derive_seed(seed, &["contrast"], 0),
    ));
    reports.extend(check_value_bounds(
        200,
        30,
        derive_seed(seed, &["value"], 0),
    ));
    reports
}
