//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]`/`[FAIL]` line with the measured quantities.
//!
//! The numerical assertions hold in any profile; the stated wall-clock
//! budgets are asserted only in optimized builds
//! (`cargo test --release --test acceptance`).

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use max1c::algo::{estimate_m, run_smax1c, stepsize, StepsizeRule};
use max1c::bench::{per_run_csv, run_bench, write_outputs, AlgoName, BenchConfig, InstanceName};
use max1c::composite::CompositeTerm;
use max1c::model::{
    aggregate_weights, beta_for_horizon, powers_of_two_start_set, Cut, MaxOneCutModel, StartSet,
};
use max1c::problems::{NewsvendorOracle, NewsvendorProblem, QpPreset, TwoStageQpInstance};
use max1c::prox::{kkt_residual, prox_point, ProxSettings, ProxTolerance};
use max1c::seedstream::{derive_seed, rng_from};
use max1c::verify::{
    check_max_lemma, check_noise_max_one_cut, check_noise_one_cut, check_q_variance,
    check_schedule_floor, check_schedule_power, empirical_mean, rate_bound_rhs, sigma_hat,
};

fn assert_runtime(name: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("       {name}: {elapsed:.2}s (budget {budget_s}s)");
    if !cfg!(debug_assertions) {
        assert!(
            elapsed < budget_s,
            "{name} exceeded its runtime budget: {elapsed:.2}s >= {budget_s}s"
        );
    }
}

// -------------------------------------------------------------------------
// 1. Recursion equivalence: the recursively updated bundle equals the
//    direct max of weighted one-cut aggregates at random probe points.
// -------------------------------------------------------------------------

fn direct_model_value(cuts: &[Cut], j: usize, starts: &StartSet, beta: f64, probe: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &k in starts.indices().iter().take_while(|&&k| k <= j) {
        let weights = aggregate_weights(k, j, beta).expect("valid k <= j");
        let mut value = 0.0;
        for (w, cut) in weights.iter().zip(&cuts[k - 1..=j - 1]) {
            value += w * cut.affine_value(probe);
        }
        best = best.max(value);
    }
    best
}

#[test]
fn criterion_1_recursion_equivalence() {
    let started = Instant::now();
    let mut rng = rng_from(derive_seed(101, &["recursion"], 0));
    let streams = 50;
    let max_j = 64;
    let probes_per_stream = 100;
    let mut worst_rel = 0.0_f64;
    for stream in 0..streams {
        let n = 1 + rng.random_range(0..20usize);
        let horizon = 4 + rng.random_range(0..=(max_j - 4));
        let cuts: Vec<Cut> = (0..horizon)
            .map(|_| {
                let g: Vec<f64> = (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z
                    })
                    .collect();
                let c: f64 = StandardNormal.sample(&mut rng);
                Cut::new(c, g)
            })
            .collect();
        let probes: Vec<Vec<f64>> = (0..probes_per_stream)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        3.0 * z
                    })
                    .collect()
            })
            .collect();
        let beta = beta_for_horizon(horizon).unwrap();
        for starts in [
            StartSet::singleton(horizon).unwrap(),
            powers_of_two_start_set(horizon).unwrap(),
        ] {
            let mut model = MaxOneCutModel::new(CompositeTerm::Zero, beta).unwrap();
            for j in 1..=horizon {
                model.update(cuts[j - 1].clone(), j, &starts).unwrap();
                for probe in &probes {
                    let recursive = model.evaluate(probe).unwrap();
                    let direct = direct_model_value(&cuts, j, &starts, beta, probe);
                    let rel = (recursive - direct).abs() / direct.abs().max(1.0);
                    worst_rel = worst_rel.max(rel);
                    assert!(
                        rel <= 1e-9,
                        "stream {stream} j={j} |B|={}: relative error {rel}",
                        starts.len()
                    );
                }
            }
        }
    }
    println!("[PASS] criterion 1: recursion equivalence, worst relative error {worst_rel:.3e}");
    assert_runtime("criterion 1", started, 5.0);
}

// -------------------------------------------------------------------------
// 2. Prox oracle equivalence against locally refined dense grid search.
// -------------------------------------------------------------------------

struct GridCase {
    pieces: Vec<(f64, Vec<f64>)>,
    h: CompositeTerm,
    z0: Vec<f64>,
    lambda: f64,
}

fn grid_objective(case: &GridCase, u: &[f64]) -> f64 {
    let feasible = match &case.h {
        CompositeTerm::Zero => true,
        CompositeTerm::BallIndicator { center, radius } => {
            let d2: f64 = u.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 <= radius * radius * (1.0 + 1e-12)
        }
        CompositeTerm::BoxIndicator { lower, upper } => u
            .iter()
            .zip(lower)
            .zip(upper)
            .all(|((x, l), h)| *x >= *l && *x <= *h),
    };
    if !feasible {
        return f64::INFINITY;
    }
    let aff = case
        .pieces
        .iter()
        .map(|(c, g)| c + g.iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let d2: f64 = u.iter().zip(&case.z0).map(|(a, b)| (a - b) * (a - b)).sum();
    aff + d2 / (2.0 * case.lambda)
}

/// Coarse grid plus local refinement around the incumbent. A refinement
/// window re-centers without shrinking while the incumbent keeps moving
/// (walking along shallow kink valleys of the max-affine term), and
/// shrinks once it stabilizes.
fn grid_search(case: &GridCase, lo: &[f64], hi: &[f64]) -> (f64, Vec<f64>) {
    let n = lo.len();
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let coarse = if n == 1 { 4001 } else { 801 };
    let scan = |lo: &[f64], hi: &[f64], steps: usize, best: &mut (f64, Vec<f64>)| {
        let mut idx = vec![0usize; n];
        loop {
            let u: Vec<f64> = (0..n)
                .map(|d| lo[d] + (hi[d] - lo[d]) * idx[d] as f64 / (steps - 1) as f64)
                .collect();
            let val = grid_objective(case, &u);
            if val < best.0 {
                *best = (val, u);
            }
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < steps {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == n {
                    return;
                }
            }
        }
    };
    scan(lo, hi, coarse, &mut best);
    let width = (0..n).map(|d| hi[d] - lo[d]).fold(0.0_f64, f64::max);
    let mut half = 3.0 * width / (coarse - 1) as f64;
    let fine = if n == 1 { 961 } else { 241 };
    let target = 1e-8 * width.max(1.0);
    for _ in 0..200 {
        let center = best.1.clone();
        let wlo: Vec<f64> = (0..n).map(|d| center[d] - half).collect();
        let whi: Vec<f64> = (0..n).map(|d| center[d] + half).collect();
        scan(&wlo, &whi, fine, &mut best);
        let moved = best
            .1
            .iter()
            .zip(&center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if moved <= 0.5 * half {
            half *= 6.0 / (fine - 1) as f64;
            if half <= target {
                break;
            }
        }
    }
    best
}

#[test]
fn criterion_2_prox_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = rng_from(derive_seed(102, &["prox-grid"], 0));
    let settings = ProxSettings {
        tol: ProxTolerance::absolute(1e-10),
        max_iterations: 10_000,
    };
    let mut worst_value = 0.0_f64;
    let mut worst_point = 0.0_f64;
    let mut worst_kkt = 0.0_f64;
    for case_idx in 0..50 {
        let n = 1 + (case_idx % 2);
        let m = 1 + (case_idx % 4);
        let h = match case_idx % 3 {
            0 => CompositeTerm::Zero,
            1 => {
                let center: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
                CompositeTerm::ball(center, rng.random_range(0.5..2.0)).unwrap()
            }
            _ => {
                let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..-0.5)).collect();
                let upper: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
                CompositeTerm::boxed(lower, upper).unwrap()
            }
        };
        let pieces: Vec<(f64, Vec<f64>)> = (0..m)
            .map(|_| {
                (
                    rng.random_range(-1.0..1.0),
                    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
                )
            })
            .collect();
        let lambda = 10f64.powf(rng.random_range(-1.0..1.3));
        let z0: Vec<f64> = match &h {
            CompositeTerm::Zero => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            _ => h.project(
                &(0..n)
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect::<Vec<f64>>(),
            ),
        };
        let case = GridCase {
            pieces: pieces.clone(),
            h: h.clone(),
            z0: z0.clone(),
            lambda,
        };

        let model = max1c::model::build_multicut_model(
            pieces.into_iter().map(|(c, g)| Cut::new(c, g)).collect(),
            h.clone(),
        )
        .unwrap();
        let sol = prox_point(&model, &z0, lambda, &settings).expect("prox must converge");
        let kkt = kkt_residual(&sol, &model, &z0, lambda);
        worst_kkt = worst_kkt.max(kkt);
        assert!(kkt <= 1e-8, "case {case_idx}: KKT residual {kkt:.3e}");

        // search window: the domain for indicators; a ball around the
        // prox path for the unconstrained case
        let (lo, hi): (Vec<f64>, Vec<f64>) = match &h {
            CompositeTerm::Zero => {
                let reach = lambda
                    * case
                        .pieces
                        .iter()
                        .map(|(_, g)| g.iter().map(|x| x * x).sum::<f64>().sqrt())
                        .fold(0.0_f64, f64::max)
                    + 1.0;
                (
                    z0.iter().map(|v| v - reach).collect(),
                    z0.iter().map(|v| v + reach).collect(),
                )
            }
            CompositeTerm::BallIndicator { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            CompositeTerm::BoxIndicator { lower, upper } => (lower.clone(), upper.clone()),
        };
        let (grid_value, grid_point) = grid_search(&case, &lo, &hi);
        let dv = (sol.primal_value - grid_value).abs();
        let dp = sol
            .point
            .iter()
            .zip(&grid_point)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        worst_value = worst_value.max(dv);
        worst_point = worst_point.max(dp);
        assert!(
            dv <= 1e-6,
            "case {case_idx}: value gap {dv:.3e} (solver {:.12} grid {:.12})",
            sol.primal_value,
            grid_value
        );
        assert!(dp <= 1e-3, "case {case_idx}: point gap {dp:.3e}");
    }
    println!(
        "[PASS] criterion 2: prox vs grid search, worst value {worst_value:.3e}, point {worst_point:.3e}, kkt {worst_kkt:.3e}"
    );
    assert_runtime("criterion 2", started, 30.0);
}

// -------------------------------------------------------------------------
// 3. Two-stage QP subgradients against central finite differences.
// -------------------------------------------------------------------------

#[test]
fn criterion_3_subgradient_finite_differences() {
    let started = Instant::now();
    let mut rng = rng_from(derive_seed(103, &["fd"], 0));
    let mut boundary_cases = 0usize;
    let mut worst_rel = 0.0_f64;
    let total = 200;
    for case_idx in 0..total {
        let n = 3 + (case_idx % 8);
        let (d, r, chi) = if case_idx % 2 == 0 {
            (2.0, 4.0, 5.0)
        } else {
            (50.0, 100.0, 2.0)
        };
        let instance = TwoStageQpInstance::generate(
            derive_seed(103, &["inst"], case_idx as u64),
            n,
            d,
            r,
            chi,
        )
        .unwrap();
        let x1 = instance.sample_feasible(&mut rng);
        // every sixth case is crafted to clamp the recourse: strong
        // first-stage coupling, short second-stage noise
        let xi = if case_idx % 6 == 5 {
            let nrm2: f64 = x1.iter().map(|v| v * v).sum();
            let mut xi = vec![0.0; 2 * n];
            let drive = 40.0 * (r * r - nrm2).sqrt().max(1.0);
            for i in 0..n {
                xi[i] = drive * x1[i] / nrm2.max(1e-9);
                xi[n + i] = rng.random_range(-0.05..0.05);
            }
            xi
        } else {
            instance.draw_xi(&mut rng)
        };
        let recourse = instance.second_stage_solve(&x1, &xi).unwrap();
        if recourse.multiplier > 1e-8 {
            boundary_cases += 1;
        }
        let (_, subgradient) = instance.oracle_sample(&x1, &xi).unwrap();
        let h = 1e-5;
        let mut fd = vec![0.0; n];
        for i in 0..n {
            let mut plus = x1.clone();
            plus[i] += h;
            let mut minus = x1.clone();
            minus[i] -= h;
            let (fp, _) = instance.oracle_sample(&plus, &xi).unwrap();
            let (fm, _) = instance.oracle_sample(&minus, &xi).unwrap();
            fd[i] = (fp - fm) / (2.0 * h);
        }
        let err: f64 = fd
            .iter()
            .zip(&subgradient)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = subgradient
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            .max(1.0);
        let rel = err / scale;
        worst_rel = worst_rel.max(rel);
        assert!(rel <= 1e-4, "case {case_idx}: relative fd error {rel:.3e}");
    }
    assert!(
        boundary_cases >= 20,
        "need at least 20 boundary-recourse cases, got {boundary_cases}"
    );
    println!(
        "[PASS] criterion 3: {total} fd checks ({boundary_cases} boundary), worst relative error {worst_rel:.3e}"
    );
    assert_runtime("criterion 3", started, 10.0);
}

// -------------------------------------------------------------------------
// 4. Known-optimum convergence of the max-one-cut method at the
//    theoretical stepsize.
// -------------------------------------------------------------------------

#[test]
fn criterion_4_known_optimum_convergence() {
    let started = Instant::now();
    let seed = derive_seed(104, &["convergence"], 0);
    let problem = NewsvendorProblem::standard();
    let phi_star = problem.phi_star();
    let x_star = problem.x_star();
    let horizon = 1000;
    let runs = 30;
    let report_t = 10_000;
    let starts = powers_of_two_start_set(horizon).unwrap();
    let h = problem.composite();

    let mut oracle = NewsvendorOracle::new(problem.clone());
    let sampler_problem = problem.clone();
    let m_hat = estimate_m(
        &mut oracle,
        move |rng| sampler_problem.sample_feasible(rng),
        10_000,
        derive_seed(seed, &["m-hat"], 0),
    );
    let d = 5.0 + x_star.abs();
    let lambda = stepsize(&StepsizeRule::TheoreticalSingle { d, m: m_hat }, horizon, 1).unwrap();
    let mut sigma_oracle = NewsvendorOracle::new(problem.clone());
    let sigma = sigma_hat(
        &mut sigma_oracle,
        &h,
        &[x_star],
        100_000,
        derive_seed(seed, &["sigma"], 0),
    );
    let rhs = rate_bound_rhs(m_hat, d, horizon, starts.len(), sigma.sigma_hat);

    let mut u_values = Vec::with_capacity(runs);
    let mut reported_values = Vec::with_capacity(runs);
    for rep in 0..runs {
        let run_seed = derive_seed(seed, &["run"], rep as u64);
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
        .expect("run must succeed");
        u_values.push(run.result.averaged_value.unwrap());
        let mut report_oracle = NewsvendorOracle::new(problem.clone());
        let est = empirical_mean(
            &mut report_oracle,
            &run.result.averaged_iterate,
            report_t,
            derive_seed(seed, &["report"], rep as u64),
        );
        reported_values.push(est.mean);
    }
    let stats = |xs: &[f64]| {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
        (mean, (var / xs.len() as f64).sqrt())
    };
    let (u_mean, u_se) = stats(&u_values);
    let (f_mean, f_se) = stats(&reported_values);

    let u_gap = u_mean - phi_star;
    assert!(
        u_gap >= -3.0 * u_se,
        "mean(u_I) = {u_mean:.6} fell below phi* = {phi_star:.6} - 3SE ({u_se:.2e})"
    );
    assert!(
        u_gap <= rhs + 3.0 * u_se,
        "mean(u_I) - phi* = {u_gap:.6} exceeds rate bound {rhs:.6} + 3SE"
    );
    let f_gap = f_mean - phi_star;
    assert!(
        f_gap <= rhs + 3.0 * f_se,
        "mean(F_T(z_a)) - phi* = {f_gap:.6} exceeds rate bound {rhs:.6} + 3SE"
    );
    println!(
        "[PASS] criterion 4: mean(u_I)-phi* = {u_gap:.5} in [-{:.1e}, {rhs:.3}], mean(F_T)-phi* = {f_gap:.5}",
        3.0 * u_se
    );
    assert_runtime("criterion 4", started, 120.0);
}

// -------------------------------------------------------------------------
// 5. Model-noise bounds at the optimum (max-one-cut and one-cut schemes).
// -------------------------------------------------------------------------

#[test]
fn criterion_5_noise_bounds() {
    let started = Instant::now();
    let max_one_cut = check_noise_max_one_cut(200, 100, derive_seed(105, &["noise-max"], 0));
    assert!(
        max_one_cut.pass,
        "max-one-cut noise {:.4e} exceeds bound {:.4e} + 3SE ({:.2e})",
        max_one_cut.lhs, max_one_cut.rhs, max_one_cut.std_error
    );
    let one_cut = check_noise_one_cut(200, 100, derive_seed(105, &["noise-one"], 0));
    assert!(
        one_cut.pass,
        "one-cut noise {:.4e} exceeds 3SE ({:.2e})",
        one_cut.lhs, one_cut.std_error
    );
    println!(
        "[PASS] criterion 5: noise max-one-cut {:.3e} <= {:.3e}, one-cut {:.3e} <= 3*{:.3e}",
        max_one_cut.lhs, max_one_cut.rhs, one_cut.lhs, one_cut.std_error
    );
    assert_runtime("criterion 5", started, 60.0);
}

// -------------------------------------------------------------------------
// 6. Variance bound for the geometric oracle average and the expected-max
//    bound for centered variables.
// -------------------------------------------------------------------------

#[test]
fn criterion_6_variance_and_max_lemmas() {
    let started = Instant::now();
    let (variance, mean) = check_q_variance(1, 100, 10_000, derive_seed(106, &["q"], 0));
    assert!(
        variance.pass,
        "Q variance {:.4e} exceeds bound {:.4e} + 3SE",
        variance.lhs, variance.rhs
    );
    assert!(
        mean.pass,
        "Q mean deviates from phi by {:.4e} > 3SE {:.4e}",
        mean.lhs, mean.rhs
    );
    for b_size in [2usize, 7] {
        let report = check_max_lemma(
            1.0,
            b_size,
            1_000_000,
            derive_seed(106, &["max"], b_size as u64),
        );
        assert!(
            report.pass,
            "expected-max estimate {:.4e} exceeds bound {:.4e} + 3SE",
            report.lhs, report.rhs
        );
    }
    println!(
        "[PASS] criterion 6: Q variance {:.3e} <= {:.3e}; expected-max bounds hold at |B| = 2 and 7",
        variance.lhs, variance.rhs
    );
    assert_runtime("criterion 6", started, 30.0);
}

// -------------------------------------------------------------------------
// 7. Blending-weight schedule bounds, exhaustively up to 10^4.
// -------------------------------------------------------------------------

#[test]
fn criterion_7_schedule_bounds() {
    let started = Instant::now();
    let power = check_schedule_power(10_000);
    let floor = check_schedule_floor(10_000);
    assert!(power.pass, "(I+1) beta^(I+1) max = {:.6} > 1", power.lhs);
    assert!(
        floor.pass,
        "beta floor violated: min beta = {:.6}",
        floor.rhs
    );
    println!(
        "[PASS] criterion 7: max (I+1)*beta^(I+1) = {:.4} <= 1, min beta = {:.4} >= 1/3",
        power.lhs, floor.rhs
    );
    assert_runtime("criterion 7", started, 1.0);
}

// -------------------------------------------------------------------------
// 8. Qualitative benchmark reproduction: on the C3 preset the max-one-cut
//    method beats the one-cut method by more than combined 3*SE.
// -------------------------------------------------------------------------

#[test]
fn criterion_8_c3_ordering() {
    let started = Instant::now();
    let config = BenchConfig {
        instances: vec![InstanceName::Qp(QpPreset::C3)],
        algorithms: vec![AlgoName::S1c, AlgoName::SMax1c],
        iteration_targets: vec![200],
        seeds: 30,
        report_t: 10_000,
        master_seed: 108,
        workers: 0, // all cores
        ..BenchConfig::default()
    };
    let rows = run_bench(&config).expect("bench must run");
    assert!(rows.iter().all(|r| r.error.is_none()), "runs must succeed");
    let stats = |name: &str| {
        let objs: Vec<f64> = rows
            .iter()
            .filter(|r| r.algorithm == name)
            .map(|r| r.obj)
            .collect();
        assert_eq!(objs.len(), 30);
        let mean = objs.iter().sum::<f64>() / objs.len() as f64;
        let var =
            objs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (objs.len() - 1) as f64;
        (mean, (var / objs.len() as f64).sqrt())
    };
    let (one_cut_mean, one_cut_se) = stats("S-1C");
    let (max_mean, max_se) = stats("S-Max1C");
    let combined_se = (one_cut_se * one_cut_se + max_se * max_se).sqrt();
    let margin = one_cut_mean - max_mean;
    assert_runtime("criterion 8", started, 600.0);
    if margin > 3.0 * combined_se {
        println!(
            "[PASS] criterion 8: C3/N=200 mean obj S-Max1C {max_mean:.3} < S-1C {one_cut_mean:.3} (margin {margin:.3} > {:.3})",
            3.0 * combined_se
        );
    } else {
        println!(
            "[FAIL] criterion 8: C3/N=200 mean obj S-Max1C {max_mean:.3} vs S-1C {one_cut_mean:.3}; margin {margin:.3} <= 3*SE {:.3}",
            3.0 * combined_se
        );
        panic!(
            "criterion 8 does not hold under the default benchmark pipeline: with the \
             uniform-on-ball subgradient-bound estimate (M ~ 123 on C3) the stepsize rule \
             lambda = 10 sqrt(I) D / M lands at lambda ~ 57, where both methods oscillate on \
             the feasible boundary and their averaged objectives coincide \
             ({one_cut_mean:.3} vs {max_mean:.3}). The separation the benchmark table reports \
             appears at stepsizes about 4x smaller (see the supplementary transition-regime \
             test, which passes); the published cell evidently used an effective stepsize in \
             that window, which the stated rule does not pin down. See notes in the repo \
             README and the suite output."
        );
    }
}

// -------------------------------------------------------------------------
// 8b (supplementary, not a release criterion): the max-one-cut advantage on
// C3 is real and appears in the transition regime of the practical
// stepsize rule. Same pipeline, same shared seeds, practical constant 2.5
// instead of 10.
// -------------------------------------------------------------------------

#[test]
fn supplementary_c3_ordering_in_transition_regime() {
    let started = Instant::now();
    let config = BenchConfig {
        instances: vec![InstanceName::Qp(QpPreset::C3)],
        algorithms: vec![AlgoName::S1c, AlgoName::SMax1c],
        iteration_targets: vec![200],
        seeds: 30,
        report_t: 10_000,
        master_seed: 108,
        workers: 0,
        practical_c: 2.5,
        ..BenchConfig::default()
    };
    let rows = run_bench(&config).expect("bench must run");
    assert!(rows.iter().all(|r| r.error.is_none()), "runs must succeed");
    let stats = |name: &str| {
        let objs: Vec<f64> = rows
            .iter()
            .filter(|r| r.algorithm == name)
            .map(|r| r.obj)
            .collect();
        let mean = objs.iter().sum::<f64>() / objs.len() as f64;
        let var =
            objs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (objs.len() - 1) as f64;
        (mean, (var / objs.len() as f64).sqrt())
    };
    let (one_cut_mean, one_cut_se) = stats("S-1C");
    let (max_mean, max_se) = stats("S-Max1C");
    let combined_se = (one_cut_se * one_cut_se + max_se * max_se).sqrt();
    let margin = one_cut_mean - max_mean;
    assert!(
        margin > 3.0 * combined_se,
        "transition-regime separation missing: S-Max1C {max_mean:.3} vs S-1C {one_cut_mean:.3}"
    );
    println!(
        "[PASS] supplementary: C3/N=200 at practical C=2.5, S-Max1C {max_mean:.3} < S-1C {one_cut_mean:.3} (margin {margin:.3} > {:.3})",
        3.0 * combined_se
    );
    assert_runtime("supplementary", started, 600.0);
}

// -------------------------------------------------------------------------
// 9. Determinism of the benchmark outputs.
// -------------------------------------------------------------------------

#[test]
fn criterion_9_bench_determinism() {
    let started = Instant::now();
    let config = BenchConfig {
        instances: vec![InstanceName::Newsvendor, InstanceName::Qp(QpPreset::C1)],
        algorithms: vec![AlgoName::Rsa, AlgoName::SMax1c, AlgoName::MMax1c],
        iteration_targets: vec![24],
        seeds: 2,
        report_t: 500,
        master_seed: 109,
        workers: 2,
        mhat_calls: 500,
        ..BenchConfig::default()
    };
    let first = run_bench(&config).expect("bench must run");
    let second = run_bench(&config).expect("bench must run");
    assert_eq!(per_run_csv(&first), per_run_csv(&second));

    // and through the file outputs
    let base = std::env::temp_dir().join(format!("max1c-acceptance-{}", std::process::id()));
    let dir_a = base.join("a");
    let dir_b = base.join("b");
    write_outputs(&first, &config, &dir_a).unwrap();
    write_outputs(&second, &config, &dir_b).unwrap();
    let bytes_a = std::fs::read(dir_a.join("per_run.csv")).unwrap();
    let bytes_b = std::fs::read(dir_b.join("per_run.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b, "per_run.csv must be byte-identical");
    std::fs::remove_dir_all(&base).ok();
    println!(
        "[PASS] criterion 9: per-run CSV byte-identical across reruns ({} rows)",
        first.len()
    );
    assert_runtime("criterion 9", started, 120.0);
}
