//! Seeded benchmark harness: algorithm x instance grids over multiple
//! replicates, with deterministic CSV and markdown reporting.
//!
//! Seed discipline: instance generation, oracle noise, the subgradient
//! bound estimate, and the reporting draws all derive from
//! `(master_seed, instance, replicate)` only, so every algorithm inside a
//! replicate sees identical instances and identical noise streams, and
//! editing the algorithm list never shifts anyone else's draws. Each row
//! additionally records a per-run identity seed hashed from
//! `(master_seed, instance, algorithm, N, replicate)`.
//!
//! Wall-clock timings are reported in `timings.csv` and in the aggregated
//! table; `per_run.csv` holds only the deterministic result columns so that
//! reruns of the same configuration are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::RngCore;
use thiserror::Error;

use crate::algo::{
    estimate_m, rsa_gamma, run_da, run_mmax1c, run_rsa, run_smax1c, Oracle, RunError,
};
use crate::composite::CompositeTerm;
use crate::model::{powers_of_two_start_set, StartSet};
use crate::problems::{
    NewsvendorOracle, NewsvendorProblem, QpPreset, TwoStageOracle, TwoStageQpInstance,
};
use crate::prox::ProxSettings;
use crate::seedstream::derive_seed;
use crate::verify::empirical_mean;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("unknown instance '{0}' (expected C1..C4 or NEWSVENDOR)")]
    UnknownInstance(String),
    #[error("unknown algorithm '{0}' (expected RSA, DA, S-1C, S-Max1C, M-1C, M-Max1C)")]
    UnknownAlgorithm(String),
    #[error("{0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed results file: {0}")]
    Results(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlgoName {
    Rsa,
    Da,
    S1c,
    SMax1c,
    M1c,
    MMax1c,
}

impl AlgoName {
    pub const ALL: [AlgoName; 6] = [
        AlgoName::Rsa,
        AlgoName::Da,
        AlgoName::S1c,
        AlgoName::SMax1c,
        AlgoName::M1c,
        AlgoName::MMax1c,
    ];

    pub fn parse(name: &str) -> Result<Self, BenchError> {
        match name.trim().to_ascii_uppercase().as_str() {
            "RSA" => Ok(AlgoName::Rsa),
            "DA" => Ok(AlgoName::Da),
            "S-1C" => Ok(AlgoName::S1c),
            "S-MAX1C" => Ok(AlgoName::SMax1c),
            "M-1C" => Ok(AlgoName::M1c),
            "M-MAX1C" => Ok(AlgoName::MMax1c),
            _ => Err(BenchError::UnknownAlgorithm(name.trim().to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgoName::Rsa => "RSA",
            AlgoName::Da => "DA",
            AlgoName::S1c => "S-1C",
            AlgoName::SMax1c => "S-Max1C",
            AlgoName::M1c => "M-1C",
            AlgoName::MMax1c => "M-Max1C",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InstanceName {
    Qp(QpPreset),
    Newsvendor,
}

impl InstanceName {
    pub fn parse(name: &str) -> Result<Self, BenchError> {
        if let Some(preset) = QpPreset::parse(name) {
            return Ok(InstanceName::Qp(preset));
        }
        if name.trim().eq_ignore_ascii_case("NEWSVENDOR") {
            return Ok(InstanceName::Newsvendor);
        }
        Err(BenchError::UnknownInstance(name.trim().to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            InstanceName::Qp(p) => p.name(),
            InstanceName::Newsvendor => "NEWSVENDOR",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub instances: Vec<InstanceName>,
    pub algorithms: Vec<AlgoName>,
    pub iteration_targets: Vec<usize>,
    pub seeds: usize,
    pub report_t: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub practical_c: f64,
    pub rsa_c: f64,
    pub da_c: f64,
    pub rsa_diameter_factor: f64,
    pub mhat_calls: usize,
    pub out_dir: Option<String>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            instances: vec![InstanceName::Qp(QpPreset::C1)],
            algorithms: AlgoName::ALL.to_vec(),
            iteration_targets: vec![200, 1000],
            seeds: 30,
            report_t: 10_000,
            master_seed: 0,
            workers: 1,
            practical_c: 10.0,
            rsa_c: 0.1,
            da_c: 10.0,
            rsa_diameter_factor: 1.0,
            mhat_calls: 10_000,
            out_dir: None,
        }
    }
}

impl BenchConfig {
    /// Parses the `key = value` configuration format. Lists are
    /// comma-separated; `#` starts a comment. Unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut config = BenchConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| BenchError::Config {
                line: line_no,
                message: "expected 'key = value'".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |message: String| BenchError::Config {
                line: line_no,
                message,
            };
            match key {
                "instances" => {
                    config.instances = value
                        .split(',')
                        .map(InstanceName::parse)
                        .collect::<Result<_, _>>()?;
                }
                "algorithms" => {
                    config.algorithms = value
                        .split(',')
                        .map(AlgoName::parse)
                        .collect::<Result<_, _>>()?;
                }
                "iterations" => {
                    config.iteration_targets = value
                        .split(',')
                        .map(|tok| tok.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| bad(format!("iterations: {e}")))?;
                }
                "seeds" => {
                    config.seeds = value.parse().map_err(|e| bad(format!("seeds: {e}")))?;
                }
                "report_samples" => {
                    config.report_t = value
                        .parse()
                        .map_err(|e| bad(format!("report_samples: {e}")))?;
                }
                "master_seed" => {
                    config.master_seed = value
                        .parse()
                        .map_err(|e| bad(format!("master_seed: {e}")))?;
                }
                "workers" => {
                    config.workers = value.parse().map_err(|e| bad(format!("workers: {e}")))?;
                }
                "practical_c" => {
                    config.practical_c = value
                        .parse()
                        .map_err(|e| bad(format!("practical_c: {e}")))?;
                }
                "rsa_c" => {
                    config.rsa_c = value.parse().map_err(|e| bad(format!("rsa_c: {e}")))?;
                }
                "da_c" => {
                    config.da_c = value.parse().map_err(|e| bad(format!("da_c: {e}")))?;
                }
                "rsa_diameter_factor" => {
                    config.rsa_diameter_factor = value
                        .parse()
                        .map_err(|e| bad(format!("rsa_diameter_factor: {e}")))?;
                }
                "mhat_calls" => {
                    config.mhat_calls =
                        value.parse().map_err(|e| bad(format!("mhat_calls: {e}")))?;
                }
                "out" => {
                    config.out_dir = Some(value.to_string());
                }
                other => {
                    return Err(bad(format!("unknown key '{other}'")));
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.instances.is_empty() {
            return Err(BenchError::Invalid("no instances configured".into()));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::Invalid("no algorithms configured".into()));
        }
        if self.seeds < 1 {
            return Err(BenchError::Invalid("seeds must be at least 1".into()));
        }
        if self.iteration_targets.iter().any(|&n| n < 2) {
            return Err(BenchError::Invalid(
                "iteration targets must be at least 2".into(),
            ));
        }
        let multi_stage = self
            .algorithms
            .iter()
            .any(|a| matches!(a, AlgoName::M1c | AlgoName::MMax1c));
        if multi_stage && self.iteration_targets.iter().any(|&n| n / 2 < 2) {
            return Err(BenchError::Invalid(
                "two-stage variants need iteration targets of at least 4".into(),
            ));
        }
        if self.report_t < 1 {
            return Err(BenchError::Invalid(
                "report_samples must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Echo of the effective configuration, written next to the results.
    pub fn describe(&self) -> String {
        let list = |items: &[String]| items.join(", ");
        format!(
            "instances = {}\nalgorithms = {}\niterations = {}\nseeds = {}\nreport_samples = {}\nmaster_seed = {}\nworkers = {}\npractical_c = {}\nrsa_c = {}\nda_c = {}\nrsa_diameter_factor = {}\nmhat_calls = {}\n",
            list(&self.instances.iter().map(|i| i.name().to_string()).collect::<Vec<_>>()),
            list(&self.algorithms.iter().map(|a| a.name().to_string()).collect::<Vec<_>>()),
            list(&self.iteration_targets.iter().map(|n| n.to_string()).collect::<Vec<_>>()),
            self.seeds,
            self.report_t,
            self.master_seed,
            self.workers,
            self.practical_c,
            self.rsa_c,
            self.da_c,
            self.rsa_diameter_factor,
            self.mhat_calls,
        )
    }
}

/// One grid cell outcome. `obj` is the empirical mean of the oracle value
/// at the iterate the algorithm reports, `std` the sample deviation of
/// those draws, `cpu_s` the wall time of the algorithm loop alone.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub algorithm: String,
    pub instance: String,
    pub iterations: usize,
    pub replicate: usize,
    pub seed: u64,
    pub obj: f64,
    pub std: f64,
    pub cpu_s: f64,
    pub error: Option<String>,
}

#[derive(Clone)]
enum ResolvedProblem {
    Qp(TwoStageQpInstance),
    Newsvendor(NewsvendorProblem),
}

impl ResolvedProblem {
    fn resolve(name: InstanceName, instance_seed: u64) -> Self {
        match name {
            InstanceName::Qp(preset) => {
                ResolvedProblem::Qp(TwoStageQpInstance::from_preset(preset, instance_seed))
            }
            InstanceName::Newsvendor => ResolvedProblem::Newsvendor(NewsvendorProblem::standard()),
        }
    }

    fn dim(&self) -> usize {
        match self {
            ResolvedProblem::Qp(inst) => inst.dim(),
            ResolvedProblem::Newsvendor(_) => 1,
        }
    }

    fn composite(&self) -> CompositeTerm {
        match self {
            ResolvedProblem::Qp(inst) => inst.composite(),
            ResolvedProblem::Newsvendor(nv) => nv.composite(),
        }
    }

    /// Distance over-estimate fed to the stepsize rules: the ball radius
    /// for the QP, the box half-width for the newsvendor.
    fn distance_bound(&self) -> f64 {
        match self {
            ResolvedProblem::Qp(inst) => inst.ball_radius(),
            ResolvedProblem::Newsvendor(nv) => {
                let (lower, upper) = nv.bounds();
                (upper - lower) / 2.0
            }
        }
    }

    fn oracle(&self) -> Box<dyn Oracle + Send> {
        match self {
            ResolvedProblem::Qp(inst) => Box::new(TwoStageOracle::new(inst.clone())),
            ResolvedProblem::Newsvendor(nv) => Box::new(NewsvendorOracle::new(nv.clone())),
        }
    }

    fn sample_feasible(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        match self {
            ResolvedProblem::Qp(inst) => inst.sample_feasible(rng),
            ResolvedProblem::Newsvendor(nv) => nv.sample_feasible(rng),
        }
    }
}

struct ReplicateContext {
    problem: ResolvedProblem,
    m_hat: f64,
    noise_seed: u64,
    report_seed: u64,
}

fn replicate_context(
    config: &BenchConfig,
    name: InstanceName,
    replicate: usize,
) -> ReplicateContext {
    let tag = name.name();
    let instance_seed = derive_seed(config.master_seed, &["instance", tag], replicate as u64);
    let noise_seed = derive_seed(config.master_seed, &["noise", tag], replicate as u64);
    let report_seed = derive_seed(config.master_seed, &["report", tag], replicate as u64);
    let mhat_seed = derive_seed(config.master_seed, &["m-hat", tag], replicate as u64);
    let problem = ResolvedProblem::resolve(name, instance_seed);
    let mut oracle = problem.oracle();
    let sampler_problem = problem.clone();
    let m_hat = estimate_m(
        oracle.as_mut(),
        move |rng| sampler_problem.sample_feasible(rng),
        config.mhat_calls,
        mhat_seed,
    )
    .max(1e-12);
    ReplicateContext {
        problem,
        m_hat,
        noise_seed,
        report_seed,
    }
}

fn run_cell(
    config: &BenchConfig,
    ctx: &ReplicateContext,
    instance: InstanceName,
    algo: AlgoName,
    n_target: usize,
    replicate: usize,
) -> BenchRow {
    let run_id = derive_seed(
        config.master_seed,
        &[instance.name(), algo.name(), &n_target.to_string()],
        replicate as u64,
    );
    let mut row = BenchRow {
        algorithm: algo.name().to_string(),
        instance: instance.name().to_string(),
        iterations: n_target,
        replicate,
        seed: run_id,
        obj: f64::NAN,
        std: f64::NAN,
        cpu_s: 0.0,
        error: None,
    };
    match execute(config, ctx, algo, n_target) {
        Ok((reported, cpu_s)) => {
            let mut oracle = ctx.problem.oracle();
            let est = empirical_mean(oracle.as_mut(), &reported, config.report_t, ctx.report_seed);
            row.obj = est.mean;
            row.std = est.std;
            row.cpu_s = cpu_s;
        }
        Err(err) => {
            row.error = Some(err.to_string());
        }
    }
    row
}

/// Runs one algorithm at one iteration budget; returns the reported
/// iterate (the averaged one for every method here) and the wall time of
/// the loop.
fn execute(
    config: &BenchConfig,
    ctx: &ReplicateContext,
    algo: AlgoName,
    n_target: usize,
) -> Result<(Vec<f64>, f64), RunError> {
    let h = ctx.problem.composite();
    let z0 = vec![0.0; ctx.problem.dim()];
    let d = ctx.problem.distance_bound();
    let m_hat = ctx.m_hat;
    let prox = ProxSettings::default();
    let seed = ctx.noise_seed;
    match algo {
        AlgoName::Rsa => {
            let gamma = rsa_gamma(
                config.rsa_c,
                config.rsa_diameter_factor * d,
                m_hat,
                n_target,
            )?;
            let run = run_rsa(
                ctx.problem.oracle().as_mut(),
                &h,
                gamma,
                n_target,
                &z0,
                seed,
            )?;
            Ok((run.averaged_iterate, run.wall_time_s))
        }
        AlgoName::Da => {
            let run = run_da(
                ctx.problem.oracle().as_mut(),
                &h,
                config.da_c,
                d,
                m_hat,
                n_target,
                &z0,
                seed,
            )?;
            Ok((run.averaged_iterate, run.wall_time_s))
        }
        AlgoName::S1c | AlgoName::SMax1c => {
            let lambda = config.practical_c * (n_target as f64).sqrt() * d / m_hat;
            let starts = match algo {
                AlgoName::S1c => StartSet::singleton(n_target)?,
                _ => powers_of_two_start_set(n_target)?,
            };
            let run = run_smax1c(
                ctx.problem.oracle().as_mut(),
                &h,
                lambda,
                n_target,
                &starts,
                &z0,
                seed,
                &prox,
            )?;
            Ok((run.result.averaged_iterate, run.result.wall_time_s))
        }
        AlgoName::M1c | AlgoName::MMax1c => {
            let stages = 2;
            let per_stage = n_target / stages;
            let lambda =
                config.practical_c * (per_stage as f64).sqrt() * d / (2.0_f64.sqrt() * m_hat);
            let starts = match algo {
                AlgoName::M1c => StartSet::singleton(per_stage)?,
                _ => powers_of_two_start_set(per_stage)?,
            };
            let run = run_mmax1c(
                ctx.problem.oracle().as_mut(),
                &h,
                lambda,
                per_stage,
                stages,
                &starts,
                &z0,
                seed,
                &prox,
            )?;
            Ok((run.result.averaged_iterate, run.result.wall_time_s))
        }
    }
}

/// Runs the full grid. Individual run failures are recorded in their rows;
/// configuration problems fail the whole call.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| BenchError::Invalid(format!("worker pool: {e}")))?;

    // One shared context per (instance, replicate): instance data and the
    // subgradient bound estimate are reused by every algorithm and budget.
    let replicate_keys: Vec<(InstanceName, usize)> = config
        .instances
        .iter()
        .flat_map(|&inst| (0..config.seeds).map(move |rep| (inst, rep)))
        .collect();
    let contexts: Vec<ReplicateContext> = pool.install(|| {
        use rayon::prelude::*;
        replicate_keys
            .par_iter()
            .map(|&(inst, rep)| replicate_context(config, inst, rep))
            .collect()
    });
    let context_of: BTreeMap<(InstanceName, usize), usize> = replicate_keys
        .iter()
        .enumerate()
        .map(|(idx, &key)| (key, idx))
        .collect();

    let cells: Vec<(InstanceName, AlgoName, usize, usize)> = config
        .instances
        .iter()
        .flat_map(|&inst| {
            config.algorithms.iter().flat_map(move |&algo| {
                config
                    .iteration_targets
                    .iter()
                    .flat_map(move |&n| (0..config.seeds).map(move |rep| (inst, algo, n, rep)))
            })
        })
        .collect();

    let mut rows: Vec<BenchRow> = pool.install(|| {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(inst, algo, n, rep)| {
                let ctx = &contexts[context_of[&(inst, rep)]];
                run_cell(config, ctx, inst, algo, n, rep)
            })
            .collect()
    });
    rows.sort_by(|a, b| {
        (&a.instance, &a.algorithm, a.iterations, a.replicate).cmp(&(
            &b.instance,
            &b.algorithm,
            b.iterations,
            b.replicate,
        ))
    });
    Ok(rows)
}

/// Deterministic per-run results CSV (no timing columns).
pub fn per_run_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("algorithm,instance,N,seed,obj,std\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.algorithm, r.instance, r.iterations, r.seed, r.obj, r.std
        );
    }
    out
}

/// Wall-clock timings, keyed like the per-run rows.
pub fn timings_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("algorithm,instance,N,seed,cpu_s\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.3}",
            r.algorithm, r.instance, r.iterations, r.seed, r.cpu_s
        );
    }
    out
}

#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub instance: String,
    pub algorithm: String,
    pub iterations: usize,
    pub runs: usize,
    pub failures: usize,
    pub mean_obj: f64,
    pub mean_std: f64,
    pub mean_cpu_s: f64,
}

pub fn aggregate(rows: &[BenchRow]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(String, String, usize), Vec<&BenchRow>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.instance.clone(), row.algorithm.clone(), row.iterations))
            .or_default()
            .push(row);
    }
    groups
        .into_iter()
        .map(|((instance, algorithm, iterations), members)| {
            let ok: Vec<&&BenchRow> = members.iter().filter(|r| r.error.is_none()).collect();
            let mean = |f: fn(&BenchRow) -> f64| -> f64 {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                }
            };
            AggregateRow {
                instance,
                algorithm,
                iterations,
                runs: members.len(),
                failures: members.len() - ok.len(),
                mean_obj: mean(|r| r.obj),
                mean_std: mean(|r| r.std),
                mean_cpu_s: mean(|r| r.cpu_s),
            }
        })
        .collect()
}

pub fn aggregated_csv(aggregates: &[AggregateRow]) -> String {
    let mut out = String::from("instance,algorithm,N,runs,failures,mean_obj,mean_std,mean_cpu_s\n");
    for a in aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.6},{:.3}",
            a.instance,
            a.algorithm,
            a.iterations,
            a.runs,
            a.failures,
            a.mean_obj,
            a.mean_std,
            a.mean_cpu_s
        );
    }
    out
}

/// Markdown tables, one per instance, rows `algorithm x N`, with the best
/// (lowest) mean objective per `(instance, N)` column set in bold.
pub fn render_table(rows: &[BenchRow]) -> String {
    let aggregates = aggregate(rows);
    let mut instances: Vec<String> = aggregates.iter().map(|a| a.instance.clone()).collect();
    instances.sort();
    instances.dedup();
    let mut out = String::new();
    for instance in &instances {
        let for_instance: Vec<&AggregateRow> = aggregates
            .iter()
            .filter(|a| &a.instance == instance)
            .collect();
        let mut best: BTreeMap<usize, f64> = BTreeMap::new();
        for a in &for_instance {
            if a.mean_obj.is_nan() {
                continue;
            }
            best.entry(a.iterations)
                .and_modify(|b| *b = b.min(a.mean_obj))
                .or_insert(a.mean_obj);
        }
        let _ = writeln!(out, "### {instance}\n");
        let _ = writeln!(out, "| Algorithm | N | Obj | Std | CPU (s) |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for a in &for_instance {
            let is_best = best
                .get(&a.iterations)
                .map(|b| (a.mean_obj - b).abs() < 1e-12)
                .unwrap_or(false);
            let obj = if a.mean_obj.is_nan() {
                format!("failed ({}/{})", a.failures, a.runs)
            } else if is_best {
                format!("**{:.3}**", a.mean_obj)
            } else {
                format!("{:.3}", a.mean_obj)
            };
            let _ = writeln!(
                out,
                "| {} | {} | {} | {:.3} | {:.1} |",
                a.algorithm, a.iterations, obj, a.mean_std, a.mean_cpu_s
            );
        }
        out.push('\n');
    }
    out
}

/// Writes per_run.csv, timings.csv, aggregated.csv, table.md, and
/// metadata.txt into `out_dir`.
pub fn write_outputs(
    rows: &[BenchRow],
    config: &BenchConfig,
    out_dir: &Path,
) -> Result<(), BenchError> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("per_run.csv"), per_run_csv(rows))?;
    std::fs::write(out_dir.join("timings.csv"), timings_csv(rows))?;
    std::fs::write(
        out_dir.join("aggregated.csv"),
        aggregated_csv(&aggregate(rows)),
    )?;
    std::fs::write(out_dir.join("table.md"), render_table(rows))?;
    let mut metadata = String::from("# effective configuration\n");
    metadata.push_str(&config.describe());
    metadata.push_str(
        "\n# seed derivation\n\
         instance, noise, report, and m-hat streams derive from (master_seed, instance, replicate)\n\
         and are shared by all algorithms within a replicate; the per-run seed column is\n\
         hash(master_seed, instance, algorithm, N, replicate) and identifies the row.\n",
    );
    let failures: Vec<&BenchRow> = rows.iter().filter(|r| r.error.is_some()).collect();
    if !failures.is_empty() {
        metadata.push_str("\n# failures\n");
        for f in failures {
            let _ = writeln!(
                metadata,
                "{} {} N={} replicate={}: {}",
                f.instance,
                f.algorithm,
                f.iterations,
                f.replicate,
                f.error.as_deref().unwrap_or("")
            );
        }
    }
    std::fs::write(out_dir.join("metadata.txt"), metadata)?;
    Ok(())
}

/// Reads a per_run.csv (and, when present, the matching timings.csv)
/// back into rows, for re-rendering tables from a results directory.
pub fn read_results(dir: &Path) -> Result<Vec<BenchRow>, BenchError> {
    let text = std::fs::read_to_string(dir.join("per_run.csv"))?;
    let timings = std::fs::read_to_string(dir.join("timings.csv")).ok();
    let mut cpu: BTreeMap<(String, String, usize, u64), f64> = BTreeMap::new();
    if let Some(t) = timings {
        for line in t.lines().skip(1) {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 5 {
                return Err(BenchError::Results(format!("bad timings line '{line}'")));
            }
            cpu.insert(
                (
                    parts[0].to_string(),
                    parts[1].to_string(),
                    parts[2]
                        .parse()
                        .map_err(|e| BenchError::Results(format!("N: {e}")))?,
                    parts[3]
                        .parse()
                        .map_err(|e| BenchError::Results(format!("seed: {e}")))?,
                ),
                parts[4]
                    .parse()
                    .map_err(|e| BenchError::Results(format!("cpu_s: {e}")))?,
            );
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in text.lines().skip(1).enumerate() {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            return Err(BenchError::Results(format!("bad per-run line '{line}'")));
        }
        let iterations: usize = parts[2]
            .parse()
            .map_err(|e| BenchError::Results(format!("N: {e}")))?;
        let seed: u64 = parts[3]
            .parse()
            .map_err(|e| BenchError::Results(format!("seed: {e}")))?;
        let obj: f64 = parts[4]
            .parse()
            .map_err(|e| BenchError::Results(format!("obj: {e}")))?;
        let std: f64 = parts[5]
            .parse()
            .map_err(|e| BenchError::Results(format!("std: {e}")))?;
        let key = (parts[0].to_string(), parts[1].to_string(), iterations, seed);
        rows.push(BenchRow {
            algorithm: parts[0].to_string(),
            instance: parts[1].to_string(),
            iterations,
            replicate: idx,
            seed,
            obj,
            std,
            cpu_s: cpu.get(&key).copied().unwrap_or(f64::NAN),
            error: if obj.is_nan() {
                Some("failed run (see metadata.txt)".into())
            } else {
                None
            },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> BenchConfig {
        BenchConfig {
            instances: vec![InstanceName::Newsvendor],
            algorithms: vec![AlgoName::Rsa, AlgoName::SMax1c],
            iteration_targets: vec![20],
            seeds: 2,
            report_t: 500,
            master_seed: 7,
            workers: 1,
            mhat_calls: 500,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn parse_round_trips_defaults() {
        let text = "\
# comment
instances = C1, NEWSVENDOR
algorithms = RSA, S-Max1C
iterations = 200, 1000
seeds = 3
report_samples = 100
master_seed = 9
workers = 2
";
        let config = BenchConfig::parse(text).unwrap();
        assert_eq!(config.instances.len(), 2);
        assert_eq!(config.algorithms, vec![AlgoName::Rsa, AlgoName::SMax1c]);
        assert_eq!(config.iteration_targets, vec![200, 1000]);
        assert_eq!(config.seeds, 3);
        assert_eq!(config.master_seed, 9);
    }

    #[test]
    fn parse_rejects_unknowns() {
        assert!(matches!(
            BenchConfig::parse("instances = C9"),
            Err(BenchError::UnknownInstance(_))
        ));
        assert!(matches!(
            BenchConfig::parse("algorithms = SGD"),
            Err(BenchError::UnknownAlgorithm(_))
        ));
        assert!(matches!(
            BenchConfig::parse("typo = 3"),
            Err(BenchError::Config { .. })
        ));
    }

    #[test]
    #[allow(clippy::identity_op)]
    fn grid_size_matches_arithmetic() {
        let config = tiny_config();
        let rows = run_bench(&config).unwrap();
        // |instances| * |algorithms| * |targets| * seeds
        assert_eq!(rows.len(), 1 * 2 * 1 * 2);
        assert!(rows.iter().all(|r| r.error.is_none()));
        assert!(rows.iter().all(|r| r.obj.is_finite()));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let config = tiny_config();
        let a = per_run_csv(&run_bench(&config).unwrap());
        let b = per_run_csv(&run_bench(&config).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let sequential = tiny_config();
        let mut parallel = tiny_config();
        parallel.workers = 4;
        assert_eq!(
            per_run_csv(&run_bench(&sequential).unwrap()),
            per_run_csv(&run_bench(&parallel).unwrap())
        );
    }

    #[test]
    fn editing_algorithm_list_preserves_other_draws() {
        let full = tiny_config();
        let mut only_rsa = tiny_config();
        only_rsa.algorithms = vec![AlgoName::Rsa];
        let full_rows = run_bench(&full).unwrap();
        let rsa_rows = run_bench(&only_rsa).unwrap();
        let pick = |rows: &[BenchRow]| -> Vec<(u64, f64)> {
            rows.iter()
                .filter(|r| r.algorithm == "RSA")
                .map(|r| (r.seed, r.obj))
                .collect()
        };
        assert_eq!(pick(&full_rows), pick(&rsa_rows));
    }

    #[test]
    fn table_bolds_the_minimum() {
        let rows = vec![
            BenchRow {
                algorithm: "RSA".into(),
                instance: "C1".into(),
                iterations: 200,
                replicate: 0,
                seed: 1,
                obj: -7.0,
                std: 0.5,
                cpu_s: 1.0,
                error: None,
            },
            BenchRow {
                algorithm: "S-Max1C".into(),
                instance: "C1".into(),
                iterations: 200,
                replicate: 0,
                seed: 2,
                obj: -7.5,
                std: 0.5,
                cpu_s: 1.0,
                error: None,
            },
        ];
        let table = render_table(&rows);
        assert!(table.contains("**-7.500**"));
        assert!(table.contains("| RSA | 200 | -7.000 |"));
        let aggregates = aggregate(&rows);
        assert_eq!(aggregates.len(), 2);
    }

    #[test]
    fn results_read_back() {
        let config = tiny_config();
        let rows = run_bench(&config).unwrap();
        let dir = std::env::temp_dir().join(format!("max1c-bench-test-{}", std::process::id()));
        write_outputs(&rows, &config, &dir).unwrap();
        let back = read_results(&dir).unwrap();
        assert_eq!(back.len(), rows.len());
        assert_eq!(per_run_csv(&back), per_run_csv(&rows));
        std::fs::remove_dir_all(&dir).ok();
    }
}
