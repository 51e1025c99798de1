//! Stochastic oracle zoo.
//!
//! Two problem families back the experiments and the statistical checks:
//!
//! - a two-stage stochastic QP whose first stage lives in a Euclidean ball
//!   and whose second stage (recourse) is a ridge-regularized QP over a
//!   joint-norm ball. The objective couples the stages only through the
//!   scalar `<xi_2, x_2>`, so the recourse has a closed-form solution along
//!   the direction of `xi_2` and the oracle costs O(n) per call instead of
//!   an external QP solve;
//! - a newsvendor (pinball-loss) problem with Gaussian demand, whose
//!   optimal point and value are known analytically, used wherever a ground
//!   truth is required.

use rand::distr::Uniform;
use rand::Rng;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use thiserror::Error;

use crate::algo::{Oracle, OracleSample};
use crate::composite::CompositeTerm;
use crate::linalg::{dot, norm2};
use crate::seedstream::rng_from;

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("first-stage radius must satisfy 0 < D < R, got D={d}, R={r}")]
    BadRadii { d: f64, r: f64 },
    #[error("noise scale must be positive, got {0}")]
    BadNoiseScale(f64),
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("first-stage point with norm {norm} leaves no recourse feasibility (R = {r})")]
    InfeasibleFirstStage { norm: f64, r: f64 },
    #[error("quantile level must lie in (0, 1), got {0}")]
    BadQuantile(f64),
    #[error("demand standard deviation must be positive, got {0}")]
    BadSigma(f64),
    #[error("feasible box must contain the optimal quantile")]
    QuantileOutsideBox,
    #[error("unknown instance preset '{0}'")]
    UnknownPreset(String),
    #[error("malformed instance text: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Two-stage stochastic QP
// ---------------------------------------------------------------------------

/// Named parameter presets for the two-stage QP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum QpPreset {
    C1,
    C2,
    C3,
    C4,
}

impl QpPreset {
    pub fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_uppercase().as_str() {
            "C1" => Some(QpPreset::C1),
            "C2" => Some(QpPreset::C2),
            "C3" => Some(QpPreset::C3),
            "C4" => Some(QpPreset::C4),
            _ => None,
        }
    }

    /// (n, D, R, chi)
    pub fn parameters(self) -> (usize, f64, f64, f64) {
        match self {
            QpPreset::C1 => (100, 2.0, 4.0, 5.0),
            QpPreset::C2 => (200, 2.0, 4.0, 5.0),
            QpPreset::C3 => (100, 50.0, 100.0, 2.0),
            QpPreset::C4 => (200, 50.0, 100.0, 2.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QpPreset::C1 => "C1",
            QpPreset::C2 => "C2",
            QpPreset::C3 => "C3",
            QpPreset::C4 => "C4",
        }
    }
}

/// A generated two-stage QP instance. The random data vector has length
/// `2n`, split as `(xi_1, xi_2)`; each coordinate is Gaussian with the
/// stored mean and standard deviation (a zero deviation is allowed and
/// makes the coordinate constant).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageQpInstance {
    n: usize,
    d: f64,
    r: f64,
    chi: f64,
    gamma0: f64,
    c: Vec<f64>,
    xi_mean: Vec<f64>,
    xi_std: Vec<f64>,
}

/// Recourse solution: optimal value, second-stage point (a multiple of
/// `xi_2`), and the multiplier of the joint norm constraint.
#[derive(Debug, Clone)]
pub struct RecourseSolution {
    pub value: f64,
    pub x2: Vec<f64>,
    pub multiplier: f64,
}

impl TwoStageQpInstance {
    /// Deterministically generates an instance from a seed: cost entries
    /// uniform in [-1, 1], noise means uniform in [-chi, chi], noise
    /// deviations uniform in [0, chi].
    pub fn generate(seed: u64, n: usize, d: f64, r: f64, chi: f64) -> Result<Self, ProblemError> {
        if n < 1 {
            return Err(ProblemError::BadDimension);
        }
        if !(d > 0.0 && d < r) {
            return Err(ProblemError::BadRadii { d, r });
        }
        if !(chi > 0.0) {
            return Err(ProblemError::BadNoiseScale(chi));
        }
        let mut rng = rng_from(seed);
        let sym = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
        let c: Vec<f64> = (0..n).map(|_| rng.sample(sym)).collect();
        let mean_range = Uniform::new_inclusive(-chi, chi).expect("valid range");
        let xi_mean: Vec<f64> = (0..2 * n).map(|_| rng.sample(mean_range)).collect();
        let std_range = Uniform::new_inclusive(0.0, chi).expect("valid range");
        let xi_std: Vec<f64> = (0..2 * n).map(|_| rng.sample(std_range)).collect();
        Ok(TwoStageQpInstance {
            n,
            d,
            r,
            chi,
            gamma0: 2.0,
            c,
            xi_mean,
            xi_std,
        })
    }

    pub fn from_preset(preset: QpPreset, seed: u64) -> Self {
        let (n, d, r, chi) = preset.parameters();
        TwoStageQpInstance::generate(seed, n, d, r, chi).expect("presets are valid")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ball_radius(&self) -> f64 {
        self.d
    }

    pub fn recourse_radius(&self) -> f64 {
        self.r
    }

    pub fn noise_scale(&self) -> f64 {
        self.chi
    }

    pub fn cost(&self) -> &[f64] {
        &self.c
    }

    /// Indicator of the first-stage feasible set, the D-ball at the origin.
    pub fn composite(&self) -> CompositeTerm {
        CompositeTerm::ball(vec![0.0; self.n], self.d).expect("D > 0")
    }

    /// One sample of the 2n-dimensional Gaussian data vector.
    pub fn draw_xi(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.xi_mean
            .iter()
            .zip(&self.xi_std)
            .map(|(m, s)| {
                let z: f64 = StandardNormal.sample(rng);
                m + s * z
            })
            .collect()
    }

    /// Uniform sample from the first-stage ball (radial transform).
    pub fn sample_feasible(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut dir: Vec<f64> = (0..self.n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                z
            })
            .collect();
        let norm = norm2(&dir).max(1e-300);
        let u: f64 = rng.random();
        let radius = self.d * u.powf(1.0 / self.n as f64);
        for x in &mut dir {
            *x *= radius / norm;
        }
        dir
    }

    /// Solves the recourse problem in closed form.
    ///
    /// The objective depends on `x_2` only through `t = <xi_2, x_2>` and
    /// `||x_2||^2`, so the minimizer is colinear with `xi_2`:
    /// `x_2 = alpha xi_2`. Substituting reduces the problem to a scalar
    /// convex quadratic in `alpha` clamped to `alpha^2 q <= R^2 - ||x_1||^2`
    /// with `q = ||xi_2||^2`; the multiplier follows from scalar
    /// stationarity at the clamp.
    pub fn second_stage_solve(
        &self,
        x1: &[f64],
        xi: &[f64],
    ) -> Result<RecourseSolution, ProblemError> {
        assert_eq!(x1.len(), self.n, "first-stage dimension");
        assert_eq!(xi.len(), 2 * self.n, "data dimension");
        let (xi1, xi2) = xi.split_at(self.n);
        let x1_norm2 = dot(x1, x1);
        let rho2 = self.r * self.r - x1_norm2;
        if rho2 <= 0.0 {
            return Err(ProblemError::InfeasibleFirstStage {
                norm: x1_norm2.sqrt(),
                r: self.r,
            });
        }
        let a = dot(xi1, x1);
        let q = dot(xi2, xi2);
        if q == 0.0 {
            // Pure ridge in x_2: the origin is the unique minimizer.
            let value = 0.5 * a * a + 0.5 * self.gamma0 * x1_norm2 + a;
            return Ok(RecourseSolution {
                value,
                x2: vec![0.0; self.n],
                multiplier: 0.0,
            });
        }
        let unconstrained = -(a + 1.0) / (q + self.gamma0);
        let bound = (rho2 / q).sqrt();
        let alpha = unconstrained.clamp(-bound, bound);
        let multiplier = if alpha == unconstrained {
            0.0
        } else {
            // g'(alpha) + 2 mu q alpha = 0 at the clamp
            let slope = q * (alpha * (q + self.gamma0) + a + 1.0);
            (-slope / (2.0 * q * alpha)).max(0.0)
        };
        let t = alpha * q;
        let value =
            0.5 * (a + t) * (a + t) + 0.5 * self.gamma0 * (x1_norm2 + alpha * alpha * q) + a + t;
        let x2 = xi2.iter().map(|v| alpha * v).collect();
        Ok(RecourseSolution {
            value,
            x2,
            multiplier,
        })
    }

    /// First-stage oracle: value `<c, x_1> + Q(x_1, xi)` and the
    /// subgradient obtained by differentiating the recourse Lagrangian in
    /// `x_1` at the optimal second stage and multiplier.
    pub fn oracle_sample(&self, x1: &[f64], xi: &[f64]) -> Result<(f64, Vec<f64>), ProblemError> {
        let recourse = self.second_stage_solve(x1, xi)?;
        let (xi1, xi2) = xi.split_at(self.n);
        let value = dot(&self.c, x1) + recourse.value;
        let coupling = dot(xi1, x1) + dot(xi2, &recourse.x2);
        let mu = recourse.multiplier;
        let subgradient = (0..self.n)
            .map(|i| {
                self.c[i] + coupling * xi1[i] + self.gamma0 * x1[i] + xi1[i] + 2.0 * mu * x1[i]
            })
            .collect();
        Ok((value, subgradient))
    }

    /// Plain-text serialization for reproducibility audits.
    pub fn to_text(&self) -> String {
        fn join(v: &[f64]) -> String {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        }
        format!(
            "format: two-stage-qp v1\nn: {}\nball_radius: {}\nrecourse_radius: {}\nnoise_scale: {}\nridge: {}\ncost: {}\nxi_mean: {}\nxi_std: {}\n",
            self.n,
            self.d,
            self.r,
            self.chi,
            self.gamma0,
            join(&self.c),
            join(&self.xi_mean),
            join(&self.xi_std),
        )
    }

    pub fn from_text(text: &str) -> Result<Self, ProblemError> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| ProblemError::Parse(format!("missing ':' in line '{line}'")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| -> Result<String, ProblemError> {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| ProblemError::Parse(format!("missing field '{key}'")))
        };
        if get("format")? != "two-stage-qp v1" {
            return Err(ProblemError::Parse("unsupported format".into()));
        }
        let scalar = |key: &str| -> Result<f64, ProblemError> {
            get(key)?
                .parse()
                .map_err(|e| ProblemError::Parse(format!("field '{key}': {e}")))
        };
        let vector = |key: &str| -> Result<Vec<f64>, ProblemError> {
            get(key)?
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse()
                        .map_err(|e| ProblemError::Parse(format!("field '{key}': {e}")))
                })
                .collect()
        };
        let n: usize = get("n")?
            .parse()
            .map_err(|e| ProblemError::Parse(format!("field 'n': {e}")))?;
        let instance = TwoStageQpInstance {
            n,
            d: scalar("ball_radius")?,
            r: scalar("recourse_radius")?,
            chi: scalar("noise_scale")?,
            gamma0: scalar("ridge")?,
            c: vector("cost")?,
            xi_mean: vector("xi_mean")?,
            xi_std: vector("xi_std")?,
        };
        if instance.c.len() != n
            || instance.xi_mean.len() != 2 * n
            || instance.xi_std.len() != 2 * n
        {
            return Err(ProblemError::Parse("vector length mismatch".into()));
        }
        Ok(instance)
    }
}

/// [`Oracle`] adapter for a two-stage QP instance: each call draws a fresh
/// data vector and evaluates the closed-form recourse.
pub struct TwoStageOracle {
    instance: TwoStageQpInstance,
    draws: u64,
}

impl TwoStageOracle {
    pub fn new(instance: TwoStageQpInstance) -> Self {
        TwoStageOracle { instance, draws: 0 }
    }

    pub fn instance(&self) -> &TwoStageQpInstance {
        &self.instance
    }
}

impl Oracle for TwoStageOracle {
    fn dim(&self) -> usize {
        self.instance.n
    }

    fn call(&mut self, x: &[f64], rng: &mut dyn RngCore) -> OracleSample {
        self.draws += 1;
        let xi = self.instance.draw_xi(rng);
        let (value, subgradient) = self
            .instance
            .oracle_sample(x, &xi)
            .expect("query points stay inside the recourse-feasible region");
        OracleSample {
            value,
            subgradient,
            sample_id: self.draws,
        }
    }
}

// ---------------------------------------------------------------------------
// Newsvendor (pinball loss)
// ---------------------------------------------------------------------------

/// Scalar quantile-regression problem with Gaussian demand
/// `xi ~ N(mu, sigma^2)` and loss
/// `F(x, xi) = max{ tau (xi - x), (1 - tau)(x - xi) }`, minimized over a
/// box. The minimizer is the tau-quantile `mu + sigma * Phi^{-1}(tau)` and
/// the optimal value is `sigma * pdf(Phi^{-1}(tau))`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewsvendorProblem {
    tau: f64,
    mu: f64,
    sigma: f64,
    lower: f64,
    upper: f64,
}

impl NewsvendorProblem {
    pub fn new(
        tau: f64,
        mu: f64,
        sigma: f64,
        lower: f64,
        upper: f64,
    ) -> Result<Self, ProblemError> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(ProblemError::BadQuantile(tau));
        }
        if !(sigma > 0.0) {
            return Err(ProblemError::BadSigma(sigma));
        }
        let problem = NewsvendorProblem {
            tau,
            mu,
            sigma,
            lower,
            upper,
        };
        let xs = problem.x_star();
        if !(lower <= xs && xs <= upper) {
            return Err(ProblemError::QuantileOutsideBox);
        }
        Ok(problem)
    }

    /// The configuration used by the benchmark preset: tau = 0.9, standard
    /// normal demand, box [-5, 5].
    pub fn standard() -> Self {
        NewsvendorProblem::new(0.9, 0.0, 1.0, -5.0, 5.0).expect("valid parameters")
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn composite(&self) -> CompositeTerm {
        CompositeTerm::boxed(vec![self.lower], vec![self.upper]).expect("lower <= upper")
    }

    pub fn loss(&self, x: f64, xi: f64) -> f64 {
        (self.tau * (xi - x)).max((1.0 - self.tau) * (x - xi))
    }

    pub fn subgradient(&self, x: f64, xi: f64) -> f64 {
        if xi > x {
            -self.tau
        } else {
            1.0 - self.tau
        }
    }

    /// phi(x) = E[F(x, xi)] in closed form:
    /// `sigma * (pdf(z) + z * (cdf(z) - tau))` with `z = (x - mu)/sigma`.
    pub fn phi(&self, x: f64) -> f64 {
        let std = Normal::new(0.0, 1.0).expect("unit normal");
        let z = (x - self.mu) / self.sigma;
        self.sigma * (std.pdf(z) + z * (std.cdf(z) - self.tau))
    }

    pub fn x_star(&self) -> f64 {
        let std = Normal::new(0.0, 1.0).expect("unit normal");
        self.mu + self.sigma * std.inverse_cdf(self.tau)
    }

    pub fn phi_star(&self) -> f64 {
        let std = Normal::new(0.0, 1.0).expect("unit normal");
        self.sigma * std.pdf(std.inverse_cdf(self.tau))
    }

    pub fn draw_xi(&self, rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mu + self.sigma * z
    }

    pub fn sample_feasible(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let u: f64 = rng.random();
        vec![self.lower + u * (self.upper - self.lower)]
    }
}

pub struct NewsvendorOracle {
    problem: NewsvendorProblem,
    draws: u64,
}

impl NewsvendorOracle {
    pub fn new(problem: NewsvendorProblem) -> Self {
        NewsvendorOracle { problem, draws: 0 }
    }

    pub fn problem(&self) -> &NewsvendorProblem {
        &self.problem
    }
}

impl Oracle for NewsvendorOracle {
    fn dim(&self) -> usize {
        1
    }

    fn call(&mut self, x: &[f64], rng: &mut dyn RngCore) -> OracleSample {
        self.draws += 1;
        let xi = self.problem.draw_xi(rng);
        OracleSample {
            value: self.problem.loss(x[0], xi),
            subgradient: vec![self.problem.subgradient(x[0], xi)],
            sample_id: self.draws,
        }
    }
}
