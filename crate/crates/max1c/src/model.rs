//! Cutting-plane models: stochastic linearizations, geometrically weighted
//! one-cut aggregates, and the max-one-cut bundle.
//!
//! A linearization produced at point `z` with oracle pair `(F, s)` is the
//! affine function `u -> F + <s, u - z>`, stored as `(intercept, gradient)`
//! with `intercept = F - <s, z>`. A one-cut aggregate started at iteration
//! `k` and carried to iteration `j` is the convex combination of the
//! linearizations from `k..=j` with weights `beta^(j-k)` on the first and
//! `(1-beta) * beta^(j-i)` on the rest. The max-one-cut model is `h` plus
//! the pointwise maximum of one aggregate per start index, and is built
//! incrementally: every update blends the new linearization into all
//! aggregates, and iterations in the start set additionally spawn a fresh
//! aggregate. Memory is O(|starts| * n) no matter how long the run is.

use thiserror::Error;

use crate::composite::CompositeTerm;
use crate::linalg::dot;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("horizon must be at least {min}, got {got}")]
    HorizonTooSmall { min: usize, got: usize },
    #[error("start index k={k} must satisfy 1 <= k <= j={j}")]
    BadIndexPair { k: usize, j: usize },
    #[error("beta must lie in (0, 1), got {0}")]
    BadBeta(f64),
    #[error("start set must contain 1")]
    MissingFirstStart,
    #[error("start indices must be strictly increasing positive integers")]
    UnsortedStarts,
    #[error("start index {index} exceeds floor(horizon/2) = {limit}")]
    StartBeyondHalf { index: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model is at iteration {expected_prev}, cannot apply update for j={got}")]
    OutOfOrderUpdate { expected_prev: usize, got: usize },
    #[error("cut list is empty")]
    EmptyCuts,
}

/// One stochastic composite linearization, restricted to its affine part.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    intercept: f64,
    gradient: Vec<f64>,
}

impl Cut {
    pub fn new(intercept: f64, gradient: Vec<f64>) -> Self {
        Cut {
            intercept,
            gradient,
        }
    }

    /// Builds the cut from an oracle evaluation at `point`: the affine
    /// function takes the oracle value at the generating point.
    pub fn from_oracle(point: &[f64], value: f64, subgradient: Vec<f64>) -> Self {
        debug_assert_eq!(point.len(), subgradient.len());
        let intercept = value - dot(&subgradient, point);
        Cut {
            intercept,
            gradient: subgradient,
        }
    }

    pub fn affine_value(&self, u: &[f64]) -> f64 {
        self.intercept + dot(&self.gradient, u)
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }
}

/// A one-cut aggregate: the running convex combination of cuts since its
/// start index, stored as combined affine coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCut {
    intercept: f64,
    gradient: Vec<f64>,
    start_index: usize,
}

impl AggregateCut {
    fn from_cut(cut: &Cut, start_index: usize) -> Self {
        AggregateCut {
            intercept: cut.intercept,
            gradient: cut.gradient.clone(),
            start_index,
        }
    }

    /// a <- (1 - beta) * cut + beta * a
    fn blend(&mut self, cut: &Cut, beta: f64) {
        self.intercept = (1.0 - beta) * cut.intercept + beta * self.intercept;
        for (gi, ci) in self.gradient.iter_mut().zip(&cut.gradient) {
            *gi = (1.0 - beta) * ci + beta * *gi;
        }
    }

    pub fn affine_value(&self, u: &[f64]) -> f64 {
        self.intercept + dot(&self.gradient, u)
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }
}

/// The blending weight for a horizon of `I` iterations:
/// `beta = (I+1 - ln(I+1)) / (I+1 + ln(I+1))`.
///
/// For every `I >= 1` the result lies in `[1/3, 1)` and satisfies
/// `beta^(I+1) <= 1/(I+1)`.
pub fn beta_for_horizon(horizon: usize) -> Result<f64, ModelError> {
    if horizon < 1 {
        return Err(ModelError::HorizonTooSmall {
            min: 1,
            got: horizon,
        });
    }
    let c = (horizon + 1) as f64;
    Ok((c - c.ln()) / (c + c.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSchedule {
    pub horizon: usize,
    pub beta: f64,
}

impl BetaSchedule {
    pub fn new(horizon: usize) -> Result<Self, ModelError> {
        Ok(BetaSchedule {
            horizon,
            beta: beta_for_horizon(horizon)?,
        })
    }
}

/// The set of iteration indices at which a fresh one-cut aggregate is
/// spawned. Always contains 1; for sets with more than one index, every
/// index must lie in the first half of the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct StartSet {
    indices: Vec<usize>,
    horizon: usize,
}

impl StartSet {
    pub fn new(indices: Vec<usize>, horizon: usize) -> Result<Self, ModelError> {
        if horizon < 2 {
            return Err(ModelError::HorizonTooSmall {
                min: 2,
                got: horizon,
            });
        }
        if indices.first() != Some(&1) {
            return Err(ModelError::MissingFirstStart);
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::UnsortedStarts);
        }
        let limit = horizon / 2;
        if indices.len() > 1 {
            let max = *indices.last().expect("nonempty");
            if max > limit {
                return Err(ModelError::StartBeyondHalf { index: max, limit });
            }
        }
        Ok(StartSet { indices, horizon })
    }

    /// B = {1}: the model degenerates to the classical one-cut recursion.
    pub fn singleton(horizon: usize) -> Result<Self, ModelError> {
        StartSet::new(vec![1], horizon)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    /// |B_j| = number of start indices <= j.
    pub fn count_through(&self, j: usize) -> usize {
        self.indices.iter().take_while(|&&k| k <= j).count()
    }
}

/// All powers of two not exceeding `horizon / 2` (always contains 1).
pub fn powers_of_two_start_set(horizon: usize) -> Result<StartSet, ModelError> {
    if horizon < 2 {
        return Err(ModelError::HorizonTooSmall {
            min: 2,
            got: horizon,
        });
    }
    let mut indices = Vec::new();
    let mut p: usize = 1;
    while 2 * p <= horizon {
        indices.push(p);
        p = match p.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
    }
    StartSet::new(indices, horizon)
}

/// Convex-combination weights over cut indices `k..=j`:
/// `beta^(j-k)` for the first index and `(1-beta) * beta^(j-i)` for the
/// rest. The weights are nonnegative and sum to 1 exactly (telescoping
/// geometric sum).
pub fn aggregate_weights(k: usize, j: usize, beta: f64) -> Result<Vec<f64>, ModelError> {
    if k < 1 || k > j {
        return Err(ModelError::BadIndexPair { k, j });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(ModelError::BadBeta(beta));
    }
    let mut weights = Vec::with_capacity(j - k + 1);
    weights.push(beta.powi((j - k) as i32));
    for i in (k + 1)..=j {
        weights.push((1.0 - beta) * beta.powi((j - i) as i32));
    }
    Ok(weights)
}

/// The max-one-cut bundle: `h` plus the pointwise maximum of the active
/// one-cut aggregates, updated recursively.
#[derive(Debug, Clone)]
pub struct MaxOneCutModel {
    aggregates: Vec<AggregateCut>,
    beta: f64,
    iteration: usize,
    composite: CompositeTerm,
}

impl MaxOneCutModel {
    /// An empty model at iteration 0; the first update must use j = 1.
    pub fn new(composite: CompositeTerm, beta: f64) -> Result<Self, ModelError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ModelError::BadBeta(beta));
        }
        Ok(MaxOneCutModel {
            aggregates: Vec::new(),
            beta,
            iteration: 0,
            composite,
        })
    }

    pub fn aggregates(&self) -> &[AggregateCut] {
        &self.aggregates
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn composite(&self) -> &CompositeTerm {
        &self.composite
    }

    pub fn dim(&self) -> Option<usize> {
        self.aggregates.first().map(|a| a.gradient.len())
    }

    /// Applies the iteration-`j` recursive update with the new cut formed
    /// at `z_{j-1}`:
    ///
    /// - `j = 1`: the model becomes the single new cut;
    /// - `j` in the start set (and `j > 1`): every aggregate is blended as
    ///   `(1-beta) * cut + beta * aggregate`, and one fresh aggregate equal
    ///   to the cut itself is spawned;
    /// - otherwise: only the blending step.
    ///
    /// The result equals the direct max of one-cut aggregates over all
    /// start indices `<= j`.
    pub fn update(&mut self, cut: Cut, j: usize, starts: &StartSet) -> Result<(), ModelError> {
        if j != self.iteration + 1 {
            return Err(ModelError::OutOfOrderUpdate {
                expected_prev: self.iteration,
                got: j,
            });
        }
        if let Some(n) = self.dim() {
            if cut.dim() != n {
                return Err(ModelError::DimensionMismatch {
                    expected: n,
                    got: cut.dim(),
                });
            }
        }
        if j == 1 {
            self.aggregates.clear();
            self.aggregates.push(AggregateCut::from_cut(&cut, 1));
        } else {
            for agg in &mut self.aggregates {
                agg.blend(&cut, self.beta);
            }
            if starts.contains(j) {
                self.aggregates.push(AggregateCut::from_cut(&cut, j));
            }
        }
        self.iteration = j;
        Ok(())
    }

    /// Model value `h(u) + max_k aff_k(u)`; `+inf` when `u` is outside the
    /// domain of `h`.
    pub fn evaluate(&self, u: &[f64]) -> Result<f64, ModelError> {
        let n = self.dim().ok_or(ModelError::EmptyCuts)?;
        if u.len() != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
        let hv = self.composite.value(u);
        if hv == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        Ok(hv + self.max_affine(u).1)
    }

    /// (argmax index, max affine value) at `u`; ties resolve to the first
    /// index and affect only this diagnostic, not model values.
    pub fn max_affine(&self, u: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (idx, agg) in self.aggregates.iter().enumerate() {
            let v = agg.affine_value(u);
            if v > best.1 {
                best = (idx, v);
            }
        }
        best
    }
}

/// The naive multi-cut model: `h` plus the pointwise maximum of all raw
/// cuts. Its expected overestimation of the objective grows with the cut
/// count, and so does its storage; it exists for verification workloads
/// that demonstrate exactly that, and is deliberately kept out of the
/// recursive update path.
#[derive(Debug, Clone)]
pub struct MultiCutModel {
    cuts: Vec<Cut>,
    composite: CompositeTerm,
}

pub fn build_multicut_model(
    cuts: Vec<Cut>,
    composite: CompositeTerm,
) -> Result<MultiCutModel, ModelError> {
    if cuts.is_empty() {
        return Err(ModelError::EmptyCuts);
    }
    let n = cuts[0].dim();
    if let Some(bad) = cuts.iter().find(|c| c.dim() != n) {
        return Err(ModelError::DimensionMismatch {
            expected: n,
            got: bad.dim(),
        });
    }
    Ok(MultiCutModel { cuts, composite })
}

impl MultiCutModel {
    pub fn empty(composite: CompositeTerm) -> Self {
        MultiCutModel {
            cuts: Vec::new(),
            composite,
        }
    }

    pub fn push(&mut self, cut: Cut) -> Result<(), ModelError> {
        if let Some(first) = self.cuts.first() {
            if cut.dim() != first.dim() {
                return Err(ModelError::DimensionMismatch {
                    expected: first.dim(),
                    got: cut.dim(),
                });
            }
        }
        self.cuts.push(cut);
        Ok(())
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn composite(&self) -> &CompositeTerm {
        &self.composite
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<f64, ModelError> {
        let first = self.cuts.first().ok_or(ModelError::EmptyCuts)?;
        if u.len() != first.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: first.dim(),
                got: u.len(),
            });
        }
        let hv = self.composite.value(u);
        if hv == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        let max = self
            .cuts
            .iter()
            .map(|c| c.affine_value(u))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(hv + max)
    }
}

/// Read-only view of a model as `h` plus a list of affine pieces, the shape
/// the prox solver works on.
pub trait CutModel {
    fn num_pieces(&self) -> usize;
    fn piece(&self, k: usize) -> (f64, &[f64]);
    fn composite(&self) -> &CompositeTerm;
    fn dim(&self) -> usize;
}

impl CutModel for MaxOneCutModel {
    fn num_pieces(&self) -> usize {
        self.aggregates.len()
    }

    fn piece(&self, k: usize) -> (f64, &[f64]) {
        let a = &self.aggregates[k];
        (a.intercept, &a.gradient)
    }

    fn composite(&self) -> &CompositeTerm {
        &self.composite
    }

    fn dim(&self) -> usize {
        self.dim().unwrap_or(0)
    }
}

impl CutModel for MultiCutModel {
    fn num_pieces(&self) -> usize {
        self.cuts.len()
    }

    fn piece(&self, k: usize) -> (f64, &[f64]) {
        let c = &self.cuts[k];
        (c.intercept, &c.gradient)
    }

    fn composite(&self) -> &CompositeTerm {
        &self.composite
    }

    fn dim(&self) -> usize {
        self.cuts.first().map(|c| c.dim()).unwrap_or(0)
    }
}
