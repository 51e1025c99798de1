//! The composite term `h` of the objective `f + h`.
//!
//! `h` is a closed convex function handled only through its value and its
//! prox/projection operator, never linearized. The supported variants are
//! the zero function and indicator functions of a Euclidean ball or a box;
//! for indicators the prox is the Euclidean projection regardless of the
//! prox stepsize.

use thiserror::Error;

use crate::linalg::dist2;

#[derive(Debug, Error, PartialEq)]
pub enum CompositeError {
    #[error("ball radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("box bounds must satisfy lower <= upper componentwise")]
    BadBounds,
    #[error("bound vectors have mismatched lengths {lower} vs {upper}")]
    BoundLength { lower: usize, upper: usize },
}

/// Relative slack when testing indicator membership, tolerating projection
/// round-off on points that are mathematically on the boundary.
const MEMBERSHIP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum CompositeTerm {
    /// h = 0 on all of R^n.
    Zero,
    /// Indicator of the closed ball { u : ||u - center|| <= radius }.
    BallIndicator { center: Vec<f64>, radius: f64 },
    /// Indicator of the box { u : lower <= u <= upper } (componentwise).
    BoxIndicator { lower: Vec<f64>, upper: Vec<f64> },
}

impl CompositeTerm {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, CompositeError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CompositeError::BadRadius(radius));
        }
        Ok(CompositeTerm::BallIndicator { center, radius })
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, CompositeError> {
        if lower.len() != upper.len() {
            return Err(CompositeError::BoundLength {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(CompositeError::BadBounds);
        }
        Ok(CompositeTerm::BoxIndicator { lower, upper })
    }

    /// h(u): 0 inside the domain, +inf outside. Indicator membership allows
    /// a small relative slack so that projected points evaluate to 0.
    pub fn value(&self, u: &[f64]) -> f64 {
        match self {
            CompositeTerm::Zero => 0.0,
            CompositeTerm::BallIndicator { center, radius } => {
                let d = dist2(u, center);
                if d <= radius * (1.0 + MEMBERSHIP_SLACK) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            CompositeTerm::BoxIndicator { lower, upper } => {
                let ok = u.iter().zip(lower).zip(upper).all(|((x, l), h)| {
                    let slack = MEMBERSHIP_SLACK * (1.0 + l.abs().max(h.abs()));
                    *x >= l - slack && *x <= h + slack
                });
                if ok {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        self.value(u) == 0.0
    }

    /// Euclidean projection onto the domain (identity for `Zero`).
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        match self {
            CompositeTerm::Zero => v.to_vec(),
            CompositeTerm::BallIndicator { center, radius } => {
                let d = dist2(v, center);
                if d <= *radius {
                    v.to_vec()
                } else {
                    let t = radius / d;
                    v.iter()
                        .zip(center)
                        .map(|(vi, ci)| ci + t * (vi - ci))
                        .collect()
                }
            }
            CompositeTerm::BoxIndicator { lower, upper } => v
                .iter()
                .zip(lower)
                .zip(upper)
                .map(|((vi, l), h)| vi.clamp(*l, *h))
                .collect(),
        }
    }

    /// prox_{lambda h}(v). For the indicator variants this is the projection
    /// and does not depend on `lambda`; for `Zero` it is the identity.
    pub fn prox(&self, v: &[f64], _lambda: f64) -> Vec<f64> {
        self.project(v)
    }
}
