use serde::{Deserialize, Serialize};

use super::{MatrixNorm, Sl2Ball};
use crate::Result;

/// Growth normalization `V(t)` for ball averages. The choice is a
/// first-class input: infinite-measure experiments need a `V` of lower
/// order than the ball cardinality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Normalization {
    /// `V(t) = #(Gamma intersect B_t)`.
    Cardinality,
    /// `V(t) = t^(beta - 1) e^(alpha t)`.
    ExpPoly { alpha: f64, beta: f64 },
}

impl Normalization {
    /// Evaluate the normalization at log-scale time `t`; `cardinality`
    /// is the exact ball count at that time.
    pub fn value(&self, t: f64, cardinality: u64) -> f64 {
        match self {
            Normalization::Cardinality => cardinality as f64,
            Normalization::ExpPoly { alpha, beta } => t.powf(beta - 1.0) * (alpha * t).exp(),
        }
    }
}

/// The norm-ball family `t -> { g : log |g| < t }` over SL2(Z), with its
/// normalization. Monotone by construction; left translation by a
/// bounded `g` moves `B_t` inside `B_{t + log sigma_max(g)}` because the
/// Frobenius norm is submultiplicative against the operator norm.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NormBallFamily {
    pub norm: MatrixNorm,
    pub normalization: Normalization,
}

impl NormBallFamily {
    pub fn frobenius(normalization: Normalization) -> Self {
        NormBallFamily { norm: MatrixNorm::Euclidean, normalization }
    }

    /// The ball at log-scale time `t`.
    pub fn ball(&self, t: f64) -> Result<Sl2Ball> {
        Sl2Ball::at_log_time(t)
    }

    pub fn normalization_at(&self, t: f64, cardinality: u64) -> f64 {
        self.normalization.value(t, cardinality)
    }
}
