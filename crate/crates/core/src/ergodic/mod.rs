//! Averaging operators over group balls, their limit operators, error
//! series, uniform-rate predictors, coarse-monotonicity audits, ratio
//! statistics and empirical limit densities.
//!
//! Group averages are exact enumerations: every reduced word or lattice
//! element in a ball is visited. Only integrals over the space (norms,
//! means, quadratures) use the deterministic samplers. Parallel merges
//! happen in a fixed shard order with compensated summation, so repeated
//! runs agree bit for bit.

mod average;
mod density;
mod limitop;
mod monotone;
mod ratio;
mod rates;
mod series;

pub use average::{
    ball_average, batch_ball_averages, mass_bound, sphere_word_sums, FiniteWordOperator,
};
pub use density::{
    chi_square_against_lebesgue, empirical_limit_density, total_variation, Binning,
    DensityHistogram, DensityReport,
};
pub use limitop::{limit_apply, LimitOperator};
pub use monotone::{coarse_monotone_check, near_identity_elements, MonotoneReport, MonotoneRow};
pub use ratio::{ratio_statistic, OrbitSet, RatioOutcome, RatioStat};
pub use rates::{balance_epsilon, fit_exponent, predict_uniform_rate, transitive_rate, window_sup, ExponentFit};
pub use series::{error_series, sup_error, ErrorSeries, NormKind, SeriesMeta, SupError};

use std::sync::Arc;

use crate::freegroup::GroupHom;
use crate::matgroup::{CongruenceQuotient, NormBallFamily, Normalization};
use crate::spaces::Space;

/// What to average over: word balls of a free group pushed through a
/// homomorphism, or norm balls of the integer lattice acting through the
/// canonical pairing with the space.
#[derive(Clone)]
pub enum GroupSource {
    Words(GroupHom),
    Lattice {
        family: NormBallFamily,
        /// Present when the lattice acts on a finite coset space by
        /// reduction mod N and left translation.
        quotient: Option<Arc<CongruenceQuotient>>,
    },
}

impl std::fmt::Debug for GroupSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupSource::Words(h) => write!(f, "Words(rank {})", h.rank()),
            GroupSource::Lattice { family, quotient } => write!(
                f,
                "Lattice({:?}, quotient: {})",
                family.norm,
                quotient.as_ref().map(|q| q.modulus()).unwrap_or(0)
            ),
        }
    }
}

/// A ball-averaging setup: group side, normalization, space and budget.
#[derive(Clone, Debug)]
pub struct BallAverageSpec {
    pub space: Space,
    pub source: GroupSource,
    pub normalization: Normalization,
    pub budget: u64,
}

impl BallAverageSpec {
    pub fn words(space: Space, hom: GroupHom, budget: u64) -> Self {
        BallAverageSpec { space, source: GroupSource::Words(hom), normalization: Normalization::Cardinality, budget }
    }

    pub fn lattice(space: Space, family: NormBallFamily, budget: u64) -> Self {
        let normalization = family.normalization;
        BallAverageSpec {
            space,
            source: GroupSource::Lattice { family, quotient: None },
            normalization,
            budget,
        }
    }

    pub fn lattice_on_quotient(
        space: Space,
        family: NormBallFamily,
        quotient: Arc<CongruenceQuotient>,
        budget: u64,
    ) -> Self {
        let normalization = family.normalization;
        BallAverageSpec {
            space,
            source: GroupSource::Lattice { family, quotient: Some(quotient) },
            normalization,
            budget,
        }
    }
}
